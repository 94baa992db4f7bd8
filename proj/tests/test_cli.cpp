#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "contest/cli.hpp"
#include "contest/scenario.hpp"
#include "support.hpp"

using namespace contest;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("contest_cli_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& contents) const {
    const fs::path p = path / name;
    io::write_file(p, contents);
    return p.string();
  }
  std::string at(const std::string& name) const { return (path / name).string(); }
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "contest-eq");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string harmonic_json() {
  io::Scenario s;
  s.costs = testing::harmonic_costs();
  return io::dump(io::scenario_to_json(s));
}

}  // namespace

TEST_CASE("scenario parsing") {
  const auto s = io::parse_scenario(R"({"costs": [1, 2.5], "labels": ["a", "b"]})");
  CHECK(s.alpha == 1.0);
  CHECK(s.prize == 1.0);
  CHECK(s.costs == std::vector<double>{1, 2.5});
  CHECK(s.label(1) == "b");

  CHECK_THROWS_AS(io::parse_scenario("{"), io::ParseError);
  CHECK_THROWS_AS(io::parse_scenario(R"({"alpha": 1})"), io::ParseError);
  CHECK_THROWS_AS(io::parse_scenario(R"({"costs": [1, 1], "beta": 2})"), io::ParseError);
  CHECK_THROWS_AS(io::parse_scenario(R"({"costs": [1, "x"]})"), io::ParseError);
  CHECK_THROWS_AS(io::parse_scenario(R"({"costs": [1, 1], "alpha": "2"})"), io::ParseError);
  CHECK_THROWS_AS(io::parse_scenario(R"([1, 2])"), io::ParseError);

  CHECK_THROWS_AS(io::parse_scenario(R"({"costs": [1]})").spec(), InvalidSpec);
  CHECK_THROWS_AS(io::parse_scenario(R"({"costs": [1, 1], "labels": ["a"]})").spec(),
                  InvalidSpec);
}

TEST_CASE("scenario round trip is lossless") {
  testing::Gen gen(61);
  for (int trial = 0; trial < 100; ++trial) {
    io::Scenario s;
    s.alpha = gen.uniform(1, 2);
    s.prize = gen.log_uniform(0.1, 10);
    s.costs = gen.costs(gen.index(2, 10), 1e-3, 1e3);
    const auto back = io::parse_scenario(io::dump(io::scenario_to_json(s)));
    CHECK(back.alpha == s.alpha);
    CHECK(back.prize == s.prize);
    CHECK(back.costs == s.costs);
  }
}

TEST_CASE("number formatting") {
  CHECK(io::format_real(0.1) == "0.1");
  CHECK(std::stod(io::format_real(1.0 / 3)) == 1.0 / 3);
  CHECK(io::format_display(1.0 / 3) == "0.333333333333");
}

TEST_CASE("csv quoting") {
  io::CsvWriter csv;
  csv.header({"a", "b"});
  csv.row({"x,y", "say \"hi\""});
  csv.comment("note");
  CHECK(csv.text == "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n# note\n");
}

TEST_CASE("profile parsing") {
  CHECK(io::parse_profile(R"({"investments": [0.5, 0]})").investments ==
        std::vector<double>{0.5, 0});
  CHECK(io::parse_profile(R"({"equilibria": [{"investments": [1, 2]}, {"investments": [3, 4]}]})", 1)
            .investments == std::vector<double>{3, 4});
  CHECK_THROWS_AS(io::parse_profile(R"({"equilibria": []})"), io::ParseError);
  CHECK_THROWS_AS(io::parse_profile(R"({"q": [1]})"), io::ParseError);
}

TEST_CASE("dynamics config parsing") {
  const auto cfg = io::parse_dynamics_config(
      R"({"initial_profile": [1, 2], "max_rounds": 5, "convergence_tol": 1e-6, "damping": 0.5})");
  CHECK(cfg.initial_profile.investments == std::vector<double>{1, 2});
  CHECK(cfg.max_rounds == 5);
  CHECK(cfg.damping == 0.5);
  CHECK_THROWS_AS(io::parse_dynamics_config(R"({"max_rounds": 0})"), io::ParseError);
  CHECK_THROWS_AS(io::parse_dynamics_config(R"({"max_rounds": 1.5})"), io::ParseError);
  CHECK_THROWS_AS(io::parse_dynamics_config(R"({"order": "random"})"), io::ParseError);
}

TEST_CASE("solve then verify round trip") {
  TempDir dir;
  const auto scenario = dir.file("ex1.json", harmonic_json());
  const auto result = dir.at("r1.json");
  const auto r = run({"solve", "--scenario", scenario, "--out", result});
  CHECK(r.code == cli::kSuccess);
  CHECK(r.out.find("participants 7") != std::string::npos);

  const auto doc = io::Json::parse(io::read_file(result));
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["model"] == "proportional");
  CHECK(doc["equilibria"][0]["concentration"]["participant_count"] == 7);
  const double c_star = doc["equilibria"][0]["c_star"];
  CHECK(c_star > 7.0 / 8);
  CHECK(c_star < 8.0 / 9);

  const auto v = run({"verify", "--scenario", scenario, "--profile", result});
  CHECK(v.code == cli::kSuccess);
  CHECK(io::Json::parse(v.out)["certificate"]["certified"] == true);

  // Byte-identical output on a second run.
  const auto again = dir.at("r1b.json");
  run({"solve", "--scenario", scenario, "--out", again});
  CHECK(io::read_file(result) == io::read_file(again));
}

TEST_CASE("halving-gap and knife-edge scenarios through the command line") {
  TempDir dir;
  io::Scenario ex2;
  for (int i = 1; i <= 10; ++i) ex2.costs.push_back(1 - std::ldexp(1.0, -i));
  const auto r2 = run({"solve", "--scenario", dir.file("ex2.json", io::dump(io::scenario_to_json(ex2)))});
  REQUIRE(r2.code == cli::kSuccess);
  const auto doc2 = io::Json::parse(r2.out);
  for (int i = 1; i <= 10; ++i) {
    CHECK(doc2["equilibria"][0]["shares"][i - 1].get<double>() >= std::ldexp(1.0, -i));
  }

  const auto ex3 = dir.file("ex3.json", R"({"alpha": 2, "costs": [0.7071067811865476, 1, 1, 1]})");
  const auto out3 = dir.at("r3.json");
  REQUIRE(run({"solve", "--scenario", ex3, "--out", out3}).code == cli::kSuccess);
  const auto doc3 = io::Json::parse(io::read_file(out3));
  REQUIRE(doc3["equilibria"].size() == 3);
  for (const auto& eq : doc3["equilibria"]) CHECK(eq["investments"][0] == 0.0);

  const auto v = run({"verify", "--scenario", ex3, "--profile", out3, "--equilibrium", "2"});
  CHECK(v.code == cli::kSuccess);
  const auto cert = io::Json::parse(v.out)["certificate"];
  CHECK(cert["marginal"] == true);
  CHECK(cert["miners"][0]["marginal"] == true);
}

TEST_CASE("exit codes") {
  TempDir dir;
  const auto good = dir.file("u.json", R"({"costs": [1, 1]})");
  const auto uniform = dir.file("q.json", R"({"investments": [1, 1]})");
  const auto v = run({"verify", "--scenario", good, "--profile", uniform});
  CHECK(v.code == cli::kVerificationFailed);
  const auto cert = io::Json::parse(v.out)["certificate"];
  for (const auto& m : cert["miners"]) CHECK(m["gain"].get<double>() > 0);

  CHECK(run({"solve", "--scenario", dir.file("p.json", "{oops")}).code == cli::kParseError);
  CHECK(run({"solve", "--scenario", dir.file("s.json", R"({"costs": [1, -1]})")}).code ==
        cli::kInvalidSpec);
  CHECK(run({"solve", "--scenario", dir.file("a.json", R"({"alpha": 2.5, "costs": [1, 1]})")})
            .code == cli::kNoEquilibrium);
  CHECK(run({"verify", "--scenario", good, "--profile", dir.file("short.json",
                                                                   R"({"investments": [1]})")})
            .code == cli::kParseError);
  CHECK(run({"solve"}).code == cli::kUsage);
  CHECK(run({"solve", "--scenario", dir.at("missing.json")}).code == cli::kUsage);
  CHECK(run({}).code == cli::kUsage);
}

TEST_CASE("tolerance override from the environment") {
  TempDir dir;
  const auto scenario = dir.file("u.json", R"({"costs": [1, 1]})");
  // Utility 0.25 - 0.2499 is close to the optimum; a loose tolerance accepts it.
  const auto profile = dir.file("q.json", R"({"investments": [0.2501, 0.25]})");
  CHECK(run({"verify", "--scenario", scenario, "--profile", profile}).code ==
        cli::kVerificationFailed);
  setenv("CONTEST_EQ_TOL", "1e-3", 1);
  CHECK(run({"verify", "--scenario", scenario, "--profile", profile}).code == cli::kSuccess);
  setenv("CONTEST_EQ_TOL", "nope", 1);
  CHECK(run({"verify", "--scenario", scenario, "--profile", profile}).code == cli::kUsage);
  unsetenv("CONTEST_EQ_TOL");
}

TEST_CASE("sweeps") {
  TempDir dir;
  io::Scenario s;
  for (int k = 0; k < 25; ++k) s.costs.push_back(1.0);
  const auto sym = dir.file("sym.json", io::dump(io::scenario_to_json(s)));

  const auto capped = run({"sweep", "--scenario", sym, "--param", "alpha", "--grid", "1.05:1.1:2"});
  REQUIRE(capped.code == cli::kSuccess);
  std::istringstream lines(capped.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line ==
        "param,value,status,equilibrium_count,participant_count,hhi,top1_share,total_investment,"
        "rent_dissipation");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(lines, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    rows.push_back(f);
  }
  REQUIRE(rows.size() == 2);
  CHECK(std::stoi(rows[0][4]) <= 21);
  CHECK(std::stoi(rows[1][4]) <= 11);

  const auto clipped = run({"sweep", "--scenario", sym, "--param", "alpha", "--grid", "0.5:3:3"});
  CHECK(clipped.out.find("# warning: alpha grid clipped") != std::string::npos);

  const auto ex1 = dir.file("ex1.json", harmonic_json());
  const auto out = dir.at("scale.csv");
  REQUIRE(run({"sweep", "--scenario", ex1, "--param", "cost_scale", "--grid", "0.5:4:5", "--out",
               out})
              .code == cli::kSuccess);
  std::istringstream csv(io::read_file(out));
  std::getline(csv, line);
  std::string first_hhi;
  int rows_seen = 0;
  while (std::getline(csv, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (first_hhi.empty()) first_hhi = f[5];
    CHECK(std::stod(f[5]) == doctest::Approx(std::stod(first_hhi)).epsilon(1e-12));
    ++rows_seen;
  }
  CHECK(rows_seen == 5);

  CHECK(run({"sweep", "--scenario", ex1, "--param", "beta", "--grid", "1:2:2"}).code ==
        cli::kUsage);
  CHECK(run({"sweep", "--scenario", ex1, "--param", "prize", "--grid", "2:1:2"}).code ==
        cli::kUsage);
}

TEST_CASE("dynamics command") {
  TempDir dir;
  const auto ex1 = dir.file("ex1.json", harmonic_json());
  const auto cfg = dir.file("cfg.json", R"({"initial_profile": [1,1,1,1,1,1,1,1,1,1]})");
  const auto out = dir.at("traj.csv");
  const auto r = run({"dynamics", "--scenario", ex1, "--config", cfg, "--out", out});
  REQUIRE(r.code == cli::kSuccess);
  CHECK(r.out.find("status: converged") != std::string::npos);

  // The final row block matches the closed-form solve within 1e-8.
  const auto solved = io::Json::parse(run({"solve", "--scenario", ex1}).out);
  const auto& q = solved["equilibria"][0]["investments"];
  std::istringstream csv(io::read_file(out));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(csv, line)) lines.push_back(line);
  REQUIRE(lines.size() > 10);
  for (std::size_t i = 0; i < 10; ++i) {
    std::stringstream ss(lines[lines.size() - 10 + i]);
    std::vector<std::string> f;
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    CHECK(f[1] == std::to_string(i));
    CHECK(std::abs(std::stod(f[2]) - q[i].get<double>()) <= 1e-8);
  }

  const auto one = dir.file("one.json", R"({"initial_profile": [1,1,1,1,1,1,1,1,1,1], "max_rounds": 1})");
  const auto r1 = run({"dynamics", "--scenario", ex1, "--config", one});
  std::istringstream rows(r1.out);
  int count = 0;
  while (std::getline(rows, line)) ++count;
  CHECK(count == 1 + 10);

  const auto cyc_s = dir.file("cyc.json", R"({"alpha": 2.5, "costs": [1, 1, 1]})");
  const auto cyc_c = dir.file("cyc_cfg.json", R"({"initial_profile": [1, 1, 1]})");
  const auto rc = run({"dynamics", "--scenario", cyc_s, "--config", cyc_c, "--out",
                       dir.at("cyc.csv")});
  CHECK(rc.out.find("status: cycle_detected") != std::string::npos);

  // Seeded random starts are reproducible.
  const auto a = run({"dynamics", "--scenario", ex1, "--seed", "9"});
  const auto b = run({"dynamics", "--scenario", ex1, "--seed", "9"});
  CHECK(a.out == b.out);
}

TEST_CASE("best-response command") {
  TempDir dir;
  const auto s = dir.file("s.json", R"({"costs": [1, 1]})");
  const auto p = dir.file("p.json", R"({"investments": [0.1, 0.25]})");
  const auto r = run({"best-response", "--scenario", s, "--profile", p, "--miner", "0", "--oracle"});
  REQUIRE(r.code == cli::kSuccess);
  const auto doc = io::Json::parse(r.out);
  CHECK(doc["maximizers"][0].get<double>() == doctest::Approx(0.25));
  CHECK(std::abs(doc["oracle"]["argmax"].get<double>() - 0.25) <= 1e-6);
  CHECK(run({"best-response", "--scenario", s, "--profile", p, "--miner", "5"}).code ==
        cli::kUsage);
}

TEST_CASE("generate command") {
  const auto a = run({"generate", "--seed", "3", "--miners", "6", "--alpha", "1.5"});
  const auto b = run({"generate", "--seed", "3", "--miners", "6", "--alpha", "1.5"});
  REQUIRE(a.code == cli::kSuccess);
  CHECK(a.out == b.out);
  const auto s = io::parse_scenario(a.out);
  CHECK(s.costs.size() == 6);
  CHECK(s.alpha == 1.5);
  CHECK(run({"generate", "--miners", "1"}).code == cli::kUsage);
}
