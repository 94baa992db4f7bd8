#include "contest/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <optional>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "contest/dynamics.hpp"
#include "contest/eos.hpp"
#include "contest/kernels.hpp"
#include "contest/proportional.hpp"
#include "contest/response.hpp"
#include "contest/scenario.hpp"

namespace contest::cli {

namespace {

using io::Json;

struct Options {
  std::string scenario;
  std::string profile;
  std::string config;
  std::string out;
  std::string param;
  std::string grid;
  std::size_t miner = 0;
  std::size_t equilibrium = 0;
  std::size_t miners = 5;
  double alpha = 1.0;
  double prize = 1.0;
  std::uint64_t seed = 1;
  bool oracle = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double certification_tolerance() {
  const char* env = std::getenv("CONTEST_EQ_TOL");
  if (env == nullptr || *env == '\0') return eos::kCertificationTolerance;
  char* end = nullptr;
  const double tol = std::strtod(env, &end);
  if (end == env || *end != '\0' || !(tol > 0.0) || !std::isfinite(tol)) {
    throw UsageError(std::string("CONTEST_EQ_TOL must be a positive number, got '") + env + "'");
  }
  return tol;
}

eos::VerifyOptions verify_options(const Options& opt) {
  eos::VerifyOptions v;
  v.tolerance = certification_tolerance();
  v.grid_oracle = opt.oracle;
  return v;
}

io::Scenario load_scenario(const Options& opt) {
  return io::parse_scenario(io::read_file(opt.scenario));
}

void emit(const Options& opt, const std::string& text, std::ostream& out) {
  if (opt.out.empty()) {
    out << text;
  } else {
    io::write_file(opt.out, text);
  }
}

void print_summary(const Json& doc, std::ostream& out) {
  out << "model: " << doc["model"].get<std::string>() << "\n";
  out << "equilibria: " << doc["equilibria"].size() << "\n";
  const Json& diag = doc["diagnostics"];
  if (diag.value("representatives_only", false)) {
    out << "note: " << diag["certified"].get<std::size_t>()
        << " equilibria in total; one listed per cost multiset\n";
  }
  std::size_t k = 0;
  for (const Json& eq : doc["equilibria"]) {
    out << "equilibrium " << k++ << ": participants "
        << eq["concentration"]["participant_count"].get<std::size_t>();
    if (eq.contains("c_star")) out << ", c_star " << io::format_display(eq["c_star"].get<double>());
    out << ", hhi " << io::format_display(eq["concentration"]["hhi"].get<double>()) << "\n";
    const auto& q = eq["investments"];
    const auto& x = eq["shares"];
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q[i].get<double>() <= 0.0) continue;
      out << "  miner " << i << ": investment " << io::format_display(q[i].get<double>())
          << ", share " << io::format_display(x[i].get<double>()) << "\n";
    }
  }
}

int cmd_solve(const Options& opt, std::ostream& out) {
  const io::Scenario scenario = load_scenario(opt);
  const ContestSpec spec = scenario.spec();
  const eos::VerifyOptions verify = verify_options(opt);

  Json doc;
  int code = kSuccess;
  if (spec.proportional()) {
    const auto eq = proportional::solve_equilibrium(spec);
    const auto cert = eos::verify_equilibrium(spec, InvestmentProfile{eq.investments}, verify);
    doc = io::proportional_document(scenario, spec, eq, cert);
  } else {
    eos::EnumerationOptions eo;
    eo.verify = verify;
    eos::EnumerationStats stats;
    const auto eqs = eos::enumerate_equilibria(spec, eo, &stats);
    doc = io::eos_document(scenario, spec, eqs, stats);
    if (eqs.empty()) code = kNoEquilibrium;
  }
  emit(opt, io::dump(doc), out);
  if (!opt.out.empty()) print_summary(doc, out);
  return code;
}

int cmd_verify(const Options& opt, std::ostream& out) {
  const io::Scenario scenario = load_scenario(opt);
  const ContestSpec spec = scenario.spec();
  const InvestmentProfile profile =
      io::parse_profile(io::read_file(opt.profile), opt.equilibrium);
  validate_profile(spec, profile);
  const eos::Certificate cert = eos::verify_equilibrium(spec, profile, verify_options(opt));

  Json doc;
  doc["schema_version"] = io::kSchemaVersion;
  doc["command"] = "verify";
  doc["scenario"] = io::scenario_to_json(scenario);
  Json q = Json::array();
  for (double v : profile.investments) q.push_back(v);
  doc["investments"] = std::move(q);
  doc["certificate"] = io::certificate_to_json(cert, scenario);
  emit(opt, io::dump(doc), out);
  if (!opt.out.empty()) {
    out << "verdict: " << (cert.certified ? "certified" : "rejected")
        << (cert.marginal ? " (marginal)" : "") << "\n";
  }
  return cert.certified ? kSuccess : kVerificationFailed;
}

int cmd_best_response(const Options& opt, std::ostream& out) {
  const io::Scenario scenario = load_scenario(opt);
  const ContestSpec spec = scenario.spec();
  const InvestmentProfile profile =
      io::parse_profile(io::read_file(opt.profile), opt.equilibrium);
  validate_profile(spec, profile);
  if (opt.miner >= spec.size()) throw UsageError("--miner is out of range");

  const double c = spec.cost(opt.miner);
  const double opposition = opposition_power(spec, profile, opt.miner);
  const auto br = response::best_response(c, spec.alpha(), opposition, spec.prize());

  Json doc;
  doc["schema_version"] = io::kSchemaVersion;
  doc["command"] = "best-response";
  doc["miner"] = opt.miner;
  doc["label"] = scenario.label(opt.miner);
  doc["cost"] = c;
  doc["alpha"] = spec.alpha();
  doc["opposition_power"] = opposition;
  Json maxes = Json::array();
  for (double m : br.maximizers) maxes.push_back(m);
  doc["maximizers"] = std::move(maxes);
  doc["utility"] = br.utility;
  doc["interior_candidate"] = br.interior_candidate ? Json(*br.interior_candidate) : Json();
  if (opt.oracle) {
    const double step = response::default_grid_step(c, spec.prize());
    const auto grid = response::grid_oracle(c, spec.alpha(), opposition, step, spec.prize());
    Json g;
    g["grid_step"] = step;
    g["argmax"] = grid.maximizers.front();
    g["utility"] = grid.utility;
    g["utility_gap"] = br.utility - grid.utility;
    doc["oracle"] = std::move(g);
  }
  emit(opt, io::dump(doc), out);
  return kSuccess;
}

struct Grid {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t steps = 0;
};

Grid parse_grid(const std::string& text) {
  const auto a = text.find(':');
  const auto b = text.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos) {
    throw UsageError("--grid must look like lo:hi:steps");
  }
  try {
    Grid g;
    std::size_t used = 0;
    const std::string lo = text.substr(0, a);
    const std::string hi = text.substr(a + 1, b - a - 1);
    const std::string steps = text.substr(b + 1);
    g.lo = std::stod(lo, &used);
    if (used != lo.size()) throw std::invalid_argument(lo);
    g.hi = std::stod(hi, &used);
    if (used != hi.size()) throw std::invalid_argument(hi);
    const long long n = std::stoll(steps, &used);
    if (used != steps.size() || n < 1) throw std::invalid_argument(steps);
    g.steps = static_cast<std::size_t>(n);
    if (!std::isfinite(g.lo) || !std::isfinite(g.hi) || g.hi < g.lo) {
      throw std::invalid_argument(text);
    }
    return g;
  } catch (const std::logic_error&) {
    throw UsageError("--grid must look like lo:hi:steps with lo <= hi and steps >= 1");
  }
}

std::vector<double> grid_points(const Grid& g) {
  std::vector<double> pts;
  for (std::size_t k = 0; k < g.steps; ++k) {
    pts.push_back(g.steps == 1 ? g.lo
                               : g.lo + (g.hi - g.lo) * static_cast<double>(k) /
                                            static_cast<double>(g.steps - 1));
  }
  return pts;
}

std::vector<std::string> sweep_row(const std::string& param, double value,
                                   const io::Scenario& base, const eos::VerifyOptions& verify) {
  io::Scenario s = base;
  if (param == "alpha") {
    s.alpha = value;
  } else if (param == "cost_scale") {
    for (double& c : s.costs) c *= value;
  } else {
    s.prize = value;
  }
  std::vector<std::string> row{param, io::format_real(value)};
  try {
    const ContestSpec spec = s.spec();
    InvestmentProfile profile;
    std::size_t count = 1;
    if (spec.proportional()) {
      profile.investments = proportional::solve_equilibrium(spec).investments;
    } else {
      eos::EnumerationOptions eo;
      eo.verify = verify;
      eo.execution = Execution::serial;
      eo.representatives_only = true;
      eos::EnumerationStats stats;
      const auto eqs = eos::enumerate_equilibria(spec, eo, &stats);
      count = stats.certified;
      if (eqs.empty()) {
        row.insert(row.end(), {"no_equilibrium", "0", "0", "", "", "", ""});
        return row;
      }
      // Report the equilibrium with the most participants.
      const auto widest = std::max_element(
          eqs.begin(), eqs.end(), [](const eos::EosEquilibrium& a, const eos::EosEquilibrium& b) {
            return a.participants.size() < b.participants.size();
          });
      profile.investments = widest->investments;
    }
    const ConcentrationReport rep = concentration(spec, profile);
    double total = 0.0;
    for (double q : profile.investments) total += q;
    row.insert(row.end(), {"ok", std::to_string(count), std::to_string(rep.participant_count),
                           io::format_real(rep.hhi), io::format_real(rep.top_k_shares.front()),
                           io::format_real(total), io::format_real(rep.rent_dissipation)});
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), ',', ';');
    row.insert(row.end(), {"error: " + msg, "", "", "", "", "", ""});
  }
  return row;
}

int cmd_sweep(const Options& opt, std::ostream& out) {
  const io::Scenario scenario = load_scenario(opt);
  scenario.spec();  // reject an invalid base scenario up front
  if (opt.param != "alpha" && opt.param != "cost_scale" && opt.param != "prize") {
    throw UsageError("--param must be one of alpha, cost_scale, prize");
  }
  Grid grid = parse_grid(opt.grid);

  io::CsvWriter csv;
  csv.header({"param", "value", "status", "equilibrium_count", "participant_count", "hhi",
              "top1_share", "total_investment", "rent_dissipation"});
  std::vector<double> points;
  if (opt.param == "alpha") {
    const Grid requested = grid;
    grid.lo = std::clamp(grid.lo, 1.0, 2.0);
    grid.hi = std::clamp(grid.hi, 1.0, 2.0);
    if (grid.lo != requested.lo || grid.hi != requested.hi) {
      csv.comment("warning: alpha grid clipped to " + io::format_real(grid.lo) + ".." +
                  io::format_real(grid.hi) + " (pure equilibria need 1 <= alpha <= 2)");
    }
    points = grid_points(grid);
  } else {
    for (double v : grid_points(grid)) {
      if (v > 0.0) points.push_back(v);
    }
    if (points.size() != grid.steps) {
      csv.comment("warning: dropped " + std::to_string(grid.steps - points.size()) +
                  " non-positive " + opt.param + " grid points");
    }
  }

  const eos::VerifyOptions verify = verify_options(opt);
  const auto rows = kernels::map_indexed<std::vector<std::string>>(
      points.size(), [&](std::size_t k) { return sweep_row(opt.param, points[k], scenario, verify); },
      Execution::parallel);
  for (const auto& r : rows) csv.row(r);
  emit(opt, csv.text, out);
  return kSuccess;
}

int cmd_dynamics(const Options& opt, std::ostream& out, std::ostream& err) {
  const io::Scenario scenario = load_scenario(opt);
  const ContestSpec spec = scenario.spec();
  dynamics::DynamicsConfig cfg;
  if (!opt.config.empty()) cfg = io::parse_dynamics_config(io::read_file(opt.config));
  cfg.certification_tol = certification_tolerance();
  if (cfg.initial_profile.investments.empty()) {
    std::mt19937_64 rng(opt.seed);
    double c_min = *std::min_element(spec.costs().begin(), spec.costs().end());
    std::uniform_real_distribution<double> dist(0.01, 1.0);
    for (std::size_t i = 0; i < spec.size(); ++i) {
      cfg.initial_profile.investments.push_back(dist(rng) * spec.prize() / c_min);
    }
  }
  const dynamics::Trajectory traj = dynamics::run_dynamics(spec, cfg);

  io::CsvWriter csv;
  csv.header({"round", "miner_label", "investment", "share", "utility"});
  for (std::size_t r = 0; r < traj.rounds.size(); ++r) {
    const InvestmentProfile& p = traj.rounds[r];
    const MarketShares ms = shares(spec, p);
    for (std::size_t i = 0; i < spec.size(); ++i) {
      const double u = spec.prize() * ms.shares[i] - spec.cost(i) * p[i];
      csv.row({std::to_string(r + 1), scenario.label(i), io::format_real(p[i]),
               io::format_real(ms.shares[i]), io::format_real(u)});
    }
  }
  emit(opt, csv.text, out);
  std::ostream& summary = opt.out.empty() ? err : out;
  summary << "status: " << dynamics::to_string(traj.status) << "\n";
  summary << "rounds: " << traj.rounds_used << "\n";
  return kSuccess;
}

int cmd_generate(const Options& opt, std::ostream& out) {
  if (opt.miners < 2) throw UsageError("--miners must be at least 2");
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> log_cost(std::log(0.5), std::log(2.0));
  io::Scenario s;
  s.alpha = opt.alpha;
  s.prize = opt.prize;
  for (std::size_t i = 0; i < opt.miners; ++i) s.costs.push_back(std::exp(log_cost(rng)));
  s.spec();
  emit(opt, io::dump(io::scenario_to_json(s)), out);
  return kSuccess;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equilibrium solver, verifier and simulator for fixed-prize mining contests",
               "contest-eq"};
  app.require_subcommand(1);
  Options opt;

  auto* solve = app.add_subcommand("solve", "Solve a scenario for its equilibria");
  solve->add_option("--scenario", opt.scenario, "Scenario JSON file")->required();
  solve->add_option("--out", opt.out, "Result document path (stdout when omitted)");
  solve->add_flag("--oracle", opt.oracle, "Cross-check certificates with the grid oracle");

  auto* verify = app.add_subcommand("verify", "Certify an investment profile");
  verify->add_option("--scenario", opt.scenario, "Scenario JSON file")->required();
  verify->add_option("--profile", opt.profile, "Profile or result document")->required();
  verify->add_option("--equilibrium", opt.equilibrium,
                     "Equilibrium index when --profile is a result document");
  verify->add_option("--out", opt.out, "Certificate path (stdout when omitted)");
  verify->add_flag("--oracle", opt.oracle, "Cross-check with the grid oracle");

  auto* sweep = app.add_subcommand("sweep", "Sweep a parameter and report concentration");
  sweep->add_option("--scenario", opt.scenario, "Scenario JSON file")->required();
  sweep->add_option("--param", opt.param, "alpha | cost_scale | prize")->required();
  sweep->add_option("--grid", opt.grid, "lo:hi:steps")->required();
  sweep->add_option("--out", opt.out, "CSV path (stdout when omitted)");

  auto* dyn = app.add_subcommand("dynamics", "Run round-robin best-response dynamics");
  dyn->add_option("--scenario", opt.scenario, "Scenario JSON file")->required();
  dyn->add_option("--config", opt.config, "Dynamics config JSON file");
  dyn->add_option("--seed", opt.seed, "Seed for a random start when the config has none");
  dyn->add_option("--out", opt.out, "Trajectory CSV path (stdout when omitted)");

  auto* br = app.add_subcommand("best-response", "Best response of one miner to a profile");
  br->add_option("--scenario", opt.scenario, "Scenario JSON file")->required();
  br->add_option("--profile", opt.profile, "Profile or result document")->required();
  br->add_option("--equilibrium", opt.equilibrium, "Equilibrium index in a result document");
  br->add_option("--miner", opt.miner, "Miner index (0-based)")->required();
  br->add_option("--out", opt.out, "Output path (stdout when omitted)");
  br->add_flag("--oracle", opt.oracle, "Also run the grid oracle");

  auto* gen = app.add_subcommand("generate", "Write a random scenario");
  gen->add_option("--seed", opt.seed, "Random seed");
  gen->add_option("--miners", opt.miners, "Number of miners");
  gen->add_option("--alpha", opt.alpha, "Scale exponent");
  gen->add_option("--prize", opt.prize, "Prize value");
  gen->add_option("--out", opt.out, "Scenario path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(opt, out);
    if (verify->parsed()) return cmd_verify(opt, out);
    if (sweep->parsed()) return cmd_sweep(opt, out);
    if (dyn->parsed()) return cmd_dynamics(opt, out, err);
    if (br->parsed()) return cmd_best_response(opt, out);
    if (gen->parsed()) return cmd_generate(opt, out);
  } catch (const io::ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const InvalidProfile& e) {
    err << "invalid profile: " << e.what() << "\n";
    return kParseError;
  } catch (const InvalidSpec& e) {
    err << "invalid scenario: " << e.what() << "\n";
    return kInvalidSpec;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace contest::cli
