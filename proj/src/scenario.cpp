#include "contest/scenario.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace contest::io {

namespace {

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

void reject_unknown(const Json& obj, const std::set<std::string>& allowed,
                    std::string_view what) {
  if (!obj.is_object()) throw ParseError(std::string(what) + " must be a JSON object");
  for (const auto& item : obj.items()) {
    if (!allowed.contains(item.key())) {
      throw ParseError("unknown field '" + item.key() + "' in " + std::string(what));
    }
  }
}

double number_field(const Json& obj, const char* key) {
  const Json& v = obj.at(key);
  if (!v.is_number()) throw ParseError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::vector<double> number_array(const Json& v, const char* key) {
  if (!v.is_array()) throw ParseError(std::string("field '") + key + "' must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const Json& e : v) {
    if (!e.is_number()) {
      throw ParseError(std::string("field '") + key + "' must contain only numbers");
    }
    out.push_back(e.get<double>());
  }
  return out;
}

Json real_array(const std::vector<double>& values) {
  Json arr = Json::array();
  for (double v : values) arr.push_back(v);
  return arr;
}

Json index_array(const std::vector<std::size_t>& values) {
  Json arr = Json::array();
  for (std::size_t v : values) arr.push_back(v);
  return arr;
}

std::vector<double> utilities_of(const ContestSpec& spec, const std::vector<double>& q,
                                 const std::vector<double>& x) {
  std::vector<double> u(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    u[i] = spec.prize() * x[i] - spec.cost(i) * q[i];
  }
  return u;
}

}  // namespace

ContestSpec Scenario::spec() const {
  if (!labels.empty() && labels.size() != costs.size()) {
    throw InvalidSpec("labels has " + std::to_string(labels.size()) + " entries but there are " +
                      std::to_string(costs.size()) + " costs");
  }
  return ContestSpec(costs, alpha, prize);
}

std::string Scenario::label(std::size_t miner) const {
  if (miner < labels.size()) return labels[miner];
  return std::to_string(miner);
}

Scenario parse_scenario(std::string_view text) {
  const Json doc = parse_json(text);
  reject_unknown(doc, {"alpha", "costs", "prize", "labels"}, "scenario");
  Scenario s;
  if (!doc.contains("costs")) throw ParseError("scenario is missing 'costs'");
  s.costs = number_array(doc.at("costs"), "costs");
  if (doc.contains("alpha")) s.alpha = number_field(doc, "alpha");
  if (doc.contains("prize")) s.prize = number_field(doc, "prize");
  if (doc.contains("labels")) {
    const Json& labels = doc.at("labels");
    if (!labels.is_array()) throw ParseError("field 'labels' must be an array");
    for (const Json& l : labels) {
      if (!l.is_string()) throw ParseError("field 'labels' must contain only strings");
      s.labels.push_back(l.get<std::string>());
    }
  }
  return s;
}

Json scenario_to_json(const Scenario& scenario) {
  Json j;
  j["alpha"] = scenario.alpha;
  j["costs"] = real_array(scenario.costs);
  j["prize"] = scenario.prize;
  if (!scenario.labels.empty()) j["labels"] = scenario.labels;
  return j;
}

InvestmentProfile parse_profile(std::string_view text, std::size_t equilibrium_index) {
  const Json doc = parse_json(text);
  if (!doc.is_object()) throw ParseError("profile must be a JSON object");
  if (doc.contains("investments")) {
    return InvestmentProfile{number_array(doc.at("investments"), "investments")};
  }
  if (doc.contains("equilibria")) {
    const Json& eqs = doc.at("equilibria");
    if (!eqs.is_array()) throw ParseError("field 'equilibria' must be an array");
    if (equilibrium_index >= eqs.size()) {
      throw ParseError("result document has " + std::to_string(eqs.size()) +
                       " equilibria; index " + std::to_string(equilibrium_index) +
                       " requested");
    }
    const Json& eq = eqs.at(equilibrium_index);
    if (!eq.is_object() || !eq.contains("investments")) {
      throw ParseError("equilibrium entry has no 'investments'");
    }
    return InvestmentProfile{number_array(eq.at("investments"), "investments")};
  }
  throw ParseError("profile needs an 'investments' array or an 'equilibria' block");
}

dynamics::DynamicsConfig parse_dynamics_config(std::string_view text) {
  const Json doc = parse_json(text);
  reject_unknown(doc, {"initial_profile", "max_rounds", "convergence_tol", "damping"},
                 "dynamics config");
  dynamics::DynamicsConfig cfg;
  if (doc.contains("initial_profile")) {
    cfg.initial_profile.investments = number_array(doc.at("initial_profile"), "initial_profile");
  }
  if (doc.contains("max_rounds")) {
    const Json& v = doc.at("max_rounds");
    if (!v.is_number_integer()) throw ParseError("field 'max_rounds' must be an integer");
    const auto rounds = v.get<long long>();
    if (rounds < 1) throw ParseError("field 'max_rounds' must be at least 1");
    cfg.max_rounds = static_cast<std::size_t>(rounds);
  }
  if (doc.contains("convergence_tol")) {
    cfg.convergence_tol = number_field(doc, "convergence_tol");
  }
  if (doc.contains("damping")) cfg.damping = number_field(doc, "damping");
  return cfg;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string format_display(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

Json concentration_to_json(const ConcentrationReport& report) {
  Json j;
  j["participant_count"] = report.participant_count;
  j["hhi"] = report.hhi;
  j["top_k_shares"] = real_array(report.top_k_shares);
  j["rent_dissipation"] = report.rent_dissipation;
  return j;
}

Json certificate_to_json(const eos::Certificate& cert, const Scenario& scenario) {
  Json j;
  j["certified"] = cert.certified;
  j["marginal"] = cert.marginal;
  j["tolerance"] = cert.tolerance;
  Json miners = Json::array();
  for (std::size_t i = 0; i < cert.miners.size(); ++i) {
    const eos::MinerVerdict& v = cert.miners[i];
    Json m;
    m["miner"] = i;
    m["label"] = scenario.label(i);
    m["utility"] = v.utility;
    m["best_utility"] = v.best_utility;
    m["best_responses"] = real_array(v.best_responses);
    m["slack"] = v.slack;
    m["gain"] = std::max(0.0, -v.slack);
    m["has_best_response"] = v.has_best_response;
    m["marginal"] = v.marginal;
    if (v.oracle_utility) m["oracle_utility"] = *v.oracle_utility;
    miners.push_back(std::move(m));
  }
  j["miners"] = std::move(miners);
  return j;
}

Json proportional_document(const Scenario& scenario, const ContestSpec& spec,
                           const proportional::ProportionalEquilibrium& eq,
                           const eos::Certificate& cert) {
  const InvestmentProfile profile{eq.investments};
  Json block;
  block["participants"] = index_array(eq.participants);
  block["c_star"] = eq.c_star;
  block["total_investment"] = eq.total_investment;
  block["investments"] = real_array(eq.investments);
  block["shares"] = real_array(eq.shares);
  block["utilities"] = real_array(utilities_of(spec, eq.investments, eq.shares));
  block["concentration"] = concentration_to_json(concentration(spec, profile));
  block["certificate"] = certificate_to_json(cert, scenario);

  std::vector<double> scaled(spec.costs().begin(), spec.costs().end());
  for (double& c : scaled) c /= spec.prize();
  double max_residual = 0.0;
  for (double r : proportional::foc_residual(spec, profile)) {
    max_residual = std::max(max_residual, std::abs(r));
  }

  Json diag;
  diag["threshold_method"] =
      eq.threshold.method == proportional::ThresholdMethod::prefix_scan ? "prefix_scan"
                                                                          : "bisection";
  diag["bisection_iterations"] = eq.threshold.iterations;
  diag["threshold_residual"] =
      std::abs(proportional::threshold_function(scaled, eq.threshold.c_star) - 1.0);
  diag["max_foc_residual"] = max_residual;

  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "solve";
  doc["scenario"] = scenario_to_json(scenario);
  doc["model"] = "proportional";
  doc["equilibria"] = Json::array({std::move(block)});
  doc["diagnostics"] = std::move(diag);
  return doc;
}

Json eos_document(const Scenario& scenario, const ContestSpec& spec,
                  const std::vector<eos::EosEquilibrium>& equilibria,
                  const eos::EnumerationStats& stats) {
  Json blocks = Json::array();
  for (const eos::EosEquilibrium& eq : equilibria) {
    Json block;
    block["participants"] = index_array(eq.participants);
    block["power_scale"] = eq.power_scale;
    block["investments"] = real_array(eq.investments);
    block["shares"] = real_array(eq.shares);
    block["utilities"] = real_array(utilities_of(spec, eq.investments, eq.shares));
    block["concentration"] =
        concentration_to_json(concentration(spec, InvestmentProfile{eq.investments}));
    block["certificate"] = certificate_to_json(eq.certificate, scenario);
    Json diag;
    diag["bisection_iterations"] = eq.iterations;
    diag["share_sum_residual"] = eq.sum_residual;
    diag["max_foc_residual"] = eq.max_foc_residual;
    block["diagnostics"] = std::move(diag);
    blocks.push_back(std::move(block));
  }
  Json diag;
  diag["participant_cap"] = eos::participant_cap(spec.alpha());
  diag["candidate_sets"] = stats.candidate_sets;
  diag["feasible_sets"] = stats.feasible_sets;
  diag["certified"] = stats.certified;
  diag["representatives_only"] = stats.representatives_only;

  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "solve";
  doc["scenario"] = scenario_to_json(scenario);
  doc["model"] = "eos";
  doc["equilibria"] = std::move(blocks);
  doc["diagnostics"] = std::move(diag);
  return doc;
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

void CsvWriter::header(const std::vector<std::string>& columns) { row(columns); }

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) text += ',';
    const std::string& f = fields[k];
    if (f.find_first_of(",\"\n") != std::string::npos) {
      text += '"';
      for (char ch : f) {
        if (ch == '"') text += '"';
        text += ch;
      }
      text += '"';
    } else {
      text += f;
    }
  }
  text += '\n';
}

void CsvWriter::comment(std::string_view line) {
  text += "# ";
  text += line;
  text += '\n';
}

}  // namespace contest::io
