#pragma once

// Scenario files, result documents and CSV output for the command-line tool.
//
// Scenario:   {"alpha": 1.0, "costs": [...], "prize": 1.0, "labels": [...]}
// Profile:    {"investments": [...]}, or any result document (its equilibria
//             block is read).
// Dynamics:   {"initial_profile": [...], "max_rounds": N,
//              "convergence_tol": t, "damping": d}; every field optional.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "contest/core.hpp"
#include "contest/dynamics.hpp"
#include "contest/eos.hpp"
#include "contest/proportional.hpp"

namespace contest::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Malformed input: bad syntax, wrong types, missing or unknown fields.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Scenario {
  double alpha = 1.0;
  std::vector<double> costs;
  double prize = 1.0;
  std::vector<std::string> labels;  // empty, or one per miner

  /// Throws InvalidSpec when the values break a contest invariant.
  ContestSpec spec() const;
  std::string label(std::size_t miner) const;
};

Scenario parse_scenario(std::string_view text);
Json scenario_to_json(const Scenario& scenario);

/// Reads "investments", or equilibria[index].investments from a result document.
InvestmentProfile parse_profile(std::string_view text, std::size_t equilibrium_index = 0);

dynamics::DynamicsConfig parse_dynamics_config(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Shortest decimal that reads back to the same double.
std::string format_real(double value);
/// 12 significant digits for human-facing summaries.
std::string format_display(double value);

Json concentration_to_json(const ConcentrationReport& report);
Json certificate_to_json(const eos::Certificate& cert, const Scenario& scenario);

Json proportional_document(const Scenario& scenario, const ContestSpec& spec,
                           const proportional::ProportionalEquilibrium& eq,
                           const eos::Certificate& cert);

Json eos_document(const Scenario& scenario, const ContestSpec& spec,
                  const std::vector<eos::EosEquilibrium>& equilibria,
                  const eos::EnumerationStats& stats);

/// Field order is fixed, so equal inputs serialize to identical bytes.
std::string dump(const Json& doc);

struct CsvWriter {
  std::string text;

  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& fields);
  void comment(std::string_view line);
};

}  // namespace contest::io
