#pragma once

#include <cstddef>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>
#include <vector>

namespace bridgelab {

using Json = nlohmann::ordered_json;

/// One evaluated grid point of a check.
struct Witness {
  std::vector<double> point;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  std::string label;
};

/// Outcome of a named check over a grid. `pass` holds iff max_residual <=
/// tolerance and every evaluated residual was finite.
struct VerificationReport {
  static constexpr int kSchema = 1;
  static constexpr std::size_t kMaxWitnesses = 8;

  std::string check_name;
  Json params = Json::object();
  std::string grid_description;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  std::vector<std::string> failures;
  std::vector<Witness> witnesses;  // worst first

  VerificationReport() = default;
  VerificationReport(std::string name, double tol)
      : check_name(std::move(name)), tolerance(tol) {}

  /// Adds a residual. Non-finite residuals fail the report.
  void record(Witness w);
  void skip() { ++skipped; }
  /// A failure that has no residual (quadrature breakdown, violated bound).
  void fail(std::string message);
  /// Folds another report's points into this one.
  void merge(const VerificationReport& other);

  Json to_json() const;
  std::string summary() const;
};

/// |lhs - rhs| / max(|lhs|, |rhs|, floor).
double relative_residual(double lhs, double rhs, double floor = 1e-300);

/// Shortest round-trip decimal form with C locale conventions.
std::string format_double(double v);
/// Fixed 15 significant digits (printf %.15g), locale independent.
std::string format_g15(double v);

/// Document bundling several reports.
Json reports_to_json(const std::vector<VerificationReport>& reports);

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace bridgelab
