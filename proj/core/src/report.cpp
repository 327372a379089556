#include "bridgelab/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <system_error>

#include "bridgelab/errors.hpp"

namespace bridgelab {

namespace {

bool worse(const Witness& a, const Witness& b) {
  // NaN sorts first; ties keep insertion order through stable_sort.
  if (std::isnan(a.residual)) return !std::isnan(b.residual);
  if (std::isnan(b.residual)) return false;
  return a.residual > b.residual;
}

Json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

}  // namespace

double relative_residual(double lhs, double rhs, double floor) {
  const double scale = std::max({std::abs(lhs), std::abs(rhs), floor});
  return std::abs(lhs - rhs) / scale;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string format_g15(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 15);
  return std::string(buf.data(), res.ptr);
}

void VerificationReport::record(Witness w) {
  ++evaluated;
  if (!std::isfinite(w.residual)) {
    pass = false;
    max_residual = std::numeric_limits<double>::infinity();
  } else {
    max_residual = std::max(max_residual, w.residual);
  }
  if (witnesses.size() < kMaxWitnesses || worse(w, witnesses.back())) {
    const auto pos = std::upper_bound(witnesses.begin(), witnesses.end(), w, worse);
    witnesses.insert(pos, std::move(w));
    if (witnesses.size() > kMaxWitnesses) witnesses.pop_back();
  }
  if (!(max_residual <= tolerance)) pass = false;
}

void VerificationReport::fail(std::string message) {
  pass = false;
  failures.push_back(std::move(message));
}

void VerificationReport::merge(const VerificationReport& other) {
  for (const Witness& w : other.witnesses) {
    // Only the retained witnesses can matter for the top list.
    if (witnesses.size() < kMaxWitnesses || worse(w, witnesses.back())) {
      const auto pos = std::upper_bound(witnesses.begin(), witnesses.end(), w, worse);
      witnesses.insert(pos, w);
      if (witnesses.size() > kMaxWitnesses) witnesses.pop_back();
    }
  }
  evaluated += other.evaluated;
  skipped += other.skipped;
  max_residual = std::max(max_residual, other.max_residual);
  if (std::isnan(other.max_residual)) max_residual = other.max_residual;
  for (const auto& f : other.failures) failures.push_back(f);
  pass = pass && other.pass && max_residual <= tolerance;
}

Json VerificationReport::to_json() const {
  Json out;
  out["schema"] = kSchema;
  out["check"] = check_name;
  out["params"] = params;
  out["grid"] = grid_description;
  out["max_residual"] = number(max_residual);
  out["tolerance"] = tolerance;
  out["pass"] = pass;
  out["evaluated"] = evaluated;
  out["skipped"] = skipped;
  out["failures"] = failures;
  Json ws = Json::array();
  for (const Witness& w : witnesses) {
    Json j;
    Json point = Json::array();
    for (double p : w.point) point.push_back(number(p));
    j["point"] = std::move(point);
    j["lhs"] = number(w.lhs);
    j["rhs"] = number(w.rhs);
    j["residual"] = number(w.residual);
    if (!w.label.empty()) j["label"] = w.label;
    ws.push_back(std::move(j));
  }
  out["witnesses"] = std::move(ws);
  return out;
}

std::string VerificationReport::summary() const {
  std::string s = pass ? "PASS " : "FAIL ";
  s += check_name + ": max_residual " + format_double(max_residual) + " <= " +
       format_double(tolerance) + " over " + std::to_string(evaluated) + " points";
  if (skipped > 0) s += " (" + std::to_string(skipped) + " skipped)";
  if (!failures.empty()) s += "; " + failures.front();
  return s;
}

Json reports_to_json(const std::vector<VerificationReport>& reports) {
  Json out;
  out["schema"] = VerificationReport::kSchema;
  bool all = true;
  Json list = Json::array();
  for (const auto& r : reports) {
    all = all && r.pass;
    list.push_back(r.to_json());
  }
  out["pass"] = all;
  out["reports"] = std::move(list);
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw DomainError("cannot open " + tmp.string() + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw ComputationError("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ComputationError("cannot rename into " + path.string());
  }
}

}  // namespace bridgelab
