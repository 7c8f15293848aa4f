#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace accel {

/// One failing tuple recorded by a checker.
struct Witness {
  std::string check;
  std::map<std::string, double> values;
};

/// Pass/fail evidence produced by a theorem checker.
///
/// Every individual check contributes a signed violation that is positive
/// exactly when the check fails: `lhs - rhs` for a strict inequality lhs < rhs
/// (a tie counts as the smallest positive double), `error - tol` for a
/// tolerance check, 0/1 for a boolean certificate. `max_violation` is the
/// largest of those, so passed <=> max_violation <= tolerance with
/// tolerance = 0. The per-check tolerances are carried in the witnesses.
struct TheoremReport {
  std::string theorem_id;
  std::string grids;
  double max_violation = -std::numeric_limits<double>::infinity();
  double tolerance = 0.0;
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::vector<Witness> witnesses;
  bool passed = true;
};

/// Accumulates checks into a TheoremReport.
class ReportBuilder {
 public:
  static constexpr std::size_t kMaxWitnesses = 25;

  ReportBuilder(std::string theorem_id, std::string grids) {
    report_.theorem_id = std::move(theorem_id);
    report_.grids = std::move(grids);
  }

  /// lhs < rhs.
  bool strict_less(double lhs, double rhs, const std::string& check,
                   std::map<std::string, double> ctx = {}) {
    const bool ok = lhs < rhs;
    ctx["lhs"] = lhs;
    ctx["rhs"] = rhs;
    double v = lhs - rhs;
    if (!ok && !(v > 0.0)) v = std::isnan(v) ? v : std::numeric_limits<double>::denorm_min();
    record(v, ok, check, std::move(ctx));
    return ok;
  }

  /// error <= tol.
  bool within(double error, double tol, const std::string& check,
              std::map<std::string, double> ctx = {}) {
    const bool ok = error <= tol;
    ctx["error"] = error;
    ctx["tolerance"] = tol;
    record(error - tol, ok, check, std::move(ctx));
    return ok;
  }

  /// A boolean certificate; violation is 1 on failure, 0 otherwise.
  bool require(bool ok, const std::string& check, std::map<std::string, double> ctx = {}) {
    record(ok ? 0.0 : 1.0, ok, check, std::move(ctx));
    return ok;
  }

  void merge(const TheoremReport& other) {
    report_.checks += other.checks;
    report_.failures += other.failures;
    report_.max_violation = std::max(report_.max_violation, other.max_violation);
    for (const auto& w : other.witnesses) {
      if (report_.witnesses.size() < kMaxWitnesses) report_.witnesses.push_back(w);
    }
  }

  [[nodiscard]] TheoremReport finish() const {
    TheoremReport r = report_;
    r.passed = r.failures == 0;
    return r;
  }

 private:
  void record(double violation, bool ok, const std::string& check,
              std::map<std::string, double> ctx) {
    ++report_.checks;
    if (!std::isnan(violation)) {
      report_.max_violation = std::max(report_.max_violation, violation);
    } else {
      report_.max_violation = std::numeric_limits<double>::infinity();
    }
    if (!ok) {
      ++report_.failures;
      if (report_.witnesses.size() < kMaxWitnesses) {
        report_.witnesses.push_back({check, std::move(ctx)});
      }
    }
  }

  TheoremReport report_;
};

inline nlohmann::json to_json(const TheoremReport& r) {
  nlohmann::json witnesses = nlohmann::json::array();
  for (const auto& w : r.witnesses) {
    nlohmann::json values = nlohmann::json::object();
    for (const auto& [key, v] : w.values) values[key] = v;
    witnesses.push_back({{"check", w.check}, {"values", values}});
  }
  return {{"theorem_id", r.theorem_id},
          {"passed", r.passed},
          {"max_violation", r.max_violation},
          {"tolerance", r.tolerance},
          {"checks", r.checks},
          {"failures", r.failures},
          {"grids", r.grids},
          {"witnesses", witnesses}};
}

}  // namespace accel
