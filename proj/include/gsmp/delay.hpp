#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gsmp/rng.hpp"

namespace gsmp {

enum class DelayKind { fixed, uniform, shifted_exponential };

// Delay distribution of an event. Bounds are integers (fixed and uniform
// bounds, and the shift of the exponential); this keeps the region grid
// exact. The supported families all admit inverse-CDF sampling and have
// finite mean.
struct DelayLaw {
  DelayKind kind = DelayKind::fixed;
  long long lower = 0;
  std::optional<long long> upper;  // nullopt = unbounded
  double rate = 0.0;               // shifted-exponential only

  static DelayLaw make_fixed(long long value) {
    return DelayLaw{DelayKind::fixed, value, value, 0.0};
  }
  static DelayLaw make_uniform(long long lo, long long hi) {
    return DelayLaw{DelayKind::uniform, lo, hi, 0.0};
  }
  static DelayLaw make_shifted_exponential(long long lo, double rate) {
    return DelayLaw{DelayKind::shifted_exponential, lo, std::nullopt, rate};
  }

  bool is_fixed() const { return kind == DelayKind::fixed; }
  bool is_bounded() const { return upper.has_value(); }

  // Invariant violations, empty when the law is well-formed.
  std::vector<std::string> check() const;

  bool operator==(const DelayLaw&) const = default;
};

const char* delay_kind_name(DelayKind kind);

double mean_delay(const DelayLaw& law);

// Density of the remaining time given that `elapsed` has already passed
// without an occurrence. Throws std::domain_error for fixed laws and when
// elapsed >= upper ("event overdue").
double residual_density(const DelayLaw& law, double elapsed, double t);

// P(remaining > t); 1 at t = 0, non-increasing.
double residual_survival(const DelayLaw& law, double elapsed, double t);

// Inverse CDF of the remaining time at probability q in [0, 1).
double residual_quantile(const DelayLaw& law, double elapsed, double q);

// Draws the remaining time; strictly positive.
double residual_sample(const DelayLaw& law, double elapsed, RngStream& rng);

}  // namespace gsmp
