#include "gsmp/delay.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gsmp {

const char* delay_kind_name(DelayKind kind) {
  switch (kind) {
    case DelayKind::fixed: return "fixed";
    case DelayKind::uniform: return "uniform";
    case DelayKind::shifted_exponential: return "shifted-exponential";
  }
  return "?";
}

std::vector<std::string> DelayLaw::check() const {
  std::vector<std::string> issues;
  switch (kind) {
    case DelayKind::fixed:
      if (lower < 1) issues.push_back("fixed delay must be a positive integer");
      if (!upper || *upper != lower) issues.push_back("fixed delay requires lower = upper");
      break;
    case DelayKind::uniform:
      if (lower < 0) issues.push_back("uniform lower bound must be non-negative");
      if (!upper) issues.push_back("uniform delay requires a finite upper bound");
      else if (!(lower < *upper)) issues.push_back("uniform delay requires lower < upper");
      break;
    case DelayKind::shifted_exponential:
      if (lower < 0) issues.push_back("shift must be non-negative");
      if (upper) issues.push_back("shifted-exponential delay must be unbounded");
      if (!(rate > 0.0)) issues.push_back("shifted-exponential delay requires rate > 0");
      break;
  }
  return issues;
}

double mean_delay(const DelayLaw& law) {
  switch (law.kind) {
    case DelayKind::fixed: return static_cast<double>(law.lower);
    case DelayKind::uniform:
      return 0.5 * (static_cast<double>(law.lower) + static_cast<double>(*law.upper));
    case DelayKind::shifted_exponential:
      return static_cast<double>(law.lower) + 1.0 / law.rate;
  }
  return 0.0;
}

namespace {

void require_variable(const DelayLaw& law, double elapsed) {
  if (law.is_fixed()) throw std::domain_error("residual of a fixed-delay law");
  if (elapsed < 0.0) throw std::domain_error("negative elapsed time");
  if (law.upper && elapsed >= static_cast<double>(*law.upper))
    throw std::domain_error("event overdue: elapsed time outside delay support");
}

}  // namespace

double residual_density(const DelayLaw& law, double elapsed, double t) {
  require_variable(law, elapsed);
  if (t < 0.0) return 0.0;
  double lo = static_cast<double>(law.lower);
  double x = elapsed + t;
  if (law.kind == DelayKind::uniform) {
    double hi = static_cast<double>(*law.upper);
    if (x < lo || x >= hi) return 0.0;
    double norm = hi - std::max(elapsed, lo);  // mass not yet spent, times (hi-lo)
    return 1.0 / norm;
  }
  double shift = std::max(elapsed, lo);
  if (x < lo) return 0.0;
  return law.rate * std::exp(-law.rate * (x - shift));
}

double residual_survival(const DelayLaw& law, double elapsed, double t) {
  require_variable(law, elapsed);
  if (t <= 0.0) return 1.0;
  double lo = static_cast<double>(law.lower);
  double x = elapsed + t;
  if (x <= lo) return 1.0;
  if (law.kind == DelayKind::uniform) {
    double hi = static_cast<double>(*law.upper);
    if (x >= hi) return 0.0;
    return (hi - x) / (hi - std::max(elapsed, lo));
  }
  return std::exp(-law.rate * (x - std::max(elapsed, lo)));
}

double residual_quantile(const DelayLaw& law, double elapsed, double q) {
  require_variable(law, elapsed);
  if (q < 0.0 || q >= 1.0) throw std::domain_error("quantile level outside [0, 1)");
  // Map q = 0 to the smallest positive level so sampled dwells stay > 0 and
  // bounded residuals stay strictly inside their support.
  q = std::max(q, 0x1.0p-53);
  double lo = static_cast<double>(law.lower);
  double head = std::max(lo - elapsed, 0.0);  // waiting time until the support starts
  if (law.kind == DelayKind::uniform) {
    double hi = static_cast<double>(*law.upper);
    double width = hi - std::max(elapsed, lo);
    return head + q * width;
  }
  return head - std::log1p(-q) / law.rate;
}

double residual_sample(const DelayLaw& law, double elapsed, RngStream& rng) {
  return residual_quantile(law, elapsed, rng.next_unit());
}

}  // namespace gsmp
