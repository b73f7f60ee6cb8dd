#pragma once

// Test-side numerical oracles, kept independent of the library's own
// integration and sampling paths.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "gsmp/configuration.hpp"
#include "gsmp/model.hpp"

namespace testsupport {

// adaptive Simpson quadrature
inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fb, double fm, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, fm, flm, left, tol / 2.0, depth - 1) +
         simpson_rec(f, m, b, fm, fb, frm, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
  if (!(b > a)) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fb = f(b), fm = f(m);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fb, fm, whole, tol, 48);
}

// two-sided Kolmogorov-Smirnov statistic of samples against a CDF
inline double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double F = cdf(samples[i]);
    d = std::max(d, std::abs(F - static_cast<double>(i + 1) / n));
    d = std::max(d, std::abs(F - static_cast<double>(i) / n));
  }
  return d;
}

// chi-square goodness-of-fit p-value for observed counts against expected
// probabilities (counts and probs aligned)
inline double chi_square_p(const std::vector<std::uint64_t>& counts,
                           const std::vector<double>& probs) {
  if (counts.size() != probs.size()) throw std::invalid_argument("chi_square_p: size mismatch");
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  double stat = 0.0;
  int dof = -1;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    double expected = probs[i] * total;
    if (expected < 1e-9) continue;
    double diff = static_cast<double>(counts[i]) - expected;
    stat += diff * diff / expected;
    ++dof;
  }
  if (dof <= 0) return 1.0;
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

// closed-form residual CDF (independent of the library formulas)
inline double residual_cdf(const gsmp::DelayLaw& law, double elapsed, double t) {
  double lo = static_cast<double>(law.lower);
  double a = std::max(lo - elapsed, 0.0);
  if (t <= a) return 0.0;
  if (law.kind == gsmp::DelayKind::uniform) {
    double hi = static_cast<double>(*law.upper);
    double b = hi - elapsed;
    if (t >= b) return 1.0;
    return (t - a) / (b - a);
  }
  return 1.0 - std::exp(-law.rate * (t - a));
}

// analytic winner-set probabilities of the one-step competition from a
// frozen configuration, by direct integration of the timing densities
inline std::map<gsmp::EventMask, double> winner_probabilities(const gsmp::GsmpModel& model,
                                                              const gsmp::Configuration& cfg) {
  using gsmp::EventMask;
  struct Var {
    std::uint32_t id;
    gsmp::DelayLaw law;
    double elapsed;
  };
  std::vector<Var> vars;
  double deadline = std::numeric_limits<double>::infinity();
  EventMask fixed_set = 0;
  for (std::uint32_t e : model.scheduled_events(cfg.state)) {
    const gsmp::DelayLaw& law = model.event(e).law;
    if (law.is_fixed()) {
      double rem = static_cast<double>(*law.upper) - cfg.elapsed[e];
      if (rem < deadline) {
        deadline = rem;
        fixed_set = EventMask(1) << e;
      } else if (rem == deadline) {
        fixed_set |= EventMask(1) << e;
      }
    } else {
      vars.push_back({e, law, cfg.elapsed[e]});
    }
  }

  auto density = [](const Var& v, double t) {
    double lo = static_cast<double>(v.law.lower);
    double a = std::max(lo - v.elapsed, 0.0);
    if (t < a) return 0.0;
    if (v.law.kind == gsmp::DelayKind::uniform) {
      double b = static_cast<double>(*v.law.upper) - v.elapsed;
      if (t >= b) return 0.0;
      return 1.0 / (b - a);
    }
    return v.law.rate * std::exp(-v.law.rate * (t - a));
  };
  auto survival = [&](const Var& v, double t) { return 1.0 - residual_cdf(v.law, v.elapsed, t); };

  double bound = deadline;
  for (const auto& v : vars)
    if (v.law.is_bounded())
      bound = std::min(bound, static_cast<double>(*v.law.upper) - v.elapsed);

  std::map<EventMask, double> result;
  for (const auto& v : vars) {
    auto integrand = [&](double t) {
      double p = density(v, t);
      for (const auto& o : vars)
        if (o.id != v.id) p *= survival(o, t);
      return p;
    };
    double upper = bound;
    if (upper == std::numeric_limits<double>::infinity()) {
      // all remaining laws have exponential tails; cut where the product mass
      // is negligible
      upper = 0.0;
      for (const auto& o : vars)
        upper = std::max(upper, std::max(static_cast<double>(o.law.lower) - o.elapsed, 0.0));
      double lambda = 0.0;
      for (const auto& o : vars) lambda += o.law.rate;
      upper += 60.0 / lambda;
    }
    // split at the support breakpoints of every factor
    std::vector<double> cuts{0.0, upper};
    for (const auto& o : vars) {
      double head = std::max(static_cast<double>(o.law.lower) - o.elapsed, 0.0);
      if (head > 0.0 && head < upper) cuts.push_back(head);
      if (o.law.is_bounded()) {
        double b = static_cast<double>(*o.law.upper) - o.elapsed;
        if (b > 0.0 && b < upper) cuts.push_back(b);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double p = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      p += integrate(integrand, cuts[i], cuts[i + 1]);
    if (p > 1e-15) result[EventMask(1) << v.id] += p;
  }
  if (fixed_set != 0) {
    double p = 1.0;
    for (const auto& v : vars) p *= survival(v, deadline);
    if (p > 1e-15) result[fixed_set] += p;
  }
  return result;
}

}  // namespace testsupport
