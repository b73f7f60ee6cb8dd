#include "doctest.h"

#include <cmath>

#include "gsmp/delay.hpp"
#include "gsmp/rng.hpp"
#include "support/stats.hpp"

using namespace gsmp;

TEST_CASE("mean delay") {
  CHECK(mean_delay(DelayLaw::make_uniform(0, 1)) == doctest::Approx(0.5));
  CHECK(mean_delay(DelayLaw::make_shifted_exponential(2, 1.0)) == doctest::Approx(3.0));
  CHECK(mean_delay(DelayLaw::make_fixed(90)) == doctest::Approx(90.0));
}

TEST_CASE("delay law invariants") {
  CHECK(DelayLaw::make_uniform(0, 1).check().empty());
  CHECK(DelayLaw::make_fixed(1).check().empty());
  CHECK(DelayLaw::make_shifted_exponential(0, 2.0).check().empty());
  CHECK(!DelayLaw::make_uniform(2, 2).check().empty());
  CHECK(!DelayLaw::make_uniform(-1, 2).check().empty());
  CHECK(!DelayLaw::make_shifted_exponential(0, 0.0).check().empty());
  CHECK(!DelayLaw::make_fixed(0).check().empty());
}

TEST_CASE("residual density of a partially elapsed uniform") {
  DelayLaw u01 = DelayLaw::make_uniform(0, 1);
  for (double t : {0.0, 0.1, 0.5, 0.79}) CHECK(residual_density(u01, 0.2, t) == doctest::Approx(1.25));
  CHECK(residual_density(u01, 0.2, 0.9) == 0.0);
  CHECK(residual_density(u01, 0.2, 0.8) == 0.0);
}

TEST_CASE("exponential residual is memoryless") {
  double lambda = 0.7;
  DelayLaw law = DelayLaw::make_shifted_exponential(0, lambda);
  for (double elapsed : {0.0, 0.4, 3.7})
    for (double t : {0.0, 0.5, 2.0})
      CHECK(residual_density(law, elapsed, t) ==
            doctest::Approx(lambda * std::exp(-lambda * t)).epsilon(1e-12));
}

TEST_CASE("residual survival closed forms") {
  DelayLaw u01 = DelayLaw::make_uniform(0, 1);
  // (0.8 - 0.3) / 0.8, cross-checked against quadrature of the density below
  CHECK(residual_survival(u01, 0.2, 0.3) == doctest::Approx(0.625));
  CHECK(residual_survival(u01, 0.2, 0.0) == 1.0);
  CHECK(residual_survival(u01, 0.2, 0.8) == 0.0);
  CHECK(residual_survival(u01, 0.2, 2.0) == 0.0);
  CHECK(residual_survival(DelayLaw::make_shifted_exponential(1, 2.0), 0.0, 0.5) == 1.0);
}

TEST_CASE("residual density integrates to one and matches survival") {
  std::vector<std::pair<DelayLaw, double>> cases = {
      {DelayLaw::make_uniform(0, 1), 0.2},
      {DelayLaw::make_uniform(0, 1), 0.0},
      {DelayLaw::make_uniform(2, 3), 0.7},
      {DelayLaw::make_uniform(2, 3), 2.4},
      {DelayLaw::make_uniform(1, 3), 1.9},
      {DelayLaw::make_shifted_exponential(0, 1.3), 0.6},
      {DelayLaw::make_shifted_exponential(2, 0.5), 0.3},
      {DelayLaw::make_shifted_exponential(2, 0.5), 5.5},
  };
  for (const auto& [law, elapsed] : cases) {
    double upper = law.is_bounded() ? static_cast<double>(*law.upper) - elapsed
                                    : std::max(static_cast<double>(law.lower) - elapsed, 0.0) +
                                          60.0 / law.rate;
    auto dens = [&](double t) { return residual_density(law, elapsed, t); };
    CHECK(testsupport::integrate(dens, 0.0, upper) == doctest::Approx(1.0).epsilon(1e-9));
    for (double t : {0.1 * upper, 0.35 * upper, 0.8 * upper}) {
      double from_density = 1.0 - testsupport::integrate(dens, 0.0, t);
      CHECK(residual_survival(law, elapsed, t) ==
            doctest::Approx(from_density).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("residual quantiles") {
  CHECK(residual_quantile(DelayLaw::make_uniform(0, 1), 0.2, 0.5) == doctest::Approx(0.4));
  double q = 0.37;
  CHECK(residual_quantile(DelayLaw::make_shifted_exponential(0, 1.0), 3.1, q) ==
        doctest::Approx(-std::log1p(-q)));
  // waiting for the support head
  CHECK(residual_quantile(DelayLaw::make_uniform(2, 3), 0.5, 0.25) == doctest::Approx(1.75));
}

TEST_CASE("residual errors") {
  DelayLaw u01 = DelayLaw::make_uniform(0, 1);
  CHECK_THROWS_WITH_AS(residual_density(u01, 1.0, 0.1),
                       doctest::Contains("event overdue"), std::domain_error);
  CHECK_THROWS_AS(residual_survival(u01, 1.5, 0.1), std::domain_error);
  CHECK_THROWS_AS(residual_density(DelayLaw::make_fixed(2), 0.0, 0.1), std::domain_error);
}

TEST_CASE("residual sampling: mean and KS against the residual law") {
  DelayLaw u01 = DelayLaw::make_uniform(0, 1);
  RngStream rng(20240811);
  const int n = 1000000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += residual_sample(u01, 0.2, rng);
  CHECK(sum / n == doctest::Approx(0.4).epsilon(0.005));

  for (const auto& [law, elapsed] :
       std::vector<std::pair<DelayLaw, double>>{{u01, 0.2},
                                                {DelayLaw::make_uniform(2, 3), 1.2},
                                                {DelayLaw::make_shifted_exponential(1, 0.8), 0.4}}) {
    RngStream stream(7);
    std::vector<double> samples(100000);
    for (auto& s : samples) s = residual_sample(law, elapsed, stream);
    double d = testsupport::ks_statistic(
        samples, [&](double t) { return testsupport::residual_cdf(law, elapsed, t); });
    // 1% critical value of the Kolmogorov distribution
    CHECK(d < 1.6276 / std::sqrt(static_cast<double>(samples.size())));
  }
}
