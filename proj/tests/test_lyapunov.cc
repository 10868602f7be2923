#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "fintime/lyapunov.hpp"
#include "test_helpers.hpp"

using namespace fintime;
using Catch::Approx;

namespace {
Objective identity_quadratic(Eigen::Index n) { return quadratic(SymMatrix::identity(n), Vector::Zero(n)); }
}  // namespace

TEST_CASE("gradient-norm Lyapunov functions", "[lyapunov]") {
  const Objective f = identity_quadratic(2);
  CHECK(v_grad_sq(f, Vector{{3.0, 4.0}}) == 25.0);
  CHECK(v_grad_l1(f, Vector{{3.0, -4.0}}) == 7.0);
  CHECK(lyapunov_value(f, FlowVariant::GNF2, Vector{{3.0, -4.0}}) == 7.0);
  CHECK(lyapunov_value(f, FlowVariant::GNF1, Vector{{3.0, -4.0}}) == 25.0);

  std::mt19937 rng(3);
  const Objective r = rosenbrock({2.0, 50.0});
  for (int k = 0; k < 20; ++k) {
    const Vector x = fintime::testing::random_vector(rng, 2, -3.0, 3.0);
    CHECK(v_grad_l1(r, x) >= std::sqrt(v_grad_sq(r, x)) * (1.0 - 1e-15));
  }
}

TEST_CASE("lyapunov_rate is the directional derivative", "[lyapunov]") {
  const Objective f = rosenbrock({2.0, 50.0});
  const Vector x{{0.3, -0.4}};
  const Vector v{{0.2, 0.7}};
  const double h = 1e-6;
  for (FlowVariant variant : {FlowVariant::GNF1, FlowVariant::GNF2}) {
    const double fd =
        (lyapunov_value(f, variant, x + h * v) - lyapunov_value(f, variant, x - h * v)) / (2.0 * h);
    const double rate = lyapunov_rate(f, variant, x, v);
    CHECK(rate == Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("envelope examples", "[lyapunov]") {
  CHECK(envelope({1.0, 1.0, 0.0}, 0.5) == Approx(0.5));
  CHECK(envelope({1.0, 1.0, 0.5}, 1.0) == Approx(0.25));
  CHECK(settling_time({1.0, 1.0, 0.0}) == Approx(1.0));
  CHECK(settling_time({1.0, 1.0, 0.5}) == Approx(2.0));
  CHECK(std::isinf(settling_time({1.0, 1.0, 1.0})));
  CHECK(std::isinf(settling_time({1.0, 1.0, 2.0})));

  CHECK(envelope({1.0, 1.0, 0.5}, 2.0) == 0.0);
  CHECK(envelope({1.0, 1.0, 0.5}, 50.0) == 0.0);
  CHECK(envelope({3.0, 1.0, 0.5}, 0.0) == Approx(3.0));
  CHECK_THROWS_AS(envelope({1.0, 1.0, 1.0}, 0.5), AlphaOutOfRange);

  CHECK(envelope_exp({1.0, 1.0, 1.0}, 1.0) == Approx(std::exp(-1.0)));
  CHECK(envelope_exp({1.0, 1.0, 2.0}, 1.0) == Approx(0.5));
  CHECK(envelope_exp({1.0, 1.0, 2.0}, 1e6) > 0.0);
  CHECK_THROWS_AS(envelope_exp({1.0, 1.0, 0.5}, 1.0), AlphaOutOfRange);
}

TEST_CASE("envelope is nonincreasing and settling time is monotone", "[lyapunov][property]") {
  for (double alpha : {-1.0, 0.0, 0.25, 0.5, 0.9}) {
    for (double c : {0.5, 1.0, 3.0}) {
      for (double e0 : {0.1, 1.0, 10.0}) {
        const EnvelopeParams p{e0, c, alpha};
        const double ts = settling_time(p);
        double prev = envelope(p, 0.0);
        for (int k = 1; k <= 50; ++k) {
          const double v = envelope(p, 1.2 * ts * k / 50.0);
          CHECK(v <= prev);
          prev = v;
        }
        CHECK(envelope(p, ts) == 0.0);
        CHECK(settling_time({2.0 * e0, c, alpha}) > ts);
        CHECK(settling_time({e0, 2.0 * c, alpha}) < ts);
      }
    }
  }
}

TEST_CASE("envelope_oracle examples", "[lyapunov]") {
  const auto lin = envelope_oracle({1.0, 1.0, 0.0}, 1.0, 100000);
  REQUIRE(lin.size() == 100001);
  CHECK(lin.front().t == 0.0);
  CHECK(lin.back().t == Approx(1.0));
  CHECK(lin.back().value == Approx(0.0).margin(1e-4));

  CHECK(envelope_oracle({1.0, 1.0, 0.5}, 1.0, 100000).back().value == Approx(0.25).margin(1e-4));
  CHECK(envelope_oracle({1.0, 1.0, 1.0}, 1.0, 100000).back().value == Approx(std::exp(-1.0)).margin(1e-4));
  CHECK(envelope_oracle({1.0, 1.0, 2.0}, 1.0, 100000).back().value == Approx(0.5).margin(1e-4));
}

TEST_CASE("closed forms agree with the brute-force oracle", "[lyapunov][property]") {
  for (double alpha : {-1.0, 0.0, 0.25, 0.5, 0.9, 1.0, 2.0}) {
    for (double c : {0.5, 1.0, 3.0}) {
      for (double e0 : {0.1, 1.0, 10.0}) {
        const EnvelopeParams p{e0, c, alpha};
        const double t_end = alpha < 1.0 ? 0.95 * settling_time(p) : 2.0;
        const int n = 20000;
        const auto oracle = envelope_oracle(p, t_end, n);
        for (int k = 1; k <= 20; ++k) {
          const auto& s = oracle[static_cast<std::size_t>(k * n / 20)];
          const double closed = alpha < 1.0 ? envelope(p, s.t) : envelope_exp(p, s.t);
          INFO("alpha=" << alpha << " c=" << c << " E0=" << e0 << " t=" << s.t);
          CHECK(std::abs(closed - s.value) <= 1e-4 * std::abs(closed));
        }
      }
    }
  }
}

TEST_CASE("GNF1 settling law is the envelope settling time of V = ||g||^2", "[lyapunov][property]") {
  for (double g0 : {0.01, 0.5, 3.0, 40.0}) {
    for (double c : {0.2, 1.0, 7.0}) {
      for (double p : {1.0, 1.25, 1.5, 1.9}) {
        const double eq8 = settling_from_norm(SettlingSource::Eq8Gnf1, g0, c, p);
        const double lemma = settling_time({g0 * g0, 2.0 * c, p / 2.0});
        CHECK(std::abs(eq8 - lemma) <= 1e-12 * lemma);
      }
    }
  }
}

TEST_CASE("GNF2 settling laws agree only at p = 1", "[lyapunov]") {
  const double paper1 = settling_from_norm(SettlingSource::Eq8Gnf2Paper, 3.0, 1.0, 1.0);
  const double derived1 = settling_from_norm(SettlingSource::Eq8Gnf2Derived, 3.0, 1.0, 1.0);
  CHECK(paper1 == Approx(3.0));
  CHECK(derived1 == Approx(3.0));
  // Derived form is the envelope settling time of V = ||g||_1, alpha = p - 1.
  CHECK(settling_from_norm(SettlingSource::Eq8Gnf2Derived, 3.0, 2.0, 1.5) ==
        Approx(settling_time({3.0, 2.0, 0.5})));
  CHECK(settling_from_norm(SettlingSource::Eq8Gnf2Paper, 3.0, 2.0, 1.5) ==
        Approx(std::pow(3.0, 1.5) / 3.0));
}

TEST_CASE("predicted_settling per variant", "[lyapunov]") {
  const Objective f = identity_quadratic(2);
  const auto gnf1 = predicted_settling(f, Vector{{2.0, 0.0}}, FlowConfig(FlowVariant::GNF1, 2.0, 1.0, 0.0));
  REQUIRE(gnf1.size() == 1);
  CHECK(gnf1[0].source == SettlingSource::Eq8Gnf1);
  CHECK(gnf1[0].t_star == Approx(1.0));

  const auto gnf2 = predicted_settling(f, Vector{{1.0, -2.0}}, FlowConfig(FlowVariant::GNF2, 1.0, 1.0, 0.0));
  REQUIRE(gnf2.size() == 2);
  CHECK(gnf2[0].source == SettlingSource::Eq8Gnf2Paper);
  CHECK(gnf2[1].source == SettlingSource::Eq8Gnf2Derived);
  CHECK(gnf2[0].t_star == Approx(3.0));
  CHECK(gnf2[1].t_star == Approx(3.0));

  CHECK(predicted_settling(f, Vector{{1.0, 1.0}}, FlowConfig(FlowVariant::GradientFlow)).empty());
}
