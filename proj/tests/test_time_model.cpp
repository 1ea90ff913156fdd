#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "isgd/time_model.hpp"
#include "oracles.hpp"

using namespace isgd;

namespace {

// Residual of the governing equation at time t; its root is the predicted
// training time.
double residual(double t, double psi, double n_b, const SystemModel& sys) {
  const double a = std::sqrt((n_b + sys.throughput * sys.sync_cost) /
                             (n_b * sys.throughput));
  const double b = n_b / sys.throughput + sys.sync_cost;
  return psi * t - std::sqrt(t) * a - b;
}

}  // namespace

TEST_CASE("iteration time follows n_b/C1 + C2") {
  CHECK(iter_time(1000.0, {1000.0, 0.0}) == doctest::Approx(1.0));
  CHECK(iter_time(500.0, {1000.0, 0.5}) == doctest::Approx(1.0));
  // sync cost dominates as the batch shrinks
  CHECK(iter_time(1e-9, {1000.0, 0.25}) == doctest::Approx(0.25));
  CHECK_THROWS_AS(iter_time(0.0, {1000.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(iter_time(10.0, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("loss after a time budget: T=1, n_b=1 gives loss 2") {
  const SystemModel sys{1.0, 0.0};
  const LossPrediction p = loss_after_time(1.0, 1.0, sys);
  CHECK(p.updates == doctest::Approx(1.0));
  CHECK(p.loss == doctest::Approx(2.0));
  CHECK(p.valid);
}

TEST_CASE("predicted loss decreases with more time") {
  const SystemModel sys{500.0, 0.2};
  double prev = loss_after_time(10.0, 100.0, sys).loss;
  for (double t : {20.0, 40.0, 80.0, 160.0, 320.0}) {
    const double cur = loss_after_time(t, 100.0, sys).loss;
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("loss_after_time composes the update count and the bound") {
  const SystemModel sys{1000.0, 0.1};
  const double t = 100.0, n_b = 100.0;
  const LossPrediction p = loss_after_time(t, n_b, sys);
  // independent two-step evaluation
  const double updates = t / (n_b / 1000.0 + 0.1);
  CHECK(p.updates == doctest::Approx(updates).epsilon(1e-12));
  CHECK(p.loss ==
        doctest::Approx(1.0 / std::sqrt(n_b * updates) + 1.0 / updates)
            .epsilon(1e-12));
}

TEST_CASE("sub-single-update budgets are flagged as outside the model") {
  const SystemModel sys{10.0, 1.0};
  const LossPrediction p = loss_after_time(0.5, 10.0, sys);  // t_iter = 2
  CHECK_FALSE(p.valid);
}

TEST_CASE("worked closed form: psi=1, n_b=1, C1=1, C2=0 gives ~2.618034") {
  const double t = time_for_loss(1.0, 1.0, {1.0, 0.0});
  CHECK(t == doctest::Approx(2.618034).epsilon(5e-7));
  // golden-ratio structure of the root: sqrt(t) = (1+sqrt 5)/2
  CHECK(std::sqrt(t) == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0));
}

TEST_CASE("closed form agrees with a bisection oracle on a random grid") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> psi_d(0.05, 3.0), nb_d(1.0, 3000.0),
      c1_d(10.0, 5000.0), c2_d(0.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double psi = psi_d(rng), n_b = nb_d(rng);
    const SystemModel sys{c1_d(rng), c2_d(rng)};
    const double t = time_for_loss(psi, n_b, sys);

    CHECK(std::abs(residual(t, psi, n_b, sys)) / (psi * t) < 1e-9);

    const double by_bisect = oracle::bisect(
        [&](double x) { return residual(x, psi, n_b, sys); }, 1e-12,
        std::max(4.0 * t, 1.0));
    CHECK(std::abs(t - by_bisect) / t < 1e-9);
  }
}

TEST_CASE("infinite throughput drives the predicted time to zero") {
  const double psi = 0.5, n_b = 64.0;
  double prev = time_for_loss(psi, n_b, {1e2, 0.0});
  for (double c1 : {1e4, 1e6, 1e8, 1e10}) {
    const double cur = time_for_loss(psi, n_b, {c1, 0.0});
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("time to loss never shrinks for a stricter target") {
  const SystemModel sys{800.0, 0.3};
  double prev = time_for_loss(2.0, 256.0, sys);
  for (double psi : {1.0, 0.5, 0.25, 0.125}) {
    const double cur = time_for_loss(psi, 256.0, sys);
    CHECK(cur >= prev);
    prev = cur;
  }
}

TEST_CASE("optimal batch search: definition, ties, and edge behavior") {
  const SystemModel sys{1000.0, 0.5};
  const BatchSearchResult best = optimal_batch(0.1, sys, 1, 3000);

  // exhaustive by construction: nothing in range beats it, and earlier
  // ties would have won
  for (long n_b = 1; n_b <= 3000; ++n_b) {
    const double t = time_for_loss(0.1, static_cast<double>(n_b), sys);
    if (n_b < best.batch) {
      CHECK(t > best.seconds);
    } else {
      CHECK(t >= best.seconds);
    }
  }
  const BatchSearchResult again = optimal_batch(0.1, sys, 1, 3000);
  CHECK(best.batch == again.batch);

  CHECK_THROWS_AS(optimal_batch(0.1, sys, 5, 4), std::invalid_argument);
  CHECK_THROWS_AS(optimal_batch(0.1, sys, 0, 4), std::invalid_argument);
}

TEST_CASE("with no sync cost the smallest batch wins") {
  const SystemModel sys{700.0, 0.0};
  // time_for_loss must be nondecreasing in n_b when C2 = 0
  double prev = time_for_loss(0.2, 1.0, sys);
  for (long n_b = 2; n_b <= 512; n_b *= 2) {
    const double cur = time_for_loss(0.2, static_cast<double>(n_b), sys);
    CHECK(cur >= prev);
    prev = cur;
  }
  CHECK(optimal_batch(0.2, sys, 1, 512).batch == 1);
}

TEST_CASE("positive sync cost creates an interior optimum (U shape)") {
  const SystemModel sys{2000.0, 0.25};
  const BatchSearchResult best = optimal_batch(0.05, sys, 1, 3000);
  CHECK(best.batch > 1);
  CHECK(best.batch < 3000);

  // discrete differences change sign across the argmin on a log grid
  bool saw_decrease = false, saw_increase = false;
  double prev = time_for_loss(0.05, 1.0, sys);
  for (double n_b = 2.0; n_b <= 3000.0; n_b *= 1.5) {
    const double cur = time_for_loss(0.05, n_b, sys);
    if (cur < prev) {
      saw_decrease = true;
    }
    if (cur > prev && saw_decrease) {
      saw_increase = true;
    }
    prev = cur;
  }
  CHECK(saw_decrease);
  CHECK(saw_increase);
}

TEST_CASE("a faster system never prefers a smaller batch") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> c1_d(100.0, 2000.0),
      c2_d(0.05, 1.0), psi_d(0.05, 0.5);
  for (int trial = 0; trial < 10; ++trial) {
    const double psi = psi_d(rng), c2 = c2_d(rng), c1 = c1_d(rng);
    const BatchSearchResult slow = optimal_batch(psi, {c1, c2}, 1, 3000);
    const BatchSearchResult fast = optimal_batch(psi, {2.0 * c1, c2}, 1, 3000);
    CHECK(fast.batch >= slow.batch);
  }
}
