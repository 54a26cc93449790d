#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_helpers.hpp"
#include "tuner/gp.hpp"

#include <cmath>

using namespace tuner;
using testutil::rel_err;

namespace {

Dataset random_dataset(RngEngine& eng, int n, int dims, double y_scale = 1.0) {
  Matrix x = testutil::random_points(eng, n, dims);
  Vector y(n);
  for (int i = 0; i < n; ++i) y(i) = y_scale * (2.0 * eng.uniform01() - 1.0);
  return Dataset(std::move(x), std::move(y));
}

KernelSpec test_spec(int dims) {
  return KernelSpec::make(dims, {1, 2}, BaseKernelParams::constant(dims, 0.25, 1.0));
}

/// Eq-style dense computation with an explicit inverse; independent of the
/// factorization path in GpModel.
Prediction dense_predict(const Dataset& data, const KernelSpec& spec, double noise,
                         const Vector& x) {
  Matrix k = kernel_matrix(data.x, spec);
  k.diagonal().array() += noise;
  const Matrix k_inv = k.inverse();
  Vector k_star(data.size());
  for (Eigen::Index i = 0; i < data.size(); ++i)
    k_star(i) = additive_kernel_eval(data.x.row(i).transpose(), x, spec);
  Prediction p;
  p.mean = k_star.dot(k_inv * data.y);
  p.variance = kernel_diag(spec) - k_star.dot(k_inv * k_star);
  return p;
}

}  // namespace

TEST_CASE("single observation model") {
  Dataset data;
  data.append(Vector::Constant(2, 0.5), 3.0);
  const auto spec = test_spec(2);
  const GpModel m = GpModel::fit(data, spec, 0.0);
  CHECK(m.alpha()(0) == doctest::Approx(3.0 / kernel_diag(spec)));
  const Prediction p = m.predict(Vector::Constant(2, 0.5));
  CHECK(p.mean == doctest::Approx(3.0));
  CHECK(p.variance <= 1e-10);
}

TEST_CASE("cholesky factor reconstructs the regularized kernel matrix") {
  RngEngine eng(RngStream{41, 0});
  const Dataset data = random_dataset(eng, 20, 3);
  const auto spec = test_spec(3);
  const double noise = 1e-4;
  const GpModel m = GpModel::fit(data, spec, noise);
  CHECK(m.jitter() == 0.0);
  Matrix expected = kernel_matrix(data.x, spec);
  expected.diagonal().array() += noise;
  const Matrix rebuilt = m.chol_lower() * m.chol_lower().transpose();
  CHECK((rebuilt - expected).norm() / expected.norm() <= 1e-8);
}

TEST_CASE("duplicated training point exercises jitter escalation") {
  Dataset data;
  data.append(Vector::Constant(2, 0.3), 1.0);
  data.append(Vector::Constant(2, 0.3), 1.0);
  const GpModel m = GpModel::fit(data, test_spec(2), 0.0);
  CHECK(m.jitter() > 0.0);
  CHECK(m.jitter() <= 1e-6);
}

TEST_CASE("posterior interpolates training targets without noise") {
  RngEngine eng(RngStream{43, 0});
  const Dataset data = random_dataset(eng, 8, 2);
  const GpModel m = GpModel::fit(data, test_spec(2), 0.0);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const Prediction p = m.predict(data.x.row(i).transpose());
    CHECK(std::abs(p.mean - data.y(i)) <= 1e-8);
    CHECK(p.variance <= 1e-8);
  }
}

TEST_CASE("far from data the prior is recovered") {
  // tiny lengthscale so any distant point decorrelates completely
  const auto base = BaseKernelParams::constant(2, 0.01, 1.3);
  const KernelSpec spec = KernelSpec::make(2, {1, 2}, base);
  Dataset data;
  data.append(Vector::Constant(2, 0.1), 5.0);
  data.append(Vector::Constant(2, 0.2), -2.0);
  const GpModel m = GpModel::fit(data, spec, 1e-6);
  const Prediction p = m.predict(Vector::Constant(2, 0.9));
  CHECK(std::abs(p.mean) <= 1e-10);
  CHECK(p.variance == doctest::Approx(kernel_diag(spec)).epsilon(1e-10));
}

TEST_CASE("predict matches the dense-inverse oracle") {
  RngEngine eng(RngStream{47, 0});
  SUBCASE("n=3 spot check") {
    const Dataset data = random_dataset(eng, 3, 2, 2.0);
    const GpModel m = GpModel::fit(data, test_spec(2), 1e-3);
    const Vector x = testutil::random_point(eng, 2);
    const Prediction got = m.predict(x);
    const Prediction want = dense_predict(data, test_spec(2), 1e-3, x);
    CHECK(rel_err(got.mean, want.mean) <= 1e-10);
    CHECK(std::abs(got.variance - want.variance) <= 1e-10 * kernel_diag(test_spec(2)));
  }
  SUBCASE("n up to 20") {
    for (int n = 2; n <= 20; n += 3) {
      const Dataset data = random_dataset(eng, n, 3, 3.0);
      const GpModel m = GpModel::fit(data, test_spec(3), 1e-4);
      for (int rep = 0; rep < 5; ++rep) {
        const Vector x = testutil::random_point(eng, 3);
        const Prediction got = m.predict(x);
        const Prediction want = dense_predict(data, test_spec(3), 1e-4, x);
        CHECK(rel_err(got.mean, want.mean) <= 1e-10);
        CHECK(std::abs(got.variance - std::max(0.0, want.variance)) <= 1e-10);
      }
    }
  }
}

TEST_CASE("posterior variance never exceeds prior variance") {
  RngEngine eng(RngStream{53, 0});
  const Dataset data = random_dataset(eng, 15, 3);
  const auto spec = test_spec(3);
  const GpModel m = GpModel::fit(data, spec, 1e-4);
  const double prior_var = kernel_diag(spec);
  for (int rep = 0; rep < 100; ++rep) {
    const Prediction p = m.predict(testutil::random_point(eng, 3));
    CHECK(p.variance <= prior_var + 1e-9);
    CHECK(p.variance >= 0.0);
  }
}

TEST_CASE("adding an observation never increases posterior variance") {
  RngEngine eng(RngStream{59, 0});
  Dataset data = random_dataset(eng, 10, 2);
  const auto spec = test_spec(2);
  const GpModel before = GpModel::fit(data, spec, 1e-4);
  data.append(testutil::random_point(eng, 2), 0.7);
  const GpModel after = GpModel::fit(data, spec, 1e-4);
  for (int rep = 0; rep < 50; ++rep) {
    const Vector x = testutil::random_point(eng, 2);
    CHECK(after.predict(x).variance <= before.predict(x).variance + 1e-8);
  }
}

TEST_CASE("confidence bounds") {
  Dataset data;
  data.append(Vector::Constant(2, 0.4), 2.0);
  const GpModel m = GpModel::fit(data, test_spec(2), 1e-4);
  const Vector x = Vector::Constant(2, 0.8);

  SUBCASE("beta zero collapses to the mean") {
    const auto [lo, hi] = m.confidence_bounds(x, 0.0);
    CHECK(lo == hi);
    CHECK(lo == doctest::Approx(m.predict(x).mean));
  }
  SUBCASE("interval arithmetic") {
    const Prediction p = m.predict(x);
    const auto [lo, hi] = m.confidence_bounds(x, 2.0);
    CHECK(hi - lo == doctest::Approx(4.0 * std::sqrt(p.variance)));
  }
  SUBCASE("wider beta strictly contains narrower") {
    const auto [lo2, hi2] = m.confidence_bounds(x, 2.0);
    const auto [lo3, hi3] = m.confidence_bounds(x, 3.0);
    CHECK(lo3 < lo2);
    CHECK(hi3 > hi2);
  }
}

TEST_CASE("beta=2 variance 0.25 gives mean plus/minus one") {
  // direct arithmetic on the bound formula
  const double mean = 1.5, variance = 0.25, beta = 2.0;
  CHECK(mean - beta * std::sqrt(variance) == doctest::Approx(0.5));
  CHECK(mean + beta * std::sqrt(variance) == doctest::Approx(2.5));
}

TEST_CASE("predict_batch agrees with per-point predict across thread counts") {
  RngEngine eng(RngStream{61, 0});
  const Dataset data = random_dataset(eng, 12, 3);
  const GpModel m = GpModel::fit(data, test_spec(3), 1e-4);
  const Matrix pts = testutil::random_points(eng, 33, 3);
  const auto [mu1, var1] = m.predict_batch(pts, 1);
  const auto [mu4, var4] = m.predict_batch(pts, 4);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    const Prediction p = m.predict(pts.row(i).transpose());
    CHECK(mu1(i) == p.mean);
    CHECK(var1(i) == p.variance);
    CHECK(mu4(i) == mu1(i));
    CHECK(var4(i) == var1(i));
  }
}

TEST_CASE("fit argument errors") {
  CHECK_THROWS_AS(GpModel::fit(Dataset{}, test_spec(2), 1e-4), ArgumentError);
  Dataset data;
  data.append(Vector::Constant(2, 0.5), 1.0);
  CHECK_THROWS_AS(GpModel::fit(data, test_spec(2), -1.0), ArgumentError);
  CHECK_THROWS_AS(GpModel::fit(data, test_spec(3), 1e-4), ArgumentError);
}
