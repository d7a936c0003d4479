#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <vector>

#include "hbe/model.hpp"
#include "hbe/rng.hpp"
#include "hbe/types.hpp"

#if HBE_HAVE_EIGEN
#include <Eigen/Dense>
#endif

using namespace hbe;

namespace {

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;
};

template <typename Draw>
MeanVar sample_stats(std::size_t count, Draw&& draw) {
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double v = draw();
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / static_cast<double>(count);
  return {mean, sumsq / static_cast<double>(count) - mean * mean};
}

constexpr std::size_t kDraws = 200000;
const double kRoot = std::sqrt(static_cast<double>(kDraws));

} // namespace

TEST_CASE("stream seeds are deterministic and index-sensitive") {
  CHECK(mix64(12345) == mix64(12345));
  CHECK(mix64(1) != mix64(2));
  CHECK(derive_stream_seed(7, 0) == derive_stream_seed(7, 0));
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_stream_seed(42, i));
  CHECK(seen.size() == 1000); // no collisions among replica streams
  CHECK(derive_stream_seed(42, 3) != derive_stream_seed(43, 3));
}

TEST_CASE("uniform draws live in (0,1) with the right mean") {
  RngStream rng(11);
  double lo = 1.0, hi = 0.0;
  const auto st = sample_stats(kDraws, [&] {
    const double u = rng.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    return u;
  });
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  // SE of the mean is (1/sqrt(12))/sqrt(N).
  CHECK(std::abs(st.mean - 0.5) < 4.0 * 0.2887 / kRoot);
  CHECK(std::abs(st.var - 1.0 / 12.0) < 4.0 * 0.1 / kRoot);
}

TEST_CASE("normal draws match N(0,1) moments") {
  RngStream rng(12);
  const auto st = sample_stats(kDraws, [&] { return rng.normal(); });
  CHECK(std::abs(st.mean) < 4.0 / kRoot);
  CHECK(std::abs(st.var - 1.0) < 4.0 * std::sqrt(2.0) / kRoot);
}

TEST_CASE("gamma draws match Gamma(shape,1) moments on both shape branches") {
  RngStream rng(13);
  for (const double shape : {2.5, 0.35}) {
    CAPTURE(shape);
    const auto st = sample_stats(kDraws, [&] { return rng.gamma(shape); });
    const double se = std::sqrt(shape) / kRoot; // Var = shape
    CHECK(std::abs(st.mean - shape) < 4.0 * se);
    // Var of the variance estimate ~ (kurtosis) * shape^2; generous band.
    CHECK(std::abs(st.var - shape) < 10.0 * se);
  }
  CHECK_THROWS_AS(rng.gamma(0.0), ParameterError);
  CHECK_THROWS_AS(rng.gamma(-1.0), ParameterError);
}

TEST_CASE("chi draws match the exact chi mean") {
  RngStream rng(14);
  // E chi_k = sqrt(2) Gamma((k+1)/2) / Gamma(k/2).
  const struct {
    double df;
    double mean;
    double var;
  } cases[] = {
      {3.0, 1.5957691216057308, 0.45352091052967447},
      {1.0, 0.7978845608028655, 0.3633802276324184},
      {0.7, 0.6179099646614186, 0.3181872755721244},
  };
  for (const auto& c : cases) {
    CAPTURE(c.df);
    const auto st = sample_stats(kDraws, [&] { return rng.chi(c.df); });
    const double se = std::sqrt(c.var) / kRoot;
    CHECK(std::abs(st.mean - c.mean) < 4.0 * se);
    CHECK(std::abs(st.var - c.var) < 12.0 * se);
  }
  CHECK_THROWS_AS(rng.chi(0.0), ParameterError);
}

TEST_CASE("coupling profile values and monotonicity") {
  CHECK(coupling_at(10, 0) == doctest::Approx(3.082207001484488).epsilon(1e-15));
  CHECK(coupling_at(10, 9) == doctest::Approx(0.7071067811865476).epsilon(1e-15));
  for (std::size_t j = 1; j < 10; ++j) CHECK(coupling_at(10, j) < coupling_at(10, j - 1));
  CHECK_THROWS_AS(coupling_at(10, 10), ParameterError);
}

TEST_CASE("sampling a realization is shaped, positive and reproducible") {
  EnsembleParams params{50, 2.0, 99};
  const TridiagonalModel m1 = sample_ensemble(params);
  const TridiagonalModel m2 = sample_ensemble(params);
  REQUIRE(m1.diag.size() == 50);
  REQUIRE(m1.off.size() == 49);
  CHECK(m1.beta == 2.0);
  CHECK(m1.diag == m2.diag); // bitwise reproducible
  CHECK(m1.off == m2.off);
  for (const double b : m1.off) CHECK(b > 0.0);

  params.seed = 100;
  const TridiagonalModel m3 = sample_ensemble(params);
  CHECK(m1.diag != m3.diag);

  params.n = 1;
  CHECK_THROWS_AS(sample_ensemble(params), ParameterError);
  params.n = 50;
  params.beta = 0.0;
  CHECK_THROWS_AS(sample_ensemble(params), ParameterError);
}

TEST_CASE("diagonal samples have variance 2 and the matrix scaling is 1/sqrt(beta)") {
  EnsembleParams params{4000, 4.0, 7};
  const TridiagonalModel m = sample_ensemble(params);
  double sum = 0.0, sumsq = 0.0;
  for (const double a : m.diag) {
    sum += a;
    sumsq += a * a;
  }
  const double mean = sum / 4000.0;
  const double var = sumsq / 4000.0 - mean * mean;
  CHECK(std::abs(mean) < 4.0 * std::sqrt(2.0 / 4000.0));
  CHECK(std::abs(var - 2.0) < 4.0 * 2.0 * std::sqrt(2.0 / 4000.0));
  CHECK(m.scaled_diag(17) == doctest::Approx(m.diag[17] / 2.0).epsilon(1e-15));
  CHECK(m.scaled_off(17) == doctest::Approx(m.off[17] / 2.0).epsilon(1e-15));
}

TEST_CASE("conjugated form pins the sub-diagonal to the coupling profile") {
  EnsembleParams params{12, 1.5, 3};
  const TridiagonalModel m = sample_ensemble(params);
  const ConjugatedModel cm = conjugate(m);
  REQUIRE(cm.n == 12);
  REQUIRE(cm.diag.size() == 12);
  REQUIRE(cm.excess.size() == 12);
  REQUIRE(cm.coupling.size() == 12);
  REQUIRE(cm.log_scale.size() == 12);
  CHECK(cm.excess.back() == 0.0);
  CHECK(cm.log_scale.front() == 0.0);
  for (std::size_t j = 0; j < 12; ++j) {
    CHECK(cm.coupling[j] == doctest::Approx(coupling_at(12, j)).epsilon(1e-15));
    CHECK(cm.diag[j] == doctest::Approx(m.scaled_diag(j)).epsilon(1e-15));
  }
}

#if HBE_HAVE_EIGEN

namespace {

Eigen::MatrixXd dense_matrix(const TridiagonalModel& m) {
  const auto n = static_cast<Eigen::Index>(m.n);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    h(i, i) = m.scaled_diag(static_cast<std::size_t>(i));
    if (i + 1 < n) {
      h(i, i + 1) = m.scaled_off(static_cast<std::size_t>(i));
      h(i + 1, i) = h(i, i + 1);
    }
  }
  return h;
}

} // namespace

TEST_CASE("similarity transform reproduces the conjugated rows exactly") {
  EnsembleParams params{6, 2.5, 21};
  const TridiagonalModel m = sample_ensemble(params);
  const ConjugatedModel cm = conjugate(m);
  const std::vector<double> d = cm.scale_diagonal();

  const Eigen::MatrixXd h = dense_matrix(m);
  Eigen::MatrixXd scale = Eigen::MatrixXd::Zero(6, 6);
  for (Eigen::Index i = 0; i < 6; ++i) scale(i, i) = d[static_cast<std::size_t>(i)];
  const Eigen::MatrixXd t = scale.inverse() * h * scale;

  for (Eigen::Index l = 0; l < 6; ++l) {
    const auto lu = static_cast<std::size_t>(l);
    CHECK(t(l, l) == doctest::Approx(cm.diag[lu]).epsilon(1e-12));
    if (l > 0) CHECK(t(l, l - 1) == doctest::Approx(cm.coupling[lu]).epsilon(1e-12));
    if (l + 1 < 6) {
      CHECK(t(l, l + 1) ==
            doctest::Approx(cm.coupling[lu] + cm.excess[lu]).epsilon(1e-12));
    }
  }
}

TEST_CASE("bisection eigenvalues agree with a dense symmetric solver") {
  for (const std::uint64_t seed : {1ull, 2ull, 3ull}) {
    EnsembleParams params{12, 2.0, seed};
    const TridiagonalModel m = sample_ensemble(params);
    const std::vector<double> ours = dense_eigenvalues(m, 1e-12);
    REQUIRE(ours.size() == 12);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense_matrix(m));
    REQUIRE(solver.info() == Eigen::Success);
    for (std::size_t k = 0; k < 12; ++k) {
      CHECK(std::abs(ours[k] - solver.eigenvalues()(static_cast<Eigen::Index>(k))) <
            1e-8);
      if (k > 0) CHECK(ours[k] >= ours[k - 1]);
    }
  }
}

#endif // HBE_HAVE_EIGEN
