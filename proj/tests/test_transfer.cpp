#include <doctest.h>

#include <cmath>
#include <random>

#include "symdyn/errors.hpp"
#include "symdyn/oracle.hpp"
#include "symdyn/transfer.hpp"
#include "test_support.hpp"

#ifdef SYMDYN_HAVE_EIGEN
#include <Eigen/Eigenvalues>
#endif

using namespace symdyn;
using doctest::Approx;

namespace {

double spectral_radius_oracle(const DenseMatrix& w) {
#ifdef SYMDYN_HAVE_EIGEN
  Eigen::MatrixXd e(w.rows(), w.cols());
  for (std::size_t i = 0; i < w.rows(); ++i)
    for (std::size_t j = 0; j < w.cols(); ++j) e(i, j) = w(i, j);
  return e.eigenvalues().cwiseAbs().maxCoeff();
#else
  // Gelfand's formula on a high power, good enough as a fallback.
  DenseMatrix p = w;
  double log_scale = 0.0;
  for (int i = 0; i < 12; ++i) {
    p = p * p;
    double s = 0.0;
    for (std::size_t a = 0; a < p.rows(); ++a)
      for (std::size_t b = 0; b < p.cols(); ++b) s = std::max(s, p(a, b));
    for (std::size_t a = 0; a < p.rows(); ++a)
      for (std::size_t b = 0; b < p.cols(); ++b) p(a, b) /= s;
    log_scale = 2.0 * log_scale + std::log(s);
  }
  return std::exp(log_scale / 4096.0);
#endif
}

SftModel random_primitive(std::mt19937_64& rng, std::size_t max_symbols = 5) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (;;) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, max_symbols)(rng);
    std::vector<std::vector<int>> a(n, std::vector<int>(n, 0));
    for (auto& row : a)
      for (int& x : row) x = coin(rng) < 0.5 ? 1 : 0;
    SftModel m = SftModel::from_matrix(a);
    if (validate(m).ok()) return m;
  }
}

CylindricalPotential zero_potential(const SftModel& m, std::size_t order = 2) {
  return CylindricalPotential::from_function(m, order, [](std::span<const Symbol>) { return 0.0; });
}

}  // namespace

TEST_CASE("transfer matrix of the three-symbol example") {
  const auto p = testing::paper4();
  const TransferMatrix t = build_transfer(p.effective);
  const double expected[3][3] = {{0, .2, .2}, {.3, 0, .3}, {.7, .8, .5}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(t.weights(i, j) == Approx(expected[i][j]).epsilon(1e-15));
}

TEST_CASE("zero potential gives W = A") {
  const SftModel g = testing::paper4_graph();
  const TransferMatrix t = build_transfer(zero_potential(g));
  for (Symbol i = 0; i < 3; ++i)
    for (Symbol j = 0; j < 3; ++j) CHECK(t.weights(i, j) == (g.allowed(i, j) ? 1.0 : 0.0));
  const PerronData pd = perron(t);
  // A has characteristic polynomial x^3 - x^2 - 3x - 1 = (x + 1)(x^2 - 2x - 1).
  CHECK(pd.lambda == Approx(1.0 + std::sqrt(2.0)).epsilon(1e-12));
  CHECK(pressure(pd) == Approx(std::log(1.0 + std::sqrt(2.0))).epsilon(1e-12));
}

TEST_CASE("order-3 potential on the two-cycle") {
  const SftModel cyc = SftModel::from_matrix({{0, 1}, {1, 0}});
  const CylindricalPotential phi(cyc, 3, {{{0, 1, 0}, std::log(0.5)}, {{1, 0, 1}, std::log(2.0)}});
  const TransferMatrix t = build_transfer(phi);
  REQUIRE(t.state_count() == 2);
  CHECK(cyc.format_word(t.states[0]) == "12");
  CHECK(cyc.format_word(t.states[1]) == "21");
  CHECK(t.weights(0, 1) == Approx(0.5));
  CHECK(t.weights(1, 0) == Approx(2.0));
  CHECK(t.weights(0, 0) == 0.0);
  CHECK(perron(t).lambda == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("potential validation") {
  const SftModel cyc = SftModel::from_matrix({{0, 1}, {1, 0}});
  CHECK_THROWS_AS(CylindricalPotential(cyc, 1, {}), InvalidArgument);
  CHECK_THROWS_AS(CylindricalPotential(cyc, 2, {{{0, 1}, 0.0}}), InvalidArgument);
  CHECK_THROWS_AS(CylindricalPotential(cyc, 2, {{{0, 1}, 0.0}, {{1, 0}, 0.0}, {{0, 0}, 0.0}}),
                  InvalidArgument);
  CHECK_THROWS_AS(CylindricalPotential(cyc, 2, {{{0, 1}, 0.0}, {{1, 0}, NAN}}), InvalidArgument);
}

TEST_CASE("Perron data for the example matrices") {
  const auto p = testing::paper4();
  const PerronData pd = perron(build_transfer(p.effective));
  CHECK(pd.lambda == Approx(1.0).epsilon(1e-12));
  CHECK(pd.right[0] == Approx(1.0 / 6).epsilon(1e-12));
  CHECK(pd.right[1] == Approx(3.0 / 13).epsilon(1e-12));
  CHECK(pd.right[2] == Approx(47.0 / 78).epsilon(1e-12));
  CHECK(pd.left[0] == Approx(pd.left[1]).epsilon(1e-12));
  CHECK(pd.left[0] == Approx(pd.left[2]).epsilon(1e-12));

  DenseMatrix anti(2, 2);
  anti(0, 1) = 0.2;
  anti(1, 0) = 0.3;
  const PerronData pa = perron(anti);
  CHECK(pa.period == 2);
  CHECK(pa.lambda == Approx(std::sqrt(0.06)).epsilon(1e-12));
  CHECK(pa.residual <= 1e-12);

  DenseMatrix ap(2, 2);
  ap(0, 1) = 0.2;
  ap(1, 0) = 0.7;
  ap(1, 1) = 0.5;
  CHECK(perron(ap).lambda == Approx(0.7).epsilon(1e-12));

  DenseMatrix reducible(2, 2);
  reducible(0, 0) = 1.0;
  reducible(1, 1) = 1.0;
  CHECK_THROWS_AS(perron(reducible), PreconditionError);
  CHECK_THROWS_AS(perron(anti, 1e-12, 0), ConvergenceError);
}

TEST_CASE("Perron solver against an independent eigenvalue routine") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> value(0.05, 3.0);
  for (int trial = 0; trial < 80; ++trial) {
    const testing::Case c = testing::random_case(rng, 1 + trial % 3);
    const SftModel& m = trial % 2 ? c.model : restrict(c.model, c.delta);
    DenseMatrix w(m.size(), m.size());
    for (Symbol i = 0; i < m.size(); ++i)
      for (Symbol j : m.successors(i)) w(i, j) = value(rng);
    const PerronData pd = perron(w);
    CHECK(pd.lambda == Approx(spectral_radius_oracle(w)).epsilon(1e-10));
    CHECK(pd.residual <= 1e-10);
    const Vector wr = w.apply(pd.right);
    const Vector lw = w.apply_transpose(pd.left);
    for (std::size_t i = 0; i < m.size(); ++i) {
      CHECK(pd.right[i] > 0.0);
      CHECK(pd.left[i] > 0.0);
      CHECK(std::abs(wr[i] - pd.lambda * pd.right[i]) <= 1e-10 * pd.lambda);
      CHECK(std::abs(lw[i] - pd.lambda * pd.left[i]) <= 1e-10 * pd.lambda * sup_norm(pd.left));
    }
    CHECK(dot(pd.left, pd.right) == Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("pressure of restrictions") {
  const auto p = testing::paper4();
  const std::vector<Symbol> d12{0, 1};
  const CylindricalPotential sub = restrict_potential(p.effective, d12);
  CHECK(pressure(perron(build_transfer(sub))) == Approx(0.5 * std::log(0.06)).epsilon(1e-12));
  CHECK(pressure(perron(build_transfer(p.effective))) == Approx(0.0).epsilon(1e-12));
}

TEST_CASE("normalization") {
  const auto p = testing::paper4();
  CHECK(check_normalized(p.effective));
  const CylindricalPotential again = normalize(p.effective);
  for (std::size_t i = 0; i < again.values().size(); ++i)
    CHECK(std::abs(again.values()[i] - p.effective.values()[i]) <= 1e-10);

  const SftModel g = testing::paper4_graph();
  CHECK_FALSE(check_normalized(zero_potential(g)));
  const CylindricalPotential c = CylindricalPotential::from_function(
      g, 2, [](std::span<const Symbol>) { return 0.7; });
  const CylindricalPotential cn = normalize(c);
  CHECK(check_normalized(cn));
  // For a constant potential the correction is log w(x) - log w(Sx) with w the
  // left Perron vector of A, which is (1, 1, sqrt 2).
  const double s2 = std::sqrt(2.0);
  const double pa = std::log(1.0 + s2);
  const Word w13{0, 2}, w31{2, 0}, w33{2, 2};
  CHECK(cn.value(w13) == Approx(-pa - std::log(s2)).epsilon(1e-10));
  CHECK(cn.value(w31) == Approx(-pa + std::log(s2)).epsilon(1e-10));
  CHECK(cn.value(w33) == Approx(-pa).epsilon(1e-10));

  const SftModel cyc = SftModel::from_matrix({{0, 1}, {1, 0}});
  CHECK_THROWS_AS(normalize(zero_potential(cyc)), PreconditionError);
}

TEST_CASE("random normalizations are normalized, idempotent and have zero pressure") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const SftModel m = random_primitive(rng);
    const std::size_t order = trial % 3 == 0 ? 3 : 2;
    const CylindricalPotential n1 = testing::random_normalized(rng, m, order);
    CHECK(check_normalized(n1));
    CHECK(std::abs(pressure(perron(build_transfer(n1)))) <= 1e-12);
    const CylindricalPotential n2 = normalize(n1);
    for (std::size_t i = 0; i < n1.values().size(); ++i)
      CHECK(std::abs(n1.values()[i] - n2.values()[i]) <= 1e-10);
  }
}

TEST_CASE("equilibrium measure of the example") {
  const auto p = testing::paper4();
  const GibbsMeasure mu = equilibrium(p.effective);
  const double expected[3] = {1.0 / 6, 3.0 / 13, 47.0 / 78};
  double total = 0.0;
  for (Symbol i = 0; i < 3; ++i) {
    const Word w{i};
    CHECK(mu.measure(w) == Approx(expected[i]).epsilon(1e-12));
    total += mu.measure(w);
  }
  CHECK(total == Approx(1.0).epsilon(1e-14));
  const Word w121{0, 1, 0}, w11{0, 0};
  CHECK(mu.measure(w121) == Approx(0.01).epsilon(1e-12));
  CHECK(mu.measure(w11) == 0.0);
  CHECK(mu.measure(Word{}) == 1.0);
  // Underflow-free for long words.
  const Word longw(2000, 2);
  CHECK(mu.log_measure(longw) == Approx(std::log(47.0 / 78) + 1999 * std::log(0.5)).epsilon(1e-10));
}

TEST_CASE("cylinder additivity up to length 8") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 12; ++trial) {
    const SftModel m = random_primitive(rng, 4);
    const std::size_t order = trial % 2 ? 3 : 2;
    const CylindricalPotential phi = testing::random_potential(rng, m, order);
    const GibbsMeasure mu = equilibrium(phi);
    for (std::size_t len = 1; len <= 7; ++len) {
      for (const Word& w : admissible_words(m, len)) {
        double children = 0.0;
        for (Symbol s : m.successors(w.back())) {
          Word ws = w;
          ws.push_back(s);
          children += mu.measure(ws);
        }
        CHECK(std::abs(children - mu.measure(w)) <= 1e-12 * mu.measure(w));
      }
    }
  }
}

TEST_CASE("integration") {
  const auto p = testing::paper4();
  const GibbsMeasure mu = equilibrium(p.effective);
  const Vector ones(3, 1.0), h_delta{1.0, 1.0, 2.0};
  CHECK(integrate(mu, ones) == Approx(1.0).epsilon(1e-14));
  CHECK(integrate(mu, h_delta) == Approx(2.5 / 1.56).epsilon(1e-12));
  CHECK(integrate_potential(mu, p.effective) == Approx(-entropy(mu, p.effective)).epsilon(1e-12));
}

TEST_CASE("entropy") {
  const auto p = testing::paper4();
  const std::vector<Symbol> d12{0, 1};
  const CylindricalPotential sub = restrict_potential(p.effective, d12);
  CHECK(std::abs(entropy(equilibrium(sub), sub)) <= 1e-12);

  const SftModel g = testing::paper4_graph();
  const CylindricalPotential zero = zero_potential(g);
  CHECK(entropy(equilibrium(zero), zero) == Approx(std::log(1.0 + std::sqrt(2.0))).epsilon(1e-12));

  const GibbsMeasure mu = equilibrium(p.effective);
  const double h = entropy(mu, p.effective);
  CHECK(h > 0.0);
  CHECK(h == Approx(oracle::conditional_entropy(mu)).epsilon(1e-12));
}

TEST_CASE("duality and the variational identity on random models") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> value(-2.0, 2.0);
  for (int trial = 0; trial < 60; ++trial) {
    const SftModel m = random_primitive(rng);
    const std::size_t order = trial % 3 == 2 ? 3 : 2;
    const CylindricalPotential raw = testing::random_potential(rng, m, order);
    const GibbsMeasure mu_raw = equilibrium(raw);
    CHECK(std::abs(pressure(mu_raw.perron_data()) -
                   (oracle::conditional_entropy(mu_raw) + integrate_potential(mu_raw, raw))) <= 1e-10);

    const CylindricalPotential phi = normalize(raw);
    const GibbsMeasure mu = equilibrium(phi);
    const TransferMatrix t = build_transfer(phi);
    for (int k = 0; k < 5; ++k) {
      Vector psi(t.state_count());
      for (double& x : psi) x = value(rng);
      CHECK(std::abs(integrate(mu, apply_transfer(t, psi)) - integrate(mu, psi)) <= 1e-10);
    }
    // Normalizing does not change the equilibrium state.
    for (std::size_t u = 0; u < t.state_count(); ++u)
      CHECK(std::abs(mu.state_measures()[u] - mu_raw.state_measures()[u]) <= 1e-10);
  }
}
