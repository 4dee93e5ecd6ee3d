#include <doctest.h>

#include <cmath>
#include <map>

#include "steinmc/enumeration.hpp"
#include "steinmc/resample.hpp"

using namespace steinmc;

namespace {

SampleBatch scalar_batch(std::vector<double> x, std::vector<double> xp,
                         std::vector<double> xt) {
  const std::size_t n = x.size();
  SampleBatch batch{CoordMatrix(n, 1), CoordMatrix(n, 1), CoordMatrix(n, 1)};
  for (std::size_t i = 0; i < n; ++i) {
    batch.x.mutable_row(i)[0] = x[i];
    batch.x_prime.mutable_row(i)[0] = xp[i];
    batch.x_tilde.mutable_row(i)[0] = xt[i];
  }
  return batch;
}

}  // namespace

TEST_CASE("resample_subset substitutes without mutating") {
  SampleBatch batch =
      scalar_batch({1.0, 2.0, 3.0}, {7.0, 8.0, 9.0}, {0.0, 0.0, 0.0});

  SUBCASE("empty subset is the identity") {
    RecombinedVector view = resample_subset(batch, {});
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(view.row(i)[0] == batch.x.row(i)[0]);
  }
  SUBCASE("full substitution") {
    RecombinedVector view = resample_subset(batch, {0, 1, 2});
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(view.row(i)[0] == batch.x_prime.row(i)[0]);
  }
  SUBCASE("single substitution") {
    RecombinedVector view = resample_subset(batch, {1});
    CHECK(view.row(0)[0] == 1.0);
    CHECK(view.row(1)[0] == 8.0);
    CHECK(view.row(2)[0] == 3.0);
    CHECK(batch.x.row(1)[0] == 2.0);
  }
  SUBCASE("out of range index refuses") {
    CHECK_THROWS_AS(resample_subset(batch, {5}), std::out_of_range);
  }
}

TEST_CASE("delta_j on simple statistics") {
  SUBCASE("linear statistic") {
    SampleBatch batch = scalar_batch({1.0, 2.0}, {3.0, 4.0}, {0.0, 0.0});
    const Functional f = make_linear_statistic(2, 1);
    const Eigen::VectorXd d0 = delta_j(f, batch, 0);
    CHECK(d0[0] == doctest::Approx(-2.0 / std::sqrt(2.0)));
  }
  SUBCASE("constant functional") {
    SampleBatch batch = scalar_batch({1.0, 2.0}, {3.0, 4.0}, {0.0, 0.0});
    const Functional f = make_constant_functional(3, 5.0);
    CHECK(delta_j(f, batch, 0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(delta_j(f, batch, 1).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("max statistic") {
    // max(1,5) - max(1, X'_2) for the two orientations of X'.
    SampleBatch batch = scalar_batch({1.0, 5.0}, {0.0, 2.0}, {0.0, 0.0});
    const Functional f = make_max_statistic();
    CHECK(delta_j(f, batch, 1)[0] == doctest::Approx(3.0));
    SampleBatch flipped = scalar_batch({1.0, 5.0}, {2.0, 0.0}, {0.0, 0.0});
    CHECK(delta_j(f, flipped, 1)[0] == doctest::Approx(4.0));
  }
}

TEST_CASE("second-order operator") {
  SUBCASE("linear statistic vanishes off the diagonal, exactly") {
    RngStream rng(42, 1);
    const std::size_t n = 5;
    const Functional f = make_linear_statistic(n, 1);
    SampleBatch batch = sample_batch(
        n, 1, [](RngStream& r, std::span<double> row) { row[0] = r.normal(); },
        rng);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const Eigen::VectorXd v = tilde_delta_i_delta_j(f, batch, i, j);
        if (i != j) {
          CHECK(v[0] == 0.0);  // exact zero, not approximately
        } else {
          const double expected = (batch.x.row(j)[0] -
                                   batch.x_tilde.row(j)[0]) /
                                  std::sqrt(double(n));
          CHECK(v[0] == doctest::Approx(expected).epsilon(1e-15));
        }
      }
  }
  SUBCASE("product statistic four-term value") {
    // f(x) = x1 x2, substitutions X'=( .,5), X~=(7, .): the alternating
    // sum is (6-10) - (21-35) = 10.
    SampleBatch batch = scalar_batch({2.0, 3.0}, {9.0, 5.0}, {7.0, 9.0});
    const Functional f = make_product_statistic();
    const Eigen::VectorXd v = tilde_delta_i_delta_j(f, batch, 0, 1);
    CHECK(v[0] == doctest::Approx(10.0));
  }
  SUBCASE("operator vanishes on views that hide the base slot") {
    SampleBatch batch = scalar_batch({2.0, 3.0}, {9.0, 5.0}, {7.0, 9.0});
    const Functional f = make_product_statistic();
    RecombinedVector xa = resample_subset(batch, {0});
    CHECK(tilde_delta_i_delta_j_view(f, xa, 0, 1).cwiseAbs().maxCoeff() ==
          0.0);
  }
}

TEST_CASE("weighted subset sampler") {
  SUBCASE("n=2 outcome probabilities are uniform") {
    RngStream rng(7, 0);
    std::map<std::pair<std::size_t, std::size_t>, int> counts;
    const int reps = 40000;
    for (int rep = 0; rep < reps; ++rep) {
      const SubsetDraw draw = sample_weighted_subset(2, rng);
      std::size_t a_code = 0;
      for (std::size_t v : draw.a_set) a_code |= (1u << v);
      counts[{a_code, draw.j}]++;
      CHECK(draw.weight == doctest::Approx(0.5));
    }
    CHECK(counts.size() == 4);
    for (const auto& [key, count] : counts) {
      CHECK(std::abs(count / double(reps) - 0.25) < 0.01);
    }
  }
  SUBCASE("chi-square over |A| strata at n=4") {
    // P(|A| = a, j fixed stratum) = k_{n,a} C(n,a)(n-a) / n = 1/n per a.
    RngStream rng(8, 0);
    const int reps = 100000;
    std::array<int, 4> strata{};
    for (int rep = 0; rep < reps; ++rep)
      strata[sample_weighted_subset(4, rng).a_set.size()]++;
    double chi_sq = 0.0;
    for (int a = 0; a < 4; ++a) {
      const double expected = reps / 4.0;
      chi_sq += (strata[a] - expected) * (strata[a] - expected) / expected;
    }
    CHECK(chi_sq < 16.27);  // chi2(3) at 0.001
  }
}

TEST_CASE("t_matrix") {
  SUBCASE("n=1 exact value") {
    SampleBatch batch = scalar_batch({2.0}, {5.0}, {0.0});
    const Functional f = make_linear_statistic(1, 1, 1.0);
    RngStream rng(1, 1);
    const TMatrix t = t_matrix(f, batch, TMatrixMode::exact, rng);
    CHECK(t.t(0, 0) == doctest::Approx((2.0 - 5.0) * (2.0 - 5.0) / 2.0));
    CHECK(t.n_terms == 1);
  }
  SUBCASE("enumeration cap refuses by name") {
    RngStream rng(1, 1);
    SampleBatch batch = sample_batch(
        14, 1, [](RngStream& r, std::span<double> row) { row[0] = r.uniform(); },
        rng);
    const Functional f = make_linear_statistic(14, 1);
    CHECK_THROWS_WITH_AS(t_matrix(f, batch, TMatrixMode::exact, rng),
                         doctest::Contains("n <= 12"), EnumerationCapError);
  }
  SUBCASE("monte carlo agrees with exact for the linear statistic") {
    RngStream rng(33, 2);
    SampleBatch batch = sample_batch(
        2, 1, [](RngStream& r, std::span<double> row) { row[0] = r.normal(); },
        rng);
    const Functional f = make_linear_statistic(2, 1);
    const TMatrix exact = t_matrix(f, batch, TMatrixMode::exact, rng);
    TMatrixOptions opts;
    opts.reps = 100000;
    const TMatrix mc = t_matrix(f, batch, TMatrixMode::monte_carlo, rng, opts);
    // For the linear statistic Delta_j f(X^A) = Delta_j f(X) so every draw
    // contributes one of finitely many values; 3 sigma agreement.
    CHECK(std::abs(mc.t(0, 0) - exact.t(0, 0)) <
          3.0 * std::abs(exact.t(0, 0)) / std::sqrt(1000.0));
  }
}

TEST_CASE("Bernoulli n=1 expected T reproduces the coordinate variance") {
  const FiniteLaw law = FiniteLaw::bernoulli();
  const Functional f = make_linear_statistic(1, 1, 1.0);
  const Eigen::MatrixXd expected_t = exact_expected_t(f, law, 1);
  CHECK(expected_t(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("purity: repeated evaluation is bit-identical") {
  RngStream rng(11, 3);
  SampleBatch batch = sample_batch(
      6, 1, [](RngStream& r, std::span<double> row) { row[0] = r.normal(); },
      rng);
  const Functional f = make_linear_statistic(6, 1);
  const Eigen::VectorXd first = delta_j(f, batch, 2);
  const Eigen::VectorXd second = delta_j(f, batch, 2);
  CHECK(first[0] == second[0]);
  RngStream rng_a(5, 5), rng_b(5, 5);
  const TMatrix ta = t_matrix(f, batch, TMatrixMode::exact, rng_a);
  const TMatrix tb = t_matrix(f, batch, TMatrixMode::exact, rng_b);
  CHECK(ta.t(0, 0) == tb.t(0, 0));
}
