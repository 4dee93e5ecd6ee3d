#include <doctest.h>

#include <cmath>

#include "steinmc/parallel.hpp"
#include "steinmc/rational.hpp"
#include "steinmc/rng.hpp"

using namespace steinmc;

TEST_CASE("streams are reproducible and independent of construction order") {
  RngStream a(42, 7);
  RngStream b(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  RngStream c(42, 8);
  CHECK(RngStream(42, 7).next_u64() != c.next_u64());
}

TEST_CASE("substreams do not depend on draw position") {
  RngStream parent(9, 1);
  parent.next_u64();
  RngStream child_late = parent.substream(3);
  RngStream child_fresh = RngStream(9, 1).substream(3);
  CHECK(child_late.next_u64() == child_fresh.next_u64());
}

TEST_CASE("uniform moments") {
  RngStream rng(123, 0);
  double mean = 0.0, var = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    mean += u;
    var += (u - 0.5) * (u - 0.5);
  }
  mean /= n;
  var /= n;
  CHECK(std::abs(mean - 0.5) < 0.005);
  CHECK(std::abs(var - 1.0 / 12.0) < 0.002);
}

TEST_CASE("normal moments") {
  RngStream rng(321, 0);
  double mean = 0.0, var = 0.0, fourth = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    mean += z;
    var += z * z;
    fourth += z * z * z * z;
  }
  mean /= n;
  var /= n;
  fourth /= n;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
  CHECK(std::abs(fourth - 3.0) < 0.1);
}

TEST_CASE("pairwise sum matches plain sum") {
  std::vector<double> values;
  RngStream rng(5, 5);
  for (int i = 0; i < 1000; ++i) values.push_back(rng.uniform(-1.0, 1.0));
  double plain = 0.0;
  for (double v : values) plain += v;
  CHECK(pairwise_sum(values) == doctest::Approx(plain).epsilon(1e-12));
}

TEST_CASE("exact subset weights") {
  // k_{n,A} depends on |A| only; spot values.
  CHECK(subset_weight_exact(2, 0).to_string() == "1/2");
  CHECK(subset_weight_exact(2, 1).to_string() == "1/2");
  CHECK(subset_weight_exact(4, 2) == Rational(1, 12));
  CHECK(subset_weight(64, 32) ==
        doctest::Approx(subset_weight_exact(64, 32).to_double()));
  // log-space fallback agrees where both paths exist.
  CHECK(subset_weight_log(40, 10) ==
        doctest::Approx(std::log(subset_weight_exact(40, 10).to_double()))
            .epsilon(1e-10));
}
