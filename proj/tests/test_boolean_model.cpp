#include <doctest.h>

#include <cmath>

#include "steinmc/boolean_model.hpp"
#include "steinmc/resample.hpp"

using namespace steinmc;

TEST_CASE("scene sampling") {
  SUBCASE("germs live in the cube of volume n") {
    const GermGrainScene scene = sample_scene(1, 4, 0.5, 7);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(scene.germs.row(i)[0] >= -2.0);
      CHECK(scene.germs.row(i)[0] <= 2.0);
    }
    const GermGrainScene plane = sample_scene(2, 9, 0.5, 7);
    for (std::size_t i = 0; i < 9; ++i) {
      CHECK(std::abs(plane.germs.row(i)[0]) <= 1.5);
      CHECK(std::abs(plane.germs.row(i)[1]) <= 1.5);
    }
  }
  SUBCASE("same seed reproduces the germs bit-exactly") {
    const GermGrainScene a = sample_scene(2, 16, 0.3, 123);
    const GermGrainScene b = sample_scene(2, 16, 0.3, 123);
    for (std::size_t i = 0; i < 16; ++i) {
      CHECK(a.germs.row(i)[0] == b.germs.row(i)[0]);
      CHECK(a.germs.row(i)[1] == b.germs.row(i)[1]);
    }
  }
  SUBCASE("unsupported dimension") {
    CHECK_THROWS_AS(sample_scene(3, 4, 0.5, 1), std::invalid_argument);
  }
}

TEST_CASE("intrinsic volumes of interval unions") {
  CoordMatrix germs(2, 1);
  germs.mutable_row(0)[0] = 0.5;
  germs.mutable_row(1)[0] = 1.25;
  SUBCASE("overlapping") {
    const Eigen::VectorXd v = intrinsic_volumes_1d(germs, 0.5);
    CHECK(v[0] == 1.0);
    CHECK(v[1] == doctest::Approx(1.75));
  }
  SUBCASE("disjoint") {
    germs.mutable_row(1)[0] = 3.0;
    const Eigen::VectorXd v = intrinsic_volumes_1d(germs, 0.5);
    CHECK(v[0] == 2.0);
    CHECK(v[1] == doctest::Approx(2.0));
  }
}

TEST_CASE("boolean functional") {
  SUBCASE("n=1, d=1: value is (2R - c)/1") {
    Eigen::VectorXd center(2);
    center << 0.5, 0.25;
    const Functional f = boolean_functional(1, 1, 0.3, center);
    CoordMatrix germ(1, 1);
    germ.mutable_row(0)[0] = 0.0;
    const Eigen::VectorXd w = f(germ);
    CHECK(w[0] == doctest::Approx(1.0 - 0.5));
    CHECK(w[1] == doctest::Approx(0.6 - 0.25));
  }
  SUBCASE("difference operators ignore the centering") {
    const std::size_t n = 6;
    RngStream rng(3, 3);
    SampleBatch batch = sample_batch(n, 1, boolean_coord_draw(1, n), rng);
    Eigen::VectorXd zero_center = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd odd_center(2);
    odd_center << 3.25, -1.5;
    const Functional f0 = boolean_functional(1, n, 0.4, zero_center);
    const Functional f1 = boolean_functional(1, n, 0.4, odd_center);
    for (std::size_t j = 0; j < n; ++j) {
      const Eigen::VectorXd d0 = delta_j(f0, batch, j);
      const Eigen::VectorXd d1 = delta_j(f1, batch, j);
      CHECK(d0[0] == doctest::Approx(d1[0]).epsilon(1e-12));
      CHECK(d0[1] == doctest::Approx(d1[1]).epsilon(1e-12));
    }
  }
}

TEST_CASE("pilot-run centering makes the functional mean vanish") {
  const int d = 1;
  const std::size_t n = 50;
  const double radius = 0.3;
  const Eigen::VectorXd center =
      pilot_center(d, n, radius, 4000, RngStream(1111, 0), 2);
  const Functional f = boolean_functional(d, n, radius, center);

  // Independent replicate block.
  RngStream rng(2222, 0);
  const std::size_t reps = 10000;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd second = Eigen::VectorXd::Zero(2);
  const CoordDraw draw = boolean_coord_draw(d, n);
  for (std::size_t rep = 0; rep < reps; ++rep) {
    RngStream stream = rng.substream(rep);
    CoordMatrix x(n, 1);
    for (std::size_t i = 0; i < n; ++i) draw(stream, x.mutable_row(i));
    const Eigen::VectorXd w = f(x);
    mean += w;
    second += w.cwiseProduct(w);
  }
  mean /= double(reps);
  second /= double(reps);
  for (int c = 0; c < 2; ++c) {
    const double se =
        std::sqrt((second[c] - mean[c] * mean[c]) / double(reps));
    // Pilot error plus replicate error: 4 combined standard errors.
    const double pilot_se = se * std::sqrt(double(reps) / 4000.0) /
                            std::sqrt(double(n));
    CHECK(std::abs(mean[c]) < 4.0 * (se + pilot_se));
  }
}

TEST_CASE("exact d=1 expectations match simulation") {
  const std::size_t n = 64;
  const double radius = 0.3;
  const Eigen::VectorXd exact = exact_mean_1d(n, radius);
  RngStream rng(777, 0);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
  const std::size_t reps = 20000;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    const GermGrainScene scene =
        sample_scene(1, n, radius, rng.next_u64());
    mean += intrinsic_volumes(scene);
  }
  mean /= double(reps);
  CHECK(std::abs(mean[0] - exact[0]) < 0.05);
  CHECK(std::abs(mean[1] - exact[1]) < 0.05);
}

TEST_CASE("exact d=1 covariance matches simulation") {
  for (std::size_t n : {8, 64}) {
    const double radius = 0.3;
    const Eigen::MatrixXd exact = exact_covariance_1d(n, radius);
    const Eigen::VectorXd center = Eigen::VectorXd::Zero(2);
    const Functional f = boolean_functional(1, n, radius, center);
    const Eigen::MatrixXd mc = empirical_covariance(
        f, n, 1, boolean_coord_draw(1, n), 400000, RngStream(515, n), 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double scale = std::sqrt(exact(i, i) * exact(j, j));
        const double se = 2.0 * scale * std::sqrt(2.0 / 400000.0);
        INFO("n=", n, " entry ", i, j, " exact=", exact(i, j),
             " mc=", mc(i, j));
        CHECK(std::abs(exact(i, j) - mc(i, j)) < 4.0 * se);
      }
  }
  // The exact covariance approaches the series limit.
  const Eigen::MatrixXd far = exact_covariance_1d(1 << 16, 0.3);
  const Eigen::MatrixXd near = exact_covariance_1d(64, 0.3);
  CHECK((far - near).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("empirical covariance structure") {
  const int d = 1;
  const std::size_t n = 100;
  const Eigen::VectorXd center = Eigen::VectorXd::Zero(2);
  const Functional f = boolean_functional(d, n, 0.3, center);
  const Eigen::MatrixXd sigma = empirical_covariance(
      f, n, 1, boolean_coord_draw(d, n), 4000, RngStream(11, 0), 2);
  CHECK(sigma(0, 0) > 0.0);
  CHECK(sigma(1, 1) > 0.0);
  CHECK(sigma(0, 1) == doctest::Approx(sigma(1, 0)));
  // Two disjoint seed blocks agree within combined error.
  const Eigen::MatrixXd sigma_b = empirical_covariance(
      f, n, 1, boolean_coord_draw(d, n), 4000, RngStream(12, 0), 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double scale = std::sqrt(sigma(i, i) * sigma(j, j));
      CHECK(std::abs(sigma(i, j) - sigma_b(i, j)) <
            4.0 * 2.0 * scale * std::sqrt(2.0 / 4000.0));
    }
}

TEST_CASE("scene serialization round trip") {
  const GermGrainScene scene = sample_scene(2, 12, 0.45, 909);
  const std::string text = scene_to_text(scene);
  const GermGrainScene parsed = scene_from_text(text);
  CHECK(parsed.d == scene.d);
  CHECK(parsed.n == scene.n);
  CHECK(parsed.radius == scene.radius);
  CHECK(parsed.seed == scene.seed);
  for (std::size_t i = 0; i < scene.n; ++i)
    for (int c = 0; c < 2; ++c)
      CHECK(parsed.germs.row(i)[c] == scene.germs.row(i)[c]);
}
