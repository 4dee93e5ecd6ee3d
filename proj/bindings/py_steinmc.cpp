#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "steinmc/boolean_model.hpp"
#include "steinmc/distance.hpp"
#include "steinmc/enumeration.hpp"
#include "steinmc/gamma.hpp"
#include "steinmc/geometry.hpp"
#include "steinmc/kappa.hpp"
#include "steinmc/knn.hpp"
#include "steinmc/normal_cdf.hpp"
#include "steinmc/report_io.hpp"
#include "steinmc/resample.hpp"
#include "steinmc/sigma_series.hpp"

namespace py = pybind11;
using namespace steinmc;

namespace {

std::vector<std::vector<double>> matrix_to_lists(const Eigen::MatrixXd& m) {
  std::vector<std::vector<double>> out(m.rows());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out[r].resize(m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[r][c] = m(r, c);
  }
  return out;
}

CoordMatrix points_from_lists(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("empty point list");
  CoordMatrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.dim())
      throw std::invalid_argument("ragged point list");
    auto row = m.mutable_row(i);
    std::copy(rows[i].begin(), rows[i].end(), row.begin());
  }
  return m;
}

}  // namespace

PYBIND11_MODULE(_steinmc, m) {
  m.doc() = "Resampling-based multivariate normal approximation bounds with "
            "germ-grain and nearest-neighbour benches";
  m.attr("__version__") = kVersion;

  m.def("unit_ball_volume", &unit_ball_volume, py::arg("m"));
  m.def(
      "wills_functional",
      [](unsigned d, const std::vector<double>& v) {
        return wills_functional(d, v);
      },
      py::arg("d"), py::arg("intrinsic_volumes"));

  m.def(
      "sample_scene_germs",
      [](int d, std::size_t n, double radius, std::uint64_t seed) {
        const GermGrainScene scene = sample_scene(d, n, radius, seed);
        std::vector<std::vector<double>> germs(n);
        for (std::size_t i = 0; i < n; ++i) {
          auto row = scene.germs.row(i);
          germs[i].assign(row.begin(), row.end());
        }
        return germs;
      },
      py::arg("d"), py::arg("n"), py::arg("radius"), py::arg("seed"));

  m.def(
      "intrinsic_volumes",
      [](int d, std::size_t n, double radius, std::uint64_t seed) {
        const GermGrainScene scene = sample_scene(d, n, radius, seed);
        const Eigen::VectorXd v = intrinsic_volumes(scene);
        return std::vector<double>(v.data(), v.data() + v.size());
      },
      py::arg("d"), py::arg("n"), py::arg("radius"), py::arg("seed"));

  m.def(
      "disc_union_volumes",
      [](const std::vector<double>& xs, const std::vector<double>& ys,
         double radius) {
        const DiscUnion u = disc_union(xs, ys, radius);
        return py::make_tuple(u.euler, 0.5 * u.perimeter, u.area);
      },
      py::arg("xs"), py::arg("ys"), py::arg("radius"),
      "Intrinsic volumes (V0, V1, V2) of a union of equal discs");

  m.def("lens_area", &lens_area, py::arg("radius"), py::arg("distance"));

  m.def(
      "p_coefficients",
      [](unsigned d, double radius) {
        return matrix_to_lists(p_coefficients(d, radius));
      },
      py::arg("d"), py::arg("radius"));

  m.def(
      "sigma_series",
      [](unsigned d, double radius, std::size_t k_max, std::size_t mc_samples,
         std::uint64_t seed) {
        SigmaSeriesOptions opts;
        opts.k_max = k_max;
        opts.mc_samples = mc_samples;
        const SigmaSeries series =
            sigma_series(d, radius, opts, RngStream(seed, 0));
        py::dict out;
        out["sigma"] = matrix_to_lists(series.sigma);
        out["term_max"] = series.term_max;
        out["k_used"] = series.k_used;
        return out;
      },
      py::arg("d"), py::arg("radius"), py::arg("k_max") = 10,
      py::arg("mc_samples") = 50000, py::arg("seed") = 1);

  m.def(
      "exact_mean_1d",
      [](std::size_t n, double radius) {
        const Eigen::VectorXd v = exact_mean_1d(n, radius);
        return py::make_tuple(v[0], v[1]);
      },
      py::arg("n"), py::arg("radius"));

  m.def(
      "knn_graph_neighbors",
      [](const std::vector<std::vector<double>>& points, std::size_t k) {
        return knn_graph(points_from_lists(points), k).neighbors;
      },
      py::arg("points"), py::arg("k"));

  m.def(
      "interaction_edges",
      [](const std::vector<std::vector<double>>& points, std::size_t k) {
        return interaction_rule_graph(points_from_lists(points), k).edges;
      },
      py::arg("points"), py::arg("k"));

  m.def(
      "delta_statistic",
      [](const std::vector<std::vector<double>>& extended, std::size_t k) {
        return delta_statistic(points_from_lists(extended), k);
      },
      py::arg("extended_points"), py::arg("k"));

  m.def("alpha_cones", &alpha_cones, py::arg("m"),
        py::arg("override_value") = 0);

  m.def(
      "gamma12_linear_statistic",
      [](std::size_t n, int d, std::size_t reps, std::uint64_t seed) {
        const Functional f = make_linear_statistic(n, d);
        const Gamma12Result got = estimate_gamma12(
            f, make_standard_normal_sampler(n, d), reps, RngStream(seed, 0));
        return py::make_tuple(got.gamma1.value, got.gamma1.std_error,
                              got.gamma2.value, got.gamma2.std_error);
      },
      py::arg("n"), py::arg("d") = 1, py::arg("reps") = 20000,
      py::arg("seed") = 1);

  m.def(
      "t_matrix_exact_linear",
      [](const std::vector<double>& x, const std::vector<double>& x_prime) {
        const std::size_t n = x.size();
        SampleBatch batch{CoordMatrix(n, 1), CoordMatrix(n, 1),
                          CoordMatrix(n, 1)};
        for (std::size_t i = 0; i < n; ++i) {
          batch.x.mutable_row(i)[0] = x[i];
          batch.x_prime.mutable_row(i)[0] = x_prime[i];
        }
        const Functional f = make_linear_statistic(n, 1, 1.0);
        RngStream rng(0, 0);
        return t_matrix(f, batch, TMatrixMode::exact, rng).t(0, 0);
      },
      py::arg("x"), py::arg("x_prime"));

  m.def(
      "proxy_convex_distance_halfspaces",
      [](const std::vector<std::vector<double>>& samples,
         std::size_t directions, std::size_t thresholds) {
        const CoordMatrix pts = points_from_lists(samples);
        Eigen::MatrixXd w(pts.size(), pts.dim());
        for (std::size_t i = 0; i < pts.size(); ++i)
          for (std::size_t c = 0; c < pts.dim(); ++c) w(i, c) = pts.row(i)[c];
        const GaussianTarget target(
            Eigen::MatrixXd::Identity(pts.dim(), pts.dim()));
        const TestClass cls = default_half_spaces(
            static_cast<int>(pts.dim()), directions, thresholds);
        const ProxyDistance d = proxy_convex_distance(w, target, cls);
        return py::make_tuple(d.value, d.class_size);
      },
      py::arg("samples"), py::arg("directions") = 32,
      py::arg("thresholds") = 128,
      "Proxy convex distance to the standard normal");

  m.def(
      "rate_fit",
      [](const std::vector<std::pair<double, double>>& pairs) {
        const RateFit fit = rate_fit(pairs);
        return py::make_tuple(fit.slope, fit.intercept, fit.half_width);
      },
      py::arg("pairs"));

  m.def("normal_cdf", &normal_cdf, py::arg("x"));
}
