#include "steinmc/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace steinmc {

namespace {

// View equal to `base` with a single slot replaced.
struct SlotOverride {
  const CoordView* base;
  std::size_t slot;
  std::span<const double> replacement;

  static std::span<const double> row(const void* obj, std::size_t i) {
    const auto* self = static_cast<const SlotOverride*>(obj);
    return i == self->slot ? self->replacement : self->base->row(i);
  }
};

}  // namespace

Eigen::VectorXd Functional::slot_delta(const CoordView& v, std::size_t j,
                                       std::span<const double> row_a,
                                       std::span<const double> row_b) const {
  if (j >= v.size())
    throw std::out_of_range("Functional::slot_delta: slot index out of range");
  Eigen::VectorXd out(dim_out_);
  if (delta_) {
    delta_(v, j, row_a, row_b, out);
    return out;
  }
  SlotOverride with_a{&v, j, row_a};
  SlotOverride with_b{&v, j, row_b};
  CoordView va(&with_a, &SlotOverride::row, v.size(), v.dim());
  CoordView vb(&with_b, &SlotOverride::row, v.size(), v.dim());
  Eigen::VectorXd fa(dim_out_), fb(dim_out_);
  eval_(va, fa);
  eval_(vb, fb);
  out = fa - fb;
  return out;
}

Functional make_linear_statistic(std::size_t n, std::size_t dim,
                                 double scale_override) {
  const double scale =
      scale_override != 0.0 ? scale_override : 1.0 / std::sqrt(double(n));
  const int d = static_cast<int>(dim);
  Functional f(
      d,
      [scale, d](const CoordView& xs, Eigen::VectorXd& out) {
        out.setZero(d);
        for (std::size_t i = 0; i < xs.size(); ++i) {
          auto r = xs.row(i);
          for (int c = 0; c < d; ++c) out[c] += r[c];
        }
        out *= scale;
      },
      /*symmetric=*/true, "linear");
  f.set_exact_delta([scale, d](const CoordView&, std::size_t,
                               std::span<const double> a,
                               std::span<const double> b,
                               Eigen::VectorXd& out) {
    out.resize(d);
    for (int c = 0; c < d; ++c) out[c] = scale * (a[c] - b[c]);
  });
  return f;
}

Functional make_constant_functional(int dim_out, double value) {
  Functional f(
      dim_out,
      [value, dim_out](const CoordView&, Eigen::VectorXd& out) {
        out.setConstant(dim_out, value);
      },
      /*symmetric=*/true, "constant");
  f.set_exact_delta([dim_out](const CoordView&, std::size_t,
                              std::span<const double>, std::span<const double>,
                              Eigen::VectorXd& out) { out.setZero(dim_out); });
  return f;
}

Functional make_product_statistic() {
  return Functional(
      1,
      [](const CoordView& xs, Eigen::VectorXd& out) {
        double p = 1.0;
        for (std::size_t i = 0; i < xs.size(); ++i) p *= xs.row(i)[0];
        out.resize(1);
        out[0] = p;
      },
      /*symmetric=*/true, "product");
}

Functional make_max_statistic() {
  return Functional(
      1,
      [](const CoordView& xs, Eigen::VectorXd& out) {
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < xs.size(); ++i)
          m = std::max(m, xs.row(i)[0]);
        out.resize(1);
        out[0] = m;
      },
      /*symmetric=*/true, "max");
}

}  // namespace steinmc
