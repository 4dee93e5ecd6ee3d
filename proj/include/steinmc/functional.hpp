#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>

#include "steinmc/coords.hpp"

namespace steinmc {

// The statistic under study: a pure map from a coordinate vector to R^d.
//
// eval must be deterministic (identical views give bit-identical output).
// An optional exact-delta routine computes f(v with slot j = a) minus
// f(v with slot j = b) without forming the two full sums; built-in
// statistics use it so that resampling identities that vanish in exact
// arithmetic also vanish bit-exactly in floating point.
class Functional {
 public:
  using EvalFn = std::function<void(const CoordView&, Eigen::VectorXd&)>;
  using DeltaFn = std::function<void(const CoordView&, std::size_t j,
                                     std::span<const double> row_a,
                                     std::span<const double> row_b,
                                     Eigen::VectorXd&)>;

  Functional(int dim_out, EvalFn eval, bool symmetric = false,
             std::string name = "functional")
      : dim_out_(dim_out),
        eval_(std::move(eval)),
        symmetric_(symmetric),
        name_(std::move(name)) {}

  int dim_out() const { return dim_out_; }
  bool symmetric() const { return symmetric_; }
  const std::string& name() const { return name_; }

  Eigen::VectorXd operator()(const CoordView& xs) const {
    Eigen::VectorXd out(dim_out_);
    eval_(xs, out);
    return out;
  }
  void eval_into(const CoordView& xs, Eigen::VectorXd& out) const {
    out.resize(dim_out_);
    eval_(xs, out);
  }

  bool has_exact_delta() const { return static_cast<bool>(delta_); }
  void set_exact_delta(DeltaFn delta) { delta_ = std::move(delta); }

  // f(v | slot j := row_a) - f(v | slot j := row_b).  The slot's current
  // content in v is irrelevant.
  Eigen::VectorXd slot_delta(const CoordView& v, std::size_t j,
                             std::span<const double> row_a,
                             std::span<const double> row_b) const;

 private:
  int dim_out_;
  EvalFn eval_;
  bool symmetric_;
  std::string name_;
  DeltaFn delta_;
};

// f(x) = scale * sum_i x_i, outputs the coordinate dimension.  Exact-delta
// aware; the workhorse of the classical CLT checks.
Functional make_linear_statistic(std::size_t n, std::size_t dim,
                                 double scale_override = 0.0);

// Constant functional (all outputs = value).
Functional make_constant_functional(int dim_out, double value);

// Coordinate-wise product x_1 * x_2 * ... of scalar coordinates, d = 1.
Functional make_product_statistic();

// max over scalar coordinates, d = 1.
Functional make_max_statistic();

}  // namespace steinmc
