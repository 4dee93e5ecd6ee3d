#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "steinmc/coords.hpp"
#include "steinmc/functional.hpp"
#include "steinmc/rational.hpp"
#include "steinmc/rng.hpp"

namespace steinmc {

// Thrown when an exact-enumeration path is asked to exceed its cap.
class EnumerationCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A subset draw (A, j) with j outside A and the weight k_{n,A}.
struct SubsetDraw {
  std::vector<std::size_t> a_set;  // sorted
  std::size_t j = 0;
  double weight = 0.0;  // k_{n,A}
};

// View of X with coordinates in A replaced by X'.
RecombinedVector resample_subset(const SampleBatch& batch,
                                 const std::vector<std::size_t>& a_set);

// Delta_j f(X) = f(X) - f(X^j).
Eigen::VectorXd delta_j(const Functional& f, const SampleBatch& batch,
                        std::size_t j);

// Delta_j f(Z) for a recombined vector Z (slot j replaced by X'_j).
Eigen::VectorXd delta_j_view(const Functional& f, const RecombinedVector& z,
                             std::size_t j);

// Second-order operator: f(X) - f(X^{j}) - f(X_{i}) + f(X^{i,j}) where
// X_{i} carries X~ in slot i.  For i == j this collapses to
// f(X) - f(X_{i}) (the X' substitution cancels).
Eigen::VectorXd tilde_delta_i_delta_j(const Functional& f,
                                      const SampleBatch& batch, std::size_t i,
                                      std::size_t j);

// Same operator applied to X^A.  When i is in A the base copy is not read
// at slot i and the operator vanishes identically.
Eigen::VectorXd tilde_delta_i_delta_j_view(const Functional& f,
                                           const RecombinedVector& z,
                                           std::size_t i, std::size_t j);

// Draws (A, j) with probability k_{n,A}/n: |A| uniform on {0,..,n-1},
// A uniform among subsets of that size, j uniform outside A.
SubsetDraw sample_weighted_subset(std::size_t n, RngStream& rng);

enum class TMatrixMode { exact, monte_carlo };

struct TMatrix {
  Eigen::MatrixXd t;
  std::size_t n_terms = 0;
  TMatrixMode mode = TMatrixMode::exact;
};

struct TMatrixOptions {
  std::size_t enumeration_cap = 12;
  std::size_t reps = 0;  // monte-carlo draws
};

// T = (1/2) sum_{A strictly inside [n]} k_{n,A} sum_{j not in A}
//     Delta_j f(X) Delta_j f(X^A)^T,
// computed exactly (all subsets, cap-guarded) or as an unbiased average of
// (n/2) Delta_j f(X) Delta_j f(X^A)^T over weighted subset draws.
TMatrix t_matrix(const Functional& f, const SampleBatch& batch,
                 TMatrixMode mode, RngStream& rng,
                 const TMatrixOptions& opts = {});

// sum over strata of k_{n,A}(n-|A|) as an exact rational; equals n.
Rational subset_weight_total(unsigned n);

}  // namespace steinmc
