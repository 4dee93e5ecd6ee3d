#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace steinmc {

class DegenerateSceneError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IntervalUnion {
  double length = 0.0;
  int components = 0;
};

// Union of closed intervals; exact merge sweep.
IntervalUnion interval_union(std::vector<std::pair<double, double>> intervals);

struct DiscUnion {
  double area = 0.0;
  double perimeter = 0.0;
  int euler = 0;
  double gauss_bonnet_residual = 0.0;
  bool jittered = false;  // degeneracy was resolved by deterministic jitter
};

// Union of equal-radius discs via boundary arc decomposition.  Area comes
// from the divergence theorem over the retained arcs, the perimeter from
// their total length, and the Euler characteristic from Gauss-Bonnet
// (arc turning plus vertex exterior angles).  Exact tangencies and
// coincident centers are perturbed by a deterministic 1e-12-scale jitter;
// a Gauss-Bonnet residual above 1e-6 raises DegenerateSceneError.
DiscUnion disc_union(std::span<const double> xs, std::span<const double> ys,
                     double radius);

struct DiscIntersection {
  bool empty = true;
  double area = 0.0;
  double perimeter = 0.0;
};

// Intersection of equal-radius discs centered at the given points
// (a convex circular-arc region).
DiscIntersection disc_intersection(std::span<const double> xs,
                                   std::span<const double> ys, double radius);

// Closed-form lens: area and one-circle arc length of the intersection of
// two radius-r discs with centers distance t apart.
double lens_area(double radius, double center_distance);
double lens_arc_length(double radius, double center_distance);

}  // namespace steinmc
