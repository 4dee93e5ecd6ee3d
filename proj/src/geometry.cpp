#include "steinmc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "steinmc/rng.hpp"

namespace steinmc {

IntervalUnion interval_union(std::vector<std::pair<double, double>> intervals) {
  IntervalUnion out;
  if (intervals.empty()) return out;
  std::sort(intervals.begin(), intervals.end());
  double lo = intervals.front().first;
  double hi = intervals.front().second;
  out.components = 1;
  for (std::size_t i = 1; i < intervals.size(); ++i) {
    const auto& [a, b] = intervals[i];
    if (a <= hi) {
      hi = std::max(hi, b);
    } else {
      out.length += hi - lo;
      lo = a;
      hi = b;
      ++out.components;
    }
  }
  out.length += hi - lo;
  return out;
}

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0.0 ? a + kTwoPi : a;
}

// Angular interval on a circle, possibly wrapping, with the index of the
// disc that produced it.
struct CoverInterval {
  double start;
  double end;  // end >= start after unwrapping; end - start < 2*pi
  int from;
};

struct Arc {
  double start;
  double length;
  int ends_into;  // disc whose coverage begins at the arc end; -1 if full
};

// Complement of the union of cover intervals on one circle.  Returns one
// full-circle arc when nothing covers, nothing when fully covered.
std::vector<Arc> uncovered_arcs(std::vector<CoverInterval> covers) {
  std::vector<Arc> arcs;
  if (covers.empty()) {
    arcs.push_back({0.0, kTwoPi, -1});
    return arcs;
  }
  // Split wrapping intervals at 0.
  std::vector<CoverInterval> flat;
  for (auto& c : covers) {
    double s = wrap_angle(c.start);
    double e = wrap_angle(c.end);
    if (e < s) {
      flat.push_back({s, kTwoPi, c.from});
      flat.push_back({0.0, e, c.from});
    } else {
      flat.push_back({s, e, c.from});
    }
  }
  std::sort(flat.begin(), flat.end(),
            [](const CoverInterval& a, const CoverInterval& b) {
              return a.start < b.start;
            });
  // Merge, remembering who starts each merged block.
  std::vector<CoverInterval> merged;
  for (const auto& c : flat) {
    if (!merged.empty() && c.start <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, c.end);
    } else {
      merged.push_back(c);
    }
  }
  // Wrap-around join between the last and first block.
  bool covers_zero = merged.front().start <= 0.0;
  if (merged.size() > 1 && merged.back().end >= kTwoPi && covers_zero) {
    merged.front().start = merged.back().start - kTwoPi;
    merged.front().from = merged.back().from;
    merged.pop_back();
  }
  if (merged.size() == 1 &&
      merged.front().end - merged.front().start >= kTwoPi)
    return arcs;  // fully covered
  for (std::size_t b = 0; b < merged.size(); ++b) {
    const auto& cur = merged[b];
    const auto& nxt = merged[(b + 1) % merged.size()];
    double gap_start = cur.end;
    double gap_end = nxt.start + (b + 1 == merged.size() ? kTwoPi : 0.0);
    if (gap_end > gap_start)
      arcs.push_back({gap_start, gap_end - gap_start, nxt.from});
  }
  return arcs;
}

struct ArcAccumulator {
  double area = 0.0;
  double perimeter = 0.0;
  double angle_total = 0.0;

  void add(double cx, double cy, double r, double start, double length) {
    const double end = start + length;
    area += 0.5 * (r * r * length + cx * r * (std::sin(end) - std::sin(start)) -
                   cy * r * (std::cos(end) - std::cos(start)));
    perimeter += r * length;
    angle_total += length;
  }
};

double turning_angle(double tx_in, double ty_in, double tx_out,
                     double ty_out) {
  return std::atan2(tx_in * ty_out - ty_in * tx_out,
                    tx_in * tx_out + ty_in * ty_out);
}

bool build_disc_union(std::span<const double> xs, std::span<const double> ys,
                      double r, DiscUnion& out) {
  const std::size_t n = xs.size();
  const double eps = 1e-9 * r;

  ArcAccumulator acc;
  double vertex_turning = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    std::vector<CoverInterval> covers;
    bool duplicate_dropped = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dx = xs[j] - xs[i];
      const double dy = ys[j] - ys[i];
      const double dist = std::hypot(dx, dy);
      if (dist >= 2.0 * r) {
        if (dist - 2.0 * r < eps) return false;  // near-tangent
        continue;
      }
      if (dist < eps) {
        // Coincident centers: keep the lower-index copy only.
        if (j < i) duplicate_dropped = true;
        continue;
      }
      if (2.0 * r - dist < eps) return false;
      const double phi = std::atan2(dy, dx);
      const double half = std::acos(dist / (2.0 * r));
      covers.push_back({phi - half, phi + half, static_cast<int>(j)});
    }
    if (duplicate_dropped) continue;  // this circle is a duplicate boundary
    const std::vector<Arc> arcs = uncovered_arcs(std::move(covers));
    for (const Arc& arc : arcs) {
      if (arc.length < 1e-12) return false;  // sliver arc; jitter instead
      acc.add(xs[i], ys[i], r, arc.start, arc.length);
      if (arc.ends_into < 0) continue;  // isolated full circle
      // Vertex where this arc hands over to the neighbouring circle.
      const double theta = arc.start + arc.length;
      const double px = xs[i] + r * std::cos(theta);
      const double py = ys[i] + r * std::sin(theta);
      const std::size_t j = static_cast<std::size_t>(arc.ends_into);
      const double psi = std::atan2(py - ys[j], px - xs[j]);
      vertex_turning += turning_angle(-std::sin(theta), std::cos(theta),
                                      -std::sin(psi), std::cos(psi));
    }
  }

  out.area = acc.area;
  out.perimeter = acc.perimeter;
  const double euler_float = (acc.angle_total + vertex_turning) / kTwoPi;
  out.euler = static_cast<int>(std::lround(euler_float));
  out.gauss_bonnet_residual = std::abs(euler_float - out.euler);
  return true;
}

}  // namespace

DiscUnion disc_union(std::span<const double> xs, std::span<const double> ys,
                     double radius) {
  if (xs.size() != ys.size())
    throw std::invalid_argument("disc_union: coordinate size mismatch");
  if (radius <= 0.0) throw std::invalid_argument("disc_union: radius <= 0");
  DiscUnion out;
  if (xs.empty()) return out;

  if (build_disc_union(xs, ys, radius, out) &&
      out.gauss_bonnet_residual < 1e-6)
    return out;

  // Deterministic jitter derived from the coordinates themselves.
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::uint64_t bits;
    static_assert(sizeof(double) == sizeof(std::uint64_t));
    std::memcpy(&bits, &xs[i], sizeof(bits));
    h ^= bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    std::memcpy(&bits, &ys[i], sizeof(bits));
    h ^= bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  std::vector<double> jx(xs.begin(), xs.end());
  std::vector<double> jy(ys.begin(), ys.end());
  const double scale = 1e-7 * radius;
  std::uint64_t state = h;
  for (std::size_t i = 0; i < jx.size(); ++i) {
    jx[i] += scale * (static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53 -
                      0.5);
    jy[i] += scale * (static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53 -
                      0.5);
  }
  DiscUnion jittered;
  if (build_disc_union(jx, jy, radius, jittered) &&
      jittered.gauss_bonnet_residual < 1e-6) {
    jittered.jittered = true;
    return jittered;
  }
  std::ostringstream msg;
  msg << "disc_union: degenerate configuration (n=" << xs.size()
      << ", r=" << radius << "), Gauss-Bonnet residual "
      << jittered.gauss_bonnet_residual;
  throw DegenerateSceneError(msg.str());
}

DiscIntersection disc_intersection(std::span<const double> xs,
                                   std::span<const double> ys, double radius) {
  DiscIntersection out;
  const std::size_t n = xs.size();
  if (n == 0) return out;
  if (n == 1) {
    out.empty = false;
    out.area = M_PI * radius * radius;
    out.perimeter = kTwoPi * radius;
    return out;
  }
  // De-duplicate coincident centers; equal radii make copies redundant.
  std::vector<double> cx, cy;
  for (std::size_t i = 0; i < n; ++i) {
    bool dup = false;
    for (std::size_t k = 0; k < cx.size(); ++k)
      if (xs[i] == cx[k] && ys[i] == cy[k]) dup = true;
    if (!dup) {
      cx.push_back(xs[i]);
      cy.push_back(ys[i]);
    }
  }
  if (cx.size() == 1) {
    out.empty = false;
    out.area = M_PI * radius * radius;
    out.perimeter = kTwoPi * radius;
    return out;
  }

  ArcAccumulator acc;
  bool any_arc = false;
  for (std::size_t i = 0; i < cx.size(); ++i) {
    // Forbidden portions of circle i: outside any other disc.
    std::vector<CoverInterval> forbidden;
    bool feasible = true;
    for (std::size_t j = 0; j < cx.size() && feasible; ++j) {
      if (j == i) continue;
      const double dist = std::hypot(cx[j] - cx[i], cy[j] - cy[i]);
      if (dist >= 2.0 * radius) {
        out.empty = true;
        return out;
      }
      const double phi = std::atan2(cy[j] - cy[i], cx[j] - cx[i]);
      const double half = std::acos(dist / (2.0 * radius));
      // Allowed is [phi - half, phi + half]; forbid the complement.
      forbidden.push_back({phi + half, phi - half + kTwoPi,
                           static_cast<int>(j)});
    }
    const std::vector<Arc> arcs = uncovered_arcs(std::move(forbidden));
    for (const Arc& arc : arcs) {
      any_arc = true;
      acc.add(cx[i], cy[i], radius, arc.start, arc.length);
    }
  }
  if (!any_arc) {
    out.empty = true;
    return out;
  }
  out.empty = false;
  out.area = acc.area;
  out.perimeter = acc.perimeter;
  return out;
}

double lens_area(double radius, double center_distance) {
  if (center_distance >= 2.0 * radius) return 0.0;
  const double half = std::acos(center_distance / (2.0 * radius));
  return 2.0 * radius * radius * half -
         0.5 * center_distance *
             std::sqrt(4.0 * radius * radius -
                       center_distance * center_distance);
}

double lens_arc_length(double radius, double center_distance) {
  if (center_distance >= 2.0 * radius) return 0.0;
  return 2.0 * radius * std::acos(center_distance / (2.0 * radius));
}

}  // namespace steinmc
