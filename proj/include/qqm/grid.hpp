#pragma once

// Uniform rectangular grids and second-order finite-difference stencils for
// fields of any value type that forms a real vector space (double, Complex,
// Quaternion). Stencils act componentwise.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qqm/parallel.hpp"
#include "qqm/quaternion.hpp"
#include "qqm/vec3.hpp"

namespace qqm {

/// Uniform grid of rank 1-3. Axes beyond the rank have a single point.
class Grid {
 public:
  static constexpr std::size_t kMinPoints = 5;

  Grid(std::size_t rank, const Vec3& origin, const Vec3& spacing,
       const std::array<std::size_t, 3>& dims)
      : rank_{rank}, origin_{origin}, spacing_{spacing}, dims_{dims} {
    if (rank < 1 || rank > 3) throw std::invalid_argument("grid rank must be 1, 2 or 3");
    for (std::size_t a = 0; a < 3; ++a) {
      if (a < rank) {
        if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a]))
          throw std::invalid_argument("grid spacing must be positive on axis " + std::to_string(a));
        if (dims[a] < kMinPoints)
          throw std::invalid_argument("grid needs at least 5 points on axis " + std::to_string(a));
      } else {
        dims_[a] = 1;
        spacing_[a] = 1.0;
        origin_[a] = 0.0;
      }
    }
  }

  /// 1D grid of n points from x0 with spacing h.
  static Grid line(double x0, double h, std::size_t n) { return Grid(1, {x0, 0, 0}, {h, 1, 1}, {n, 1, 1}); }

  /// Cube [lo, hi]^rank with n points per axis, endpoints included.
  static Grid cube(std::size_t rank, double lo, double hi, std::size_t n) {
    const double h = (hi - lo) / static_cast<double>(n - 1);
    return Grid(rank, {lo, lo, lo}, {h, h, h}, {n, n, n});
  }

  std::size_t rank() const { return rank_; }
  const Vec3& origin() const { return origin_; }
  const Vec3& spacing() const { return spacing_; }
  const std::array<std::size_t, 3>& dims() const { return dims_; }
  std::size_t size() const { return dims_[0] * dims_[1] * dims_[2]; }

  double cell_volume() const {
    double v = 1.0;
    for (std::size_t a = 0; a < rank_; ++a) v *= spacing_[a];
    return v;
  }

  std::size_t stride(std::size_t axis) const {
    return axis == 0 ? 1 : axis == 1 ? dims_[0] : dims_[0] * dims_[1];
  }

  std::array<std::size_t, 3> unflatten(std::size_t idx) const {
    return {idx % dims_[0], (idx / dims_[0]) % dims_[1], idx / (dims_[0] * dims_[1])};
  }

  std::size_t flatten(const std::array<std::size_t, 3>& ijk) const {
    return ijk[0] + dims_[0] * (ijk[1] + dims_[1] * ijk[2]);
  }

  Vec3 point(std::size_t idx) const {
    const auto ijk = unflatten(idx);
    Vec3 x{};
    for (std::size_t a = 0; a < 3; ++a)
      x[a] = a < rank_ ? origin_[a] + spacing_[a] * static_cast<double>(ijk[a]) : 0.0;
    return x;
  }

  /// True if idx lies at least `margin` cells away from every boundary.
  bool is_interior(std::size_t idx, std::size_t margin = 1) const {
    const auto ijk = unflatten(idx);
    for (std::size_t a = 0; a < rank_; ++a)
      if (ijk[a] < margin || ijk[a] + margin >= dims_[a]) return false;
    return true;
  }

  /// Same rank, same extent, (dims - 1) * factor + 1 points per axis.
  Grid refined(std::size_t factor) const {
    Vec3 h = spacing_;
    auto n = dims_;
    for (std::size_t a = 0; a < rank_; ++a) {
      h[a] /= static_cast<double>(factor);
      n[a] = (dims_[a] - 1) * factor + 1;
    }
    return Grid(rank_, origin_, h, n);
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t rank_;
  Vec3 origin_;
  Vec3 spacing_;
  std::array<std::size_t, 3> dims_;
};

template <class T>
struct Field {
  Grid grid;
  std::vector<T> values;

  explicit Field(Grid g) : grid{std::move(g)}, values(grid.size()) {}
  Field(Grid g, std::vector<T> v) : grid{std::move(g)}, values{std::move(v)} {
    if (values.size() != grid.size()) throw std::invalid_argument("field size does not match grid");
  }

  std::size_t size() const { return values.size(); }
  T& operator[](std::size_t i) { return values[i]; }
  const T& operator[](std::size_t i) const { return values[i]; }
};

using QField = Field<Quaternion>;
using RealField = Field<double>;

/// Samples fn(x) at every grid point.
template <class Fn>
auto sample(const Grid& grid, Fn&& fn) {
  using T = std::decay_t<decltype(fn(Vec3{}))>;
  Field<T> out(grid);
  parallel_for(grid.size(), [&](std::size_t i) { out.values[i] = fn(grid.point(i)); });
  return out;
}

/// Pointwise map over one field.
template <class T, class Fn>
auto map(const Field<T>& f, Fn&& fn) {
  using U = std::decay_t<decltype(fn(f.values[0]))>;
  Field<U> out(f.grid);
  parallel_for(f.size(), [&](std::size_t i) { out.values[i] = fn(f.values[i]); });
  return out;
}

inline void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw std::invalid_argument("grid mismatch");
}

namespace detail {

inline void require_stencil_points(const Grid& g, std::size_t needed) {
  for (std::size_t a = 0; a < g.rank(); ++a)
    if (g.dims()[a] < needed)
      throw std::invalid_argument("grid too small for stencil on axis " + std::to_string(a));
}

}  // namespace detail

/// First derivative along one axis: central in the interior, one-sided
/// second order at the two ends.
template <class T>
Field<T> derivative_fd(const Field<T>& f, std::size_t axis) {
  const Grid& g = f.grid;
  if (axis >= g.rank()) throw std::invalid_argument("axis beyond grid rank");
  detail::require_stencil_points(g, 3);
  const std::size_t n = g.dims()[axis];
  const std::size_t s = g.stride(axis);
  const double inv2h = 0.5 / g.spacing()[axis];
  Field<T> out(g);
  parallel_for(g.size(), [&](std::size_t idx) {
    const std::size_t i = g.unflatten(idx)[axis];
    const auto& v = f.values;
    if (i == 0) {
      out.values[idx] = (v[idx] * -3.0 + v[idx + s] * 4.0 - v[idx + 2 * s]) * inv2h;
    } else if (i + 1 == n) {
      out.values[idx] = (v[idx] * 3.0 - v[idx - s] * 4.0 + v[idx - 2 * s]) * inv2h;
    } else {
      out.values[idx] = (v[idx + s] - v[idx - s]) * inv2h;
    }
  });
  return out;
}

/// One derivative field per active axis.
template <class T>
std::vector<Field<T>> gradient_fd(const Field<T>& f) {
  std::vector<Field<T>> out;
  out.reserve(f.grid.rank());
  for (std::size_t a = 0; a < f.grid.rank(); ++a) out.push_back(derivative_fd(f, a));
  return out;
}

/// Second derivative along one axis: 3-point central stencil in the interior,
/// 4-point one-sided second-order stencil at the ends.
template <class T>
Field<T> second_derivative_fd(const Field<T>& f, std::size_t axis) {
  const Grid& g = f.grid;
  if (axis >= g.rank()) throw std::invalid_argument("axis beyond grid rank");
  detail::require_stencil_points(g, 4);
  const std::size_t n = g.dims()[axis];
  const std::size_t s = g.stride(axis);
  const double inv_h2 = 1.0 / (g.spacing()[axis] * g.spacing()[axis]);
  Field<T> out(g);
  parallel_for(g.size(), [&](std::size_t idx) {
    const std::size_t i = g.unflatten(idx)[axis];
    const auto& v = f.values;
    if (i == 0) {
      out.values[idx] = (v[idx] * 2.0 - v[idx + s] * 5.0 + v[idx + 2 * s] * 4.0 - v[idx + 3 * s]) * inv_h2;
    } else if (i + 1 == n) {
      out.values[idx] = (v[idx] * 2.0 - v[idx - s] * 5.0 + v[idx - 2 * s] * 4.0 - v[idx - 3 * s]) * inv_h2;
    } else {
      out.values[idx] = (v[idx + s] - v[idx] * 2.0 + v[idx - s]) * inv_h2;
    }
  });
  return out;
}

template <class T>
Field<T> laplacian_fd(const Field<T>& f) {
  Field<T> out = second_derivative_fd(f, 0);
  for (std::size_t a = 1; a < f.grid.rank(); ++a) {
    const Field<T> d2 = second_derivative_fd(f, a);
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += d2.values[i];
  }
  return out;
}

/// Time derivative of a uniformly sampled series, second order throughout.
template <class T>
std::vector<T> time_derivative_fd(std::span<const T> samples, double dt) {
  if (samples.size() < 3) throw std::invalid_argument("time derivative needs at least 3 samples");
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const std::size_t n = samples.size();
  const double inv2dt = 0.5 / dt;
  std::vector<T> out(n);
  out[0] = (samples[0] * -3.0 + samples[1] * 4.0 - samples[2]) * inv2dt;
  out[n - 1] = (samples[n - 1] * 3.0 - samples[n - 2] * 4.0 + samples[n - 3]) * inv2dt;
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (samples[i + 1] - samples[i - 1]) * inv2dt;
  return out;
}

template <class T>
std::vector<T> time_derivative_fd(const std::vector<T>& samples, double dt) {
  return time_derivative_fd(std::span<const T>(samples), dt);
}

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const Complex& v) { return std::abs(v); }
inline double magnitude(const Quaternion& v) { return abs(v); }

/// L-infinity norm over all points.
template <class T>
double linf(const Field<T>& f) {
  double m = 0.0;
  for (const auto& v : f.values) m = std::max(m, magnitude(v));
  return m;
}

/// L-infinity norm over points at least one cell from the boundary.
template <class T>
double linf_interior(const Field<T>& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f.grid.is_interior(i)) m = std::max(m, magnitude(f.values[i]));
  return m;
}

/// Observed convergence order from errors at spacing h and h / refinement.
inline double observed_order(double coarse_error, double fine_error, double refinement = 2.0) {
  return std::log(coarse_error / fine_error) / std::log(refinement);
}

}  // namespace qqm
