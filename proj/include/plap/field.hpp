#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "plap/errors.hpp"

namespace plap {

constexpr double kInfinity() noexcept { return std::numeric_limits<double>::infinity(); }

/// Uniform periodic grid on [0, T) with N nodes x_i = i*h.
class PeriodicGrid {
 public:
  PeriodicGrid(double period, std::size_t nodes) : n_(nodes) {
    if (!std::isfinite(period) || !(period > 0.0)) {
      throw ConfigError("period T must be positive (got " + std::to_string(period) + ")");
    }
    if (nodes < 8) {
      throw ConfigError("grid size N must be at least 8 (got " + std::to_string(nodes) + ")");
    }
    h_ = period / static_cast<double>(nodes);
    // Stored period is h*N so the two never disagree.
    t_ = h_ * static_cast<double>(nodes);
  }

  double period() const noexcept { return t_; }
  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  double node(std::size_t i) const noexcept { return h_ * static_cast<double>(i); }

  std::size_t next(std::size_t i) const noexcept { return i + 1 == n_ ? 0 : i + 1; }
  std::size_t prev(std::size_t i) const noexcept { return i == 0 ? n_ - 1 : i - 1; }

  /// Same grid with twice the node count.
  PeriodicGrid refined() const { return PeriodicGrid(t_, 2 * n_); }

  friend bool operator==(const PeriodicGrid& a, const PeriodicGrid& b) noexcept {
    return a.n_ == b.n_ && a.t_ == b.t_;
  }

 private:
  std::size_t n_;
  double h_;
  double t_;
};

/// Nodal samples of a T-periodic function; index N is identified with index 0.
class DiscreteField {
 public:
  DiscreteField() = default;
  explicit DiscreteField(std::size_t n, double value = 0.0) : values_(n, value) {}
  explicit DiscreteField(std::vector<double> values) : values_(std::move(values)) {}

  static DiscreteField sample(const PeriodicGrid& grid, const std::function<double(double)>& fn) {
    DiscreteField out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = fn(grid.node(i));
    return out;
  }

  std::size_t size() const noexcept { return values_.size(); }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& vector() const noexcept { return values_; }

  auto begin() noexcept { return values_.begin(); }
  auto end() noexcept { return values_.end(); }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  DiscreteField& operator+=(const DiscreteField& o) {
    for (std::size_t i = 0; i < size(); ++i) values_[i] += o[i];
    return *this;
  }
  DiscreteField& operator-=(const DiscreteField& o) {
    for (std::size_t i = 0; i < size(); ++i) values_[i] -= o[i];
    return *this;
  }
  DiscreteField& operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
  }
  friend DiscreteField operator+(DiscreteField a, const DiscreteField& b) { return a += b; }
  friend DiscreteField operator-(DiscreteField a, const DiscreteField& b) { return a -= b; }
  friend DiscreteField operator*(double s, DiscreteField a) { return a *= s; }
  friend DiscreteField operator*(DiscreteField a, double s) { return a *= s; }

  friend bool operator==(const DiscreteField&, const DiscreteField&) = default;

 private:
  std::vector<double> values_;
};

inline void require_on_grid(const PeriodicGrid& grid, const DiscreteField& u, const char* what) {
  if (u.size() != grid.size()) {
    throw GridMismatch(std::string(what) + ": field has " + std::to_string(u.size()) +
                       " samples but grid has " + std::to_string(grid.size()));
  }
}

inline double sup_norm(const DiscreteField& u) noexcept {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::fabs(v));
  return m;
}

inline double min_value(const DiscreteField& u) noexcept {
  return *std::min_element(u.begin(), u.end());
}

inline double max_value(const DiscreteField& u) noexcept {
  return *std::max_element(u.begin(), u.end());
}

/// Euclidean norm of the sample vector.
inline double euclidean_norm(const DiscreteField& u) noexcept {
  double s = 0.0;
  for (double v : u) s += v * v;
  return std::sqrt(s);
}

/// sqrt(h * sum u_i^2), the grid approximation of the L2(0,T) norm.
inline double grid_l2_norm(const PeriodicGrid& grid, const DiscreteField& u) noexcept {
  return std::sqrt(grid.spacing()) * euclidean_norm(u);
}

/// Plain sum of products of the samples.
inline double dot(const DiscreteField& a, const DiscreteField& b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double grid_dot(const PeriodicGrid& grid, const DiscreteField& a, const DiscreteField& b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return grid.spacing() * s;
}

inline double sup_distance(const DiscreteField& a, const DiscreteField& b) noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

inline double mean(const DiscreteField& u) noexcept {
  return std::accumulate(u.begin(), u.end(), 0.0) / static_cast<double>(u.size());
}

/// Forward difference (u_{i+1} - u_i)/h with periodic wrap.
inline DiscreteField forward_difference(const PeriodicGrid& grid, const DiscreteField& u) {
  DiscreteField d(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) d[i] = (u[grid.next(i)] - u[i]) / grid.spacing();
  return d;
}

/// Centered difference (u_{i+1} - u_{i-1})/(2h) with periodic wrap.
inline DiscreteField centered_difference(const PeriodicGrid& grid, const DiscreteField& u) {
  DiscreteField d(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    d[i] = (u[grid.next(i)] - u[grid.prev(i)]) / (2.0 * grid.spacing());
  }
  return d;
}

/// Periodic linear interpolation of u at position x.
inline double interpolate(const PeriodicGrid& grid, const DiscreteField& u, double x) noexcept {
  const double t = grid.period();
  double y = std::fmod(x, t);
  if (y < 0.0) y += t;
  const double s = y / grid.spacing();
  auto i = static_cast<std::size_t>(std::floor(s));
  if (i >= grid.size()) i = grid.size() - 1;
  const double w = s - static_cast<double>(i);
  return (1.0 - w) * u[i] + w * u[grid.next(i)];
}

/// Samples of u at the nodes of `target` (same period), by periodic linear interpolation.
inline DiscreteField resample(const PeriodicGrid& from, const DiscreteField& u, const PeriodicGrid& target) {
  return DiscreteField::sample(target, [&](double x) { return interpolate(from, u, x); });
}

/// Number of sign changes around the period, ignoring samples below `floor` in magnitude.
inline int count_sign_changes(std::span<const double> u, double floor = 0.0) {
  int first = 0, last = 0, changes = 0;
  for (double v : u) {
    if (std::fabs(v) <= floor) continue;
    const int s = v > 0.0 ? 1 : -1;
    if (first == 0) first = s;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  if (first != 0 && last != first) ++changes;
  return changes;
}

}  // namespace plap
