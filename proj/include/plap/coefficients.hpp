#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "plap/errors.hpp"
#include "plap/field.hpp"

namespace plap {

/// A coefficient function on [0, T): one of a few named parametric families, or raw nodal samples.
///
/// Families:
///  - constant:  c
///  - cosine:    a + b cos(2 pi k x / T)
///  - piecewise: values[j] on [breaks[j-1], breaks[j]) with breaks[-1] = 0 and breaks[n] = T
///  - samples:   one value per grid node; pointwise evaluation interpolates linearly
class Coefficient {
 public:
  enum class Kind { constant, cosine, piecewise, samples };

  static Coefficient constant(double c) {
    Coefficient f(Kind::constant);
    f.a_ = c;
    return f;
  }

  static Coefficient cosine(double a, double b, int k) {
    Coefficient f(Kind::cosine);
    f.a_ = a;
    f.b_ = b;
    f.k_ = k;
    return f;
  }

  static Coefficient piecewise(std::vector<double> breaks, std::vector<double> values) {
    if (values.size() != breaks.size() + 1) {
      throw ConfigError("piecewise coefficient needs exactly one more value than breakpoints");
    }
    for (std::size_t i = 1; i < breaks.size(); ++i) {
      if (!(breaks[i] > breaks[i - 1])) throw ConfigError("piecewise breakpoints must be increasing");
    }
    Coefficient f(Kind::piecewise);
    f.breaks_ = std::move(breaks);
    f.values_ = std::move(values);
    return f;
  }

  static Coefficient samples(std::vector<double> values) {
    if (values.empty()) throw ConfigError("sampled coefficient has no values");
    Coefficient f(Kind::samples);
    f.values_ = std::move(values);
    return f;
  }

  Kind kind() const noexcept { return kind_; }

  std::string kind_name() const {
    switch (kind_) {
      case Kind::constant: return "constant";
      case Kind::cosine: return "cosine";
      case Kind::piecewise: return "piecewise";
      case Kind::samples: return "samples";
    }
    return "unknown";
  }

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  int k() const noexcept { return k_; }
  const std::vector<double>& breaks() const noexcept { return breaks_; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Pointwise value at x for a coefficient of period `period`.
  double evaluate(double x, double period) const {
    switch (kind_) {
      case Kind::constant: return a_;
      case Kind::cosine: return a_ + b_ * std::cos(2.0 * std::numbers::pi * k_ * x / period);
      case Kind::piecewise: {
        double y = std::fmod(x, period);
        if (y < 0.0) y += period;
        std::size_t j = 0;
        while (j < breaks_.size() && y >= breaks_[j]) ++j;
        return values_[j];
      }
      case Kind::samples: {
        const PeriodicGrid g(period, values_.size());
        return interpolate(g, DiscreteField(values_), x);
      }
    }
    return 0.0;
  }

  DiscreteField sample(const PeriodicGrid& grid) const {
    if (kind_ == Kind::samples) {
      if (values_.size() != grid.size()) {
        throw GridMismatch("sampled coefficient has " + std::to_string(values_.size()) +
                           " values but the grid has " + std::to_string(grid.size()) + " nodes");
      }
      return DiscreteField(values_);
    }
    return DiscreteField::sample(grid, [&](double x) { return evaluate(x, grid.period()); });
  }

  friend bool operator==(const Coefficient&, const Coefficient&) = default;

 private:
  explicit Coefficient(Kind k) : kind_(k) {}

  Kind kind_;
  double a_ = 0.0;
  double b_ = 0.0;
  int k_ = 1;
  std::vector<double> breaks_;
  std::vector<double> values_;
};

}  // namespace plap
