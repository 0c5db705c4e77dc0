#pragma once

#include <algorithm>
#include <string>

#include "plap/coefficients.hpp"
#include "plap/field.hpp"
#include "plap/phi.hpp"

namespace plap {

/// Potential q and weight m sampled on a grid, with the invariants the problem needs.
class CoefficientField {
 public:
  CoefficientField(DiscreteField q, DiscreteField m) : q_(std::move(q)), m_(std::move(m)) {
    if (q_.size() != m_.size()) throw GridMismatch("q and m have different lengths");
    double qmax = 0.0;
    for (double v : q_) {
      if (!(v >= 0.0)) throw ConfigError("potential q must be nonnegative at every node");
      qmax = std::max(qmax, v);
    }
    if (!(qmax > 0.0)) throw ConfigError("potential q must not vanish identically");
    for (double v : m_) {
      if (!std::isfinite(v)) throw ConfigError("weight m must be finite at every node");
    }
  }

  const DiscreteField& q() const noexcept { return q_; }
  const DiscreteField& m() const noexcept { return m_; }

  bool weight_has_positive_part() const noexcept { return max_value(m_) > 0.0; }
  bool weight_has_negative_part() const noexcept { return min_value(m_) < 0.0; }
  bool sign_changing() const noexcept {
    return weight_has_positive_part() && weight_has_negative_part();
  }

 private:
  DiscreteField q_;
  DiscreteField m_;
};

/// Exponent, grid and coefficients of the periodic problem. Immutable once built.
class ProblemSpec {
 public:
  ProblemSpec(PExponent p, PeriodicGrid grid, Coefficient q, Coefficient m)
      : p_(p),
        grid_(grid),
        q_fn_(std::move(q)),
        m_fn_(std::move(m)),
        coeffs_(q_fn_.sample(grid_), m_fn_.sample(grid_)) {}

  const PExponent& p() const noexcept { return p_; }
  const PeriodicGrid& grid() const noexcept { return grid_; }
  const CoefficientField& coeffs() const noexcept { return coeffs_; }
  const DiscreteField& q() const noexcept { return coeffs_.q(); }
  const DiscreteField& m() const noexcept { return coeffs_.m(); }
  const Coefficient& q_function() const noexcept { return q_fn_; }
  const Coefficient& m_function() const noexcept { return m_fn_; }

  double q_at(double x) const { return q_fn_.evaluate(x, grid_.period()); }
  double m_at(double x) const { return m_fn_.evaluate(x, grid_.period()); }

  ProblemSpec with_exponent(double p) const { return ProblemSpec(PExponent(p), grid_, q_fn_, m_fn_); }

  /// Same coefficients on another grid. Sampled coefficients are interpolated.
  ProblemSpec with_grid(const PeriodicGrid& g) const {
    return ProblemSpec(p_, g, regrid(q_fn_, g), regrid(m_fn_, g));
  }

  ProblemSpec with_potential(const DiscreteField& q) const {
    return ProblemSpec(p_, grid_, Coefficient::samples(q.vector()), m_fn_);
  }

  ProblemSpec with_weight(const DiscreteField& m) const {
    return ProblemSpec(p_, grid_, q_fn_, Coefficient::samples(m.vector()));
  }

  /// The problem with weight -m; its positive principal pair gives the negative one of this problem.
  ProblemSpec reflected() const {
    DiscreteField neg = m();
    neg *= -1.0;
    if (m_fn_.kind() == Coefficient::Kind::constant) {
      return ProblemSpec(p_, grid_, q_fn_, Coefficient::constant(-m_fn_.a()));
    }
    if (m_fn_.kind() == Coefficient::Kind::cosine) {
      return ProblemSpec(p_, grid_, q_fn_, Coefficient::cosine(-m_fn_.a(), -m_fn_.b(), m_fn_.k()));
    }
    if (m_fn_.kind() == Coefficient::Kind::piecewise) {
      std::vector<double> v = m_fn_.values();
      for (double& x : v) x = -x;
      return ProblemSpec(p_, grid_, q_fn_, Coefficient::piecewise(m_fn_.breaks(), v));
    }
    return with_weight(neg);
  }

 private:
  static Coefficient regrid(const Coefficient& c, const PeriodicGrid& g) {
    if (c.kind() != Coefficient::Kind::samples) return c;
    const PeriodicGrid from(g.period(), c.values().size());
    return Coefficient::samples(resample(from, DiscreteField(c.values()), g).vector());
  }

  PExponent p_;
  PeriodicGrid grid_;
  Coefficient q_fn_;
  Coefficient m_fn_;
  CoefficientField coeffs_;
};

inline void require_on_grid(const ProblemSpec& spec, const DiscreteField& u, const char* what) {
  require_on_grid(spec.grid(), u, what);
}

}  // namespace plap
