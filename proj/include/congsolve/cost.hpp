#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "congsolve/errors.hpp"

namespace congsolve {

// Polynomial resource cost with nonnegative coefficients, degree <= 4. The
// coefficient sign constraint makes the function nonnegative, nondecreasing,
// convex and differentiable on [0, inf) by construction.
class CostFunction {
 public:
  CostFunction() = default;  // identically zero
  explicit CostFunction(std::span<const double> coefficients) {
    if (coefficients.size() > 5) {
      throw InputError("cost polynomial degree exceeds 4");
    }
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
      double c = coefficients[i];
      if (!std::isfinite(c) || c < 0.0) {
        throw InputError("cost coefficients must be finite and nonnegative");
      }
      coef_[i] = c;
    }
  }
  CostFunction(std::initializer_list<double> coefficients)
      : CostFunction(std::span<const double>(coefficients.begin(), coefficients.size())) {}

  static CostFunction affine(double intercept, double slope) {
    return CostFunction({intercept, slope});
  }

  double operator()(double t) const {
    return ((((coef_[4] * t + coef_[3]) * t + coef_[2]) * t + coef_[1]) * t) + coef_[0];
  }
  double derivative(double t) const {
    return ((4.0 * coef_[4] * t + 3.0 * coef_[3]) * t + 2.0 * coef_[2]) * t + coef_[1];
  }
  double second_derivative(double t) const {
    return (12.0 * coef_[4] * t + 6.0 * coef_[3]) * t + 2.0 * coef_[2];
  }

  // Bound on |c'| and |c''| over [0, limit]; both derivatives are
  // nondecreasing here, so the bound sits at the right endpoint.
  double lipschitz_on(double limit) const {
    return std::max(derivative(limit), second_derivative(limit));
  }

  std::span<const double, 5> coefficients() const { return coef_; }

 private:
  std::array<double, 5> coef_{};
};

}  // namespace congsolve
