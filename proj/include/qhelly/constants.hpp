#pragma once

#include "qhelly/config.hpp"
#include "qhelly/linalg.hpp"

#include <cmath>
#include <string>

namespace qhelly {

// log of d^d (d+1)^((3d+1)/2) / sqrt(d!).
inline double log_explicit_bound(int d) {
  if (d < 1 || d > 170) throw Error(ErrorKind::CapExceeded, "explicit bound needs 1 <= d <= 170, got " + std::to_string(d));
  return d * std::log(double(d)) + 0.5 * (3.0 * d + 1.0) * std::log(d + 1.0) - 0.5 * log_factorial(d);
}

// Volume-ratio bound delivered by the construction: vol(cap G) <= explicit_bound(d) vol(cap F).
inline double explicit_bound(int d) { return std::exp(log_explicit_bound(d)); }

// Lower bound on vol(S1) forced by the Dvoretzky-Rogers inequalities: 1 / (sqrt(d!) d^(d/2)).
inline double simplex_volume_floor(int d) {
  return std::exp(-0.5 * log_factorial(d) - 0.5 * d * std::log(double(d)));
}

struct BoundReport {
  int d = 0;
  double explicit_bound = 0.0;
  double theorem_form_ratio = 0.0;  // explicit_bound / (e^d d^(2d))
  double log_explicit_bound = 0.0;
  double log_theorem_form_ratio = 0.0;
};

inline BoundReport bound_report(int d) {
  BoundReport r;
  r.d = d;
  r.log_explicit_bound = log_explicit_bound(d);
  r.log_theorem_form_ratio = r.log_explicit_bound - d - 2.0 * d * std::log(double(d));
  r.explicit_bound = std::exp(r.log_explicit_bound);
  r.theorem_form_ratio = std::exp(r.log_theorem_form_ratio);
  return r;
}

struct ConstantScan {
  double max_ratio = 0.0;  // smallest C with explicit_bound(d) <= C e^d d^(2d) on the range
  int argmax = 0;
  bool non_increasing_from_2 = true;
};

inline ConstantScan theorem_constant_scan(int d_max) {
  ConstantScan s;
  double best = -std::numeric_limits<double>::infinity();
  double prev = std::numeric_limits<double>::infinity();
  for (int d = 1; d <= d_max; ++d) {
    const double lr = bound_report(d).log_theorem_form_ratio;
    if (lr > best) {
      best = lr;
      s.argmax = d;
    }
    if (d >= 2) {
      if (lr > prev) s.non_increasing_from_2 = false;
      prev = lr;
    }
  }
  s.max_ratio = std::exp(best);
  return s;
}

}  // namespace qhelly
