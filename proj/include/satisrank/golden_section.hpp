#pragma once

#include <cmath>
#include <optional>

#include "satisrank/divergence.hpp"

namespace satisrank {

struct GoldenOptions {
  double tolerance = 1e-8;  // absolute width at which the search stops
  int max_iterations = 200;
};

struct GoldenResult {
  double argmin = 0.0;
  double value = kInfinity;
  int iterations = 0;
  double lower = 0.0;  // final bracket
  double upper = 0.0;
};

/// Minimizes a function that is convex where finite on [lower, upper].
/// +inf compares greater than every finite value. When both probes are +inf
/// the search moves left, so clip infinite end regions with
/// bisect_finite_edge first.
template <class F>
GoldenResult golden_section_minimize(F&& f, double lower, double upper,
                                     const GoldenOptions& opts = {}) {
  constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5) - 1) / 2
  double a = lower;
  double b = upper;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int it = 0;
  while (b - a > opts.tolerance && it < opts.max_iterations) {
    ++it;
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  GoldenResult out;
  out.iterations = it;
  out.lower = a;
  out.upper = b;
  if (fc <= fd) {
    out.argmin = c;
    out.value = fc;
  } else {
    out.argmin = d;
    out.value = fd;
  }
  return out;
}

/// Locates the edge of the finite region of f between a point where f is
/// +inf (`outside`) and a point where it is finite (`inside`), by bisection.
/// Returns a point on the finite side within `tolerance` of the edge.
template <class F>
double bisect_finite_edge(F&& f, double outside, double inside, double tolerance,
                          int max_iterations = 200) {
  for (int i = 0; i < max_iterations && std::abs(inside - outside) > tolerance; ++i) {
    const double mid = 0.5 * (inside + outside);
    if (std::isfinite(f(mid))) {
      inside = mid;
    } else {
      outside = mid;
    }
  }
  return inside;
}

}  // namespace satisrank
