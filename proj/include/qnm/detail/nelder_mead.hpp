#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

namespace qnm::detail {

struct NmResult {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
  bool converged = false;
};

/// Two-dimensional Nelder-Mead ascent from (x0, y0) with initial steps
/// (dx, dy). Stops when the simplex value spread drops below tol.
template <class F>
NmResult maximize_2d(F&& f, double x0, double y0, double dx, double dy, double tol,
                     int max_iterations,
                     const std::function<void(double, double, double)>& on_best = {}) {
  struct Vertex {
    double x, y, value;
  };
  std::array<Vertex, 3> s{{{x0, y0, f(x0, y0)},
                           {x0 + dx, y0, 0.0},
                           {x0, y0 + dy, 0.0}}};
  s[1].value = f(s[1].x, s[1].y);
  s[2].value = f(s[2].x, s[2].y);

  auto order = [&] {
    std::sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) { return a.value > b.value; });
  };
  auto eval = [&](double x, double y) { return Vertex{x, y, f(x, y)}; };

  NmResult result;
  for (int iter = 0; iter < max_iterations; ++iter) {
    order();
    if (on_best) on_best(s[0].x, s[0].y, s[0].value);
    if (s[0].value - s[2].value < tol) {
      result.converged = true;
      break;
    }
    const double cx_ = 0.5 * (s[0].x + s[1].x);
    const double cy = 0.5 * (s[0].y + s[1].y);
    const Vertex refl = eval(cx_ + (cx_ - s[2].x), cy + (cy - s[2].y));
    if (refl.value > s[0].value) {
      const Vertex expanded = eval(cx_ + 2.0 * (cx_ - s[2].x), cy + 2.0 * (cy - s[2].y));
      s[2] = expanded.value > refl.value ? expanded : refl;
    } else if (refl.value > s[1].value) {
      s[2] = refl;
    } else {
      const Vertex contracted = eval(cx_ + 0.5 * (s[2].x - cx_), cy + 0.5 * (s[2].y - cy));
      if (contracted.value > s[2].value) {
        s[2] = contracted;
      } else {
        for (int k = 1; k < 3; ++k)
          s[k] = eval(s[0].x + 0.5 * (s[k].x - s[0].x), s[0].y + 0.5 * (s[k].y - s[0].y));
      }
    }
  }
  order();
  result.x = s[0].x;
  result.y = s[0].y;
  result.value = s[0].value;
  return result;
}

struct SphereVector {
  double x = 0.0, y = 0.0, z = 1.0;
};

struct SphereMaxResult {
  SphereVector direction;
  double value = 0.0;
  bool converged = false;
};

/// Simplex ascent of a function of a unit direction, parameterized in the
/// tangent plane of the start direction. The (theta, phi) chart is singular
/// at the poles, where simplices degenerate; the tangent chart is not.
template <class F>
SphereMaxResult maximize_on_sphere(F&& f, const SphereVector& start, double step, double tol,
                                   int max_iterations,
                                   const std::function<void(const SphereVector&, double)>& on_best = {}) {
  auto normalize = [](SphereVector v) {
    const double n = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
    return SphereVector{v.x / n, v.y / n, v.z / n};
  };
  const SphereVector n0 = normalize(start);
  // tangent frame
  const SphereVector helper = std::abs(n0.z) < 0.9 ? SphereVector{0, 0, 1} : SphereVector{1, 0, 0};
  SphereVector e1{n0.y * helper.z - n0.z * helper.y, n0.z * helper.x - n0.x * helper.z,
                  n0.x * helper.y - n0.y * helper.x};
  e1 = normalize(e1);
  const SphereVector e2{n0.y * e1.z - n0.z * e1.y, n0.z * e1.x - n0.x * e1.z,
                        n0.x * e1.y - n0.y * e1.x};

  auto dir_at = [&](double u, double v) {
    return normalize(SphereVector{n0.x + u * e1.x + v * e2.x, n0.y + u * e1.y + v * e2.y,
                                  n0.z + u * e1.z + v * e2.z});
  };
  std::function<void(double, double, double)> recorder;
  if (on_best)
    recorder = [&](double u, double v, double value) { on_best(dir_at(u, v), value); };

  const NmResult nm = maximize_2d([&](double u, double v) { return f(dir_at(u, v)); }, 0.0, 0.0,
                                  step, step, tol, max_iterations, recorder);
  return {dir_at(nm.x, nm.y), nm.value, nm.converged};
}

}  // namespace qnm::detail
