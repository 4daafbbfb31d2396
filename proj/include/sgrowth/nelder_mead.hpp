#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include <Eigen/Core>

namespace sgrowth {

struct NelderMeadOptions {
  int max_iterations = 5000;
  /// Converged when every vertex lies within this distance of the best one,
  /// coordinate by coordinate.
  double x_tolerance = 1e-8;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Downhill simplex minimisation of f starting from x0 with an axis-aligned
/// initial simplex of the given per-coordinate step.
template <typename F>
NelderMeadResult nelder_mead(F&& f, const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
                             const NelderMeadOptions& opt = {}) {
  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
  const Eigen::Index n = x0.size();
  std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(n + 1), x0);
  for (Eigen::Index i = 0; i < n; ++i) pts[static_cast<std::size_t>(i + 1)](i) += step(i);
  std::vector<double> vals(pts.size());
  for (std::size_t j = 0; j < pts.size(); ++j) vals[j] = f(pts[j]);

  std::vector<std::size_t> order(pts.size());
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    std::vector<Eigen::VectorXd> p2;
    std::vector<double> v2;
    p2.reserve(pts.size());
    v2.reserve(pts.size());
    for (auto k : order) {
      p2.push_back(pts[k]);
      v2.push_back(vals[k]);
    }
    pts.swap(p2);
    vals.swap(v2);
  };
  auto collapsed = [&] {
    for (std::size_t j = 1; j < pts.size(); ++j) {
      if ((pts[j] - pts[0]).cwiseAbs().maxCoeff() > opt.x_tolerance) return false;
    }
    return true;
  };

  NelderMeadResult res;
  const std::size_t worst = static_cast<std::size_t>(n);
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    sort_simplex();
    if (collapsed()) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t j = 0; j < worst; ++j) centroid += pts[j];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd xr = centroid + kReflect * (centroid - pts[worst]);
    const double fr = f(xr);
    if (fr < vals[0]) {
      const Eigen::VectorXd xe = centroid + kExpand * (xr - centroid);
      const double fe = f(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[worst - 1]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + kContract * (xr - centroid))
                                       : Eigen::VectorXd(centroid + kContract * (pts[worst] - centroid));
    const double fc = f(xc);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    for (std::size_t j = 1; j < pts.size(); ++j) {
      pts[j] = pts[0] + kShrink * (pts[j] - pts[0]);
      vals[j] = f(pts[j]);
    }
  }
  if (!res.converged) sort_simplex();
  res.x = pts[0];
  res.value = vals[0];
  res.iterations = it;
  return res;
}

}  // namespace sgrowth
