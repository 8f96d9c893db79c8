#pragma once

// Least absolute deviations regression with two coefficients.
//
// The exact solver walks the vertices of the L1 objective: at every iterate
// it computes the directional derivative along each edge of the current
// vertex (plus the steepest interior direction of each linear sector), takes
// the most negative one, and line-searches along it. The line search of
//   phi(t) = sum_q |r_q - t a_q|
// is a weighted median of the breakpoints r_q / a_q with weights |a_q|, so
// every step lands exactly on a new zero residual. The objective decreases
// strictly, and a vertex with no descending edge is a global minimum since
// the objective is convex.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "longmem/core.hpp"

namespace longmem {

template <typename Scalar>
using Design2 = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

template <typename Scalar>
using Coef2 = Eigen::Matrix<Scalar, 2, 1>;

enum class LadAlgorithm { vertex_descent, irls };

struct LadOptions {
  /// Vertex descent stops once no unit direction lowers the objective faster
  /// than tol * sum_q |x_q' d|. IRLS stops on a relative objective change below tol.
  double tol = 1e-9;
  LadAlgorithm algorithm = LadAlgorithm::vertex_descent;
  /// 0 selects the default cap (4n + 50 for vertex descent, 200 for IRLS).
  int max_iterations = 0;
  /// IRLS weight floor, relative to max|w|.
  double irls_epsilon = 1e-8;
};

template <typename Scalar>
struct LadResult {
  Coef2<Scalar> beta = Coef2<Scalar>::Zero();
  Scalar objective = 0;
  int iterations = 0;
  bool converged = false;
  std::string diagnostic;
};

template <typename Scalar>
Scalar l1_objective(const Design2<Scalar>& X, const Vector<Scalar>& w, const Coef2<Scalar>& beta) {
  return (w - X * beta).cwiseAbs().sum();
}

namespace detail {

template <typename Scalar>
Coef2<Scalar> weighted_ls(const Design2<Scalar>& X, const Vector<Scalar>& w, const Vector<Scalar>& weights) {
  const Eigen::Matrix<Scalar, 2, 2> gram = X.transpose() * weights.asDiagonal() * X;
  const Coef2<Scalar> rhs = X.transpose() * weights.cwiseProduct(w);
  return gram.ldlt().solve(rhs);
}

template <typename Scalar>
Coef2<Scalar> perp(const Eigen::Matrix<Scalar, 1, 2>& x) {
  Coef2<Scalar> p(-x(1), x(0));
  return p / p.norm();
}

/// Directional derivative of the L1 objective at a point with residual
/// signs summarized by g = -sum_{r != 0} sign(r_q) x_q and zero set Z.
template <typename Scalar>
Scalar directional_derivative(const Design2<Scalar>& X, const std::vector<Eigen::Index>& zero_set,
                              const Coef2<Scalar>& g, const Coef2<Scalar>& d) {
  Scalar s = g.dot(d);
  for (Eigen::Index q : zero_set) s += std::abs(X.row(q).dot(d));
  return s;
}

/// Candidate descent directions: the kink rays perpendicular to each
/// zero-residual regressor, and the steepest direction inside each sector
/// they bound. The minimum of the (convex, positively homogeneous)
/// directional derivative over the unit circle is attained at one of them.
template <typename Scalar>
std::vector<Coef2<Scalar>> candidate_directions(const Design2<Scalar>& X,
                                                const std::vector<Eigen::Index>& zero_set,
                                                const Coef2<Scalar>& g) {
  std::vector<Coef2<Scalar>> out;
  if (zero_set.empty()) {
    if (g.norm() > Scalar(0)) out.push_back(-g / g.norm());
    return out;
  }
  std::vector<Scalar> angles;
  angles.reserve(2 * zero_set.size());
  for (Eigen::Index q : zero_set) {
    const auto row = X.row(q);
    if (row.norm() == Scalar(0)) continue;
    const Coef2<Scalar> p = perp<Scalar>(row);
    out.push_back(p);
    out.push_back(-p);
    const Scalar a = std::atan2(p(1), p(0));
    angles.push_back(a);
    angles.push_back(a > Scalar(0) ? a - kPi<Scalar> : a + kPi<Scalar>);
  }
  if (angles.empty()) {
    if (g.norm() > Scalar(0)) out.push_back(-g / g.norm());
    return out;
  }
  std::sort(angles.begin(), angles.end());
  angles.erase(std::unique(angles.begin(), angles.end()), angles.end());
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const Scalar lo = angles[i];
    const Scalar hi = (i + 1 < angles.size()) ? angles[i + 1] : angles[0] + 2 * kPi<Scalar>;
    const Scalar mid = Scalar(0.5) * (lo + hi);
    const Coef2<Scalar> dm(std::cos(mid), std::sin(mid));
    Coef2<Scalar> v = g;
    for (Eigen::Index q : zero_set) {
      const Scalar s = X.row(q).dot(dm);
      if (s > 0) v += X.row(q).transpose();
      else if (s < 0) v -= X.row(q).transpose();
    }
    if (v.norm() > Scalar(0)) out.push_back(-v / v.norm());
  }
  return out;
}

/// argmin_{t >= 0} sum_q |r_q - t a_q| given phi'(0+) < 0. Returns the step
/// and the index whose residual it zeroes.
template <typename Scalar>
std::pair<Scalar, Eigen::Index> weighted_median_step(const Vector<Scalar>& r, const Vector<Scalar>& a,
                                                     std::vector<std::pair<Scalar, Eigen::Index>>& scratch) {
  const Scalar amax = a.cwiseAbs().maxCoeff();
  const Scalar floor = amax * Scalar(1e-13);
  scratch.clear();
  Scalar total = 0;
  for (Eigen::Index q = 0; q < r.size(); ++q) {
    if (std::abs(a(q)) > floor) {
      scratch.emplace_back(r(q) / a(q), q);
      total += std::abs(a(q));
    }
  }
  std::sort(scratch.begin(), scratch.end());
  const Scalar half = total / 2;
  Scalar cum = 0;
  for (const auto& [t, q] : scratch) {
    cum += std::abs(a(q));
    if (cum >= half) return {t, q};
  }
  return {scratch.back().first, scratch.back().second};
}

template <typename Scalar>
LadResult<Scalar> lad_vertex_descent(const Design2<Scalar>& X, const Vector<Scalar>& w, const LadOptions& opt) {
  const Eigen::Index n = X.rows();
  const int cap = opt.max_iterations > 0 ? opt.max_iterations : int(4 * n + 50);
  const Scalar tol = Scalar(opt.tol);

  LadResult<Scalar> res;
  Coef2<Scalar> beta = weighted_ls<Scalar>(X, w, Vector<Scalar>::Ones(n));
  if (!beta.allFinite()) beta.setZero();

  const Scalar scale = w.cwiseAbs().maxCoeff();
  const Scalar xscale = X.cwiseAbs().maxCoeff();
  std::vector<std::pair<Scalar, Eigen::Index>> scratch;
  std::vector<Eigen::Index> zero_set;
  std::vector<Eigen::Index> pinned;
  scratch.reserve(n);

  Vector<Scalar> r = w - X * beta;
  Scalar objective = r.cwiseAbs().sum();

  for (int it = 0; it < cap; ++it) {
    res.iterations = it;
    const Scalar zero_tol =
        Scalar(64) * std::numeric_limits<Scalar>::epsilon() * (scale + xscale * beta.template lpNorm<1>());
    zero_set.clear();
    Coef2<Scalar> g = Coef2<Scalar>::Zero();
    for (Eigen::Index q = 0; q < n; ++q) {
      if (std::abs(r(q)) <= zero_tol) zero_set.push_back(q);
      else if (r(q) > 0) g -= X.row(q).transpose();
      else g += X.row(q).transpose();
    }

    Scalar best = std::numeric_limits<Scalar>::infinity();
    Coef2<Scalar> dir = Coef2<Scalar>::Zero();
    for (const auto& d : candidate_directions<Scalar>(X, zero_set, g)) {
      const Scalar dd = directional_derivative<Scalar>(X, zero_set, g, d);
      if (dd < best) {
        best = dd;
        dir = d;
      }
    }
    const Vector<Scalar> a = X * dir;
    if (!(best < -tol * a.cwiseAbs().sum())) {
      res.converged = true;
      break;
    }

    // Residuals inside the zero set count as exact zeros, so their breakpoints sit at t = 0.
    Vector<Scalar> r_line = r;
    for (Eigen::Index q : zero_set) r_line(q) = 0;
    const auto [step, hit] = weighted_median_step<Scalar>(r_line, a, scratch);
    if (!(step > Scalar(0))) {
      res.diagnostic = "line search stalled";
      break;
    }
    Coef2<Scalar> next = beta + step * dir;

    // Keep pinned points that the edge did not move, add the new one, and
    // solve the interpolation system exactly once two independent rows are pinned.
    std::vector<Eigen::Index> kept;
    for (Eigen::Index p : pinned)
      if (p != hit && std::abs(a(p)) <= Scalar(1e-12) * a.cwiseAbs().maxCoeff()) kept.push_back(p);
    kept.push_back(hit);
    if (kept.size() >= 2) {
      const Eigen::Index i = kept[kept.size() - 2], j = kept.back();
      Eigen::Matrix<Scalar, 2, 2> A;
      A.row(0) = X.row(i);
      A.row(1) = X.row(j);
      if (std::abs(A.determinant()) > Scalar(1e-10) * A.squaredNorm()) {
        next = A.partialPivLu().solve(Coef2<Scalar>(w(i), w(j)));
        kept = {i, j};
      } else {
        kept = {j};
      }
    }
    Vector<Scalar> r_next = w - X * next;
    const Scalar obj_next = r_next.cwiseAbs().sum();
    if (!(obj_next < objective)) {
      // Rounding made the step useless: this vertex is optimal to machine precision.
      res.converged = std::abs(best) <= Scalar(1e-8) * a.cwiseAbs().sum();
      if (!res.converged) res.diagnostic = "no strict decrease along descent edge";
      break;
    }
    beta = next;
    r = std::move(r_next);
    objective = obj_next;
    pinned = std::move(kept);
    res.iterations = it + 1;
  }
  if (!res.converged && res.diagnostic.empty())
    res.diagnostic = "iteration cap of " + std::to_string(cap) + " reached";
  res.beta = beta;
  res.objective = objective;
  return res;
}

template <typename Scalar>
LadResult<Scalar> lad_irls(const Design2<Scalar>& X, const Vector<Scalar>& w, const LadOptions& opt) {
  const Eigen::Index n = X.rows();
  const int cap = opt.max_iterations > 0 ? opt.max_iterations : 200;
  const Scalar scale = w.cwiseAbs().maxCoeff();
  const Scalar floor = Scalar(opt.irls_epsilon) * (scale > 0 ? scale : Scalar(1));

  LadResult<Scalar> res;
  Coef2<Scalar> beta = weighted_ls<Scalar>(X, w, Vector<Scalar>::Ones(n));
  Scalar objective = l1_objective<Scalar>(X, w, beta);
  Coef2<Scalar> best_beta = beta;
  Scalar best_obj = objective;
  for (int it = 1; it <= cap; ++it) {
    res.iterations = it;
    const Vector<Scalar> weights = (w - X * beta).cwiseAbs().cwiseMax(floor).cwiseInverse();
    beta = weighted_ls<Scalar>(X, w, weights);
    const Scalar next = l1_objective<Scalar>(X, w, beta);
    if (next < best_obj) {
      best_obj = next;
      best_beta = beta;
    }
    const Scalar change = std::abs(objective - next);
    objective = next;
    if (change <= Scalar(opt.tol) * std::max(objective, floor)) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged) res.diagnostic = "IRLS iteration cap of " + std::to_string(cap) + " reached";
  res.beta = best_beta;
  res.objective = best_obj;
  return res;
}

}  // namespace detail

/// argmin_beta sum_q |w_q - x_q' beta| for an n x 2 design of rank 2.
template <typename Scalar>
LadResult<Scalar> lad_regression(const Design2<Scalar>& X, const Vector<Scalar>& w, const LadOptions& opt = {}) {
  if (X.rows() != w.size()) throw ValidationError("design and response lengths differ");
  if (X.rows() < 2) throw ValidationError("LAD regression needs at least two observations");
  if (!(opt.tol > 0)) throw ValidationError("LAD tolerance must be positive");
  if (!w.allFinite()) throw ValidationError("LAD response contains non-finite values");
  return opt.algorithm == LadAlgorithm::irls ? detail::lad_irls<Scalar>(X, w, opt)
                                             : detail::lad_vertex_descent<Scalar>(X, w, opt);
}

}  // namespace longmem
