#pragma once

// Discretization of the transforms on a logarithmic grid. Nodes sit at
// decade-aligned positions 10^(k/D); the trapezoid rule in u = ln t turns a
// sampled function into an integral, so the collocation matrix applied to
// samples of f approximates the transform at the grid points. A second,
// norm-scaled matrix carries the quadrature weights split between rows and
// columns so its l^p -> l^q operator norm approximates the L^p -> L^q one.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "lpq/criteria.hpp"
#include "lpq/exponents.hpp"
#include "lpq/ext.hpp"
#include "lpq/matrix.hpp"
#include "lpq/weight.hpp"

namespace lpq {

struct Grid {
  double t_min = 0.0;
  double t_max = 0.0;
  int per_decade = 0;
  std::vector<double> nodes;
  std::vector<double> qw;  // trapezoid weights for int f(t) dt, i.e. t_j du
};

inline Grid log_grid(double t_min = 1e-4, double t_max = 1e4, int per_decade = 64) {
  if (!(t_min > 0.0) || !(t_max > t_min) || !std::isfinite(t_max))
    throw ParamError("grid needs 0 < t_min < t_max < inf");
  if (per_decade < 1) throw ParamError("grid needs at least one node per decade");
  const double d = static_cast<double>(per_decade);
  const long k_lo = std::lround(std::ceil(d * std::log10(t_min) - 1e-9));
  const long k_hi = std::lround(std::floor(d * std::log10(t_max) + 1e-9));
  if (k_hi - k_lo < 1) throw ParamError("grid span holds fewer than two nodes");
  Grid g;
  g.t_min = t_min;
  g.t_max = t_max;
  g.per_decade = per_decade;
  const double du = std::log(10.0) / d;
  for (long k = k_lo; k <= k_hi; ++k) {
    const double t = std::pow(10.0, static_cast<double>(k) / d);
    g.nodes.push_back(t);
    g.qw.push_back(t * du);
  }
  g.qw.front() *= 0.5;
  g.qw.back() *= 0.5;
  return g;
}

// Splices extra nodes (typically weight breakpoints) into a grid and rebuilds
// the trapezoid weights from the neighbor midpoints in u = ln t. On an
// untouched log grid this reproduces the original weights.
inline Grid insert_nodes(Grid g, std::vector<double> points) {
  std::sort(points.begin(), points.end());
  for (double t : points) {
    if (!(t > 0.0) || !std::isfinite(t)) continue;
    if (t < g.nodes.front() || t > g.nodes.back()) continue;
    auto it = std::lower_bound(g.nodes.begin(), g.nodes.end(), t);
    if (it != g.nodes.end() && *it <= t * (1.0 + 1e-12)) continue;  // present
    g.nodes.insert(it, t);
  }
  const std::size_t n = g.nodes.size();
  g.qw.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = j == 0 ? g.nodes.front() : std::sqrt(g.nodes[j - 1] * g.nodes[j]);
    const double hi = j + 1 == n ? g.nodes.back() : std::sqrt(g.nodes[j] * g.nodes[j + 1]);
    g.qw[j] = g.nodes[j] * std::log(hi / lo);
  }
  return g;
}

inline int env_threads() {
  const char* s = std::getenv("LPQ_THREADS");
  if (!s || !*s) return 1;
  const int n = std::atoi(s);
  return n < 1 ? 1 : (n > 256 ? 256 : n);
}

struct DiscreteOp {
  OperatorKind kind = OperatorKind::Laplace;
  Exponents e;
  Grid gx, gy;
  // collocation form: P_ij = w(x_i) k(x_i, y_j) v(y_j) qw_j, so P f ~ (T f)(x_i)
  Matrix P;
  // norm form with zero rows and columns dropped:
  // qw_i^(1/q) w(x_i) k(x_i, y_j) v(y_j) qw_j^(1/p')
  Matrix scaled;
  std::vector<std::size_t> row_index;  // scaled row -> gx node position
  std::vector<std::size_t> col_index;  // scaled col -> gy node position
};

namespace ddetail {

// Rebuilds the norm form and its index maps from the collocation matrix.
inline void rescale(DiscreteOp& op) {
  const std::size_t nx = op.P.rows, ny = op.P.cols;
  const double row_exp = op.e.q_inf() ? 0.0 : 1.0 / op.e.q;
  const double col_exp = 1.0 - (op.e.p_inf() ? 0.0 : 1.0 / op.e.p);  // 1/p'
  std::vector<double> rw(nx), cw(ny);
  for (std::size_t i = 0; i < nx; ++i) rw[i] = xpow(op.gx.qw[i], row_exp);
  for (std::size_t j = 0; j < ny; ++j) cw[j] = xpow(op.gy.qw[j], col_exp - 1.0);

  std::vector<char> row_live(nx, 0), col_live(ny, 0);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j)
      if (op.P.at(i, j) != 0.0) {
        row_live[i] = 1;
        col_live[j] = 1;
      }
  op.row_index.clear();
  op.col_index.clear();
  for (std::size_t i = 0; i < nx; ++i)
    if (row_live[i]) op.row_index.push_back(i);
  for (std::size_t j = 0; j < ny; ++j)
    if (col_live[j]) op.col_index.push_back(j);
  op.scaled = Matrix::zeros(op.row_index.size(), op.col_index.size());
  for (std::size_t i = 0; i < op.row_index.size(); ++i)
    for (std::size_t j = 0; j < op.col_index.size(); ++j) {
      const std::size_t gi = op.row_index[i], gj = op.col_index[j];
      op.scaled.at(i, j) = rw[gi] * op.P.at(gi, gj) * cw[gj];
    }
}

}  // namespace ddetail

inline DiscreteOp discretize(const Exponents& e, OperatorKind kind, const Weight& v,
                             const Weight& w, const Grid& gx, const Grid& gy,
                             int threads = env_threads()) {
  const std::size_t nx = gx.nodes.size(), ny = gy.nodes.size();
  DiscreteOp op;
  op.kind = kind;
  op.e = e;
  op.gx = gx;
  op.gy = gy;
  op.P = Matrix::zeros(nx, ny);

  std::vector<double> vy(ny);
  for (std::size_t j = 0; j < ny; ++j) vy[j] = v(gy.nodes[j]);

  auto fill_rows = [&](std::size_t i0, std::size_t i1) {
    for (std::size_t i = i0; i < i1; ++i) {
      const double x = gx.nodes[i];
      const double wx = kind == OperatorKind::Laplace ? 1.0 : w(x);
      double* prow = &op.P.at(i, 0);
      if (wx == 0.0) continue;
      for (std::size_t j = 0; j < ny; ++j) {
        if (vy[j] == 0.0) continue;
        prow[j] = wx * kernel_value(kind, e.lambda, x, gy.nodes[j]) * vy[j] * gy.qw[j];
      }
    }
  };
  if (threads <= 1 || nx < 64) {
    fill_rows(0, nx);
  } else {
    const std::size_t nt = std::min<std::size_t>(threads, nx);
    std::vector<std::thread> pool;
    const std::size_t chunk = (nx + nt - 1) / nt;
    for (std::size_t t = 0; t < nt; ++t) {
      const std::size_t i0 = t * chunk, i1 = std::min(nx, i0 + chunk);
      if (i0 < i1) pool.emplace_back(fill_rows, i0, i1);
    }
    for (auto& th : pool) th.join();
  }

  ddetail::rescale(op);
  return op;
}

// Zeroes every column whose source node lies outside [source_window] and every
// row outside [target_window] (closed windows; grids unchanged, so norms stay
// comparable across truncations). An empty intersection leaves the zero
// operator, which is valid.
inline DiscreteOp truncate(const DiscreteOp& op, std::pair<double, double> source_window,
                           std::pair<double, double> target_window = {0.0, inf}) {
  if (!(source_window.first <= source_window.second) ||
      !(target_window.first <= target_window.second))
    throw ParamError("truncation windows need lo <= hi");
  DiscreteOp out = op;
  for (std::size_t j = 0; j < out.P.cols; ++j) {
    const double y = out.gy.nodes[j];
    if (y < source_window.first || y > source_window.second)
      for (std::size_t i = 0; i < out.P.rows; ++i) out.P.at(i, j) = 0.0;
  }
  for (std::size_t i = 0; i < out.P.rows; ++i) {
    const double x = out.gx.nodes[i];
    if (x < target_window.first || x > target_window.second)
      for (std::size_t j = 0; j < out.P.cols; ++j) out.P.at(i, j) = 0.0;
  }
  ddetail::rescale(out);
  return out;
}

// The exponential factorization of the symmetric kernel: composing the two
// one-sided transforms with an x-quadrature must reproduce the direct matrix,
// entry by entry, since int_0^inf e^(-x s) dx = 1/s with s = t^l + y^l. The
// returned figure is the largest relative entry deviation over nonzero
// weights; it probes how well the x-grid resolves every node pair.
inline double compose_check(const Exponents& e, const Weight& v, const Weight& w,
                            const Grid& gy, const Grid& gx) {
  double dev = 0.0;
  std::vector<double> ylam(gy.nodes.size());
  for (std::size_t j = 0; j < gy.nodes.size(); ++j)
    ylam[j] = xpow(gy.nodes[j], e.lambda);
  for (std::size_t i = 0; i < gy.nodes.size(); ++i) {
    if (w(gy.nodes[i]) == 0.0) continue;
    for (std::size_t j = 0; j < gy.nodes.size(); ++j) {
      if (v(gy.nodes[j]) == 0.0) continue;
      const double s = ylam[i] + ylam[j];
      double composed = 0.0;
      for (std::size_t k = 0; k < gx.nodes.size(); ++k)
        composed += gx.qw[k] * std::exp(-gx.nodes[k] * s);
      dev = std::max(dev, std::abs(composed * s - 1.0));
    }
  }
  return dev;
}

}  // namespace lpq
