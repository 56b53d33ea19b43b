#pragma once

// l^p -> l^q operator norms of nonnegative matrices. The corners p = 1,
// q = inf, and p = inf have closed forms; p = q = 2 is the power iteration on
// the normal matrix; the rest of the range runs a nonlinear power iteration
// with restarts. Below q = 1 the objective is a quasi-norm and the search is
// heuristic. Every reported value is a ratio attained by the stored extremal
// vector, so it is a certified lower bound on the discrete norm.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lpq/criteria.hpp"
#include "lpq/discretize.hpp"
#include "lpq/ext.hpp"
#include "lpq/matrix.hpp"

namespace lpq {

inline double vec_norm(const std::vector<double>& x, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  for (double v : x) s += std::pow(std::abs(v), p);
  return std::pow(s, 1.0 / p);
}

enum class NormMethod { ExactColumn, ExactRow, ExactOnes, SVD, NonlinearPower, BruteForce };

inline const char* to_string(NormMethod m) {
  switch (m) {
    case NormMethod::ExactColumn: return "exact-column";
    case NormMethod::ExactRow: return "exact-row";
    case NormMethod::ExactOnes: return "exact-ones";
    case NormMethod::SVD: return "svd";
    case NormMethod::NonlinearPower: return "nonlinear-power";
    default: return "brute-force";
  }
}

struct NormOptions {
  int restarts = 8;
  int max_iter = 500;
  double tol = 1e-10;
  std::uint64_t seed = 0x5EED;
};

struct NormEstimate {
  double lower_bound = 0.0;  // attained by the stored extremal vector
  NormMethod method = NormMethod::NonlinearPower;
  std::vector<double> extremal;
  int iterations = 0;
  int restarts = 0;  // starts actually run
  bool converged = false;
  bool heuristic = false;  // quasi-norm search below q = 1
  std::uint64_t seed = 0;
};

namespace ndetail {

inline void check_nonneg(const Matrix& a) {
  for (double x : a.a)
    if (!(x >= 0.0)) throw ParamError("norm estimation expects a nonnegative matrix");
}

inline double ratio(const Matrix& a, const std::vector<double>& f, double p, double q) {
  const double fn = vec_norm(f, p);
  if (fn == 0.0 || !std::isfinite(fn)) return 0.0;
  return vec_norm(matvec(a, f), q) / fn;
}

inline std::vector<double> column(const Matrix& a, std::size_t j) {
  std::vector<double> c(a.rows);
  for (std::size_t i = 0; i < a.rows; ++i) c[i] = a.at(i, j);
  return c;
}

}  // namespace ndetail

inline NormEstimate norm_estimate(const Matrix& a, double p, double q,
                                  const NormOptions& opts = {}) {
  if (std::isnan(p) || p < 1.0) throw ParamError("p must lie in [1, inf]");
  if (std::isnan(q) || !(q > 0.0)) throw ParamError("q must be positive");
  ndetail::check_nonneg(a);

  NormEstimate est;
  est.seed = opts.seed;
  est.extremal.assign(a.cols, 0.0);
  if (a.rows == 0 || a.cols == 0) {
    est.method = NormMethod::ExactColumn;
    est.converged = true;
    return est;
  }
  est.extremal[0] = 1.0;

  std::vector<double> colnorm(a.cols);
  for (std::size_t j = 0; j < a.cols; ++j)
    colnorm[j] = vec_norm(ndetail::column(a, j), q);
  const std::size_t best_col =
      std::max_element(colnorm.begin(), colnorm.end()) - colnorm.begin();

  if ((p == 1.0 && q >= 1.0) || colnorm[best_col] == 0.0) {
    // with a convex target norm the extreme points of the unit ball decide,
    // and those are the coordinate vectors; a zero matrix lands here as well
    est.extremal.assign(a.cols, 0.0);
    est.extremal[best_col] = 1.0;
    est.lower_bound = colnorm[best_col];
    est.method = NormMethod::ExactColumn;
    est.converged = true;
    return est;
  }

  if (std::isinf(q)) {
    // the best row decides, paired with its dual-normalized profile
    const double pc = std::isinf(p) ? 1.0 : p / (p - 1.0);
    std::size_t arg = 0;
    for (std::size_t i = 0; i < a.rows; ++i) {
      std::vector<double> r(a.row(i), a.row(i) + a.cols);
      const double rn = vec_norm(r, pc);
      if (rn > est.lower_bound) {
        est.lower_bound = rn;
        arg = i;
      }
    }
    for (std::size_t j = 0; j < a.cols; ++j) {
      const double aj = a.at(arg, j);
      est.extremal[j] =
          std::isinf(p) ? (aj > 0.0 ? 1.0 : 0.0) : std::pow(aj, pc - 1.0);
    }
    const double mn = vec_norm(est.extremal, p);
    if (mn > 0.0)
      for (auto& x : est.extremal) x /= mn;
    est.lower_bound = ndetail::ratio(a, est.extremal, p, q);
    est.method = NormMethod::ExactRow;
    est.converged = true;
    return est;
  }

  if (std::isinf(p)) {
    // for a nonnegative matrix the constant profile is extremal
    est.extremal.assign(a.cols, 1.0);
    est.lower_bound = ndetail::ratio(a, est.extremal, p, q);
    est.method = NormMethod::ExactOnes;
    est.converged = true;
    return est;
  }

  // interior exponents: ascent on the quotient, seeded with every coordinate
  // direction so the estimate never falls below the best column
  auto consider = [&](double sigma, const std::vector<double>& f) {
    if (sigma > est.lower_bound) {
      est.lower_bound = sigma;
      est.extremal = f;
    }
  };
  {
    std::vector<double> e(a.cols, 0.0);
    for (std::size_t j = 0; j < a.cols; ++j) {
      e[j] = 1.0;
      consider(ndetail::ratio(a, e, p, q), e);
      e[j] = 0.0;
    }
  }

  // p = q = 2 reduces the update below to the power iteration on the normal
  // matrix; only the method tag differs
  est.method = (p == 2.0 && q == 2.0) ? NormMethod::SVD : NormMethod::NonlinearPower;
  est.heuristic = q < 1.0;

  // one ascent step: for p > 1 the stationarity map, for p = 1 (reached only
  // with q < 1) a multiplicative gradient step on the simplex, where the
  // q-th power of the objective is concave
  auto step = [&](std::vector<double>& f) {
    auto g = matvec(a, f);
    const double gn = vec_norm(g, q);
    if (gn == 0.0) return false;
    if (q >= 1.0) {
      for (auto& x : g) x = std::pow(x / gn, q - 1.0);
    } else {
      // negative exponent: components far below the quasi-norm would get
      // unbounded dual weight, so they are dropped
      for (auto& x : g) x = x > gn * 1e-12 ? std::pow(x / gn, q - 1.0) : 0.0;
    }
    auto h = matvec_t(a, g);
    if (p > 1.0) {
      const double hmax = *std::max_element(h.begin(), h.end());
      if (!(hmax > 0.0) || !std::isfinite(hmax)) return false;
      for (auto& x : h) x = std::pow(x / hmax, 1.0 / (p - 1.0));
      f = std::move(h);
    } else {
      for (std::size_t j = 0; j < f.size(); ++j) f[j] *= h[j];
    }
    const double fn = vec_norm(f, p);
    if (fn == 0.0 || !std::isfinite(fn)) return false;
    for (auto& x : f) x /= fn;
    return true;
  };

  auto run = [&](std::vector<double> f) {
    double prev = 0.0;
    for (int it = 0; it < opts.max_iter; ++it) {
      if (!step(f)) return false;
      const double sigma = ndetail::ratio(a, f, p, q);
      ++est.iterations;
      consider(sigma, f);
      if (it > 2 && std::abs(sigma - prev) <= opts.tol * std::max(sigma, 1e-300))
        return true;
      prev = sigma;
    }
    return false;
  };

  const int starts = std::max(opts.restarts, 1);
  bool conv = false;
  for (int s = 0; s < starts; ++s) {
    std::vector<double> f(a.cols, 1.0);
    if (s == 1) {
      f = colnorm;
    } else if (s >= 2) {
      // restart seeds derived by counter, independent of evaluation order
      std::mt19937_64 rng(opts.seed + static_cast<std::uint64_t>(s));
      std::uniform_real_distribution<double> unif(0.05, 1.0);
      for (auto& x : f) x = unif(rng);
    }
    conv = run(f) || conv;
    ++est.restarts;
  }
  est.converged = conv && !est.heuristic;

  if (est.heuristic) {
    // multiplicative hill climbing around the best profile found
    std::mt19937_64 rng(opts.seed + 0x9E3779B9u);
    std::uniform_int_distribution<std::size_t> pick(0, a.cols - 1);
    std::normal_distribution<double> bump(0.0, 0.5);
    double base = 0.0;
    for (double x : est.extremal) base += x;
    base = base > 0.0 ? base / static_cast<double>(a.cols) : 1.0;
    const int proposals = 256 * starts;
    for (int k = 0; k < proposals; ++k) {
      auto f = est.extremal;
      const std::size_t j = pick(rng);
      f[j] = f[j] > 0.0 ? f[j] * std::exp(bump(rng)) : 0.1 * base;
      consider(ndetail::ratio(a, f, p, q), f);
    }
  }
  return est;
}

inline NormEstimate norm_pq(const DiscreteOp& op, const NormOptions& opts = {}) {
  return norm_estimate(op.scaled, op.e.p, op.e.q, opts);
}

// True when the outermost grid columns carry more than one part in a thousand
// of the norm estimate; the span should then be widened before the numbers
// are compared against analytic constants.
inline bool span_sensitive(const DiscreteOp& op, const NormEstimate& est) {
  if (!(est.lower_bound > 0.0) || est.extremal.empty()) return false;
  const double lo = op.gy.nodes.front(), hi = op.gy.nodes.back();
  std::vector<double> edge(est.extremal.size(), 0.0);
  bool any = false;
  for (std::size_t j = 0; j < op.col_index.size() && j < edge.size(); ++j) {
    const double y = op.gy.nodes[op.col_index[j]];
    if (y == lo || y == hi) {
      edge[j] = est.extremal[j];
      any = true;
    }
  }
  if (!any) return false;
  return vec_norm(matvec(op.scaled, edge), op.e.q) > 1e-3 * est.lower_bound;
}

// Exhaustive search over the nonnegative part of the unit sphere, for
// cross-checking the iterative paths on tiny matrices.
inline double brute_force_norm(const Matrix& a, double p, double q,
                               int angular_resolution = 0) {
  ndetail::check_nonneg(a);
  if (a.rows == 0 || a.cols == 0) return 0.0;
  if (a.cols > 3) throw ParamError("brute force covers at most three columns");
  double best = 0.0;
  std::vector<double> at;
  auto eval = [&](const std::vector<double>& f) {
    const double r = ndetail::ratio(a, f, p, q);
    if (r > best) {
      best = r;
      at = f;
    }
  };

  if (std::isinf(p)) {
    const int n = angular_resolution > 0 ? angular_resolution : 60;
    if (a.cols == 1) {
      eval({1.0});
    } else if (a.cols == 2) {
      for (int i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) / n;
        eval({1.0, t});
        eval({t, 1.0});
      }
    } else {
      for (int top = 0; top < 3; ++top)
        for (int i = 0; i <= n; ++i)
          for (int j = 0; j <= n; ++j) {
            std::vector<double> f(3);
            f[top] = 1.0;
            f[(top + 1) % 3] = static_cast<double>(i) / n;
            f[(top + 2) % 3] = static_cast<double>(j) / n;
            eval(f);
          }
    }
  } else {
    const double ip = 1.0 / p;
    if (a.cols == 1) {
      eval({1.0});
    } else if (a.cols == 2) {
      const int n = angular_resolution > 0 ? angular_resolution : 4000;
      for (int i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) / n;
        eval({std::pow(1.0 - t, ip), std::pow(t, ip)});
      }
    } else {
      const int n = angular_resolution > 0 ? angular_resolution : 160;
      for (int i = 0; i <= n; ++i)
        for (int j = 0; i + j <= n; ++j) {
          const double t1 = static_cast<double>(i) / n;
          const double t2 = static_cast<double>(j) / n;
          eval({std::pow(1.0 - t1 - t2, ip), std::pow(t1, ip), std::pow(t2, ip)});
        }
    }
    // local refinement: shrink multiplicative steps around the best profile
    if (!at.empty() && a.cols > 1) {
      for (double step = 0.02; step > 1e-7; step *= 0.5) {
        bool moved = true;
        while (moved) {
          moved = false;
          for (std::size_t j = 0; j < at.size(); ++j)
            for (double dir : {1.0 + step, 1.0 / (1.0 + step)}) {
              auto f = at;
              f[j] = f[j] > 0.0 ? f[j] * dir : step;
              const double r = ndetail::ratio(a, f, p, q);
              if (r > best) {
                best = r;
                at = f;
                moved = true;
              }
            }
        }
      }
    }
  }
  return best;
}

struct BoundReport {
  std::string lower_criterion;  // functional checked against the lower constant
  std::string upper_criterion;
  double lower_value = 0.0;
  double upper_value = 0.0;
  std::optional<double> alpha;
  std::optional<double> beta;
  bool lower_ok = true;
  bool upper_ok = true;
  std::optional<double> ratio;  // estimate / principal criterion
  bool bracketed = false;       // true when at least one constant was applied
  std::string note;
};

namespace ndetail {

inline double principal_value(const CriterionSet& cs, const std::string& k) {
  if (auto it = cs.values.find(k); it != cs.values.end()) return it->second.value;
  if (auto it = cs.curves.find(k); it != cs.curves.end()) return it->second.sup.value;
  throw ParamError("criterion set is missing entry " + k);
}

}  // namespace ndetail

// Consistency of a norm estimate against the branch bracket
// alpha * criterion <= norm <= beta * criterion. The lower side checks the
// optimizer (slack tol_opt), the upper side checks the theorem against
// quadrature error (slack tol_quad). Branches without stated constants get a
// ratio-only report.
inline BoundReport bound_check(const NormEstimate& est, const CriterionSet& cs,
                               double tol_opt = 0.05, double tol_quad = 0.02) {
  BoundReport rep;
  const double v = est.lower_bound;
  if (cs.zero_operator) {
    rep.note = "zero operator";
    return rep;
  }

  std::string lower_k, upper_k, ratio_k;
  std::optional<double> alpha, beta;
  const PaperConstants& c = cs.constants;
  const double q = cs.exps.q;

  switch (cs.regime.branch) {
    case Branch::LaplaceI:
      lower_k = upper_k = ratio_k = "A_L";
      alpha = c.alpha(1);
      beta = c.beta(1);
      break;
    case Branch::LaplaceII:
      if (q == 1.0) {
        lower_k = upper_k = ratio_k = "B_p";
        alpha = beta = c.exact_factor;
      } else {
        lower_k = upper_k = ratio_k = "B_L";
        alpha = c.alpha(2);
        beta = c.beta(2);
      }
      break;
    case Branch::LaplaceIII:
      // the two constants bracket different functionals
      lower_k = "||B_q||_p'";
      upper_k = ratio_k = "B_L";
      alpha = c.alpha(3);
      beta = c.beta(3);
      break;
    case Branch::LaplaceIV:
      lower_k = "sup B_q";
      upper_k = ratio_k = "B_q'";
      alpha = c.alpha(4);
      beta = c.beta(4);
      break;
    case Branch::LaplaceV:
      lower_k = upper_k = ratio_k = "sup B_q";
      if (q == 1.0) {
        alpha = c.laplace_l1_lower;
        beta = 1.0;
      } else {
        alpha = beta = c.exact_factor;
      }
      break;
    case Branch::LaplaceExt: {
      const double p = cs.exps.p;
      if (std::isinf(p) && std::isinf(q)) {
        lower_k = upper_k = ratio_k = "C_1";
        alpha = beta = 1.0;
      } else if (std::isinf(p) && q == 1.0) {
        lower_k = upper_k = ratio_k = "C_q=1";
        alpha = beta = 1.0;
      } else if (std::isinf(q)) {
        lower_k = upper_k = ratio_k = p == 1.0 ? "C_inf" : "C_p'";
        alpha = beta = 1.0;
      } else {
        ratio_k = "C_q>1";  // two-sided constants are not stated here
      }
      break;
    }
    case Branch::StieltjesI:
      lower_k = ratio_k = "A_S";
      alpha = c.stieltjes_lower_one;
      break;
    case Branch::StieltjesII:
      if (q == 1.0) {
        lower_k = upper_k = ratio_k = "Lambda";
        alpha = beta = c.exact_factor;
      } else {
        ratio_k = "B_S";
      }
      break;
    case Branch::StieltjesIII:
      ratio_k = "B_1H";
      break;
    case Branch::StieltjesIV:
      ratio_k = "A_1S";
      break;
    case Branch::HardyI:
      ratio_k = cs.regime.kind == OperatorKind::HardyDual ? "A*" : "A";
      break;
    case Branch::HardyII:
      ratio_k = cs.regime.kind == OperatorKind::HardyDual ? "B*" : "B";
      break;
    case Branch::HardyIII:
      ratio_k = cs.regime.kind == OperatorKind::HardyDual ? "B*_q<1" : "B_q<1";
      break;
    case Branch::HardyIV:
      ratio_k = cs.regime.kind == OperatorKind::HardyDual ? "B*_1<=q" : "B_1<=q";
      break;
    default:
      rep.note = "no stated criterion on this branch";
      return rep;
  }

  if (alpha && !lower_k.empty()) {
    rep.lower_criterion = lower_k;
    rep.lower_value = ndetail::principal_value(cs, lower_k);
    rep.alpha = alpha;
    if (std::isfinite(rep.lower_value) && rep.lower_value > 0.0) {
      rep.lower_ok = v >= *alpha * rep.lower_value * (1.0 - tol_opt);
      rep.bracketed = true;
    } else {
      rep.note = "lower criterion not finite and positive; side skipped";
    }
  }
  if (beta && !upper_k.empty()) {
    rep.upper_criterion = upper_k;
    rep.upper_value = ndetail::principal_value(cs, upper_k);
    rep.beta = beta;
    if (std::isfinite(rep.upper_value) && rep.upper_value > 0.0) {
      rep.upper_ok = v <= *beta * rep.upper_value * (1.0 + tol_quad);
      rep.bracketed = true;
    } else if (rep.note.empty()) {
      rep.note = "upper criterion not finite and positive; side skipped";
    }
  }
  if (!ratio_k.empty()) {
    const double pv = ndetail::principal_value(cs, ratio_k);
    if (std::isfinite(pv) && pv > 0.0) rep.ratio = v / pv;
  }
  return rep;
}

}  // namespace lpq
