#pragma once

// Constructive compactness probes. Truncating the source variable to [0, a]
// and [b, inf) splits the transform into three pieces whose norms control the
// distance to a compact operator; if both tail norms vanish along a geometric
// sequence of cut points, the discrete evidence matches a compact verdict.
// At p = q = 2 the singular value profile of the finite section gives an
// additional signature. None of this overrides the analytic verdicts: a
// finite section is always finite-rank, so fast spectral decay proves
// nothing about the operator itself.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lpq/criteria.hpp"
#include "lpq/discretize.hpp"
#include "lpq/exponents.hpp"
#include "lpq/ext.hpp"
#include "lpq/normest.hpp"
#include "lpq/quadrature.hpp"
#include "lpq/weight.hpp"

namespace lpq {

struct TailDecayReport {
  std::vector<double> a_sequence;  // lower cut points 10^-k
  std::vector<double> b_sequence;  // upper cut points 10^k
  std::vector<double> lower_norms;  // estimates for the source window [0, a_k]
  std::vector<double> upper_norms;  // estimates for the source window [b_k, inf)
  // analytic tail bounds, filled on the branch where the sufficiency proof
  // gives them in closed form: 2 b1 sup_{t <= a} t^(-l/q) V_0(t)^(1/p') and
  // b1 sup_{t >= b} t^(-l/q) V_b(t)^(1/p')
  std::vector<double> lower_bounds;
  std::vector<double> upper_bounds;
  LimitVerdict lower_verdict;
  LimitVerdict upper_verdict;
};

namespace dgdetail {

// Classifies a sampled tail sequence. The samples arrive ordered toward the
// endpoint (a decreasing or b increasing); the decision mirrors limit_probe:
// a clear log-log slope decides, a settled flat sequence counts as Positive,
// anything else stays Inconclusive.
inline LimitVerdict classify_tail(const std::vector<double>& xs,
                                  const std::vector<double>& vals, bool toward_zero) {
  LimitVerdict lv;
  for (std::size_t i = 0; i < xs.size(); ++i) lv.samples.push_back({xs[i], vals[i]});
  if (vals.empty()) return lv;
  if (vals.back() == 0.0) {
    lv.kind = LimitKind::Zero;
    return lv;
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(vals[i] > 0.0)) continue;
    const double lx = std::log(xs[i]), ly = std::log(vals[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return lv;
  const double den = static_cast<double>(n) * sxx - sx * sx;
  const double slope = den != 0.0 ? (static_cast<double>(n) * sxy - sx * sy) / den : 0.0;
  lv.fitted_exponent = slope;
  const double decay = toward_zero ? slope : -slope;
  if (decay > 0.05) {
    lv.kind = LimitKind::Zero;
  } else if (decay < -0.05) {
    lv.kind = LimitKind::Infinite;
  } else {
    const double u = vals[vals.size() - 2], w = vals.back();
    if (std::abs(u - w) <= 0.15 * std::max(u, w)) {
      lv.kind = LimitKind::Positive;
      lv.c = w;
    }
  }
  return lv;
}

}  // namespace dgdetail

inline TailDecayReport tail_decay(OperatorKind kind, const Exponents& e, const Weight& v,
                                  const Weight& w, int splits = 3,
                                  const Grid& grid = log_grid(),
                                  const NormOptions& opts = {}) {
  if (splits < 1) throw ParamError("tail decay needs at least one split");
  const double a_last = std::pow(10.0, -splits);
  const double b_last = std::pow(10.0, splits);
  if (a_last < grid.t_min * (1.0 - 1e-12) || b_last > grid.t_max * (1.0 + 1e-12))
    throw ParamError("grid span does not contain the split points; extend the grid");

  // one grid for the whole sequence, so the decay reflects the truncation
  // windows rather than changing resolution
  auto op = discretize(e, kind, v, w, grid, grid);

  TailDecayReport rep;
  for (int k = 1; k <= splits; ++k) {
    const double a = std::pow(10.0, -k);
    const double b = std::pow(10.0, k);
    rep.a_sequence.push_back(a);
    rep.b_sequence.push_back(b);
    rep.lower_norms.push_back(norm_pq(truncate(op, {0.0, a}), opts).lower_bound);
    rep.upper_norms.push_back(norm_pq(truncate(op, {b, inf}), opts).lower_bound);
  }

  const Regime reg = classify(e, kind);
  if (reg.branch == Branch::LaplaceI) {
    const double b1 = constants(reg, e).beta(1);
    const double lam = e.lambda, q = e.q, pc = e.p_conj;
    auto hints = cdetail::inner_hints(v, 0.0, inf);
    for (int k = 1; k <= splits; ++k) {
      const double a = std::pow(10.0, -k);
      const double b = std::pow(10.0, k);
      auto head = [&](double t) {
        if (!(t > 0.0)) return 0.0;
        return xpow(t, -lam / q) *
               xpow(cdetail::val(moment_integral(v, pc, 0.0, 0.0, t)), 1.0 / pc);
      };
      auto tail = [&](double t) {
        if (!(t > b)) return 0.0;
        return xpow(t, -lam / q) *
               xpow(cdetail::val(moment_integral(v, pc, 0.0, b, t)), 1.0 / pc);
      };
      auto sh = sup_on_interval(head, 0.0, a, 32, cdetail::clip(hints, 0.0, a));
      auto st = sup_on_interval(tail, b, inf, 32, cdetail::clip(hints, b, inf));
      rep.lower_bounds.push_back(2.0 * b1 * sh.value);
      rep.upper_bounds.push_back(b1 * st.value);
    }
  }

  rep.lower_verdict = dgdetail::classify_tail(rep.a_sequence, rep.lower_norms, true);
  rep.upper_verdict = dgdetail::classify_tail(rep.b_sequence, rep.upper_norms, false);
  return rep;
}

struct SpectrumReport {
  std::vector<double> singular_values;  // non-increasing
  double decay_exponent = 0.0;          // slope of ln sigma_k against ln k

  // smallest k with sigma_{k+1} < eps * sigma_1, or the full count
  std::size_t rank_eps(double eps = 1e-3) const {
    if (singular_values.empty()) return 0;
    const double cut = eps * singular_values.front();
    for (std::size_t k = 0; k + 1 < singular_values.size(); ++k)
      if (singular_values[k + 1] < cut) return k + 1;
    return singular_values.size();
  }
};

inline SpectrumReport spectrum(const DiscreteOp& op, int k = 16) {
  if (!(op.e.p == 2.0 && op.e.q == 2.0))
    throw ParamError("singular values are computed in the p = q = 2 setting");
  const Matrix& m = op.scaled;
  const std::size_t kk =
      std::min<std::size_t>(k < 0 ? 0 : static_cast<std::size_t>(k),
                            std::min(m.rows, m.cols));

  auto l2 = [](const std::vector<double>& x) { return vec_norm(x, 2.0); };
  SpectrumReport rep;
  std::vector<std::vector<double>> basis;  // converged right singular vectors
  std::mt19937_64 rng(0x5EEDu);
  auto project = [&](std::vector<double>& x) {
    for (const auto& b : basis) {
      double d = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) d += x[j] * b[j];
      for (std::size_t j = 0; j < x.size(); ++j) x[j] -= d * b[j];
    }
  };

  for (std::size_t i = 0; i < kk; ++i) {
    std::vector<double> x(m.cols, 0.0);
    double xn = 0.0;
    for (int attempt = 0; attempt < 8 && xn < 1e-12; ++attempt) {
      if (i == 0 && attempt == 0) {
        std::fill(x.begin(), x.end(), 1.0);
      } else {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (auto& t : x) t = u(rng);
      }
      project(x);
      xn = l2(x);
    }
    if (xn < 1e-12) {
      rep.singular_values.push_back(0.0);
      continue;
    }
    for (auto& t : x) t /= xn;

    // power iteration on the normal matrix, deflated against the converged
    // vectors each step; the top value gets the tight tolerance because the
    // norm invariant is checked against it
    const double tol = i == 0 ? 1e-10 : 1e-8;
    const int cap = i == 0 ? 5000 : 2000;
    double sigma = l2(matvec(m, x));
    for (int it = 0; it < cap; ++it) {
      auto z = matvec_t(m, matvec(m, x));
      project(z);
      const double zn = l2(z);
      if (zn == 0.0) break;
      for (auto& t : z) t /= zn;
      x = std::move(z);
      const double s = l2(matvec(m, x));
      const bool settled = std::abs(s - sigma) <= tol * std::max(s, 1e-300);
      sigma = s;
      if (settled) break;
    }
    if (!rep.singular_values.empty())
      sigma = std::min(sigma, rep.singular_values.back());
    rep.singular_values.push_back(sigma);
    basis.push_back(std::move(x));
  }

  // fitted decay over the values above the noise floor
  if (!rep.singular_values.empty()) {
    const double noise = 1e-14 * rep.singular_values.front();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < rep.singular_values.size(); ++i) {
      if (!(rep.singular_values[i] > noise)) continue;
      const double lx = std::log(static_cast<double>(i + 1));
      const double ly = std::log(rep.singular_values[i]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++n;
    }
    const double den = static_cast<double>(n) * sxx - sx * sx;
    if (n >= 2 && den != 0.0)
      rep.decay_exponent = (static_cast<double>(n) * sxy - sx * sy) / den;
  }
  return rep;
}

enum class Severity { Info, Warning, Error };

inline const char* to_string(Severity s) {
  switch (s) {
    case Severity::Info: return "info";
    case Severity::Warning: return "warning";
    default: return "error";
  }
}

struct ConsistencyNote {
  Severity severity = Severity::Info;
  std::string message;
};

struct ConsistencyReport {
  std::vector<ConsistencyNote> notes;
  Severity worst() const {
    Severity w = Severity::Info;
    for (const auto& n : notes)
      if (static_cast<int>(n.severity) > static_cast<int>(w)) w = n.severity;
    return w;
  }
  bool clean() const { return worst() == Severity::Info; }
};

// Flags disagreements between the analytic verdict and the discrete evidence.
// The analytic side always wins; numeric signatures can only raise flags.
inline ConsistencyReport cross_validate(const Verdict& analytic, const TailDecayReport& tails,
                                        const SpectrumReport& sv) {
  ConsistencyReport rep;
  auto add = [&](Severity s, std::string m) { rep.notes.push_back({s, std::move(m)}); };
  const bool cyes = analytic.compact == Tri::Yes;
  const bool cno = analytic.compact == Tri::No;

  auto side = [&](const LimitVerdict& lv, const char* which) {
    if (!cyes) return;
    if (lv.kind == LimitKind::Positive || lv.kind == LimitKind::Infinite)
      add(Severity::Error, std::string("analytic verdict is compact but the ") + which +
                               " tail norms do not vanish");
    else if (lv.kind == LimitKind::Inconclusive)
      add(Severity::Warning, std::string("analytic verdict is compact but the ") + which +
                                 " tail norms are inconclusive");
  };
  side(tails.lower_verdict, "lower");
  side(tails.upper_verdict, "upper");

  if (cno && tails.lower_verdict.kind == LimitKind::Zero &&
      tails.upper_verdict.kind == LimitKind::Zero)
    add(Severity::Warning,
        "analytic verdict is not compact but both truncation tails vanish on the sampled "
        "range");

  if (sv.singular_values.size() >= 8) {
    const double s1 = sv.singular_values.front();
    const double last = sv.singular_values.back();
    if (cyes && s1 > 0.0 && last > 0.5 * s1)
      add(Severity::Warning,
          "analytic verdict is compact but the singular values of the finite section "
          "plateau");
    if (cno && s1 > 0.0 && last < 1e-3 * s1)
      add(Severity::Info,
          "singular values of the finite section decay fast; a finite section is always "
          "finite-rank, so this is a signature, not evidence against the verdict");
  }

  if (rep.notes.empty())
    add(Severity::Info, "analytic verdict and discrete evidence agree");
  return rep;
}

}  // namespace lpq
