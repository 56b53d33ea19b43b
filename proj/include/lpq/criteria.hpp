#pragma once

// Criterion evaluation for the weighted transforms. Each exponent regime gets
// the moment expressions whose finiteness (and endpoint decay) decides
// boundedness and compactness; the verdict engines at the bottom read a
// CriterionSet and justify every yes/no with the criterion that licensed it.
// Values carry divergence tags, quadrature error estimates and, where a second
// computation route exists, the observed discrepancy between the two forms.

#include <algorithm>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lpq/exponents.hpp"
#include "lpq/ext.hpp"
#include "lpq/quadrature.hpp"
#include "lpq/weight.hpp"

namespace lpq {

struct CriterionValue {
  std::string name;
  double value = 0.0;
  double abs_error = 0.0;
  DivergeAt diverges = DivergeAt::None;
  std::optional<double> alt_value;         // second computation route, if any
  std::optional<double> form_discrepancy;  // relative gap between the routes
  bool infinite() const { return diverges != DivergeAt::None || std::isinf(value); }
};

struct CriterionCurve {
  std::string name;
  std::function<double(double)> point_fn;
  SupResult sup;
  LimitVerdict limit_lower;
  LimitVerdict limit_upper;
  bool infinite() const {
    return std::isinf(sup.value) || sup.at_endpoint != DivergeAt::None ||
           limit_lower.kind == LimitKind::Infinite ||
           limit_upper.kind == LimitKind::Infinite;
  }
};

struct CriterionSet {
  Regime regime;
  Exponents exps;
  PaperConstants constants;
  double c1 = 0.0;
  double c2 = inf;
  bool zero_operator = false;
  std::map<std::string, CriterionValue> values;
  std::map<std::string, CriterionCurve> curves;
  std::map<std::string, LimitVerdict> probes;
};

struct EvidenceRecord {
  std::string criterion;
  std::string detail;
  std::optional<Direction> direction;  // empty for context notes
  bool for_compactness = false;
};

struct Verdict {
  Tri bounded = Tri::Inconclusive;
  Tri compact = Tri::Inconclusive;
  std::vector<EvidenceRecord> evidence;
};

// Kernel of the transform in canonical form; the weights v, w are applied by
// the caller. The two Hardy kinds carry their power factor inside the kernel.
inline double kernel_value(OperatorKind kind, double lambda, double x, double y) {
  switch (kind) {
    case OperatorKind::Laplace:
      return std::exp(-x * xpow(y, lambda));
    case OperatorKind::Stieltjes:
      return 1.0 / (xpow(x, lambda) + xpow(y, lambda));
    case OperatorKind::Hardy:
      return y <= x ? xpow(x, -lambda) : 0.0;
    default:  // HardyDual
      return y > x ? xpow(y, -lambda) : 0.0;
  }
}

namespace cdetail {

inline double val(const MomentValue& m) { return m.infinite() ? inf : m.value; }

inline double val(const IntegralResult& I) {
  return I.infinite() || std::isinf(I.value) ? inf : I.value;
}

inline std::string fmt(double x) {
  if (std::isinf(x)) return "inf";
  std::ostringstream os;
  os.precision(9);
  os << x;
  return os.str();
}

// integrate, but a density that is +inf on a set of positive measure yields a
// divergent result instead of an exception; NaN densities still throw.
template <class F>
IntegralResult safe_integrate(F&& f, double c1, double c2, double rel_tol = 1e-8,
                              const std::vector<double>& splits = {}) {
  try {
    return integrate(std::forward<F>(f), c1, c2, rel_tol, splits);
  } catch (const qdetail::NonFinite& e) {
    if (!e.was_inf) throw;
    IntegralResult r;
    r.value = inf;
    return r;
  }
}

inline CriterionValue root_of(std::string name, const IntegralResult& I, double r,
                              double scale = 1.0) {
  CriterionValue cv;
  cv.name = std::move(name);
  cv.diverges = I.diverges;
  if (cv.diverges != DivergeAt::None || std::isinf(I.value)) {
    cv.value = inf;
    return cv;
  }
  cv.value = xpow(scale * I.value, 1.0 / r);
  if (I.value > 0.0 && std::isfinite(cv.value))
    cv.abs_error = cv.value * (I.abs_error / I.value) / r;
  return cv;
}

inline CriterionValue root_of(std::string name, const MomentValue& m, double r,
                              double scale = 1.0) {
  CriterionValue cv;
  cv.name = std::move(name);
  cv.diverges = m.diverges;
  if (m.infinite()) {
    cv.value = inf;
    return cv;
  }
  cv.value = xpow(scale * m.value, 1.0 / r);
  if (m.value > 0.0 && std::isfinite(cv.value))
    cv.abs_error = cv.value * (m.abs_error / m.value) / r;
  return cv;
}

inline double rel_gap(double x, double y) {
  if (std::isinf(x) && std::isinf(y)) return 0.0;
  if (std::isinf(x) || std::isinf(y)) return inf;
  return std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1e-300});
}

inline std::vector<double> inner_hints(const Weight& w, double c1, double c2) {
  std::vector<double> hs;
  for (double b : w.breakpoints())
    if (std::isfinite(b) && b > c1 && b < c2) hs.push_back(b);
  return hs;
}

inline std::vector<double> merge_hints(const Weight& a, const Weight& b,
                                       double c1 = 0.0, double c2 = inf) {
  auto hs = inner_hints(a, c1, c2);
  for (double x : inner_hints(b, c1, c2)) hs.push_back(x);
  std::sort(hs.begin(), hs.end());
  hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
  return hs;
}

inline std::vector<double> with_point(std::vector<double> hs, double t) {
  if (std::isfinite(t) && t > 0.0) hs.push_back(t);
  return hs;
}

inline std::vector<double> clip(const std::vector<double>& hs, double lo, double hi) {
  std::vector<double> out;
  for (double h : hs)
    if (h > lo && h < hi) out.push_back(h);
  return out;
}

template <class F>
CriterionCurve make_curve(std::string name, F fn, double c1, double c2,
                          const std::vector<double>& hints = {}, int density = 64) {
  CriterionCurve c;
  c.name = std::move(name);
  c.point_fn = fn;
  c.sup = sup_on_interval(fn, c1, c2, density, hints);
  c.limit_lower = limit_probe(fn, c1, c2, DivergeAt::Lower);
  c.limit_upper = limit_probe(fn, c1, c2, DivergeAt::Upper);
  return c;
}

inline CriterionValue make_inf(const char* name, DivergeAt d) {
  CriterionValue cv;
  cv.name = name;
  cv.value = inf;
  cv.diverges = d;
  return cv;
}

inline void merge_into(CriterionSet& dst, CriterionSet&& src) {
  for (auto& [k, x] : src.values) dst.values[k] = std::move(x);
  for (auto& [k, x] : src.curves) dst.curves[k] = std::move(x);
  for (auto& [k, x] : src.probes) dst.probes[k] = std::move(x);
}

}  // namespace cdetail

// ---------------------------------------------------------------------------
// Laplace criteria
// ---------------------------------------------------------------------------

// Boundary term of the interval criteria; identically zero on the full line.
inline CriterionValue laplace_D(const Exponents& e, const Weight& v, double c1 = 0.0,
                                double c2 = inf) {
  CriterionValue cv;
  cv.name = "D";
  if (std::isinf(c2)) return cv;
  const double pref = xpow(c2, -e.lambda / e.q);
  if (e.p == 1.0) {
    cv.value = mul0(pref, running_sup(v, c1, c2));
    return cv;
  }
  const auto V = moment_integral(v, e.p_conj, 0.0, c1, c2);
  if (V.infinite()) {
    cv.value = inf;
    cv.diverges = V.diverges;
    return cv;
  }
  cv.value = mul0(pref, xpow(V.value, 1.0 / e.p_conj));
  if (V.value > 0.0 && cv.value > 0.0)
    cv.abs_error = cv.value * (V.abs_error / V.value) / e.p_conj;
  return cv;
}

struct LaplaceA {
  CriterionCurve A;
  CriterionValue D;
};

// A(t) = (t^-lam - c2^-lam)^(1/q) * V_{c1}(t)^(1/p'), with the p = 1 reading
// of the second factor as a running sup.
inline LaplaceA laplace_A(const Exponents& e, const Weight& v, double c1 = 0.0,
                          double c2 = inf) {
  if (e.q_inf()) throw ParamError("A_L needs q < inf");
  const double lam = e.lambda, pc = e.p_conj, iq = 1.0 / e.q;
  std::function<double(double)> fn;
  if (e.p == 1.0) {
    fn = [lam, iq, c1, c2, v](double t) {
      const double win = std::isinf(c2) ? xpow(t, -lam) : xpow(t, -lam) - xpow(c2, -lam);
      return mul0(xpow(win, iq), running_sup(v, c1, t));
    };
  } else {
    fn = [lam, iq, pc, c1, c2, v](double t) {
      const double win = std::isinf(c2) ? xpow(t, -lam) : xpow(t, -lam) - xpow(c2, -lam);
      const double V = cdetail::val(moment_integral(v, pc, 0.0, c1, t, 1e-9));
      return mul0(xpow(win, iq), xpow(V, 1.0 / pc));
    };
  }
  LaplaceA out;
  out.A = cdetail::make_curve("A_L", fn, c1, c2, cdetail::inner_hints(v, c1, c2));
  out.D = laplace_D(e, v, c1, c2);
  return out;
}

struct LaplaceB {
  CriterionValue B;                       // integral criterion of the q < p range
  std::optional<CriterionValue> B_p;      // q = 1: the exact norm
  std::optional<CriterionValue> Bq_norm;  // q < 1: necessary-side p'-norm of B_q
};

// B = (int (t^-lam - c2^-lam)^(r/q) V_{c1}(t)^(r/q') v^p'(t) dt)^(1/r). On the
// full line the integrated-by-parts route (lam p'/q) int V^(r/p') t^(-lam r/q - 1)
// is computed as a cross-check; it requires v in L^p' near zero or q > 1.
inline LaplaceB laplace_B(const Exponents& e, const Weight& v, double c1 = 0.0,
                          double c2 = inf) {
  if (!e.r) throw ParamError("B_L needs q < p, both finite");
  if (e.p == 1.0) throw ParamError("B_L needs p > 1");
  const double lam = e.lambda, pc = e.p_conj, q = e.q, r = *e.r;
  const double iqc = (q - 1.0) / q;  // 1/q', continued through q <= 1
  const bool full_line = c1 == 0.0 && std::isinf(c2);
  const bool loc = v.locally_integrable(pc);
  LaplaceB out;

  if (!loc && c1 == 0.0) {
    // V_0(t) is infinite for every t, so no nontrivial test function reaches a
    // finite bound; for q < 1 the negative exponent on V would silently zero
    // the density, hence the screen instead of quadrature.
    out.B = cdetail::make_inf("B_L", DivergeAt::Lower);
  } else {
    auto hints = cdetail::inner_hints(v, c1, c2);
    auto dens = [lam, pc, q, r, iqc, c1, c2, v](double t) {
      const double vv = v(t);
      if (vv == 0.0) return 0.0;
      const double win = std::isinf(c2) ? xpow(t, -lam) : xpow(t, -lam) - xpow(c2, -lam);
      const double V = cdetail::val(moment_integral(v, pc, 0.0, c1, t, 1e-9));
      return mul0(mul0(xpow(win, r / q), xpow(V, r * iqc)), xpow(vv, pc));
    };
    out.B = cdetail::root_of("B_L", cdetail::safe_integrate(dens, c1, c2, 1e-8, hints), r);

    if (full_line && (loc || q > 1.0)) {
      auto alt = [lam, pc, q, r, v](double t) {
        const double V = cdetail::val(moment_integral(v, pc, 0.0, 0.0, t, 1e-9));
        return mul0(xpow(V, r / pc), xpow(t, -lam * r / q - 1.0));
      };
      const auto I2 = cdetail::safe_integrate(alt, 0.0, inf, 1e-8,
                                              cdetail::inner_hints(v, 0.0, inf));
      const auto second = cdetail::root_of("B_L", I2, r, lam * pc / q);
      out.B.alt_value = second.value;
      out.B.form_discrepancy = cdetail::rel_gap(out.B.value, second.value);
    }
  }

  if (q == 1.0) {
    if (full_line) {
      out.B_p = cdetail::root_of("B_p", moment_integral(v, pc, -lam * pc, 0.0, inf), pc);
    } else {
      CriterionValue bp = out.B;  // the windowed form collapses to B_p at q = 1
      bp.name = "B_p";
      out.B_p = bp;
    }
  }
  if (q < 1.0)
    out.Bq_norm =
        cdetail::root_of("||B_q||_p'", moment_integral(v, pc, -lam * pc / q, c1, c2), pc);
  return out;
}

struct LaplaceBq {
  CriterionValue Bq_sup;                   // esssup of B_q(t) = t^(-lam/q) v(t), closed form
  CriterionCurve Bbar;                     // t^(-lam/q) * esssup_{(c1,t)} v, for endpoint decay
  std::optional<CriterionValue> Bq_prime;  // q < 1 sufficient-side criterion
};

inline LaplaceBq laplace_Bq(const Exponents& e, const Weight& v, double c1 = 0.0,
                            double c2 = inf) {
  if (e.q_inf()) throw ParamError("B_q needs q < inf");
  const double lam = e.lambda, q = e.q;
  LaplaceBq out;
  out.Bq_sup.name = "sup B_q";
  out.Bq_sup.value = running_sup(v.scaled_power(-lam / q), c1, c2);

  auto fn = [lam, q, c1, v](double t) {
    return mul0(xpow(t, -lam / q), running_sup(v, c1, t));
  };
  out.Bbar = cdetail::make_curve("Bbar_q", fn, c1, c2, cdetail::inner_hints(v, c1, c2));

  if (q < 1.0) {
    const double Q = q / (1.0 - q);
    auto dens = [lam, Q, c1, c2, v](double t) {
      const double s = running_sup(v, c1, t);
      if (s == 0.0) return 0.0;
      const double win = std::isinf(c2) ? xpow(t, -lam) : xpow(t, -lam) - xpow(c2, -lam);
      return mul0(mul0(xpow(win, Q), xpow(t, -lam - 1.0)), xpow(s, Q));
    };
    out.Bq_prime = cdetail::root_of(
        "B_q'", cdetail::safe_integrate(dens, c1, c2, 1e-8, cdetail::inner_hints(v, c1, c2)),
        Q);
  }
  return out;
}

// Endpoint exponent corners (p = inf or q = inf); full line only.
inline std::map<std::string, CriterionValue> laplace_extremes(const Exponents& e,
                                                              const Weight& v) {
  if (!e.p_inf() && !e.q_inf())
    throw ParamError("extreme-exponent criteria need p = inf or q = inf");
  const double lam = e.lambda, q = e.q;
  std::map<std::string, CriterionValue> out;

  if (e.p_inf()) {
    const bool loc1 = v.locally_integrable(1.0);
    auto c_gt1 = [&](double qq) {
      if (!loc1) return cdetail::make_inf("C_q>1", DivergeAt::Lower);
      auto dens = [lam, qq, v](double t) {
        const double vv = v(t);
        if (vv == 0.0) return 0.0;
        const double V1 = cdetail::val(moment_integral(v, 1.0, 0.0, 0.0, t, 1e-9));
        return mul0(mul0(xpow(t, -lam), vv), xpow(V1, qq - 1.0));
      };
      return cdetail::root_of(
          "C_q>1", cdetail::safe_integrate(dens, 0.0, inf, 1e-8, cdetail::inner_hints(v, 0.0, inf)),
          qq);
    };
    if (e.q_inf()) {
      out["C_1"] = cdetail::root_of("C_1", moment_integral(v, 1.0, 0.0, 0.0, inf), 1.0);
    } else if (q > 1.0) {
      out["C_q>1"] = c_gt1(q);
    } else if (q == 1.0) {
      out["C_q=1"] = cdetail::root_of("C_q=1", moment_integral(v, 1.0, -lam, 0.0, inf), 1.0);
    } else {
      out["C_q>1"] = c_gt1(q);
      out["C_q<1"] = cdetail::root_of("C_q<1", moment_integral(v, 1.0, -lam / q, 0.0, inf), 1.0);
    }
    return out;
  }
  // q = inf
  if (e.p == 1.0) {
    CriterionValue cv;
    cv.name = "C_inf";
    cv.value = running_sup(v, 0.0, inf);
    out["C_inf"] = cv;
  } else {
    out["C_p'"] =
        cdetail::root_of("C_p'", moment_integral(v, e.p_conj, 0.0, 0.0, inf), e.p_conj);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stieltjes criteria
// ---------------------------------------------------------------------------

struct StieltjesA {
  std::optional<CriterionCurve> A_S;   // p > 1
  std::optional<CriterionValue> A_1S;  // p = 1
};

// A_S(t) = t^lam (int w^q (x^lam + t^lam)^-q dx)^(1/q)
//                (int v^p' (t^lam + y^lam)^-p' dy)^(1/p'); for p = 1 the inner
// factor becomes esssup_y v(y) / (t^lam + y^lam).
inline StieltjesA stieltjes_A(const Exponents& e, const Weight& v, const Weight& w) {
  if (e.p_inf() || e.q_inf()) throw ParamError("A_S needs finite p and q");
  const double lam = e.lambda, q = e.q, pc = e.p_conj;
  StieltjesA out;
  const auto vb = cdetail::inner_hints(v, 0.0, inf);
  const auto wb = cdetail::inner_hints(w, 0.0, inf);

  auto outer_w = [lam, q, w, wb](double t) {
    const double tl = xpow(t, lam);
    auto I = cdetail::safe_integrate(
        [&](double x) {
          const double ww = w(x);
          if (ww == 0.0) return 0.0;
          return xpow(ww, q) * xpow(xpow(x, lam) + tl, -q);
        },
        0.0, inf, 1e-7, cdetail::with_point(wb, t));
    return xpow(cdetail::val(I), 1.0 / q);
  };

  if (e.p > 1.0) {
    auto fn = [lam, pc, v, vb, outer_w](double t) {
      const double tl = xpow(t, lam);
      auto I = cdetail::safe_integrate(
          [&](double y) {
            const double vv = v(y);
            if (vv == 0.0) return 0.0;
            return xpow(vv, pc) * xpow(tl + xpow(y, lam), -pc);
          },
          0.0, inf, 1e-7, cdetail::with_point(vb, t));
      return mul0(mul0(tl, outer_w(t)), xpow(cdetail::val(I), 1.0 / pc));
    };
    out.A_S = cdetail::make_curve("A_S", fn, 0.0, inf, cdetail::merge_hints(v, w), 48);
  } else {
    auto fn = [lam, v, vb, outer_w](double t) {
      const double tl = xpow(t, lam);
      auto sv = sup_on_interval(
          [&](double y) { return v(y) / (tl + xpow(y, lam)); }, 0.0, inf, 32,
          cdetail::with_point(vb, t));
      const double m =
          sv.at_endpoint != DivergeAt::None || std::isinf(sv.value) ? inf : sv.value;
      return mul0(mul0(tl, outer_w(t)), m);
    };
    auto s = sup_on_interval(fn, 0.0, inf, 32, cdetail::merge_hints(v, w));
    CriterionValue cv;
    cv.name = "A_1S";
    cv.value = s.at_endpoint != DivergeAt::None ? inf : s.value;
    out.A_1S = cv;
  }
  return out;
}

struct StieltjesB {
  std::optional<CriterionValue> B_S;     // 1 < q < p
  std::optional<CriterionValue> Lambda;  // q = 1 < p: exact norm
};

inline StieltjesB stieltjes_B(const Exponents& e, const Weight& v, const Weight& w) {
  if (e.p_inf() || e.q_inf() || !(e.q >= 1.0 && e.q < e.p))
    throw ParamError("B_S / Lambda need 1 <= q < p < inf");
  const double lam = e.lambda, q = e.q, pc = e.p_conj;
  const auto vb = cdetail::inner_hints(v, 0.0, inf);
  const auto wb = cdetail::inner_hints(w, 0.0, inf);
  StieltjesB out;

  if (q == 1.0) {
    auto dens = [lam, pc, v, w, wb](double t) {
      const double vv = v(t);
      if (vv == 0.0) return 0.0;
      const double tl = xpow(t, lam);
      auto I = cdetail::safe_integrate(
          [&](double x) {
            const double ww = w(x);
            if (ww == 0.0) return 0.0;
            return ww / (xpow(x, lam) + tl);
          },
          0.0, inf, 5e-8, cdetail::with_point(wb, t));
      return xpow(mul0(cdetail::val(I), vv), pc);
    };
    out.Lambda =
        cdetail::root_of("Lambda", cdetail::safe_integrate(dens, 0.0, inf, 5e-8, vb), pc);
    return out;
  }

  const double r = *e.r, iqc = (q - 1.0) / q;
  auto dens = [lam, q, pc, r, iqc, v, w, vb, wb](double t) {
    const double vv = v(t);
    if (vv == 0.0) return 0.0;
    const double tl = xpow(t, lam);
    auto Iw = cdetail::safe_integrate(
        [&](double x) {
          const double ww = w(x);
          if (ww == 0.0) return 0.0;
          return xpow(ww, q) * xpow(xpow(x, lam) + tl, -q);
        },
        0.0, inf, 5e-8, cdetail::with_point(wb, t));
    auto Iv = cdetail::safe_integrate(
        [&](double y) {
          const double vy = v(y);
          if (vy == 0.0) return 0.0;
          return xpow(vy, pc) * xpow(1.0 + xpow(y / t, lam), -pc);
        },
        0.0, inf, 5e-8, cdetail::with_point(vb, t));
    return mul0(mul0(xpow(cdetail::val(Iw), r / q), xpow(cdetail::val(Iv), r * iqc)),
                xpow(vv, pc));
  };
  out.B_S = cdetail::root_of("B_S", cdetail::safe_integrate(dens, 0.0, inf, 5e-8, vb), r);
  return out;
}

// Hardy-form criteria of the Stieltjes transform: the pair (H, H*) with
// phi = v and psi(x) = x^-lam w(x). Fills the entries of the active branch.
inline CriterionSet stieltjes_hardy_form(const Exponents& e, const Weight& v,
                                         const Weight& w) {
  CriterionSet cs;
  cs.exps = e;
  cs.regime = classify(e, OperatorKind::Stieltjes);
  cs.constants = constants(cs.regime, e);
  cs.zero_operator = v.is_zero() || w.is_zero();
  const double lam = e.lambda, q = e.q, p = e.p, pc = e.p_conj;
  const auto hints = cdetail::merge_hints(v, w);

  switch (cs.regime.branch) {
    case Branch::StieltjesI: {
      auto fH = [lam, q, pc, v, w](double t) {
        const double V = cdetail::val(moment_integral(v, pc, 0.0, 0.0, t, 1e-9));
        const double Wc = cdetail::val(moment_integral(w, q, -lam * q, t, inf, 1e-9));
        return mul0(xpow(V, 1.0 / pc), xpow(Wc, 1.0 / q));
      };
      auto fHs = [lam, q, pc, v, w](double t) {
        const double Vc = cdetail::val(moment_integral(v, pc, -lam * pc, t, inf, 1e-9));
        const double W = cdetail::val(moment_integral(w, q, 0.0, 0.0, t, 1e-9));
        return mul0(xpow(Vc, 1.0 / pc), xpow(W, 1.0 / q));
      };
      cs.curves["A_H"] = cdetail::make_curve("A_H", fH, 0.0, inf, hints);
      cs.curves["A_H*"] = cdetail::make_curve("A_H*", fHs, 0.0, inf, hints);
      break;
    }
    case Branch::StieltjesII: {
      if (q == 1.0) break;  // the exact-norm route lives in stieltjes_B
      const double r = *e.r;
      auto densH = [lam, q, p, pc, r, v, w](double t) {
        const double wt = w(t);
        if (wt == 0.0) return 0.0;
        const double V = cdetail::val(moment_integral(v, pc, 0.0, 0.0, t, 1e-9));
        const double Wc = cdetail::val(moment_integral(w, q, -lam * q, t, inf, 1e-9));
        return mul0(mul0(xpow(V, r / pc), xpow(Wc, r / p)),
                    mul0(xpow(t, -lam * q), xpow(wt, q)));
      };
      auto densHs = [lam, q, p, pc, r, v, w](double t) {
        const double wt = w(t);
        if (wt == 0.0) return 0.0;
        const double Vc = cdetail::val(moment_integral(v, pc, -lam * pc, t, inf, 1e-9));
        const double W = cdetail::val(moment_integral(w, q, 0.0, 0.0, t, 1e-9));
        return mul0(mul0(xpow(Vc, r / pc), xpow(W, r / p)), xpow(wt, q));
      };
      auto BH =
          cdetail::root_of("B_H", cdetail::safe_integrate(densH, 0.0, inf, 1e-8, hints), r);
      auto BHs = cdetail::root_of("B_H*",
                                  cdetail::safe_integrate(densHs, 0.0, inf, 1e-8, hints), r);
      if (q > 1.0) {
        // integrated-by-parts route, scale q/p'
        const double qc = *e.q_conj;
        auto altH = [lam, q, pc, r, qc, v, w](double t) {
          const double vt = v(t);
          if (vt == 0.0) return 0.0;
          const double V = cdetail::val(moment_integral(v, pc, 0.0, 0.0, t, 1e-9));
          const double Wc = cdetail::val(moment_integral(w, q, -lam * q, t, inf, 1e-9));
          return mul0(mul0(xpow(V, r / qc), xpow(Wc, r / q)), xpow(vt, pc));
        };
        auto altHs = [lam, q, pc, r, qc, v, w](double t) {
          const double vt = v(t);
          if (vt == 0.0) return 0.0;
          const double Vc = cdetail::val(moment_integral(v, pc, -lam * pc, t, inf, 1e-9));
          const double W = cdetail::val(moment_integral(w, q, 0.0, 0.0, t, 1e-9));
          return mul0(mul0(xpow(Vc, r / qc), xpow(W, r / q)),
                      mul0(xpow(t, -lam * pc), xpow(vt, pc)));
        };
        const auto a1 = cdetail::root_of(
            "B_H", cdetail::safe_integrate(altH, 0.0, inf, 1e-8, hints), r, q / pc);
        const auto a2 = cdetail::root_of(
            "B_H*", cdetail::safe_integrate(altHs, 0.0, inf, 1e-8, hints), r, q / pc);
        BH.alt_value = a1.value;
        BH.form_discrepancy = cdetail::rel_gap(BH.value, a1.value);
        BHs.alt_value = a2.value;
        BHs.form_discrepancy = cdetail::rel_gap(BHs.value, a2.value);
      }
      cs.values["B_H"] = std::move(BH);
      cs.values["B_H*"] = std::move(BHs);
      break;
    }
    case Branch::StieltjesIII: {
      const double Q = q / (1.0 - q);
      auto densH = [lam, q, Q, v, w](double t) {
        const double wt = w(t);
        if (wt == 0.0) return 0.0;
        const double s = running_sup(v, 0.0, t);
        if (s == 0.0) return 0.0;
        const double Wc = cdetail::val(moment_integral(w, q, -lam * q, t, inf, 1e-9));
        return mul0(xpow(mul0(s, Wc), Q), mul0(xpow(t, -lam * q), xpow(wt, q)));
      };
      auto densHs = [lam, q, Q, v, w](double t) {
        const double wt = w(t);
        if (wt == 0.0) return 0.0;
        const double s = running_sup(v, t, inf);
        if (s == 0.0) return 0.0;
        const double W = cdetail::val(moment_integral(w, q, 0.0, 0.0, t, 1e-9));
        return mul0(xpow(mul0(mul0(xpow(t, -lam), s), W), Q), xpow(wt, q));
      };
      cs.values["B_1H"] = cdetail::root_of(
          "B_1H", cdetail::safe_integrate(densH, 0.0, inf, 1e-8, hints), Q);
      cs.values["B_1H*"] = cdetail::root_of(
          "B_1H*", cdetail::safe_integrate(densHs, 0.0, inf, 1e-8, hints), Q);
      break;
    }
    case Branch::StieltjesIV: {
      if (q != 1.0) break;
      // p = q = 1: sup-form pair, kept as bracketing evidence
      auto fE = [lam, v, w](double t) {
        return mul0(running_sup(v, 0.0, t),
                    cdetail::val(moment_integral(w, 1.0, -lam, t, inf, 1e-9)));
      };
      auto fEs = [lam, v, w](double t) {
        return mul0(mul0(xpow(t, -lam), running_sup(v, t, inf)),
                    cdetail::val(moment_integral(w, 1.0, 0.0, 0.0, t, 1e-9)));
      };
      cs.curves["E_H"] = cdetail::make_curve("E_H", fE, 0.0, inf, hints);
      cs.curves["E_H*"] = cdetail::make_curve("E_H*", fEs, 0.0, inf, hints);
      break;
    }
    default:
      break;
  }
  return cs;
}

struct StieltjesP1 {
  CriterionCurve S_H;
  CriterionCurve S_Hstar;
  LimitVerdict trunc_lower;  // sup over (0, a) of the a-truncated pair, a -> 0
  LimitVerdict trunc_upper;  // sup over (b, inf) of the b-truncated pair, b -> inf
};

// p = 1 <= q sup-form criteria and the vanishing-truncation probes that the
// compactness statement adds on top of finiteness.
inline StieltjesP1 stieltjes_p1(const Exponents& e, const Weight& v, const Weight& w,
                                double a = 1.0, double b = 1.0) {
  if (e.p != 1.0 || e.q_inf() || e.q < 1.0)
    throw ParamError("the sup-form pair needs p = 1 <= q < inf");
  const double lam = e.lambda, q = e.q;
  const auto hints = cdetail::merge_hints(v, w);
  StieltjesP1 out;

  auto fSH = [lam, q, v, w](double t) {
    return mul0(running_sup(v, 0.0, t),
                xpow(cdetail::val(moment_integral(w, q, -lam * q, t, inf, 1e-9)), 1.0 / q));
  };
  auto fSHs = [lam, q, v, w](double t) {
    return mul0(mul0(running_sup(v, t, inf), xpow(t, -lam)),
                xpow(cdetail::val(moment_integral(w, q, 0.0, 0.0, t, 1e-9)), 1.0 / q));
  };
  out.S_H = cdetail::make_curve("S_H", fSH, 0.0, inf, hints);
  out.S_Hstar = cdetail::make_curve("S_H*", fSHs, 0.0, inf, hints);

  auto f_lo = [lam, q, v, w, hints](double aa) {
    auto g = [&](double t) {
      const double sh =
          mul0(running_sup(v, 0.0, t),
               xpow(cdetail::val(moment_integral(w, q, -lam * q, t, aa, 1e-8)), 1.0 / q));
      const double shs =
          mul0(mul0(running_sup(v, t, aa), xpow(t, -lam)),
               xpow(cdetail::val(moment_integral(w, q, 0.0, 0.0, t, 1e-8)), 1.0 / q));
      return sh + shs;
    };
    auto s = sup_on_interval(g, 0.0, aa, 32, cdetail::clip(hints, 0.0, aa));
    return s.at_endpoint != DivergeAt::None ? inf : s.value;
  };
  out.trunc_lower = limit_probe(f_lo, 0.0, 2.0 * a, DivergeAt::Lower);

  auto f_hi = [lam, q, v, w, hints](double bb) {
    auto g = [&](double t) {
      const double sh =
          mul0(running_sup(v, bb, t),
               xpow(cdetail::val(moment_integral(w, q, -lam * q, t, inf, 1e-8)), 1.0 / q));
      const double shs =
          mul0(mul0(running_sup(v, t, inf), xpow(t, -lam)),
               xpow(cdetail::val(moment_integral(w, q, 0.0, bb, t, 1e-8)), 1.0 / q));
      return sh + shs;
    };
    auto s = sup_on_interval(g, bb, inf, 32, cdetail::clip(hints, bb, inf));
    return s.at_endpoint != DivergeAt::None ? inf : s.value;
  };
  out.trunc_upper = limit_probe(f_hi, 0.5 * b, inf, DivergeAt::Upper);
  return out;
}

// ---------------------------------------------------------------------------
// Interval Hardy criteria (generic weight pair phi, psi on <c1, c2>)
// ---------------------------------------------------------------------------

inline CriterionSet hardy_criteria(const Exponents& e, const Weight& phi,
                                   const Weight& psi, double c1 = 0.0, double c2 = inf,
                                   OperatorKind kind = OperatorKind::Hardy) {
  if (kind != OperatorKind::Hardy && kind != OperatorKind::HardyDual)
    throw ParamError("hardy_criteria expects one of the Hardy kinds");
  if (!(c1 >= 0.0) || !(c2 > c1)) throw ParamError("need 0 <= c1 < c2");

  CriterionSet cs;
  cs.exps = e;
  cs.regime = classify(e, kind);
  cs.constants = constants(cs.regime, e);
  cs.c1 = c1;
  cs.c2 = c2;
  cs.zero_operator = phi.is_zero() || psi.is_zero();
  const bool dual = kind == OperatorKind::HardyDual;
  const double q = e.q, p = e.p, pc = e.p_conj;
  const auto hints = cdetail::merge_hints(phi, psi, c1, c2);

  // moment windows; the dual form swaps which factor accumulates from c1
  auto Phi = [dual, pc, c1, c2, phi](double t) {
    return dual ? cdetail::val(moment_integral(phi, pc, 0.0, t, c2, 1e-9))
                : cdetail::val(moment_integral(phi, pc, 0.0, c1, t, 1e-9));
  };
  auto Psi = [dual, q, c1, c2, psi](double t) {
    return dual ? cdetail::val(moment_integral(psi, q, 0.0, c1, t, 1e-9))
                : cdetail::val(moment_integral(psi, q, 0.0, t, c2, 1e-9));
  };
  auto sup_phi = [dual, c1, c2, phi](double t) {
    return dual ? running_sup(phi, t, c2) : running_sup(phi, c1, t);
  };

  switch (cs.regime.branch) {
    case Branch::HardyI: {
      const char* tag = dual ? "A*" : "A";
      auto fn = [q, pc, Phi, Psi](double t) {
        return mul0(xpow(Phi(t), 1.0 / pc), xpow(Psi(t), 1.0 / q));
      };
      cs.curves[tag] = cdetail::make_curve(tag, fn, c1, c2, hints);
      break;
    }
    case Branch::HardyII: {
      const char* tag = dual ? "B*" : "B";
      const double r = *e.r;  // q = 1 included: r = p' there
      auto dens = [q, p, pc, r, psi, Phi, Psi](double t) {
        const double ps = psi(t);
        if (ps == 0.0) return 0.0;
        return mul0(mul0(xpow(Phi(t), r / pc), xpow(Psi(t), r / p)), xpow(ps, q));
      };
      cs.values[tag] =
          cdetail::root_of(tag, cdetail::safe_integrate(dens, c1, c2, 1e-8, hints), r);
      break;
    }
    case Branch::HardyIII: {
      const char* tag = dual ? "B*_q<1" : "B_q<1";
      const double Q = q / (1.0 - q);
      auto dens = [q, Q, psi, sup_phi, Psi](double t) {
        const double ps = psi(t);
        if (ps == 0.0) return 0.0;
        const double s = sup_phi(t);
        if (s == 0.0) return 0.0;
        return mul0(xpow(mul0(s, Psi(t)), Q), xpow(ps, q));
      };
      cs.values[tag] =
          cdetail::root_of(tag, cdetail::safe_integrate(dens, c1, c2, 1e-8, hints), Q);
      break;
    }
    case Branch::HardyIV: {
      const char* tag = dual ? "B*_1<=q" : "B_1<=q";
      auto fn = [q, sup_phi, Psi](double t) {
        return mul0(sup_phi(t), xpow(Psi(t), 1.0 / q));
      };
      cs.curves[tag] = cdetail::make_curve(tag, fn, c1, c2, hints);
      break;
    }
    default:
      break;  // HardyExt: nothing stated
  }
  return cs;
}

// ---------------------------------------------------------------------------
// Truncated double norm (Hilbert-Schmidt style bound for the middle piece)
// ---------------------------------------------------------------------------

struct DoubleNorm {
  CriterionValue M;
  std::optional<double> closed_bound;  // Laplace: (a^-lam / q * V_a(b)^(q/p'))^(1/q)
};

inline DoubleNorm double_norm(const Exponents& e, OperatorKind kind, const Weight& v,
                              const Weight& w, double a, double b) {
  if (kind != OperatorKind::Laplace && kind != OperatorKind::Stieltjes)
    throw ParamError("double_norm covers the Laplace and Stieltjes kinds");
  if (e.p <= 1.0 || e.p_inf() || e.q_inf())
    throw ParamError("double_norm needs 1 < p < inf and q < inf");
  if (!(a > 0.0) || !(b > a) || std::isinf(b)) throw ParamError("need 0 < a < b < inf");
  const double lam = e.lambda, q = e.q, pc = e.p_conj;
  const auto vb = cdetail::clip(cdetail::inner_hints(v, a, b), a, b);
  auto ob = cdetail::inner_hints(w, 0.0, inf);
  ob.push_back(a);
  ob.push_back(b);

  auto inner = [lam, pc, kind, a, b, v, vb](double x) {
    auto I = cdetail::safe_integrate(
        [&](double y) {
          const double vv = v(y);
          if (vv == 0.0) return 0.0;
          return xpow(vv, pc) * xpow(kernel_value(kind, lam, x, y), pc);
        },
        a, b, 1e-8, vb);
    return xpow(cdetail::val(I), 1.0 / pc);
  };
  auto dens = [q, kind, w, inner](double x) {
    double g = inner(x);
    if (kind == OperatorKind::Stieltjes) g = mul0(g, w(x));
    return xpow(g, q);
  };
  DoubleNorm out;
  out.M = cdetail::root_of("M_T", cdetail::safe_integrate(dens, 0.0, inf, 1e-7, ob), q);
  if (kind == OperatorKind::Laplace) {
    const auto V = moment_integral(v, pc, 0.0, a, b);
    out.closed_bound =
        xpow(xpow(a, -lam) / q * xpow(cdetail::val(V), q / pc), 1.0 / q);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

// Builds the complete criterion set of the active branch. For the Hardy kinds
// v plays the inner weight (phi) and w the outer one (psi); the Laplace kind
// ignores w. Interval endpoints are honored for Laplace and Hardy; the
// Stieltjes criteria are stated on the full half-line only.
inline CriterionSet build_criteria(const Exponents& e, OperatorKind kind, const Weight& v,
                                   const Weight& w, double c1 = 0.0, double c2 = inf) {
  // the x^(-lambda) kernel factor joins the outer weight (forward) or the
  // inner weight (dual) before the generic interval criteria apply
  if (kind == OperatorKind::Hardy)
    return hardy_criteria(e, v, w.scaled_power(-e.lambda), c1, c2, kind);
  if (kind == OperatorKind::HardyDual)
    return hardy_criteria(e, v.scaled_power(-e.lambda), w, c1, c2, kind);
  const bool full_line = c1 == 0.0 && std::isinf(c2);
  if (kind == OperatorKind::Stieltjes && !full_line)
    throw ParamError("the Stieltjes criteria are stated on the full half-line");
  if (!(c1 >= 0.0) || !(c2 > c1)) throw ParamError("need 0 <= c1 < c2");

  CriterionSet cs;
  cs.exps = e;
  cs.regime = classify(e, kind);
  cs.constants = constants(cs.regime, e);
  cs.c1 = c1;
  cs.c2 = c2;

  if (kind == OperatorKind::Laplace) {
    cs.zero_operator = v.is_zero();
    switch (cs.regime.branch) {
      case Branch::LaplaceI: {
        auto res = laplace_A(e, v, c1, c2);
        cs.curves["A_L"] = std::move(res.A);
        cs.values["D"] = std::move(res.D);
        break;
      }
      case Branch::LaplaceII:
      case Branch::LaplaceIII: {
        auto res = laplace_B(e, v, c1, c2);
        cs.values["B_L"] = std::move(res.B);
        if (res.B_p) cs.values["B_p"] = std::move(*res.B_p);
        if (res.Bq_norm) cs.values["||B_q||_p'"] = std::move(*res.Bq_norm);
        cs.values["D"] = laplace_D(e, v, c1, c2);
        break;
      }
      case Branch::LaplaceIV:
      case Branch::LaplaceV: {
        auto res = laplace_Bq(e, v, c1, c2);
        cs.values["sup B_q"] = std::move(res.Bq_sup);
        cs.curves["Bbar_q"] = std::move(res.Bbar);
        if (res.Bq_prime) cs.values["B_q'"] = std::move(*res.Bq_prime);
        if (cs.regime.branch == Branch::LaplaceIV)
          cs.values["D"] = laplace_D(e, v, c1, c2);
        break;
      }
      default: {  // LaplaceExt
        if (!full_line)
          throw ParamError("extreme-exponent criteria are stated on the full half-line");
        for (auto& [k, cv] : laplace_extremes(e, v)) cs.values[k] = std::move(cv);
        break;
      }
    }
    return cs;
  }

  // Stieltjes
  cs.zero_operator = v.is_zero() || w.is_zero();
  switch (cs.regime.branch) {
    case Branch::StieltjesI: {
      auto a = stieltjes_A(e, v, w);
      cs.curves["A_S"] = std::move(*a.A_S);
      cdetail::merge_into(cs, stieltjes_hardy_form(e, v, w));
      break;
    }
    case Branch::StieltjesII: {
      if (e.q == 1.0) {
        auto b = stieltjes_B(e, v, w);
        cs.values["Lambda"] = std::move(*b.Lambda);
      } else {
        cdetail::merge_into(cs, stieltjes_hardy_form(e, v, w));
        if (e.q > 1.0) {
          auto b = stieltjes_B(e, v, w);
          cs.values["B_S"] = std::move(*b.B_S);
        }
      }
      break;
    }
    case Branch::StieltjesIII: {
      cdetail::merge_into(cs, stieltjes_hardy_form(e, v, w));
      break;
    }
    case Branch::StieltjesIV: {
      auto a = stieltjes_A(e, v, w);
      cs.values["A_1S"] = std::move(*a.A_1S);
      auto p1 = stieltjes_p1(e, v, w);
      cs.curves["S_H"] = std::move(p1.S_H);
      cs.curves["S_H*"] = std::move(p1.S_Hstar);
      cs.probes["trunc_0"] = std::move(p1.trunc_lower);
      cs.probes["trunc_inf"] = std::move(p1.trunc_upper);
      if (e.q == 1.0) cdetail::merge_into(cs, stieltjes_hardy_form(e, v, w));
      break;
    }
    default:
      break;  // StieltjesExt: nothing stated
  }
  return cs;
}

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

namespace cdetail {

inline const CriterionValue& need_value(const CriterionSet& cs, const char* k) {
  auto it = cs.values.find(k);
  if (it == cs.values.end())
    throw ParamError(std::string("criterion set is missing entry ") + k);
  return it->second;
}

inline const CriterionCurve& need_curve(const CriterionSet& cs, const char* k) {
  auto it = cs.curves.find(k);
  if (it == cs.curves.end())
    throw ParamError(std::string("criterion set is missing curve ") + k);
  return it->second;
}

inline const LimitVerdict& need_probe(const CriterionSet& cs, const char* k) {
  auto it = cs.probes.find(k);
  if (it == cs.probes.end())
    throw ParamError(std::string("criterion set is missing probe ") + k);
  return it->second;
}

inline std::string describe(const CriterionValue& v) {
  std::string s = "= " + fmt(v.infinite() ? inf : v.value);
  if (v.form_discrepancy && std::isfinite(*v.form_discrepancy))
    s += ", two routes differ by " + fmt(*v.form_discrepancy);
  return s;
}

inline std::string limits_text(const CriterionCurve& c) {
  return std::string("limits (") + to_string(c.limit_lower.kind) + ", " +
         to_string(c.limit_upper.kind) + ")";
}

inline std::string describe(const CriterionCurve& c) {
  std::string s = c.infinite()
                      ? "sup = inf"
                      : "sup = " + fmt(c.sup.value) + " near t = " + fmt(c.sup.argmax);
  return s + ", " + limits_text(c);
}

// Joint endpoint classification for a family of required decays.
inline Tri limits_vanish(std::initializer_list<const LimitVerdict*> ls) {
  Tri out = Tri::Yes;
  for (const auto* l : ls) {
    if (l->kind == LimitKind::Positive || l->kind == LimitKind::Infinite) return Tri::No;
    if (l->kind == LimitKind::Inconclusive) out = Tri::Inconclusive;
  }
  return out;
}

inline Tri bounded_core(const CriterionSet& cs, std::vector<EvidenceRecord>& ev) {
  auto add = [&](const char* k, std::string detail, std::optional<Direction> d) {
    ev.push_back({k, std::move(detail), d, false});
  };
  if (cs.zero_operator) {
    add("zero", "the weight vanishes a.e., so the operator is the zero map",
        Direction::ExactNorm);
    return Tri::Yes;
  }
  const double p = cs.exps.p, q = cs.exps.q;
  const bool dual = cs.regime.kind == OperatorKind::HardyDual;

  switch (cs.regime.branch) {
    case Branch::LaplaceI: {
      const auto& A = need_curve(cs, "A_L");
      const auto& D = need_value(cs, "D");
      add("A_L", describe(A), Direction::Equivalent);
      add("D", describe(D), Direction::Equivalent);
      return !A.infinite() && !D.infinite() ? Tri::Yes : Tri::No;
    }
    case Branch::LaplaceII: {
      const auto& D = need_value(cs, "D");
      const auto& B = q == 1.0 ? need_value(cs, "B_p") : need_value(cs, "B_L");
      add(q == 1.0 ? "B_p" : "B_L", describe(B),
          q == 1.0 ? Direction::ExactNorm : Direction::Equivalent);
      add("D", describe(D), Direction::Equivalent);
      return !B.infinite() && !D.infinite() ? Tri::Yes : Tri::No;
    }
    case Branch::LaplaceIII: {
      const auto& B = need_value(cs, "B_L");
      const auto& D = need_value(cs, "D");
      const auto& N = need_value(cs, "||B_q||_p'");
      add("B_L", describe(B), Direction::Sufficient);
      add("D", describe(D), Direction::Sufficient);
      if (!B.infinite() && !D.infinite()) return Tri::Yes;
      add("||B_q||_p'", describe(N), Direction::Necessary);
      return N.infinite() ? Tri::No : Tri::Inconclusive;
    }
    case Branch::LaplaceIV: {
      const auto& Bq = need_value(cs, "B_q'");
      const auto& D = need_value(cs, "D");
      const auto& S = need_value(cs, "sup B_q");
      add("B_q'", describe(Bq), Direction::Sufficient);
      add("D", describe(D), Direction::Sufficient);
      if (!Bq.infinite() && !D.infinite()) return Tri::Yes;
      add("sup B_q", describe(S), Direction::Necessary);
      return S.infinite() ? Tri::No : Tri::Inconclusive;
    }
    case Branch::LaplaceV: {
      const auto& S = need_value(cs, "sup B_q");
      add("sup B_q", describe(S),
          q > 1.0 ? Direction::ExactNorm : Direction::Equivalent);
      return S.infinite() ? Tri::No : Tri::Yes;
    }
    case Branch::LaplaceExt: {
      if (std::isinf(p)) {
        if (std::isinf(q)) {
          const auto& C = need_value(cs, "C_1");
          add("C_1", describe(C), Direction::ExactNorm);
          return C.infinite() ? Tri::No : Tri::Yes;
        }
        if (q > 1.0) {
          const auto& C = need_value(cs, "C_q>1");
          add("C_q>1", describe(C), Direction::Equivalent);
          return C.infinite() ? Tri::No : Tri::Yes;
        }
        if (q == 1.0) {
          const auto& C = need_value(cs, "C_q=1");
          add("C_q=1", describe(C), Direction::ExactNorm);
          return C.infinite() ? Tri::No : Tri::Yes;
        }
        const auto& Cs = need_value(cs, "C_q>1");
        const auto& Cn = need_value(cs, "C_q<1");
        add("C_q>1", describe(Cs), Direction::Sufficient);
        if (!Cs.infinite()) return Tri::Yes;
        add("C_q<1", describe(Cn), Direction::Necessary);
        return Cn.infinite() ? Tri::No : Tri::Inconclusive;
      }
      if (p == 1.0) {
        const auto& C = need_value(cs, "C_inf");
        add("C_inf", describe(C), Direction::ExactNorm);
        return C.infinite() ? Tri::No : Tri::Yes;
      }
      const auto& C = need_value(cs, "C_p'");
      add("C_p'", describe(C), Direction::ExactNorm);
      return C.infinite() ? Tri::No : Tri::Yes;
    }
    case Branch::StieltjesI: {
      const auto& AH = need_curve(cs, "A_H");
      const auto& AHs = need_curve(cs, "A_H*");
      add("A_H", describe(AH), Direction::Equivalent);
      add("A_H*", describe(AHs), Direction::Equivalent);
      if (auto it = cs.curves.find("A_S"); it != cs.curves.end())
        add("A_S", describe(it->second), Direction::Equivalent);
      return !AH.infinite() && !AHs.infinite() ? Tri::Yes : Tri::No;
    }
    case Branch::StieltjesII: {
      if (q == 1.0) {
        const auto& L = need_value(cs, "Lambda");
        add("Lambda", describe(L), Direction::ExactNorm);
        return L.infinite() ? Tri::No : Tri::Yes;
      }
      const auto& BH = need_value(cs, "B_H");
      const auto& BHs = need_value(cs, "B_H*");
      add("B_H", describe(BH), Direction::Equivalent);
      add("B_H*", describe(BHs), Direction::Equivalent);
      if (auto it = cs.values.find("B_S"); it != cs.values.end())
        add("B_S", describe(it->second), Direction::Equivalent);
      return !BH.infinite() && !BHs.infinite() ? Tri::Yes : Tri::No;
    }
    case Branch::StieltjesIII: {
      const auto& BH = need_value(cs, "B_1H");
      const auto& BHs = need_value(cs, "B_1H*");
      add("B_1H", describe(BH), Direction::Equivalent);
      add("B_1H*", describe(BHs), Direction::Equivalent);
      return !BH.infinite() && !BHs.infinite() ? Tri::Yes : Tri::No;
    }
    case Branch::StieltjesIV: {
      const auto& A1 = need_value(cs, "A_1S");
      add("A_1S", describe(A1), Direction::Equivalent);
      return A1.infinite() ? Tri::No : Tri::Yes;
    }
    case Branch::StieltjesExt: {
      add("none", "p = inf or q = inf carries no stated two-weight criterion",
          std::nullopt);
      return Tri::Inconclusive;
    }
    case Branch::HardyI: {
      const char* k = dual ? "A*" : "A";
      const auto& A = need_curve(cs, k);
      add(k, describe(A), Direction::Equivalent);
      return A.infinite() ? Tri::No : Tri::Yes;
    }
    case Branch::HardyII: {
      const char* k = dual ? "B*" : "B";
      const auto& B = need_value(cs, k);
      if (q == 1.0) {
        if (!dual) {
          add(k, describe(B) + "; q = 1 boundedness is uncharacterized forward",
              std::nullopt);
          return Tri::Inconclusive;
        }
        if (!B.infinite()) {
          add(k, describe(B) + "; the finite compactness criterion implies boundedness",
              Direction::Sufficient);
          return Tri::Yes;
        }
        add(k, describe(B) + "; only the compactness side is characterized at q = 1",
            std::nullopt);
        return Tri::Inconclusive;
      }
      add(k, describe(B), Direction::Equivalent);
      return B.infinite() ? Tri::No : Tri::Yes;
    }
    case Branch::HardyIII: {
      const char* k = dual ? "B*_q<1" : "B_q<1";
      const auto& B = need_value(cs, k);
      add(k, describe(B), Direction::Equivalent);
      return B.infinite() ? Tri::No : Tri::Yes;
    }
    case Branch::HardyIV: {
      const char* k = dual ? "B*_1<=q" : "B_1<=q";
      const auto& B = need_curve(cs, k);
      add(k, describe(B), Direction::Equivalent);
      return B.infinite() ? Tri::No : Tri::Yes;
    }
    default: {  // HardyExt
      add("none", "p = inf or q = inf carries no stated criterion", std::nullopt);
      return Tri::Inconclusive;
    }
  }
}

inline Tri compact_core(const CriterionSet& cs, Tri bounded,
                        std::vector<EvidenceRecord>& ev) {
  auto add = [&](const char* k, std::string detail, std::optional<Direction> d) {
    ev.push_back({k, std::move(detail), d, true});
  };
  if (cs.zero_operator) {
    add("zero", "the zero operator is compact", Direction::ExactNorm);
    return Tri::Yes;
  }
  if (bounded == Tri::No) {
    add("bounded", "not bounded, hence not compact", Direction::Necessary);
    return Tri::No;
  }
  const double p = cs.exps.p, q = cs.exps.q;
  const bool dual = cs.regime.kind == OperatorKind::HardyDual;

  switch (cs.regime.branch) {
    case Branch::LaplaceI: {
      const auto& A = need_curve(cs, "A_L");
      add("A_L", limits_text(A), Direction::Equivalent);
      return limits_vanish({&A.limit_lower, &A.limit_upper});
    }
    case Branch::LaplaceII: {
      add(q == 1.0 ? "B_p" : "B_L", "finite", Direction::Equivalent);
      return Tri::Yes;
    }
    case Branch::LaplaceIII: {
      const auto& B = need_value(cs, "B_L");
      const auto& D = need_value(cs, "D");
      if (!B.infinite() && !D.infinite()) {
        add("B_L", "finite", Direction::Sufficient);
        return Tri::Yes;
      }
      const auto& N = need_value(cs, "||B_q||_p'");
      add("||B_q||_p'", describe(N), Direction::Necessary);
      return N.infinite() ? Tri::No : Tri::Inconclusive;
    }
    case Branch::LaplaceIV: {
      const auto& Bq = need_value(cs, "B_q'");
      const auto& D = need_value(cs, "D");
      if (!Bq.infinite() && !D.infinite()) {
        add("B_q'", "finite", Direction::Sufficient);
        return Tri::Yes;
      }
      const auto& S = need_value(cs, "sup B_q");
      add("sup B_q", describe(S), Direction::Necessary);
      return S.infinite() ? Tri::No : Tri::Inconclusive;
    }
    case Branch::LaplaceV: {
      const auto& Bb = need_curve(cs, "Bbar_q");
      add("Bbar_q", limits_text(Bb), Direction::Equivalent);
      return limits_vanish({&Bb.limit_lower, &Bb.limit_upper});
    }
    case Branch::LaplaceExt: {
      if (std::isinf(p)) {
        if (std::isinf(q)) {
          add("C_1", "finite", Direction::Equivalent);
          return Tri::Yes;
        }
        if (q >= 1.0) {
          add(q > 1.0 ? "C_q>1" : "C_q=1", "finite", Direction::Equivalent);
          return Tri::Yes;
        }
        const auto& Cs = need_value(cs, "C_q>1");
        const auto& Cn = need_value(cs, "C_q<1");
        if (!Cs.infinite()) {
          add("C_q>1", "finite", Direction::Sufficient);
          return Tri::Yes;
        }
        add("C_q<1", describe(Cn), Direction::Necessary);
        return Cn.infinite() ? Tri::No : Tri::Inconclusive;
      }
      if (p == 1.0) {
        add("C_inf",
            "a map from the integrable class into the sup-norm space is never compact "
            "for a nonvanishing weight",
            Direction::Necessary);
        return Tri::No;
      }
      add("C_p'", "finite", Direction::Equivalent);
      return Tri::Yes;
    }
    case Branch::StieltjesI: {
      const auto& AH = need_curve(cs, "A_H");
      const auto& AHs = need_curve(cs, "A_H*");
      add("A_H", limits_text(AH), Direction::Equivalent);
      add("A_H*", limits_text(AHs), Direction::Equivalent);
      return limits_vanish(
          {&AH.limit_lower, &AH.limit_upper, &AHs.limit_lower, &AHs.limit_upper});
    }
    case Branch::StieltjesII: {
      add(q == 1.0 ? "Lambda" : "B_H+B_H*", "finite", Direction::Equivalent);
      return Tri::Yes;
    }
    case Branch::StieltjesIII: {
      add("B_1H+B_1H*", "finite", Direction::Equivalent);
      return Tri::Yes;
    }
    case Branch::StieltjesIV: {
      const auto& SH = need_curve(cs, "S_H");
      const auto& SHs = need_curve(cs, "S_H*");
      if (SH.infinite() || SHs.infinite()) {
        add("S_H+S_H*", describe(SH) + " / " + describe(SHs), Direction::Equivalent);
        return Tri::No;
      }
      const auto& t0 = need_probe(cs, "trunc_0");
      const auto& ti = need_probe(cs, "trunc_inf");
      add("S_H+S_H*",
          std::string("finite; truncated sups (") + to_string(t0.kind) + ", " +
              to_string(ti.kind) + ")",
          Direction::Equivalent);
      return limits_vanish({&t0, &ti});
    }
    case Branch::StieltjesExt: {
      add("none", "p = inf or q = inf carries no stated two-weight criterion",
          std::nullopt);
      return Tri::Inconclusive;
    }
    case Branch::HardyI: {
      const char* k = dual ? "A*" : "A";
      const auto& A = need_curve(cs, k);
      add(k, limits_text(A), Direction::Equivalent);
      return limits_vanish({&A.limit_lower, &A.limit_upper});
    }
    case Branch::HardyII: {
      const char* k = dual ? "B*" : "B";
      const auto& B = need_value(cs, k);
      if (q > 1.0 || (dual && q == 1.0)) {
        add(k, describe(B), Direction::Equivalent);
        return B.infinite() ? Tri::No : Tri::Yes;
      }
      add(k, describe(B) + "; compactness is unstated on this sub-branch",
          std::nullopt);
      return Tri::Inconclusive;
    }
    case Branch::HardyIII:
    case Branch::HardyIV: {
      add("branch", "compactness is not characterized here", std::nullopt);
      return Tri::Inconclusive;
    }
    default: {  // HardyExt
      add("none", "p = inf or q = inf carries no stated criterion", std::nullopt);
      return Tri::Inconclusive;
    }
  }
}

}  // namespace cdetail

inline Verdict boundedness_verdict(const CriterionSet& cs) {
  Verdict v;
  v.bounded = cdetail::bounded_core(cs, v.evidence);
  return v;
}

// Full verdict: compactness plus the boundedness context it rests on.
inline Verdict compactness_verdict(const CriterionSet& cs) {
  Verdict v;
  v.bounded = cdetail::bounded_core(cs, v.evidence);
  v.compact = cdetail::compact_core(cs, v.bounded, v.evidence);
  if (v.compact == Tri::Yes && v.bounded != Tri::Yes) {
    v.bounded = Tri::Yes;
    v.evidence.push_back(
        {"compact", "compactness implies boundedness", Direction::Sufficient, false});
  }
  return v;
}

}  // namespace lpq
