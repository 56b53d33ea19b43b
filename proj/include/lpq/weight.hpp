#pragma once

// Weight functions on (0, inf): piecewise c * t^a * ln(1+t)^l on half-open
// intervals, plus tabulated weights normalized at construction to power-law
// pieces (linear interpolation in log-log, zero outside the table).
//
// Moment integrals over pieces with l = 0 are closed forms; l != 0 pieces
// delegate to the adaptive quadrature. Divergence at 0 or inf is decided
// analytically from the piece exponents and reported as a tagged +inf,
// never as an error.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lpq/ext.hpp"
#include "lpq/quadrature.hpp"

namespace lpq {

struct Piece {
  double from = 0.0;
  double to = inf;  // half-open [from, to)
  double c = 0.0;
  double a = 0.0;  // power exponent
  double l = 0.0;  // exponent on ln(1+t)
};

struct MomentValue {
  double value = 0.0;
  double abs_error = 0.0;
  DivergeAt diverges = DivergeAt::None;
  bool infinite() const { return diverges != DivergeAt::None; }
};

namespace wdetail {

inline double piece_eval(const Piece& p, double t) {
  if (p.c == 0.0) return 0.0;
  double y = p.c * std::pow(t, p.a);
  if (p.l != 0.0) y *= std::pow(std::log1p(t), p.l);
  return y;
}

// Limit of c t^a ln(1+t)^l as t -> 0+ (local behaviour t^{a+l}).
inline double limit_at_zero(const Piece& p) {
  if (p.c == 0.0) return 0.0;
  const double k = p.a + p.l;
  if (k > 0.0) return 0.0;
  if (k == 0.0) return p.c;
  return inf;
}

// Limit as t -> inf (power dominates, then the log factor).
inline double limit_at_inf(const Piece& p) {
  if (p.c == 0.0) return 0.0;
  if (p.a > 0.0) return inf;
  if (p.a < 0.0) return 0.0;
  if (p.l > 0.0) return inf;
  if (p.l < 0.0) return 0.0;
  return p.c;
}

// Sign of the derivative of c t^a ln(1+t)^l equals the sign of
// h(t) = a (1+t) ln(1+t) + l t. A single interior maximum exists exactly
// when a < 0 < l and a + l > 0; its location is the positive root of h.
inline double critical_point(const Piece& p) {
  const double a = p.a, l = p.l;
  auto h = [&](double t) { return a * (1.0 + t) * std::log1p(t) + l * t; };
  double tr = 1.0;
  int guard = 0;
  while (h(tr) > 0.0 && ++guard < 1100) tr *= 2.0;
  double tl = tr * 0.5;
  guard = 0;
  while (h(tl) <= 0.0 && ++guard < 1100) tl *= 0.5;
  for (int i = 0; i < 200 && (tr - tl) > 1e-14 * tr; ++i) {
    const double m = 0.5 * (tl + tr);
    (h(m) > 0.0 ? tl : tr) = m;
  }
  return 0.5 * (tl + tr);
}

// Supremum of a piece over the open segment (u, w) inside its own interval,
// endpoint limits included.
inline double piece_sup(const Piece& p, double u, double w) {
  if (p.c == 0.0) return 0.0;
  double m = 0.0;
  m = std::max(m, u == 0.0 ? limit_at_zero(p) : piece_eval(p, u));
  if (std::isinf(m)) return inf;
  m = std::max(m, std::isinf(w) ? limit_at_inf(p) : piece_eval(p, w));
  if (std::isinf(m)) return inf;
  if (p.a < 0.0 && p.l > 0.0 && p.a + p.l > 0.0) {
    const double ts = critical_point(p);
    if (ts > u && ts < w) m = std::max(m, piece_eval(p, ts));
  }
  return m;
}

}  // namespace wdetail

class Weight {
 public:
  static Weight from_pieces(std::vector<Piece> ps) {
    for (const auto& p : ps) {
      if (std::isnan(p.from) || std::isnan(p.to) || p.from < 0.0 || !(p.to > p.from))
        throw ParamError("weight piece: need 0 <= from < to");
      if (!(p.c >= 0.0) || !std::isfinite(p.c))
        throw ParamError("weight piece: coefficient must be finite and >= 0");
      if (!std::isfinite(p.a) || !std::isfinite(p.l))
        throw ParamError("weight piece: exponents must be finite");
    }
    std::sort(ps.begin(), ps.end(),
              [](const Piece& x, const Piece& y) { return x.from < y.from; });
    for (std::size_t i = 0; i + 1 < ps.size(); ++i)
      if (ps[i].to > ps[i + 1].from)
        throw ParamError("weight pieces overlap");
    Weight w;
    double cursor = 0.0;
    for (const auto& p : ps) {
      if (p.from > cursor) w.pieces_.push_back({cursor, p.from, 0.0, 0.0, 0.0});
      if (p.c == 0.0)
        w.pieces_.push_back({p.from, p.to, 0.0, 0.0, 0.0});
      else
        w.pieces_.push_back(p);
      cursor = p.to;
    }
    if (!std::isinf(cursor)) w.pieces_.push_back({cursor, inf, 0.0, 0.0, 0.0});
    // merge adjacent zero pieces
    std::vector<Piece> merged;
    for (const auto& p : w.pieces_) {
      if (!merged.empty() && merged.back().c == 0.0 && p.c == 0.0)
        merged.back().to = p.to;
      else
        merged.push_back(p);
    }
    w.pieces_ = std::move(merged);
    return w;
  }

  static Weight from_table(const std::vector<std::pair<double, double>>& table) {
    if (table.size() < 2)
      throw ParamError("tabulated weight needs at least two samples");
    std::vector<Piece> ps;
    for (std::size_t i = 0; i < table.size(); ++i) {
      const auto& [t, v] = table[i];
      if (!(t > 0.0) || !std::isfinite(t))
        throw ParamError("tabulated weight: abscissae must be positive finite");
      if (!(v >= 0.0) || !std::isfinite(v))
        throw ParamError("tabulated weight: values must be finite and >= 0");
      if (i > 0 && !(t > table[i - 1].first))
        throw ParamError("tabulated weight: abscissae must be strictly increasing");
    }
    for (std::size_t i = 0; i + 1 < table.size(); ++i) {
      const auto& [t0, v0] = table[i];
      const auto& [t1, v1] = table[i + 1];
      if (v0 > 0.0 && v1 > 0.0) {
        const double m = std::log(v1 / v0) / std::log(t1 / t0);
        const double c = std::exp(std::log(v0) - m * std::log(t0));
        ps.push_back({t0, t1, c, m, 0.0});
      } else {
        ps.push_back({t0, t1, 0.0, 0.0, 0.0});
      }
    }
    return from_pieces(std::move(ps));
  }

  static Weight indicator(double a, double b) {
    return from_pieces({{a, b, 1.0, 0.0, 0.0}});
  }
  static Weight power(double c, double a) {
    return from_pieces({{0.0, inf, c, a, 0.0}});
  }
  static Weight one() { return power(1.0, 0.0); }
  static Weight zero() { return from_pieces({}); }

  const std::vector<Piece>& pieces() const { return pieces_; }

  // Interior breakpoints (finite, positive): quadrature split hints.
  std::vector<double> breakpoints() const {
    std::vector<double> bs;
    for (const auto& p : pieces_)
      if (p.from > 0.0 && std::isfinite(p.from)) bs.push_back(p.from);
    return bs;
  }

  double operator()(double t) const { return eval(t); }

  double eval(double t) const {
    if (!(t > 0.0) || std::isnan(t))
      throw ParamError("weight eval: t must be positive");
    return wdetail::piece_eval(piece_at(t), t);
  }

  // Multiplies the weight pointwise by t^mu (exact on the piece grammar).
  Weight scaled_power(double mu) const {
    Weight w = *this;
    for (auto& p : w.pieces_)
      if (p.c != 0.0) p.a += mu;
    return w;
  }

  // Whether integral of v^s over (0, T) is finite for finite T.
  bool locally_integrable(double s) const {
    const Piece& p0 = pieces_.front();
    if (p0.c == 0.0) return true;
    return (p0.a + p0.l) * s > -1.0;
  }

  bool is_zero() const {
    for (const auto& p : pieces_)
      if (p.c != 0.0) return false;
    return true;
  }

 private:
  const Piece& piece_at(double t) const {
    auto it = std::upper_bound(
        pieces_.begin(), pieces_.end(), t,
        [](double x, const Piece& p) { return x < p.from; });
    return *(it - 1);
  }

  std::vector<Piece> pieces_;
};

// Essential supremum of wt over the open interval (lo, hi), hi may be inf.
// For this grammar the essential sup equals the pointwise sup of the
// monotone(-envelope) pieces, computed in closed form.
inline double running_sup(const Weight& wt, double lo, double hi) {
  if (std::isnan(lo) || std::isnan(hi) || lo < 0.0 || !(hi > lo))
    throw ParamError("running_sup: need 0 <= lo < hi");
  double m = 0.0;
  for (const auto& p : wt.pieces()) {
    const double u = std::max(lo, p.from);
    const double w = std::min(hi, p.to);
    if (!(w > u)) continue;
    m = std::max(m, wdetail::piece_sup(p, u, w));
    if (std::isinf(m)) return inf;
  }
  return m;
}

// Integral of wt(t)^s * t^m over (c1, c2). Closed form on l = 0 pieces;
// l != 0 pieces go through the adaptive quadrature. Divergence at either
// end is decided from the exponents and reported as tagged +inf.
inline MomentValue moment_integral(const Weight& wt, double s, double m,
                                   double c1, double c2,
                                   double rel_tol = 1e-10) {
  if (!(s > 0.0) || !std::isfinite(s))
    throw ParamError("moment_integral: s must be positive finite");
  if (!std::isfinite(m)) throw ParamError("moment_integral: m must be finite");
  if (std::isnan(c1) || std::isnan(c2) || c1 < 0.0 || !(c2 > c1))
    throw ParamError("moment_integral: need 0 <= c1 < c2");

  double acc = 0.0, err = 0.0;
  for (const auto& p : wt.pieces()) {
    if (p.c == 0.0) continue;
    const double u = std::max(c1, p.from);
    const double w = std::min(c2, p.to);
    if (!(w > u)) continue;
    const double e = p.a * s + m;
    const double ls = p.l * s;
    if (u == 0.0 && e + ls <= -1.0) return {inf, 0.0, DivergeAt::Lower};
    if (std::isinf(w) && (e > -1.0 || (e == -1.0 && ls >= -1.0)))
      return {inf, 0.0, DivergeAt::Upper};
    const double C = std::pow(p.c, s);
    if (p.l == 0.0) {
      double I;
      const double ep = e + 1.0;
      if (e == -1.0) {
        I = C * std::log(w / u);
      } else if (u == 0.0) {
        I = C * std::pow(w, ep) / ep;  // ep > 0 after the divergence screen
      } else if (std::isinf(w)) {
        I = -C * std::pow(u, ep) / ep;  // ep < 0 after the screen
      } else if (std::abs(ep) < 0.5) {
        I = C * std::pow(u, ep) * std::expm1(ep * std::log(w / u)) / ep;
      } else {
        I = C * (std::pow(w, ep) - std::pow(u, ep)) / ep;
      }
      if (!std::isfinite(I))  // finite in principle but beyond double range
        return {inf, 0.0, e > -1.0 ? DivergeAt::Upper : DivergeAt::Lower};
      acc += I;
    } else {
      const double lC = std::log(C);
      auto fn = [&](double t) {
        // evaluated in log space: staged pow products over wide t ranges
        // can overflow even when the product itself is moderate
        return std::exp(lC + e * std::log(t) + ls * std::log(std::log1p(t)));
      };
      const IntegralResult r = integrate(fn, u, w, rel_tol);
      if (r.infinite()) return {inf, 0.0, r.diverges};
      acc += r.value;
      err += r.abs_error;
    }
  }
  return {acc, err, DivergeAt::None};
}

}  // namespace lpq
