#pragma once

// Adaptive quadrature, supremum search and endpoint limit probes on (0, inf)
// for integrands with power-law behaviour at the ends of the interval.
//
// Everything runs in u = ln t coordinates: a power tail f ~ t^g becomes the
// exponential g(u) = t f(t) ~ e^{(g+1)u}, so decade blocks plus a log-log
// slope fit decide convergence at the open ends and supply analytic tail
// completions for the convergent cases.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lpq/ext.hpp"

namespace lpq {

struct IntegralResult {
  double value = 0.0;
  double abs_error = 0.0;
  std::pair<double, double> endpoint_exponents{0.0, 0.0};
  int subdivisions = 0;
  DivergeAt diverges = DivergeAt::None;
  bool infinite() const { return diverges != DivergeAt::None; }
};

struct SupResult {
  double value = 0.0;
  double argmax = 0.0;
  bool plateau = false;
  // Set when the values keep growing into an open endpoint; value is +inf then.
  DivergeAt at_endpoint = DivergeAt::None;
};

enum class LimitKind { Zero, Positive, Infinite, Inconclusive };

inline const char* to_string(LimitKind k) {
  switch (k) {
    case LimitKind::Zero: return "zero";
    case LimitKind::Positive: return "positive";
    case LimitKind::Infinite: return "infinite";
    default: return "inconclusive";
  }
}

struct LimitVerdict {
  LimitKind kind = LimitKind::Inconclusive;
  double c = 0.0;  // stabilized value, meaningful for Positive
  std::vector<std::pair<double, double>> samples;  // (t, f(t)) toward the endpoint
  double fitted_exponent = 0.0;  // slope of ln f against ln(distance to endpoint)
};

namespace qdetail {

struct NonFinite : std::runtime_error {
  bool was_inf;
  NonFinite(const std::string& msg, bool inf_flag)
      : std::runtime_error(msg), was_inf(inf_flag) {}
};

template <class F>
struct LogIntegrand {
  F& f;
  double operator()(double u) const {
    const double t = std::exp(u);
    const double y = f(t);
    if (!std::isfinite(y)) {
      std::ostringstream os;
      os << "integrand not finite at t = " << t << " (value " << y << ")";
      throw NonFinite(os.str(), std::isinf(y));
    }
    return y * t;
  }
};

// 15-point Kronrod rule with the embedded 7-point Gauss rule.
inline constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Panel {
  double integral;
  double error;
};

template <class G>
Panel gk15(G& g, double a, double b, int& panels) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = g(mid);
  double resk = kWgk[7] * fc;
  double resg = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double x = half * kXgk[j];
    const double f1 = g(mid - x);
    const double f2 = g(mid + x);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  ++panels;
  return {resk * half, std::abs(resk - resg) * half};
}

template <class G>
void adapt(G& g, double a, double b, double tol, int depth, double& acc,
           double& err, int& panels) {
  const Panel p = gk15(g, a, b, panels);
  if (p.error <= tol || depth >= 28 || (b - a) < 1e-13) {
    acc += p.integral;
    err += p.error;
    return;
  }
  const double m = 0.5 * (a + b);
  adapt(g, a, m, 0.5 * tol, depth + 1, acc, err, panels);
  adapt(g, m, b, 0.5 * tol, depth + 1, acc, err, panels);
}

// Least squares slope of ln y against u, positive samples only.
inline std::optional<double> fit_slope(
    const std::vector<std::pair<double, double>>& uy) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& [u, y] : uy) {
    if (!(y > 0.0)) continue;
    const double ly = std::log(y);
    sx += u;
    sy += ly;
    sxx += u * u;
    sxy += u * ly;
    ++n;
  }
  if (n < 3) return std::nullopt;
  const double det = n * sxx - sx * sx;
  if (!(det > 0.0)) return std::nullopt;
  return (n * sxy - sx * sy) / det;
}

template <class G>
std::vector<std::pair<double, double>> block_samples(G& g, double a, double b) {
  std::vector<std::pair<double, double>> uy;
  uy.reserve(8);
  for (int j = 0; j < 8; ++j) {
    const double u = a + (b - a) * (j + 0.5) / 8.0;
    uy.emplace_back(u, g(u));
  }
  return uy;
}

}  // namespace qdetail

// Integrates a non-negative f over (c1, c2), 0 <= c1 < c2 <= inf.
// splits: abscissae where f is known to be non-smooth (weight breakpoints);
// they become block boundaries and extend the seeded span.
template <class F>
IntegralResult integrate(F&& f, double c1, double c2, double rel_tol = 1e-8,
                         const std::vector<double>& splits = {}) {
  if (std::isnan(c1) || std::isnan(c2) || c1 < 0.0 || !(c2 > c1))
    throw ParamError("integrate: need 0 <= c1 < c2");
  if (!(rel_tol > 0.0)) throw ParamError("integrate: rel_tol must be positive");

  qdetail::LogIntegrand<F> g{f};
  IntegralResult out;
  const double L10 = std::log(10.0);
  const bool lower_open = (c1 == 0.0);
  const bool upper_open = std::isinf(c2);

  double hi = upper_open ? std::max(c1 > 0.0 ? c1 * 1e3 : 1.0, 1e9) : c2;
  double lo = lower_open ? std::min(1e-9, hi * 1e-6) : c1;
  for (double s : splits) {
    if (!(s > 0.0) || !std::isfinite(s)) continue;
    if (lower_open && s > c1 && s < c2) lo = std::min(lo, s * 0.1);
    if (upper_open && s > c1 && s < c2) hi = std::max(hi, s * 10.0);
  }

  std::vector<double> edges{std::log(lo), std::log(hi)};
  for (double s : splits)
    if (s > lo && s < hi) edges.push_back(std::log(s));
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](double x, double y) { return std::abs(x - y) < 1e-12; }),
              edges.end());

  std::vector<double> blocks;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    blocks.push_back(edges[i]);
    const int n = (int)std::ceil((edges[i + 1] - edges[i]) / L10 - 1e-12);
    for (int j = 1; j < n; ++j)
      blocks.push_back(edges[i] + (edges[i + 1] - edges[i]) * j / n);
  }
  blocks.push_back(edges.back());

  int panels = 0;
  double coarse = 0.0;
  for (std::size_t i = 0; i + 1 < blocks.size(); ++i)
    coarse += std::abs(qdetail::gk15(g, blocks[i], blocks[i + 1], panels).integral);

  const double eps = rel_tol * std::max(coarse, 1e-300);
  const double per_block = eps / (double)(blocks.size() + 8);

  double acc = 0.0, err = 0.0;
  for (std::size_t i = 0; i + 1 < blocks.size(); ++i)
    qdetail::adapt(g, blocks[i], blocks[i + 1], per_block, 0, acc, err, panels);

  double kappa_lower = 0.0, kappa_upper = 0.0;
  {
    auto first = qdetail::block_samples(g, blocks[0], blocks[1]);
    auto last = qdetail::block_samples(g, blocks[blocks.size() - 2], blocks.back());
    if (auto k = qdetail::fit_slope(first)) kappa_lower = *k;
    if (auto k = qdetail::fit_slope(last)) kappa_upper = *k;
  }

  // Walks decade blocks into an open end until the remainder is resolved:
  // returns the latest slope fit, flags divergence via out.diverges.
  // dir = +1 walks up from u0, dir = -1 walks down.
  auto extend = [&](int dir, double u0, DivergeAt tag, double& kappa) {
    double U = u0;
    double prev = inf;
    int flat_run = 0, grow_run = 0, zero_run = 0;
    for (int blk = 0; blk < 48; ++blk) {
      const double a = dir > 0 ? U : U - L10;
      const double b = dir > 0 ? U + L10 : U;
      double bacc = 0.0, berr = 0.0;
      std::vector<std::pair<double, double>> uy;
      try {
        qdetail::adapt(g, a, b, per_block, 0, bacc, berr, panels);
        uy = qdetail::block_samples(g, a, b);
      } catch (const qdetail::NonFinite& e) {
        // Overflow while walking toward an open end means blow-up there.
        if (!e.was_inf) throw;
        out.diverges = tag;
        return;
      }
      U = dir > 0 ? b : a;
      bool allzero = bacc == 0.0;
      for (const auto& s : uy)
        if (s.second != 0.0) allzero = false;
      if (allzero) {
        if (++zero_run >= 2) return;  // support exhausted, nothing beyond
        continue;
      }
      zero_run = 0;
      acc += bacc;
      err += berr;
      const auto kap = qdetail::fit_slope(uy);
      if (kap) kappa = *kap;
      // sign-normalized slope: positive means decaying toward the open end
      const double s = kap ? (dir > 0 ? -*kap : *kap) : 0.0;
      if ((kap && s < -0.05) || (std::isfinite(prev) && bacc > prev * 1.02)) {
        if (++grow_run >= 3 || acc > 1e280) {
          out.diverges = tag;
          return;
        }
      } else {
        grow_run = 0;
      }
      if (std::isfinite(prev) && prev > 0.0 && bacc > eps &&
          std::abs(bacc - prev) <= 0.02 * bacc && (!kap || std::abs(*kap) < 0.02)) {
        if (++flat_run >= 4) {
          // near-harmonic behaviour: declare divergence at |slope| ~ 0,
          // complete the remainder geometrically when decisively inside
          if (!kap || std::abs(s) < 1e-3) {
            out.diverges = tag;
          } else if (s > 0.0) {
            const double rho = std::pow(10.0, -s);
            const double tail = bacc * rho / (1.0 - rho);
            acc += tail;
            err += std::abs(tail) * 0.5;
          } else {
            out.diverges = tag;
          }
          return;
        }
      } else {
        flat_run = 0;
      }
      if (bacc < prev && kap && s >= 0.05 && bacc <= eps * 0.5) {
        const double gend = g(U);
        const double tail = gend > 0.0 ? gend / s : 0.0;
        acc += tail;
        err += std::abs(tail) * 0.25 + bacc;
        return;
      }
      prev = bacc;
    }
    // Block budget exhausted without a clean decision.
    const double s = dir > 0 ? -kappa : kappa;
    if (s > 0.0) {
      const double gend = g(U);
      const double tail = gend > 0.0 ? gend / s : 0.0;
      acc += tail;
      err += std::abs(tail) * 0.5;
    } else {
      out.diverges = tag;
    }
  };

  if (lower_open && out.diverges == DivergeAt::None)
    extend(-1, blocks.front(), DivergeAt::Lower, kappa_lower);
  if (upper_open && out.diverges == DivergeAt::None)
    extend(+1, blocks.back(), DivergeAt::Upper, kappa_upper);

  out.endpoint_exponents = {kappa_lower - 1.0, kappa_upper - 1.0};
  out.subdivisions = panels;
  if (out.diverges != DivergeAt::None) {
    out.value = inf;
    out.abs_error = 0.0;
  } else {
    out.value = acc;
    out.abs_error = err;
  }
  return out;
}

// Supremum of f over the open interval (c1, c2) by decade-aligned log grid
// search plus golden-section refinement. hints: abscissae that must be
// sampled and whose neighbourhood the span must cover (weight breakpoints).
template <class F>
SupResult sup_on_interval(F&& f, double c1, double c2, int grid_density = 64,
                          const std::vector<double>& hints = {}) {
  if (std::isnan(c1) || std::isnan(c2) || c1 < 0.0 || !(c2 > c1))
    throw ParamError("sup_on_interval: need 0 <= c1 < c2");
  if (grid_density < 4) throw ParamError("sup_on_interval: grid too coarse");

  SupResult out;
  auto ev = [&](double t) {
    const double y = f(t);
    if (std::isnan(y)) {
      std::ostringstream os;
      os << "sup_on_interval: NaN at t = " << t;
      throw std::runtime_error(os.str());
    }
    return y;
  };

  const bool lower_open = (c1 == 0.0);
  const bool upper_open = std::isinf(c2);
  double hi = upper_open ? std::max(c1 > 0.0 ? c1 * 1e3 : 1.0, 1e9) : c2;
  double lo = lower_open ? std::min(1e-9, hi * 1e-6) : c1;
  for (double h : hints) {
    if (!(h > c1) || !(h < c2) || !std::isfinite(h)) continue;
    if (lower_open) lo = std::min(lo, h * 0.1);
    if (upper_open) hi = std::max(hi, h * 10.0);
  }

  const double D = grid_density;
  long k0 = (long)std::ceil(std::log10(lo) * D - 1e-9);
  long k1 = (long)std::floor(std::log10(hi) * D + 1e-9);

  std::vector<std::pair<double, double>> nodes;  // (t, f(t)) sorted by t
  auto push_node = [&](double t) {
    if (t > c1 && t < c2) nodes.emplace_back(t, ev(t));
  };

  if (k1 - k0 >= 8) {
    for (long k = k0; k <= k1; ++k) push_node(std::pow(10.0, (double)k / D));
  } else {
    // narrow interval: unaligned log-uniform fallback
    for (int j = 0; j < 33; ++j)
      push_node(c1 > 0.0 ? c1 * std::pow(c2 / c1, (j + 0.5) / 33.0)
                         : c2 * std::pow(1e-6, 1.0 - (j + 0.5) / 33.0));
  }
  for (double h : hints) push_node(h);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [](const auto& x, const auto& y) { return x.first == y.first; }),
              nodes.end());
  if (nodes.empty()) throw ParamError("sup_on_interval: empty sample set");

  auto grid_max = [&]() {
    double m = -inf;
    for (const auto& n : nodes) m = std::max(m, n.second);
    return m;
  };

  // Value one decade inward from an edge of the current sample set.
  auto inward_low = [&]() {
    double y = nodes.front().second;
    for (const auto& n : nodes)
      if (n.first <= nodes.front().first * 10.0) y = n.second;
    return y;
  };
  auto inward_high = [&]() {
    double y = nodes.back().second;
    for (auto it = nodes.rbegin(); it != nodes.rend(); ++it)
      if (it->first >= nodes.back().first / 10.0) y = it->second;
    return y;
  };

  // Adaptive span extension while the function still drifts at an open edge
  // or keeps strictly growing into it, one decade at a time.
  const double drift_tol = 1e-3;
  for (int round = 0; round < 64; ++round) {
    const double fmax = grid_max();
    if (std::isinf(fmax)) break;
    const double scale = std::max(std::abs(fmax), 1e-300);
    bool grew = false;
    if (lower_open && nodes.front().first > 1e-30) {
      const double t_edge = nodes.front().first;
      const double f_edge = nodes.front().second;
      const double f_in = inward_low();
      const bool maxed = f_edge >= fmax - 1e-9 * scale &&
                         f_edge > f_in + 1e-9 * scale;
      if (std::abs(f_edge - f_in) > drift_tol * scale || maxed) {
        for (int j = 1; j <= grid_density; ++j)
          push_node(t_edge * std::pow(10.0, -(double)j / D));
        std::sort(nodes.begin(), nodes.end());
        grew = true;
      }
    }
    if (upper_open && nodes.back().first < 1e30) {
      const double t_edge = nodes.back().first;
      const double f_edge = nodes.back().second;
      const double f_in = inward_high();
      const bool maxed = f_edge >= fmax - 1e-9 * scale &&
                         f_edge > f_in + 1e-9 * scale;
      if (std::abs(f_edge - f_in) > drift_tol * scale || maxed) {
        for (int j = 1; j <= grid_density; ++j)
          push_node(t_edge * std::pow(10.0, (double)j / D));
        std::sort(nodes.begin(), nodes.end());
        grew = true;
      }
    }
    if (!grew) break;
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (nodes[i].second > nodes[best].second) best = i;
  const double fmax = nodes[best].second;

  if (std::isinf(fmax)) {
    out.value = inf;
    out.argmax = nodes[best].first;
    return out;
  }
  // Still climbing by a visible ratio at a capped open end: unbounded.
  if (lower_open && best == 0 && nodes.front().first <= 1e-30 &&
      nodes.size() > 1 && fmax > inward_low() * (1.0 + 1e-6)) {
    out.value = inf;
    out.argmax = nodes.front().first;
    out.at_endpoint = DivergeAt::Lower;
    return out;
  }
  if (upper_open && best + 1 == nodes.size() && nodes.back().first >= 1e30 &&
      nodes.size() > 1 && fmax > inward_high() * (1.0 + 1e-6)) {
    out.value = inf;
    out.argmax = nodes.back().first;
    out.at_endpoint = DivergeAt::Upper;
    return out;
  }

  if (fmax == 0.0) {
    bool allzero = true;
    for (const auto& n : nodes)
      if (n.second != 0.0) allzero = false;
    if (allzero) {
      out.value = 0.0;
      out.argmax = nodes.front().first;
      out.plateau = true;
      return out;
    }
  }

  // Plateau: three or more adjacent samples within relative 1e-9 of the max;
  // argmax then ties to the smallest such t.
  const double near = 1e-9 * std::max(std::abs(fmax), 1e-300);
  int run = 0, best_run = 0;
  double plateau_arg = nodes[best].first;
  bool seen_near = false;
  for (const auto& n : nodes) {
    if (std::abs(n.second - fmax) <= near) {
      if (!seen_near) {
        plateau_arg = n.first;
        seen_near = true;
      }
      best_run = std::max(best_run, ++run);
    } else {
      run = 0;
    }
  }
  out.plateau = best_run >= 3;

  // Golden-section refinement around the best node.
  double value = fmax;
  double arg = nodes[best].first;
  {
    const double ua = std::log10(best > 0 ? nodes[best - 1].first
                                          : std::max(nodes[best].first * 0.9, c1 > 0 ? c1 : nodes[best].first * 0.9));
    const double ub = std::log10(best + 1 < nodes.size()
                                     ? nodes[best + 1].first
                                     : (std::isfinite(c2) ? std::min(nodes[best].first * 1.1, c2)
                                                          : nodes[best].first * 1.1));
    double a = ua, b = ub;
    const double gr = 0.6180339887498949;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = ev(std::pow(10.0, x1)), f2 = ev(std::pow(10.0, x2));
    auto track = [&](double u, double y) {
      if (y > value) {
        value = y;
        arg = std::pow(10.0, u);
      }
    };
    track(x1, f1);
    track(x2, f2);
    int guard = 0;
    while (b - a > 4.3429448190325176e-7 && ++guard < 200) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = ev(std::pow(10.0, x2));
        track(x2, f2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = ev(std::pow(10.0, x1));
        track(x1, f1);
      }
    }
  }

  out.value = value;
  out.argmax = out.plateau && value <= fmax + near ? plateau_arg : arg;
  return out;
}

// Probes the limit of f at one end of (c1, c2) on a ratio-10 geometric
// sequence of distances; 12 samples. Classification per LimitVerdict.
template <class F>
LimitVerdict limit_probe(F&& f, double c1, double c2, DivergeAt end,
                         double tol = 5e-3) {
  if (std::isnan(c1) || std::isnan(c2) || c1 < 0.0 || !(c2 > c1))
    throw ParamError("limit_probe: need 0 <= c1 < c2");
  if (end == DivergeAt::None) throw ParamError("limit_probe: pick an endpoint");

  constexpr int N = 12;
  LimitVerdict v;
  std::vector<double> ts(N), ds(N);
  if (end == DivergeAt::Lower) {
    if (c1 == 0.0) {
      const double t0 = std::isinf(c2) ? 1.0 : std::min(1.0, c2 * 0.5);
      for (int k = 0; k < N; ++k) ds[k] = ts[k] = t0 * std::pow(10.0, -k);
    } else {
      const double s0 = std::isinf(c2) ? c1 : std::min(c1, (c2 - c1) * 0.5);
      for (int k = 0; k < N; ++k) {
        ds[k] = s0 * std::pow(10.0, -k);
        ts[k] = c1 + ds[k];
      }
    }
  } else {
    if (std::isinf(c2)) {
      const double t0 = std::max(1.0, c1 * 2.0);
      for (int k = 0; k < N; ++k) {
        ts[k] = t0 * std::pow(10.0, k);
        ds[k] = 1.0 / ts[k];
      }
    } else {
      const double s0 = (c2 - c1) * 0.5;
      for (int k = 0; k < N; ++k) {
        ds[k] = s0 * std::pow(10.0, -k);
        ts[k] = c2 - ds[k];
      }
    }
  }

  std::vector<double> ys(N);
  for (int k = 0; k < N; ++k) {
    const double y = f(ts[k]);
    if (std::isnan(y)) {
      std::ostringstream os;
      os << "limit_probe: NaN at t = " << ts[k];
      throw std::runtime_error(os.str());
    }
    v.samples.emplace_back(ts[k], y);
    if (std::isinf(y)) {
      v.kind = LimitKind::Infinite;
      return v;
    }
    ys[k] = y;
  }

  std::vector<std::pair<double, double>> dy;
  for (int k = std::max(0, N - 6); k < N; ++k) dy.emplace_back(std::log(ds[k]), ys[k]);
  const auto slope = qdetail::fit_slope(dy);
  if (slope) v.fitted_exponent = *slope;

  const double y9 = ys[N - 3], y10 = ys[N - 2], y11 = ys[N - 1];
  const bool last_zero = y9 == 0.0 && y10 == 0.0 && y11 == 0.0;
  const double m = (y9 + y10 + y11) / 3.0;
  const double spread = std::max({y9, y10, y11}) - std::min({y9, y10, y11});

  if (last_zero) {
    v.kind = LimitKind::Zero;
  } else if (y9 < tol && y10 < tol && y11 < tol && slope && *slope > 0.05) {
    v.kind = LimitKind::Zero;
  } else if (m > tol && spread <= 0.03 * m && (!slope || std::abs(*slope) < 0.05)) {
    v.kind = LimitKind::Positive;
    v.c = m;
  } else if (slope && *slope < -0.05 && y11 > std::max(ys[0], tol)) {
    v.kind = LimitKind::Infinite;
  } else {
    v.kind = LimitKind::Inconclusive;
  }
  return v;
}

}  // namespace lpq
