#pragma once

// Exponent bookkeeping and theorem-branch dispatch.
//
// p and q live in [1, inf] and (0, inf] with a genuine IEEE infinity for the
// endpoint cases; all arithmetic involving inf is special-cased, never done
// through large finite floats.

#include <optional>
#include <string>
#include <vector>

#include "lpq/ext.hpp"

namespace lpq {

struct Exponents {
  double lambda = 1.0;
  double p = 2.0;               // in [1, inf]
  double q = 2.0;               // in (0, inf]
  double p_conj = 2.0;          // p' = p/(p-1); inf when p=1, 1 when p=inf
  std::optional<double> q_conj; // q' = q/(q-1); present only for q > 1
  std::optional<double> r;      // 1/r = 1/q - 1/p; present only for q < p, both finite

  bool p_inf() const { return std::isinf(p); }
  bool q_inf() const { return std::isinf(q); }
};

inline Exponents derive(double lambda, double p, double q) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ParamError("lambda must be a positive finite real");
  if (std::isnan(p) || p < 1.0)
    throw ParamError("p must lie in [1, inf]");
  if (std::isnan(q) || !(q > 0.0))
    throw ParamError("q must lie in (0, inf]");

  Exponents e;
  e.lambda = lambda;
  e.p = p;
  e.q = q;
  if (p == 1.0)
    e.p_conj = inf;
  else if (std::isinf(p))
    e.p_conj = 1.0;
  else
    e.p_conj = p / (p - 1.0);
  if (q > 1.0) e.q_conj = std::isinf(q) ? 1.0 : q / (q - 1.0);
  if (q < p && std::isfinite(p) && std::isfinite(q)) e.r = p * q / (p - q);
  return e;
}

enum class OperatorKind { Laplace, Stieltjes, Hardy, HardyDual };

inline const char* to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::Laplace: return "laplace";
    case OperatorKind::Stieltjes: return "stieltjes";
    case OperatorKind::Hardy: return "hardy";
    default: return "hardy_dual";
  }
}

// Theorem branches. The -ii branches absorb their q=1 sub-case; code that
// needs the distinction tests exps.q == 1 directly.
enum class Branch {
  LaplaceI,    // 1 < p <= q < inf
  LaplaceII,   // 1 <= q < p < inf
  LaplaceIII,  // 0 < q < 1 < p < inf
  LaplaceIV,   // 0 < q < 1 = p
  LaplaceV,    // 1 = p <= q < inf
  LaplaceExt,  // p = inf or q = inf
  StieltjesI,    // 1 < p <= q < inf
  StieltjesII,   // 0 < q < p < inf, p > 1
  StieltjesIII,  // 0 < q < 1 = p
  StieltjesIV,   // p = 1 <= q < inf
  StieltjesExt,
  HardyI,    // 1 < p <= q < inf
  HardyII,   // 0 < q < p < inf, p > 1
  HardyIII,  // 0 < q < 1 = p
  HardyIV,   // p = 1 <= q < inf
  HardyExt,
};

inline const char* to_string(Branch b) {
  switch (b) {
    case Branch::LaplaceI: return "Laplace-i";
    case Branch::LaplaceII: return "Laplace-ii";
    case Branch::LaplaceIII: return "Laplace-iii";
    case Branch::LaplaceIV: return "Laplace-iv";
    case Branch::LaplaceV: return "Laplace-v";
    case Branch::LaplaceExt: return "Laplace-ext";
    case Branch::StieltjesI: return "Stieltjes-i";
    case Branch::StieltjesII: return "Stieltjes-ii";
    case Branch::StieltjesIII: return "Stieltjes-iii";
    case Branch::StieltjesIV: return "Stieltjes-iv";
    case Branch::StieltjesExt: return "Stieltjes-ext";
    case Branch::HardyI: return "Hardy-i";
    case Branch::HardyII: return "Hardy-ii";
    case Branch::HardyIII: return "Hardy-iii";
    case Branch::HardyIV: return "Hardy-iv";
    default: return "Hardy-ext";
  }
}

enum class Direction { Equivalent, Sufficient, Necessary, ExactNorm };

inline const char* to_string(Direction d) {
  switch (d) {
    case Direction::Equivalent: return "equivalent";
    case Direction::Sufficient: return "sufficient";
    case Direction::Necessary: return "necessary";
    default: return "exact_norm";
  }
}

struct CriterionRole {
  std::string criterion;
  Direction direction;
  bool for_compactness = false;  // else boundedness
};

struct Regime {
  OperatorKind kind = OperatorKind::Laplace;
  Branch branch = Branch::LaplaceI;
  std::vector<CriterionRole> roles;
};

namespace detail {

inline void push_role(Regime& r, const char* c, Direction d, bool compact) {
  r.roles.push_back({c, d, compact});
}

}  // namespace detail

// Total over valid Exponents: every (p, q) pair lands in exactly one branch
// per operator kind. Boundaries are exact comparisons.
inline Regime classify(const Exponents& e, OperatorKind kind) {
  using detail::push_role;
  const bool ext = e.p_inf() || e.q_inf();
  const double p = e.p, q = e.q;
  Regime r;
  r.kind = kind;

  switch (kind) {
    case OperatorKind::Laplace: {
      if (ext) {
        r.branch = Branch::LaplaceExt;
        if (e.p_inf() && e.q_inf()) {
          push_role(r, "C_1", Direction::Equivalent, false);
          push_role(r, "C_1", Direction::Equivalent, true);
        } else if (e.p_inf() && q >= 1.0) {
          push_role(r, q > 1.0 ? "C_q>1" : "C_q=1",
                    q > 1.0 ? Direction::Equivalent : Direction::ExactNorm, false);
          push_role(r, q > 1.0 ? "C_q>1" : "C_q=1", Direction::Equivalent, true);
        } else if (e.p_inf()) {  // q < 1
          push_role(r, "C_q>1", Direction::Sufficient, false);
          push_role(r, "C_q<1", Direction::Necessary, false);
          push_role(r, "C_q>1", Direction::Sufficient, true);
          push_role(r, "C_q<1", Direction::Necessary, true);
        } else if (p == 1.0) {  // p=1, q=inf
          push_role(r, "C_inf", Direction::ExactNorm, false);
          push_role(r, "never", Direction::Equivalent, true);
        } else {  // 1 < p <= inf, q = inf
          push_role(r, "C_p'", Direction::ExactNorm, false);
          push_role(r, "C_p'", Direction::Equivalent, true);
        }
      } else if (p == 1.0 && q >= 1.0) {
        r.branch = Branch::LaplaceV;
        push_role(r, "sup B_q", q > 1.0 ? Direction::ExactNorm : Direction::Equivalent, false);
        push_role(r, "sup B_q", Direction::Equivalent, true);
      } else if (q < 1.0 && p == 1.0) {
        r.branch = Branch::LaplaceIV;
        push_role(r, "B_q'", Direction::Sufficient, false);
        push_role(r, "sup B_q", Direction::Necessary, false);
        push_role(r, "B_q'", Direction::Sufficient, true);
        push_role(r, "sup B_q", Direction::Necessary, true);
      } else if (q < 1.0) {  // 0 < q < 1 < p
        r.branch = Branch::LaplaceIII;
        push_role(r, "B_L", Direction::Sufficient, false);
        push_role(r, "||B_q||_p'", Direction::Necessary, false);
        push_role(r, "B_L", Direction::Sufficient, true);
        push_role(r, "||B_q||_p'", Direction::Necessary, true);
      } else if (q < p) {  // 1 <= q < p < inf
        r.branch = Branch::LaplaceII;
        const char* c = q == 1.0 ? "B_p" : "B_L";
        push_role(r, c, q == 1.0 ? Direction::ExactNorm : Direction::Equivalent, false);
        push_role(r, c, Direction::Equivalent, true);
      } else {  // 1 < p <= q < inf
        r.branch = Branch::LaplaceI;
        push_role(r, "A_L", Direction::Equivalent, false);
        push_role(r, "A_L+limits", Direction::Equivalent, true);
      }
      break;
    }
    case OperatorKind::Stieltjes: {
      if (ext) {
        r.branch = Branch::StieltjesExt;
      } else if (p == 1.0) {
        if (q >= 1.0) {
          r.branch = Branch::StieltjesIV;
          push_role(r, "A_1S", Direction::Equivalent, false);
          push_role(r, "S_H+S_H*+limits", Direction::Equivalent, true);
        } else {
          r.branch = Branch::StieltjesIII;
          push_role(r, "B_1H+B_1H*", Direction::Equivalent, false);
          push_role(r, "B_1H+B_1H*", Direction::Equivalent, true);
        }
      } else if (q >= p) {  // 1 < p <= q
        r.branch = Branch::StieltjesI;
        push_role(r, "A_S", Direction::Equivalent, false);
        push_role(r, "A_H+A_H*", Direction::Equivalent, false);
        push_role(r, "A_H+A_H*+limits", Direction::Equivalent, true);
      } else {  // 0 < q < p, p > 1
        r.branch = Branch::StieltjesII;
        if (q == 1.0) {
          push_role(r, "Lambda", Direction::ExactNorm, false);
          push_role(r, "Lambda", Direction::Equivalent, true);
        } else {
          push_role(r, "B_H+B_H*", Direction::Equivalent, false);
          if (q > 1.0) push_role(r, "B_S", Direction::Equivalent, false);
          push_role(r, "B_H+B_H*", Direction::Equivalent, true);
        }
      }
      break;
    }
    case OperatorKind::Hardy:
    case OperatorKind::HardyDual: {
      const bool dual = kind == OperatorKind::HardyDual;
      const char* A = dual ? "A*" : "A";
      const char* B = dual ? "B*" : "B";
      const char* Bq1 = dual ? "B*_q<1" : "B_q<1";
      const char* Bge = dual ? "B*_1<=q" : "B_1<=q";
      if (ext) {
        r.branch = Branch::HardyExt;
      } else if (p == 1.0) {
        if (q >= 1.0) {
          r.branch = Branch::HardyIV;
          push_role(r, Bge, Direction::Equivalent, false);
        } else {
          r.branch = Branch::HardyIII;
          push_role(r, Bq1, Direction::Equivalent, false);
        }
      } else if (q >= p) {
        r.branch = Branch::HardyI;
        push_role(r, A, Direction::Equivalent, false);
        r.roles.push_back({std::string(A) + "+limits", Direction::Equivalent, true});
      } else {
        r.branch = Branch::HardyII;
        if (q != 1.0) {
          push_role(r, B, Direction::Equivalent, false);
          // the compactness equivalence is stated for q > 1 only (q >= 1 dual)
          if (q > 1.0 || (dual && q >= 1.0)) push_role(r, B, Direction::Equivalent, true);
        } else if (dual) {
          // q = 1 < p: boundedness uncharacterized for the dual, compactness is
          push_role(r, B, Direction::Equivalent, true);
        }
        // forward Hardy with q = 1 < p: no statement either way
      }
      break;
    }
  }
  return r;
}

// Explicit two-sided constants. Present only where the source theorems give
// numbers; "approximately equivalent" branches leave alpha/beta unset.
struct PaperConstants {
  std::optional<double> alpha_q;  // alpha: alpha^q = min{2, 2^(q-1)}
  std::optional<double> beta_q;   // beta:  beta^q = 2/(q-1) for q<=2, 2^(q-1) for q>2
  int index = 0;                  // 1..4 for the Laplace bracket pairs, 0 otherwise
  std::optional<double> alpha_i;  // lower bracket factor for the branch criterion
  std::optional<double> beta_i;   // upper bracket factor
  std::optional<double> exact_factor;     // present when the norm is exact: ||T|| = factor * criterion
  std::optional<double> laplace_l1_lower; // 2^(-lambda), p = q = 1 lower factor
  std::optional<double> gamma_S;          // unknown in the source; never set
  std::optional<double> stieltjes_lower_one;  // Stieltjes-i: A_S <= ||S|| (constant 1)
  bool equivalence_unspecified = false;

  double alpha(int i) const {
    if (i != index || !alpha_i) throw ParamError("alpha_i requested outside its branch");
    return *alpha_i;
  }
  double beta(int i) const {
    if (i != index || !beta_i) throw ParamError("beta_i requested outside its branch");
    return *beta_i;
  }
};

namespace detail {

inline double alpha_base(double q) { return std::pow(std::min(2.0, std::pow(2.0, q - 1.0)), 1.0 / q); }

inline double beta_base(double q) {
  const double bq = q <= 2.0 ? 2.0 / (q - 1.0) : std::pow(2.0, q - 1.0);
  return std::pow(bq, 1.0 / q);
}

}  // namespace detail

inline PaperConstants constants(const Regime& reg, const Exponents& e) {
  PaperConstants c;
  const double q = e.q;
  if (q > 1.0 && !e.q_inf()) {
    c.alpha_q = detail::alpha_base(q);
    c.beta_q = detail::beta_base(q);
  }
  switch (reg.branch) {
    case Branch::LaplaceI: {
      c.index = 1;
      c.alpha_i = *c.alpha_q * std::pow(q, -2.0 / q);
      c.beta_i = *c.beta_q * std::pow(*e.q_conj, 1.0 / e.p_conj);
      break;
    }
    case Branch::LaplaceII: {
      if (q == 1.0) {
        c.exact_factor = 1.0;  // ||L|| = B_p
      } else {
        c.index = 2;
        c.alpha_i = *c.alpha_q * std::pow(e.p_conj * q / *e.r, 1.0 / *e.q_conj) * std::pow(q, -1.0 / q);
        c.beta_i = *c.beta_q * std::pow(e.p_conj, 1.0 / *e.q_conj);
      }
      break;
    }
    case Branch::LaplaceIII: {
      c.index = 3;
      c.alpha_i = std::pow(q, -1.0 / q);
      // q < 1 here, so q' is the negative conjugate q/(q-1)
      const double qc = q / (q - 1.0);
      c.beta_i = std::pow(e.p, 1.0 / e.p) * std::pow(e.p_conj, 1.0 / qc) *
                 std::pow(q, -2.0 / q) * std::pow(*e.r, 1.0 / *e.r);
      break;
    }
    case Branch::LaplaceIV: {
      c.index = 4;
      c.alpha_i = std::pow(q, -1.0 / q);
      c.beta_i = std::pow(e.lambda, (1.0 - q) / q) * std::pow(q, -2.0 / q) *
                 std::pow(1.0 - q, -(1.0 - q) / q);
      break;
    }
    case Branch::LaplaceV: {
      if (q == 1.0) {
        c.laplace_l1_lower = std::pow(2.0, -e.lambda);
        c.alpha_i = c.laplace_l1_lower;
        c.beta_i = 1.0;
      } else {
        c.exact_factor = std::pow(q, -1.0 / q);
      }
      break;
    }
    case Branch::LaplaceExt: {
      if (e.p_inf() && e.q_inf()) {
        // bounded iff C_1; no explicit norm constants claimed
        c.equivalence_unspecified = false;
      } else if (e.p_inf() && q == 1.0) {
        c.exact_factor = 1.0;  // ||L|| = C_{q=1}
      } else if (!e.p_inf() && e.q_inf()) {
        c.exact_factor = 1.0;  // ||L|| = C_p' (p>1) or C_inf (p=1)
      } else {
        c.equivalence_unspecified = true;  // p=inf, q>1 or q<1: "≈" only
      }
      break;
    }
    case Branch::StieltjesI: {
      c.stieltjes_lower_one = 1.0;  // A_S <= ||S||
      c.equivalence_unspecified = true;
      break;
    }
    case Branch::StieltjesII: {
      if (q == 1.0) c.exact_factor = 1.0;  // ||S|| = Lambda
      else c.equivalence_unspecified = true;
      break;
    }
    default:
      c.equivalence_unspecified = true;
      break;
  }
  return c;
}

}  // namespace lpq
