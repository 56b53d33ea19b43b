// Command line front end: reads a JSON job description, runs the requested
// analysis tasks, writes a JSON report plus optional CSV curves, and turns
// the outcome into CI-friendly exit codes:
//   0  every requested verdict determinate, every bound check passed
//   2  an Inconclusive verdict is present
//   1  bound-check violation (an unconditional inequality failed, so the
//      build is defective) or any input error

#include <chrono>
#include <cmath>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lpq/lpq.hpp"

namespace {

using nlohmann::ordered_json;
using namespace lpq;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// schema helpers ------------------------------------------------------------

void expect_object(const ordered_json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
}

void expect_keys(const ordered_json& j, const std::string& path,
                 std::initializer_list<const char*> allowed) {
  expect_object(j, path);
  for (const auto& [key, unused] : j.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || key == k;
    if (!known) throw ConfigError(path + ": unknown key \"" + key + "\"");
  }
}

double get_number(const ordered_json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  return j.get<double>();
}

double get_number_or_inf(const ordered_json& j, const std::string& path) {
  if (j.is_string() && j.get<std::string>() == "inf") return inf;
  if (j.is_number()) return j.get<double>();
  throw ConfigError(path + ": expected a number or \"inf\"");
}

int get_int(const ordered_json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return j.get<int>();
}

Weight parse_weight(const ordered_json& j, const std::string& path) {
  try {
    if (j.is_array()) {
      std::vector<Piece> ps;
      std::size_t i = 0;
      for (const auto& item : j) {
        const std::string p = path + "[" + std::to_string(i++) + "]";
        expect_keys(item, p, {"from", "to", "c", "a", "l"});
        Piece piece;
        if (item.contains("from")) piece.from = get_number(item["from"], p + ".from");
        piece.to = item.contains("to") ? get_number_or_inf(item["to"], p + ".to") : inf;
        piece.c = item.contains("c") ? get_number(item["c"], p + ".c") : 1.0;
        if (item.contains("a")) piece.a = get_number(item["a"], p + ".a");
        if (item.contains("l")) piece.l = get_number(item["l"], p + ".l");
        ps.push_back(piece);
      }
      return Weight::from_pieces(std::move(ps));
    }
    if (j.is_object() && j.contains("table")) {
      expect_keys(j, path, {"table"});
      if (!j["table"].is_array()) throw ConfigError(path + ".table: expected an array");
      std::vector<std::pair<double, double>> tab;
      std::size_t i = 0;
      for (const auto& row : j["table"]) {
        const std::string p = path + ".table[" + std::to_string(i++) + "]";
        if (!row.is_array() || row.size() != 2)
          throw ConfigError(p + ": expected a [t, value] pair");
        tab.emplace_back(get_number(row[0], p), get_number(row[1], p));
      }
      return Weight::from_table(tab);
    }
  } catch (const ParamError& err) {
    throw ConfigError(path + ": " + err.what());
  }
  throw ConfigError(path + ": weight literal must be a piece array or {\"table\": [[t, v], ...]}");
}

const std::vector<std::string> kAllTasks = {"criteria", "normest", "verify",
                                           "compactness", "spectrum"};

struct Job {
  OperatorKind kind = OperatorKind::Laplace;
  std::string kind_name;
  double lambda = 1.0;
  double p = 2.0, q = 2.0;
  Weight v = Weight::one();
  Weight w = Weight::one();
  bool w_given = false;
  double t_min = 1e-4, t_max = 1e4;
  int ppd = 64;
  NormOptions nopts;
  std::set<std::string> tasks = {"criteria", "normest", "verify", "compactness"};
};

Job parse_config(const ordered_json& j) {
  expect_keys(j, "config",
              {"operator", "lambda", "p", "q", "v", "w", "grid", "normest", "tasks"});
  for (const char* req : {"operator", "lambda", "p", "q", "v"})
    if (!j.contains(req)) throw ConfigError(std::string("config: missing \"") + req + "\"");

  Job job;
  if (!j["operator"].is_string())
    throw ConfigError("config.operator: expected a string");
  job.kind_name = j["operator"].get<std::string>();
  if (job.kind_name == "laplace") job.kind = OperatorKind::Laplace;
  else if (job.kind_name == "stieltjes") job.kind = OperatorKind::Stieltjes;
  else if (job.kind_name == "hardy") job.kind = OperatorKind::Hardy;
  else if (job.kind_name == "hardy_dual") job.kind = OperatorKind::HardyDual;
  else
    throw ConfigError(
        "config.operator: must be one of laplace, stieltjes, hardy, hardy_dual");

  job.lambda = get_number(j["lambda"], "config.lambda");
  job.p = get_number_or_inf(j["p"], "config.p");
  job.q = get_number_or_inf(j["q"], "config.q");
  job.v = parse_weight(j["v"], "config.v");
  if (j.contains("w")) {
    job.w = parse_weight(j["w"], "config.w");
    job.w_given = true;
  }

  if (j.contains("grid")) {
    const auto& g = j["grid"];
    expect_keys(g, "config.grid", {"t_min", "t_max", "points_per_decade"});
    if (g.contains("t_min")) job.t_min = get_number(g["t_min"], "config.grid.t_min");
    if (g.contains("t_max")) job.t_max = get_number(g["t_max"], "config.grid.t_max");
    if (g.contains("points_per_decade"))
      job.ppd = get_int(g["points_per_decade"], "config.grid.points_per_decade");
  }
  if (j.contains("normest")) {
    const auto& n = j["normest"];
    expect_keys(n, "config.normest", {"restarts", "max_iter", "tol", "seed"});
    if (n.contains("restarts"))
      job.nopts.restarts = get_int(n["restarts"], "config.normest.restarts");
    if (n.contains("max_iter"))
      job.nopts.max_iter = get_int(n["max_iter"], "config.normest.max_iter");
    if (n.contains("tol")) job.nopts.tol = get_number(n["tol"], "config.normest.tol");
    if (n.contains("seed")) {
      if (!n["seed"].is_number_integer())
        throw ConfigError("config.normest.seed: expected an integer");
      job.nopts.seed = n["seed"].get<std::uint64_t>();
    }
  }
  if (j.contains("tasks")) {
    if (!j["tasks"].is_array()) throw ConfigError("config.tasks: expected an array");
    job.tasks.clear();
    for (const auto& t : j["tasks"]) {
      if (!t.is_string()) throw ConfigError("config.tasks: entries must be strings");
      const std::string name = t.get<std::string>();
      if (std::find(kAllTasks.begin(), kAllTasks.end(), name) == kAllTasks.end())
        throw ConfigError("config.tasks: unknown task \"" + name + "\"");
      job.tasks.insert(name);
    }
  }
  return job;
}

// serialization --------------------------------------------------------------

ordered_json num_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

const char* tri_str(Tri t) {
  switch (t) {
    case Tri::Yes: return "yes";
    case Tri::No: return "no";
    default: return "inconclusive";
  }
}

const char* dir_str(Direction d) {
  switch (d) {
    case Direction::Equivalent: return "equivalent";
    case Direction::Sufficient: return "sufficient";
    case Direction::Necessary: return "necessary";
    default: return "exact-norm";
  }
}

const char* diverge_str(DivergeAt d) {
  switch (d) {
    case DivergeAt::Lower: return "lower";
    case DivergeAt::Upper: return "upper";
    default: return "none";
  }
}

ordered_json limit_json(const LimitVerdict& lv) {
  ordered_json j;
  j["kind"] = to_string(lv.kind);
  j["c"] = num_json(lv.c);
  j["fitted_exponent"] = num_json(lv.fitted_exponent);
  return j;
}

ordered_json criteria_json(const CriterionSet& cs) {
  ordered_json j;
  j["values"] = ordered_json::object();
  for (const auto& [name, cv] : cs.values) {
    ordered_json e;
    e["value"] = num_json(cv.value);
    e["abs_error"] = num_json(cv.abs_error);
    e["diverges_at"] = diverge_str(cv.diverges);
    if (cv.alt_value) e["alt_value"] = num_json(*cv.alt_value);
    if (cv.form_discrepancy) e["form_discrepancy"] = num_json(*cv.form_discrepancy);
    j["values"][name] = std::move(e);
  }
  j["curves"] = ordered_json::object();
  for (const auto& [name, c] : cs.curves) {
    ordered_json e;
    e["sup"] = num_json(c.sup.value);
    e["argmax"] = num_json(c.sup.argmax);
    e["plateau"] = c.sup.plateau;
    e["diverges_at"] = diverge_str(c.sup.at_endpoint);
    e["limit_lower"] = limit_json(c.limit_lower);
    e["limit_upper"] = limit_json(c.limit_upper);
    j["curves"][name] = std::move(e);
  }
  if (!cs.probes.empty()) {
    j["probes"] = ordered_json::object();
    for (const auto& [name, lv] : cs.probes) j["probes"][name] = limit_json(lv);
  }
  return j;
}

ordered_json constants_json(const PaperConstants& c) {
  ordered_json j;
  j["bracket_index"] = c.index;
  j["alpha"] = c.alpha_i ? num_json(*c.alpha_i) : ordered_json("unspecified");
  j["beta"] = c.beta_i ? num_json(*c.beta_i) : ordered_json("unspecified");
  if (c.exact_factor) j["exact_norm_factor"] = num_json(*c.exact_factor);
  if (c.laplace_l1_lower) j["l1_lower_factor"] = num_json(*c.laplace_l1_lower);
  if (c.stieltjes_lower_one) j["lower_factor"] = num_json(*c.stieltjes_lower_one);
  j["equivalence_constants_unspecified"] = c.equivalence_unspecified;
  return j;
}

ordered_json verdict_json(const Verdict& v) {
  ordered_json j;
  j["bounded"] = tri_str(v.bounded);
  j["compact"] = tri_str(v.compact);
  j["evidence"] = ordered_json::array();
  for (const auto& ev : v.evidence) {
    ordered_json e;
    e["criterion"] = ev.criterion;
    e["detail"] = ev.detail;
    if (ev.direction) e["direction"] = dir_str(*ev.direction);
    e["for_compactness"] = ev.for_compactness;
    j["evidence"].push_back(std::move(e));
  }
  return j;
}

ordered_json bounds_json(const BoundReport& b) {
  ordered_json j;
  if (!b.lower_criterion.empty()) j["lower_criterion"] = b.lower_criterion;
  if (!b.upper_criterion.empty()) j["upper_criterion"] = b.upper_criterion;
  j["lower_value"] = num_json(b.lower_value);
  j["upper_value"] = num_json(b.upper_value);
  j["alpha"] = b.alpha ? num_json(*b.alpha) : ordered_json("unspecified");
  j["beta"] = b.beta ? num_json(*b.beta) : ordered_json("unspecified");
  j["lower_ok"] = b.lower_ok;
  j["upper_ok"] = b.upper_ok;
  if (b.ratio) j["estimate_to_criterion_ratio"] = num_json(*b.ratio);
  j["bracketed"] = b.bracketed;
  if (!b.note.empty()) j["note"] = b.note;
  return j;
}

ordered_json weight_echo(const Weight& w) {
  ordered_json arr = ordered_json::array();
  for (const auto& p : w.pieces()) {
    ordered_json e;
    e["from"] = num_json(p.from);
    e["to"] = num_json(p.to);
    e["c"] = num_json(p.c);
    e["a"] = num_json(p.a);
    e["l"] = num_json(p.l);
    arr.push_back(std::move(e));
  }
  return arr;
}

std::string csv_name(const std::string& name) {
  std::string out;
  for (char ch : name) {
    if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-')
      out += ch;
    else if (ch == '*')
      out += "star";
    else if (ch == '<')
      out += 'l';
    else if (ch == '=')
      out += 'e';
    else
      out += '_';
  }
  return out;
}

// pipeline -------------------------------------------------------------------

int run_command(const std::string& config_path, const std::string& out_path,
                const std::string& csv_dir, const std::string& task_override,
                bool quiet) {
  const auto t0 = std::chrono::steady_clock::now();

  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot read config: " << config_path << "\n";
    return 1;
  }
  ordered_json raw;
  try {
    raw = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& err) {
    std::cerr << "error: " << config_path << ": " << err.what() << "\n";
    return 1;
  }

  Job job;
  try {
    job = parse_config(raw);
    if (!task_override.empty()) {
      job.tasks.clear();
      std::string cur;
      for (char ch : task_override + ",") {
        if (ch == ',') {
          if (!cur.empty()) {
            if (std::find(kAllTasks.begin(), kAllTasks.end(), cur) == kAllTasks.end())
              throw ConfigError("--task: unknown task \"" + cur + "\"");
            job.tasks.insert(cur);
            cur.clear();
          }
        } else {
          cur += ch;
        }
      }
      if (job.tasks.empty()) throw ConfigError("--task: no tasks given");
    }
  } catch (const ConfigError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }

  Exponents exps;
  try {
    exps = derive(job.lambda, job.p, job.q);
    if (job.tasks.count("spectrum") && !(job.p == 2.0 && job.q == 2.0))
      throw ParamError("the spectrum task needs p = q = 2");
  } catch (const ParamError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }

  const bool want_verify = job.tasks.count("verify") > 0;
  const bool want_compact = job.tasks.count("compactness") > 0;
  const bool want_spectrum = job.tasks.count("spectrum") > 0;
  const bool want_criteria = job.tasks.count("criteria") || want_verify || want_compact;
  const bool want_normest = job.tasks.count("normest") || want_verify;
  const bool want_op = want_normest || want_spectrum || want_compact;

  const Weight w_eff = job.kind == OperatorKind::Laplace ? Weight::one() : job.w;
  std::vector<std::string> notes;
  if (job.kind == OperatorKind::Laplace && job.w_given)
    notes.push_back("the exponential kernel takes no outer weight; configured w ignored");

  ordered_json report;
  report["tool"] = {{"name", "lpq"}, {"version", lpq::version}};
  {
    ordered_json echo;
    echo["operator"] = job.kind_name;
    echo["lambda"] = num_json(job.lambda);
    echo["p"] = std::isinf(job.p) ? ordered_json("inf") : ordered_json(job.p);
    echo["q"] = std::isinf(job.q) ? ordered_json("inf") : ordered_json(job.q);
    echo["v"] = weight_echo(job.v);
    if (job.w_given) echo["w"] = weight_echo(job.w);
    echo["grid"] = {{"t_min", job.t_min}, {"t_max", job.t_max},
                    {"points_per_decade", job.ppd}};
    echo["normest"] = {{"restarts", job.nopts.restarts},
                       {"max_iter", job.nopts.max_iter},
                       {"tol", job.nopts.tol},
                       {"seed", job.nopts.seed}};
    echo["tasks"] = ordered_json::array();
    for (const auto& t : kAllTasks)
      if (job.tasks.count(t)) echo["tasks"].push_back(t);
    report["config"] = std::move(echo);
  }

  int code = 0;
  try {
    report["regime"] =
        to_string(classify(exps, job.kind).branch);

    CriterionSet cs;
    if (want_criteria) {
      if (!quiet) std::cerr << "computing criteria...\n";
      cs = build_criteria(exps, job.kind, job.v, w_eff);
      report["zero_operator"] = cs.zero_operator;
      report["criteria"] = criteria_json(cs);
      report["constants"] = constants_json(cs.constants);
    }

    DiscreteOp op;
    Grid grid;
    if (want_op) {
      grid = log_grid(job.t_min, job.t_max, job.ppd);
      // breakpoints get a straddle pair so the half-open jumps keep their
      // mass on the correct side of the cell boundary
      std::vector<double> extra;
      for (const Weight* wt : {&std::as_const(job.v), &w_eff})
        for (double b : wt->breakpoints()) {
          extra.push_back(b * (1.0 - 1e-9));
          extra.push_back(b);
        }
      grid = insert_nodes(grid, extra);
      if (!quiet) std::cerr << "assembling " << grid.nodes.size() << " nodes...\n";
      op = discretize(exps, job.kind, job.v, w_eff, grid, grid);
    }

    NormEstimate est;
    if (want_normest) {
      if (!quiet) std::cerr << "estimating the norm...\n";
      est = norm_pq(op, job.nopts);
      ordered_json e;
      e["estimate"] = num_json(est.lower_bound);
      e["method"] = to_string(est.method);
      e["iterations"] = est.iterations;
      e["restarts"] = est.restarts;
      e["converged"] = est.converged;
      e["heuristic"] = est.heuristic;
      e["seed"] = est.seed;
      e["span_sensitive"] = span_sensitive(op, est);
      report["normest"] = std::move(e);
    }

    bool bounds_ok = true;
    if (want_verify) {
      const auto rep = bound_check(est, cs);
      bounds_ok = rep.lower_ok && rep.upper_ok;
      report["bounds"] = bounds_json(rep);
    }

    Verdict verdict;
    if (want_compact) {
      verdict = compactness_verdict(cs);
      report["verdicts"] = verdict_json(verdict);

      ordered_json diag;
      TailDecayReport tails;
      bool tails_ok = false;
      if (verdict.bounded == Tri::No) {
        diag["tail_decay"] = {{"skipped", "operator is unbounded"}};
      } else {
        const double span_lo = -std::log10(grid.t_min);
        const double span_hi = std::log10(grid.t_max);
        const int splits = static_cast<int>(
            std::min(3.0, std::floor(std::min(span_lo, span_hi) + 1e-9)));
        if (splits < 1) {
          diag["tail_decay"] = {{"skipped", "grid span too narrow for split points"}};
        } else {
          if (!quiet) std::cerr << "probing tail decay...\n";
          tails = tail_decay(job.kind, exps, job.v, w_eff, splits, grid, job.nopts);
          tails_ok = true;
          ordered_json t;
          t["a_sequence"] = tails.a_sequence;
          t["b_sequence"] = tails.b_sequence;
          t["lower_norms"] = tails.lower_norms;
          t["upper_norms"] = tails.upper_norms;
          if (!tails.lower_bounds.empty()) {
            t["lower_analytic_bounds"] = ordered_json::array();
            for (double x : tails.lower_bounds)
              t["lower_analytic_bounds"].push_back(num_json(x));
            t["upper_analytic_bounds"] = ordered_json::array();
            for (double x : tails.upper_bounds)
              t["upper_analytic_bounds"].push_back(num_json(x));
          }
          t["lower_verdict"] = limit_json(tails.lower_verdict);
          t["upper_verdict"] = limit_json(tails.upper_verdict);
          diag["tail_decay"] = std::move(t);
        }
      }

      SpectrumReport sv;
      if (want_spectrum) {
        if (!quiet) std::cerr << "computing singular values...\n";
        sv = spectrum(op, 16);
        ordered_json s;
        s["singular_values"] = ordered_json::array();
        for (double x : sv.singular_values) s["singular_values"].push_back(num_json(x));
        s["decay_exponent"] = num_json(sv.decay_exponent);
        s["rank_at_1e-3"] = sv.rank_eps(1e-3);
        diag["spectrum"] = std::move(s);
      }

      if (tails_ok) {
        const auto cons = cross_validate(verdict, tails, sv);
        ordered_json c;
        c["worst"] = to_string(cons.worst());
        c["notes"] = ordered_json::array();
        for (const auto& n : cons.notes)
          c["notes"].push_back(
              {{"severity", to_string(n.severity)}, {"message", n.message}});
        diag["consistency"] = std::move(c);
      } else {
        diag["consistency"] = {{"skipped", "tail decay unavailable"}};
      }
      report["diagnostics"] = std::move(diag);
    } else if (want_spectrum) {
      if (!quiet) std::cerr << "computing singular values...\n";
      const auto sv = spectrum(op, 16);
      ordered_json s;
      s["singular_values"] = ordered_json::array();
      for (double x : sv.singular_values) s["singular_values"].push_back(num_json(x));
      s["decay_exponent"] = num_json(sv.decay_exponent);
      s["rank_at_1e-3"] = sv.rank_eps(1e-3);
      report["diagnostics"] = {{"spectrum", std::move(s)}};
    }

    if (!csv_dir.empty() && want_criteria) {
      std::filesystem::create_directories(csv_dir);
      const Grid cg = grid.nodes.empty() ? log_grid(job.t_min, job.t_max, job.ppd) : grid;
      char buf[64];
      for (const auto& [name, curve] : cs.curves) {
        std::ofstream f(csv_dir + "/" + csv_name(name) + ".csv");
        f << "t,value\n";
        for (double t : cg.nodes) {
          const double val = curve.point_fn(t);
          std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t, val);
          f << buf;
        }
      }
    }

    if (want_verify && !bounds_ok) code = 1;
    else if (want_compact && (verdict.bounded == Tri::Inconclusive ||
                              verdict.compact == Tri::Inconclusive))
      code = 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }

  report["notes"] = ordered_json::array();
  for (const auto& n : notes) report["notes"].push_back(n);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report["wall_clock_seconds"] = secs;

  const std::string text = report.dump(2) + "\n";
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return 1;
    }
    f << text;
  } else {
    std::cout << text;
  }
  return code;
}

// selftest -------------------------------------------------------------------

int selftest_command(bool quiet) {
  int failed = 0;
  auto row = [&](const std::string& name, bool ok, const std::string& detail) {
    if (!ok) ++failed;
    if (!quiet || !ok)
      std::cout << (ok ? "ok    " : "FAIL  ") << name
                << (detail.empty() ? "" : "  " + detail) << "\n";
  };
  char buf[128];

  NormOptions fast;
  fast.restarts = 1;
  fast.max_iter = 250;
  fast.tol = 1e-9;

  const auto e22 = derive(1.0, 2.0, 2.0);
  const double pi = std::acos(-1.0);

  // classical norms on a wide window; the operators are scale invariant, so
  // the windowed norm creeps up to the true value only as the span grows
  {
    auto g = log_grid(1e-12, 1e12, 64);
    struct Case {
      OperatorKind kind;
      const char* name;
      double target;
    } cases[] = {{OperatorKind::Laplace, "laplace norm sqrt(pi)", std::sqrt(pi)},
                 {OperatorKind::Stieltjes, "stieltjes norm pi", pi},
                 {OperatorKind::Hardy, "hardy norm 2", 2.0}};
    for (const auto& c : cases) {
      auto op = discretize(e22, c.kind, Weight::one(), Weight::one(), g, g);
      const double est = norm_pq(op, fast).lower_bound;
      std::snprintf(buf, sizeof buf, "est=%.6f target=%.6f", est, c.target);
      row(c.name, std::abs(est / c.target - 1.0) <= 0.02, buf);
    }
  }

  // unit criterion plateaus for the constant weight
  {
    auto cs = build_criteria(e22, OperatorKind::Laplace, Weight::one(), Weight::one());
    const double a = cs.curves.at("A_L").sup.value;
    std::snprintf(buf, sizeof buf, "A=%.9f", a);
    row("laplace criterion plateau 1", std::abs(a - 1.0) <= 1e-6, buf);
    auto ch = build_criteria(e22, OperatorKind::Hardy, Weight::one(), Weight::one());
    const double ah = ch.curves.at("A").sup.value;
    std::snprintf(buf, sizeof buf, "A=%.9f", ah);
    row("hardy criterion plateau 1", std::abs(ah - 1.0) <= 1e-6, buf);
  }

  // exact column route against the closed form q^(-1/q) sup B_q
  {
    const auto e12 = derive(1.0, 1.0, 2.0);
    auto g = log_grid(1e-6, 1e4, 64);
    auto op = discretize(e12, OperatorKind::Laplace, Weight::indicator(1.0, 2.0),
                         Weight::one(), g, g);
    const auto est = norm_pq(op, fast);
    const double target = std::sqrt(0.5);
    std::snprintf(buf, sizeof buf, "est=%.9f target=%.9f method=%s", est.lower_bound,
                  target, to_string(est.method));
    row("exact p=1 norm 2^(-1/2)",
        est.method == NormMethod::ExactColumn &&
            std::abs(est.lower_bound / target - 1.0) <= 1e-3,
        buf);
  }

  // kernel factorization
  {
    auto gy = log_grid(1e-4, 1e4, 16);
    auto gx = log_grid(1e-10, 1e6, 16);
    const double dev = compose_check(e22, Weight::one(), Weight::one(), gy, gx);
    std::snprintf(buf, sizeof buf, "deviation=%.3g", dev);
    row("laplace composition identity", dev < 1e-4, buf);
  }

  // accumulation sandwich on the collocation matrices
  {
    auto g = log_grid(1e-2, 1e2, 8);
    auto chi = Weight::indicator(0.5, 50.0);
    auto s = discretize(e22, OperatorKind::Stieltjes, chi, chi, g, g);
    auto h = discretize(e22, OperatorKind::Hardy, chi, chi, g, g);
    auto hd = discretize(e22, OperatorKind::HardyDual, chi, chi, g, g);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    bool ok = true;
    for (int rep = 0; rep < 10 && ok; ++rep) {
      std::vector<double> f(g.nodes.size());
      for (auto& x : f) x = u(rng);
      auto sf = matvec(s.P, f);
      auto pf = matvec(h.P, f);
      auto df = matvec(hd.P, f);
      for (std::size_t i = 0; i < sf.size(); ++i) {
        const double pair = pf[i] + df[i];
        ok = ok && sf[i] <= pair + 1e-9 && 0.5 * pair <= sf[i] + 1e-9;
      }
    }
    row("stieltjes sandwiched by the pair", ok, "");
  }

  // norm estimates against the exhaustive oracle on small matrices
  {
    std::mt19937_64 rng(0xACC0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double ps[] = {1.0, 1.5, 2.0, 4.0, inf};
    const double qs[] = {0.5, 1.0, 2.0, 3.0, inf};
    int bad = 0;
    for (int k = 0; k < 200; ++k) {
      const double p = ps[k % 5], q = qs[(k / 5) % 5];
      Matrix m = Matrix::zeros(1 + k % 4, 1 + k % 3);
      for (auto& x : m.a) x = u(rng) < 0.25 ? 0.0 : u(rng);
      const double est = norm_estimate(m, p, q).lower_bound;
      const double oracle = brute_force_norm(m, p, q);
      if (q >= 1.0) {
        if (std::abs(est - oracle) > 1e-4) ++bad;
      } else {
        if (est < oracle - 1e-3 || est > oracle + 1e-4) ++bad;
      }
    }
    std::snprintf(buf, sizeof buf, "disagreements=%d/200", bad);
    row("estimator agrees with the oracle", bad == 0, buf);
  }

  std::cout << (failed == 0 ? "selftest passed" : "selftest FAILED") << "\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted Lp->Lq transform analyzer"};
  app.require_subcommand(1);

  std::string config_path, out_path, csv_dir, task_override;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "analyze one job config");
  run->add_option("config", config_path, "JSON job config")->required();
  run->add_option("--out", out_path, "write the JSON report here (default stdout)");
  run->add_option("--csv", csv_dir, "write criterion curves as CSV into this directory");
  run->add_option("--task", task_override, "comma-separated task override");
  run->add_flag("--quiet", quiet, "suppress progress output");

  auto* st = app.add_subcommand("selftest", "run the built-in closed-form corpus");
  st->add_flag("--quiet", quiet, "print failures only");

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand(st)) return selftest_command(quiet);
  return run_command(config_path, out_path, csv_dir, task_override, quiet);
}
