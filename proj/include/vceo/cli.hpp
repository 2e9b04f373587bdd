#pragma once

// Command-line front end. run_cli parses arguments, runs one command and
// returns the process exit code:
//   0 ok, 1 parse/usage error, 2 infeasible targets, 3 verification
//   failure, 4 targets outside the theorem condition (verify only).

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vceo/bound.hpp"
#include "vceo/equivalence.hpp"
#include "vceo/errors.hpp"
#include "vceo/instance.hpp"
#include "vceo/mc.hpp"
#include "vceo/optimize.hpp"
#include "vceo/scheme.hpp"
#include "vceo/types.hpp"

namespace vceo {

enum ExitCode : int {
  kExitOk = 0,
  kExitParse = 1,
  kExitInfeasible = 2,
  kExitVerifyFail = 3,
  kExitOutsideCondition = 4,
};

inline constexpr const char* kSweepHeader =
    "swept_var,swept_value,achievable_nats,lower_bound_nats,gap_nats,condition_holds";

namespace cli {

using Json = nlohmann::ordered_json;

/// Doubles as JSON numbers; non-finite values as strings ("inf", "nan").
inline Json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

/// Full-precision decimal text, matching what the JSON renderer prints.
inline std::string fmt(double v) {
  const Json j = num(v);
  return j.is_string() ? j.get<std::string>() : j.dump();
}

struct Settings {
  InstanceSpec spec;
  std::string output = "text";
  bool bits = false;
  std::string sweep_var = "D0";
  double sweep_from = 0.0, sweep_to = 0.0;
  int sweep_steps = 1;
  std::optional<std::uint64_t> samples;
  std::optional<double> tol;
  std::optional<double> eq_tol;
};

/// Information values are computed in nats; bits are a rendering choice.
inline Json info(const Settings& s, double nats) {
  return num(s.bits ? nats / std::numbers::ln2 : nats);
}

inline OptimizeOptions optimize_options(const Settings& s) {
  OptimizeOptions o;
  o.starts = s.spec.options.starts;
  o.tol = s.spec.options.tol;
  o.seed = s.spec.options.seed;
  return o;
}

inline LowerBoundOptions bound_options(const Settings& s) {
  LowerBoundOptions o;
  o.grid = s.spec.options.grid;
  return o;
}

inline Json model_json(const InstanceSpec& spec) {
  return Json{{"sigma_s2", num(spec.model.sigma_s2)},
              {"sigma_n1_2", num(spec.model.sigma_n1_2)},
              {"sigma_n2_2", num(spec.model.sigma_n2_2)},
              {"d1", num(spec.targets.d1)},
              {"d2", num(spec.targets.d2)},
              {"d0", num(spec.targets.d0)}};
}

inline Json params_json(const SchemeParams& p) {
  return Json{{"w11", num(p.w11)}, {"w12", num(p.w12)}, {"w21", num(p.w21)},
              {"w22", num(p.w22)}, {"a1", num(p.a1)},   {"a2", num(p.a2)}};
}

inline Json distortions_json(const std::array<double, 3>& d) {
  return Json{{"delta1", num(d[0])}, {"delta2", num(d[1])}, {"delta0", num(d[2])}};
}

inline void flatten(const Json& j, const std::string& prefix,
                    std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), rows);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      flatten(j[i], prefix + "[" + std::to_string(i) + "]", rows);
  } else {
    rows.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
  }
}

inline void render(const Settings& s, const Json& report, std::ostream& out) {
  if (s.output == "json") {
    out << report.dump(2) << "\n";
    return;
  }
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(report, "", rows);
  if (s.output == "csv") {
    out << "field,value\n";
    for (const auto& [k, v] : rows) out << k << ',' << v << "\n";
  } else {
    for (const auto& [k, v] : rows) out << k << ": " << v << "\n";
  }
}

inline Json header(const Settings& s, const char* command) {
  return Json{{"command", command},
              {"unit", s.bits ? "bits" : "nats"},
              {"instance", model_json(s.spec)}};
}

inline void require_valid_triple(const InstanceSpec& spec) {
  if (!spec.targets.valid_for(spec.model))
    throw DomainError("distortion targets need 0 < D0 < min{D1,D2} and max{D1,D2} < sigma_s2");
}

inline int cmd_sum_rate(const Settings& s, std::ostream& out) {
  const OptimizeResult r = optimize_sum_rate(s.spec.model, s.spec.targets, optimize_options(s));
  Json rep = header(s, "sum-rate");
  rep["sum_rate"] = info(s, r.rates.sum_rate);
  rep["terms"] = {{"mi_sources_descriptions", info(s, r.rates.term_mi_joint)},
                  {"mi_cross_descriptions", info(s, r.rates.term_mi_cross)}};
  rep["params"] = params_json(r.params);
  rep["distortions"] = distortions_json(r.distortions);
  rep["best_start"] = r.best_start;
  rep["evaluations"] = r.evaluations;
  render(s, rep, out);
  return kExitOk;
}

inline int cmd_lower_bound(const Settings& s, std::ostream& out) {
  detail::check_feasible(s.spec.model, s.spec.targets);
  require_valid_triple(s.spec);
  const LowerBoundResult lb = lower_bound(s.spec.model, s.spec.targets, bound_options(s));
  const bool cond = condition_holds(s.spec.model, s.spec.targets);
  const BoundParams& p = lb.argmin;
  Json rep = header(s, "lower-bound");
  rep["lower_bound"] = info(s, lb.value);
  rep["branch"] = to_string(lb.branch);
  rep["argmin"] = {{"d11", num(p.d11)}, {"d12", num(p.d12)}, {"d21", num(p.d21)},
                   {"d22", num(p.d22)}, {"t1", info(s, p.t1)}, {"t2", info(s, p.t2)}};
  rep["sigma_z2"] = Json::array({num(lb.sup[0].sigma_z2), num(lb.sup[1].sigma_z2)});
  rep["branch_values"] = {{"P1", info(s, lb.p1_value)}, {"P2", info(s, lb.p2_value)}};
  rep["condition_holds"] = cond;
  if (!cond) rep["note"] = "theorem condition not satisfied; equality not guaranteed";
  rep["evaluations"] = lb.evaluations;
  render(s, rep, out);
  return kExitOk;
}

inline int cmd_verify(const Settings& s, std::ostream& out, std::ostream& err) {
  const SourceModel& m = s.spec.model;
  const DistortionTriple& tg = s.spec.targets;
  detail::check_feasible(m, tg);
  require_valid_triple(s.spec);
  if (!condition_holds(m, tg)) {
    err << "outside theorem condition: 1/D1 + 1/D2 - max{1/sN1, 1/sN2} - 1/sS < 1/D0; "
           "no certificate attempted\n";
    return kExitOutsideCondition;
  }
  const double verify_tol = s.tol.value_or(s.spec.options.verify_tol);
  const double eq_tol = s.eq_tol.value_or(s.spec.options.equality_tol);

  const LowerBoundResult lb = lower_bound(m, tg, bound_options(s));
  const OptimizeResult opt = optimize_sum_rate(m, tg, optimize_options(s));
  const double rel_gap = std::abs(opt.rates.sum_rate - lb.value) / lb.value;

  Json rep = header(s, "verify");
  rep["lower_bound"] = info(s, lb.value);
  rep["achievable"] = info(s, opt.rates.sum_rate);
  rep["relative_gap"] = num(rel_gap);
  rep["branch"] = to_string(lb.branch);

  bool pass = rel_gap <= eq_tol;
  try {
    const BoundParams q = project_to_P(m, tg, lb.argmin);
    const EquivalenceReport e = construct_matching_scheme(m, tg, q);
    const double scheme_rate = sum_rate(m, e.params).sum_rate;
    rep["identity"] = {{"lhs", info(s, e.lhs)},
                       {"rhs", info(s, e.rhs)},
                       {"diff", info(s, e.diff)},
                       {"scheme_sum_rate", info(s, scheme_rate)}};
    rep["cases"] = Json::array({to_string(e.cases[0]), to_string(e.cases[1])});
    rep["params"] = params_json(e.params);
    rep["sigma_z2"] = Json::array({num(e.sigma_z2[0]), num(e.sigma_z2[1])});
    rep["conditional_info"] = Json::array({info(s, e.cond_info[0]), info(s, e.cond_info[1])});
    rep["t_target"] = Json::array({info(s, e.t_target[0]), info(s, e.t_target[1])});
    rep["t_achieved"] = Json::array({info(s, e.t_achieved[0]), info(s, e.t_achieved[1])});
    rep["distortions"] = distortions_json(e.distortions);
    rep["meets_distortions"] = e.meets_distortions;
    pass = pass && e.diff <= verify_tol && e.meets_distortions &&
           std::abs(scheme_rate - e.rhs) <= verify_tol;
  } catch (const std::exception& ex) {
    rep["construction_error"] = ex.what();
    pass = false;
  }
  rep["verify_tol"] = num(verify_tol);
  rep["equality_tol"] = num(eq_tol);
  rep["status"] = pass ? "PASS" : "FAIL";
  render(s, rep, out);
  return pass ? kExitOk : kExitVerifyFail;
}

/// Copy of the instance with one model or target entry replaced.
inline InstanceSpec with_value(const InstanceSpec& spec, const std::string& var, double v) {
  InstanceSpec out = spec;
  if (var == "D0" || var == "d0") out.targets.d0 = v;
  else if (var == "D1" || var == "d1") out.targets.d1 = v;
  else if (var == "D2" || var == "d2") out.targets.d2 = v;
  else if (var == "sigma_s2") out.model.sigma_s2 = v;
  else if (var == "sigma_n1_2") out.model.sigma_n1_2 = v;
  else if (var == "sigma_n2_2") out.model.sigma_n2_2 = v;
  else throw DomainError("unknown sweep variable '" + var + "'");
  return out;
}

struct SweepRow {
  double value = 0.0;
  double achievable = std::nan("");
  double lower = std::nan("");
  double gap = std::nan("");
  bool condition = false;
};

inline SweepRow sweep_point(const Settings& s, double v) {
  Settings local = s;
  local.spec = with_value(s.spec, s.sweep_var, v);
  const SourceModel& m = local.spec.model;
  const DistortionTriple& tg = local.spec.targets;
  SweepRow row{v};
  if (!m.valid() || !tg.positive()) return row;
  try {
    row.achievable = optimize_sum_rate(m, tg, optimize_options(local)).rates.sum_rate;
  } catch (const std::exception&) {
  }
  if (tg.valid_for(m)) {
    row.condition = condition_holds(m, tg);
    try {
      detail::check_feasible(m, tg);
      row.lower = lower_bound(m, tg, bound_options(local)).value;
    } catch (const std::exception&) {
    }
  }
  row.gap = row.achievable - row.lower;
  return row;
}

/// Always CSV in nats so sweep files stay comparable across runs.
inline int cmd_sweep(const Settings& s, std::ostream& out) {
  if (s.sweep_steps < 1) throw DomainError("--steps must be >= 1");
  with_value(s.spec, s.sweep_var, 1.0);  // rejects unknown names before any work
  out << kSweepHeader << "\n";
  for (int i = 0; i < s.sweep_steps; ++i) {
    const double v = s.sweep_steps == 1
                         ? s.sweep_from
                         : s.sweep_from + (s.sweep_to - s.sweep_from) * i / (s.sweep_steps - 1);
    const SweepRow r = sweep_point(s, v);
    out << s.sweep_var << ',' << fmt(r.value) << ',' << fmt(r.achievable) << ','
        << fmt(r.lower) << ',' << fmt(r.gap) << ',' << (r.condition ? "true" : "false") << "\n";
  }
  return kExitOk;
}

inline int cmd_mc_check(const Settings& s, std::ostream& out) {
  const OptimizeResult opt =
      optimize_sum_rate(s.spec.model, s.spec.targets, optimize_options(s));
  const std::uint64_t n = s.samples.value_or(s.spec.options.mc_samples);
  if (n < 2) throw DomainError("--samples must be >= 2");
  const McReport mc = mc_validate(s.spec.model, opt.params, n, s.spec.options.seed);
  Json rep = header(s, "mc-check");
  rep["params"] = params_json(opt.params);
  rep["samples"] = n;
  rep["seed"] = s.spec.options.seed;
  Json rows = Json::array();
  for (const auto& q : mc.rows)
    rows.push_back({{"quantity", q.name},
                    {"analytic", num(q.analytic)},
                    {"empirical", num(q.empirical)},
                    {"stderr", num(q.stderr_)},
                    {"z", num(q.z_score())},
                    {"result", q.pass() ? "PASS" : "FAIL"}});
  rep["rows"] = rows;
  rep["status"] = mc.all_pass() ? "PASS" : "FAIL";
  render(s, rep, out);
  return mc.all_pass() ? kExitOk : kExitVerifyFail;
}

}  // namespace cli

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sum rate, lower bound and equivalence certificates for the Gaussian "
               "vacationing-CEO problem"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string path;
  std::optional<double> tol, eq_tol;
  std::optional<int> starts, grid;
  std::optional<std::uint64_t> seed;
  cli::Settings s;
  app.add_option("--instance", path, "instance file (JSON)")->required();
  app.add_option("--tol", tol,
                 "optimizer tolerance; for verify, the certificate identity tolerance");
  app.add_option("--eq-tol", eq_tol, "verify: relative optimizer-vs-bound tolerance");
  app.add_option("--starts", starts, "optimizer multistart count")->check(CLI::PositiveNumber);
  app.add_option("--grid", grid, "lower-bound grid points per dimension")
      ->check(CLI::Range(2, 100000));
  app.add_option("--seed", seed, "seed for multistart and sampling");
  app.add_flag("--bits", s.bits, "render information values in bits");
  app.add_option("--output", s.output, "text | json | csv")
      ->check(CLI::IsMember({"text", "json", "csv"}));

  auto* c_sum = app.add_subcommand("sum-rate", "optimized achievable sum rate");
  auto* c_lb = app.add_subcommand("lower-bound", "converse lower bound");
  auto* c_ver = app.add_subcommand("verify", "equivalence certificate");
  auto* c_sw = app.add_subcommand("sweep", "CSV sweep of one instance entry");
  c_sw->add_option("--var", s.sweep_var, "D0 | D1 | D2 | sigma_s2 | sigma_n1_2 | sigma_n2_2");
  c_sw->add_option("--from", s.sweep_from)->required();
  c_sw->add_option("--to", s.sweep_to);
  c_sw->add_option("--steps", s.sweep_steps)->check(CLI::PositiveNumber);
  auto* c_mc = app.add_subcommand("mc-check", "Monte-Carlo check of the closed forms");
  c_mc->add_option("--samples", s.samples, "sample count (default from the instance)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }
  if (c_sw->parsed() && c_sw->count("--to") == 0) s.sweep_to = s.sweep_from;

  try {
    s.spec = load_instance(path);
    if (starts) s.spec.options.starts = *starts;
    if (grid) s.spec.options.grid = *grid;
    if (seed) s.spec.options.seed = *seed;
    if (s.spec.options.unit == Unit::Bits) s.bits = true;
    s.tol = tol;
    s.eq_tol = eq_tol;
    if (tol && !c_ver->parsed()) {
      if (!(*tol > 0.0)) throw DomainError("--tol must be > 0");
      s.spec.options.tol = *tol;
    }
    if (tol && c_ver->parsed() && *tol < 0.0) throw DomainError("--tol must be >= 0");

    if (c_sum->parsed()) return cli::cmd_sum_rate(s, out);
    if (c_lb->parsed()) return cli::cmd_lower_bound(s, out);
    if (c_ver->parsed()) return cli::cmd_verify(s, out, err);
    if (c_sw->parsed()) return cli::cmd_sweep(s, out);
    if (c_mc->parsed()) return cli::cmd_mc_check(s, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const InfeasibleError& e) {
    err << e.what() << "\n";
    return kExitInfeasible;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  }
  return kExitParse;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace vceo
