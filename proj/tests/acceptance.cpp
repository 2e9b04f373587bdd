// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "vceo/bound.hpp"
#include "vceo/cli.hpp"
#include "vceo/equivalence.hpp"
#include "vceo/mc.hpp"
#include "vceo/optimize.hpp"
#include "vceo/scheme.hpp"

using namespace vceo;

namespace {

struct Instance {
  SourceModel model;
  DistortionTriple targets;
  LowerBoundResult lb;
};

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail, double seconds) {
  std::printf("[%s] criterion %d: %s (%s; %.1f s)\n", ok ? "PASS" : "FAIL", id, what.c_str(),
              detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<Instance> make_instances(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Instance> out;
  while (static_cast<int>(out.size()) < n) {
    Instance in;
    in.model = oracle::random_model(rng);
    in.targets = oracle::random_condition_targets(rng, in.model);
    if (!in.targets.valid_for(in.model) || !condition_holds(in.model, in.targets)) continue;
    out.push_back(in);
  }
  return out;
}

void equality(std::vector<Instance>& insts) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  bool ok = true;
  for (auto& in : insts) {
    in.lb = lower_bound(in.model, in.targets);
    const OptimizeResult opt = optimize_sum_rate(in.model, in.targets);
    const double rel = std::abs(opt.rates.sum_rate - in.lb.value) / in.lb.value;
    worst = std::max(worst, rel);
    ok = ok && rel <= 1e-3;
  }
  const double secs = since(t0);
  report(1, ok && secs <= 60.0, "achievable equals lower bound under the condition",
         std::to_string(insts.size()) + " instances, max rel gap " + sci(worst) + " <= 1e-3", secs);
}

void identity() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2002);
  std::uniform_real_distribution<double> ls(-3.0, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const SourceModel m = oracle::random_model(rng);
    const SchemeParams p = oracle::random_params(rng, m);
    const std::array<double, 2> sz{std::pow(10.0, ls(rng)), std::pow(10.0, ls(rng))};
    const double lhs = sum_rate(m, p).sum_rate;
    const double rhs = achievable_decomposition(m, p, sz);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  const double secs = since(t0);
  report(2, worst <= 1e-9 && secs <= 10.0, "sum-rate decomposition identity",
         "1000 pairs, max |lhs - rhs| " + sci(worst) + " nats <= 1e-9", secs);
}

void closed_forms() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(3003);
  double worst = 0.0;
  auto rel = [&](double a, double b) { worst = std::max(worst, std::abs(a - b) / std::abs(b)); };
  for (int i = 0; i < 1000; ++i) {
    const SourceModel m = oracle::random_model(rng);
    const SchemeParams p = oracle::random_params(rng, m);
    const LabeledCov cov = build_joint_cov(m, p);
    rel(receiver_distortion(m, p, 1), conditional_var(cov, Var::S, {Var::U11, Var::U21}));
    rel(receiver_distortion(m, p, 2), conditional_var(cov, Var::S, {Var::U12, Var::U22}));
    rel(central_distortion(m, p),
        conditional_var(cov, Var::S, {Var::U11, Var::U12, Var::U21, Var::U22}));
    const MarginalParams mp = marginal_params(m, p);
    for (int k = 1; k <= 2; ++k) {
      for (int l = 1; l <= 2; ++l)
        rel(mp.dk(k, l), conditional_var(cov, x_var(k), {u_var(k, l), Var::S}));
      rel(mp.tk(k).value(), conditional_mi(cov, {x_var(k)}, {u_var(k, 1), u_var(k, 2)}, {Var::S}));
    }
  }
  report(3, worst <= 1e-10, "closed forms agree with general conditioning",
         "1000 parameter draws, max rel err " + sci(worst) + " <= 1e-10", since(t0));
}

void weak_duality(const std::vector<Instance>& insts) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(4004);
  std::uniform_real_distribution<double> lw(-4.0, 4.0), rho(0.0, 0.99);
  double worst = kInf;
  int checked = 0;
  for (const auto& in : insts) {
    for (int j = 0; j < 100; ++j) {
      const std::vector<double> x{lw(rng), lw(rng), lw(rng), lw(rng), rho(rng), rho(rng)};
      const SchemeParams p = detail::restore(in.model, in.targets, detail::decode(in.model, x));
      if (receiver_distortion(in.model, p, 1) > in.targets.d1 ||
          receiver_distortion(in.model, p, 2) > in.targets.d2 ||
          central_distortion(in.model, p) > in.targets.d0)
        continue;
      double rate;
      try {
        rate = sum_rate(in.model, p).sum_rate;
      } catch (const InfiniteInformation&) {
        continue;
      }
      ++checked;
      worst = std::min(worst, rate - in.lb.value);
    }
  }
  report(4, worst >= -1e-9 && checked >= 100 * static_cast<int>(insts.size()) * 9 / 10,
         "weak duality", std::to_string(checked) + " feasible schemes, min slack " + sci(worst) +
                             " >= -1e-9",
         since(t0));
}

/// Random points of P for each instance, from both branches.
std::vector<std::pair<std::size_t, BoundParams>> sample_p(const std::vector<Instance>& insts) {
  std::mt19937_64 rng(5005);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<std::size_t, BoundParams>> out;
  for (std::size_t i = 0; i < insts.size(); ++i) {
    const detail::PParametrization par(insts[i].model, insts[i].targets);
    for (int j = 0; j < 200; ++j) {
      const auto p = j % 2 ? par.p1(u(rng), u(rng), u(rng)) : par.p2(u(rng), u(rng));
      if (p) out.emplace_back(i, *p);
    }
    out.emplace_back(i, insts[i].lb.argmin);
  }
  return out;
}

void classification(const std::vector<Instance>& insts,
                    const std::vector<std::pair<std::size_t, BoundParams>>& pts) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = -kInf;
  int bad_class = 0, outside_p = 0;
  for (const auto& [i, p] : pts) {
    const auto& in = insts[i];
    if (in_P(in.model, in.targets, p) == PMembership::None) ++outside_p;
    for (int k = 1; k <= 2; ++k) {
      const double n = in.model.noise(k);
      worst = std::max(worst, p.d(k, 1) + p.d(k, 2) - n * (1.0 + std::exp(-2.0 * p.t(k))));
      const FClass c = classify_F_k(n, p.d(k, 1), p.d(k, 2), p.t(k));
      if (c != FClass::F1 && c != FClass::F2) ++bad_class;
    }
  }
  report(5, worst <= 1e-12 && bad_class == 0 && outside_p == 0,
         "points of P satisfy the sum inequality and avoid F_k3",
         std::to_string(pts.size()) + " points, max margin " + sci(worst) + " <= 1e-12, " +
             std::to_string(bad_class) + " outside F_k1/F_k2",
         since(t0));
}

void zero_crossing(const std::vector<Instance>& insts,
                   const std::vector<std::pair<std::size_t, BoundParams>>& pts) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_info = 0.0, worst_psd = kInf, worst_diff = 0.0;
  int case1 = 0, errors = 0;
  for (const auto& [i, p] : pts) {
    const auto& in = insts[i];
    try {
      const EquivalenceReport rep = construct_matching_scheme(in.model, in.targets, p);
      worst_diff = std::max(worst_diff, rep.diff);
      for (int k = 1; k <= 2; ++k) {
        const auto s = static_cast<std::size_t>(k - 1);
        if (rep.cases[s] != MatchCase::ZeroCrossing) continue;
        ++case1;
        worst_info = std::max(worst_info, rep.cond_info[s]);
        worst_psd = std::min(worst_psd, rep.params.w(k, 1) * rep.params.w(k, 2) -
                                            rep.params.a(k) * rep.params.a(k));
      }
    } catch (const std::exception&) {
      ++errors;
    }
  }
  report(6, case1 > 0 && errors == 0 && worst_info <= 1e-12 && worst_psd >= -1e-12,
         "zero-crossing construction decouples the descriptions",
         std::to_string(case1) + " case-1 encoders, max I " + sci(worst_info) +
             " <= 1e-12, min PSD margin " + sci(worst_psd) + ", max identity diff " +
             sci(worst_diff),
         since(t0));
}

void monte_carlo() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(6006);
  double worst_z = 0.0;
  bool ok = true;
  for (int i = 0; i < 20; ++i) {
    const SourceModel m = oracle::random_model(rng);
    const SchemeParams p = oracle::random_params(rng, m);
    const McReport rep = mc_validate(m, p, 1000000, 100 + static_cast<std::uint64_t>(i));
    for (const auto& q : rep.rows) worst_z = std::max(worst_z, q.z_score());
    ok = ok && rep.all_pass(5.0);
  }
  const SourceModel m{1.0, 1.0, 1.0};
  const SchemeParams p{1, 1, 1, 1, 0, 0};
  const bool same = sample_joint(m, p, 1000000, 42).data == sample_joint(m, p, 1000000, 42).data;
  report(7, ok && same, "Monte-Carlo agreement and fixed-seed reproducibility",
         "20 instances at n = 1e6, max z " + sci(worst_z) + " <= 5, repeat draw " +
             (same ? "bit-identical" : "differs"),
         since(t0));
}

void rate_tuples() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(8008);
  int violated = 0;
  double worst_sum = 0.0;
  for (int i = 0; i < 100; ++i) {
    const SourceModel m = oracle::random_model(rng);
    const SchemeParams p = oracle::random_params(rng, m);
    for (double delta : {0.1, 0.01}) {
      const RateBreakdown t = rate_tuple(m, p, delta);
      double total = 0.0;
      for (double r : *t.rates) total += r;
      worst_sum = std::max(worst_sum, std::abs(total - (t.sum_rate + delta)));
      for (const auto& c : rate_constraints(m, p, t)) violated += c.strict() ? 0 : 1;
    }
  }
  report(8, violated == 0 && worst_sum <= 1e-9, "explicit rate tuples",
         "200 tuples, " + std::to_string(violated) + " non-strict constraints, max |sum - (R + d)| " +
             sci(worst_sum) + " <= 1e-9",
         since(t0));
}

void sweep() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string path = "acceptance_unit_instance.json";
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs(R"({"model": {"sigma_s2": 1, "sigma_n1_2": 1, "sigma_n2_2": 1},
 "targets": {"d1": 0.4, "d2": 0.4, "d0": 0.35}})",
               f);
    std::fclose(f);
  }
  std::ostringstream out, err;
  const int code = run_cli({"sweep", "--instance", path, "--var", "D0", "--from", "0.30", "--to",
                            "0.395", "--steps", "9"},
                           out, err);
  std::remove(path.c_str());
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  bool ok = code == 0 && line == kSweepHeader;
  int holding = 0, failing = 0;
  double worst = 0.0;
  while (std::getline(lines, line)) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    if (cols.size() != 6) {
      ok = false;
      continue;
    }
    if (cols[5] != "true") {
      ++failing;
      continue;
    }
    ++holding;
    const double gap = std::stod(cols[4]);
    worst = std::max(worst, std::abs(gap));
    ok = ok && std::isfinite(gap) && std::abs(gap) <= 1e-3;
  }
  report(9, ok && holding > 0 && failing > 0, "D0 sweep across the condition boundary",
         std::to_string(holding) + " rows with the condition, " + std::to_string(failing) +
             " without, max |gap| " + sci(worst) + " <= 1e-3",
         since(t0));
}

}  // namespace

int main() {
  std::vector<Instance> insts = make_instances(20, 1001);
  equality(insts);
  identity();
  closed_forms();
  weak_duality(insts);
  const auto pts = sample_p(insts);
  classification(insts, pts);
  zero_crossing(insts, pts);
  monte_carlo();
  rate_tuples();
  sweep();
  std::printf("%s: %d criterion failure(s)\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
