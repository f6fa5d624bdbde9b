// trapwalk: reproduction driver for the obstacle-survival study.
// Subcommands: env, survival, phase, limitlaw, validate.
// Exit codes: 0 success, 1 validation failure, 2 usage/parameter error.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "trapwalk/environment.hpp"
#include "trapwalk/errors.hpp"
#include "trapwalk/limitlaw.hpp"
#include "trapwalk/montecarlo.hpp"
#include "trapwalk/regimes.hpp"
#include "trapwalk/rng.hpp"
#include "trapwalk/stats.hpp"
#include "trapwalk/survival.hpp"
#include "trapwalk/validate.hpp"
#include "trapwalk/version.hpp"

namespace {

using trapwalk::Coord;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt6(double v) {  // short form for SVG coordinates
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Output sink: named file, or stdout for "-"/empty. Files are opened in
// binary mode so reruns are byte-identical across platforms.
struct Sink {
  std::ofstream file;
  std::ostream* os = &std::cout;
  explicit Sink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file.open(path, std::ios::binary);
      if (!file) throw trapwalk::ParameterError("cannot open output file: " + path);
      os = &file;
    }
  }
  std::ostream& stream() { return *os; }
};

// Every artifact starts with the build id and the fully resolved config, so
// the file alone identifies the run. No timestamps: reruns must be identical.
void write_header(std::ostream& os, const std::string& cmd, const std::string& config,
                  const std::string& schema) {
  os << "# " << trapwalk::kBuildId << "\n";
  os << "# cmd: " << cmd << "\n";
  os << "# config: " << config << "\n";
  if (!schema.empty()) os << "# schema: " << schema << "\n";
}

// ---- env ----

struct EnvArgs {
  int dim = 1;
  Coord radius = 0;
  double p = -1.0;
  std::uint64_t seed = 0;
  std::string out;
};

int run_env(const EnvArgs& a) {
  auto env = trapwalk::sample_environment(a.dim, a.radius, a.p, a.seed);
  Sink sink(a.out);
  std::ostringstream cfg;
  cfg << "dim=" << a.dim << " radius=" << a.radius << " p=" << fmt(a.p)
      << " seed=" << a.seed;
  write_header(sink.stream(), "env", cfg.str(), "dim radius density seed / occupancy-hex");
  trapwalk::write_environment(sink.stream(), env);
  return 0;
}

// ---- survival ----

struct SurvivalArgs {
  std::string env_path;
  int dim = 1;
  Coord radius = 1000;
  double p = -1.0;
  std::uint64_t seed = 0;
  std::vector<double> t_list;
  std::string mode = "annealed-exact";
  Coord x = 0;
  Coord L = -1;  // -1: use env radius
  std::uint64_t n = 100000;
  std::uint64_t mc_seed = 1;
  double tail_tol = 1e-12;
  bool check = false;
  std::string out;
};

int run_survival(const SurvivalArgs& a) {
  bool need_env = (a.mode == "quenched" || a.mode == "averaged");
  std::optional<trapwalk::Environment> env;
  double density = a.p;
  int dim = a.dim;
  if (!a.env_path.empty()) {
    std::ifstream in(a.env_path, std::ios::binary);
    if (!in) throw trapwalk::ParameterError("cannot open environment file: " + a.env_path);
    env = trapwalk::read_environment(in);
    density = env->density;
    dim = env->dim;
  } else if (need_env) {
    if (density < 0.0)
      throw trapwalk::ParameterError("mode " + a.mode + " needs --env or --dim/--radius/--p/--seed");
    env = trapwalk::sample_environment(a.dim, a.radius, a.p, a.seed);
  }
  if (density < 0.0) throw trapwalk::ParameterError("missing --p (or --env carrying a density)");

  std::vector<double> ts = a.t_list;
  if (ts.empty()) ts = {0.0, 1.0, 5.0, 10.0};

  std::optional<trapwalk::GapStructure> gaps;
  if (a.mode == "quenched") {
    if (dim != 1) throw trapwalk::DimensionError("quenched mode is 1-D only");
    gaps = trapwalk::gap_structure(*env);
  }
  if ((a.mode == "annealed-exact") && dim != 1)
    throw trapwalk::DimensionError("annealed-exact mode is 1-D only");

  Sink sink(a.out);
  std::ostringstream cfg;
  cfg << "mode=" << a.mode << " dim=" << dim << " p=" << fmt(density);
  if (env) cfg << " radius=" << env->radius << " env_seed=" << env->seed;
  if (a.mode == "quenched") cfg << " x=" << a.x;
  if (a.mode == "averaged") cfg << " L=" << (a.L < 0 ? env->radius : a.L);
  if (a.mode == "annealed-exact") cfg << " tail_tol=" << fmt(a.tail_tol);
  if (a.mode == "annealed-mc") cfg << " n=" << a.n << " mc_seed=" << a.mc_seed;
  cfg << " check=" << (a.check ? 1 : 0);
  write_header(sink.stream(), "survival", cfg.str(), "t,value,error,mode");

  for (double t : ts) {
    double value = 0.0, error = 0.0;
    if (a.mode == "quenched") {
      auto sv = trapwalk::quenched_survival_1d(*gaps, a.x, t);
      value = sv.value;
      error = sv.error;
    } else if (a.mode == "averaged") {
      Coord L = a.L < 0 ? env->radius : a.L;
      auto sv = trapwalk::averaged_survival(*env, t, L);
      value = sv.value;
      error = sv.error;
    } else if (a.mode == "annealed-exact") {
      auto sv = trapwalk::annealed_exact_1d(density, t, a.tail_tol);
      value = sv.value;
      error = sv.error;
    } else if (a.mode == "annealed-mc") {
      auto est = trapwalk::annealed_mc(dim, density, t, a.n, a.mc_seed);
      value = est.mean;
      error = est.std_error;
    } else {
      throw trapwalk::ParameterError("unknown mode: " + a.mode);
    }
    sink.stream() << fmt(t) << ',' << fmt(value) << ',' << fmt(error) << ',' << a.mode << "\n";
  }

  if (a.check) {
    // exact-vs-MC consistency gate at t = 10 (3 sigma)
    if (dim != 1) throw trapwalk::DimensionError("--check compares the 1-D exact series");
    auto exact = trapwalk::annealed_exact_1d(density, 10.0, a.tail_tol);
    auto mc = trapwalk::annealed_mc(1, density, 10.0, a.n, a.mc_seed);
    double diff = std::fabs(exact.value - mc.mean);
    double slack = 3.0 * mc.std_error + exact.error;
    if (!(diff <= slack)) {
      std::cerr << "check FAILED: annealed exact " << fmt(exact.value) << " vs mc "
                << fmt(mc.mean) << " +/- " << fmt(mc.std_error) << " at t=10 (|diff| "
                << fmt(diff) << " > " << fmt(slack) << ")\n";
      return 1;
    }
    std::cerr << "check ok: exact-vs-mc at t=10 within 3 sigma\n";
  }
  return 0;
}

// ---- phase ----

struct PhaseArgs {
  int dim = 2;
  double gamma_min = 0.0;
  double gamma_max = 1.2;
  int steps = 121;
  std::string out_csv = "figure1.csv";
  std::string out_svg = "figure1.svg";
};

int run_phase(const PhaseArgs& a) {
  if (a.steps < 1) throw trapwalk::ParameterError("empty grid: --steps must be >= 1");
  if (!(a.gamma_min >= 0.0) || !(a.gamma_max > a.gamma_min))
    throw trapwalk::ParameterError("need 0 <= gamma-min < gamma-max");
  std::vector<double> grid(std::size_t(a.steps));
  for (int i = 0; i < a.steps; ++i)
    grid[std::size_t(i)] =
        a.gamma_min + (a.gamma_max - a.gamma_min) * double(i) / double(std::max(a.steps - 1, 1));
  auto rows = trapwalk::figure1_table(a.dim, grid);

  std::ostringstream cfg;
  cfg << "dim=" << a.dim << " gamma_min=" << fmt(a.gamma_min) << " gamma_max="
      << fmt(a.gamma_max) << " steps=" << a.steps;

  {
    Sink sink(a.out_csv);
    write_header(sink.stream(), "phase", cfg.str(), "gamma,abar,inv_abar,cases");
    for (const auto& r : rows) {
      sink.stream() << fmt(r.gamma) << ',' << fmt(r.abar) << ',' << fmt(r.inv_abar) << ',';
      for (std::size_t i = 0; i < r.cases.size(); ++i) {
        if (i) sink.stream() << '|';
        sink.stream() << trapwalk::regime_case_name(r.cases[i]);
      }
      sink.stream() << "\n";
    }
  }

  // hand-emitted SVG: polyline of 1/abar(gamma), vertical markers at gamma_1, gamma_2
  auto dc = trapwalk::constants(a.dim, 0.5);  // thresholds depend on d only
  const double W = 640.0, H = 440.0, ml = 64.0, mr = 24.0, mt = 24.0, mb = 52.0;
  double ymax = 0.0;
  for (const auto& r : rows)
    if (std::isfinite(r.inv_abar)) ymax = std::max(ymax, r.inv_abar);
  if (ymax <= 0.0) ymax = 1.0;
  ymax *= 1.08;
  auto px = [&](double g) {
    return ml + (g - a.gamma_min) / (a.gamma_max - a.gamma_min) * (W - ml - mr);
  };
  auto py = [&](double v) { return H - mb - v / ymax * (H - mt - mb); };

  Sink svg(a.out_svg);
  std::ostream& o = svg.stream();
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt6(W) << "\" height=\""
    << fmt6(H) << "\" viewBox=\"0 0 " << fmt6(W) << ' ' << fmt6(H) << "\">\n";
  o << "<!-- " << trapwalk::kBuildId << " cmd: phase " << cfg.str() << " -->\n";
  o << "<rect width=\"" << fmt6(W) << "\" height=\"" << fmt6(H) << "\" fill=\"white\"/>\n";
  // axes
  o << "<line x1=\"" << fmt6(ml) << "\" y1=\"" << fmt6(H - mb) << "\" x2=\"" << fmt6(W - mr)
    << "\" y2=\"" << fmt6(H - mb) << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << fmt6(ml) << "\" y1=\"" << fmt6(mt) << "\" x2=\"" << fmt6(ml)
    << "\" y2=\"" << fmt6(H - mb) << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << fmt6((ml + W - mr) / 2) << "\" y=\"" << fmt6(H - 14)
    << "\" text-anchor=\"middle\" font-size=\"14\">gamma</text>\n";
  o << "<text x=\"18\" y=\"" << fmt6((mt + H - mb) / 2)
    << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 18 "
    << fmt6((mt + H - mb) / 2) << ")\">1/abar(gamma)</text>\n";
  // y ticks at 0, 0.5, 1
  for (double v : {0.0, 0.5, 1.0}) {
    if (v > ymax) continue;
    o << "<line x1=\"" << fmt6(ml - 4) << "\" y1=\"" << fmt6(py(v)) << "\" x2=\"" << fmt6(ml)
      << "\" y2=\"" << fmt6(py(v)) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fmt6(ml - 8) << "\" y=\"" << fmt6(py(v) + 4)
      << "\" text-anchor=\"end\" font-size=\"12\">" << fmt6(v) << "</text>\n";
  }
  // threshold markers
  struct Mark { double g; const char* label; };
  for (const Mark m : {Mark{dc.gamma1, "gamma1"}, Mark{dc.gamma2, "gamma2"}}) {
    if (m.g < a.gamma_min || m.g > a.gamma_max) continue;
    o << "<line x1=\"" << fmt6(px(m.g)) << "\" y1=\"" << fmt6(mt) << "\" x2=\"" << fmt6(px(m.g))
      << "\" y2=\"" << fmt6(H - mb) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    o << "<text x=\"" << fmt6(px(m.g) + 4) << "\" y=\"" << fmt6(mt + 14)
      << "\" font-size=\"12\">" << m.label << " = " << fmt6(m.g) << "</text>\n";
    o << "<text x=\"" << fmt6(px(m.g)) << "\" y=\"" << fmt6(H - mb + 16)
      << "\" text-anchor=\"middle\" font-size=\"12\">" << fmt6(m.g) << "</text>\n";
  }
  // curve (skip the +inf sentinel at gamma = 0)
  o << "<polyline fill=\"none\" stroke=\"#1f3a93\" stroke-width=\"1.5\" points=\"";
  bool first = true;
  for (const auto& r : rows) {
    if (!std::isfinite(r.inv_abar)) continue;
    if (!first) o << ' ';
    o << fmt6(px(r.gamma)) << ',' << fmt6(py(r.inv_abar));
    first = false;
  }
  o << "\"/>\n</svg>\n";
  return 0;
}

// ---- limitlaw ----

struct LimitlawArgs {
  double gamma = 0.5;
  double p = 0.5;
  double c = 1.0;
  std::vector<double> t_list;
  std::uint64_t n_envs = 10000;
  bool centered = false;
  std::uint64_t seed = 1;
  double u_max = 5.0;
  int u_steps = 1001;  // the |ecf - phi| peaks are narrow; coarse grids under-read the max
  std::string out_samples = "limitlaw_samples.csv";
  std::string out_cf = "limitlaw_cf.csv";
  std::string out_summary = "limitlaw_summary.txt";
};

int run_limitlaw(const LimitlawArgs& a) {
  auto dc = trapwalk::constants(1, a.p);
  if (!(a.gamma > 0.0) || !(a.gamma < dc.gamma2)) {
    std::ostringstream msg;
    msg << "gamma must lie in (0, gamma2 = " << fmt(dc.gamma2)
        << "): the limit law needs characteristic exponent a1 = ((3/2)gamma)^3 < 2, i.e. "
        << "its x^2-integral near 0 diverges at gamma >= gamma2";
    throw trapwalk::ParameterError(msg.str());
  }
  if (a.n_envs == 0) throw trapwalk::ParameterError("--n-envs must be >= 1");
  if (a.u_steps < 2) throw trapwalk::ParameterError("--u-steps must be >= 2");

  auto sp = trapwalk::scaling_params(a.gamma, a.p, a.c);
  std::vector<double> ts = a.t_list;
  if (ts.empty())
    ts = {sp.time_at(10, 0.9), sp.time_at(15, 0.9), sp.time_at(20, 0.9)};

  auto triple = trapwalk::levy_atoms(a.gamma, a.p, a.c, a.u_max, 1e-10);
  auto bv = trapwalk::beta(a.gamma, a.p, a.c,
                           a.centered ? trapwalk::BetaKind::Beta2 : trapwalk::BetaKind::Beta1,
                           1e-12);
  triple.beta = bv.value;  // measure-integral route (beta1/beta2 per centering case)

  std::vector<double> u_grid(std::size_t(a.u_steps));
  for (int i = 0; i < a.u_steps; ++i)
    u_grid[std::size_t(i)] = -a.u_max + 2.0 * a.u_max * double(i) / double(a.u_steps - 1);

  std::ostringstream cfg;
  cfg << "gamma=" << fmt(a.gamma) << " p=" << fmt(a.p) << " c=" << fmt(a.c) << " t=";
  for (std::size_t i = 0; i < ts.size(); ++i) cfg << (i ? "," : "") << fmt(ts[i]);
  cfg << " n_envs=" << a.n_envs << " centered=" << (a.centered ? 1 : 0) << " seed=" << a.seed
      << " u_max=" << fmt(a.u_max) << " u_steps=" << a.u_steps;

  Sink samples_sink(a.out_samples);
  write_header(samples_sink.stream(), "limitlaw", cfg.str(), "t,index,value");

  std::vector<double> max_disc(ts.size(), 0.0);
  std::vector<double> means(ts.size(), 0.0);
  std::vector<Coord> brackets(ts.size(), 0);
  std::vector<std::uint64_t> gap_counts(ts.size(), 0);
  std::vector<double> normalizers(ts.size(), 0.0);
  std::vector<double> tail_rates(ts.size(), 0.0);  // n(t) P(Y > 1) estimate
  std::vector<std::complex<double>> last_ecf;

  for (std::size_t ti = 0; ti < ts.size(); ++ti) {
    trapwalk::NormalizedSumSampler sampler(a.gamma, a.p, a.c, ts[ti], a.centered);
    brackets[ti] = sampler.params().bracket(ts[ti]);
    gap_counts[ti] = sampler.gap_count();
    normalizers[ti] = sampler.normalizer();
    std::vector<double> draws(a.n_envs);
    trapwalk::KahanSum mean_acc, tail_acc;
    for (std::uint64_t i = 0; i < a.n_envs; ++i) {
      trapwalk::SplitMix64 rng(trapwalk::derive_seed(a.seed, {std::uint64_t(ti), i}));
      auto d = sampler.draw(rng);
      draws[i] = d.value;
      mean_acc.add(d.value);
      tail_acc.add(double(d.tail_count));
      samples_sink.stream() << fmt(ts[ti]) << ',' << i << ',' << fmt(d.value) << "\n";
    }
    means[ti] = mean_acc.value() / double(a.n_envs);
    tail_rates[ti] = tail_acc.value() / double(a.n_envs);
    auto ecf = trapwalk::empirical_cf(draws, u_grid);
    double md = 0.0;
    for (std::size_t ui = 0; ui < u_grid.size(); ++ui)
      md = std::max(md, std::abs(ecf[ui] - trapwalk::char_fn(u_grid[ui], triple)));
    max_disc[ti] = md;
    if (ti + 1 == ts.size()) last_ecf = std::move(ecf);
  }

  {
    Sink cf_sink(a.out_cf);
    std::ostringstream cfcfg;
    cfcfg << cfg.str() << " cf_t=" << fmt(ts.back());
    write_header(cf_sink.stream(), "limitlaw", cfcfg.str(), "u,re_ecf,im_ecf,re_phi,im_phi");
    for (std::size_t ui = 0; ui < u_grid.size(); ++ui) {
      auto phi = trapwalk::char_fn(u_grid[ui], triple);
      cf_sink.stream() << fmt(u_grid[ui]) << ',' << fmt(last_ecf[ui].real()) << ','
                       << fmt(last_ecf[ui].imag()) << ',' << fmt(phi.real()) << ','
                       << fmt(phi.imag()) << "\n";
    }
  }

  Sink sum_sink(a.out_summary);
  std::ostream& s = sum_sink.stream();
  write_header(s, "limitlaw", cfg.str(), "");
  s << "gamma " << fmt(a.gamma) << "\n";
  s << "p " << fmt(a.p) << "\n";
  s << "c " << fmt(a.c) << "\n";
  s << "a1 " << fmt(sp.a1) << "\n";
  s << "s1 " << fmt(sp.s1) << "\n";
  s << "c2 " << fmt(sp.c2) << "\n";
  s << "nu " << fmt(sp.nu) << "\n";
  s << "centered " << (a.centered ? 1 : 0) << "\n";
  s << "beta " << fmt(triple.beta) << "\n";
  s << "beta_series " << fmt(bv.series) << "\n";
  s << "beta_discrepancy " << fmt(bv.discrepancy) << "\n";
  s << "sigma2 " << fmt(triple.sigma2) << "\n";
  s << "n_atoms " << triple.atoms.size() << "\n";
  s << "atom_truncation_error " << fmt(triple.truncation_error) << "\n";
  s << "n_envs " << a.n_envs << "\n";
  s << "neg_levy_tail_at_1 " << fmt(trapwalk::levy_tail(1.0, a.gamma, a.p, a.c)) << "\n";
  for (std::size_t ti = 0; ti < ts.size(); ++ti) {
    s << "t" << ti << " " << fmt(ts[ti]) << "\n";
    s << "t" << ti << "_bracket " << brackets[ti] << "\n";
    s << "t" << ti << "_gap_count " << gap_counts[ti] << "\n";
    s << "t" << ti << "_normalizer " << fmt(normalizers[ti]) << "\n";
    s << "t" << ti << "_sample_mean " << fmt(means[ti]) << "\n";
    s << "t" << ti << "_max_cf_discrepancy " << fmt(max_disc[ti]) << "\n";
    s << "t" << ti << "_mean_tail_count " << fmt(tail_rates[ti]) << "\n";
  }
  bool decreasing = true;
  for (std::size_t ti = 1; ti < ts.size(); ++ti)
    if (!(max_disc[ti] <= max_disc[ti - 1])) decreasing = false;
  s << "cf_discrepancy_decreasing " << (decreasing ? 1 : 0) << "\n";
  return 0;
}

// ---- validate ----

struct ValidateArgs {
  std::string filter;
  std::uint64_t seed = 1;
};

int run_validate(const ValidateArgs& a) {
  auto results = trapwalk::run_validation(a.filter, a.seed);
  if (results.empty()) {
    std::cerr << "no checks match filter '" << a.filter << "'\n";
    return 2;
  }
  const trapwalk::CheckResult* first_fail = nullptr;
  for (const auto& r : results) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%7.2fs", r.seconds);
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name;
    for (std::size_t i = r.name.size(); i < 34; ++i) std::cout << ' ';
    std::cout << buf << "  " << r.detail << "\n";
    if (!r.pass && !first_fail) first_fail = &r;
  }
  if (first_fail) {
    std::cerr << "validation FAILED at " << first_fail->name << ": " << first_fail->detail
              << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("trapwalk ") + trapwalk::kVersion +
               " - obstacle-survival reproduction driver"};
  app.require_subcommand(1);

  EnvArgs ea;
  auto* env_cmd = app.add_subcommand(
      "env", "Sample a Bernoulli obstacle environment and write it out.\n"
             "Output: '#' header lines, then 'dim radius density seed' and an occupancy "
             "hex string.");
  env_cmd->add_option("--dim", ea.dim, "lattice dimension")->required();
  env_cmd->add_option("--radius", ea.radius, "box radius (sites in [-radius, radius]^d)")
      ->required();
  env_cmd->add_option("--p", ea.p, "obstacle density in (0,1)")->required();
  env_cmd->add_option("--seed", ea.seed, "environment seed (default 0)");
  env_cmd->add_option("--out", ea.out, "output path ('-' for stdout)")->required();

  SurvivalArgs sa;
  auto* surv_cmd = app.add_subcommand(
      "survival", "Evaluate survival probabilities.\n"
                  "CSV schema: t,value,error,mode. Modes: quenched (exact 1-D gap spectrum), "
                  "averaged (box average), annealed-exact (1-D series), annealed-mc "
                  "(Wiener-sausage Monte Carlo).");
  surv_cmd->add_option("--env", sa.env_path, "environment file (from `trapwalk env`)");
  surv_cmd->add_option("--dim", sa.dim, "dimension when generating inline (default 1)");
  surv_cmd->add_option("--radius", sa.radius, "box radius when generating inline");
  surv_cmd->add_option("--p", sa.p, "obstacle density");
  surv_cmd->add_option("--seed", sa.seed, "environment seed when generating inline");
  surv_cmd->add_option("--t", sa.t_list, "time points (default 0 1 5 10)");
  surv_cmd->add_option("--mode", sa.mode, "quenched|averaged|annealed-exact|annealed-mc")
      ->check(CLI::IsMember({"quenched", "averaged", "annealed-exact", "annealed-mc"}));
  surv_cmd->add_option("--x", sa.x, "start site for quenched mode (default 0)");
  surv_cmd->add_option("--L", sa.L, "averaging scale for averaged mode (default env radius)");
  surv_cmd->add_option("--n", sa.n, "Monte Carlo sample count (default 1e5)");
  surv_cmd->add_option("--mc-seed", sa.mc_seed, "Monte Carlo seed (default 1)");
  surv_cmd->add_option("--tail-tol", sa.tail_tol, "series tail tolerance (default 1e-12)");
  surv_cmd->add_flag("--check", sa.check, "enforce exact-vs-mc 3 sigma agreement at t=10");
  surv_cmd->add_option("--out", sa.out, "output CSV path (default stdout)");

  PhaseArgs pa;
  auto* phase_cmd = app.add_subcommand(
      "phase", "Sweep the phase diagram curve 1/abar(gamma).\n"
               "CSV schema: gamma,abar,inv_abar,cases (cases '|'-separated). Also emits an "
               "SVG polyline with gamma1/gamma2 markers.");
  phase_cmd->add_option("--dim", pa.dim, "dimension (default 2)");
  phase_cmd->add_option("--gamma-min", pa.gamma_min, "grid start (default 0)");
  phase_cmd->add_option("--gamma-max", pa.gamma_max, "grid end (default 1.2)");
  phase_cmd->add_option("--steps", pa.steps, "grid point count (default 121)");
  phase_cmd->add_option("--out-csv", pa.out_csv, "CSV path (default figure1.csv)");
  phase_cmd->add_option("--out-svg", pa.out_svg, "SVG path (default figure1.svg)");

  LimitlawArgs la;
  auto* ll_cmd = app.add_subcommand(
      "limitlaw", "Run the 1-D normalized gap-sum experiment against the infinitely "
                  "divisible limit.\n"
                  "Samples CSV schema: t,index,value. CF CSV schema: "
                  "u,re_ecf,im_ecf,re_phi,im_phi (largest t). Summary: flat key/value text "
                  "with per-t discrepancy norms.");
  ll_cmd->add_option("--gamma", la.gamma, "exponential scale in (0, gamma2) (default 0.5)");
  ll_cmd->add_option("--p", la.p, "obstacle density (default 0.5)");
  ll_cmd->add_option("--c", la.c, "gap-count constant (default 1)");
  ll_cmd->add_option("--t-list", la.t_list,
                     "time points (default: three t with brackets 10, 15, 20)");
  ll_cmd->add_option("--n-envs", la.n_envs, "draws per time point (default 1e4)");
  ll_cmd->add_flag("--centered", la.centered, "centered sums (case gamma1 < gamma < gamma2)");
  ll_cmd->add_option("--seed", la.seed, "master seed (default 1)");
  ll_cmd->add_option("--u-max", la.u_max, "CF grid half-width (default 5)");
  ll_cmd->add_option("--u-steps", la.u_steps, "CF grid point count (default 1001)");
  ll_cmd->add_option("--out-samples", la.out_samples, "samples CSV path");
  ll_cmd->add_option("--out-cf", la.out_cf, "CF comparison CSV path");
  ll_cmd->add_option("--out-summary", la.out_summary, "summary text path");

  ValidateArgs va;
  auto* val_cmd = app.add_subcommand(
      "validate", "Run the invariant suite; exit 0 iff every check passes.");
  val_cmd->add_option("--filter", va.filter, "substring filter on check names");
  val_cmd->add_option("--seed", va.seed, "suite seed (default 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*env_cmd) return run_env(ea);
    if (*surv_cmd) return run_survival(sa);
    if (*phase_cmd) return run_phase(pa);
    if (*ll_cmd) return run_limitlaw(la);
    if (*val_cmd) return run_validate(va);
  } catch (const trapwalk::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::logic_error& e) {
    // parameter/domain/dimension/size/divergence errors: bad inputs
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
