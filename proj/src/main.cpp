// patchlab CLI: runs the laboratory instruments and writes CSV/SVG/JSON
// artifacts into an output directory (--out, PATCHLAB_OUT, or ./patchlab_out).
// Exit codes: 0 success, 1 runtime failure in a run, 2 usage or config error.

#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "patchlab/contour.hpp"
#include "patchlab/dispersion.hpp"
#include "patchlab/fourier.hpp"
#include "patchlab/normal_form.hpp"
#include "patchlab/paradiff.hpp"
#include "patchlab/runio.hpp"
#include "patchlab/timestep.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using namespace patchlab;

// config file values fill in any flag the user did not pass explicitly
void merge_config(const CLI::App* sub, const std::string& cfg_path,
                  const std::set<std::string>& allowed,
                  const std::function<void(const json&)>& take) {
  if (cfg_path.empty()) return;
  json cfg = load_config(cfg_path);
  require_known_keys(cfg, allowed);
  json effective;
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    std::string flag = "--" + it.key();
    for (auto& ch : flag)
      if (ch == '_') ch = '-';
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    if (opt && opt->count() > 0) continue;  // explicit flag wins
    effective[it.key()] = it.value();
  }
  take(effective);
}

int run_dispersion(double alpha, long jmax, const std::string& out) {
  AlphaParam ap(alpha);
  if (jmax < 1) throw std::invalid_argument("dispersion: jmax must be >= 1");
  fs::path dir = resolve_out_dir(out);
  RunRecord rec("dispersion", {{"alpha", alpha}, {"jmax", jmax}});

  std::vector<std::vector<double>> rows;
  SvgSeries som{"omega", {}, {}}, sod{"omega_dot", {}, {}};
  for (long j = 0; j <= jmax; ++j) {
    double dj = static_cast<double>(j);
    rows.push_back({dj, j ? lambda_ratio(alpha, dj) : 0.0, omega(ap, dj), omega_dot(ap, dj),
                    omega_dot_prime(ap, dj)});
    som.x.push_back(dj);
    som.y.push_back(omega(ap, dj));
    sod.x.push_back(dj);
    sod.y.push_back(omega_dot(ap, dj));
  }
  fs::path csv = dir / "dispersion.csv";
  write_csv(csv, {"j", "lambda", "omega", "omega_dot", "omega_dot_prime"}, rows);
  write_svg_plot(dir / "dispersion.svg", "mode speeds", "j", "speed", {som, sod});
  rec.add_output(csv, rows.size());
  rec.note("c_alpha", ap.c_alpha);
  rec.note("C_alpha", ap.C_alpha);
  rec.note("V_alpha", ap.V_alpha);
  rec.note("omega_1", omega(ap, 1.0));
  rec.write(dir / "dispersion_run.json");
  std::printf("dispersion: alpha=%g, %ld modes, omega(1)=%g -> %s\n", alpha, jmax + 1,
              omega(ap, 1.0), csv.string().c_str());
  return 0;
}

int run_resonance(double alpha, long kmax, const std::string& out) {
  AlphaParam ap(alpha);
  fs::path dir = resolve_out_dir(out);
  RunRecord rec("resonance", {{"alpha", alpha}, {"kmax", kmax}});

  ResonanceScan scan = resonance_scan(ap, kmax);
  std::vector<std::vector<double>> rows;
  SvgSeries per{"min divisor", {}, {}};
  for (long k = 2; k <= kmax; ++k) {
    rows.push_back({static_cast<double>(k), scan.per_k[k]});
    per.x.push_back(static_cast<double>(k));
    per.y.push_back(scan.per_k[k]);
  }
  fs::path csv = dir / "resonance.csv";
  write_csv(csv, {"k", "min_divisor"}, rows);
  write_svg_plot(dir / "resonance.svg", "smallest three-wave divisor per output mode", "k",
                 "min |divisor|", {per});
  rec.add_output(csv, rows.size());
  rec.note("floor", scan.floor);
  rec.note("attained_at", json::array({scan.n, scan.j, scan.k}));
  rec.note("omega_2", omega(ap, 2.0));
  rec.note("floor_over_omega2", scan.floor / omega(ap, 2.0));
  rec.write(dir / "resonance_run.json");
  std::printf("resonance: alpha=%g kmax=%ld floor=%.12g at (n,j,k)=(%ld,%ld,%ld), omega(2)=%.12g\n",
              alpha, kmax, scan.floor, scan.n, scan.j, scan.k, omega(ap, 2.0));
  return 0;
}

int run_simulate(double alpha, double eps, std::size_t grid_n, std::size_t grid_m, double dt,
                 double t_final, std::size_t record_every, double norm_order,
                 const std::string& out) {
  AlphaParam ap(alpha);
  ContourOps ops(ap, grid_n, grid_m);
  fs::path dir = resolve_out_dir(out);
  RunRecord rec("simulate", {{"alpha", alpha},
                             {"eps", eps},
                             {"grid_n", grid_n},
                             {"grid_m", grid_m},
                             {"dt", dt},
                             {"t_final", t_final},
                             {"record_every", record_every},
                             {"norm_order", norm_order}});

  std::vector<double> x = grid_points(grid_n);
  std::vector<double> h0(grid_n);
  for (std::size_t i = 0; i < grid_n; ++i) h0[i] = eps * std::cos(x[i]);
  Spectrum f0 = ops.fft_n().analyze(h_to_f_grid(h0));

  EvolveOptions opt;
  opt.dt = dt;
  opt.t_final = t_final;
  opt.record_every = record_every;
  opt.h_norm_order = norm_order;
  EvolveResult r = evolve(ops, f0, opt);

  const EvolveSample& s0 = r.history.front();
  double e_scale = std::abs(s0.energy - ops.energy(Spectrum(grid_n)));
  double dj = 0.0, da = 0.0, de = 0.0;
  std::vector<std::vector<double>> rows;
  SvgSeries pj{"momentum drift", {}, {}}, pa{"area drift", {}, {}}, pe{"energy drift", {}, {}};
  SvgSeries pn{"h norm", {}, {}};
  for (const EvolveSample& s : r.history) {
    rows.push_back({s.t, s.momentum, s.area, s.energy, s.h_norm});
    double rj = std::abs(s.momentum - s0.momentum) / s0.momentum;
    double ra = std::abs(s.area - s0.area);
    double re = std::abs(s.energy - s0.energy) / e_scale;
    dj = std::max(dj, rj);
    da = std::max(da, ra);
    de = std::max(de, re);
    pj.x.push_back(s.t);
    pj.y.push_back(rj);
    pa.x.push_back(s.t);
    pa.y.push_back(ra);
    pe.x.push_back(s.t);
    pe.y.push_back(re);
    pn.x.push_back(s.t);
    pn.y.push_back(s.h_norm);
  }
  fs::path csv = dir / "history.csv";
  write_csv(csv, {"t", "momentum", "area", "energy", "h_norm"}, rows);
  write_svg_plot(dir / "drift.svg", "conserved quantity drift", "t", "drift", {pj, pa, pe}, false,
                 true);
  write_svg_plot(dir / "h_norm.svg", "radial deviation norm", "t", "||h||", {pn});
  rec.add_output(csv, rows.size());
  rec.note("drift_momentum_rel", dj);
  rec.note("drift_area_abs", da);
  rec.note("drift_energy_rel", de);
  rec.note("sup_h_norm", r.sup_h_norm);
  rec.note("steps", r.steps);
  rec.note("completed", r.completed);
  if (!r.completed) rec.note("failure", r.failure);
  rec.write(dir / "simulate_run.json");

  std::printf("simulate: alpha=%g eps=%g N=%zu M=%zu dt=%g T=%g\n", alpha, eps, grid_n, grid_m, dt,
              t_final);
  std::printf("  drift: momentum %.3e (rel), area %.3e (abs), energy %.3e (rel)\n", dj, da, de);
  std::printf("  sup ||h||_{H^%g} = %.6g over %zu steps, %.2fs\n", norm_order, r.sup_h_norm,
              r.steps, r.wall_seconds);
  if (!r.completed) {
    std::printf("  run FAILED: %s\n", r.failure.c_str());
    return 1;
  }
  return 0;
}

int run_lifespan(double alpha, const std::vector<double>& eps_list, double c_budget, double s_order,
                 double dt, std::size_t grid_n, std::size_t grid_m, const std::string& out) {
  AlphaParam ap(alpha);
  ContourOps ops(ap, grid_n, grid_m);
  fs::path dir = resolve_out_dir(out);
  RunRecord rec("lifespan", {{"alpha", alpha},
                             {"eps", eps_list},
                             {"c_budget", c_budget},
                             {"s_order", s_order},
                             {"dt", dt},
                             {"grid_n", grid_n},
                             {"grid_m", grid_m}});

  std::vector<std::vector<double>> rows;
  SvgSeries sr{"sup ratio", {}, {}};
  bool all_completed = true;
  for (double eps : eps_list) {
    LifespanRow row = lifespan_run(ops, eps, c_budget, s_order, dt);
    rows.push_back({row.eps, row.t_target, row.sup_ratio, static_cast<double>(row.steps),
                    row.wall_seconds, row.within_double ? 1.0 : 0.0, row.completed ? 1.0 : 0.0});
    sr.x.push_back(eps);
    sr.y.push_back(row.sup_ratio);
    all_completed = all_completed && row.completed;
    std::printf("lifespan: eps=%g T=%g sup||h||/eps=%.4f steps=%zu %s (%.1fs)\n", row.eps,
                row.t_target, row.sup_ratio, row.steps,
                row.within_double ? "within double" : "EXCEEDED double", row.wall_seconds);
  }
  fs::path csv = dir / "lifespan.csv";
  write_csv(csv, {"eps", "t_target", "sup_ratio", "steps", "wall_seconds", "within_double",
                  "completed"},
            rows);
  write_svg_plot(dir / "lifespan.svg", "norm inflation up to T = c/eps^2", "eps", "sup ratio", {sr},
                 true, false);
  rec.add_output(csv, rows.size());
  rec.write(dir / "lifespan_run.json");
  return all_completed ? 0 : 1;
}

int run_paradiff(double alpha, double ord, const std::vector<long>& modes, const std::string& out) {
  AlphaParam ap(alpha);
  fs::path dir = resolve_out_dir(out);
  RunRecord rec("paradiff", {{"alpha", alpha}, {"ord", ord}, {"modes", modes}});

  long K = 2;
  for (long k : modes) K = std::max(K, k + 2);
  CommutatorCheck chk = commutator_order_check(ap, modes, K, ord);

  std::vector<std::vector<double>> rows;
  SvgSeries sratio{"residual ratio", {}, {}};
  for (std::size_t i = 0; i < chk.ks.size(); ++i) {
    rows.push_back({static_cast<double>(chk.ks[i]), chk.ratios[i]});
    sratio.x.push_back(static_cast<double>(chk.ks[i]));
    sratio.y.push_back(chk.ratios[i]);
    std::printf("paradiff: k=%ld commutator residual ratio %.6e\n", chk.ks[i], chk.ratios[i]);
  }
  for (std::size_t i = 0; i < chk.decay_factors.size(); ++i)
    std::printf("paradiff: octave decay factor %.4f\n", chk.decay_factors[i]);
  fs::path csv = dir / "commutator.csv";
  write_csv(csv, {"k", "residual_ratio"}, rows);
  write_svg_plot(dir / "commutator.svg", "commutator vs principal symbol", "k", "ratio", {sratio},
                 true, true);
  rec.add_output(csv, rows.size());
  rec.note("decay_factors", chk.decay_factors);
  rec.write(dir / "paradiff_run.json");
  return 0;
}

int run_normalform(double alpha, long kmax, const std::string& out) {
  AlphaParam ap(alpha);
  fs::path dir = resolve_out_dir(out);
  RunRecord rec("normalform", {{"alpha", alpha}, {"kmax", kmax}});

  CancellationExperiment expt(ap, default_cancellation_band(), kmax);
  std::vector<double> eps = {1e-2, 5.6e-3, 3.16e-3, 1.78e-3, 1e-3};
  std::vector<double> before, after;
  std::vector<std::vector<double>> rows;
  SvgSeries sb{"before", {}, {}}, sa{"after", {}, {}};
  for (double e : eps) {
    before.push_back(expt.growth(e, false));
    after.push_back(expt.growth(e, true));
    rows.push_back({e, before.back(), after.back()});
    sb.x.push_back(e);
    sb.y.push_back(before.back());
    sa.x.push_back(e);
    sa.y.push_back(after.back());
  }
  double slope_before = CancellationExperiment::fit_slope(eps, before);
  double slope_after = CancellationExperiment::fit_slope(eps, after);
  double reduction = before.back() / after.back();

  fs::path csv = dir / "cancellation.csv";
  write_csv(csv, {"eps", "growth_before", "growth_after"}, rows);
  write_svg_plot(dir / "cancellation.svg", "norm growth before/after conjugation", "eps",
                 "|d/dt ||g||_s|", {sb, sa}, true, true);
  rec.add_output(csv, rows.size());
  rec.note("slope_before", slope_before);
  rec.note("slope_after", slope_after);
  rec.note("reduction_at_smallest_eps", reduction);
  rec.write(dir / "normalform_run.json");
  std::printf("normalform: growth slope %.4f -> %.4f after conjugation, %.0fx reduction at eps=%g\n",
              slope_before, slope_after, reduction, eps.back());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"patchlab: spectral laboratory for the alpha-patch contour equation"};
  app.require_subcommand(1);

  double alpha = 0.5;

  // dispersion
  CLI::App* cd = app.add_subcommand("dispersion", "tabulate mode speeds and their derivatives");
  long jmax = 64;
  std::string out_d;
  cd->add_option("--alpha", alpha, "interaction exponent in (0,1) or (1,2)");
  cd->add_option("--jmax", jmax, "highest mode");
  cd->add_option("--out", out_d, "output directory");

  // resonance
  CLI::App* cr = app.add_subcommand("resonance", "scan three-wave divisors up to kmax");
  long kmax = 128;
  std::string out_r;
  cr->add_option("--alpha", alpha, "interaction exponent in (0,1) or (1,2)");
  cr->add_option("--kmax", kmax, "largest output mode scanned");
  cr->add_option("--out", out_r, "output directory");

  // simulate
  CLI::App* cs = app.add_subcommand("simulate", "evolve a cosine bump and track invariants");
  double eps = 0.05, dt = 0.02, t_final = 10.0, norm_order = 3.0;
  std::size_t grid_n = 256, grid_m = 1024, record_every = 10;
  std::string out_s, cfg_s;
  cs->add_option("--alpha", alpha, "interaction exponent in (0,1) or (1,2)");
  cs->add_option("--eps", eps, "initial bump amplitude");
  cs->add_option("--grid-n", grid_n, "contour grid size");
  cs->add_option("--grid-m", grid_m, "quadrature grid size (multiple of grid-n)");
  cs->add_option("--dt", dt, "time step");
  cs->add_option("--t-final", t_final, "final time");
  cs->add_option("--record-every", record_every, "history row cadence in steps");
  cs->add_option("--norm-order", norm_order, "Sobolev order tracked for h");
  cs->add_option("--config", cfg_s, "JSON config; explicit flags override");
  cs->add_option("--out", out_s, "output directory");

  // lifespan
  CLI::App* cl = app.add_subcommand("lifespan", "run to T = c/eps^2 over a list of amplitudes");
  std::vector<double> eps_list = {0.1, 0.05, 0.025};
  double c_budget = 0.5, s_order = 3.0, dt_l = 0.025;
  std::size_t grid_n_l = 256, grid_m_l = 1024;
  std::string out_l, cfg_l;
  cl->add_option("--alpha", alpha, "interaction exponent in (0,1) or (1,2)");
  cl->add_option("--eps", eps_list, "amplitudes to sweep");
  cl->add_option("--c-budget", c_budget, "time budget constant c in T = c/eps^2");
  cl->add_option("--s-order", s_order, "Sobolev order of the tracked norm");
  cl->add_option("--dt", dt_l, "time step");
  cl->add_option("--grid-n", grid_n_l, "contour grid size");
  cl->add_option("--grid-m", grid_m_l, "quadrature grid size");
  cl->add_option("--config", cfg_l, "JSON config; explicit flags override");
  cl->add_option("--out", out_l, "output directory");

  // paradiff
  CLI::App* cp = app.add_subcommand("paradiff", "commutator against its principal symbol");
  double ord = 1.0;
  std::vector<long> modes = {16, 32, 64, 128};
  std::string out_p;
  cp->add_option("--alpha", alpha, "interaction exponent in (0,1) or (1,2)");
  cp->add_option("--ord", ord, "symbol order of the probe");
  cp->add_option("--modes", modes, "probe modes");
  cp->add_option("--out", out_p, "output directory");

  // normalform
  CLI::App* cn = app.add_subcommand("normalform", "quadratic cancellation experiment");
  long kmax_n = 16;
  std::string out_n;
  cn->add_option("--alpha", alpha, "interaction exponent in (0,1) or (1,2)");
  cn->add_option("--kmax", kmax_n, "mode cutoff of the triad model");
  cn->add_option("--out", out_n, "output directory");

  try {
    app.parse(argc, argv);

    if (*cs) {
      merge_config(cs, cfg_s,
                   {"alpha", "eps", "grid_n", "grid_m", "dt", "t_final", "record_every",
                    "norm_order"},
                   [&](const json& c) {
                     if (c.contains("alpha")) alpha = c["alpha"];
                     if (c.contains("eps")) eps = c["eps"];
                     if (c.contains("grid_n")) grid_n = c["grid_n"];
                     if (c.contains("grid_m")) grid_m = c["grid_m"];
                     if (c.contains("dt")) dt = c["dt"];
                     if (c.contains("t_final")) t_final = c["t_final"];
                     if (c.contains("record_every")) record_every = c["record_every"];
                     if (c.contains("norm_order")) norm_order = c["norm_order"];
                   });
      return run_simulate(alpha, eps, grid_n, grid_m, dt, t_final, record_every, norm_order,
                          out_s);
    }
    if (*cl) {
      merge_config(cl, cfg_l,
                   {"alpha", "eps", "c_budget", "s_order", "dt", "grid_n", "grid_m"},
                   [&](const json& c) {
                     if (c.contains("alpha")) alpha = c["alpha"];
                     if (c.contains("eps")) eps_list = c["eps"].get<std::vector<double>>();
                     if (c.contains("c_budget")) c_budget = c["c_budget"];
                     if (c.contains("s_order")) s_order = c["s_order"];
                     if (c.contains("dt")) dt_l = c["dt"];
                     if (c.contains("grid_n")) grid_n_l = c["grid_n"];
                     if (c.contains("grid_m")) grid_m_l = c["grid_m"];
                   });
      return run_lifespan(alpha, eps_list, c_budget, s_order, dt_l, grid_n_l, grid_m_l, out_l);
    }
    if (*cd) return run_dispersion(alpha, jmax, out_d);
    if (*cr) return run_resonance(alpha, kmax, out_r);
    if (*cp) return run_paradiff(alpha, ord, modes, out_p);
    if (*cn) return run_normalform(alpha, kmax_n, out_n);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::runtime_error& e) {
    std::string msg = e.what();
    std::fprintf(stderr, "error: %s\n", msg.c_str());
    return msg.rfind("config:", 0) == 0 ? 2 : 1;
  }
  return 0;
}
