#include <omp.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>

#include "checks.hpp"
#include "kwe/collision.hpp"
#include "kwe/config.hpp"
#include "kwe/errors.hpp"
#include "kwe/initial_conditions.hpp"
#include "kwe/io.hpp"
#include "kwe/kaniel_shinbrot.hpp"
#include "kwe/scattering.hpp"
#include "kwe/solver.hpp"

namespace fs = std::filesystem;
using namespace kwe;

namespace {

std::string out_path(const RunConfig& cfg, const std::string& suffix) {
  fs::create_directories(cfg.output.directory);
  return (fs::path(cfg.output.directory) / (cfg.output.prefix + suffix)).string();
}

DistributionField initial_data(const RunConfig& cfg) {
  const DistributionField f0 = initial_condition(cfg.initial, cfg.make_grid(), cfg.seed);
  const DispersiveCertificate c = certify_dispersive(f0, cfg.solver.weights, cfg.solver.epsilon0_budget);
  if (c.certified)
    spdlog::info("initial data certified small: max X-ingredient {:.3g} < {:.3g}",
                 std::max({c.l1_xv, c.linfM_xv, c.linfx_l2v_alpha, c.l2x_l1v_w}), c.budget);
  else
    spdlog::warn("initial data outside the smallness budget {:.3g} (l1 {:.3g}, linfM {:.3g}, linfx_l2v {:.3g}, "
                 "l2x_l1v {:.3g})",
                 c.budget, c.l1_xv, c.linfM_xv, c.linfx_l2v_alpha, c.l2x_l1v_w);
  return f0;
}

void write_trajectory(const RunConfig& cfg, const Trajectory& traj, const std::string& tag) {
  write_csv(out_path(cfg, tag + ".csv"), traj.reports);
  if (!cfg.output.write_snapshots) return;
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "_%05zu.bin", k);
    write_snapshot(out_path(cfg, tag + buf), traj.snapshots[k]);
  }
}

int report_checks(const RunConfig& cfg, const std::vector<tools::Check>& checks, const std::string& suffix) {
  bool ok = true;
  for (const auto& c : checks) {
    ok = ok && c.pass;
    if (c.pass)
      spdlog::info("PASS {} measured {:.3e} tolerance {:.1e}", c.name, c.measured, c.tolerance);
    else
      spdlog::error("FAIL {} measured {:.3e} tolerance {:.1e}", c.name, c.measured, c.tolerance);
  }
  tools::write_checks(out_path(cfg, suffix), checks);
  return ok ? 0 : static_cast<int>(ExitCode::property_violation);
}

int cmd_run(const RunConfig& cfg) {
  const Trajectory traj = run(initial_data(cfg), cfg.solver, cfg.make_quadrature());
  write_trajectory(cfg, traj, "");
  const auto& a = traj.reports.front();
  const auto& b = traj.reports.back();
  spdlog::info("t={} mass drift {:.3e} energy drift {:.3e} boundary loss {:.3e}", b.time,
               a.mass != 0.0 ? (b.mass - a.mass) / a.mass : 0.0,
               a.energy != 0.0 ? (b.energy - a.energy) / a.energy : 0.0, traj.boundary_mass_lost);
  return 0;
}

int cmd_ks(const RunConfig& cfg) {
  const KSResult r = ks_converge(initial_data(cfg), cfg.solver, cfg.make_quadrature());
  const KSCertificate& c = r.certificate;
  std::ofstream f(out_path(cfg, "_ks.csv"));
  f << "converged,iterations,final_gap,gap_ratio,max_nesting_violation,u1_u0_discrepancy,final_min_value,"
       "sandwich_violation,strang_l1_relative\n";
  f << (c.converged ? 1 : 0) << ',' << r.state.n << ',' << format_double(c.final_gap) << ','
    << format_double(c.gap_ratio) << ',' << format_double(c.max_nesting_violation) << ','
    << format_double(r.state.u1_u0_discrepancy) << ',' << format_double(c.final_min_value) << ','
    << format_double(c.sandwich_violation) << ',' << format_double(c.strang_l1_relative) << '\n';
  std::ofstream g(out_path(cfg, "_ks_gaps.csv"));
  g << "iterate,gap_l1,nesting_violation\n";
  for (std::size_t k = 0; k < r.state.gap_history.size(); ++k)
    g << k << ',' << format_double(r.state.gap_history[k]) << ',' << format_double(r.state.nesting_violation[k])
      << '\n';
  write_trajectory(cfg, r.state.lower, "_ks_lower");
  write_trajectory(cfg, r.state.upper, "_ks_upper");
  spdlog::info("KS: {} after {} iterates, gap {:.3e}, ratio {:.3e}, min value {:.3e}",
               c.converged ? "converged" : "not converged", r.state.n, c.final_gap, c.gap_ratio, c.final_min_value);
  if (!c.converged || c.final_min_value < -1e-12) return static_cast<int>(ExitCode::property_violation);
  return 0;
}

int cmd_scatter(const RunConfig& cfg) {
  const SphereQuadrature q = cfg.make_quadrature();
  const Trajectory traj = run(initial_data(cfg), cfg.solver, q);
  const ScatteringState st = extract_scattering_state(traj, q, cfg.solver.weights, {}, cfg.solver.kernel);
  write_snapshot(out_path(cfg, "_f_plus_inf.bin"), st.f_inf);
  {
    std::ofstream f(out_path(cfg, "_tail.csv"));
    f << "t1,tail_l1,tail_linfM\n";
    for (std::size_t i = 0; i < st.tail.t1.size(); ++i)
      f << format_double(st.tail.t1[i]) << ',' << format_double(st.tail.tail_l1[i]) << ','
        << format_double(st.tail.tail_linfM[i]) << '\n';
  }
  const FinalStateResult fs = solve_final_state(st.f_inf, cfg.solver.t_end, cfg.solver, q);
  const Trajectory back = run(fs.f0, cfg.solver, q);
  const ScatteringState st2 = extract_scattering_state(back, q, cfg.solver.weights, {}, cfg.solver.kernel);
  const double rt = l1_distance(st2.f_inf, st.f_inf) / std::max(l1_norm(st.f_inf), 1e-300);
  std::ofstream f(out_path(cfg, "_scatter.csv"));
  f << "tail_slope,tail_residual,scattering_distance,distance_constant,final_state_iterations,final_state_contraction,"
       "final_state_tail_bound,round_trip_l1_relative\n";
  f << format_double(st.tail.slope) << ',' << format_double(st.tail.residual) << ','
    << format_double(st.tail.scattering_distance) << ',' << format_double(st.tail.distance_constant) << ','
    << fs.report.iterations << ',' << format_double(fs.report.contraction) << ',' << format_double(fs.tail_bound)
    << ',' << format_double(rt) << '\n';
  spdlog::info("scatter: tail slope {:.3f}, round trip {:.3e}, final-state contraction {:.3e}", st.tail.slope, rt,
               fs.report.contraction);
  return 0;
}

int cmd_bench(const RunConfig& cfg, int repeats, int threads, bool fast) {
  if (threads > 0) omp_set_num_threads(threads);
  const VelocityGrid grid(cfg.v_max, cfg.n_v);
  const SphereQuadrature q = cfg.make_quadrature();
  InitialSpec spec = cfg.initial;
  spec.name = "gaussian";
  const DistributionField f = initial_condition(spec, make_grid(SpatialGrid(), grid), cfg.seed);
  const auto s = f.values();
  KernelOptions opt = cfg.solver.kernel;
  opt.compensated = !fast;
  const std::uint64_t triples = kernel_active_triples(grid, q);
  std::ofstream out(out_path(cfg, "_bench.csv"));
  out << "threads,repeat,seconds,triples,triples_per_second,compensated\n";
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    const CollisionTerms t = collision_kernel(CollisionInput::from_grid(grid, s, s, s), q, kAllTerms, opt);
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double rate = static_cast<double>(triples) / sec;
    out << omp_get_max_threads() << ',' << r << ',' << format_double(sec) << ',' << triples << ','
        << format_double(rate) << ',' << (opt.compensated ? 1 : 0) << '\n';
    spdlog::info("kernel: {} threads, {:.3f} s, {:.3e} evaluations/s{}", omp_get_max_threads(), sec, rate,
                 t.gain1.empty() ? " (empty)" : "");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("kwe"));
  CLI::App app{"Kinetic wave equation solver"};
  app.require_subcommand(1);
  std::string config;
  int repeats = 3, threads = 0;
  bool fast = false;

  auto add = [&](const char* name, const char* help, bool needs_config = true) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto* opt = sub->add_option("-c,--config", config, "configuration file")->check(CLI::ExistingFile);
    if (needs_config) opt->required();
    return sub;
  };
  CLI::App* run_cmd = add("run", "integrate and write the trajectory");
  CLI::App* lemma = add("lemma-check", "collision identity suite", false);
  CLI::App* transport = add("transport-check", "free-transport suite", false);
  CLI::App* ks = add("ks", "Kaniel-Shinbrot positivity certificate");
  CLI::App* scatter = add("scatter", "scattering state extraction and round trip");
  CLI::App* bench = add("bench", "collision kernel throughput", false);
  bench->add_option("--repeat", repeats, "timed evaluations")->check(CLI::PositiveNumber);
  bench->add_option("--threads", threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  bench->add_flag("--fast-reduce", fast, "uncompensated reductions (benchmarks only)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::config);
  }

  try {
    const RunConfig cfg = config.empty() ? RunConfig{} : load_config(config);
    if (run_cmd->parsed()) return cmd_run(cfg);
    if (lemma->parsed()) return report_checks(cfg, tools::lemma_suite(cfg), "_lemma.csv");
    if (transport->parsed()) return report_checks(cfg, tools::transport_suite(cfg), "_transport.csv");
    if (ks->parsed()) return cmd_ks(cfg);
    if (scatter->parsed()) return cmd_scatter(cfg);
    if (bench->parsed()) return cmd_bench(cfg, repeats, threads, fast);
  } catch (const InstabilityError& e) {
    spdlog::error("{} (t = {})", e.what(), e.time());
    return static_cast<int>(e.exit_code());
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
