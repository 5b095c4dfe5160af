// Command-line front end: solve, sweep, simulate, dynamic, verify.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 verification
// failure (including a solver that did not converge), 3 I/O error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aloha/analytic.hpp"
#include "aloha/experiments.hpp"
#include "aloha/properties.hpp"
#include "aloha/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerify = 2;
constexpr int kExitIo = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "6-50", "2,5,8" or a mix such as "2,10-12".
std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-', 1);
    try {
      if (dash == std::string::npos) {
        out.push_back(std::stoi(item));
      } else {
        const int lo = std::stoi(item.substr(0, dash));
        const int hi = std::stoi(item.substr(dash + 1));
        if (hi < lo) throw std::invalid_argument("descending range");
        for (int v = lo; v <= hi; ++v) out.push_back(v);
      }
    } catch (const std::exception&) {
      throw std::invalid_argument("bad integer list '" + text + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument("empty integer list");
  return out;
}

template <class F>
void write_file(const std::filesystem::path& path, F&& emit) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  emit(os);
  os.flush();
  if (!os) throw IoError("write to '" + path.string() + "' failed");
}

int cmd_solve(int n, int m, int d, double tolerance) {
  const aloha::ChannelConfig cfg(n, m, d);
  const auto r = aloha::solve_optimal_tau(cfg, {tolerance, 10'000});
  std::printf("N=%d M=%d D=%d\n", n, m, d);
  std::printf("tau_opt    %.12f\n", r.tau_opt.value());
  std::printf("sdp_max    %.12f\n", r.sdp_max);
  std::printf("iterations %d\n", r.iterations);
  std::printf("residual   %.3e\n", r.residual);
  std::printf("converged  %s\n", r.converged ? "yes" : "no");
  return r.converged ? kExitOk : kExitVerify;
}

int cmd_sweep(const std::string& ns, const std::string& ms, const std::string& ds,
              const std::string& out) {
  const auto rows = aloha::run_sweep(parse_int_list(ns), parse_int_list(ms), parse_int_list(ds));
  write_file(out, [&](std::ostream& os) { aloha::write_sweep_csv(os, rows); });
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, r.abs_diff);
  std::printf("%zu rows written to %s; max |tau_opt - oracle_tau| = %.3e\n", rows.size(),
              out.c_str(), worst);
  return kExitOk;
}

int cmd_simulate(int n, int m, int d, const std::string& tau_arg, std::uint64_t slots,
                 int reps, std::uint64_t seed, const std::string& out) {
  const aloha::ChannelConfig cfg(n, m, d);
  const aloha::TxProbability tau = tau_arg == "optimal"
                                       ? aloha::solve_optimal_tau(cfg).tau_opt
                                       : aloha::TxProbability(std::stod(tau_arg));
  const auto summary = aloha::run_replications(cfg, tau, slots, reps, seed);
  write_file(out, [&](std::ostream& os) { aloha::write_simulate_csv(os, summary); });
  std::printf("tau       %.12f\n", tau.value());
  std::printf("mean_sdp  %.6f\n", summary.mean);
  std::printf("std_err   %.3e\n", summary.std_err);
  std::printf("analytic  %.6f\n", summary.analytic);
  std::printf("z_score   %.3f\n", summary.z_score);
  return kExitOk;
}

int cmd_dynamic(const std::string& scenario, const std::string& out_dir) {
  std::ifstream in(scenario);
  if (!in) throw IoError("cannot open scenario '" + scenario + "'");
  const auto timeline = aloha::parse_scenario(in);
  const auto res = aloha::run_dynamic(timeline);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir + "': " + ec.message());
  const std::filesystem::path dir(out_dir);
  write_file(dir / "trace.csv", [&](std::ostream& os) { aloha::write_trace_csv(os, res.trace); });
  write_file(dir / "stages.csv",
             [&](std::ostream& os) { aloha::write_stage_csv(os, res.stages); });
  std::printf("stage  intervals  users  theory   mean     variance\n");
  for (const auto& s : res.stages) {
    std::printf("%5d  %4d-%-4d  %5d  %.4f   %.4f   %.3e\n", s.stage, s.first_interval,
                s.last_interval, s.active_users, s.theoretical_max_sdp, s.mean_sdp, s.var_sdp);
  }
  return kExitOk;
}

int cmd_verify(double tolerance) {
  auto grid = aloha::VerifyGrid::standard();
  grid.identity_tol = tolerance;
  bool all = true;
  for (const auto& p : aloha::run_property_suite(grid)) {
    std::printf("[%s] %-52s %6zu cases", p.passed ? "PASS" : "FAIL", p.name.c_str(), p.cases);
    if (!p.passed) std::printf("  worst: %s", p.worst.c_str());
    std::printf("\n");
    all = all && p.passed;
  }
  return all ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal slotted ALOHA under a delivery deadline on an M-user MPR channel"};
  app.require_subcommand(1);

  int n = 0, m = 0, d = 0;
  double tolerance = 1e-12;
  std::string n_list = "6-50", m_list = "2,5,8", d_list = "1,5,10,20";
  std::string tau = "optimal", out, scenario;
  std::uint64_t slots = 1'000'000, seed = 1;
  int reps = 10;

  auto* solve = app.add_subcommand("solve", "Optimal transmission probability for (N, M, D)");
  solve->add_option("--n", n, "Number of users N")->required();
  solve->add_option("--m", m, "MPR capability M")->required();
  solve->add_option("--d", d, "Delivery deadline D in slots")->required();
  solve->add_option("--tolerance", tolerance, "Fixed-point stopping tolerance");

  auto* sweep = app.add_subcommand("sweep", "Solver vs oracle over a grid of (N, M, D), as CSV");
  sweep->add_option("--n", n_list, "Populations, e.g. 6-50")->capture_default_str();
  sweep->add_option("--m", m_list, "MPR capabilities, e.g. 2,5,8")->capture_default_str();
  sweep->add_option("--d", d_list, "Deadlines, e.g. 1,5,10,20")->capture_default_str();
  sweep->add_option("--out", out, "Output CSV path")->required();

  auto* simulate = app.add_subcommand("simulate", "Replicated stationary simulation, as CSV");
  simulate->add_option("--n", n, "Number of users N")->required();
  simulate->add_option("--m", m, "MPR capability M")->required();
  simulate->add_option("--d", d, "Delivery deadline D in slots")->required();
  simulate->add_option("--tau", tau, "Transmission probability or 'optimal'")->capture_default_str();
  simulate->add_option("--slots", slots, "Slots per replication")->capture_default_str();
  simulate->add_option("--reps", reps, "Replications")->capture_default_str();
  simulate->add_option("--seed", seed, "Seed of replication 0 (replication r uses seed + r)")
      ->capture_default_str();
  simulate->add_option("--out", out, "Output CSV path")->required();

  auto* dynamic = app.add_subcommand("dynamic", "Run a dynamic-population scenario file");
  dynamic->add_option("--scenario", scenario, "Scenario file")->required();
  dynamic->add_option("--out", out, "Output directory for trace.csv and stages.csv")->required();

  auto* verify = app.add_subcommand("verify", "Run the analytic property suite");
  verify->add_option("--tolerance", tolerance, "Tolerance for the exact identities")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*solve) return cmd_solve(n, m, d, tolerance);
    if (*sweep) return cmd_sweep(n_list, m_list, d_list, out);
    if (*simulate) return cmd_simulate(n, m, d, tau, slots, reps, seed, out);
    if (*dynamic) return cmd_dynamic(scenario, out);
    if (*verify) return cmd_verify(tolerance);
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const aloha::ScenarioParseError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
