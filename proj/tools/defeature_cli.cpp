// Command line front end: run a defeaturing scenario (a file or a built-in
// name) and drop the report artifacts into an output directory.

#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "defeature/cli/runner.hpp"

namespace {

using namespace defeature;

cli::Scenario load_scenario(const std::string& ref) {
  if (auto builtin = cli::builtin_scenario(ref)) return *builtin;
  std::ifstream in(ref);
  if (!in) throw ParseError("no such scenario file or built-in name: " + ref);
  std::ostringstream text;
  text << in.rdbuf();
  return cli::parse_scenario(text.str());
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const SchemaError*>(&e) ||
      dynamic_cast<const ExpressionError*>(&e))
    return 2;
  if (dynamic_cast<const SingularSystem*>(&e) || dynamic_cast<const SolverDivergence*>(&e) ||
      dynamic_cast<const IncompatibleData*>(&e) || dynamic_cast<const UnsupportedOrder*>(&e) ||
      dynamic_cast<const MissingSide*>(&e) || dynamic_cast<const PointOutsideDomain*>(&e) ||
      dynamic_cast<const NonconvergentRefinement*>(&e))
    return 3;
  if (dynamic_cast<const Error*>(&e) && !dynamic_cast<const OutputIOError*>(&e))
    return 4;  // geometry/meshing/estimator model failures
  return 1;
}

struct Job {
  cli::Scenario scenario;
  std::string out_dir;
};

int run_all(const std::vector<Job>& jobs, const cli::RunOptions& base, int n_workers) {
  std::atomic<size_t> next{0};
  std::atomic<int> worst{0};
  std::mutex io;
  auto work = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      cli::RunOptions opt = base;
      opt.out_dir = jobs[i].out_dir;
      try {
        cli::RunReport rep = cli::run_scenario(jobs[i].scenario, opt);
        std::lock_guard<std::mutex> lock(io);
        std::printf("%-24s estimator = %-12.6g", rep.scenario.c_str(), rep.total);
        if (!std::isnan(rep.eta_eff))
          std::printf(" true error = %-12.6g eta_eff = %.4g", rep.true_error, rep.eta_eff);
        std::printf("  (%.1fs)\n", rep.seconds);
      } catch (const std::exception& e) {
        int code = exit_code_for(e);
        std::lock_guard<std::mutex> lock(io);
        std::fprintf(stderr, "%s: %s\n", jobs[i].scenario.name.c_str(), e.what());
        int cur = worst.load();
        while (cur < code && !worst.compare_exchange_weak(cur, code)) {}
      }
    }
  };
  int n = std::max(1, std::min<int>(n_workers, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return worst.load();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"defeaturing error estimation and adaptive feature reinsertion"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "run a scenario");
  std::string scenario_ref, out_dir;
  double theta = -1, tol = -1;
  int jobs = 1;
  bool no_reference = false, vtk = false;
  run->add_option("--scenario", scenario_ref, "scenario file or built-in name")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--theta", theta, "marking parameter override");
  run->add_option("--tol", tol, "estimator tolerance override");
  run->add_option("--jobs", jobs, "parallel worker slots for scenario groups");
  run->add_flag("--no-reference", no_reference, "skip the exact-domain reference solve");
  run->add_flag("--vtk", vtk, "write VTK fields");

  CLI11_PARSE(app, argc, argv);

  try {
    cli::RunOptions base;
    if (theta > 0) base.theta = theta;
    if (tol >= 0) base.tol = tol;
    base.reference = !no_reference;
    base.vtk = vtk;

    std::vector<Job> list;
    if (scenario_ref == "distance_delta") {
      for (const std::string& name : cli::distance_delta_names())
        list.push_back({load_scenario(name), out_dir + "/" + name});
    } else {
      list.push_back({load_scenario(scenario_ref), out_dir});
    }
    return run_all(list, base, jobs);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  }
}
