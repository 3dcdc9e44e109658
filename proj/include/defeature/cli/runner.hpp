#pragma once

// Scenario execution: build the geometry and data, run the (possibly
// adaptive) defeaturing analysis, optionally solve an overkill reference on
// the exact domain for true errors, and emit the report artifacts.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>

#include "defeature/adaptive/adaptive.hpp"
#include "defeature/cli/scenario.hpp"

namespace defeature::cli {

struct RunOptions {
  std::string out_dir;  // empty: no files written
  std::optional<double> theta;
  std::optional<double> tol;
  bool reference = true;
  bool vtk = false;
};

struct RunReport {
  std::string scenario;
  std::vector<adaptive::IterationRecord> iterations;
  bool converged = false;
  double total = 0.0;        // estimate of the fully defeatured model (iteration 0)
  double tilde_total = 0.0;
  double true_error = std::numeric_limits<double>::quiet_NaN();
  double eta_eff = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
  std::vector<std::string> files;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw OutputIOError("cannot open " + path.string() + " for writing");
  return out;
}

inline void write_estimator_csv(const std::filesystem::path& path,
                                const estimator::Report& rep) {
  std::ofstream out = open_out(path);
  out << "gamma_id,feature_id,label,measure,c_gamma,fluct_term,avg_term,estimate\n";
  for (const estimator::GammaTerm& g : rep.gammas)
    out << g.arc_id << ',' << g.feature_id << ',' << geom::tag_name(g.tag) << ','
        << num(g.measure) << ',' << num(g.c) << ',' << num(g.fluct_term) << ','
        << num(g.avg_term) << ',' << num(g.estimate) << '\n';
  if (!out) throw OutputIOError("write failed: " + path.string());
}

inline void write_trace_csv(const std::filesystem::path& path,
                            const std::vector<adaptive::IterationRecord>& records) {
  std::ofstream out = open_out(path);
  out << "iteration,n_features_added_cumulative,estimator,true_error,marked_ids\n";
  for (const adaptive::IterationRecord& rec : records) {
    out << rec.iteration << ',' << rec.n_inserted_total << ',' << num(rec.report.total) << ',';
    if (!std::isnan(rec.true_error)) out << num(rec.true_error);
    out << ',';
    bool first = true;
    for (int k : rec.marked) {
      if (!first) out << ';';
      out << k;
      first = false;
    }
    out << '\n';
  }
  if (!out) throw OutputIOError("write failed: " + path.string());
}

// legacy ASCII triangles; P2 fields are written at the mesh vertices
inline void write_vtk(const std::filesystem::path& path, const fem::Solution& sol,
                      const std::string& field) {
  std::ofstream out = open_out(path);
  const mesh::Mesh& m = sol.mesh;
  out << "# vtk DataFile Version 3.0\n" << field << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << m.points.size() << " double\n";
  for (const Point& p : m.points) out << num(p.x) << ' ' << num(p.y) << " 0\n";
  out << "CELLS " << m.tris.size() << ' ' << 4 * m.tris.size() << '\n';
  for (const auto& t : m.tris) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << m.tris.size() << '\n';
  for (size_t i = 0; i < m.tris.size(); ++i) out << "5\n";
  out << "POINT_DATA " << m.points.size() << '\n';
  if (sol.ncomp == 1) {
    out << "SCALARS " << field << " double 1\nLOOKUP_TABLE default\n";
    for (size_t v = 0; v < m.points.size(); ++v) out << num(sol.u[static_cast<int>(v)]) << '\n';
  } else {
    out << "VECTORS " << field << " double\n";
    for (size_t v = 0; v < m.points.size(); ++v)
      out << num(sol.u[sol.dof(0, static_cast<int>(v))]) << ' '
          << num(sol.u[sol.dof(1, static_cast<int>(v))]) << " 0\n";
    if (sol.coefs.type == fem::ProblemType::Stokes) {
      out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
      for (size_t v = 0; v < m.points.size(); ++v) out << num(sol.p[static_cast<int>(v)]) << '\n';
    }
  }
  if (!out) throw OutputIOError("write failed: " + path.string());
}

inline void write_summary(const std::filesystem::path& path, const Scenario& s,
                          const RunReport& rep) {
  std::ofstream out = open_out(path);
  out << "scenario: " << s.name << "\n"
      << "problem: " << s.type << "\n"
      << "features: " << s.features.size() << "\n"
      << "iterations: " << rep.iterations.size() << "\n"
      << "converged: " << (rep.converged ? "yes" : "no") << "\n";
  if (!rep.iterations.empty()) {
    const estimator::Report& first = rep.iterations.front().report;
    for (const auto& [k, v] : first.per_feature)
      out << "estimator_feature_" << k << " = " << num(v) << "\n";
    out << "estimator_total = " << num(first.total) << "\n"
        << "estimator_tilde = " << num(first.tilde_total) << "\n";
  }
  if (!std::isnan(rep.true_error)) {
    out << "true_error = " << num(rep.true_error) << "\n"
        << "eta_eff = " << num(rep.eta_eff) << "\n";
  }
  out << "wall_seconds = " << num(rep.seconds) << "\n";
  if (!out) throw OutputIOError("write failed: " + path.string());
}

}  // namespace detail

inline RunReport run_scenario(const Scenario& s, const RunOptions& opt = {}) {
  auto t0 = std::chrono::steady_clock::now();
  geom::GeometryModel model = geometry_model(s);
  pipeline::ProblemData data = problem_data(s);

  adaptive::Options aopt;
  aopt.theta = opt.theta.value_or(s.theta);
  aopt.tol = opt.tol.value_or(s.tol);
  aopt.max_iterations = s.adaptive ? s.max_iter : 1;
  aopt.mesh.h_max = s.h;
  aopt.mesh.h_near = s.h_feature;

  std::optional<fem::Solution> ref;
  if (opt.reference) {
    mesh::MeshOptions mref;
    mref.h_max = s.h;
    mref.h_near = s.h_ref > 0 ? s.h_ref : s.h / 8;
    ref = pipeline::solve_exact(model, data, mref);
  }
  adaptive::ErrorHook hook;
  if (ref)
    hook = [&ref](const geom::GeometryModel& m, const pipeline::DefeaturedResult& sol) {
      return pipeline::energy_error(*ref, sol.compose(m));
    };

  adaptive::RunResult res =
      model.features.empty()
          ? adaptive::RunResult{}
          : adaptive::run(model, data, aopt, hook);
  if (model.features.empty()) {
    // no features: a single defeatured solve, nothing to estimate
    pipeline::DefeaturedResult sol = pipeline::solve_all(model, data, aopt.mesh);
    adaptive::IterationRecord rec;
    if (hook) rec.true_error = hook(model, sol);
    res.iterations.push_back(std::move(rec));
    res.final_model = model;
    res.converged = true;
  }

  RunReport rep;
  rep.scenario = s.name;
  rep.iterations = std::move(res.iterations);
  rep.converged = res.converged;
  if (!rep.iterations.empty()) {
    rep.total = rep.iterations.front().report.total;
    rep.tilde_total = rep.iterations.front().report.tilde_total;
    rep.true_error = rep.iterations.front().true_error;
    if (rep.true_error > 0) rep.eta_eff = rep.total / rep.true_error;
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!opt.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::path dir(opt.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw OutputIOError("cannot create " + dir.string() + ": " + ec.message());
    detail::write_summary(dir / "summary.txt", s, rep);
    rep.files.push_back((dir / "summary.txt").string());
    if (!rep.iterations.empty()) {
      detail::write_estimator_csv(dir / "estimator.csv", rep.iterations.front().report);
      rep.files.push_back((dir / "estimator.csv").string());
    }
    detail::write_trace_csv(dir / "adaptive_trace.csv", rep.iterations);
    rep.files.push_back((dir / "adaptive_trace.csv").string());
    if (opt.vtk || s.vtk) {
      pipeline::DefeaturedResult sol = pipeline::solve_all(model, data, aopt.mesh);
      detail::write_vtk(dir / "defeatured.vtk", sol.base, "u_defeatured");
      rep.files.push_back((dir / "defeatured.vtk").string());
      if (ref) {
        detail::write_vtk(dir / "reference.vtk", *ref, "u_reference");
        rep.files.push_back((dir / "reference.vtk").string());
      }
    }
  }
  return rep;
}

}  // namespace defeature::cli
