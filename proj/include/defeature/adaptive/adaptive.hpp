#pragma once

// Adaptive feature reinsertion: solve, estimate, mark the dominating
// features, reinsert them into the working geometry, repeat.

#include <functional>
#include <limits>
#include <set>

#include "defeature/estimator/estimator.hpp"

namespace defeature::adaptive {

using geom::GeometryModel;

struct Options {
  double theta = 0.9;        // marking fraction of the max indicator
  double tol = 0.0;          // stop when the total estimate drops below this
  int max_iterations = 64;
  mesh::MeshOptions mesh;
  estimator::Options est;
};

// Maximum marking: every feature whose indicator reaches theta times the
// largest one. A flat zero landscape marks everything (no way to discriminate).
inline std::set<int> mark(const std::map<int, double>& per_feature, double theta) {
  if (per_feature.empty()) throw NoFeatures("nothing to mark");
  double top = 0.0;
  for (const auto& [k, v] : per_feature) top = std::max(top, v);
  std::set<int> out;
  for (const auto& [k, v] : per_feature)
    if (top == 0.0 || v >= theta * top) out.insert(k);
  return out;
}

struct IterationRecord {
  int iteration = 0;
  estimator::Report report;
  std::set<int> marked;       // features inserted after this iteration
  int n_inserted_total = 0;   // cumulative insertions before this solve
  double true_error = std::numeric_limits<double>::quiet_NaN();
};

struct RunResult {
  std::vector<IterationRecord> iterations;
  GeometryModel final_model;
  bool converged = false;  // stopped because the estimate fell below tol
};

// Optional hook computing the true error of one iterate (needs a reference
// solution; the caller owns it).
using ErrorHook =
    std::function<double(const GeometryModel&, const pipeline::DefeaturedResult&)>;

inline RunResult run(GeometryModel model, const pipeline::ProblemData& data,
                     const Options& opt, const ErrorHook& error_hook = {}) {
  if (model.features.empty()) throw NoFeatures("model has no features");
  RunResult res;
  int inserted = 0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    pipeline::DefeaturedResult sol = pipeline::solve_all(model, data, opt.mesh);
    IterationRecord rec;
    rec.iteration = it;
    rec.n_inserted_total = inserted;
    rec.report = estimator::estimate(model, sol, data, opt.est);
    if (error_hook) rec.true_error = error_hook(model, sol);

    bool done = rec.report.per_feature.empty() || rec.report.total <= opt.tol;
    if (!done) {
      rec.marked = mark(rec.report.per_feature, opt.theta);
      inserted += static_cast<int>(rec.marked.size());
    }
    res.iterations.push_back(std::move(rec));
    if (done) {
      res.converged = true;
      break;
    }
    model = geom::insert_features(model, res.iterations.back().marked);
  }
  res.final_model = std::move(model);
  return res;
}

}  // namespace defeature::adaptive
