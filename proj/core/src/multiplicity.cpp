#include "cahnlab/multiplicity.hpp"

#include "cahnlab/barycenter.hpp"
#include "cahnlab/energy.hpp"
#include "cahnlab/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <ostream>
#include <thread>

namespace cahnlab {

TopologyCard topology_card_genus(int genus) {
  if (genus < 0) throw Rejection("topology card: genus must be nonnegative");
  TopologyCard card;
  card.family = genus == 0 ? "sphere" : genus == 1 ? "torus" : "genus_" + std::to_string(genus);
  card.cat = genus == 0 ? 2 : 3;
  card.betti = {1, 2 * genus, 1};
  card.p1 = std::accumulate(card.betti.begin(), card.betti.end(), 0);
  return card;
}

TopologyCard topology_card(MeshFamily family, std::optional<int> genus) {
  switch (family) {
    case MeshFamily::sphere:
    case MeshFamily::ellipsoid: return topology_card_genus(0);
    case MeshFamily::torus: return topology_card_genus(1);
    case MeshFamily::external:
      if (!genus) throw Rejection("topology card: external mesh needs a declared family or genus");
      return topology_card_genus(*genus);
  }
  throw Rejection("topology card: unknown family");
}

std::vector<int> seed_vertices(const SurfaceMesh& mesh, const SeedSpec& spec, DistanceMethod method) {
  const int n = mesh.num_vertices();
  std::vector<int> out;
  switch (spec.kind) {
    case SeedSpec::Kind::explicit_list:
      for (int v : spec.vertices) {
        if (v < 0 || v >= n) throw Rejection("seed list: vertex " + std::to_string(v) + " out of range");
      }
      return spec.vertices;
    case SeedSpec::Kind::subsample: {
      const int count = std::clamp(spec.count, 0, n);
      for (int k = 0; k < count; ++k) out.push_back(static_cast<int>((static_cast<long long>(k) * n) / count));
      return out;
    }
    case SeedSpec::Kind::farthest_point: {
      const int count = std::clamp(spec.count, 0, n);
      if (count == 0) return out;
      ScalarField nearest = ScalarField::Constant(n, std::numeric_limits<double>::infinity());
      int next = 0;
      for (int k = 0; k < count; ++k) {
        out.push_back(next);
        nearest = nearest.cwiseMin(geodesic_distance(mesh, next, method));
        nearest.maxCoeff(&next);
      }
      return out;
    }
  }
  return out;
}

std::vector<SolutionClass> dedupe(const SurfaceMesh& mesh, const std::vector<CriticalPoint>& points,
                                  const DedupeThresholds& thresholds) {
  const int n = static_cast<int>(points.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<double> norms(n);
  for (int i = 0; i < n; ++i) norms[i] = l2_norm(mesh, points[i].u);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double scale_u = std::max(norms[i], norms[j]);
      const double du = scale_u > 0.0 ? l2_norm(mesh, points[i].u - points[j].u) / scale_u : 0.0;
      const double scale_e = std::max(std::abs(points[i].energy), std::abs(points[j].energy));
      const double de = scale_e > 0.0 ? std::abs(points[i].energy - points[j].energy) / scale_e : 0.0;
      if (du <= thresholds.relative_l2 && de <= thresholds.relative_energy) parent[find(i)] = find(j);
    }
  }
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<SolutionClass> classes;
  for (auto& [root, members] : groups) {
    SolutionClass c;
    c.members = members;
    c.size = static_cast<int>(members.size());
    int best = members.front();
    for (int m : members) {
      if (points[m].energy < points[best].energy) best = m;
    }
    c.representative = points[best];
    const auto& u = c.representative.u;
    c.constant = u.size() > 0 && (u.maxCoeff() - u.minCoeff()) <= 1e-6 * std::max(1.0, u.cwiseAbs().maxCoeff());
    classes.push_back(std::move(c));
  }
  std::sort(classes.begin(), classes.end(), [](const SolutionClass& a, const SolutionClass& b) {
    if (a.representative.energy != b.representative.energy) return a.representative.energy < b.representative.energy;
    return a.members.front() < b.members.front();
  });
  return classes;
}

SweepResult sweep(const SurfaceMesh& mesh, const DoubleWell& w, double epsilon, double volume,
                  const std::vector<int>& base_points, const SweepConfig& cfg, const TopologyCard& card,
                  const std::string& mesh_id) {
  SweepResult result;
  result.epsilon = epsilon;
  result.volume = volume;
  result.potential_id = w.id();
  result.mesh_id = mesh_id;
  result.card = card;
  result.level_c = sigma(w, 0.0, 1.0) * isoperimetric_constant_2d() * std::sqrt(volume) + cfg.delta_margin;

  const int nruns = static_cast<int>(base_points.size()) + 1;
  result.runs.resize(nruns);
  const auto profile = photography_profile(w, epsilon, cfg.photograph);

  auto run_one = [&](int k) {
    SweepRun& run = result.runs[k];
    run.seed_index = k;
    try {
      ScalarField u0;
      if (k < nruns - 1) {
        run.base_point = base_points[k];
        u0 = photograph(mesh, w, epsilon, volume, base_points[k], profile, cfg.photograph).field;
      } else {
        u0 = ScalarField::Constant(mesh.num_vertices(), volume / mesh.total_area());
      }
      auto cp = solve_constrained(mesh, w, epsilon, volume, u0, cfg.flow);
      cp.base_point = run.base_point;
      run.point = std::move(cp);
    } catch (const std::exception& e) {
      run.error = e.what();
    }
  };

  const int threads = std::clamp(cfg.threads, 1, nruns);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int k = next++; k < nruns; k = next++) run_one(k);
  };
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  std::vector<CriticalPoint> converged;
  std::vector<int> run_of;
  for (const auto& run : result.runs) {
    if (run.point && run.point->converged) {
      converged.push_back(*run.point);
      run_of.push_back(run.seed_index);
    }
  }
  result.converged_runs = static_cast<int>(converged.size());
  result.unreliable = 2 * result.converged_runs < nruns;
  result.classes = dedupe(mesh, converged, cfg.dedupe);

  const MeshProjector projector(mesh);
  const auto inj = mesh.inj_estimate();
  for (auto& c : result.classes) {
    for (int& m : c.members) m = run_of[m];
    c.below_c = !c.constant && c.representative.energy <= result.level_c;
    const int k = std::min(cfg.morse_k, mesh.num_vertices() - 2);
    try {
      const auto morse = morse_index(mesh, w, epsilon, c.representative.u, k);
      c.morse_index = morse.index;
      c.nondegenerate = morse.nondegenerate;
      c.morse_saturated = morse.saturated;
      c.representative.morse_index = morse.index;
      c.representative.nondegenerate = morse.nondegenerate;
      ++result.morse_tally[morse.index];
    } catch (const Rejection&) {
      // left without an index; morse_report treats it as degenerate
    }
    for (int m : c.members) {
      auto& pt = result.runs[m].point;
      pt->morse_index = c.morse_index;
      pt->nondegenerate = c.nondegenerate;
    }
    c.barycenter_vertex = projector.project(barycenter(mesh, c.representative.u)).nearest_vertex;
    if (cfg.concentration_audit && c.below_c && inj) {
      c.concentration = concentration(mesh, c.representative.u, 0.5 * *inj).fraction;
    }
  }

  auto& counts = result.counts;
  counts.distinct_total = static_cast<int>(result.classes.size());
  for (const auto& c : result.classes) {
    if (c.below_c) ++counts.distinct_below_c;
    if (c.constant) ++counts.constant_classes;
  }
  counts.predicted_cat = card.cat;
  counts.predicted_cat_plus_1 = card.cat + 1;
  counts.predicted_p1 = card.p1;
  counts.predicted_2p1_minus_1 = 2 * card.p1 - 1;
  return result;
}

MorseReport morse_report(const SweepResult& result) {
  MorseReport report;
  report.required = 2 * result.card.p1 - 1;
  for (const auto& c : result.classes) {
    if (!c.morse_index || !c.nondegenerate.value_or(false)) report.degenerate = true;
    if (c.morse_index) ++report.count;
  }
  report.q1 = 0.5 * (report.count - report.required);
  report.q1_nonnegative = report.q1 >= 0.0;
  if (report.degenerate) {
    report.reading = "multiplicity reading, no pass/fail";
  } else {
    report.reading = "nondegenerate";
    report.passed = report.count >= report.required;
  }
  return report;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "class,energy,lambda,morse_index,nondegenerate,barycenter_vertex,size,constant,below_c,concentration\n";
  out.precision(12);
  for (std::size_t i = 0; i < result.classes.size(); ++i) {
    const auto& c = result.classes[i];
    out << i << ',' << c.representative.energy << ',' << c.representative.lambda << ','
        << (c.morse_index ? std::to_string(*c.morse_index) : "") << ','
        << (c.nondegenerate ? (*c.nondegenerate ? "1" : "0") : "") << ',' << c.barycenter_vertex << ',' << c.size
        << ',' << c.constant << ',' << c.below_c << ',';
    if (c.concentration) out << *c.concentration;
    out << '\n';
  }
}

}  // namespace cahnlab
