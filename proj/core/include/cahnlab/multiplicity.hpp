#pragma once

#include "cahnlab/critical.hpp"
#include "cahnlab/photography.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cahnlab {

struct TopologyCard {
  std::string family;
  int cat = 0;
  std::vector<int> betti;
  int p1 = 0;
};

/// Tabulated topology of the generator families. External meshes need a
/// declared genus; without one this throws Rejection.
TopologyCard topology_card(MeshFamily family, std::optional<int> genus = std::nullopt);
TopologyCard topology_card_genus(int genus);

struct SeedSpec {
  enum class Kind { subsample, farthest_point, explicit_list };
  Kind kind = Kind::farthest_point;
  int count = 30;
  std::vector<int> vertices;  // explicit_list
};

/// Base points for a sweep. Farthest-point sampling starts at vertex 0.
std::vector<int> seed_vertices(const SurfaceMesh& mesh, const SeedSpec& spec,
                               DistanceMethod method = DistanceMethod::fast_marching);

struct DedupeThresholds {
  double relative_l2 = 0.05;
  double relative_energy = 0.02;
};

struct SolutionClass {
  CriticalPoint representative;
  std::vector<int> members;  // run indices
  int size = 0;
  bool constant = false;
  bool below_c = false;
  std::optional<int> morse_index;
  std::optional<bool> nondegenerate;
  bool morse_saturated = false;
  std::optional<double> concentration;  // fraction in B(p, inj/4), below-c non-constant classes
  int barycenter_vertex = -1;
};

/// Single-linkage classes under the combined L2 / energy metric; the
/// representative is the lowest-energy member. Members are indices into `points`.
std::vector<SolutionClass> dedupe(const SurfaceMesh& mesh, const std::vector<CriticalPoint>& points,
                                  const DedupeThresholds& thresholds = {});

struct SweepConfig {
  FlowConfig flow;
  PhotographOptions photograph;
  DedupeThresholds dedupe;
  double delta_margin = 0.0;
  int morse_k = 8;
  int threads = 1;
  bool concentration_audit = true;
};

struct SweepRun {
  int seed_index = 0;
  std::optional<int> base_point;  // empty for the constant seed
  std::optional<CriticalPoint> point;
  std::string error;
};

struct SweepCounts {
  int distinct_total = 0;
  int distinct_below_c = 0;
  int constant_classes = 0;
  int predicted_cat = 0;
  int predicted_cat_plus_1 = 0;
  int predicted_p1 = 0;
  int predicted_2p1_minus_1 = 0;
};

struct SweepResult {
  double epsilon = 0.0;
  double volume = 0.0;
  std::string potential_id;
  std::string mesh_id;
  double level_c = 0.0;
  TopologyCard card;
  std::vector<SweepRun> runs;
  std::vector<SolutionClass> classes;
  SweepCounts counts;
  std::map<int, int> morse_tally;
  int converged_runs = 0;
  bool unreliable = false;
};

/// Runs the flow from photograph(x0) at every seed plus the constant seed
/// V/|M|, concurrently across runs, then deduplicates and classifies.
SweepResult sweep(const SurfaceMesh& mesh, const DoubleWell& w, double epsilon, double volume,
                  const std::vector<int>& base_points, const SweepConfig& cfg, const TopologyCard& card,
                  const std::string& mesh_id = "mesh");

struct MorseReport {
  int count = 0;
  int required = 0;  // 2 P1 - 1
  double q1 = 0.0;   // (count - required) / 2
  bool q1_nonnegative = false;
  bool degenerate = false;
  /// Empty under the multiplicity reading (a degenerate representative).
  std::optional<bool> passed;
  std::string reading;
};

MorseReport morse_report(const SweepResult& result);

/// class id, energy, lambda, Morse index, barycenter vertex, class size, ...
void write_sweep_csv(std::ostream& out, const SweepResult& result);

}  // namespace cahnlab
