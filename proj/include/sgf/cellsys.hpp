#ifndef SGF_CELLSYS_HPP
#define SGF_CELLSYS_HPP

#include <functional>
#include <vector>

#include "sgf/lamperti.hpp"
#include "sgf/spectral.hpp"
#include "sgf/stats.hpp"

namespace sgf {

struct TruncationPolicy {
  double mass_floor = 1e-3;
  // children above the ceiling are not simulated; genealogical estimators
  // carry them by their exact conditional mean v |mass|^omega at every
  // generation, which removes the heavy upper tail from increment statistics
  double mass_ceiling = HUGE_VAL;
  int max_generation = 3;
  double horizon = 1.0;
  std::size_t node_budget = 1000000;
  // exponent used for the truncation-mass accounting (normally omega)
  double reference_omega = 1.75;
  int steps_per_cell = 64;  // grid only; between jumps the paths are exact
  // jumps that cannot make a child above relative_cutoff * mass_floor are
  // mean-compensated rather than simulated
  double relative_cutoff = 0.02;
  // cells are cut once their mass falls to this fraction of the floor; the
  // martingale accounting carries the frozen mass as remainder
  double stop_mass_fraction = 0.3;

  void validate() const;
};

struct ChildLink {
  double jump_time = 0.0;   // in the parent's local time
  double jump_size = 0.0;   // jump of the parent mass; child mass = -size
  double value_before = 0.0;
  long child = -1;          // index into CellSystem::nodes, -1 if not grown
};

struct CellNode {
  std::vector<int> label;   // tree address, empty for the Eve cell
  double birth_time = 0.0;
  double birth_mass = 0.0;
  double lifetime = 0.0;    // local death time; HUGE_VAL if alive at horizon
  PathSample path;          // mass path in local time
  std::vector<ChildLink> children;  // ranked by |child mass| (ties: time)
  long parent = -1;
  // below-floor jumps of this cell: sum |jump|^ref split by child sign
  double dropped_pow_plus = 0.0;
  double dropped_pow_minus = 0.0;
  // above-ceiling jumps, same accounting, reported as part of the value
  double ceiling_pow_plus = 0.0;
  double ceiling_pow_minus = 0.0;
};

struct CellSystem {
  std::vector<CellNode> nodes;
  TruncationPolicy policy;
  double start_mass = 0.0;
  bool budget_exhausted = false;

  int generation_of(long i) const {
    return static_cast<int>(nodes[static_cast<std::size_t>(i)].label.size());
  }
};

struct SnapshotEntry {
  double mass = 0.0;
  int generation = 0;
  long node = -1;
};

struct Snapshot {
  double time = 0.0;
  std::vector<SnapshotEntry> entries;  // ranked by |mass| descending
};

// Breadth-first recursive growth: every jump of a cell with |jump| above the
// mass floor spawns an independent cell of mass -jump, until the generation
// cap, the horizon or the node budget cuts the recursion.  Deterministic
// given (spec, policy, rng state).
CellSystem grow_cell_system(const SsmpSimulator& sim,
                            const TruncationPolicy& policy, Rng& rng);
CellSystem grow_cell_system(const SsmpSpec& spec,
                            const TruncationPolicy& policy, Rng& rng);

Snapshot take_snapshot(const CellSystem& system, double t);

struct MartingaleEstimate {
  double value = 0.0;
  double remainder_bound = 0.0;  // truncated mass at the reference exponent
};

// sum over generation n+1 of v_sgn |birth mass|^omega, plus the accounted
// truncation remainder (below-floor jumps, unfinished cells, budget cuts)
MartingaleEstimate genealogical_martingale(const CellSystem& system,
                                           const AdmissibleTriplet& triplet,
                                           int n);

// v_{sgn X(s)} |X(s)|^omega + sum of v_{sgn(-jump)} |jump|^omega over jumps
// up to s (and up to death); the jump list is exact
double eve_temporal_martingale(const PathSample& path,
                               const AdmissibleTriplet& triplet, double s);

// value of the temporal (snapshot) functional sum v |mass|^omega at time t
double snapshot_martingale(const CellSystem& system,
                           const AdmissibleTriplet& triplet, double t);

struct BranchingTestReport {
  KsResult ks;
  std::size_t n_direct = 0;
  std::size_t n_recomposed = 0;
};

// Two-sample comparison of statistic(X(t+s)) against the recomposition from
// independent copies relaunched off a time-t snapshot.
BranchingTestReport branching_property_test(
    const SsmpSimulator& sim, const TruncationPolicy& policy, double t,
    double s, const std::function<double(const Snapshot&)>& statistic,
    int n_samples, Rng& rng);

// structural checks used by the acceptance suite: conservation at recorded
// splits, forest property, generation consistency; throws on violation
void check_system_invariants(const CellSystem& system);

}  // namespace sgf

#endif
