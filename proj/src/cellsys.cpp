#include "sgf/cellsys.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "sgf/errors.hpp"

namespace sgf {

void TruncationPolicy::validate() const {
  if (mass_floor <= 0.0) throw ConfigError("policy: mass_floor must be > 0");
  if (max_generation < 0) throw ConfigError("policy: max_generation < 0");
  if (horizon <= 0.0) throw ConfigError("policy: horizon must be > 0");
  if (node_budget == 0) throw ConfigError("policy: node_budget must be > 0");
}

namespace {

struct Seed {
  long parent;
  std::size_t link_index;
  double birth_time;
  double mass;
  std::vector<int> label;
};

void rank_children(CellNode& node) {
  std::stable_sort(node.children.begin(), node.children.end(),
                   [](const ChildLink& a, const ChildLink& b) {
                     const double ma = std::abs(a.jump_size);
                     const double mb = std::abs(b.jump_size);
                     if (ma != mb) return ma > mb;
                     return a.jump_time < b.jump_time;
                   });
}

}  // namespace

CellSystem grow_cell_system(const SsmpSimulator& sim,
                            const TruncationPolicy& policy, Rng& rng) {
  policy.validate();
  CellSystem sys;
  sys.policy = policy;
  sys.start_mass = sim.spec().start;

  std::deque<Seed> queue;
  queue.push_back(Seed{-1, 0, 0.0, sim.spec().start, {}});
  while (!queue.empty()) {
    if (sys.nodes.size() >= policy.node_budget) {
      sys.budget_exhausted = true;
      // remaining seeds are accounted as truncated mass on their parents
      for (const Seed& s : queue) {
        if (s.parent >= 0) {
          CellNode& par = sys.nodes[static_cast<std::size_t>(s.parent)];
          const double w = std::pow(std::abs(s.mass), policy.reference_omega);
          if (s.mass > 0)
            par.dropped_pow_plus += w;
          else
            par.dropped_pow_minus += w;
        }
      }
      break;
    }
    Seed seed = queue.front();
    queue.pop_front();
    const double remaining = policy.horizon - seed.birth_time;
    if (remaining <= 0.0) continue;

    CellNode node;
    node.label = seed.label;
    node.birth_time = seed.birth_time;
    node.birth_mass = seed.mass;
    node.parent = seed.parent;
    // only jumps that can exceed the child floor need exact resolution
    const double rel = policy.relative_cutoff * policy.mass_floor /
                       std::abs(seed.mass);
    const double hint = std::log1p(std::min(rel, 0.4));
    node.path = sim.run_from(seed.mass, remaining, policy.steps_per_cell, rng,
                             hint,
                             policy.stop_mass_fraction * policy.mass_floor);
    node.lifetime = node.path.alive ? HUGE_VAL : node.path.duration;

    const int generation = static_cast<int>(node.label.size());
    for (const Jump& j : node.path.jumps) {
      const double child_mass = -j.size;
      if (std::abs(child_mass) >= policy.mass_ceiling) {
        const double w = std::pow(std::abs(j.size), policy.reference_omega);
        if (child_mass > 0)
          node.ceiling_pow_plus += w;
        else
          node.ceiling_pow_minus += w;
        continue;
      }
      if (std::abs(child_mass) < policy.mass_floor ||
          generation >= policy.max_generation) {
        const double w = std::pow(std::abs(j.size), policy.reference_omega);
        if (child_mass > 0)
          node.dropped_pow_plus += w;
        else
          node.dropped_pow_minus += w;
        continue;
      }
      ChildLink link;
      link.jump_time = j.time;
      link.jump_size = j.size;
      link.value_before = j.value_before;
      node.children.push_back(link);
    }
    rank_children(node);

    const long index = static_cast<long>(sys.nodes.size());
    if (seed.parent >= 0)
      sys.nodes[static_cast<std::size_t>(seed.parent)]
          .children[seed.link_index]
          .child = index;
    sys.nodes.push_back(std::move(node));

    CellNode& stored = sys.nodes.back();
    for (std::size_t k = 0; k < stored.children.size(); ++k) {
      const ChildLink& link = stored.children[k];
      std::vector<int> label = stored.label;
      label.push_back(static_cast<int>(k) + 1);
      queue.push_back(Seed{index, k, stored.birth_time + link.jump_time,
                           -link.jump_size, std::move(label)});
    }
  }
  return sys;
}

CellSystem grow_cell_system(const SsmpSpec& spec,
                            const TruncationPolicy& policy, Rng& rng) {
  SsmpSimulator sim(spec);
  return grow_cell_system(sim, policy, rng);
}

Snapshot take_snapshot(const CellSystem& system, double t) {
  if (t > system.policy.horizon)
    throw ConfigError("take_snapshot: t beyond the growth horizon");
  Snapshot snap;
  snap.time = t;
  for (std::size_t i = 0; i < system.nodes.size(); ++i) {
    const CellNode& node = system.nodes[i];
    const double local = t - node.birth_time;
    if (local < 0.0) continue;
    if (local >= node.lifetime) continue;
    if (!node.path.alive && local >= node.path.duration) continue;
    SnapshotEntry e;
    e.mass = node.path.value_at(local);
    e.generation = static_cast<int>(node.label.size());
    e.node = static_cast<long>(i);
    snap.entries.push_back(e);
  }
  std::stable_sort(snap.entries.begin(), snap.entries.end(),
                   [&](const SnapshotEntry& a, const SnapshotEntry& b) {
                     const double ma = std::abs(a.mass), mb = std::abs(b.mass);
                     if (ma != mb) return ma > mb;
                     return system.nodes[static_cast<std::size_t>(a.node)]
                                .birth_time <
                            system.nodes[static_cast<std::size_t>(b.node)]
                                .birth_time;
                   });
  return snap;
}

MartingaleEstimate genealogical_martingale(const CellSystem& system,
                                           const AdmissibleTriplet& triplet,
                                           int n) {
  int deepest = 0;
  for (const CellNode& node : system.nodes)
    deepest = std::max(deepest, static_cast<int>(node.label.size()));
  if (n + 1 > system.policy.max_generation)
    throw ConfigError(
        "genealogical_martingale: system not grown to generation n+1");
  MartingaleEstimate out;
  for (const CellNode& node : system.nodes) {
    const int gen = static_cast<int>(node.label.size());
    if (gen == n + 1) {
      const double v = node.birth_mass > 0 ? triplet.v_plus : triplet.v_minus;
      out.value += v * std::pow(std::abs(node.birth_mass), triplet.omega);
    }
    if (gen <= n) {
      // ceiling-cut children stand in for one generation-(n+1) descendant
      // mass each, by the martingale conditional mean
      out.value += triplet.v_plus * node.ceiling_pow_plus +
                   triplet.v_minus * node.ceiling_pow_minus;
      // below-floor children and unfinished lifetimes contribute unrealised
      // generation-(gen+1 .. n+1) mass; both are bounded by their omega-mass
      out.remainder_bound += triplet.v_plus * node.dropped_pow_plus +
                             triplet.v_minus * node.dropped_pow_minus;
      if (node.path.alive || node.path.truncated) {
        const double x = node.path.values.back();
        const double v = x > 0 ? triplet.v_plus : triplet.v_minus;
        out.remainder_bound += v * std::pow(std::abs(x), triplet.omega);
      }
    }
  }
  return out;
}

double eve_temporal_martingale(const PathSample& path,
                               const AdmissibleTriplet& triplet, double s) {
  if (s > path.duration && path.alive)
    throw ConfigError("eve_temporal_martingale: path does not cover s");
  double out = 0.0;
  const bool dead_by_s = !path.alive && s >= path.duration;
  if (!dead_by_s) {
    const double x = path.value_at(s);
    const double v = x > 0 ? triplet.v_plus : triplet.v_minus;
    out += v * std::pow(std::abs(x), triplet.omega);
  }
  for (const Jump& j : path.jumps) {
    if (j.time > s) break;
    const double child = -j.size;
    const double v = child > 0 ? triplet.v_plus : triplet.v_minus;
    out += v * std::pow(std::abs(j.size), triplet.omega);
  }
  return out;
}

double snapshot_martingale(const CellSystem& system,
                           const AdmissibleTriplet& triplet, double t) {
  const Snapshot snap = take_snapshot(system, t);
  double out = 0.0;
  for (const SnapshotEntry& e : snap.entries) {
    const double v = e.mass > 0 ? triplet.v_plus : triplet.v_minus;
    out += v * std::pow(std::abs(e.mass), triplet.omega);
  }
  return out;
}

BranchingTestReport branching_property_test(
    const SsmpSimulator& sim, const TruncationPolicy& policy, double t,
    double s, const std::function<double(const Snapshot&)>& statistic,
    int n_samples, Rng& rng) {
  std::vector<double> direct(static_cast<std::size_t>(n_samples));
  std::vector<double> recomposed(static_cast<std::size_t>(n_samples));
  TruncationPolicy full = policy;
  full.horizon = t + s;
  for (int i = 0; i < n_samples; ++i) {
    const CellSystem sys = grow_cell_system(sim, full, rng);
    direct[static_cast<std::size_t>(i)] = statistic(take_snapshot(sys, t + s));
  }
  TruncationPolicy first = policy;
  first.horizon = t;
  for (int i = 0; i < n_samples; ++i) {
    const CellSystem base = grow_cell_system(sim, first, rng);
    const Snapshot at_t = take_snapshot(base, t);
    Snapshot merged;
    merged.time = t + s;
    for (const SnapshotEntry& e : at_t.entries) {
      TruncationPolicy rest = policy;
      rest.horizon = s;
      rest.max_generation =
          std::max(0, policy.max_generation - e.generation);
      const CellSystem sub =
          grow_cell_system(SsmpSpec{sim.spec().map, sim.spec().alpha, e.mass},
                           rest, rng);
      const Snapshot tail = take_snapshot(sub, s);
      for (const SnapshotEntry& te : tail.entries) {
        SnapshotEntry copy = te;
        copy.generation += e.generation;
        copy.node = -1;
        merged.entries.push_back(copy);
      }
    }
    recomposed[static_cast<std::size_t>(i)] = statistic(merged);
  }
  BranchingTestReport rep;
  rep.n_direct = direct.size();
  rep.n_recomposed = recomposed.size();
  rep.ks = ks_two_sample(direct, recomposed);
  return rep;
}

void check_system_invariants(const CellSystem& system) {
  for (std::size_t i = 0; i < system.nodes.size(); ++i) {
    const CellNode& node = system.nodes[i];
    // forest: parent link consistency and label derivation
    if (node.parent >= 0) {
      const CellNode& par = system.nodes[static_cast<std::size_t>(node.parent)];
      if (node.label.size() != par.label.size() + 1)
        throw NumericError("cell system: generation inconsistency", 0);
      bool linked = false;
      for (const ChildLink& link : par.children) {
        if (link.child == static_cast<long>(i)) {
          linked = true;
          // conservation at the split: child mass is exactly minus the jump
          if (node.birth_mass != -link.jump_size)
            throw NumericError("cell system: mass not conserved at split", 0);
          if (node.birth_time != par.birth_time + link.jump_time)
            throw NumericError("cell system: birth time mismatch", 0);
        }
      }
      if (!linked) throw NumericError("cell system: orphan node", 0);
    } else if (i != 0 || !node.label.empty()) {
      throw NumericError("cell system: non-root without parent", 0);
    }
    // children ranked by |mass| descending
    for (std::size_t k = 1; k < node.children.size(); ++k) {
      if (std::abs(node.children[k].jump_size) >
          std::abs(node.children[k - 1].jump_size) + 1e-15)
        throw NumericError("cell system: children not ranked", 0);
    }
    // the parent path really jumps by jump_size at jump_time
    for (const ChildLink& link : node.children) {
      bool found = false;
      for (const Jump& j : node.path.jumps) {
        if (j.time == link.jump_time && j.size == link.jump_size &&
            j.value_before == link.value_before) {
          found = true;
          break;
        }
      }
      if (!found)
        throw NumericError("cell system: child link without matching jump", 0);
    }
  }
}

}  // namespace sgf
