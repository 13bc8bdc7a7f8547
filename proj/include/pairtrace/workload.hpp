#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pairtrace/trace.hpp"
#include "pairtrace/types.hpp"

namespace pairtrace {

enum class GeneratorKind { Sorting, RandomMixed, DijkstraLike, MeldHeavy };

const char* to_string(GeneratorKind g);
GeneratorKind generator_from_string(const std::string& s);

/// Operation mix for RandomMixed, as probabilities. Infeasible draws fall
/// back to the nearest feasible operation (ultimately make_heap), so the
/// realized mix drifts slightly at the start of a run.
struct OpMix {
  double insert = 0.33;
  double delete_min = 0.18;
  double decrease_key = 0.18;
  double meld = 0.05;
  double make_heap = 0.05;
  double find_min = 0.18;
  double erase = 0.03;
  void check() const;  // throws unless the sum is 1 within 1e-9
};

struct WorkloadSpec {
  GeneratorKind generator = GeneratorKind::RandomMixed;
  std::uint64_t size = 1000;  // items, or operations for RandomMixed
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::TwoPass;
  bool drain_tail = false;  // append delete_min-until-empty per live heap
  OpMix mix;
};

/// One operation against the forest. Heaps and items are referenced by
/// creation order, which matches the ids both Forest and RefModel assign.
struct WorkloadOp {
  OpKind kind = OpKind::MakeHeap;
  HeapId heap = 0;
  HeapId heap2 = 0;
  ItemId item = 0;
  std::int64_t key = 0;
  friend bool operator==(const WorkloadOp&, const WorkloadOp&) = default;
};

struct Workload {
  WorkloadSpec spec;
  std::vector<WorkloadOp> ops;
};

/// Deterministic in the spec: equal specs give identical workloads, on
/// any platform. All generators keep live keys globally distinct.
///
///  Sorting      make_heap, insert a permutation of 0..size-1, then
///               delete_min size times.
///  RandomMixed  `size` operations drawn from spec.mix over a growing
///               soup of heaps.
///  DijkstraLike one heap, `size` initial inserts, then rounds of
///               delete_min + a few decrease_keys with occasional
///               budgeted inserts, until empty.
///  MeldHeavy    `size` heaps of 1..3 items, melded pairwise at random
///               down to one, with delete_mins sprinkled in.
Workload generate(const WorkloadSpec& spec);

TraceMeta meta_for(const WorkloadSpec& spec);

/// Executes the workload with a recording sink and the spec's strategy.
Trace run(const Workload& wl);

/// JSON Lines: one metadata object, then one operation per line.
std::string serialize_workload(const Workload& wl);
Workload deserialize_workload(std::string_view text);

/// Re-executes a trace's operations through a fresh Forest, recording a
/// new trace. Throws Error when the trace's recorded ids cannot be
/// reproduced at all (wrong make_heap order, foreign items).
Trace replay(const Trace& t);

/// Replays and compares event streams. Returns nothing when the replay
/// reproduces the trace exactly, else a first-difference description.
std::optional<std::string> verify_replay(const Trace& t);

}  // namespace pairtrace
