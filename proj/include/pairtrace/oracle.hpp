#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pairtrace/types.hpp"

namespace pairtrace {

struct Workload;

/// Reference priority queue: a forest of sorted sets with the same id
/// discipline as Forest (dense item ids by insert order, dense heap ids
/// shared by make_heap and meld, inputs of a meld dead afterwards).
/// Deliberately free of links, cuts and tree shape.
class RefModel {
 public:
  HeapId make_heap();
  std::optional<std::pair<ItemId, std::int64_t>> find_min(HeapId h) const;
  ItemId insert(HeapId h, std::int64_t key);
  HeapId meld(HeapId h1, HeapId h2);
  void decrease_key(HeapId h, ItemId item, std::int64_t key);
  std::optional<ItemId> delete_min(HeapId h);
  void remove(HeapId h, ItemId item);

  bool is_live(HeapId h) const;
  std::uint64_t size(HeapId h) const;
  /// True when the heap is non-empty and exactly one item holds the
  /// minimum key. Ties break toward the smallest ItemId.
  bool min_unique(HeapId h) const;
  bool item_live(ItemId item) const;
  std::int64_t key_of(ItemId item) const;
  HeapId heap_of(ItemId item) const;
  std::uint64_t items_created() const { return items_.size(); }
  std::uint64_t heaps_created() const { return heaps_.size(); }

 private:
  struct Entry {
    std::int64_t key = 0;
    HeapId heap0 = kNone;  // heap at insert time; kNone once removed
  };
  struct Heap {
    std::set<std::pair<std::int64_t, ItemId>> items;
    bool live = false;
    HeapId merged_into = kNone;
  };

  Heap& checked_live(HeapId h);
  const Heap& checked_live(HeapId h) const;
  HeapId resolve(HeapId h) const;

  std::vector<Entry> items_;
  std::vector<Heap> heaps_;
};

/// What one operation looked like from the outside: the minimum of the
/// involved heap after the operation, and for delete_min and delete the
/// removed item with the key it held. The *_unique flags are only
/// meaningful on observations taken from the reference model; they mark
/// where the minimum was unambiguous, so item ids must match too.
struct Observation {
  std::uint64_t op = 0;
  std::optional<std::pair<ItemId, std::int64_t>> min;
  bool min_unique = true;
  std::optional<std::pair<ItemId, std::int64_t>> removed;
  bool removed_unique = true;
  friend bool operator==(const Observation&, const Observation&) = default;
};

struct DivergenceReport {
  bool ok = true;
  std::uint64_t op = 0;  // first diverging operation
  std::string message;
  std::optional<std::int64_t> expected_key;
  std::optional<std::int64_t> actual_key;
  std::uint64_t ops_executed = 0;
};

/// Runs the workload through a Forest (tracing disabled) and records one
/// observation per operation. The strategy overrides the workload's.
std::vector<Observation> observe_forest(const Workload& wl, Strategy strategy);

/// Same, through the reference model.
std::vector<Observation> observe_reference(const Workload& wl);

/// Compares observation streams op by op. Keys must always match; item
/// ids must match wherever the reference says the minimum was unique.
DivergenceReport diff_observations(const std::vector<Observation>& reference,
                                   const std::vector<Observation>& actual);

/// observe both + diff, with the workload's own strategy.
DivergenceReport run_both(const Workload& wl);

}  // namespace pairtrace
