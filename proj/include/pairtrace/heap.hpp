#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pairtrace/trace.hpp"
#include "pairtrace/types.hpp"

namespace pairtrace {

/// First structural violation found by validate(), with the item path
/// from the root down to the offending node.
struct Violation {
  std::string path;
  std::string message;
};

/// A forest of pairing heaps.
///
/// Each heap is one heap-ordered tree in the standard three-pointer
/// representation: child points at the leftmost child, right at the next
/// sibling, and left_parent at the left sibling, or at the parent for a
/// leftmost child. Link and cut are the only structural mutations, and
/// every one of them is reported to the trace sink, so a run is fully
/// described by its trace.
///
/// Nodes live in an arena indexed by ItemId; ids are assigned densely at
/// insert time and never reused. Heap ids are likewise dense, shared
/// between make_heap and meld results. A heap consumed by meld is dead:
/// operations on it throw. Ties link in favour of the first argument,
/// which is always the incumbent: the existing root for insert and
/// decrease_key, the left element for pairing and assembly.
class Forest {
 public:
  explicit Forest(TraceSink& sink, Strategy default_strategy = Strategy::TwoPass);

  HeapId make_heap();
  HeapId make_heap(Strategy strategy);

  /// Root item and key, or nothing when the heap is empty. Recorded in
  /// the trace; no structural change.
  std::optional<std::pair<ItemId, std::int64_t>> find_min(HeapId h);

  ItemId insert(HeapId h, std::int64_t key);

  /// Returns the surviving heap, a fresh id; h1 and h2 are dead after.
  HeapId meld(HeapId h1, HeapId h2);

  /// key must not exceed the item's current key. A non-root item is cut
  /// and relinked with the root even when the key did not change.
  void decrease_key(HeapId h, ItemId item, std::int64_t key);

  /// Nothing when the heap is empty.
  std::optional<ItemId> delete_min(HeapId h);

  /// Arbitrary deletion: decrease the key to minus infinity, then
  /// delete-min, recorded as one Delete operation.
  void remove(HeapId h, ItemId item);

  /// Walks the whole tree; returns the first violation, if any.
  std::optional<Violation> validate(HeapId h) const;

  // Introspection. None of these record trace events.
  bool is_live(HeapId h) const;
  Strategy strategy(HeapId h) const;
  std::uint64_t item_count(HeapId h) const;
  std::optional<ItemId> root_of(HeapId h) const;
  bool item_live(ItemId item) const;
  bool contains(HeapId h, ItemId item) const;
  std::int64_t key_of(ItemId item) const;
  std::vector<ItemId> children_of(ItemId item) const;  // left to right
  std::uint64_t items_created() const { return nodes_.size(); }
  std::uint64_t heaps_created() const { return heaps_.size(); }

 private:
  friend struct ForestTestAccess;

  struct Node {
    Key key;
    ItemId child = kNone;
    ItemId right = kNone;
    ItemId left_parent = kNone;
    LinkId lost_link = kNone;  // the link this node lost, while attached
  };

  struct Heap {
    ItemId root = kNone;
    Strategy strategy = Strategy::TwoPass;
    bool live = false;
    HeapId merged_into = kNone;  // forwarding for heaps consumed by meld
    std::uint64_t items = 0;
  };

  Heap& checked_live(HeapId h);
  const Heap& checked_live(HeapId h) const;
  HeapId resolve(HeapId h);            // follows forwarding, halves paths
  HeapId resolve_const(HeapId h) const;
  void check_member(HeapId h, ItemId item);

  /// Links two roots; first wins ties. Returns the winner.
  ItemId link(ItemId first, ItemId second, LinkContext ctx);
  void cut(ItemId item, CutCause cause);
  void relink_decreased(Heap& heap, ItemId item, Key key);
  ItemId pop_root(Heap& heap);  // cuts children, combines, removes root

  TraceSink& sink_;
  Strategy default_strategy_;
  std::vector<Node> nodes_;
  std::vector<Heap> heaps_;
  std::vector<HeapId> item_heap_;      // heap at insert time; kNone once removed
  std::vector<ItemId> scratch_roots_;  // reused by pop_root
};

}  // namespace pairtrace
