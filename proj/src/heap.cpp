#include "pairtrace/heap.hpp"

#include <cassert>

namespace pairtrace {

Forest::Forest(TraceSink& sink, Strategy default_strategy)
    : sink_(sink), default_strategy_(default_strategy) {}

// ------------------------------------------------------------ plumbing

Forest::Heap& Forest::checked_live(HeapId h) {
  if (h >= heaps_.size() || !heaps_[h].live)
    throw Error("heap " + std::to_string(h) + " is not live");
  return heaps_[h];
}

const Forest::Heap& Forest::checked_live(HeapId h) const {
  if (h >= heaps_.size() || !heaps_[h].live)
    throw Error("heap " + std::to_string(h) + " is not live");
  return heaps_[h];
}

HeapId Forest::resolve(HeapId h) {
  while (heaps_[h].merged_into != kNone) {
    HeapId next = heaps_[h].merged_into;
    if (heaps_[next].merged_into != kNone)
      heaps_[h].merged_into = heaps_[next].merged_into;
    h = next;
  }
  return h;
}

HeapId Forest::resolve_const(HeapId h) const {
  while (heaps_[h].merged_into != kNone) h = heaps_[h].merged_into;
  return h;
}

void Forest::check_member(HeapId h, ItemId item) {
  if (item >= nodes_.size() || item_heap_[item] == kNone ||
      resolve(item_heap_[item]) != h)
    throw Error("item " + std::to_string(item) + " is not in heap " +
                std::to_string(h));
}

ItemId Forest::link(ItemId first, ItemId second, LinkContext ctx) {
  assert(first != second);
  assert(nodes_[first].left_parent == kNone && nodes_[second].left_parent == kNone);
  ItemId winner = nodes_[second].key < nodes_[first].key ? second : first;
  ItemId loser = winner == first ? second : first;
  Orientation orient = Orientation::NotApplicable;
  if (ctx == LinkContext::Pairing || ctx == LinkContext::Assembly)
    orient = winner == first ? Orientation::LoserRight : Orientation::LoserLeft;

  Node& w = nodes_[winner];
  Node& l = nodes_[loser];
  l.right = w.child;
  if (w.child != kNone) nodes_[w.child].left_parent = loser;
  w.child = loser;
  l.left_parent = winner;
  l.lost_link = sink_.emit_link(winner, loser, ctx, orient);
  return winner;
}

void Forest::cut(ItemId item, CutCause cause) {
  Node& n = nodes_[item];
  assert(n.left_parent != kNone);
  Node& lp = nodes_[n.left_parent];
  if (lp.child == item)
    lp.child = n.right;
  else
    lp.right = n.right;
  if (n.right != kNone) nodes_[n.right].left_parent = n.left_parent;
  n.left_parent = kNone;
  n.right = kNone;
  sink_.emit_cut(n.lost_link, cause);
  n.lost_link = kNone;
}

// ----------------------------------------------------------- operations

HeapId Forest::make_heap() { return make_heap(default_strategy_); }

HeapId Forest::make_heap(Strategy strategy) {
  HeapId h = heaps_.size();
  heaps_.push_back(Heap{kNone, strategy, true, kNone, 0});
  sink_.begin_op(OpKind::MakeHeap);
  sink_.op_heap(h);
  sink_.end_op();
  return h;
}

std::optional<std::pair<ItemId, std::int64_t>> Forest::find_min(HeapId h) {
  Heap& heap = checked_live(h);
  sink_.begin_op(OpKind::FindMin);
  sink_.op_heap(h);
  std::optional<std::pair<ItemId, std::int64_t>> out;
  if (heap.root != kNone) {
    assert(!nodes_[heap.root].key.minus_inf);
    out = {heap.root, nodes_[heap.root].key.value};
    sink_.op_item(heap.root);
    sink_.op_key(nodes_[heap.root].key);
  }
  sink_.end_op();
  return out;
}

ItemId Forest::insert(HeapId h, std::int64_t key) {
  Heap& heap = checked_live(h);
  ItemId item = nodes_.size();
  nodes_.push_back(Node{Key::of(key), kNone, kNone, kNone, kNone});
  item_heap_.push_back(h);
  heap.items++;
  sink_.begin_op(OpKind::Insert);
  sink_.op_heap(h);
  sink_.op_item(item);
  sink_.op_key(Key::of(key));
  heap.root = heap.root == kNone ? item : link(heap.root, item, LinkContext::Insertion);
  sink_.end_op();
  return item;
}

HeapId Forest::meld(HeapId h1, HeapId h2) {
  checked_live(h1);
  checked_live(h2);
  if (h1 == h2) throw Error("meld of heap " + std::to_string(h1) + " with itself");
  sink_.begin_op(OpKind::Meld);
  sink_.op_heap(h1);
  sink_.op_heap2(h2);
  HeapId result = heaps_.size();
  heaps_.push_back(Heap{kNone, heaps_[h1].strategy, true, kNone,
                        heaps_[h1].items + heaps_[h2].items});
  Heap& out = heaps_.back();
  ItemId r1 = heaps_[h1].root;
  ItemId r2 = heaps_[h2].root;
  if (r1 == kNone)
    out.root = r2;
  else if (r2 == kNone)
    out.root = r1;
  else
    out.root = link(r1, r2, LinkContext::Meld);
  heaps_[h1] = Heap{kNone, heaps_[h1].strategy, false, result, 0};
  heaps_[h2] = Heap{kNone, heaps_[h2].strategy, false, result, 0};
  sink_.end_op();
  return result;
}

void Forest::relink_decreased(Heap& heap, ItemId item, Key key) {
  assert(key <= nodes_[item].key);
  nodes_[item].key = key;
  if (heap.root != item) {
    cut(item, CutCause::DecreaseKey);
    heap.root = link(heap.root, item, LinkContext::DecreaseKey);
  }
}

void Forest::decrease_key(HeapId h, ItemId item, std::int64_t key) {
  Heap& heap = checked_live(h);
  check_member(h, item);
  if (nodes_[item].key < Key::of(key))
    throw Error("decrease_key of item " + std::to_string(item) + " from " +
                std::to_string(nodes_[item].key.value) + " to larger key " +
                std::to_string(key));
  sink_.begin_op(OpKind::DecreaseKey);
  sink_.op_heap(h);
  sink_.op_item(item);
  sink_.op_key(Key::of(key));
  relink_decreased(heap, item, Key::of(key));
  sink_.end_op();
}

ItemId Forest::pop_root(Heap& heap) {
  ItemId dead = heap.root;
  auto& roots = scratch_roots_;
  roots.clear();
  for (ItemId c = nodes_[dead].child; c != kNone; c = nodes_[c].right)
    roots.push_back(c);
  for (ItemId c : roots) cut(c, CutCause::Deletion);
  assert(nodes_[dead].child == kNone);

  if (heap.strategy == Strategy::TwoPass) {
    // Pairing pass, left to right.
    std::size_t out = 0;
    std::size_t i = 0;
    for (; i + 1 < roots.size(); i += 2)
      roots[out++] = link(roots[i], roots[i + 1], LinkContext::Pairing);
    if (i < roots.size()) roots[out++] = roots[i];
    roots.resize(out);
    // Assembly pass, right to left: rightmost root with its left neighbour.
    while (roots.size() > 1) {
      ItemId merged = link(roots[roots.size() - 2], roots.back(), LinkContext::Assembly);
      roots.pop_back();
      roots.back() = merged;
    }
  } else {
    // Repeated pairing passes; an odd root is carried to the next pass.
    while (roots.size() > 1) {
      std::size_t out = 0;
      std::size_t i = 0;
      for (; i + 1 < roots.size(); i += 2)
        roots[out++] = link(roots[i], roots[i + 1], LinkContext::Pairing);
      if (i < roots.size()) roots[out++] = roots[i];
      roots.resize(out);
    }
  }

  heap.root = roots.empty() ? kNone : roots[0];
  heap.items--;
  item_heap_[dead] = kNone;
  nodes_[dead] = Node{};
  return dead;
}

std::optional<ItemId> Forest::delete_min(HeapId h) {
  Heap& heap = checked_live(h);
  sink_.begin_op(OpKind::DeleteMin);
  sink_.op_heap(h);
  if (heap.root == kNone) {
    sink_.end_op();
    return std::nullopt;
  }
  sink_.op_item(heap.root);
  sink_.op_key(nodes_[heap.root].key);
  ItemId dead = pop_root(heap);
  sink_.end_op();
  return dead;
}

void Forest::remove(HeapId h, ItemId item) {
  Heap& heap = checked_live(h);
  check_member(h, item);
  sink_.begin_op(OpKind::Delete);
  sink_.op_heap(h);
  sink_.op_item(item);
  relink_decreased(heap, item, Key::minus_infinity());
  assert(heap.root == item);
  pop_root(heap);
  sink_.end_op();
}

// -------------------------------------------------------- introspection

bool Forest::is_live(HeapId h) const {
  return h < heaps_.size() && heaps_[h].live;
}

Strategy Forest::strategy(HeapId h) const { return checked_live(h).strategy; }

std::uint64_t Forest::item_count(HeapId h) const { return checked_live(h).items; }

std::optional<ItemId> Forest::root_of(HeapId h) const {
  const Heap& heap = checked_live(h);
  if (heap.root == kNone) return std::nullopt;
  return heap.root;
}

bool Forest::item_live(ItemId item) const {
  return item < nodes_.size() && item_heap_[item] != kNone;
}

bool Forest::contains(HeapId h, ItemId item) const {
  checked_live(h);
  return item_live(item) && resolve_const(item_heap_[item]) == h;
}

std::int64_t Forest::key_of(ItemId item) const {
  if (!item_live(item)) throw Error("item " + std::to_string(item) + " is not live");
  assert(!nodes_[item].key.minus_inf);
  return nodes_[item].key.value;
}

std::vector<ItemId> Forest::children_of(ItemId item) const {
  if (!item_live(item)) throw Error("item " + std::to_string(item) + " is not live");
  std::vector<ItemId> out;
  for (ItemId c = nodes_[item].child; c != kNone; c = nodes_[c].right)
    out.push_back(c);
  return out;
}

// ------------------------------------------------------------ validate

namespace {

std::string path_string(const std::vector<ItemId>& stack) {
  std::string out;
  for (ItemId id : stack) {
    if (!out.empty()) out += '>';
    out += std::to_string(id);
  }
  return out;
}

}  // namespace

std::optional<Violation> Forest::validate(HeapId h) const {
  const Heap& heap = checked_live(h);
  if (heap.root == kNone) {
    if (heap.items != 0)
      return Violation{"", "empty root but item count " + std::to_string(heap.items)};
    return std::nullopt;
  }

  const Node& root = nodes_[heap.root];
  if (root.left_parent != kNone)
    return Violation{std::to_string(heap.root), "root has a leftParent"};
  if (root.right != kNone)
    return Violation{std::to_string(heap.root), "root has a right sibling"};
  if (root.lost_link != kNone)
    return Violation{std::to_string(heap.root), "root carries a lost link"};
  if (resolve_const(item_heap_[heap.root]) != h)
    return Violation{std::to_string(heap.root), "root belongs to a different heap"};

  struct Frame {
    ItemId node;
    ItemId child;  // next child to visit
    ItemId prev;   // child visited before it, kNone at the leftmost
  };
  std::uint64_t seen = 1;
  std::vector<ItemId> path{heap.root};
  std::vector<Frame> stack{{heap.root, root.child, kNone}};

  while (!stack.empty()) {
    Frame& f = stack.back();
    ItemId child = f.child;
    if (child == kNone) {
      stack.pop_back();
      path.pop_back();
      continue;
    }
    const Node& c = nodes_[child];
    path.push_back(child);
    ItemId want_lp = f.prev == kNone ? f.node : f.prev;
    if (c.left_parent != want_lp)
      return Violation{path_string(path),
                       f.prev == kNone
                           ? "leftmost child leftParent is not the parent"
                           : "leftParent does not point at the left sibling"};
    if (c.lost_link == kNone)
      return Violation{path_string(path), "attached node carries no lost link"};
    if (c.right != kNone && nodes_[c.right].lost_link != kNone &&
        nodes_[c.right].lost_link >= c.lost_link)
      return Violation{path_string(path),
                       "lost links do not decrease left to right across siblings"};
    if (!(nodes_[f.node].key <= c.key))
      return Violation{path_string(path), "heap order violated"};
    if (resolve_const(item_heap_[child]) != h)
      return Violation{path_string(path), "node belongs to a different heap"};
    ++seen;
    if (seen > heap.items)
      return Violation{path_string(path),
                       "more nodes reachable than the heap's item count (cycle?)"};
    f.child = c.right;
    f.prev = child;
    stack.push_back({child, c.child, kNone});
  }

  if (seen != heap.items)
    return Violation{"", "reachable nodes " + std::to_string(seen) +
                             " != item count " + std::to_string(heap.items)};
  return std::nullopt;
}

}  // namespace pairtrace
