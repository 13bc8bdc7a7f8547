#include "pairtrace/oracle.hpp"

#include <cassert>

#include "pairtrace/heap.hpp"
#include "pairtrace/workload.hpp"

namespace pairtrace {

// ------------------------------------------------------------- RefModel

RefModel::Heap& RefModel::checked_live(HeapId h) {
  if (h >= heaps_.size() || !heaps_[h].live)
    throw Error("heap " + std::to_string(h) + " is not live");
  return heaps_[h];
}

const RefModel::Heap& RefModel::checked_live(HeapId h) const {
  if (h >= heaps_.size() || !heaps_[h].live)
    throw Error("heap " + std::to_string(h) + " is not live");
  return heaps_[h];
}

HeapId RefModel::resolve(HeapId h) const {
  while (heaps_[h].merged_into != kNone) h = heaps_[h].merged_into;
  return h;
}

HeapId RefModel::make_heap() {
  heaps_.push_back(Heap{{}, true, kNone});
  return heaps_.size() - 1;
}

std::optional<std::pair<ItemId, std::int64_t>> RefModel::find_min(HeapId h) const {
  const Heap& heap = checked_live(h);
  if (heap.items.empty()) return std::nullopt;
  auto [key, item] = *heap.items.begin();
  return {{item, key}};
}

ItemId RefModel::insert(HeapId h, std::int64_t key) {
  Heap& heap = checked_live(h);
  ItemId item = items_.size();
  items_.push_back(Entry{key, h});
  heap.items.insert({key, item});
  return item;
}

HeapId RefModel::meld(HeapId h1, HeapId h2) {
  checked_live(h1);
  checked_live(h2);
  if (h1 == h2) throw Error("meld of heap " + std::to_string(h1) + " with itself");
  HeapId result = heaps_.size();
  heaps_.push_back(Heap{{}, true, kNone});
  Heap& out = heaps_.back();
  out.items = std::move(heaps_[h1].items);
  out.items.merge(heaps_[h2].items);
  heaps_[h1] = Heap{{}, false, result};
  heaps_[h2] = Heap{{}, false, result};
  return result;
}

void RefModel::decrease_key(HeapId h, ItemId item, std::int64_t key) {
  Heap& heap = checked_live(h);
  if (!item_live(item) || resolve(items_[item].heap0) != h)
    throw Error("item " + std::to_string(item) + " is not in heap " +
                std::to_string(h));
  if (key > items_[item].key)
    throw Error("decrease_key of item " + std::to_string(item) + " from " +
                std::to_string(items_[item].key) + " to larger key " +
                std::to_string(key));
  heap.items.erase({items_[item].key, item});
  items_[item].key = key;
  heap.items.insert({key, item});
}

std::optional<ItemId> RefModel::delete_min(HeapId h) {
  Heap& heap = checked_live(h);
  if (heap.items.empty()) return std::nullopt;
  auto it = heap.items.begin();
  ItemId item = it->second;
  heap.items.erase(it);
  items_[item].heap0 = kNone;
  return item;
}

void RefModel::remove(HeapId h, ItemId item) {
  Heap& heap = checked_live(h);
  if (!item_live(item) || resolve(items_[item].heap0) != h)
    throw Error("item " + std::to_string(item) + " is not in heap " +
                std::to_string(h));
  heap.items.erase({items_[item].key, item});
  items_[item].heap0 = kNone;
}

bool RefModel::is_live(HeapId h) const { return h < heaps_.size() && heaps_[h].live; }

std::uint64_t RefModel::size(HeapId h) const { return checked_live(h).items.size(); }

bool RefModel::min_unique(HeapId h) const {
  const Heap& heap = checked_live(h);
  if (heap.items.empty()) return false;
  auto it = heap.items.begin();
  auto next = std::next(it);
  return next == heap.items.end() || next->first != it->first;
}

bool RefModel::item_live(ItemId item) const {
  return item < items_.size() && items_[item].heap0 != kNone;
}

std::int64_t RefModel::key_of(ItemId item) const {
  if (!item_live(item)) throw Error("item " + std::to_string(item) + " is not live");
  return items_[item].key;
}

HeapId RefModel::heap_of(ItemId item) const {
  if (!item_live(item)) throw Error("item " + std::to_string(item) + " is not live");
  return resolve(items_[item].heap0);
}

// ----------------------------------------------------------- observers

std::vector<Observation> observe_forest(const Workload& wl, Strategy strategy) {
  NullSink sink;
  Forest f(sink, strategy);
  std::vector<Observation> out;
  out.reserve(wl.ops.size());
  std::uint64_t op_index = 0;

  auto min_of = [&f](HeapId h) -> std::optional<std::pair<ItemId, std::int64_t>> {
    auto root = f.root_of(h);
    if (!root) return std::nullopt;
    return {{*root, f.key_of(*root)}};
  };

  for (const WorkloadOp& op : wl.ops) {
    Observation obs;
    obs.op = op_index++;
    switch (op.kind) {
      case OpKind::MakeHeap:
        f.make_heap();
        obs.min = min_of(f.heaps_created() - 1);
        break;
      case OpKind::Insert:
        f.insert(op.heap, op.key);
        obs.min = min_of(op.heap);
        break;
      case OpKind::Meld: {
        HeapId r = f.meld(op.heap, op.heap2);
        obs.min = min_of(r);
        break;
      }
      case OpKind::DecreaseKey:
        f.decrease_key(op.heap, op.item, op.key);
        obs.min = min_of(op.heap);
        break;
      case OpKind::DeleteMin: {
        auto pre = min_of(op.heap);
        auto removed = f.delete_min(op.heap);
        if (removed) {
          assert(pre && pre->first == *removed);
          obs.removed = pre;
        }
        obs.min = min_of(op.heap);
        break;
      }
      case OpKind::Delete: {
        std::int64_t key = f.key_of(op.item);
        f.remove(op.heap, op.item);
        obs.removed = {{op.item, key}};
        obs.min = min_of(op.heap);
        break;
      }
      case OpKind::FindMin:
        f.find_min(op.heap);
        obs.min = min_of(op.heap);
        break;
    }
    out.push_back(obs);
  }
  return out;
}

std::vector<Observation> observe_reference(const Workload& wl) {
  RefModel m;
  std::vector<Observation> out;
  out.reserve(wl.ops.size());
  std::uint64_t op_index = 0;

  auto note_min = [&m](Observation& obs, HeapId h) {
    obs.min = m.find_min(h);
    obs.min_unique = m.min_unique(h);
  };

  for (const WorkloadOp& op : wl.ops) {
    Observation obs;
    obs.op = op_index++;
    switch (op.kind) {
      case OpKind::MakeHeap:
        note_min(obs, m.make_heap());
        break;
      case OpKind::Insert:
        m.insert(op.heap, op.key);
        note_min(obs, op.heap);
        break;
      case OpKind::Meld:
        note_min(obs, m.meld(op.heap, op.heap2));
        break;
      case OpKind::DecreaseKey:
        m.decrease_key(op.heap, op.item, op.key);
        note_min(obs, op.heap);
        break;
      case OpKind::DeleteMin: {
        auto pre = m.find_min(op.heap);
        obs.removed_unique = m.is_live(op.heap) && m.min_unique(op.heap);
        auto removed = m.delete_min(op.heap);
        if (removed) obs.removed = pre;
        note_min(obs, op.heap);
        break;
      }
      case OpKind::Delete: {
        std::int64_t key = m.key_of(op.item);
        m.remove(op.heap, op.item);
        obs.removed = {{op.item, key}};
        note_min(obs, op.heap);
        break;
      }
      case OpKind::FindMin:
        note_min(obs, op.heap);
        break;
    }
    out.push_back(obs);
  }
  return out;
}

// --------------------------------------------------------------- diff

namespace {

DivergenceReport diverge(std::uint64_t op, std::string message,
                         std::optional<std::int64_t> expected,
                         std::optional<std::int64_t> actual,
                         std::uint64_t executed) {
  DivergenceReport r;
  r.ok = false;
  r.op = op;
  r.message = std::move(message);
  r.expected_key = expected;
  r.actual_key = actual;
  r.ops_executed = executed;
  return r;
}

}  // namespace

DivergenceReport diff_observations(const std::vector<Observation>& reference,
                                   const std::vector<Observation>& actual) {
  std::uint64_t n = reference.size();
  if (actual.size() != n) {
    std::uint64_t idx = std::min<std::uint64_t>(n, actual.size());
    return diverge(idx < n ? reference[idx].op : idx,
                   "observation streams have different lengths", std::nullopt,
                   std::nullopt, idx);
  }

  for (std::uint64_t i = 0; i < n; ++i) {
    const Observation& e = reference[i];
    const Observation& a = actual[i];
    if (e.removed.has_value() != a.removed.has_value())
      return diverge(e.op, "one side removed an item, the other did not",
                     e.removed ? std::optional(e.removed->second) : std::nullopt,
                     a.removed ? std::optional(a.removed->second) : std::nullopt, n);
    if (e.removed && e.removed->second != a.removed->second)
      return diverge(e.op, "removed keys differ", e.removed->second,
                     a.removed->second, n);
    if (e.removed && e.removed_unique && e.removed->first != a.removed->first)
      return diverge(e.op,
                     "removed item ids differ on an unambiguous minimum (item " +
                         std::to_string(e.removed->first) + " vs " +
                         std::to_string(a.removed->first) + ")",
                     e.removed->second, a.removed->second, n);
    if (e.min.has_value() != a.min.has_value())
      return diverge(e.op, "one side has a minimum, the other is empty",
                     e.min ? std::optional(e.min->second) : std::nullopt,
                     a.min ? std::optional(a.min->second) : std::nullopt, n);
    if (e.min && e.min->second != a.min->second)
      return diverge(e.op, "minimum keys differ", e.min->second, a.min->second, n);
    if (e.min && e.min_unique && e.min->first != a.min->first)
      return diverge(e.op,
                     "minimum item ids differ on an unambiguous minimum (item " +
                         std::to_string(e.min->first) + " vs " +
                         std::to_string(a.min->first) + ")",
                     e.min->second, a.min->second, n);
  }

  DivergenceReport ok;
  ok.ops_executed = n;
  return ok;
}

DivergenceReport run_both(const Workload& wl) {
  return diff_observations(observe_reference(wl),
                           observe_forest(wl, wl.spec.strategy));
}

}  // namespace pairtrace
