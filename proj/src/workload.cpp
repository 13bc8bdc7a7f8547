#include "pairtrace/workload.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <set>

#include <json.hpp>

#include "pairtrace/heap.hpp"
#include "pairtrace/oracle.hpp"
#include "pairtrace/splitmix64.hpp"

namespace pairtrace {

using nlohmann::json;

const char* to_string(GeneratorKind g) {
  switch (g) {
    case GeneratorKind::Sorting: return "sorting";
    case GeneratorKind::RandomMixed: return "random-mixed";
    case GeneratorKind::DijkstraLike: return "dijkstra-like";
    case GeneratorKind::MeldHeavy: return "meld-heavy";
  }
  return "?";
}

GeneratorKind generator_from_string(const std::string& s) {
  if (s == "sorting") return GeneratorKind::Sorting;
  if (s == "random-mixed") return GeneratorKind::RandomMixed;
  if (s == "dijkstra-like") return GeneratorKind::DijkstraLike;
  if (s == "meld-heavy") return GeneratorKind::MeldHeavy;
  throw Error("unknown generator '" + s +
              "' (expected sorting, random-mixed, dijkstra-like or meld-heavy)");
}

void OpMix::check() const {
  const double parts[] = {insert, delete_min, decrease_key, meld,
                          make_heap, find_min, erase};
  double sum = 0;
  for (double p : parts) {
    if (p < 0) throw Error("op mix has a negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw Error("op mix probabilities sum to " + std::to_string(sum) + ", not 1");
}

TraceMeta meta_for(const WorkloadSpec& spec) {
  TraceMeta m;
  m.generator = to_string(spec.generator);
  m.seed = spec.seed;
  m.strategy = spec.strategy;
  m.size = spec.size;
  m.drain = spec.drain_tail;
  return m;
}

// ----------------------------------------------------------- generation

namespace {

// Drives the reference model alongside emission so every emitted
// operation is valid and the drain tail knows when heaps are empty.
struct GenState {
  SplitMix64 rng;
  RefModel model;
  Workload wl;
  std::vector<HeapId> live_heaps;
  std::vector<std::uint64_t> heap_pos;  // heap id -> index into live_heaps
  std::vector<ItemId> live_items;
  std::vector<std::uint64_t> item_pos;  // item id -> index into live_items
  std::set<std::int64_t> live_keys;

  explicit GenState(const WorkloadSpec& spec) : rng(spec.seed) { wl.spec = spec; }

  std::int64_t fresh_key() {
    for (;;) {
      auto k = static_cast<std::int64_t>(rng.next() >> 24);  // [0, 2^40)
      if (!live_keys.count(k)) return k;
    }
  }

  HeapId random_heap() { return live_heaps[rng.below(live_heaps.size())]; }
  ItemId random_item() { return live_items[rng.below(live_items.size())]; }

  HeapId do_make_heap() {
    HeapId h = model.make_heap();
    wl.ops.push_back({OpKind::MakeHeap, 0, 0, 0, 0});
    heap_pos.push_back(live_heaps.size());
    live_heaps.push_back(h);
    return h;
  }

  ItemId do_insert_key(HeapId h, std::int64_t key) {
    ItemId item = model.insert(h, key);
    wl.ops.push_back({OpKind::Insert, h, 0, 0, key});
    item_pos.push_back(live_items.size());
    live_items.push_back(item);
    live_keys.insert(key);
    return item;
  }

  ItemId do_insert(HeapId h) { return do_insert_key(h, fresh_key()); }

  void drop_heap(HeapId h) {
    std::uint64_t pos = heap_pos[h];
    HeapId moved = live_heaps.back();
    live_heaps[pos] = moved;
    heap_pos[moved] = pos;
    live_heaps.pop_back();
    heap_pos[h] = kNone;
  }

  void drop_item(ItemId item) {
    std::uint64_t pos = item_pos[item];
    ItemId moved = live_items.back();
    live_items[pos] = moved;
    item_pos[moved] = pos;
    live_items.pop_back();
    item_pos[item] = kNone;
  }

  HeapId do_meld(HeapId a, HeapId b) {
    wl.ops.push_back({OpKind::Meld, a, b, 0, 0});
    HeapId r = model.meld(a, b);
    drop_heap(a);
    drop_heap(b);
    heap_pos.push_back(live_heaps.size());
    live_heaps.push_back(r);
    return r;
  }

  void do_decrease(ItemId item) {
    HeapId h = model.heap_of(item);
    std::int64_t cur = model.key_of(item);
    std::int64_t nk = cur - 1 - static_cast<std::int64_t>(rng.below(1u << 20));
    while (live_keys.count(nk)) --nk;
    live_keys.erase(cur);
    live_keys.insert(nk);
    model.decrease_key(h, item, nk);
    wl.ops.push_back({OpKind::DecreaseKey, h, 0, item, nk});
  }

  void do_delete_min(HeapId h) {
    wl.ops.push_back({OpKind::DeleteMin, h, 0, 0, 0});
    auto pre = model.find_min(h);
    auto removed = model.delete_min(h);
    if (removed) {
      live_keys.erase(pre->second);
      drop_item(*removed);
    }
  }

  void do_delete(ItemId item) {
    HeapId h = model.heap_of(item);
    live_keys.erase(model.key_of(item));
    wl.ops.push_back({OpKind::Delete, h, 0, item, 0});
    model.remove(h, item);
    drop_item(item);
  }

  void do_find_min(HeapId h) { wl.ops.push_back({OpKind::FindMin, h, 0, 0, 0}); }

  void drain() {
    std::vector<HeapId> order = live_heaps;
    std::sort(order.begin(), order.end());
    for (HeapId h : order)
      while (model.size(h) > 0) do_delete_min(h);
  }
};

void gen_sorting(GenState& g) {
  std::uint64_t n = g.wl.spec.size;
  HeapId h = g.do_make_heap();
  std::vector<std::int64_t> perm(n);
  for (std::uint64_t i = 0; i < n; ++i) perm[i] = static_cast<std::int64_t>(i);
  for (std::uint64_t i = n - 1; i > 0; --i)
    std::swap(perm[i], perm[g.rng.below(i + 1)]);
  for (std::int64_t k : perm) g.do_insert_key(h, k);
  for (std::uint64_t i = 0; i < n; ++i) g.do_delete_min(h);
}

void gen_random_mixed(GenState& g) {
  const OpMix& mix = g.wl.spec.mix;
  mix.check();
  const double cuts[7] = {
      mix.insert,
      mix.insert + mix.delete_min,
      mix.insert + mix.delete_min + mix.decrease_key,
      mix.insert + mix.delete_min + mix.decrease_key + mix.meld,
      mix.insert + mix.delete_min + mix.decrease_key + mix.meld + mix.make_heap,
      mix.insert + mix.delete_min + mix.decrease_key + mix.meld + mix.make_heap +
          mix.find_min,
      1.0};

  for (std::uint64_t i = 0; i < g.wl.spec.size; ++i) {
    double r = g.rng.unit();
    int pick = 0;
    while (pick < 6 && r >= cuts[pick]) ++pick;
    bool have_heap = !g.live_heaps.empty();
    bool have_item = !g.live_items.empty();
    switch (pick) {
      case 0:  // insert
        if (have_heap) g.do_insert(g.random_heap());
        else g.do_make_heap();
        break;
      case 1:  // delete_min, empty heaps allowed
        if (have_heap) g.do_delete_min(g.random_heap());
        else g.do_make_heap();
        break;
      case 2:  // decrease_key
        if (have_item) g.do_decrease(g.random_item());
        else if (have_heap) g.do_insert(g.random_heap());
        else g.do_make_heap();
        break;
      case 3:  // meld
        if (g.live_heaps.size() >= 2) {
          std::uint64_t ai = g.rng.below(g.live_heaps.size());
          std::uint64_t bi = g.rng.below(g.live_heaps.size() - 1);
          if (bi >= ai) ++bi;
          g.do_meld(g.live_heaps[ai], g.live_heaps[bi]);
        } else {
          g.do_make_heap();
        }
        break;
      case 4:  // make_heap
        g.do_make_heap();
        break;
      case 5:  // find_min
        if (have_heap) g.do_find_min(g.random_heap());
        else g.do_make_heap();
        break;
      default:  // delete
        if (have_item) g.do_delete(g.random_item());
        else if (have_heap) g.do_insert(g.random_heap());
        else g.do_make_heap();
        break;
    }
  }
}

void gen_dijkstra_like(GenState& g) {
  std::uint64_t n = g.wl.spec.size;
  HeapId h = g.do_make_heap();
  for (std::uint64_t i = 0; i < n; ++i) g.do_insert(h);
  std::uint64_t insert_budget = n / 2;
  while (g.model.size(h) > 0) {
    g.do_delete_min(h);
    std::uint64_t d = g.rng.below(4);
    for (std::uint64_t i = 0; i < d && !g.live_items.empty(); ++i)
      g.do_decrease(g.random_item());
    if (insert_budget > 0 && g.rng.below(4) == 0) {
      g.do_insert(h);
      --insert_budget;
    }
  }
}

void gen_meld_heavy(GenState& g) {
  std::uint64_t m = g.wl.spec.size;
  for (std::uint64_t i = 0; i < m; ++i) {
    HeapId h = g.do_make_heap();
    std::uint64_t c = 1 + g.rng.below(3);
    for (std::uint64_t j = 0; j < c; ++j) g.do_insert(h);
  }
  std::uint64_t melds = 0;
  while (g.live_heaps.size() > 1) {
    std::uint64_t ai = g.rng.below(g.live_heaps.size());
    std::uint64_t bi = g.rng.below(g.live_heaps.size() - 1);
    if (bi >= ai) ++bi;
    HeapId r = g.do_meld(g.live_heaps[ai], g.live_heaps[bi]);
    if (++melds % 4 == 0) g.do_delete_min(r);
    if (g.rng.below(8) == 0) g.do_find_min(g.random_heap());
  }
}

}  // namespace

Workload generate(const WorkloadSpec& spec) {
  if (spec.size == 0) throw Error("workload size must be positive");
  GenState g(spec);
  switch (spec.generator) {
    case GeneratorKind::Sorting: gen_sorting(g); break;
    case GeneratorKind::RandomMixed: gen_random_mixed(g); break;
    case GeneratorKind::DijkstraLike: gen_dijkstra_like(g); break;
    case GeneratorKind::MeldHeavy: gen_meld_heavy(g); break;
  }
  if (spec.drain_tail) g.drain();
  return std::move(g.wl);
}

// ------------------------------------------------------------ execution

Trace run(const Workload& wl) {
  TraceRecorder rec(meta_for(wl.spec));
  Forest f(rec, wl.spec.strategy);
  for (std::size_t i = 0; i < wl.ops.size(); ++i) {
    const WorkloadOp& op = wl.ops[i];
    try {
      switch (op.kind) {
        case OpKind::MakeHeap: f.make_heap(); break;
        case OpKind::Insert: f.insert(op.heap, op.key); break;
        case OpKind::Meld: f.meld(op.heap, op.heap2); break;
        case OpKind::DecreaseKey: f.decrease_key(op.heap, op.item, op.key); break;
        case OpKind::DeleteMin: f.delete_min(op.heap); break;
        case OpKind::Delete: f.remove(op.heap, op.item); break;
        case OpKind::FindMin: f.find_min(op.heap); break;
      }
    } catch (const Error& e) {
      throw Error("workload op " + std::to_string(i) + ": " + e.what());
    }
  }
  return rec.take();
}

// --------------------------------------------------------- workload io

namespace {

void put_u64(std::string& out, std::uint64_t v) {
  char buf[24];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  out.append(buf, p);
}

void put_i64(std::string& out, std::int64_t v) {
  char buf[24];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  out.append(buf, p);
}

[[noreturn]] void fail_line(std::size_t line_no, const std::string& msg) {
  throw Error("workload parse error at line " + std::to_string(line_no) + ": " +
              msg);
}

std::uint64_t get_u64(const json& j, const char* field, std::size_t line_no) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_number_unsigned())
    fail_line(line_no, std::string("missing or invalid '") + field + "'");
  return it->get<std::uint64_t>();
}

std::int64_t get_i64(const json& j, const char* field, std::size_t line_no) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_number_integer())
    fail_line(line_no, std::string("missing or invalid '") + field + "'");
  return it->get<std::int64_t>();
}

}  // namespace

std::string serialize_workload(const Workload& wl) {
  std::string out;
  out += "{\"format\":\"pairtrace-workload\",\"version\":1,\"generator\":\"";
  out += to_string(wl.spec.generator);
  out += "\",\"seed\":";
  put_u64(out, wl.spec.seed);
  out += ",\"size\":";
  put_u64(out, wl.spec.size);
  out += ",\"strategy\":\"";
  out += to_string(wl.spec.strategy);
  out += "\",\"drain\":";
  out += wl.spec.drain_tail ? "true" : "false";
  out += "}\n";
  for (const WorkloadOp& op : wl.ops) {
    out += "{\"kind\":\"";
    out += to_string(op.kind);
    out += '"';
    if (op.kind != OpKind::MakeHeap) {
      out += ",\"heap\":";
      put_u64(out, op.heap);
    }
    if (op.kind == OpKind::Meld) {
      out += ",\"heap2\":";
      put_u64(out, op.heap2);
    }
    if (op.kind == OpKind::DecreaseKey || op.kind == OpKind::Delete) {
      out += ",\"item\":";
      put_u64(out, op.item);
    }
    if (op.kind == OpKind::Insert || op.kind == OpKind::DecreaseKey) {
      out += ",\"key\":";
      put_i64(out, op.key);
    }
    out += "}\n";
  }
  return out;
}

Workload deserialize_workload(std::string_view text) {
  Workload wl;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool saw_meta = false;

  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = (eol == std::string_view::npos)
                                ? text.substr(pos)
                                : text.substr(pos, eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() : eol + 1;
    ++line_no;
    if (line.empty()) continue;

    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) fail_line(line_no, "malformed JSON");
    if (!j.is_object()) fail_line(line_no, "expected a JSON object");

    if (!saw_meta) {
      auto fmt = j.find("format");
      if (fmt == j.end() || !fmt->is_string() ||
          fmt->get<std::string>() != "pairtrace-workload")
        fail_line(line_no, "first line must be pairtrace-workload metadata");
      if (get_u64(j, "version", line_no) != 1)
        fail_line(line_no, "unsupported workload version");
      auto gen = j.find("generator");
      if (gen == j.end() || !gen->is_string())
        fail_line(line_no, "missing or invalid 'generator'");
      auto strat = j.find("strategy");
      if (strat == j.end() || !strat->is_string())
        fail_line(line_no, "missing or invalid 'strategy'");
      auto drain = j.find("drain");
      if (drain == j.end() || !drain->is_boolean())
        fail_line(line_no, "missing or invalid 'drain'");
      try {
        wl.spec.generator = generator_from_string(gen->get<std::string>());
        wl.spec.strategy = strategy_from_string(strat->get<std::string>());
      } catch (const Error& e) {
        fail_line(line_no, e.what());
      }
      wl.spec.seed = get_u64(j, "seed", line_no);
      wl.spec.size = get_u64(j, "size", line_no);
      wl.spec.drain_tail = drain->get<bool>();
      saw_meta = true;
      continue;
    }

    auto kind_it = j.find("kind");
    if (kind_it == j.end() || !kind_it->is_string())
      fail_line(line_no, "missing or invalid 'kind'");
    std::string kind = kind_it->get<std::string>();
    WorkloadOp op;
    if (kind == "make_heap") {
      op.kind = OpKind::MakeHeap;
    } else if (kind == "insert") {
      op.kind = OpKind::Insert;
      op.heap = get_u64(j, "heap", line_no);
      op.key = get_i64(j, "key", line_no);
    } else if (kind == "meld") {
      op.kind = OpKind::Meld;
      op.heap = get_u64(j, "heap", line_no);
      op.heap2 = get_u64(j, "heap2", line_no);
    } else if (kind == "decrease_key") {
      op.kind = OpKind::DecreaseKey;
      op.heap = get_u64(j, "heap", line_no);
      op.item = get_u64(j, "item", line_no);
      op.key = get_i64(j, "key", line_no);
    } else if (kind == "delete_min") {
      op.kind = OpKind::DeleteMin;
      op.heap = get_u64(j, "heap", line_no);
    } else if (kind == "delete") {
      op.kind = OpKind::Delete;
      op.heap = get_u64(j, "heap", line_no);
      op.item = get_u64(j, "item", line_no);
    } else if (kind == "find_min") {
      op.kind = OpKind::FindMin;
      op.heap = get_u64(j, "heap", line_no);
    } else {
      fail_line(line_no, "unknown op kind '" + kind + "'");
    }
    wl.ops.push_back(op);
  }

  if (!saw_meta)
    throw Error("workload parse error at line 1: missing metadata line");
  return wl;
}

// --------------------------------------------------------------- replay

namespace {

[[noreturn]] void replay_fail(const TraceEvent& ev, const std::string& msg) {
  throw Error("replay: op " + std::to_string(ev.op) + " (" +
              to_string(ev.kind) + ") " + msg);
}

HeapId need_heap(const TraceEvent& ev) {
  if (!ev.heap) replay_fail(ev, "has no heap");
  return *ev.heap;
}

ItemId need_item(const TraceEvent& ev) {
  if (!ev.item) replay_fail(ev, "has no item");
  return *ev.item;
}

std::int64_t need_key(const TraceEvent& ev) {
  if (!ev.key) replay_fail(ev, "has no key");
  if (ev.key->minus_inf) replay_fail(ev, "carries the minus-infinity key");
  return ev.key->value;
}

}  // namespace

Trace replay(const Trace& t) {
  TraceRecorder rec(t.meta);
  Forest f(rec, t.meta.strategy);
  for (const TraceEvent& ev : t.events) {
    switch (ev.kind) {
      case OpKind::MakeHeap: {
        HeapId h = f.make_heap();
        if (!ev.heap || h != *ev.heap)
          replay_fail(ev, "created heap " + std::to_string(h) +
                              " instead of the recorded one");
        break;
      }
      case OpKind::Insert: {
        ItemId item = f.insert(need_heap(ev), need_key(ev));
        if (!ev.item || item != *ev.item)
          replay_fail(ev, "created item " + std::to_string(item) +
                              " instead of the recorded one");
        break;
      }
      case OpKind::Meld:
        if (!ev.heap2) replay_fail(ev, "has no second heap");
        f.meld(need_heap(ev), *ev.heap2);
        break;
      case OpKind::DecreaseKey:
        f.decrease_key(need_heap(ev), need_item(ev), need_key(ev));
        break;
      case OpKind::DeleteMin:
        f.delete_min(need_heap(ev));
        break;
      case OpKind::Delete:
        f.remove(need_heap(ev), need_item(ev));
        break;
      case OpKind::FindMin:
        f.find_min(need_heap(ev));
        break;
    }
  }
  return rec.take();
}

std::optional<std::string> verify_replay(const Trace& t) {
  Trace r;
  try {
    r = replay(t);
  } catch (const Error& e) {
    return std::string("replay failed: ") + e.what();
  }
  if (r.events.size() != t.events.size())
    return "replay produced " + std::to_string(r.events.size()) +
           " events, trace has " + std::to_string(t.events.size());
  for (std::size_t i = 0; i < t.events.size(); ++i) {
    if (!(r.events[i] == t.events[i]))
      return "replay diverges at op " + std::to_string(i) + ": trace " +
             event_line(t.events[i]) + " vs replay " + event_line(r.events[i]);
  }
  return std::nullopt;
}

}  // namespace pairtrace
