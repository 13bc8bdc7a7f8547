#include "pairtrace/classifier.hpp"

#include <algorithm>
#include <cassert>

namespace pairtrace {

const char* to_string(NodeFate f) {
  return f == NodeFate::Temporary ? "temporary" : "permanent";
}

const char* to_string(LinkFate f) {
  switch (f) {
    case LinkFate::DLink: return "dlink";
    case LinkFate::KLink: return "klink";
    case LinkFate::FLink: return "flink";
  }
  return "?";
}

namespace {

[[noreturn]] void fail(std::uint64_t op, const std::string& msg) {
  throw Error("trace inconsistent at op " + std::to_string(op) + ": " + msg);
}

}  // namespace

std::vector<NodeFate> node_fates(const Trace& t) {
  std::uint64_t items = 0;
  for (const TraceEvent& ev : t.events)
    if (ev.kind == OpKind::Insert) ++items;
  std::vector<NodeFate> fates(items, NodeFate::Permanent);
  std::vector<bool> removed(items, false);
  for (const TraceEvent& ev : t.events) {
    bool removal = ev.kind == OpKind::Delete ||
                   (ev.kind == OpKind::DeleteMin && ev.item.has_value());
    if (!removal) continue;
    if (!ev.item) fail(ev.op, "delete records no item");
    ItemId x = *ev.item;
    if (x >= items)
      fail(ev.op, "removed item " + std::to_string(x) + " was never inserted");
    if (removed[x])
      fail(ev.op, "item " + std::to_string(x) + " removed twice");
    removed[x] = true;
    fates[x] = NodeFate::Temporary;
  }
  return fates;
}

std::vector<LinkAnnotation> annotate_links(const Trace& t,
                                           const std::vector<NodeFate>& fates) {
  std::uint64_t total = 0;
  for (const TraceEvent& ev : t.events) total += ev.links.size();
  std::vector<LinkAnnotation> anns(total);

  std::uint64_t next = 0;
  for (const TraceEvent& ev : t.events) {
    for (const LinkEvent& l : ev.links) {
      if (l.id != next)
        fail(ev.op, "link id " + std::to_string(l.id) +
                        " out of order (expected " + std::to_string(next) + ")");
      LinkAnnotation& a = anns[next++];
      a.id = l.id;
      a.winner = l.winner;
      a.loser = l.loser;
      a.ctx = l.ctx;
      a.orient = l.orient;
      a.op = ev.op;
      a.op_kind = ev.kind;
      a.fate = LinkFate::FLink;
    }
  }

  std::vector<bool> cut(total, false);
  for (const TraceEvent& ev : t.events) {
    for (const CutEvent& c : ev.cuts) {
      if (c.cut_link >= total)
        fail(ev.op, "cut references unknown link " + std::to_string(c.cut_link));
      LinkAnnotation& a = anns[c.cut_link];
      if (a.op > ev.op)
        fail(ev.op, "cut references link " + std::to_string(c.cut_link) +
                        " made by a later op");
      if (cut[c.cut_link])
        fail(ev.op, "link " + std::to_string(c.cut_link) + " cut twice");
      cut[c.cut_link] = true;
      a.fate = c.cause == CutCause::DecreaseKey ? LinkFate::KLink : LinkFate::DLink;
    }
  }

  for (LinkAnnotation& a : anns) {
    bool both_temporary = a.winner < fates.size() && a.loser < fates.size() &&
                          fates[a.winner] == NodeFate::Temporary &&
                          fates[a.loser] == NodeFate::Temporary;
    a.real = both_temporary && a.fate != LinkFate::KLink;
  }
  return anns;
}

// ---------------------------------------------------------------- replay

namespace {

// Structural shadow of the forest, driven purely by the trace. Keys,
// parent pointers, per-heap roots and membership are tracked so that
// every event can be checked against what a correct forest would allow.
// Child order is not tracked; exact event-for-event agreement is the
// replay verifier's job.
struct Replayer {
  struct ItemState {
    Key key;
    ItemId parent = kNone;
    LinkId lost = kNone;
    HeapId heap0 = kNone;
    std::uint64_t children = 0;
    std::uint64_t size = 0;
    std::uint64_t rsum = 0;  // sizes of currently attached real children
    bool alive = false;
    bool detached = false;  // on the current deletion's root list
  };
  struct LinkState {
    ItemId winner = 0;
    ItemId loser = 0;
    bool made = false;
    bool attached = false;
    bool real = false;
  };
  struct HeapState {
    ItemId root = kNone;
    HeapId merged = kNone;
    std::uint64_t items = 0;
    std::uint64_t temps = 0;
    bool live = false;
  };

  const Trace& t;
  Classification out;
  std::vector<ItemState> items;
  std::vector<LinkState> links;
  std::vector<HeapState> heaps;
  std::uint64_t items_born = 0;
  std::uint64_t heaps_made = 0;
  std::uint64_t links_made = 0;
  std::vector<ItemId> detached_scratch;

  explicit Replayer(const Trace& tr) : t(tr) {}

  HeapId live_heap(const TraceEvent& ev, const std::optional<HeapId>& h) {
    if (!h) fail(ev.op, "missing heap");
    if (*h >= heaps_made) fail(ev.op, "unknown heap " + std::to_string(*h));
    if (!heaps[*h].live)
      fail(ev.op, "operation on dead heap " + std::to_string(*h));
    return *h;
  }

  HeapId resolve(HeapId h) const {
    while (heaps[h].merged != kNone) h = heaps[h].merged;
    return h;
  }

  void push_context(const TraceEvent& ev, std::uint64_t n_raw, bool removal) {
    out.contexts.push_back(
        {ev.op, ev.kind, n_raw, std::max<std::uint64_t>(n_raw, 4), removal});
  }

  void expect_plain(const TraceEvent& ev) {
    if (!ev.links.empty()) fail(ev.op, "unexpected link events");
    if (!ev.cuts.empty()) fail(ev.op, "unexpected cut events");
  }

  void verify_pair(const TraceEvent& ev, const LinkEvent& le, ItemId a, ItemId b) {
    bool match = (le.winner == a && le.loser == b) ||
                 (le.winner == b && le.loser == a);
    if (!match)
      fail(ev.op, "link " + std::to_string(le.id) +
                      " joins the wrong pair of items");
  }

  ItemId take_link(const TraceEvent& ev, const LinkEvent& le, bool in_deletion) {
    if (le.id != links_made)
      fail(ev.op, "link id " + std::to_string(le.id) + " out of order");
    if (le.winner == le.loser) fail(ev.op, "link of an item with itself");
    if (le.winner >= items.size() || !items[le.winner].alive ||
        le.loser >= items.size() || !items[le.loser].alive)
      fail(ev.op, "link endpoint is not a live item");
    ItemState& w = items[le.winner];
    ItemState& l = items[le.loser];
    if (w.parent != kNone || l.parent != kNone)
      fail(ev.op, "link endpoint is not a root");
    if (in_deletion) {
      if (le.ctx != LinkContext::Pairing && le.ctx != LinkContext::Assembly)
        fail(ev.op, "unexpected link context inside a deletion");
      if (le.orient == Orientation::NotApplicable)
        fail(ev.op, "deletion link lacks an orientation");
      if (!w.detached || !l.detached)
        fail(ev.op, "deletion link endpoint is not on the root list");
    } else {
      if (le.ctx == LinkContext::Pairing || le.ctx == LinkContext::Assembly)
        fail(ev.op, "pairing or assembly link outside a deletion");
      if (le.orient != Orientation::NotApplicable)
        fail(ev.op, "orientation recorded outside a deletion");
    }
    if (!(w.key <= l.key)) fail(ev.op, "link winner has the larger key");

    l.parent = le.winner;
    l.lost = le.id;
    w.children++;
    bool real = out.links[le.id].real;
    links[le.id] = LinkState{le.winner, le.loser, true, true, real};
    if (real) {
      out.masses.push_back({ev.op, le.id, le.loser, w.size + l.size,
                            1 + l.size + w.rsum});
      w.size += l.size;
      out.sizes.push_back({ev.op, le.winner, le.id, w.size, false});
      w.rsum += l.size;
    }
    ++links_made;
    if (in_deletion) l.detached = false;
    return le.winner;
  }

  ItemId take_cut(const TraceEvent& ev, const CutEvent& ce, ItemId expected_winner,
                  CutCause required) {
    if (ce.cause != required) fail(ev.op, "unexpected cut cause");
    if (ce.cut_link >= links_made || !links[ce.cut_link].made)
      fail(ev.op, "cut references a link not yet made");
    LinkState& L = links[ce.cut_link];
    if (!L.attached)
      fail(ev.op, "cut of link " + std::to_string(ce.cut_link) +
                      " which is not attached");
    if (expected_winner != kNone && L.winner != expected_winner)
      fail(ev.op, "deletion cut severs a link not held by the removed root");
    ItemState& l = items[L.loser];
    assert(l.parent == L.winner && l.lost == ce.cut_link);
    l.parent = kNone;
    l.lost = kNone;
    items[L.winner].children--;
    L.attached = false;
    if (L.real) {
      out.sizes.push_back({ev.op, L.loser, ce.cut_link, l.size, true});
      items[L.winner].rsum -= l.size;
    }
    return L.loser;
  }

  // Shared by delete_min and the second half of delete: cuts detach the
  // removed root's children, links recombine them into one tree.
  void deletion_phase(const TraceEvent& ev, HeapId h, ItemId x, std::size_t ci,
                      std::size_t li) {
    auto& detached = detached_scratch;
    detached.clear();
    for (; ci < ev.cuts.size(); ++ci) {
      ItemId loser = take_cut(ev, ev.cuts[ci], x, CutCause::Deletion);
      items[loser].detached = true;
      detached.push_back(loser);
    }
    if (items[x].children != 0)
      fail(ev.op, "removed item still has attached children");
    for (; li < ev.links.size(); ++li) take_link(ev, ev.links[li], true);

    ItemId survivor = kNone;
    for (ItemId d : detached) {
      if (!items[d].detached) continue;
      if (survivor != kNone) fail(ev.op, "deletion left more than one root");
      survivor = d;
    }
    if (!detached.empty() && survivor == kNone)
      fail(ev.op, "deletion linked every root away");
    for (ItemId d : detached) items[d].detached = false;

    assert(out.fates[x] == NodeFate::Temporary);
    heaps[h].root = survivor;
    heaps[h].items--;
    heaps[h].temps--;
    items[x].alive = false;
  }

  void dispatch(const TraceEvent& ev) {
    switch (ev.kind) {
      case OpKind::MakeHeap: {
        if (!ev.heap || *ev.heap != heaps_made)
          fail(ev.op, "make_heap produced an unexpected heap id");
        expect_plain(ev);
        heaps[heaps_made++] = HeapState{kNone, kNone, 0, 0, true};
        push_context(ev, 0, false);
        break;
      }

      case OpKind::Insert: {
        HeapId h = live_heap(ev, ev.heap);
        if (!ev.item || *ev.item != items_born)
          fail(ev.op, "insert produced an unexpected item id");
        if (!ev.key || ev.key->minus_inf)
          fail(ev.op, "insert without an ordinary key");
        if (!ev.cuts.empty()) fail(ev.op, "unexpected cut events");
        push_context(ev, heaps[h].temps, false);
        ItemId item = items_born++;
        ItemState& it = items[item];
        it.key = *ev.key;
        it.heap0 = h;
        it.size = 1;
        it.alive = true;
        heaps[h].items++;
        if (out.fates[item] == NodeFate::Temporary) heaps[h].temps++;
        ItemId prev_root = heaps[h].root;
        if (prev_root == kNone) {
          if (!ev.links.empty())
            fail(ev.op, "insert into an empty heap cannot link");
          heaps[h].root = item;
        } else {
          if (ev.links.size() != 1)
            fail(ev.op, "insert into a non-empty heap links exactly once");
          if (ev.links[0].ctx != LinkContext::Insertion)
            fail(ev.op, "insert link has the wrong context");
          verify_pair(ev, ev.links[0], prev_root, item);
          heaps[h].root = take_link(ev, ev.links[0], false);
        }
        break;
      }

      case OpKind::Meld: {
        HeapId h1 = live_heap(ev, ev.heap);
        HeapId h2 = live_heap(ev, ev.heap2);
        if (h1 == h2) fail(ev.op, "meld of a heap with itself");
        if (!ev.cuts.empty()) fail(ev.op, "unexpected cut events");
        push_context(ev, heaps[h1].temps + heaps[h2].temps, false);
        HeapId result = heaps_made;
        heaps[result] = HeapState{kNone, kNone, heaps[h1].items + heaps[h2].items,
                                  heaps[h1].temps + heaps[h2].temps, true};
        ItemId r1 = heaps[h1].root;
        ItemId r2 = heaps[h2].root;
        if (r1 != kNone && r2 != kNone) {
          if (ev.links.size() != 1)
            fail(ev.op, "meld of two non-empty heaps links exactly once");
          if (ev.links[0].ctx != LinkContext::Meld)
            fail(ev.op, "meld link has the wrong context");
          verify_pair(ev, ev.links[0], r1, r2);
          heaps[result].root = take_link(ev, ev.links[0], false);
        } else {
          if (!ev.links.empty()) fail(ev.op, "meld with an empty side cannot link");
          heaps[result].root = r1 != kNone ? r1 : r2;
        }
        heaps[h1] = HeapState{kNone, result, 0, 0, false};
        heaps[h2] = HeapState{kNone, result, 0, 0, false};
        heaps_made++;
        break;
      }

      case OpKind::DecreaseKey: {
        HeapId h = live_heap(ev, ev.heap);
        if (!ev.item) fail(ev.op, "decrease_key records no item");
        ItemId x = *ev.item;
        if (x >= items.size() || !items[x].alive || resolve(items[x].heap0) != h)
          fail(ev.op, "item " + std::to_string(x) + " is not in heap " +
                          std::to_string(h));
        if (!ev.key || ev.key->minus_inf)
          fail(ev.op, "decrease_key without an ordinary key");
        if (items[x].key < *ev.key) fail(ev.op, "decrease_key raises the key");
        push_context(ev, heaps[h].temps, false);
        items[x].key = *ev.key;
        if (heaps[h].root == x) {
          expect_plain(ev);
        } else {
          if (ev.cuts.size() != 1 || ev.links.size() != 1)
            fail(ev.op, "decrease_key of a non-root cuts once and links once");
          ItemId loser = take_cut(ev, ev.cuts[0], kNone, CutCause::DecreaseKey);
          if (loser != x) fail(ev.op, "decrease_key cut detaches the wrong item");
          if (ev.links[0].ctx != LinkContext::DecreaseKey)
            fail(ev.op, "decrease_key link has the wrong context");
          verify_pair(ev, ev.links[0], heaps[h].root, x);
          heaps[h].root = take_link(ev, ev.links[0], false);
        }
        break;
      }

      case OpKind::DeleteMin: {
        HeapId h = live_heap(ev, ev.heap);
        push_context(ev, heaps[h].temps, ev.item.has_value());
        if (!ev.item) {
          if (heaps[h].root != kNone)
            fail(ev.op, "delete_min on a non-empty heap removed nothing");
          expect_plain(ev);
          break;
        }
        ItemId x = *ev.item;
        if (x != heaps[h].root) fail(ev.op, "delete_min removes a non-root");
        if (!ev.key || !(items[x].key == *ev.key))
          fail(ev.op, "delete_min key does not match the root");
        deletion_phase(ev, h, x, 0, 0);
        break;
      }

      case OpKind::Delete: {
        HeapId h = live_heap(ev, ev.heap);
        if (!ev.item) fail(ev.op, "delete records no item");
        ItemId x = *ev.item;
        if (x >= items.size() || !items[x].alive || resolve(items[x].heap0) != h)
          fail(ev.op, "item " + std::to_string(x) + " is not in heap " +
                          std::to_string(h));
        push_context(ev, heaps[h].temps, true);
        items[x].key = Key::minus_infinity();
        std::size_t ci = 0;
        std::size_t li = 0;
        if (heaps[h].root != x) {
          if (ev.cuts.empty() || ev.cuts[0].cause != CutCause::DecreaseKey)
            fail(ev.op, "delete of a non-root must first cut its link");
          ItemId loser = take_cut(ev, ev.cuts[0], kNone, CutCause::DecreaseKey);
          if (loser != x) fail(ev.op, "delete cut detaches the wrong item");
          ci = 1;
          if (ev.links.empty() || ev.links[0].ctx != LinkContext::DecreaseKey)
            fail(ev.op, "delete of a non-root must relink it with the root");
          verify_pair(ev, ev.links[0], heaps[h].root, x);
          ItemId winner = take_link(ev, ev.links[0], false);
          if (winner != x) fail(ev.op, "minus-infinity item lost its link");
          heaps[h].root = winner;
          li = 1;
        }
        deletion_phase(ev, h, x, ci, li);
        break;
      }

      case OpKind::FindMin: {
        HeapId h = live_heap(ev, ev.heap);
        expect_plain(ev);
        push_context(ev, heaps[h].temps, false);
        if (heaps[h].root == kNone) {
          if (ev.item || ev.key)
            fail(ev.op, "find_min on an empty heap recorded a result");
        } else {
          if (!ev.item || *ev.item != heaps[h].root)
            fail(ev.op, "find_min item does not match the root");
          if (!ev.key || !(items[heaps[h].root].key == *ev.key))
            fail(ev.op, "find_min key does not match the root");
        }
        break;
      }
    }
  }

  void run() {
    out.fates = node_fates(t);
    out.links = annotate_links(t, out.fates);
    items.resize(out.fates.size());
    links.resize(out.links.size());
    std::uint64_t heap_count = 0;
    for (const TraceEvent& ev : t.events)
      heap_count += ev.kind == OpKind::MakeHeap || ev.kind == OpKind::Meld;
    heaps.resize(heap_count);
    out.contexts.reserve(t.events.size());

    std::uint64_t expect = 0;
    for (const TraceEvent& ev : t.events) {
      if (ev.op != expect)
        fail(ev.op, "op index out of order (expected " + std::to_string(expect) + ")");
      ++expect;
      dispatch(ev);
    }
  }
};

}  // namespace

Classification classify(const Trace& t) {
  Replayer r(t);
  r.run();
  return std::move(r.out);
}

std::vector<OpContext> op_contexts(const Trace& t) {
  return classify(t).contexts;
}

std::vector<SizeRecord> size_timeline(const Trace& t) {
  return classify(t).sizes;
}

std::vector<MassRecord> mass_records(const Trace& t) {
  return classify(t).masses;
}

// ----------------------------------------------------------- annotation

namespace {

void put_u64a(std::string& out, std::uint64_t v) { out += std::to_string(v); }

}  // namespace

std::string serialize_annotated(const Trace& t, const Classification& c) {
  std::string out;
  out += "{\"format\":\"pairtrace-trace\",\"version\":1,\"generator\":\"";
  out += t.meta.generator;
  out += "\",\"seed\":";
  put_u64a(out, t.meta.seed);
  out += ",\"size\":";
  put_u64a(out, t.meta.size);
  out += ",\"strategy\":\"";
  out += to_string(t.meta.strategy);
  out += "\",\"drain\":";
  out += t.meta.drain ? "true" : "false";
  out += ",\"annotated\":true}\n";

  for (const TraceEvent& ev : t.events) {
    if (ev.links.empty()) {
      out += event_line(ev);
      out += '\n';
      continue;
    }
    // Rebuild the line with fate and reality appended to each link entry,
    // keeping the canonical field order.
    TraceEvent stripped = ev;
    stripped.links.clear();
    stripped.cuts.clear();
    std::string base = event_line(stripped);
    base.pop_back();  // trailing '}'
    out += base;
    out += ",\"links\":[";
    bool first = true;
    for (const LinkEvent& l : ev.links) {
      if (!first) out += ',';
      first = false;
      const LinkAnnotation& a = c.links.at(l.id);
      out += "{\"id\":";
      put_u64a(out, l.id);
      out += ",\"winner\":";
      put_u64a(out, l.winner);
      out += ",\"loser\":";
      put_u64a(out, l.loser);
      out += ",\"ctx\":\"";
      out += to_string(l.ctx);
      out += "\",\"orient\":\"";
      out += to_string(l.orient);
      out += "\",\"fate\":\"";
      out += to_string(a.fate);
      out += "\",\"real\":";
      out += a.real ? "true" : "false";
      out += '}';
    }
    out += ']';
    if (!ev.cuts.empty()) {
      out += ",\"cuts\":[";
      first = true;
      for (const CutEvent& cu : ev.cuts) {
        if (!first) out += ',';
        first = false;
        out += "{\"cutLink\":";
        put_u64a(out, cu.cut_link);
        out += ",\"cause\":\"";
        out += to_string(cu.cause);
        out += "\"}";
      }
      out += ']';
    }
    out += "}\n";
  }
  return out;
}

}  // namespace pairtrace
