#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pairtrace/types.hpp"

namespace pairtrace {

enum class OpKind { MakeHeap, Insert, Meld, DecreaseKey, DeleteMin, Delete, FindMin };

/// Where a link happened.
enum class LinkContext { Insertion, Meld, DecreaseKey, Pairing, Assembly };

/// Side of the loser relative to the winner on the root list just before
/// the link. Only meaningful for links made inside a deletion; everything
/// else is NotApplicable.
enum class Orientation { LoserLeft, LoserRight, NotApplicable };

enum class CutCause { Deletion, DecreaseKey };

const char* to_string(OpKind k);
const char* to_string(LinkContext c);
const char* to_string(Orientation o);
const char* to_string(CutCause c);

/// One link: `winner` became the parent of `loser`.
struct LinkEvent {
  LinkId id = 0;
  ItemId winner = 0;
  ItemId loser = 0;
  LinkContext ctx = LinkContext::Insertion;
  Orientation orient = Orientation::NotApplicable;
  friend bool operator==(const LinkEvent&, const LinkEvent&) = default;
};

/// One cut: the link `cut_link` was severed, detaching that link's loser.
struct CutEvent {
  LinkId cut_link = 0;
  CutCause cause = CutCause::Deletion;
  friend bool operator==(const CutEvent&, const CutEvent&) = default;
};

/// One heap operation together with every link and cut it performed.
/// Within each array, entries are in execution order. In a delete
/// operation the embedded decrease-key cut and link come first (cuts[0]
/// when the item was not the root, links[0] when the heap had another
/// item), then the deletion cuts, then the pairing and assembly links.
struct TraceEvent {
  std::uint64_t op = 0;
  OpKind kind = OpKind::MakeHeap;
  std::optional<HeapId> heap;
  std::optional<HeapId> heap2;  // meld only
  std::optional<ItemId> item;
  std::optional<Key> key;
  std::vector<LinkEvent> links;
  std::vector<CutEvent> cuts;
  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct TraceMeta {
  std::string generator = "manual";
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::TwoPass;
  std::uint64_t size = 0;
  bool drain = false;
  friend bool operator==(const TraceMeta&, const TraceMeta&) = default;
};

struct Trace {
  TraceMeta meta;
  std::vector<TraceEvent> events;
};

/// Receives operations from a Forest as they run. The sink owns the dense
/// operation and link id counters; subclasses decide whether the events
/// are kept. Exactly one operation may be open at a time.
class TraceSink {
 public:
  virtual ~TraceSink() = default;

  std::uint64_t begin_op(OpKind kind);
  void op_heap(HeapId h);
  void op_heap2(HeapId h);
  void op_item(ItemId i);
  void op_key(Key k);
  LinkId emit_link(ItemId winner, ItemId loser, LinkContext ctx, Orientation orient);
  void emit_cut(LinkId link, CutCause cause);
  void end_op();

  std::uint64_t ops_begun() const { return next_op_; }
  std::uint64_t links_emitted() const { return next_link_; }

 protected:
  virtual void consume(TraceEvent&& ev) = 0;

 private:
  TraceEvent pending_;
  bool open_ = false;
  std::uint64_t next_op_ = 0;
  std::uint64_t next_link_ = 0;
};

/// Keeps every event; the result is the trace.
class TraceRecorder final : public TraceSink {
 public:
  TraceRecorder() = default;
  explicit TraceRecorder(TraceMeta meta) { trace_.meta = std::move(meta); }

  const std::vector<TraceEvent>& events() const { return trace_.events; }
  Trace take() { return std::move(trace_); }

 protected:
  void consume(TraceEvent&& ev) override { trace_.events.push_back(std::move(ev)); }

 private:
  Trace trace_;
};

/// Assigns ids but stores nothing. For runs where only the answers matter.
class NullSink final : public TraceSink {
 protected:
  void consume(TraceEvent&&) override {}
};

/// JSON Lines serialization: one metadata object on the first line, then
/// one event object per line, every line newline-terminated. Field order
/// and spacing are canonical, so serialize(deserialize(s)) == s for any s
/// this writer produced.
std::string serialize(const Trace& t);

/// Single canonical event line, without the trailing newline.
std::string event_line(const TraceEvent& ev);

/// Parses and validates. Throws Error mentioning the 1-based line number
/// of the first offending line (a truncated final line included).
Trace deserialize(std::string_view text);

}  // namespace pairtrace
