#pragma once

#include <string>
#include <vector>

#include "pairtrace/trace.hpp"
#include "pairtrace/types.hpp"

namespace pairtrace {

/// Fate of an item within one trace: Temporary when some delete_min or
/// delete in the trace removes it, Permanent when it survives to the end.
/// Always relative to the trace at hand.
enum class NodeFate { Temporary, Permanent };

/// Fate of a link within one trace: cut by a deletion (DLink), cut by a
/// decrease-key (KLink), or never cut (FLink).
enum class LinkFate { DLink, KLink, FLink };

const char* to_string(NodeFate f);
const char* to_string(LinkFate f);

struct LinkAnnotation {
  LinkId id = 0;
  ItemId winner = 0;
  ItemId loser = 0;
  LinkContext ctx = LinkContext::Insertion;
  Orientation orient = Orientation::NotApplicable;
  std::uint64_t op = 0;  // op that made the link
  OpKind op_kind = OpKind::MakeHeap;
  LinkFate fate = LinkFate::FLink;
  /// Real when both endpoints are temporary and the link is not a KLink;
  /// phantom otherwise. On consistent traces every real link is a DLink:
  /// a temporary loser is a root at its removal, so its last link was cut,
  /// and only deletions cut links whose losers get removed.
  bool real = false;
};

/// Per-operation context: how many temporary items the involved heap(s)
/// held when the operation started (both heaps summed for meld).
struct OpContext {
  std::uint64_t op = 0;
  OpKind kind = OpKind::MakeHeap;
  std::uint64_t n_raw = 0;
  std::uint64_t n_clamped = 4;  // max(n_raw, 4), keeps lg terms positive
  bool removal = false;         // true when the op removed an item
};

/// One step of a temporary item's size history. Size starts at 1, grows
/// by the loser's size whenever the item wins a real link, and never
/// changes otherwise; records are appended at real links (the winner's
/// new size) and at real cuts (the loser's size at detachment).
struct SizeRecord {
  std::uint64_t op = 0;
  ItemId item = 0;
  LinkId link = 0;
  std::uint64_t size = 0;
  bool at_cut = false;
};

/// Mass of the real child a link creates, computed two independent ways:
/// the winner's size just after the link, and one plus the child's own
/// size plus the sizes of its real right siblings. Equal on every
/// consistent trace.
struct MassRecord {
  std::uint64_t op = 0;
  LinkId link = 0;
  ItemId child = 0;
  std::uint64_t parent_size = 0;
  std::uint64_t one_plus_rights = 0;
};

struct Classification {
  std::vector<NodeFate> fates;        // by item id
  std::vector<LinkAnnotation> links;  // by link id
  std::vector<OpContext> contexts;    // by op index
  std::vector<SizeRecord> sizes;
  std::vector<MassRecord> masses;
};

/// Scans removals. Throws Error when an item is removed twice or an
/// unknown item is removed.
std::vector<NodeFate> node_fates(const Trace& t);

/// Pure scan, no structure: joins links with the cuts that sever them.
/// Throws Error when a cut references a missing or future link or a link
/// is cut twice.
std::vector<LinkAnnotation> annotate_links(const Trace& t,
                                           const std::vector<NodeFate>& fates);

/// Full pass: replays the trace structurally (validating it) and returns
/// fates, annotations, per-op contexts, size and mass timelines. Throws
/// Error at the first inconsistent event.
Classification classify(const Trace& t);

/// Convenience wrappers over classify().
std::vector<OpContext> op_contexts(const Trace& t);
std::vector<SizeRecord> size_timeline(const Trace& t);
std::vector<MassRecord> mass_records(const Trace& t);

/// The trace's JSON Lines form with fate and reality merged into each
/// link entry. Parses back as an ordinary trace; the extra fields are
/// ignored by deserialize.
std::string serialize_annotated(const Trace& t, const Classification& c);

}  // namespace pairtrace
