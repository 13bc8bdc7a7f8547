#include "pairtrace/trace.hpp"

#include <cassert>
#include <charconv>
#include <cstdio>

#include <json.hpp>

namespace pairtrace {

using nlohmann::json;

const char* to_string(Strategy s) {
  return s == Strategy::TwoPass ? "twopass" : "multipass";
}

Strategy strategy_from_string(const std::string& s) {
  if (s == "twopass") return Strategy::TwoPass;
  if (s == "multipass") return Strategy::Multipass;
  throw Error("unknown strategy '" + s + "' (expected twopass or multipass)");
}

const char* to_string(OpKind k) {
  switch (k) {
    case OpKind::MakeHeap: return "make_heap";
    case OpKind::Insert: return "insert";
    case OpKind::Meld: return "meld";
    case OpKind::DecreaseKey: return "decrease_key";
    case OpKind::DeleteMin: return "delete_min";
    case OpKind::Delete: return "delete";
    case OpKind::FindMin: return "find_min";
  }
  return "?";
}

const char* to_string(LinkContext c) {
  switch (c) {
    case LinkContext::Insertion: return "insertion";
    case LinkContext::Meld: return "meld";
    case LinkContext::DecreaseKey: return "decrease_key";
    case LinkContext::Pairing: return "pairing";
    case LinkContext::Assembly: return "assembly";
  }
  return "?";
}

const char* to_string(Orientation o) {
  switch (o) {
    case Orientation::LoserLeft: return "left";
    case Orientation::LoserRight: return "right";
    case Orientation::NotApplicable: return "na";
  }
  return "?";
}

const char* to_string(CutCause c) {
  return c == CutCause::Deletion ? "deletion" : "decrease_key";
}

// ---------------------------------------------------------------- sink

std::uint64_t TraceSink::begin_op(OpKind kind) {
  assert(!open_);
  open_ = true;
  pending_.op = next_op_++;
  pending_.kind = kind;
  pending_.heap.reset();
  pending_.heap2.reset();
  pending_.item.reset();
  pending_.key.reset();
  pending_.links.clear();
  pending_.cuts.clear();
  return pending_.op;
}

void TraceSink::op_heap(HeapId h) {
  assert(open_);
  pending_.heap = h;
}

void TraceSink::op_heap2(HeapId h) {
  assert(open_);
  pending_.heap2 = h;
}

void TraceSink::op_item(ItemId i) {
  assert(open_);
  pending_.item = i;
}

void TraceSink::op_key(Key k) {
  assert(open_);
  pending_.key = k;
}

LinkId TraceSink::emit_link(ItemId winner, ItemId loser, LinkContext ctx,
                            Orientation orient) {
  assert(open_);
  LinkId id = next_link_++;
  pending_.links.push_back(LinkEvent{id, winner, loser, ctx, orient});
  return id;
}

void TraceSink::emit_cut(LinkId link, CutCause cause) {
  assert(open_);
  pending_.cuts.push_back(CutEvent{link, cause});
}

void TraceSink::end_op() {
  assert(open_);
  open_ = false;
  consume(std::move(pending_));
  pending_ = TraceEvent{};
}

// -------------------------------------------------------------- writer

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

void put_key(std::string& out, const Key& k) {
  if (k.minus_inf) {
    out += "\"-inf\"";
  } else {
    put_i64(out, k.value);
  }
}

}  // namespace

std::string event_line(const TraceEvent& ev) {
  std::string out;
  out.reserve(64 + 48 * ev.links.size() + 32 * ev.cuts.size());
  out += "{\"op\":";
  put_u64(out, ev.op);
  out += ",\"kind\":\"";
  out += to_string(ev.kind);
  out += '"';
  if (ev.heap) {
    out += ",\"heap\":";
    put_u64(out, *ev.heap);
  }
  if (ev.heap2) {
    out += ",\"heap2\":";
    put_u64(out, *ev.heap2);
  }
  if (ev.item) {
    out += ",\"item\":";
    put_u64(out, *ev.item);
  }
  if (ev.key) {
    out += ",\"key\":";
    put_key(out, *ev.key);
  }
  if (!ev.links.empty()) {
    out += ",\"links\":[";
    bool first = true;
    for (const LinkEvent& l : ev.links) {
      if (!first) out += ',';
      first = false;
      out += "{\"id\":";
      put_u64(out, l.id);
      out += ",\"winner\":";
      put_u64(out, l.winner);
      out += ",\"loser\":";
      put_u64(out, l.loser);
      out += ",\"ctx\":\"";
      out += to_string(l.ctx);
      out += "\",\"orient\":\"";
      out += to_string(l.orient);
      out += "\"}";
    }
    out += ']';
  }
  if (!ev.cuts.empty()) {
    out += ",\"cuts\":[";
    bool first = true;
    for (const CutEvent& c : ev.cuts) {
      if (!first) out += ',';
      first = false;
      out += "{\"cutLink\":";
      put_u64(out, c.cut_link);
      out += ",\"cause\":\"";
      out += to_string(c.cause);
      out += "\"}";
    }
    out += ']';
  }
  out += '}';
  return out;
}

std::string serialize(const Trace& t) {
  std::string out;
  out += "{\"format\":\"pairtrace-trace\",\"version\":1,\"generator\":\"";
  out += t.meta.generator;
  out += "\",\"seed\":";
  put_u64(out, t.meta.seed);
  out += ",\"size\":";
  put_u64(out, t.meta.size);
  out += ",\"strategy\":\"";
  out += to_string(t.meta.strategy);
  out += "\",\"drain\":";
  out += t.meta.drain ? "true" : "false";
  out += "}\n";
  for (const TraceEvent& ev : t.events) {
    out += event_line(ev);
    out += '\n';
  }
  return out;
}

// -------------------------------------------------------------- parser

namespace {

[[noreturn]] void fail_line(std::size_t line_no, const std::string& msg) {
  throw Error("trace parse error at line " + std::to_string(line_no) + ": " + msg);
}

std::uint64_t get_u64(const json& j, const char* field, std::size_t line_no) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_number_unsigned())
    fail_line(line_no, std::string("missing or invalid '") + field + "'");
  return it->get<std::uint64_t>();
}

OpKind parse_kind(const std::string& s, std::size_t line_no) {
  if (s == "make_heap") return OpKind::MakeHeap;
  if (s == "insert") return OpKind::Insert;
  if (s == "meld") return OpKind::Meld;
  if (s == "decrease_key") return OpKind::DecreaseKey;
  if (s == "delete_min") return OpKind::DeleteMin;
  if (s == "delete") return OpKind::Delete;
  if (s == "find_min") return OpKind::FindMin;
  fail_line(line_no, "unknown op kind '" + s + "'");
}

LinkContext parse_ctx(const std::string& s, std::size_t line_no) {
  if (s == "insertion") return LinkContext::Insertion;
  if (s == "meld") return LinkContext::Meld;
  if (s == "decrease_key") return LinkContext::DecreaseKey;
  if (s == "pairing") return LinkContext::Pairing;
  if (s == "assembly") return LinkContext::Assembly;
  fail_line(line_no, "unknown link context '" + s + "'");
}

Orientation parse_orient(const std::string& s, std::size_t line_no) {
  if (s == "left") return Orientation::LoserLeft;
  if (s == "right") return Orientation::LoserRight;
  if (s == "na") return Orientation::NotApplicable;
  fail_line(line_no, "unknown orientation '" + s + "'");
}

CutCause parse_cause(const std::string& s, std::size_t line_no) {
  if (s == "deletion") return CutCause::Deletion;
  if (s == "decrease_key") return CutCause::DecreaseKey;
  fail_line(line_no, "unknown cut cause '" + s + "'");
}

json parse_json_line(std::string_view line, std::size_t line_no) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) fail_line(line_no, "malformed JSON");
  if (!j.is_object()) fail_line(line_no, "expected a JSON object");
  return j;
}

}  // namespace

Trace deserialize(std::string_view text) {
  Trace t;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  std::uint64_t next_link = 0;
  bool saw_meta = false;

  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = (eol == std::string_view::npos)
                                ? text.substr(pos)
                                : text.substr(pos, eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() : eol + 1;
    ++line_no;
    if (line.empty()) continue;

    json j = parse_json_line(line, line_no);

    if (!saw_meta) {
      auto fmt = j.find("format");
      if (fmt == j.end() || !fmt->is_string() ||
          fmt->get<std::string>() != "pairtrace-trace")
        fail_line(line_no, "first line must be pairtrace-trace metadata");
      if (get_u64(j, "version", line_no) != 1)
        fail_line(line_no, "unsupported trace version");
      auto gen = j.find("generator");
      if (gen == j.end() || !gen->is_string())
        fail_line(line_no, "missing or invalid 'generator'");
      t.meta.generator = gen->get<std::string>();
      t.meta.seed = get_u64(j, "seed", line_no);
      t.meta.size = get_u64(j, "size", line_no);
      auto strat = j.find("strategy");
      if (strat == j.end() || !strat->is_string())
        fail_line(line_no, "missing or invalid 'strategy'");
      try {
        t.meta.strategy = strategy_from_string(strat->get<std::string>());
      } catch (const Error& e) {
        fail_line(line_no, e.what());
      }
      auto drain = j.find("drain");
      if (drain == j.end() || !drain->is_boolean())
        fail_line(line_no, "missing or invalid 'drain'");
      t.meta.drain = drain->get<bool>();
      saw_meta = true;
      continue;
    }

    TraceEvent ev;
    ev.op = get_u64(j, "op", line_no);
    if (ev.op != t.events.size())
      fail_line(line_no, "op index " + std::to_string(ev.op) + " out of order");
    auto kind = j.find("kind");
    if (kind == j.end() || !kind->is_string())
      fail_line(line_no, "missing or invalid 'kind'");
    ev.kind = parse_kind(kind->get<std::string>(), line_no);
    if (auto it = j.find("heap"); it != j.end())
      ev.heap = get_u64(j, "heap", line_no);
    if (auto it = j.find("heap2"); it != j.end())
      ev.heap2 = get_u64(j, "heap2", line_no);
    if (auto it = j.find("item"); it != j.end())
      ev.item = get_u64(j, "item", line_no);
    if (auto it = j.find("key"); it != j.end()) {
      if (it->is_number_integer()) {
        ev.key = Key::of(it->get<std::int64_t>());
      } else if (it->is_string() && it->get<std::string>() == "-inf") {
        ev.key = Key::minus_infinity();
      } else {
        fail_line(line_no, "invalid 'key'");
      }
    }
    if (auto it = j.find("links"); it != j.end()) {
      if (!it->is_array()) fail_line(line_no, "'links' must be an array");
      for (const json& lj : *it) {
        if (!lj.is_object()) fail_line(line_no, "link entry must be an object");
        LinkEvent l;
        l.id = get_u64(lj, "id", line_no);
        if (l.id != next_link)
          fail_line(line_no, "link id " + std::to_string(l.id) +
                                 " out of order (expected " +
                                 std::to_string(next_link) + ")");
        ++next_link;
        l.winner = get_u64(lj, "winner", line_no);
        l.loser = get_u64(lj, "loser", line_no);
        auto ctx = lj.find("ctx");
        if (ctx == lj.end() || !ctx->is_string())
          fail_line(line_no, "missing or invalid link 'ctx'");
        l.ctx = parse_ctx(ctx->get<std::string>(), line_no);
        auto orient = lj.find("orient");
        if (orient == lj.end() || !orient->is_string())
          fail_line(line_no, "missing or invalid link 'orient'");
        l.orient = parse_orient(orient->get<std::string>(), line_no);
        ev.links.push_back(l);
      }
    }
    if (auto it = j.find("cuts"); it != j.end()) {
      if (!it->is_array()) fail_line(line_no, "'cuts' must be an array");
      for (const json& cj : *it) {
        if (!cj.is_object()) fail_line(line_no, "cut entry must be an object");
        CutEvent c;
        c.cut_link = get_u64(cj, "cutLink", line_no);
        auto cause = cj.find("cause");
        if (cause == cj.end() || !cause->is_string())
          fail_line(line_no, "missing or invalid cut 'cause'");
        c.cause = parse_cause(cause->get<std::string>(), line_no);
        ev.cuts.push_back(c);
      }
    }
    t.events.push_back(std::move(ev));
  }

  if (!saw_meta) throw Error("trace parse error at line 1: missing metadata line");
  return t;
}

}  // namespace pairtrace
