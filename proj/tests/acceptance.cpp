// Acceptance harness. Each requirement prints exactly one verdict line,
//
//   PASS differential_vs_reference: ...
//   FAIL theorem_bounds_1_to_5: ...
//
// and the process exits 0 only when every line is a PASS.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "pairtrace/auditor.hpp"
#include "pairtrace/classifier.hpp"
#include "pairtrace/heap.hpp"
#include "pairtrace/oracle.hpp"
#include "pairtrace/splitmix64.hpp"
#include "pairtrace/trace.hpp"
#include "pairtrace/workload.hpp"

namespace {

using namespace pairtrace;
using Clock = std::chrono::steady_clock;

int failures = 0;

void verdict(const char* name, bool pass, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
  if (!pass) failures++;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string num(std::uint64_t v) { return std::to_string(v); }

const BoundCheck* find_check(const AuditReport& r, const std::string& name) {
  for (const BoundCheck& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

// The shared evaluation matrix: a spread of workload shapes, five seeds
// each, with and without a drain tail. Only the audit reports are kept.
struct MatrixCase {
  WorkloadSpec spec;
  AuditReport report;
};

std::vector<MatrixCase> build_matrix(Strategy strategy) {
  struct Shape {
    GeneratorKind gen;
    std::uint64_t size;
  };
  std::vector<Shape> shapes;
  for (int k = 2; k <= 14; ++k)
    shapes.push_back({GeneratorKind::Sorting, std::uint64_t{1} << k});
  shapes.push_back({GeneratorKind::DijkstraLike, 1024});
  shapes.push_back({GeneratorKind::MeldHeavy, 256});
  shapes.push_back({GeneratorKind::RandomMixed, 4096});

  std::vector<MatrixCase> out;
  for (const Shape& sh : shapes)
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
      for (bool drain : {false, true}) {
        MatrixCase mc;
        mc.spec.generator = sh.gen;
        mc.spec.size = sh.size;
        mc.spec.seed = seed;
        mc.spec.strategy = strategy;
        mc.spec.drain_tail = drain;
        mc.report = audit_trace(run(generate(mc.spec)));
        out.push_back(std::move(mc));
      }
  return out;
}

// ------------------------------------------------------------- criteria

void check_differential(Strategy strategy, const char* name) {
  double slowest = 0;
  std::uint64_t ops = 0;
  std::string fail;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    WorkloadSpec spec;
    spec.generator = GeneratorKind::RandomMixed;
    spec.size = 100000;
    spec.seed = seed;
    spec.strategy = strategy;
    auto t0 = Clock::now();
    DivergenceReport rep = run_both(generate(spec));
    slowest = std::max(
        slowest, std::chrono::duration<double>(Clock::now() - t0).count());
    ops += rep.ops_executed;
    if (!rep.ok && fail.empty())
      fail = "seed " + num(seed) + " diverges at op " + num(rep.op) + " (" +
             rep.message + ")";
  }
  if (!fail.empty()) {
    verdict(name, false, fail);
    return;
  }
  verdict(name, slowest < 10.0,
          num(ops) + " operations over 10 seeds match the sorted-multiset "
                     "reference, slowest seed " +
              fmt(slowest) + "s");
}

void check_deletion_shape(const std::vector<MatrixCase>& two) {
  std::uint64_t deletions = 0, bad = 0;
  for (const MatrixCase& mc : two) {
    deletions += mc.report.deletions_checked;
    const BoundCheck* dc = find_check(mc.report, "deletion_link_counts");
    const BoundCheck* l2 = find_check(mc.report, "lemma2_assembly_le_pairing");
    if (!dc || !dc->pass || !l2 || !l2->pass) bad++;
  }
  verdict("deletion_link_shape", bad == 0 && deletions > 0,
          bad == 0 ? num(deletions) + " deletions across " + num(two.size()) +
                         " two-pass traces made floor(c/2) pairing and "
                         "ceil(c/2)-1 assembly links each, assembly never "
                         "above pairing"
                   : num(bad) + " traces break the per-deletion link shape");
}

void check_lemma_exactness(const std::vector<MatrixCase>& two,
                           const std::vector<MatrixCase>& multi) {
  std::uint64_t checked = 0, bad = 0, equalities = 0;
  auto scan = [&](const std::vector<MatrixCase>& v) {
    for (const MatrixCase& mc : v) {
      checked++;
      const BoundCheck* l1 = find_check(mc.report, "lemma1_insertion_meld_links");
      const BoundCheck* l3 = find_check(mc.report, "lemma3_flinks_plus_deletions");
      if (!l1 || !l3 || l1->lhs > l1->rhs || l3->lhs > l3->rhs) {
        bad++;
        continue;
      }
      // A run that empties every heap spends the whole budget.
      bool drained = mc.spec.drain_tail ||
                     mc.spec.generator == GeneratorKind::Sorting;
      if (drained) {
        if (l3->lhs == l3->rhs)
          equalities++;
        else
          bad++;
      }
    }
  };
  scan(two);
  scan(multi);
  verdict("lemmas_1_and_3_exact", bad == 0,
          bad == 0 ? "insert budgets hold with zero tolerance on " +
                         num(checked) + " traces under both strategies, " +
                         num(equalities) +
                         " drained runs spend the budget exactly"
                   : num(bad) + " traces violate an exact insert budget");
}

void check_theorems(const std::vector<MatrixCase>& two) {
  static const char* kNames[] = {
      "theorem1_pairing_links",      "theorem2_real_right_assembly_links",
      "theorem3_real_pairing_links", "theorem4_total_links",
      "theorem5_total_links_by_heap_size"};
  std::uint64_t bad = 0, not_overall = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  bool strict = true;
  for (const MatrixCase& mc : two) {
    if (!mc.report.overall) not_overall++;
    for (const char* n : kNames) {
      const BoundCheck* c = find_check(mc.report, n);
      if (!c || !c->applicable || !c->pass) {
        bad++;
        continue;
      }
      min_slack = std::min(min_slack, c->slack);
    }
    if (mc.spec.generator == GeneratorKind::Sorting && mc.spec.size == 1024) {
      const BoundCheck* t4 = find_check(mc.report, "theorem4_total_links");
      if (!t4 || t4->slack <= 0) strict = false;
    }
  }
  bool pass = bad == 0 && not_overall == 0 && strict;
  verdict("theorem_bounds_1_to_5", pass,
          pass ? "all five amortized bounds hold on " + num(two.size()) +
                     " fully passing two-pass audits, minimum slack " +
                     fmt(min_slack)
               : num(bad) + " bound failures, " + num(not_overall) +
                     " audits not fully passing" +
                     (strict ? "" : ", no strict slack on the sorting runs"));
}

void check_zero_violations(const char* crit, const char* check_name,
                           const std::vector<MatrixCase>& two,
                           const std::vector<MatrixCase>& multi,
                           const char* what) {
  std::uint64_t n = 0, bad = 0;
  for (const std::vector<MatrixCase>* v : {&two, &multi})
    for (const MatrixCase& mc : *v) {
      n++;
      const BoundCheck* c = find_check(mc.report, check_name);
      if (!c || !c->applicable || !c->pass || c->lhs != 0) bad++;
    }
  verdict(crit, bad == 0,
          bad == 0 ? std::string("zero violations on ") + num(n) +
                         " traces: " + what
                   : num(bad) + " traces report violations");
}

void check_log_ineq() {
  SplitMix64 rng(0xACCE97);
  std::uint64_t bad = 0;
  for (int i = 0; i < 100000; ++i) {
    double a = static_cast<double>(1 + rng.below(1000000));
    double b = static_cast<double>(1 + rng.below(1000000));
    if (!check_log_inequality(a, b)) bad++;
  }
  double worst_gap = 0;
  for (int i = 0; i < 10000; ++i) {
    double a = static_cast<double>(1 + rng.below(1000000));
    double gap = std::fabs(2.0 * std::log2(a + a) - (2.0 * std::log2(a) + 2.0));
    worst_gap = std::max(worst_gap, gap);
  }
  verdict("log_inequality", bad == 0 && worst_gap <= 1e-12,
          bad == 0 ? "2lg(a+b) >= lg(a)+lg(b)+2 on 100000 random pairs, "
                     "equality gap at a = b at most " +
                         fmt(worst_gap)
                   : num(bad) + " pairs violate the inequality");
}

// Replays a workload against the forest directly and validates heap order
// and structure at regular checkpoints.
std::string order_scan(Strategy strategy) {
  WorkloadSpec spec;
  spec.generator = GeneratorKind::RandomMixed;
  spec.size = 20000;
  spec.seed = 21;
  spec.strategy = strategy;
  spec.drain_tail = true;
  Workload wl = generate(spec);

  NullSink sink;
  Forest f(sink, strategy);
  std::vector<char> alive;
  auto mark = [&](HeapId h, bool v) {
    if (h >= alive.size()) alive.resize(h + 1, 0);
    alive[h] = v;
  };
  auto check_all = [&]() -> std::string {
    for (HeapId h = 0; h < alive.size(); ++h) {
      if (!alive[h]) continue;
      if (auto v = f.validate(h))
        return "heap " + num(h) + " at " + v->path + ": " + v->message;
    }
    return "";
  };

  for (std::size_t i = 0; i < wl.ops.size(); ++i) {
    const WorkloadOp& op = wl.ops[i];
    switch (op.kind) {
      case OpKind::MakeHeap: mark(f.make_heap(), true); break;
      case OpKind::Insert: f.insert(op.heap, op.key); break;
      case OpKind::Meld: {
        HeapId m = f.meld(op.heap, op.heap2);
        mark(op.heap, false);
        mark(op.heap2, false);
        mark(m, true);
        break;
      }
      case OpKind::DecreaseKey: f.decrease_key(op.heap, op.item, op.key); break;
      case OpKind::DeleteMin: f.delete_min(op.heap); break;
      case OpKind::Delete: f.remove(op.heap, op.item); break;
      case OpKind::FindMin: f.find_min(op.heap); break;
    }
    if (i % 97 == 0) {
      std::string err = check_all();
      if (!err.empty()) return "op " + num(i) + ": " + err;
    }
  }
  return check_all();
}

void check_multipass(const std::vector<MatrixCase>& multi) {
  std::string fail;

  // The variant agrees with the reference model at scale.
  std::uint64_t ops = 0;
  for (std::uint64_t seed = 1; seed <= 10 && fail.empty(); ++seed) {
    WorkloadSpec spec;
    spec.generator = GeneratorKind::RandomMixed;
    spec.size = 100000;
    spec.seed = seed;
    spec.strategy = Strategy::Multipass;
    DivergenceReport rep = run_both(generate(spec));
    ops += rep.ops_executed;
    if (!rep.ok)
      fail = "seed " + num(seed) + " diverges at op " + num(rep.op) + " (" +
             rep.message + ")";
  }

  // Its audits pass in full, with the two-pass-only checks set aside.
  static const char* kInapplicable[] = {
      "lemma2_assembly_le_pairing",  "theorem1_pairing_links",
      "theorem2_real_right_assembly_links", "theorem3_real_pairing_links",
      "theorem4_total_links",        "theorem5_total_links_by_heap_size"};
  std::uint64_t bad = 0;
  for (const MatrixCase& mc : multi) {
    if (!mc.report.overall) bad++;
    for (const char* n : kInapplicable) {
      const BoundCheck* c = find_check(mc.report, n);
      if (!c || c->applicable) bad++;
    }
  }
  if (fail.empty() && bad > 0)
    fail = num(bad) + " multipass audit irregularities";

  // Heap order survives long mixed runs under both strategies.
  if (fail.empty()) fail = order_scan(Strategy::Multipass);
  if (fail.empty()) fail = order_scan(Strategy::TwoPass);

  verdict("multipass_variant", fail.empty(),
          fail.empty()
              ? num(ops) + " operations match the reference, " +
                    num(multi.size()) +
                    " audits pass with the two-pass bounds set aside, and "
                    "periodic order validation stays clean"
              : fail);
}

void check_round_trip() {
  static const GeneratorKind kGens[] = {
      GeneratorKind::Sorting, GeneratorKind::RandomMixed,
      GeneratorKind::DijkstraLike, GeneratorKind::MeldHeavy};
  std::uint64_t traces = 0, bad = 0;
  for (int i = 0; i < 100; ++i) {
    WorkloadSpec spec;
    spec.generator = kGens[i % 4];
    spec.size = 20 + static_cast<std::uint64_t>(i) * 7;
    spec.seed = 1000 + static_cast<std::uint64_t>(i);
    spec.strategy = i % 2 ? Strategy::Multipass : Strategy::TwoPass;
    spec.drain_tail = (i / 2) % 2;
    Workload wl = generate(spec);
    std::string ws = serialize_workload(wl);
    if (serialize_workload(deserialize_workload(ws)) != ws) bad++;
    std::string ts = serialize(run(wl));
    if (serialize(deserialize(ts)) != ts) bad++;
    traces++;
  }
  verdict("trace_round_trip", bad == 0,
          bad == 0 ? num(traces) + " traces and their workloads re-serialize "
                                   "byte for byte after parsing"
                   : num(bad) + " files change across a parse cycle");
}

// Splices one fabricated link into the stream, then renumbers ids and
// remaps cut references so the result is still well formed on its face.
void inject_link(Trace& t, SplitMix64& rng, std::uint64_t items) {
  constexpr std::uint64_t kFresh = std::numeric_limits<std::uint64_t>::max();
  TraceEvent& ev = t.events[rng.below(t.events.size())];
  LinkEvent l;
  l.id = kFresh;
  l.winner = rng.below(items);
  l.loser = rng.below(items);
  if (items > 1)
    while (l.loser == l.winner) l.loser = rng.below(items);
  static const LinkContext kCtx[] = {LinkContext::Insertion, LinkContext::Meld,
                                     LinkContext::DecreaseKey,
                                     LinkContext::Pairing, LinkContext::Assembly};
  l.ctx = kCtx[rng.below(5)];
  bool in_deletion =
      l.ctx == LinkContext::Pairing || l.ctx == LinkContext::Assembly;
  l.orient = !in_deletion ? Orientation::NotApplicable
             : rng.below(2) ? Orientation::LoserLeft
                            : Orientation::LoserRight;
  ev.links.insert(ev.links.begin() + rng.below(ev.links.size() + 1), l);

  std::vector<std::uint64_t> remap;
  std::uint64_t next = 0;
  for (TraceEvent& e : t.events)
    for (LinkEvent& le : e.links) {
      if (le.id != kFresh) {
        if (le.id >= remap.size()) remap.resize(le.id + 1, 0);
        remap[le.id] = next;
      }
      le.id = next++;
    }
  for (TraceEvent& e : t.events)
    for (CutEvent& ce : e.cuts) ce.cut_link = remap[ce.cut_link];
}

void remove_cut(Trace& t, SplitMix64& rng) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < t.events.size(); ++i)
    if (!t.events[i].cuts.empty()) candidates.push_back(i);
  if (candidates.empty()) return;
  std::vector<CutEvent>& cuts =
      t.events[candidates[rng.below(candidates.size())]].cuts;
  cuts.erase(cuts.begin() + rng.below(cuts.size()));
}

void check_perturbations() {
  WorkloadSpec spec;
  spec.generator = GeneratorKind::RandomMixed;
  spec.size = 400;
  spec.seed = 7;
  spec.drain_tail = true;
  Trace base = run(generate(spec));
  std::uint64_t items = 0;
  for (const TraceEvent& ev : base.events) items += ev.kind == OpKind::Insert;

  std::uint64_t detected = 0;
  std::string first_miss;
  for (int p = 0; p < 10; ++p) {
    Trace t = base;
    SplitMix64 rng(3000 + static_cast<std::uint64_t>(p));
    if (p % 2 == 0)
      inject_link(t, rng, items);
    else
      remove_cut(t, rng);
    AuditReport rep = audit_trace(t);
    if (!rep.overall)
      detected++;
    else if (first_miss.empty())
      first_miss = std::string(p % 2 == 0 ? "link injection" : "cut removal") +
                   " " + num(static_cast<std::uint64_t>(p)) + " went unnoticed";
  }
  verdict("perturbation_sensitivity", detected == 10,
          detected == 10 ? "10/10 tampered traces rejected, alternating link "
                           "injection and cut removal"
                         : first_miss);
}

}  // namespace

int main() {
  std::vector<MatrixCase> two = build_matrix(Strategy::TwoPass);
  std::vector<MatrixCase> multi = build_matrix(Strategy::Multipass);

  check_differential(Strategy::TwoPass, "differential_vs_reference");
  check_deletion_shape(two);
  check_lemma_exactness(two, multi);
  check_theorems(two);
  check_zero_violations("size_monotonicity", "size_monotonicity", two, multi,
                        "recorded subtree sizes never shrink");
  check_zero_violations("mass_equivalence", "mass_equivalence", two, multi,
                        "winner size equals 1 + child size + real right "
                        "sibling sizes at every real link");
  check_log_ineq();
  check_multipass(multi);
  check_round_trip();
  check_perturbations();

  return failures == 0 ? 0 : 1;
}
