#include "pairtrace/auditor.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "pairtrace/splitmix64.hpp"
#include "pairtrace/workload.hpp"

namespace pairtrace {

using nlohmann::json;

namespace {

double lg(std::uint64_t n) { return std::log2(static_cast<double>(n)); }

BoundCheck bound(std::string name, double lhs, double rhs,
                 std::uint64_t clamped, std::string detail) {
  BoundCheck c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.slack = rhs - lhs;
  c.pass = lhs <= rhs + kBoundTolerance;
  c.clamped_terms = clamped;
  c.detail = std::move(detail);
  return c;
}

// Consistency checks are reported in the same shape: lhs counts
// violations and the bound is zero.
BoundCheck violation_count(std::string name, std::uint64_t count,
                           std::string detail) {
  return bound(std::move(name), static_cast<double>(count), 0.0, 0,
               std::move(detail));
}

BoundCheck skipped(std::string name, std::string why) {
  BoundCheck c;
  c.name = std::move(name);
  c.pass = false;
  c.applicable = false;
  c.detail = std::move(why);
  return c;
}

struct OpTally {
  std::uint64_t inserts = 0;
  std::uint64_t melds = 0;
  std::uint64_t dks = 0;        // decrease_key ops plus the half inside delete
  std::uint64_t deletions = 0;  // ops that removed an item
};

OpTally tally_ops(const Trace& t) {
  OpTally tal;
  for (const TraceEvent& ev : t.events) {
    switch (ev.kind) {
      case OpKind::Insert: tal.inserts++; break;
      case OpKind::Meld: tal.melds++; break;
      case OpKind::DecreaseKey: tal.dks++; break;
      case OpKind::Delete:
        tal.dks++;
        tal.deletions++;
        break;
      case OpKind::DeleteMin:
        if (ev.item) tal.deletions++;
        break;
      default: break;
    }
  }
  return tal;
}

bool is_removal(const TraceEvent& ev) {
  return ev.kind == OpKind::Delete ||
         (ev.kind == OpKind::DeleteMin && ev.item.has_value());
}

DeletionShape shape_of(const TraceEvent& ev) {
  DeletionShape s;
  s.op = ev.op;
  for (const CutEvent& c : ev.cuts)
    if (c.cause == CutCause::Deletion) s.children++;
  for (const LinkEvent& l : ev.links) {
    if (l.ctx == LinkContext::Pairing) s.pairing++;
    if (l.ctx == LinkContext::Assembly) s.assembly++;
  }
  return s;
}

}  // namespace

// -------------------------------------------------------------- lemmas

BoundCheck check_lemma1(const std::vector<LinkAnnotation>& links, const Trace& t) {
  std::uint64_t lhs = 0;
  for (const LinkAnnotation& a : links)
    if (a.ctx == LinkContext::Insertion || a.ctx == LinkContext::Meld) lhs++;
  OpTally tal = tally_ops(t);
  return bound("lemma1_insertion_meld_links", static_cast<double>(lhs),
               static_cast<double>(tal.inserts), 0,
               "links made by insert and meld vs insertions");
}

BoundCheck check_lemma2(const Trace& t, std::vector<DeletionShape>* shapes) {
  std::uint64_t pairing = 0;
  std::uint64_t assembly = 0;
  std::uint64_t bad = 0;
  for (const TraceEvent& ev : t.events) {
    if (!is_removal(ev)) continue;
    DeletionShape s = shape_of(ev);
    s.ok = s.assembly <= s.pairing;
    pairing += s.pairing;
    assembly += s.assembly;
    if (!s.ok) bad++;
    if (shapes) shapes->push_back(s);
  }
  BoundCheck c = bound("lemma2_assembly_le_pairing",
                       static_cast<double>(assembly),
                       static_cast<double>(pairing), 0,
                       "assembly links vs pairing links, checked per deletion");
  if (bad > 0) {
    c.pass = false;
    c.detail += "; " + std::to_string(bad) + " deletions violate it individually";
  }
  if (t.meta.strategy != Strategy::TwoPass) c.applicable = false;
  return c;
}

BoundCheck check_lemma3(const std::vector<LinkAnnotation>& links, const Trace& t) {
  std::uint64_t flinks = 0;
  for (const LinkAnnotation& a : links)
    if (a.fate == LinkFate::FLink) flinks++;
  OpTally tal = tally_ops(t);
  return bound("lemma3_flinks_plus_deletions",
               static_cast<double>(flinks + tal.deletions),
               static_cast<double>(tal.inserts), 0,
               "never-cut links plus completed removals vs insertions");
}

// ------------------------------------------------------------ theorems

namespace {

struct RealLinkTally {
  std::uint64_t pairing_all = 0;
  std::uint64_t real_pairing = 0;
  std::uint64_t real_right_assembly = 0;
};

RealLinkTally tally_real(const std::vector<LinkAnnotation>& links) {
  RealLinkTally r;
  for (const LinkAnnotation& a : links) {
    if (a.ctx == LinkContext::Pairing) {
      r.pairing_all++;
      if (a.real) r.real_pairing++;
    } else if (a.ctx == LinkContext::Assembly && a.real &&
               a.orient == Orientation::LoserRight) {
      r.real_right_assembly++;
    }
  }
  return r;
}

bool counts_dk(const OpContext& c) {
  return c.kind == OpKind::DecreaseKey || c.kind == OpKind::Delete;
}

}  // namespace

BoundCheck check_theorem1(const std::vector<LinkAnnotation>& links, const Trace& t) {
  RealLinkTally r = tally_real(links);
  OpTally tal = tally_ops(t);
  double rhs = 4.0 * static_cast<double>(tal.inserts) +
               3.0 * static_cast<double>(tal.dks) +
               2.0 * static_cast<double>(r.real_right_assembly) +
               2.0 * static_cast<double>(r.real_pairing);
  return bound("theorem1_pairing_links", static_cast<double>(r.pairing_all), rhs,
               0,
               "pairing links vs 4/insert + 3/decrease-key + "
               "2/real-right-assembly + 2/real-pairing");
}

BoundCheck check_theorem2(const std::vector<LinkAnnotation>& links,
                          const std::vector<OpContext>& contexts) {
  RealLinkTally r = tally_real(links);
  double rhs = 0;
  std::uint64_t clamped = 0;
  for (const OpContext& c : contexts) {
    if (counts_dk(c)) {
      rhs += lg(c.n_clamped) / 2.0;
      if (c.n_raw < 4) clamped++;
    }
    if (c.removal) {
      rhs += lg(c.n_clamped);
      if (c.n_raw < 4) clamped++;
    }
  }
  return bound("theorem2_real_right_assembly_links",
               static_cast<double>(r.real_right_assembly), rhs, clamped,
               "real right assembly links vs lg(n)/2 per decrease-key + "
               "lg(n) per deletion");
}

BoundCheck check_theorem3(const std::vector<LinkAnnotation>& links,
                          const std::vector<OpContext>& contexts) {
  RealLinkTally r = tally_real(links);
  double rhs = 0;
  std::uint64_t clamped = 0;
  for (const OpContext& c : contexts) {
    if (counts_dk(c)) {
      rhs += lg(c.n_clamped);
      if (c.n_raw < 4) clamped++;
    }
    if (c.removal) {
      rhs += 1.5 * lg(c.n_clamped) + kLgE / 2.0;
      if (c.n_raw < 4) clamped++;
    }
  }
  return bound("theorem3_real_pairing_links",
               static_cast<double>(r.real_pairing), rhs, clamped,
               "real pairing links vs lg(n) per decrease-key + "
               "(3/2)lg(n) + lg(e)/2 per deletion");
}

BoundCheck check_theorem4(const std::vector<LinkAnnotation>& links,
                          const std::vector<OpContext>& contexts) {
  double rhs = 0;
  std::uint64_t clamped = 0;
  for (const OpContext& c : contexts) {
    if (c.kind == OpKind::Insert) rhs += 9.0;
    if (counts_dk(c)) {
      rhs += 6.0 * lg(c.n_clamped) + 7.0;
      if (c.n_raw < 4) clamped++;
    }
    if (c.removal) {
      rhs += 10.0 * lg(c.n_clamped) + 2.0 * kLgE;
      if (c.n_raw < 4) clamped++;
    }
  }
  return bound("theorem4_total_links", static_cast<double>(links.size()), rhs,
               clamped,
               "all links vs 9/insert + 6lg(n)+7 per decrease-key + "
               "10lg(n)+2lg(e) per deletion");
}

BoundCheck check_theorem5(const std::vector<LinkAnnotation>& links,
                          const std::vector<OpContext>& contexts) {
  double rhs = 0;
  std::uint64_t clamped = 0;
  for (const OpContext& c : contexts) {
    double term = 0;
    std::uint64_t uses = 0;
    if (c.kind == OpKind::Insert) {
      term += lg(c.n_clamped) + 1.0;
      uses++;
    }
    if (c.kind == OpKind::Meld) {
      term += lg(c.n_clamped);
      uses++;
    }
    if (counts_dk(c)) {
      term += lg(c.n_clamped) + 3.0;
      uses++;
    }
    if (c.removal) {
      term += 2.0 * lg(c.n_clamped);
      uses++;
    }
    rhs += term;
    if (c.n_raw < 4) clamped += uses;
  }
  return bound("theorem5_total_links_by_heap_size",
               static_cast<double>(links.size()), rhs, clamped,
               "all links vs lg(n)+1 per insert + lg(n) per meld + "
               "lg(n)+3 per decrease-key + 2lg(n) per deletion");
}

bool check_log_inequality(double a, double b) {
  return 2.0 * std::log2(a + b) + 1e-9 >= std::log2(a) + std::log2(b) + 2.0;
}

// ---------------------------------------------------------------- audit

AuditReport audit_trace(const Trace& t, const AuditOptions& opts) {
  AuditReport rep;
  rep.strategy = t.meta.strategy;
  bool twopass = rep.strategy == Strategy::TwoPass;
  rep.ops_total = t.events.size();
  for (const TraceEvent& ev : t.events) {
    rep.op_counts[static_cast<int>(ev.kind)]++;
    rep.total_links += ev.links.size();
  }

  std::vector<NodeFate> fates;
  std::vector<LinkAnnotation> anns;
  Classification cls;
  int stage = 0;
  try {
    fates = node_fates(t);
    stage = 1;
    anns = annotate_links(t, fates);
    stage = 2;
    cls = classify(t);
    stage = 3;
  } catch (const Error& e) {
    rep.consistency_error = e.what();
  }

  auto inapplicable = [](BoundCheck c) {
    c.applicable = false;
    return c;
  };

  // Bound checks.
  if (stage >= 2) {
    rep.checks.push_back(check_lemma1(anns, t));
    BoundCheck l2 = check_lemma2(t, nullptr);
    rep.checks.push_back(l2);
    rep.checks.push_back(check_lemma3(anns, t));
    BoundCheck t1 = check_theorem1(anns, t);
    rep.checks.push_back(twopass ? t1 : inapplicable(t1));
    if (stage >= 3) {
      BoundCheck t2 = check_theorem2(anns, cls.contexts);
      BoundCheck t3 = check_theorem3(anns, cls.contexts);
      BoundCheck t4 = check_theorem4(anns, cls.contexts);
      BoundCheck t5 = check_theorem5(anns, cls.contexts);
      rep.checks.push_back(twopass ? t2 : inapplicable(t2));
      rep.checks.push_back(twopass ? t3 : inapplicable(t3));
      rep.checks.push_back(twopass ? t4 : inapplicable(t4));
      rep.checks.push_back(twopass ? t5 : inapplicable(t5));
    } else {
      const char* why = "skipped: trace is structurally inconsistent";
      rep.checks.push_back(skipped("theorem2_real_right_assembly_links", why));
      rep.checks.push_back(skipped("theorem3_real_pairing_links", why));
      rep.checks.push_back(skipped("theorem4_total_links", why));
      rep.checks.push_back(skipped("theorem5_total_links_by_heap_size", why));
    }
  } else {
    const char* why = "skipped: link and cut records are inconsistent";
    rep.checks.push_back(skipped("lemma1_insertion_meld_links", why));
    rep.checks.push_back(skipped("lemma2_assembly_le_pairing", why));
    rep.checks.push_back(skipped("lemma3_flinks_plus_deletions", why));
    rep.checks.push_back(skipped("theorem1_pairing_links", why));
    rep.checks.push_back(skipped("theorem2_real_right_assembly_links", why));
    rep.checks.push_back(skipped("theorem3_real_pairing_links", why));
    rep.checks.push_back(skipped("theorem4_total_links", why));
    rep.checks.push_back(skipped("theorem5_total_links_by_heap_size", why));
  }

  // Structural consistency.
  rep.checks.push_back(violation_count(
      "link_cut_pairing", stage >= 2 ? 0 : 1,
      stage >= 2 ? "every cut severs a distinct earlier link"
                 : rep.consistency_error));
  rep.checks.push_back(violation_count(
      "structural_replay", stage >= 3 ? 0 : 1,
      stage >= 3 ? "shadow replay accepts every event" : rep.consistency_error));

  if (opts.replay_check) {
    auto mismatch = verify_replay(t);
    rep.checks.push_back(violation_count(
        "replay_identity", mismatch ? 1 : 0,
        mismatch ? *mismatch : "re-execution reproduces the event stream"));
  }

  // Per-deletion link arithmetic, straight off the raw events.
  for (const TraceEvent& ev : t.events) {
    if (!is_removal(ev)) continue;
    DeletionShape s = shape_of(ev);
    if (twopass) {
      std::uint64_t want_pairing = s.children / 2;
      std::uint64_t want_assembly = s.children == 0 ? 0 : (s.children + 1) / 2 - 1;
      s.ok = s.pairing == want_pairing && s.assembly == want_assembly;
    } else {
      s.ok = s.assembly == 0 &&
             s.pairing == (s.children == 0 ? 0 : s.children - 1);
    }
    rep.deletions_checked++;
    if (!s.ok) {
      rep.deletion_violations++;
      if (rep.offending_deletions.size() < opts.max_offenders)
        rep.offending_deletions.push_back(s);
    }
  }
  rep.checks.push_back(violation_count(
      "deletion_link_counts", rep.deletion_violations,
      twopass ? "floor(c/2) pairing and ceil(c/2)-1 assembly links per deletion"
              : "c-1 pairing links and no assembly links per deletion"));

  // Size and mass timelines.
  if (stage >= 3) {
    std::uint64_t mono_bad = 0;
    std::vector<std::uint64_t> last(cls.fates.size(), 0);
    for (const SizeRecord& r : cls.sizes) {
      if (r.size < last[r.item]) mono_bad++;
      last[r.item] = r.size;
    }
    rep.checks.push_back(violation_count(
        "size_monotonicity", mono_bad, "item sizes never shrink"));
    std::uint64_t mass_bad = 0;
    for (const MassRecord& m : cls.masses)
      if (m.parent_size != m.one_plus_rights) mass_bad++;
    rep.checks.push_back(violation_count(
        "mass_equivalence", mass_bad,
        "winner size equals 1 + child size + real right sibling sizes"));
  } else {
    const char* why = "skipped: trace is structurally inconsistent";
    rep.checks.push_back(skipped("size_monotonicity", why));
    rep.checks.push_back(skipped("mass_equivalence", why));
  }

  // Counts table plus a second, independent aggregation route.
  if (stage >= 2) {
    for (const LinkAnnotation& a : anns)
      rep.counts[static_cast<int>(a.ctx)][static_cast<int>(a.fate)][a.real ? 1 : 0]++;
    std::uint64_t table_total = 0;
    std::uint64_t table_ins_meld = 0;
    std::uint64_t table_pairing = 0;
    for (int c = 0; c < 5; ++c)
      for (int f = 0; f < 3; ++f)
        for (int r = 0; r < 2; ++r) {
          table_total += rep.counts[c][f][r];
          if (c <= 1) table_ins_meld += rep.counts[c][f][r];
          if (c == 3) table_pairing += rep.counts[c][f][r];
        }
    std::uint64_t cross_bad = 0;
    if (table_total != rep.total_links) cross_bad++;
    if (static_cast<double>(table_ins_meld) != check_lemma1(anns, t).lhs) cross_bad++;
    if (static_cast<double>(table_pairing) != check_theorem1(anns, t).lhs) cross_bad++;
    rep.checks.push_back(violation_count(
        "counts_crosscheck", cross_bad,
        "context/fate/reality table agrees with the per-check counts"));
  } else {
    rep.checks.push_back(
        skipped("counts_crosscheck", "skipped: link records are inconsistent"));
  }

  // Spot-check of the logarithm inequality the deletion bounds rest on.
  {
    SplitMix64 rng(0x10661);
    std::uint64_t bad = 0;
    for (int i = 0; i < 1000; ++i) {
      double a = static_cast<double>(1 + rng.below(1000000));
      double b = i % 10 == 0 ? a : static_cast<double>(1 + rng.below(1000000));
      if (!check_log_inequality(a, b)) bad++;
    }
    rep.checks.push_back(violation_count(
        "log_inequality_sample", bad,
        "2lg(a+b) >= lg(a)+lg(b)+2 on 1000 sampled pairs"));
  }

  rep.overall = true;
  for (const BoundCheck& c : rep.checks)
    if (c.applicable && !c.pass) rep.overall = false;
  return rep;
}

// -------------------------------------------------------------- reports

std::string report_json(const AuditReport& r) {
  json j;
  j["strategy"] = to_string(r.strategy);
  j["overall"] = r.overall;
  j["consistencyError"] = r.consistency_error;
  j["opsTotal"] = r.ops_total;
  json ops;
  static const OpKind kKinds[] = {OpKind::MakeHeap,  OpKind::Insert,
                                  OpKind::Meld,      OpKind::DecreaseKey,
                                  OpKind::DeleteMin, OpKind::Delete,
                                  OpKind::FindMin};
  for (OpKind k : kKinds)
    ops[to_string(k)] = r.op_counts[static_cast<int>(k)];
  j["opCounts"] = ops;
  j["totalLinks"] = r.total_links;

  json checks = json::array();
  for (const BoundCheck& c : r.checks) {
    json cj;
    cj["name"] = c.name;
    cj["lhs"] = c.lhs;
    cj["rhs"] = c.rhs;
    cj["slack"] = c.slack;
    cj["pass"] = c.pass;
    cj["applicable"] = c.applicable;
    cj["clampedTerms"] = c.clamped_terms;
    cj["detail"] = c.detail;
    checks.push_back(cj);
  }
  j["checks"] = checks;

  json dels;
  dels["checked"] = r.deletions_checked;
  dels["violations"] = r.deletion_violations;
  json offs = json::array();
  for (const DeletionShape& s : r.offending_deletions)
    offs.push_back({{"op", s.op},
                    {"children", s.children},
                    {"pairing", s.pairing},
                    {"assembly", s.assembly}});
  dels["offenders"] = offs;
  j["deletions"] = dels;

  static const LinkContext kCtx[] = {LinkContext::Insertion, LinkContext::Meld,
                                     LinkContext::DecreaseKey,
                                     LinkContext::Pairing, LinkContext::Assembly};
  static const LinkFate kFate[] = {LinkFate::DLink, LinkFate::KLink,
                                   LinkFate::FLink};
  json counts;
  for (LinkContext ctx : kCtx) {
    json by_fate;
    for (LinkFate f : kFate) {
      by_fate[to_string(f)] = {
          {"phantom", r.counts[static_cast<int>(ctx)][static_cast<int>(f)][0]},
          {"real", r.counts[static_cast<int>(ctx)][static_cast<int>(f)][1]}};
    }
    counts[to_string(ctx)] = by_fate;
  }
  j["counts"] = counts;
  return j.dump(2) + "\n";
}

std::string report_csv(const AuditReport& r) {
  std::string out = "name,lhs,rhs,slack,pass\n";
  char buf[96];
  for (const BoundCheck& c : r.checks) {
    out += c.name;
    std::snprintf(buf, sizeof buf, ",%lld,%.6f,%.6f,",
                  static_cast<long long>(std::llround(c.lhs)), c.rhs, c.slack);
    out += buf;
    out += !c.applicable ? "inapplicable" : c.pass ? "pass" : "fail";
    out += '\n';
  }
  return out;
}

}  // namespace pairtrace
