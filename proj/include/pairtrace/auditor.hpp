#pragma once

#include <string>
#include <vector>

#include "pairtrace/classifier.hpp"
#include "pairtrace/trace.hpp"

namespace pairtrace {

inline constexpr double kLgE = 1.4426950408889634;  // log2(e)
inline constexpr double kBoundTolerance = 1e-6;

/// One verified inequality. lhs is always an exact integer count cast to
/// double; rhs may involve logarithms. pass means lhs <= rhs + tolerance.
/// Checks that only make sense for one strategy (the assembly lemma and
/// the amortized bounds, which analyse two-pass deletions) are marked
/// inapplicable on traces of the other strategy and excluded from the
/// overall verdict.
struct BoundCheck {
  std::string name;
  double lhs = 0;
  double rhs = 0;
  double slack = 0;
  bool pass = true;
  bool applicable = true;
  std::uint64_t clamped_terms = 0;  // rhs terms whose heap had under 4 temporaries
  std::string detail;
};

/// Link arithmetic of a single deletion: how many children were cut and
/// how many pairing and assembly links recombined them.
struct DeletionShape {
  std::uint64_t op = 0;
  std::uint64_t children = 0;
  std::uint64_t pairing = 0;
  std::uint64_t assembly = 0;
  bool ok = true;
};

struct AuditReport {
  Strategy strategy = Strategy::TwoPass;
  bool overall = false;
  std::string consistency_error;  // first structural failure, empty when clean
  std::vector<BoundCheck> checks;
  std::uint64_t deletions_checked = 0;
  std::uint64_t deletion_violations = 0;
  std::vector<DeletionShape> offending_deletions;  // capped sample
  // links by context x fate x reality (reality: 0 phantom, 1 real)
  std::uint64_t counts[5][3][2] = {};
  std::uint64_t total_links = 0;
  std::uint64_t op_counts[7] = {};  // by OpKind
  std::uint64_t ops_total = 0;
};

// Individual bound checks. All counting is done with plain scans over the
// inputs so each lhs is reproducible by hand.

/// Links made by insert and meld never exceed the number of insertions.
BoundCheck check_lemma1(const std::vector<LinkAnnotation>& links, const Trace& t);

/// Per two-pass deletion, assembly links never exceed pairing links.
/// Appends one shape per deletion to `shapes` when non-null.
BoundCheck check_lemma2(const Trace& t, std::vector<DeletionShape>* shapes);

/// Final links plus completed removals never exceed insertions.
BoundCheck check_lemma3(const std::vector<LinkAnnotation>& links, const Trace& t);

/// Pairing links <= 4/insert + 3/decrease-key + 2/real-right-assembly
/// + 2/real-pairing.
BoundCheck check_theorem1(const std::vector<LinkAnnotation>& links, const Trace& t);

/// Real right assembly links <= lg(n)/2 per decrease-key + lg(n) per
/// deletion, n clamped to at least 4.
BoundCheck check_theorem2(const std::vector<LinkAnnotation>& links,
                          const std::vector<OpContext>& contexts);

/// Real pairing links <= lg(n) per decrease-key + (3/2)lg(n) + lg(e)/2
/// per deletion.
BoundCheck check_theorem3(const std::vector<LinkAnnotation>& links,
                          const std::vector<OpContext>& contexts);

/// All links <= 9/insert + 6lg(n)+7 per decrease-key + 10lg(n) + 2lg(e)
/// per deletion.
BoundCheck check_theorem4(const std::vector<LinkAnnotation>& links,
                          const std::vector<OpContext>& contexts);

/// All links <= lg(n)+1 per insert + lg(n) per meld + lg(n)+3 per
/// decrease-key + 2lg(n) per deletion.
BoundCheck check_theorem5(const std::vector<LinkAnnotation>& links,
                          const std::vector<OpContext>& contexts);

/// 2 lg(a+b) >= lg(a) + lg(b) + 2 for all positive a, b; the step behind
/// the per-deletion bounds. Exact equality at a == b.
bool check_log_inequality(double a, double b);

struct AuditOptions {
  bool replay_check = true;       // re-execute and compare event streams
  std::uint64_t max_offenders = 8;
};

/// Runs every consistency and bound check against one trace. Structural
/// inconsistencies never throw; they fail the corresponding check and the
/// overall verdict.
AuditReport audit_trace(const Trace& t, const AuditOptions& opts = {});

std::string report_json(const AuditReport& r);
std::string report_csv(const AuditReport& r);

}  // namespace pairtrace
