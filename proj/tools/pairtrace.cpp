// Command line workbench. Subcommands compose through files:
//
//   pairtrace gen --generator sorting --size 1024 --seed 3 --out wl.jsonl
//   pairtrace run --in wl.jsonl --out trace.jsonl
//   pairtrace audit --in trace.jsonl --format json
//
// Exit codes: 0 success/pass, 1 audit or diff failure, 2 usage or IO error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pairtrace/auditor.hpp"
#include "pairtrace/classifier.hpp"
#include "pairtrace/oracle.hpp"
#include "pairtrace/workload.hpp"

namespace {

using namespace pairtrace;

int io_error(const std::string& msg) {
  std::cerr << "pairtrace: " << msg << '\n';
  return 2;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

// Writes through a sibling temp file so readers never see a torn file.
bool write_atomic(const std::string& path, const std::string& data) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out << data;
    out.flush();
    if (!out) return false;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    return false;
  }
  return true;
}

int emit(const std::string& out_path, const std::string& data) {
  if (out_path.empty()) {
    std::cout << data;
    return 0;
  }
  if (!write_atomic(out_path, data)) return io_error("cannot write " + out_path);
  return 0;
}

struct GenFlags {
  std::string generator = "random-mixed";
  std::uint64_t size = 1000;
  std::uint64_t seed = 0;
  std::string strategy = "twopass";
  bool drain = false;
};

void add_gen_flags(CLI::App* cmd, GenFlags& g) {
  cmd->add_option("--generator", g.generator, "Workload shape")
      ->check(CLI::IsMember(
          {"sorting", "random-mixed", "dijkstra-like", "meld-heavy"}));
  cmd->add_option("--size", g.size,
                  "Item count (operation count for random-mixed)");
  cmd->add_option("--seed", g.seed, "Generator seed");
  cmd->add_option("--strategy", g.strategy, "Delete-min strategy")
      ->check(CLI::IsMember({"twopass", "multipass"}));
  cmd->add_flag("--drain", g.drain,
                "Append delete_min-until-empty to every live heap");
}

WorkloadSpec spec_from(const GenFlags& g) {
  WorkloadSpec spec;
  spec.generator = generator_from_string(g.generator);
  spec.size = g.size;
  spec.seed = g.seed;
  spec.strategy = strategy_from_string(g.strategy);
  spec.drain_tail = g.drain;
  return spec;
}

// Fills wl from --in when given, else from the generator flags.
// Returns -1 on success, an exit code on failure.
int load_workload(const std::string& in_path, const GenFlags& g, bool have_in,
                  Workload& wl) {
  try {
    if (have_in) {
      std::string text;
      if (!read_file(in_path, text)) return io_error("cannot read " + in_path);
      wl = deserialize_workload(text);
    } else {
      wl = generate(spec_from(g));
    }
  } catch (const Error& e) {
    return io_error(e.what());
  }
  return -1;
}

int load_trace(const std::string& in_path, Trace& t) {
  std::string text;
  if (!read_file(in_path, text)) return io_error("cannot read " + in_path);
  try {
    t = deserialize(text);
  } catch (const Error& e) {
    return io_error(e.what());
  }
  return -1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pairing heap trace workbench: generate, run, audit"};
  app.require_subcommand(1);

  auto* gen_cmd = app.add_subcommand("gen", "Generate a deterministic workload");
  GenFlags gen_flags;
  std::string gen_out;
  add_gen_flags(gen_cmd, gen_flags);
  gen_cmd->add_option("--out", gen_out, "Output path (default stdout)");

  auto* run_cmd =
      app.add_subcommand("run", "Execute a workload and record its trace");
  GenFlags run_flags;
  std::string run_in, run_out;
  add_gen_flags(run_cmd, run_flags);
  run_cmd->add_option("--in", run_in,
                      "Workload file (otherwise generated from the flags)");
  run_cmd->add_option("--out", run_out, "Output path (default stdout)");

  auto* audit_cmd =
      app.add_subcommand("audit", "Check a trace against the link-count bounds");
  std::string audit_in, audit_out, audit_format = "json";
  bool no_replay = false;
  audit_cmd->add_option("--in", audit_in, "Trace file")->required();
  audit_cmd->add_option("--format", audit_format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));
  audit_cmd->add_option("--out", audit_out, "Report path (default stdout)");
  audit_cmd->add_flag("--no-replay", no_replay,
                      "Skip the re-execution identity check");

  auto* diff_cmd = app.add_subcommand(
      "diff", "Compare heap behavior against a sorted-set reference");
  GenFlags diff_flags;
  std::string diff_in;
  add_gen_flags(diff_cmd, diff_flags);
  diff_cmd->add_option("--in", diff_in,
                       "Workload file (otherwise generated from the flags)");

  auto* report_cmd = app.add_subcommand(
      "report", "Rewrite a trace with link fate and reality annotations");
  std::string report_in, report_out;
  report_cmd->add_option("--in", report_in, "Trace file")->required();
  report_cmd->add_option("--out", report_out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (gen_cmd->parsed()) {
    Workload wl;
    try {
      wl = generate(spec_from(gen_flags));
    } catch (const Error& e) {
      return io_error(e.what());
    }
    return emit(gen_out, serialize_workload(wl));
  }

  if (run_cmd->parsed()) {
    Workload wl;
    int rc = load_workload(run_in, run_flags, run_cmd->count("--in") > 0, wl);
    if (rc >= 0) return rc;
    if (run_cmd->count("--strategy") > 0)
      wl.spec.strategy = strategy_from_string(run_flags.strategy);
    Trace t;
    try {
      t = run(wl);
    } catch (const Error& e) {
      return io_error(e.what());
    }
    return emit(run_out, serialize(t));
  }

  if (audit_cmd->parsed()) {
    Trace t;
    int rc = load_trace(audit_in, t);
    if (rc >= 0) return rc;
    AuditOptions opts;
    opts.replay_check = !no_replay;
    AuditReport rep = audit_trace(t, opts);
    rc = emit(audit_out, audit_format == "csv" ? report_csv(rep)
                                               : report_json(rep));
    if (rc != 0) return rc;
    std::uint64_t applicable = 0, passed = 0;
    for (const BoundCheck& c : rep.checks) {
      if (!c.applicable) continue;
      applicable++;
      if (c.pass) passed++;
    }
    std::cerr << "audit: " << (rep.overall ? "pass" : "fail") << " (" << passed
              << "/" << applicable << " applicable checks)\n";
    return rep.overall ? 0 : 1;
  }

  if (diff_cmd->parsed()) {
    Workload wl;
    int rc = load_workload(diff_in, diff_flags, diff_cmd->count("--in") > 0, wl);
    if (rc >= 0) return rc;
    if (diff_cmd->count("--strategy") > 0)
      wl.spec.strategy = strategy_from_string(diff_flags.strategy);
    DivergenceReport rep = run_both(wl);
    if (rep.ok) {
      std::cout << "diff: ok, " << rep.ops_executed << " operations agree\n";
      return 0;
    }
    std::cout << "diff: divergence at op " << rep.op << ": " << rep.message
              << '\n';
    return 1;
  }

  if (report_cmd->parsed()) {
    Trace t;
    int rc = load_trace(report_in, t);
    if (rc >= 0) return rc;
    Classification cls;
    try {
      cls = classify(t);
    } catch (const Error& e) {
      std::cerr << "pairtrace: " << e.what() << '\n';
      return 1;
    }
    return emit(report_out, serialize_annotated(t, cls));
  }

  return 2;
}
