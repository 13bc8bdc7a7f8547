#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pairtrace/trace.hpp"

namespace fs = std::filesystem;
using namespace pairtrace;

namespace {

struct TempDir {
  fs::path dir;
  TempDir() {
    static int n = 0;
    dir = fs::temp_directory_path() /
          ("pairtrace_cli_" + std::to_string(::getpid()) + "_" +
           std::to_string(n++));
    fs::create_directories(dir);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string path(const std::string& name) const {
    return (dir / name).string();
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// Runs the workbench binary; returns its exit code and captures stdout.
int run_cli(const TempDir& t, const std::string& args,
            std::string* out = nullptr) {
  static int n = 0;
  std::string cap = t.path(".capture" + std::to_string(n++));
  std::string cmd =
      "\"" PAIRTRACE_BIN "\" " + args + " > " + cap + " 2>/dev/null";
  int raw = std::system(cmd.c_str());
  if (out) *out = slurp(cap);
  fs::remove(cap);
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

}  // namespace

TEST_CASE("gen, run and audit compose through files") {
  TempDir t;
  std::string wl = t.path("wl.jsonl");
  std::string tr = t.path("tr.jsonl");
  CHECK(run_cli(t, "gen --generator sorting --size 32 --seed 1 --out " + wl) == 0);
  CHECK(fs::exists(wl));
  CHECK(run_cli(t, "run --in " + wl + " --out " + tr) == 0);

  std::string csv;
  CHECK(run_cli(t, "audit --in " + tr + " --format csv", &csv) == 0);
  CHECK(csv.rfind("name,lhs,rhs,slack,pass\n", 0) == 0);
  // Sorting empties the heap, so the flink budget is spent exactly.
  CHECK(csv.find("lemma3_flinks_plus_deletions,32,32.000000,0.000000,pass\n") !=
        std::string::npos);

  std::string rep = t.path("rep.json");
  CHECK(run_cli(t, "audit --in " + tr + " --out " + rep) == 0);
  std::string j = slurp(rep);
  CHECK(j.find("\"overall\": true") != std::string::npos);
  CHECK(j.find("\"strategy\": \"twopass\"") != std::string::npos);
}

TEST_CASE("audit flags a tampered trace") {
  TempDir t;
  std::string tr = t.path("tr.jsonl");
  REQUIRE(run_cli(t, "run --generator sorting --size 16 --seed 2 --out " + tr) == 0);

  Trace trace = deserialize(slurp(tr));
  bool dropped = false;
  for (TraceEvent& ev : trace.events) {
    if (!dropped && !ev.cuts.empty()) {
      ev.cuts.pop_back();
      dropped = true;
    }
  }
  REQUIRE(dropped);
  std::string bad = t.path("bad.jsonl");
  spit(bad, serialize(trace));

  std::string out;
  CHECK(run_cli(t, "audit --in " + bad, &out) == 1);
  CHECK(out.find("\"overall\": false") != std::string::npos);
}

TEST_CASE("missing and malformed inputs exit with the usage code") {
  TempDir t;
  CHECK(run_cli(t, "audit --in " + t.path("absent.jsonl")) == 2);
  CHECK(run_cli(t, "run --in " + t.path("absent.jsonl")) == 2);
  CHECK(run_cli(t, "report --in " + t.path("absent.jsonl")) == 2);

  std::string garbage = t.path("garbage.jsonl");
  spit(garbage, "this is not a trace\n");
  CHECK(run_cli(t, "audit --in " + garbage) == 2);

  CHECK(run_cli(t, "gen --generator bogus") == 2);
  CHECK(run_cli(t, "gen --strategy sideways") == 2);
  CHECK(run_cli(t, "frobnicate") == 2);
  CHECK(run_cli(t, "") == 2);

  // Output path inside a directory that does not exist.
  std::string tr = t.path("tr.jsonl");
  REQUIRE(run_cli(t, "run --generator sorting --size 4 --out " + tr) == 0);
  CHECK(run_cli(t, "audit --in " + tr + " --out " + t.path("nodir/r.json")) == 2);
}

TEST_CASE("gen is deterministic in the seed") {
  TempDir t;
  std::string a = t.path("a.jsonl"), b = t.path("b.jsonl"), c = t.path("c.jsonl");
  std::string flags = "gen --generator random-mixed --size 300 --seed 7 --out ";
  REQUIRE(run_cli(t, flags + a) == 0);
  REQUIRE(run_cli(t, flags + b) == 0);
  CHECK(slurp(a) == slurp(b));
  REQUIRE(run_cli(t, "gen --generator random-mixed --size 300 --seed 8 --out " + c) == 0);
  CHECK(slurp(a) != slurp(c));
}

TEST_CASE("run accepts a file or generates inline") {
  TempDir t;
  std::string wl = t.path("wl.jsonl"), a = t.path("a.jsonl"), b = t.path("b.jsonl");
  std::string flags = "--generator dijkstra-like --size 64 --seed 3";
  REQUIRE(run_cli(t, "gen " + flags + " --out " + wl) == 0);
  REQUIRE(run_cli(t, "run --in " + wl + " --out " + a) == 0);
  REQUIRE(run_cli(t, "run " + flags + " --out " + b) == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("run lets the strategy flag override the workload") {
  TempDir t;
  std::string wl = t.path("wl.jsonl");
  REQUIRE(run_cli(t, "gen --generator sorting --size 8 --seed 1 "
                     "--strategy multipass --out " + wl) == 0);

  std::string kept, forced;
  REQUIRE(run_cli(t, "run --in " + wl, &kept) == 0);
  CHECK(kept.find("multipass") != std::string::npos);
  REQUIRE(run_cli(t, "run --in " + wl + " --strategy twopass", &forced) == 0);
  CHECK(forced.find("multipass") == std::string::npos);

  std::string mp = t.path("mp.jsonl");
  spit(mp, kept);
  std::string csv;
  CHECK(run_cli(t, "audit --in " + mp + " --format csv", &csv) == 0);
  CHECK(csv.find(",inapplicable\n") != std::string::npos);
}

TEST_CASE("diff reports agreement with the reference model") {
  TempDir t;
  std::string out;
  CHECK(run_cli(t, "diff --generator random-mixed --size 400 --seed 2", &out) == 0);
  CHECK(out.rfind("diff: ok, ", 0) == 0);
  CHECK(run_cli(t, "diff --generator meld-heavy --size 50 --seed 4 "
                   "--strategy multipass --drain", &out) == 0);
  CHECK(out.rfind("diff: ok, ", 0) == 0);
}

TEST_CASE("report rewrites the trace with annotations") {
  TempDir t;
  std::string tr = t.path("tr.jsonl"), ann = t.path("ann.jsonl");
  REQUIRE(run_cli(t, "run --generator sorting --size 8 --seed 5 --out " + tr) == 0);
  CHECK(run_cli(t, "report --in " + tr + " --out " + ann) == 0);
  std::string text = slurp(ann);
  CHECK(text.find("\"annotated\":true") != std::string::npos);
  CHECK(text.find("\"fate\":") != std::string::npos);
  CHECK(text.find("\"real\":") != std::string::npos);
  // Annotations are additive: the file still parses as a plain trace.
  Trace back = deserialize(text);
  CHECK(serialize(back) == slurp(tr));
}

TEST_CASE("writes are atomic and leave no temp files") {
  TempDir t;
  std::string wl = t.path("wl.jsonl"), tr = t.path("tr.jsonl");
  REQUIRE(run_cli(t, "gen --generator meld-heavy --size 20 --seed 1 --out " + wl) == 0);
  REQUIRE(run_cli(t, "run --in " + wl + " --out " + tr) == 0);
  REQUIRE(run_cli(t, "audit --in " + tr + " --out " + t.path("rep.json")) == 0);
  REQUIRE(run_cli(t, "report --in " + tr + " --out " + t.path("ann.jsonl")) == 0);
  for (const auto& entry : fs::directory_iterator(t.dir))
    CHECK(entry.path().extension() != ".tmp");
  CHECK(fs::exists(t.path("rep.json")));
  CHECK(fs::exists(t.path("ann.jsonl")));
}

TEST_CASE("help exits cleanly") {
  TempDir t;
  std::string out;
  CHECK(run_cli(t, "--help", &out) == 0);
  CHECK(out.find("gen") != std::string::npos);
  CHECK(run_cli(t, "audit --help") == 0);
}
