#include <doctest.h>

#include <string>
#include <vector>

#include "pairtrace/oracle.hpp"
#include "pairtrace/workload.hpp"

using namespace pairtrace;

TEST_CASE("reference model mirrors the id discipline") {
  RefModel m;
  HeapId h1 = m.make_heap();
  HeapId h2 = m.make_heap();
  CHECK(h1 == 0);
  CHECK(h2 == 1);
  ItemId a = m.insert(h1, 5);
  ItemId b = m.insert(h2, 3);
  CHECK(a == 0);
  CHECK(b == 1);
  HeapId melded = m.meld(h1, h2);
  CHECK(melded == 2);
  CHECK(!m.is_live(h1));
  CHECK(!m.is_live(h2));
  CHECK(m.size(melded) == 2);
  CHECK(m.find_min(melded) == std::pair{b, std::int64_t{3}});
  CHECK(m.heap_of(a) == melded);

  CHECK_THROWS_AS(m.insert(h1, 9), Error);
  CHECK_THROWS_AS(m.meld(melded, melded), Error);
  CHECK_THROWS_AS(m.decrease_key(melded, a, 50), Error);
}

TEST_CASE("reference model ties break toward the smaller item id") {
  RefModel m;
  HeapId h = m.make_heap();
  ItemId a = m.insert(h, 7);
  ItemId b = m.insert(h, 7);
  CHECK(!m.min_unique(h));
  CHECK(m.find_min(h) == std::pair{a, std::int64_t{7}});
  CHECK(m.delete_min(h) == a);
  CHECK(m.min_unique(h));
  CHECK(m.delete_min(h) == b);
  CHECK(!m.delete_min(h).has_value());
  CHECK(!m.min_unique(h));
}

TEST_CASE("reference model decrease_key and remove") {
  RefModel m;
  HeapId h = m.make_heap();
  ItemId a = m.insert(h, 10);
  ItemId b = m.insert(h, 20);
  m.decrease_key(h, b, 1);
  CHECK(m.find_min(h) == std::pair{b, std::int64_t{1}});
  CHECK(m.key_of(b) == 1);
  m.remove(h, b);
  CHECK(!m.item_live(b));
  CHECK(m.find_min(h) == std::pair{a, std::int64_t{10}});
  CHECK_THROWS_AS(m.remove(h, b), Error);
}

TEST_CASE("diff_observations flags removal mismatches") {
  Observation ref;
  ref.op = 3;
  ref.removed = {2, 40};
  ref.removed_unique = true;
  ref.min = {5, 50};

  Observation act = ref;
  SUBCASE("identical streams agree") {
    DivergenceReport d = diff_observations({ref}, {act});
    CHECK(d.ok);
    CHECK(d.ops_executed == 1);
  }
  SUBCASE("wrong removed key") {
    act.removed = {2, 41};
    DivergenceReport d = diff_observations({ref}, {act});
    CHECK(!d.ok);
    CHECK(d.op == 3);
    CHECK(d.expected_key == 40);
    CHECK(d.actual_key == 41);
  }
  SUBCASE("wrong removed item under a unique minimum") {
    act.removed = {9, 40};
    DivergenceReport d = diff_observations({ref}, {act});
    CHECK(!d.ok);
  }
  SUBCASE("missing removal") {
    act.removed.reset();
    DivergenceReport d = diff_observations({ref}, {act});
    CHECK(!d.ok);
  }
  SUBCASE("wrong minimum key") {
    act.min = {5, 51};
    DivergenceReport d = diff_observations({ref}, {act});
    CHECK(!d.ok);
  }
  SUBCASE("different item on a tied minimum is accepted") {
    ref.min_unique = false;
    act = ref;
    act.min = {8, 50};  // same key, other item
    DivergenceReport d = diff_observations({ref}, {act});
    CHECK(d.ok);
  }
  SUBCASE("different removed item on a tied removal is accepted") {
    ref.removed_unique = false;
    act = ref;
    act.removed = {7, 40};
    DivergenceReport d = diff_observations({ref}, {act});
    CHECK(d.ok);
  }
}

TEST_CASE("diff_observations reports stream length mismatches") {
  Observation a;
  a.op = 0;
  DivergenceReport d = diff_observations({a}, {});
  CHECK(!d.ok);
}

TEST_CASE("forest and reference agree on every generator") {
  for (GeneratorKind g : {GeneratorKind::Sorting, GeneratorKind::RandomMixed,
                          GeneratorKind::DijkstraLike, GeneratorKind::MeldHeavy}) {
    for (Strategy s : {Strategy::TwoPass, Strategy::Multipass}) {
      CAPTURE(to_string(g));
      CAPTURE(to_string(s));
      WorkloadSpec spec;
      spec.generator = g;
      spec.size = 300;
      spec.seed = 11;
      spec.strategy = s;
      spec.drain_tail = true;
      DivergenceReport d = run_both(generate(spec));
      CHECK(d.ok);
      if (!d.ok) MESSAGE(d.message);
    }
  }
}

TEST_CASE("observation streams carry per-op answers") {
  WorkloadSpec spec;
  spec.generator = GeneratorKind::Sorting;
  spec.size = 8;
  spec.seed = 2;
  Workload wl = generate(spec);
  std::vector<Observation> ref = observe_reference(wl);
  std::vector<Observation> act = observe_forest(wl, Strategy::TwoPass);
  REQUIRE(ref.size() == wl.ops.size());
  REQUIRE(act.size() == wl.ops.size());

  // The sorting workload drains fully: the removals, in order, are the
  // sorted keys 0..7.
  std::vector<std::int64_t> removed;
  for (const Observation& o : act)
    if (o.removed) removed.push_back(o.removed->second);
  CHECK(removed == std::vector<std::int64_t>{0, 1, 2, 3, 4, 5, 6, 7});
  CHECK(diff_observations(ref, act).ok);
}
