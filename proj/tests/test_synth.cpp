#include <cmath>

#include "doctest.h"
#include "dynppr/errors.hpp"
#include "dynppr/synth.hpp"

using namespace dynppr;

namespace {

void replay(const GeneratedStream& s) {
  Graph g;
  for (std::size_t t = 0; t < s.batches.size(); ++t) {
    for (const EdgeEvent& ev : s.batches[t]) CHECK(ev.timestamp == static_cast<std::int64_t>(t));
    g.apply_events(s.batches[t]);
  }
}

}  // namespace

TEST_CASE("batch size 0 gives empty batches") {
  StreamSpec spec;
  spec.batch_size = 0;
  spec.batches = 4;
  const auto s = generate(spec);
  REQUIRE(s.batches.size() == 4);
  for (const auto& b : s.batches) CHECK(b.empty());
}

TEST_CASE("no deletions means monotone growth") {
  StreamSpec spec;
  spec.seed = 3;
  const auto s = generate(spec);
  Graph g;
  std::size_t m = 0;
  for (const auto& b : s.batches) {
    g.apply_events(b);
    CHECK(g.edge_count() >= m);
    m = g.edge_count();
  }
  CHECK(m == spec.batches * spec.batch_size);
  CHECK(g.node_count() <= spec.nodes);
}

TEST_CASE("deletion counts per batch") {
  StreamSpec spec;
  spec.deletion_fraction = 0.3;
  spec.seed = 1;
  const auto s = generate(spec);
  for (std::size_t t = 0; t < s.batches.size(); ++t) {
    std::size_t dels = 0;
    for (const auto& ev : s.batches[t]) dels += ev.op == EdgeOp::kDelete;
    CHECK(dels == 15);
    CHECK(s.batches[t].size() == spec.batch_size);
  }
}

TEST_CASE("generator is deterministic under the seed") {
  for (auto gen : {Generator::kErdosRenyiGrowth, Generator::kPreferentialAttachment, Generator::kShockInjection}) {
    StreamSpec spec;
    spec.generator = gen;
    spec.seed = 77;
    spec.deletion_fraction = 0.1;
    const auto a = generate(spec);
    const auto b = generate(spec);
    CHECK(a.batches == b.batches);
    spec.seed = 78;
    CHECK(generate(spec).batches != a.batches);
  }
}

TEST_CASE("property: 1000 seeds replay without invalid events") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    StreamSpec spec;
    spec.generator = static_cast<Generator>(seed % 3);
    spec.nodes = 60;
    spec.batches = 6;
    spec.batch_size = 25;
    spec.deletion_fraction = static_cast<double>(seed % 5) / 10.0;
    spec.seed = seed;
    replay(generate(spec));
  }
}

TEST_CASE("shock multiplies the target degree in the shock batch") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    StreamSpec spec;
    spec.generator = Generator::kShockInjection;
    spec.seed = seed;
    spec.nodes = 200;
    spec.batch_size = 100;
    spec.shock.factor = 3.0;
    const auto s = generate(spec);
    REQUIRE(s.shocked_node.has_value());
    CHECK(s.shock_batch == 5);
    const NodeId x = *s.shocked_node;
    Graph g;
    for (std::size_t t = 0; t < s.shock_batch; ++t) g.apply_events(s.batches[t]);
    const double before = g.degree(x);
    std::size_t removed = 0, added = 0;
    for (const auto& ev : s.batches[s.shock_batch]) {
      if (ev.u != x && ev.v != x) continue;
      (ev.op == EdgeOp::kDelete ? removed : added)++;
    }
    g.apply_events(s.batches[s.shock_batch]);
    CHECK(g.degree(x) == std::round(3.0 * before));
    CHECK(removed == static_cast<std::size_t>(std::llround(0.5 * before)));
    CHECK(added == removed + static_cast<std::size_t>(g.degree(x) - before));
  }
}

TEST_CASE("infeasible specs") {
  StreamSpec spec;
  spec.deletion_fraction = 1.0;
  CHECK_THROWS_AS(generate(spec), Error);
  spec.deletion_fraction = 0.0;
  spec.nodes = 1;
  CHECK_THROWS_AS(generate(spec), Error);

  StreamSpec dense;
  dense.nodes = 5;
  dense.batches = 1;
  dense.batch_size = 11;  // K5 has 10 edges
  try {
    generate(dense);
    FAIL("expected InfeasibleSpec");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInfeasibleSpec);
  }

  StreamSpec shock;
  shock.generator = Generator::kShockInjection;
  shock.shock.batch = 50;
  CHECK_THROWS_AS(generate(shock), Error);
  shock.shock.batch = 0;
  shock.shock.factor = 0.5;
  CHECK_THROWS_AS(generate(shock), Error);
}
