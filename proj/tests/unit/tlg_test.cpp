#include <gtest/gtest.h>

#include <algorithm>

#include "adalogn/tlg.hpp"
#include "corpus.hpp"

namespace adalogn {
namespace {

Tlg chain(std::size_t n) {
  Tlg g;
  for (std::size_t i = 0; i < n; ++i) g.add_node("N" + std::to_string(i), Part::context);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    g.add_edge(static_cast<NodeId>(i), Relation::impl, static_cast<NodeId>(i + 1));
  }
  return g;
}

bool has_kind(const std::vector<Violation>& v, Violation::Kind k) {
  return std::any_of(v.begin(), v.end(), [k](const Violation& x) { return x.kind == k; });
}

TEST(Tlg, ImplInsertsRevPair) {
  Tlg g = chain(2);
  EXPECT_EQ(g.edges(), (std::set<Edge>{{0, Relation::impl, 1}, {1, Relation::rev, 0}}));
}

TEST(Tlg, RevInsertsImplPair) {
  Tlg g;
  g.add_node("a", Part::context);
  g.add_node("b", Part::context);
  g.add_edge(1, Relation::rev, 0);
  EXPECT_TRUE(g.has_edge(0, Relation::impl, 1));
}

TEST(Tlg, SymmetricRelationsAreMirrored) {
  for (Relation r : {Relation::conj, Relation::disj, Relation::neg, Relation::unk}) {
    Tlg g;
    g.add_node("a", Part::context);
    g.add_node("b", Part::context);
    g.add_edge(0, r, 1);
    EXPECT_EQ(g.edges(), (std::set<Edge>{{0, r, 1}, {1, r, 0}})) << to_string(r);
  }
}

TEST(Tlg, AddEdgeIsIdempotent) {
  Tlg g = chain(2);
  const auto before = g.edges();
  EXPECT_FALSE(g.add_edge(0, Relation::impl, 1));
  EXPECT_EQ(g.edges(), before);
}

TEST(Tlg, AddEdgeRejectsSelfLoopsAndUnknownIds) {
  Tlg g = chain(2);
  EXPECT_THROW(g.add_edge(0, Relation::conj, 0), TlgError);
  EXPECT_THROW(g.add_edge(0, Relation::conj, 7), TlgError);
}

TEST(Tlg, MultipleRelationsBetweenOnePair) {
  Tlg g = chain(2);
  g.add_edge(0, Relation::neg, 1);
  EXPECT_TRUE(validate(g).empty());
  EXPECT_EQ(g.edges().size(), 4u);
}

TEST(Tlg, NodesKeepContextBeforeOption) {
  Tlg g;
  g.add_node("o", Part::option);
  g.add_node("c", Part::context);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g.nodes()[0].part, Part::context);
  EXPECT_EQ(g.context_size(), 1u);
  EXPECT_TRUE(validate(g).empty());
}

TEST(Validate, WellFormedChainIsClean) { EXPECT_TRUE(validate(chain(4)).empty()); }

TEST(Validate, MissingRevPair) {
  const Tlg g = Tlg::unchecked({{0, "a", Part::context, {}, false}, {1, "b", Part::context, {}, false}},
                               {{0, Relation::impl, 1}});
  const auto v = validate(g);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, Violation::Kind::missing_rev_pair);
}

TEST(Validate, DanglingNegOf) {
  const Tlg g = Tlg::unchecked({{0, "not d", Part::context, NodeId{3}, false},
                                {1, "b", Part::context, {}, false},
                                {2, "c", Part::context, {}, false},
                                {3, "d", Part::context, {}, false}},
                               {{0, Relation::unk, 1}, {1, Relation::unk, 0}});
  const auto v = validate(g);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, Violation::Kind::dangling_neg_of);
}

TEST(Validate, ReportsStructuralProblems) {
  const Tlg g = Tlg::unchecked({{0, "a", Part::option, {}, false}, {0, "b", Part::context, {}, false}},
                               {{0, Relation::conj, 0}, {0, Relation::unk, 5}});
  const auto v = validate(g);
  EXPECT_TRUE(has_kind(v, Violation::Kind::duplicate_id));
  EXPECT_TRUE(has_kind(v, Violation::Kind::part_order));
  EXPECT_TRUE(has_kind(v, Violation::Kind::self_loop));
  EXPECT_TRUE(has_kind(v, Violation::Kind::dangling_endpoint));
}

TEST(Validate, MissingMirror) {
  const Tlg g = Tlg::unchecked({{0, "a", Part::context, {}, false}, {1, "b", Part::context, {}, false}},
                               {{0, Relation::conj, 1}});
  const auto v = validate(g);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, Violation::Kind::missing_mirror);
}

TEST(Serialize, EmptyGraphRoundTrips) {
  const std::string doc = serialize(Tlg{});
  EXPECT_NE(doc.find("\"nodes\""), std::string::npos);
  EXPECT_EQ(deserialize(doc), Tlg{});
}

TEST(Serialize, ChainRoundTripsExactly) {
  Tlg g = chain(3);
  g.add_node("opt", Part::option);
  g.add_node("not N0", Part::context, NodeId{0});
  g.add_edge(0, Relation::neg, 4);
  g.add_edge(2, Relation::unk, 3);
  const std::string doc = serialize(g);
  const Tlg back = deserialize(doc);
  EXPECT_EQ(back, g);
  EXPECT_EQ(serialize(back), doc);
}

TEST(Serialize, BrokenPairingIsRejected) {
  const std::string doc = R"({"nodes":[{"id":0,"text":"a","part":"context","neg_of":null},
    {"id":1,"text":"b","part":"context","neg_of":null}],
    "edges":[{"src":0,"rel":"impl","dst":1}]})";
  try {
    (void)deserialize(doc);
    FAIL() << "expected TlgError";
  } catch (const TlgError& e) {
    EXPECT_NE(std::string(e.what()).find("missing rev pair"), std::string::npos) << e.what();
  }
}

TEST(Serialize, MalformedDocumentIsRejected) {
  EXPECT_THROW((void)deserialize("{\"nodes\": [}"), Error);
  EXPECT_THROW((void)deserialize(R"({"nodes":[{"id":0,"text":"a","part":"middle","neg_of":null}],"edges":[]})"),
               Error);
}

TEST(Serialize, RandomGraphsRoundTrip) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Tlg g = testing::random_impl_neg_graph(seed);
    EXPECT_EQ(deserialize(serialize(g)), g) << "seed " << seed;
  }
}

TEST(Dot, ImplPairRendersOneArrow) {
  const std::string dot = to_dot(chain(2));
  EXPECT_NE(dot.find("n0 -> n1 [label=\"impl\"]"), std::string::npos) << dot;
  EXPECT_EQ(dot.find("rev"), std::string::npos);
  EXPECT_EQ(std::count(dot.begin(), dot.end(), '>'), 1);
}

TEST(Dot, SymmetricPairRendersOneUndirectedEdge) {
  Tlg g;
  g.add_node("a", Part::context);
  g.add_node("b", Part::option);
  g.add_edge(0, Relation::conj, 1);
  const std::string dot = to_dot(g);
  EXPECT_NE(dot.find("n0 -> n1 [label=\"conj\", dir=none]"), std::string::npos) << dot;
  EXPECT_EQ(dot.find("n1 -> n0"), std::string::npos);
}

TEST(Dot, EmptyGraphIsHeaderAndFooter) { EXPECT_EQ(to_dot(Tlg{}, "g"), "digraph g {\n}\n"); }

TEST(TlgProperty, RandomEditsKeepGraphValid) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    Tlg g;
    const std::size_t n = 2 + rng.index(7);
    for (std::size_t i = 0; i < n; ++i) {
      g.add_node("v" + std::to_string(i), rng.index(3) == 0 ? Part::option : Part::context);
    }
    for (int k = 0; k < 20; ++k) {
      const auto a = static_cast<NodeId>(rng.index(n));
      const auto b = static_cast<NodeId>(rng.index(n));
      if (a == b) continue;
      g.add_edge(a, kAllRelations[rng.index(kAllRelations.size())], b);
      ASSERT_TRUE(validate(g).empty()) << "seed " << seed;
    }
    std::size_t impl = 0, rev = 0;
    for (const Edge& e : g.edges()) {
      impl += e.rel == Relation::impl;
      rev += e.rel == Relation::rev;
      if (is_symmetric(e.rel)) EXPECT_TRUE(g.has_edge(e.dst, e.rel, e.src));
    }
    EXPECT_EQ(impl, rev);
  }
}

TEST(Connectivity, WeaklyConnected) {
  EXPECT_TRUE(weakly_connected(Tlg{}));
  EXPECT_TRUE(weakly_connected(chain(4)));
  Tlg g = chain(2);
  g.add_node("island", Part::context);
  EXPECT_FALSE(weakly_connected(g));
}

}  // namespace
}  // namespace adalogn
