// Copyright 2026 The kgnav Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "kgnav/errors.hpp"
#include "kgnav/kg_store.hpp"
#include "support.hpp"

namespace kgnav {
namespace {

using testing::TempDir;
using testing::write_file;

GraphStore two_triples(const TempDir& dir) {
  write_file(dir.file("t.tsv"), "tencent\tfounded_by\tpony_ma\npony_ma\tmember_of\tnpc\n");
  write_file(dir.file("l.tsv"), "tencent\tTencent\npony_ma\tPony Ma\n");
  return load_graph(dir.file("t.tsv"), dir.file("l.tsv"));
}

TEST(GraphStore, LoadsTwoTriples) {
  TempDir dir;
  const auto g = two_triples(dir);
  EXPECT_EQ(g.size(), 2u);
  EXPECT_TRUE(g.contains({EntityId("pony_ma"), RelationId("member_of"), EntityId("npc")}));
}

TEST(GraphStore, EmptyFileGivesEmptyStore) {
  TempDir dir;
  write_file(dir.file("t.tsv"), "");
  EXPECT_EQ(load_graph(dir.file("t.tsv")).size(), 0u);
}

TEST(GraphStore, DuplicateRowsCollapse) {
  TempDir dir;
  write_file(dir.file("t.tsv"), "a\tr\tb\na\tr\tb\r\n# comment\n\n");
  EXPECT_EQ(load_graph(dir.file("t.tsv")).size(), 1u);
}

TEST(GraphStore, MalformedRowsAreListed) {
  TempDir dir;
  write_file(dir.file("t.tsv"), "a\tr\tb\nonly\ttwo\na\tr\tb\textra\nx y\tr\tz\n");
  try {
    load_graph(dir.file("t.tsv"));
    FAIL() << "expected MalformedRowError";
  } catch (const MalformedRowError& e) {
    EXPECT_EQ(e.lines(), (std::vector<size_t>{2, 3, 4}));
  }
}

TEST(GraphStore, MissingFileIsLoadError) {
  EXPECT_THROW(load_graph("/nonexistent/triples.tsv"), LoadError);
}

TEST(GraphStore, RelationsOfListsBothDirections) {
  TempDir dir;
  const auto g = two_triples(dir);
  EXPECT_EQ(g.relations_of(EntityId("pony_ma")),
            (std::vector<RelationRef>{{RelationId("founded_by"), Direction::kIncoming},
                                      {RelationId("member_of"), Direction::kOutgoing}}));
  EXPECT_EQ(g.relations_of(EntityId("npc")),
            (std::vector<RelationRef>{{RelationId("member_of"), Direction::kIncoming}}));
  EXPECT_TRUE(g.relations_of(EntityId("unknown_id")).empty());
}

TEST(GraphStore, NeighborsFollowDirection) {
  TempDir dir;
  const auto g = two_triples(dir);
  EXPECT_EQ(g.neighbors(EntityId("tencent"), RelationId("founded_by"), Direction::kOutgoing),
            std::vector<EntityId>{EntityId("pony_ma")});
  EXPECT_EQ(g.neighbors(EntityId("pony_ma"), RelationId("founded_by"), Direction::kIncoming),
            std::vector<EntityId>{EntityId("tencent")});
  EXPECT_TRUE(
      g.neighbors(EntityId("tencent"), RelationId("member_of"), Direction::kOutgoing).empty());
}

TEST(GraphStore, ResolveLabelIsExactAfterNormalizing) {
  TempDir dir;
  const auto g = two_triples(dir);
  EXPECT_EQ(g.resolve_label("Tencent"), std::vector<EntityId>{EntityId("tencent")});
  EXPECT_EQ(g.resolve_label("  tencent  "), std::vector<EntityId>{EntityId("tencent")});
  EXPECT_TRUE(g.resolve_label("Tenc").empty());
}

TEST(GraphStore, MissingLabelFallsBackToId) {
  TempDir dir;
  const auto g = two_triples(dir);
  EXPECT_EQ(g.label(EntityId("npc")), "npc");
  EXPECT_EQ(g.resolve_label("NPC"), std::vector<EntityId>{EntityId("npc")});
}

// Every stored edge is visible from both of its endpoints, and nothing else is.
TEST(GraphStore, NeighborQueriesReturnExactlyStoredEdges) {
  testing::Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto world = testing::random_world(rng);
    const auto& g = world.graph;
    size_t seen = 0;
    for (const auto& e : world.entities) {
      for (const auto& ref : g.relations_of(e)) {
        for (const auto& n : g.neighbors(e, ref.relation, ref.direction)) {
          const Triple t = ref.direction == Direction::kOutgoing ? Triple{e, ref.relation, n}
                                                                 : Triple{n, ref.relation, e};
          ASSERT_TRUE(g.contains(t));
          ++seen;
        }
      }
    }
    EXPECT_EQ(seen, 2 * g.size());
  }
}

TEST(Direction, ParsesShortAndLongNames) {
  EXPECT_EQ(parse_direction("out"), Direction::kOutgoing);
  EXPECT_EQ(parse_direction("incoming"), Direction::kIncoming);
  EXPECT_THROW(parse_direction("sideways"), ParameterError);
}

}  // namespace
}  // namespace kgnav
