#include <gtest/gtest.h>

#include "tsmin/error.hpp"
#include "tsmin/tree.hpp"

using namespace tsmin;

namespace {

// MethodDeclaration(f) -> Block -> [ExpressionStatement -> SimpleName(a), ReturnStatement]
AstTree sample() {
  TreeBuilder b;
  auto root = b.add_root({NodeKind::MethodDeclaration, "f"});
  auto block = b.add_child(root, NodeKind::Block);
  auto stmt = b.add_child(block, NodeKind::ExpressionStatement);
  b.add_child(block, NodeKind::ReturnStatement);
  b.add_child(stmt, {NodeKind::SimpleName, "a"});
  return b.build();
}

ErrorKind kind_of(std::string_view doc) {
  try {
    deserialize(doc);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Undefined;
}

}  // namespace

TEST(Tree, BuilderRenumbersIntoPreorder) {
  AstTree t = sample();
  ASSERT_EQ(t.size(), 5u);
  EXPECT_EQ(t.label(2).kind, NodeKind::ExpressionStatement);
  EXPECT_EQ(t.label(3), (NodeLabel{NodeKind::SimpleName, "a"}));
  EXPECT_EQ(t.label(4).kind, NodeKind::ReturnStatement);
  EXPECT_EQ(t.parent(3), 2);
  EXPECT_EQ(t.subtree_size(0), 5u);
  EXPECT_EQ(t.subtree_size(1), 4u);
  EXPECT_EQ(t.postorder(), (std::vector<NodeIndex>{3, 2, 4, 1, 0}));
  EXPECT_EQ(t.preorder(), (std::vector<NodeIndex>{0, 1, 2, 3, 4}));
}

TEST(Tree, SerializeIsByteStable) {
  std::string s = serialize(sample());
  EXPECT_EQ(s,
            "{\"format\":\"tsmin-ast\",\"version\":1,\"size\":5,\"nodes\":["
            "{\"kind\":\"MethodDeclaration\",\"text\":\"f\",\"children\":[1]},"
            "{\"kind\":\"Block\",\"children\":[2,4]},"
            "{\"kind\":\"ExpressionStatement\",\"children\":[3]},"
            "{\"kind\":\"SimpleName\",\"text\":\"a\",\"children\":[]},"
            "{\"kind\":\"ReturnStatement\",\"children\":[]}]}\n");
  EXPECT_EQ(serialize(deserialize(s)), s);
}

TEST(Tree, RoundTripKeepsDigest) {
  AstTree t = sample();
  AstTree u = deserialize(serialize(t));
  EXPECT_EQ(t, u);
  EXPECT_EQ(t.digest(), u.digest());
  EXPECT_EQ(content_hash(t), t.digest());
}

TEST(Tree, DigestDependsOnLabelsAndOrder) {
  TreeBuilder a;
  auto r = a.add_root(NodeKind::Block);
  a.add_child(r, NodeKind::BreakStatement);
  a.add_child(r, NodeKind::ContinueStatement);
  TreeBuilder b;
  auto r2 = b.add_root(NodeKind::Block);
  b.add_child(r2, NodeKind::ContinueStatement);
  b.add_child(r2, NodeKind::BreakStatement);
  EXPECT_NE(a.build().digest(), b.build().digest());
  EXPECT_NE(sample().digest(), a.build().digest());
}

TEST(Tree, EscapesText) {
  TreeBuilder b;
  b.add_root({NodeKind::StringLiteral, "\"a\\b\"\n"});
  AstTree t = b.build();
  EXPECT_EQ(deserialize(serialize(t)).label(0).text, t.label(0).text);
}

TEST(Tree, Sha256KnownVector) {
  EXPECT_EQ(sha256("abc").hex(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  Digest d = sha256("abc");
  EXPECT_EQ(Digest::from_hex(d.hex()), d);
  EXPECT_THROW(Digest::from_hex("zz"), Error);
}

TEST(Tree, DeserializeRejectsMalformedDocuments) {
  const std::string head = "{\"format\":\"tsmin-ast\",\"version\":1,";
  EXPECT_EQ(kind_of(""), ErrorKind::Parse);
  EXPECT_EQ(kind_of("{\"format\":\"tsmin-ast\""), ErrorKind::Parse);
  EXPECT_EQ(kind_of("{\"format\":\"other\",\"version\":1,\"size\":0,\"nodes\":[]}"),
            ErrorKind::Parse);
  EXPECT_EQ(kind_of(head + "\"size\":1,\"nodes\":[{\"kind\":\"Nope\",\"children\":[]}]}"),
            ErrorKind::Parse);
  // size field disagrees with node list
  EXPECT_EQ(kind_of(head + "\"size\":2,\"nodes\":[{\"kind\":\"Block\",\"children\":[]}]}"),
            ErrorKind::Structural);
}

TEST(Tree, ParseErrorNamesPath) {
  const std::string doc =
      "{\"format\":\"tsmin-ast\",\"version\":1,\"size\":2,\"nodes\":["
      "{\"kind\":\"Block\",\"children\":[1]},{\"kind\":7,\"children\":[]}]}";
  try {
    deserialize(doc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
    EXPECT_NE(std::string(e.what()).find("/nodes/1/kind"), std::string::npos) << e.what();
  }
}

TEST(Tree, DeserializeRejectsBadStructure) {
  const std::string head = "{\"format\":\"tsmin-ast\",\"version\":1,";
  // dangling child
  EXPECT_EQ(kind_of(head + "\"size\":1,\"nodes\":[{\"kind\":\"Block\",\"children\":[3]}]}"),
            ErrorKind::Structural);
  // cycle back to the root
  EXPECT_EQ(kind_of(head +
                    "\"size\":2,\"nodes\":[{\"kind\":\"Block\",\"children\":[1]},"
                    "{\"kind\":\"Block\",\"children\":[0]}]}"),
            ErrorKind::Structural);
  // shared child
  EXPECT_EQ(kind_of(head +
                    "\"size\":3,\"nodes\":[{\"kind\":\"Block\",\"children\":[1,2]},"
                    "{\"kind\":\"Block\",\"children\":[2]},{\"kind\":\"Block\",\"children\":[]}]}"),
            ErrorKind::Structural);
  // not preorder
  EXPECT_EQ(kind_of(head +
                    "\"size\":3,\"nodes\":[{\"kind\":\"Block\",\"children\":[2,1]},"
                    "{\"kind\":\"Block\",\"children\":[]},{\"kind\":\"Block\",\"children\":[]}]}"),
            ErrorKind::Structural);
  // structural kind with text
  EXPECT_EQ(kind_of(head + "\"size\":1,\"nodes\":[{\"kind\":\"Block\",\"text\":\"x\",\"children\":[]}]}"),
            ErrorKind::Structural);
}

TEST(Tree, KindNamesRoundTrip) {
  for (int k = 0; k <= static_cast<int>(NodeKind::NullLiteral); ++k) {
    auto kind = static_cast<NodeKind>(k);
    EXPECT_EQ(node_kind_from_string(to_string(kind)), kind);
  }
  EXPECT_FALSE(node_kind_from_string("Whatever"));
}
