#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tsmin {

/// Closed vocabulary of syntactic categories. `RawStatement` and
/// `RawToken` cover constructs the frontend does not model.
enum class NodeKind : std::uint8_t {
  MethodDeclaration,
  SingleVariableDeclaration,
  Block,
  VariableDeclarationStatement,
  VariableDeclarationFragment,
  ExpressionStatement,
  IfStatement,
  ForStatement,
  ForInit,
  ForUpdate,
  EnhancedForStatement,
  WhileStatement,
  DoStatement,
  TryStatement,
  TryResources,
  CatchClause,
  FinallyClause,
  ReturnStatement,
  ThrowStatement,
  SwitchStatement,
  SwitchCase,
  BreakStatement,
  ContinueStatement,
  EmptyStatement,
  RawStatement,
  RawToken,
  MethodInvocation,
  ClassInstanceCreation,
  AnonymousClassBody,
  FieldAccess,
  SimpleName,
  TypeName,
  TypeLiteral,
  ThisExpression,
  SuperExpression,
  Assignment,
  InfixExpression,
  PrefixExpression,
  PostfixExpression,
  ConditionalExpression,
  CastExpression,
  InstanceofExpression,
  ArrayAccess,
  ArrayCreation,
  ArrayInitializer,
  ParenthesizedExpression,
  LambdaExpression,
  MethodReference,
  NumberLiteral,
  StringLiteral,
  CharacterLiteral,
  BooleanLiteral,
  NullLiteral,
};

std::string_view to_string(NodeKind kind);
std::optional<NodeKind> node_kind_from_string(std::string_view name);

/// Whether nodes of this kind may carry a text payload. Structural kinds
/// (Block, IfStatement, ...) never do.
bool kind_carries_text(NodeKind kind);

struct NodeLabel {
  NodeKind kind;
  std::optional<std::string> text;

  NodeLabel(NodeKind k) : kind(k) {}  // NOLINT: implicit by intent
  NodeLabel(NodeKind k, std::string t) : kind(k), text(std::move(t)) {}

  friend bool operator==(const NodeLabel&, const NodeLabel&) = default;
  friend auto operator<=>(const NodeLabel&, const NodeLabel&) = default;
};

std::string to_string(const NodeLabel& label);

using NodeIndex = std::int32_t;
inline constexpr NodeIndex kNoNode = -1;

/// SHA-256 of a canonical serialization.
struct Digest {
  std::array<std::uint8_t, 32> bytes{};

  std::string hex() const;
  static Digest from_hex(std::string_view hex);

  friend bool operator==(const Digest&, const Digest&) = default;
  friend auto operator<=>(const Digest&, const Digest&) = default;
};

/// Immutable labeled ordered tree. Node indices are dense and in preorder,
/// so node 0 is the root and the subtree of node i occupies the index range
/// [i, i + subtree_size(i)).
class AstTree {
 public:
  struct Node {
    NodeLabel label;
    NodeIndex parent = kNoNode;
    std::vector<NodeIndex> children;
  };

  /// Validates `nodes` (preorder, single root, consistent links). Throws
  /// Error{Structural} otherwise.
  explicit AstTree(std::vector<Node> nodes);

  std::size_t size() const noexcept { return nodes_.size(); }
  NodeIndex root() const noexcept { return 0; }

  const NodeLabel& label(NodeIndex i) const { return nodes_[i].label; }
  NodeIndex parent(NodeIndex i) const { return nodes_[i].parent; }
  std::span<const NodeIndex> children(NodeIndex i) const {
    return nodes_[i].children;
  }
  std::size_t subtree_size(NodeIndex i) const { return subtree_sizes_[i]; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }

  std::vector<NodeIndex> preorder() const;
  std::vector<NodeIndex> postorder() const;

  /// Digest of `serialize(*this)`, computed once at construction.
  const Digest& digest() const noexcept { return digest_; }

  /// Label- and shape-identical.
  friend bool operator==(const AstTree& a, const AstTree& b) {
    return a.digest_ == b.digest_ && a.nodes_.size() == b.nodes_.size() &&
           a.same_nodes(b);
  }

 private:
  bool same_nodes(const AstTree& other) const;

  std::vector<Node> nodes_;
  std::vector<std::size_t> subtree_sizes_;
  Digest digest_;
};

/// Incremental construction in any order; build() renumbers into preorder.
class TreeBuilder {
 public:
  NodeIndex add_root(NodeLabel label);
  NodeIndex add_child(NodeIndex parent, NodeLabel label);
  std::size_t size() const noexcept { return nodes_.size(); }
  AstTree build() const;

 private:
  std::vector<AstTree::Node> nodes_;
};

/// Canonical JSON document (see docs/ast-format.md). Byte-stable.
std::string serialize(const AstTree& tree);

/// Errors: Error{Parse} naming the offending JSON path, Error{Structural}
/// for dangling, shared, cyclic or non-preorder child links.
AstTree deserialize(std::string_view document);

Digest content_hash(const AstTree& tree);
Digest sha256(std::string_view bytes);

}  // namespace tsmin
