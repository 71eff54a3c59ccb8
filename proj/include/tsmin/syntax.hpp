#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "tsmin/lexer.hpp"
#include "tsmin/tree.hpp"

namespace tsmin::frontend {

inline constexpr std::size_t kNoToken = std::numeric_limits<std::size_t>::max();

/// Parse tree node. It has the shape of the final AstTree node plus the
/// source bookkeeping the preprocessor needs.
struct SyntaxNode {
  NodeLabel label;
  std::vector<SyntaxNode> children;
  std::size_t begin = 0;  // token span [begin, end)
  std::size_t end = 0;
  std::size_t token = kNoToken;  // SimpleName / RawToken source token
  bool declares = false;         // SimpleName that introduces a local
  bool has_receiver = false;     // MethodInvocation: children[0] is receiver

  SyntaxNode(NodeLabel l) : label(std::move(l)) {}  // NOLINT
};

struct MethodSyntax {
  SyntaxNode root{NodeKind::MethodDeclaration};
  std::size_t name_token = kNoToken;
  std::size_t begin = 0;  // first header token
  std::size_t end = 0;    // one past the closing brace
};

/// Parses one method declaration starting at `start`. Tokens must come from
/// lex() without comments. Statements outside the supported subset become
/// RawStatement nodes; a broken header or unbalanced body throws
/// FrontendError.
MethodSyntax parse_method(const std::vector<Token>& tokens, std::size_t start = 0);

struct MethodHeader {
  std::size_t begin;       // first annotation / modifier token
  std::size_t name_token;
  std::size_t body_open;   // index of '{'
  bool annotated_test;     // carries an annotation named Test
};

/// Recognizes `annotations modifiers [type-params] type name (params)
/// [throws ...] {` at `pos` without building a tree.
std::optional<MethodHeader> match_method_header(const std::vector<Token>& tokens,
                                                std::size_t pos);

/// Index one past the brace that closes the one at `open`, or kNoToken.
std::size_t matching_brace(const std::vector<Token>& tokens, std::size_t open);

AstTree to_tree(const SyntaxNode& root);

}  // namespace tsmin::frontend
