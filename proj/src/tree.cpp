#include "tsmin/tree.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <json.hpp>

#include "tsmin/error.hpp"

namespace tsmin {

namespace {

struct KindInfo {
  NodeKind kind;
  std::string_view name;
  bool text;
};

constexpr KindInfo kKinds[] = {
    {NodeKind::MethodDeclaration, "MethodDeclaration", true},
    {NodeKind::SingleVariableDeclaration, "SingleVariableDeclaration", false},
    {NodeKind::Block, "Block", false},
    {NodeKind::VariableDeclarationStatement, "VariableDeclarationStatement", false},
    {NodeKind::VariableDeclarationFragment, "VariableDeclarationFragment", false},
    {NodeKind::ExpressionStatement, "ExpressionStatement", false},
    {NodeKind::IfStatement, "IfStatement", false},
    {NodeKind::ForStatement, "ForStatement", false},
    {NodeKind::ForInit, "ForInit", false},
    {NodeKind::ForUpdate, "ForUpdate", false},
    {NodeKind::EnhancedForStatement, "EnhancedForStatement", false},
    {NodeKind::WhileStatement, "WhileStatement", false},
    {NodeKind::DoStatement, "DoStatement", false},
    {NodeKind::TryStatement, "TryStatement", false},
    {NodeKind::TryResources, "TryResources", false},
    {NodeKind::CatchClause, "CatchClause", false},
    {NodeKind::FinallyClause, "FinallyClause", false},
    {NodeKind::ReturnStatement, "ReturnStatement", false},
    {NodeKind::ThrowStatement, "ThrowStatement", false},
    {NodeKind::SwitchStatement, "SwitchStatement", false},
    {NodeKind::SwitchCase, "SwitchCase", true},
    {NodeKind::BreakStatement, "BreakStatement", true},
    {NodeKind::ContinueStatement, "ContinueStatement", true},
    {NodeKind::EmptyStatement, "EmptyStatement", false},
    {NodeKind::RawStatement, "RawStatement", false},
    {NodeKind::RawToken, "RawToken", true},
    {NodeKind::MethodInvocation, "MethodInvocation", true},
    {NodeKind::ClassInstanceCreation, "ClassInstanceCreation", false},
    {NodeKind::AnonymousClassBody, "AnonymousClassBody", false},
    {NodeKind::FieldAccess, "FieldAccess", true},
    {NodeKind::SimpleName, "SimpleName", true},
    {NodeKind::TypeName, "TypeName", true},
    {NodeKind::TypeLiteral, "TypeLiteral", false},
    {NodeKind::ThisExpression, "ThisExpression", false},
    {NodeKind::SuperExpression, "SuperExpression", false},
    {NodeKind::Assignment, "Assignment", true},
    {NodeKind::InfixExpression, "InfixExpression", true},
    {NodeKind::PrefixExpression, "PrefixExpression", true},
    {NodeKind::PostfixExpression, "PostfixExpression", true},
    {NodeKind::ConditionalExpression, "ConditionalExpression", false},
    {NodeKind::CastExpression, "CastExpression", false},
    {NodeKind::InstanceofExpression, "InstanceofExpression", false},
    {NodeKind::ArrayAccess, "ArrayAccess", false},
    {NodeKind::ArrayCreation, "ArrayCreation", false},
    {NodeKind::ArrayInitializer, "ArrayInitializer", false},
    {NodeKind::ParenthesizedExpression, "ParenthesizedExpression", false},
    {NodeKind::LambdaExpression, "LambdaExpression", false},
    {NodeKind::MethodReference, "MethodReference", true},
    {NodeKind::NumberLiteral, "NumberLiteral", true},
    {NodeKind::StringLiteral, "StringLiteral", true},
    {NodeKind::CharacterLiteral, "CharacterLiteral", true},
    {NodeKind::BooleanLiteral, "BooleanLiteral", true},
    {NodeKind::NullLiteral, "NullLiteral", false},
};

const KindInfo& info(NodeKind kind) {
  return kKinds[static_cast<std::size_t>(kind)];
}

constexpr std::string_view kFormat = "tsmin-ast";
constexpr int kVersion = 1;

[[noreturn]] void structural(const std::string& message) {
  throw Error(ErrorKind::Structural, "AST structure: " + message);
}

[[noreturn]] void parse_error(const std::string& path,
                              const std::string& message) {
  throw Error(ErrorKind::Parse,
              "AST document " + (path.empty() ? "/" : path) + ": " + message);
}

}  // namespace

std::string_view to_string(NodeKind kind) { return info(kind).name; }

std::optional<NodeKind> node_kind_from_string(std::string_view name) {
  for (const auto& k : kKinds)
    if (k.name == name) return k.kind;
  return std::nullopt;
}

bool kind_carries_text(NodeKind kind) { return info(kind).text; }

std::string to_string(const NodeLabel& label) {
  std::string out(to_string(label.kind));
  if (label.text) {
    out += ':';
    out += *label.text;
  }
  return out;
}

std::string Digest::hex() const {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (auto b : bytes) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xF]);
  }
  return out;
}

Digest Digest::from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() != 64)
    throw Error(ErrorKind::Parse, "digest must have 64 hex digits");
  Digest d;
  for (std::size_t i = 0; i < 32; ++i) {
    int hi = nibble(hex[2 * i]), lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error(ErrorKind::Parse, "invalid hex digest");
    d.bytes[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return d;
}

Digest sha256(std::string_view bytes) {
  Digest d;
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), d.bytes.data(), &len,
                 EVP_sha256(), nullptr) != 1 ||
      len != d.bytes.size())
    throw std::runtime_error("SHA-256 computation failed");
  return d;
}

AstTree::AstTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  const auto n = static_cast<NodeIndex>(nodes_.size());
  if (n == 0) structural("tree has no nodes");
  if (nodes_[0].parent != kNoNode) structural("node 0 must be the root");

  // Every non-root node is referenced exactly once, by its recorded parent,
  // and a preorder walk from the root visits 0, 1, ..., n-1.
  std::vector<int> refs(n, 0);
  for (NodeIndex i = 0; i < n; ++i) {
    const auto& node = nodes_[i];
    if (!kind_carries_text(node.label.kind) && node.label.text)
      structural("node " + std::to_string(i) + " of kind " +
                 std::string(to_string(node.label.kind)) +
                 " must not carry text");
    for (NodeIndex c : node.children) {
      if (c < 0 || c >= n)
        structural("node " + std::to_string(i) + " has child index " +
                   std::to_string(c) + " out of range");
      if (c == 0) structural("root referenced as a child (cycle)");
      if (++refs[c] > 1)
        structural("node " + std::to_string(c) + " has several parents");
      if (nodes_[c].parent != i)
        structural("parent link of node " + std::to_string(c) +
                   " is inconsistent");
    }
  }
  for (NodeIndex i = 1; i < n; ++i)
    if (refs[i] == 0)
      structural("node " + std::to_string(i) + " is unreachable (cycle)");

  subtree_sizes_.assign(n, 1);
  NodeIndex next = 0;
  std::vector<NodeIndex> stack{0};
  while (!stack.empty()) {
    NodeIndex v = stack.back();
    stack.pop_back();
    if (v != next++) structural("nodes are not stored in preorder");
    const auto& ch = nodes_[v].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  for (NodeIndex i = n - 1; i > 0; --i)
    subtree_sizes_[nodes_[i].parent] += subtree_sizes_[i];

  digest_ = sha256(serialize(*this));
}

bool AstTree::same_nodes(const AstTree& other) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto &a = nodes_[i], &b = other.nodes_[i];
    if (!(a.label == b.label) || a.children != b.children) return false;
  }
  return true;
}

std::vector<NodeIndex> AstTree::preorder() const {
  std::vector<NodeIndex> out(nodes_.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<NodeIndex>(i);
  return out;
}

std::vector<NodeIndex> AstTree::postorder() const {
  std::vector<NodeIndex> out;
  out.reserve(nodes_.size());
  // (node, next child position)
  std::vector<std::pair<NodeIndex, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto& [v, pos] = stack.back();
    if (pos < nodes_[v].children.size()) {
      NodeIndex c = nodes_[v].children[pos++];
      stack.emplace_back(c, 0);
    } else {
      out.push_back(v);
      stack.pop_back();
    }
  }
  return out;
}

NodeIndex TreeBuilder::add_root(NodeLabel label) {
  if (!nodes_.empty()) structural("builder already has a root");
  nodes_.push_back({std::move(label), kNoNode, {}});
  return 0;
}

NodeIndex TreeBuilder::add_child(NodeIndex parent, NodeLabel label) {
  if (parent < 0 || static_cast<std::size_t>(parent) >= nodes_.size())
    structural("builder parent index out of range");
  auto id = static_cast<NodeIndex>(nodes_.size());
  nodes_.push_back({std::move(label), parent, {}});
  nodes_[parent].children.push_back(id);
  return id;
}

AstTree TreeBuilder::build() const {
  if (nodes_.empty()) structural("tree has no nodes");
  std::vector<NodeIndex> order;
  order.reserve(nodes_.size());
  std::vector<NodeIndex> stack{0};
  while (!stack.empty()) {
    NodeIndex v = stack.back();
    stack.pop_back();
    order.push_back(v);
    const auto& ch = nodes_[v].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  std::vector<NodeIndex> renum(nodes_.size(), kNoNode);
  for (std::size_t i = 0; i < order.size(); ++i)
    renum[order[i]] = static_cast<NodeIndex>(i);

  std::vector<AstTree::Node> out;
  out.reserve(order.size());
  for (NodeIndex old : order) {
    const auto& src = nodes_[old];
    AstTree::Node node{src.label,
                       src.parent == kNoNode ? kNoNode : renum[src.parent],
                       {}};
    node.children.reserve(src.children.size());
    for (NodeIndex c : src.children) node.children.push_back(renum[c]);
    out.push_back(std::move(node));
  }
  return AstTree(std::move(out));
}

std::string serialize(const AstTree& tree) {
  // Hand-written so that the byte layout is fixed independently of any JSON
  // library's formatting choices. Keys appear in a fixed order.
  std::string out;
  out.reserve(tree.size() * 48);
  out += "{\"format\":\"";
  out += kFormat;
  out += "\",\"version\":";
  out += std::to_string(kVersion);
  out += ",\"size\":";
  out += std::to_string(tree.size());
  out += ",\"nodes\":[";
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const auto& node = tree.nodes()[i];
    if (i) out += ',';
    out += "{\"kind\":\"";
    out += to_string(node.label.kind);
    out += '"';
    if (node.label.text) {
      out += ",\"text\":";
      out += nlohmann::json(*node.label.text).dump();
    }
    out += ",\"children\":[";
    for (std::size_t c = 0; c < node.children.size(); ++c) {
      if (c) out += ',';
      out += std::to_string(node.children[c]);
    }
    out += "]}";
  }
  out += "]}\n";
  return out;
}

AstTree deserialize(std::string_view document) {
  using nlohmann::json;
  if (document.empty()) parse_error("", "empty document");
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    parse_error("", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) parse_error("", "expected an object");
  auto format = doc.find("format");
  if (format == doc.end() || !format->is_string() || *format != kFormat)
    parse_error("/format", "expected \"tsmin-ast\"");
  auto version = doc.find("version");
  if (version == doc.end() || !version->is_number_integer() ||
      *version != kVersion)
    parse_error("/version", "unsupported version");
  auto nodes = doc.find("nodes");
  if (nodes == doc.end() || !nodes->is_array())
    parse_error("/nodes", "expected an array");
  auto size = doc.find("size");
  if (size == doc.end() || !size->is_number_unsigned())
    parse_error("/size", "expected a non-negative integer");
  if (size->get<std::size_t>() != nodes->size())
    structural("size field disagrees with node count");

  const auto n = static_cast<NodeIndex>(nodes->size());
  std::vector<AstTree::Node> out(n, AstTree::Node{NodeKind::Block, kNoNode, {}});
  for (NodeIndex i = 0; i < n; ++i) {
    const std::string path = "/nodes/" + std::to_string(i);
    const auto& node = (*nodes)[i];
    if (!node.is_object()) parse_error(path, "expected an object");
    auto kind = node.find("kind");
    if (kind == node.end() || !kind->is_string())
      parse_error(path + "/kind", "expected a string");
    auto k = node_kind_from_string(kind->get<std::string>());
    if (!k) parse_error(path + "/kind", "unknown node kind");
    out[i].label = NodeLabel{*k};
    if (auto text = node.find("text"); text != node.end()) {
      if (!text->is_string()) parse_error(path + "/text", "expected a string");
      out[i].label.text = text->get<std::string>();
    }
    auto children = node.find("children");
    if (children == node.end() || !children->is_array())
      parse_error(path + "/children", "expected an array");
    for (std::size_t c = 0; c < children->size(); ++c) {
      const auto& v = (*children)[c];
      if (!v.is_number_integer())
        parse_error(path + "/children/" + std::to_string(c),
                    "expected an integer");
      auto idx = v.get<std::int64_t>();
      if (idx < 0 || idx >= n)
        structural(path + "/children/" + std::to_string(c) + ": child index " +
                   std::to_string(idx) + " out of range");
      out[i].children.push_back(static_cast<NodeIndex>(idx));
    }
  }
  // Parent links are implied by the child lists.
  for (NodeIndex i = 0; i < n; ++i)
    for (NodeIndex c : out[i].children)
      if (c != 0 && out[c].parent == kNoNode) out[c].parent = i;
  return AstTree(std::move(out));
}

Digest content_hash(const AstTree& tree) { return tree.digest(); }

}  // namespace tsmin
