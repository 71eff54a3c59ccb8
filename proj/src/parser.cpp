#include <algorithm>
#include <string>
#include <string_view>

#include "tsmin/error.hpp"
#include "tsmin/syntax.hpp"

namespace tsmin::frontend {

namespace {

struct ParseFailure {
  std::size_t at;
  std::string what;
};

constexpr std::string_view kModifiers[] = {
    "public", "protected", "private",  "static",  "final",    "abstract",
    "synchronized", "native", "strictfp", "transient", "volatile", "default"};

bool is_modifier(const Token& t) {
  return t.kind == TokenKind::Keyword &&
         std::find(std::begin(kModifiers), std::end(kModifiers), t.text) !=
             std::end(kModifiers);
}

bool is_assignment_op(const Token& t) {
  static constexpr std::string_view ops[] = {"=",  "+=", "-=",  "*=",
                                             "/=", "%=", "&=",  "|=",
                                             "^=", "<<=", ">>=", ">>>="};
  return t.kind == TokenKind::Operator &&
         std::find(std::begin(ops), std::end(ops), t.text) != std::end(ops);
}

int binary_precedence(const Token& t) {
  if (t.kind == TokenKind::Keyword) return t.text == "instanceof" ? 7 : -1;
  if (t.kind != TokenKind::Operator) return -1;
  const auto& s = t.text;
  if (s == "||") return 1;
  if (s == "&&") return 2;
  if (s == "|") return 3;
  if (s == "^") return 4;
  if (s == "&") return 5;
  if (s == "==" || s == "!=") return 6;
  if (s == "<" || s == ">" || s == "<=" || s == ">=") return 7;
  if (s == "<<" || s == ">>" || s == ">>>") return 8;
  if (s == "+" || s == "-") return 9;
  if (s == "*" || s == "/" || s == "%") return 10;
  return -1;
}

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {}

  struct State {
    std::size_t pos;
    std::size_t gt;
  };
  State save() const { return {pos_, gt_split_}; }
  void restore(State s) {
    pos_ = s.pos;
    gt_split_ = s.gt;
  }

  std::size_t pos() const { return pos_; }
  void seek(std::size_t p) {
    pos_ = p;
    gt_split_ = 0;
  }

  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at_end() const { return peek().kind == TokenKind::End; }
  bool at_op(std::string_view s, std::size_t k = 0) const {
    return peek(k).is_op(s);
  }
  bool at_kw(std::string_view s, std::size_t k = 0) const {
    return peek(k).is_keyword(s);
  }
  bool at_ident(std::size_t k = 0) const {
    return peek(k).kind == TokenKind::Identifier;
  }

  void next() {
    if (!at_end()) ++pos_;
    gt_split_ = 0;
  }
  bool accept_op(std::string_view s) {
    if (!at_op(s) || gt_split_) return false;
    next();
    return true;
  }
  bool accept_kw(std::string_view s) {
    if (!at_kw(s)) return false;
    next();
    return true;
  }
  void expect_op(std::string_view s) {
    if (!accept_op(s)) fail("expected '" + std::string(s) + "'");
  }
  std::string expect_ident() {
    if (!at_ident()) fail("expected identifier");
    std::string s = peek().text;
    next();
    return s;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseFailure{pos_, what};
  }
  [[noreturn]] void hard_fail(const std::string& what) const {
    const Token& t = peek();
    throw FrontendError(what, t.line, t.column);
  }

  // '>' possibly split out of '>>' / '>>>'.
  bool accept_close_angle() {
    const Token& t = peek();
    if (t.kind != TokenKind::Operator) return false;
    if (t.text != ">" && t.text != ">>" && t.text != ">>>") return false;
    if (++gt_split_ == t.text.size()) next();
    return true;
  }

  // ---------------------------------------------------------------- types --

  void skip_annotation() {
    expect_op("@");
    expect_ident();
    while (at_op(".") && at_ident(1)) {
      next();
      next();
    }
    if (at_op("(")) skip_balanced("(", ")");
  }

  void skip_balanced(std::string_view open, std::string_view close) {
    int depth = 0;
    do {
      if (at_end()) fail("unbalanced '" + std::string(open) + "'");
      if (at_op(open)) ++depth;
      if (at_op(close)) --depth;
      next();
    } while (depth > 0);
  }

  void skip_variable_modifiers() {
    while (true) {
      if (at_kw("final")) {
        next();
      } else if (at_op("@") && !at_kw("interface", 1)) {
        skip_annotation();
      } else {
        return;
      }
    }
  }

  std::string type_arguments() {
    std::string s = "<";
    expect_op("<");
    if (accept_close_angle()) return "<>";
    while (true) {
      while (at_op("@")) skip_annotation();
      if (accept_op("?")) {
        s += "?";
        if (accept_kw("extends")) {
          s += " extends " + parse_type();
        } else if (accept_kw("super")) {
          s += " super " + parse_type();
        }
      } else {
        s += parse_type();
      }
      if (accept_op(",")) {
        s += ",";
        continue;
      }
      if (!accept_close_angle()) fail("expected '>'");
      return s + ">";
    }
  }

  std::string parse_type() {
    while (at_op("@")) skip_annotation();
    std::string s;
    const Token& t = peek();
    if (t.kind == TokenKind::Keyword &&
        (is_primitive_type(t.text) || t.text == "void")) {
      s = t.text;
      next();
    } else if (t.kind == TokenKind::Identifier) {
      s = t.text;
      next();
      if (at_op("<")) s += type_arguments();
      while (at_op(".") && at_ident(1)) {
        next();
        s += "." + peek().text;
        next();
        if (at_op("<")) s += type_arguments();
      }
    } else {
      fail("expected type");
    }
    while (at_op("[") && at_op("]", 1)) {
      next();
      next();
      s += "[]";
    }
    return s;
  }

  // ----------------------------------------------------------- statements --

  SyntaxNode make(NodeLabel label, std::size_t begin) const {
    SyntaxNode n(std::move(label));
    n.begin = begin;
    n.end = pos_;
    return n;
  }
  void close(SyntaxNode& n) const { n.end = pos_; }

  SyntaxNode declared_name(std::size_t begin) {
    SyntaxNode n(NodeLabel{NodeKind::SimpleName, expect_ident()});
    n.begin = begin;
    n.token = begin;
    n.end = pos_;
    n.declares = true;
    return n;
  }

  SyntaxNode type_node(std::string spelling, std::size_t begin) const {
    return make(NodeLabel{NodeKind::TypeName, std::move(spelling)}, begin);
  }

  SyntaxNode block() {
    const std::size_t begin = pos_;
    if (!accept_op("{")) fail("expected '{'");
    SyntaxNode b = make(NodeKind::Block, begin);
    while (!at_op("}")) {
      if (at_end()) hard_fail("unexpected end of input inside block");
      b.children.push_back(statement());
    }
    next();
    close(b);
    return b;
  }

  // Statement with RawStatement fallback.
  SyntaxNode statement() {
    const State s = save();
    try {
      return statement_strict();
    } catch (const ParseFailure&) {
      restore(s);
      return raw_statement();
    }
  }

  SyntaxNode raw_statement() {
    const std::size_t begin = pos_;
    SyntaxNode raw = make(NodeKind::RawStatement, begin);
    int depth = 0;
    while (true) {
      const Token& t = peek();
      if (t.kind == TokenKind::End)
        hard_fail("unexpected end of input in statement");
      if (depth == 0 && t.is_op("}") && pos_ > begin) break;
      if (depth == 0 && t.is_op("}")) hard_fail("unexpected '}'");
      SyntaxNode tok(NodeLabel{NodeKind::RawToken, t.text});
      tok.begin = tok.token = pos_;
      tok.end = pos_ + 1;
      raw.children.push_back(std::move(tok));
      const bool closes_brace = t.is_op("}");
      if (t.is_op("(") || t.is_op("[") || t.is_op("{")) ++depth;
      if (t.is_op(")") || t.is_op("]") || t.is_op("}")) depth = std::max(0, depth - 1);
      const bool semi = t.is_op(";");
      next();
      if (depth == 0 && semi) break;
      if (depth == 0 && closes_brace && !at_op(";") && !at_op(",") &&
          !at_op(")") && !at_op(".") && !at_op("("))
        break;
    }
    close(raw);
    return raw;
  }

  bool looks_like_local_declaration() {
    const State s = save();
    bool ok = false;
    try {
      skip_variable_modifiers();
      if (at_ident() || peek().kind == TokenKind::Keyword) {
        parse_type();
        ok = at_ident() && (at_op("=", 1) || at_op(";", 1) || at_op(",", 1) ||
                            at_op("[", 1) || at_op(":", 1));
      }
    } catch (const ParseFailure&) {
      ok = false;
    }
    restore(s);
    return ok;
  }

  // `Type a = x, b[] = {...}` without the terminator.
  SyntaxNode local_declaration() {
    const std::size_t begin = pos_;
    skip_variable_modifiers();
    const std::size_t type_begin = pos_;
    std::string type = parse_type();
    SyntaxNode decl = make(NodeKind::VariableDeclarationStatement, begin);
    decl.children.push_back(type_node(type, type_begin));
    do {
      const std::size_t frag_begin = pos_;
      SyntaxNode frag = make(NodeKind::VariableDeclarationFragment, frag_begin);
      frag.children.push_back(declared_name(pos_));
      while (at_op("[") && at_op("]", 1)) {
        next();
        next();
      }
      if (accept_op("=")) frag.children.push_back(variable_initializer());
      close(frag);
      decl.children.push_back(std::move(frag));
    } while (accept_op(","));
    close(decl);
    return decl;
  }

  SyntaxNode variable_initializer() {
    if (at_op("{")) return array_initializer();
    return expression();
  }

  SyntaxNode array_initializer() {
    const std::size_t begin = pos_;
    expect_op("{");
    SyntaxNode init = make(NodeKind::ArrayInitializer, begin);
    while (!at_op("}")) {
      init.children.push_back(variable_initializer());
      if (!accept_op(",")) break;
    }
    expect_op("}");
    close(init);
    return init;
  }

  SyntaxNode statement_strict() {
    const std::size_t begin = pos_;
    const Token& t = peek();
    if (t.is_op("{")) return block();
    if (t.is_op(";")) {
      next();
      return make(NodeKind::EmptyStatement, begin);
    }
    if (t.kind == TokenKind::Keyword) {
      if (t.text == "if") return if_statement();
      if (t.text == "for") return for_statement();
      if (t.text == "while") {
        next();
        SyntaxNode w = make(NodeKind::WhileStatement, begin);
        w.children.push_back(paren_expression());
        w.children.push_back(statement());
        close(w);
        return w;
      }
      if (t.text == "do") {
        next();
        SyntaxNode d = make(NodeKind::DoStatement, begin);
        d.children.push_back(statement());
        if (!accept_kw("while")) fail("expected 'while'");
        d.children.push_back(paren_expression());
        expect_op(";");
        close(d);
        return d;
      }
      if (t.text == "try") return try_statement();
      if (t.text == "switch") return switch_statement();
      if (t.text == "return") {
        next();
        SyntaxNode r = make(NodeKind::ReturnStatement, begin);
        if (!at_op(";")) r.children.push_back(expression());
        expect_op(";");
        close(r);
        return r;
      }
      if (t.text == "throw") {
        next();
        SyntaxNode r = make(NodeKind::ThrowStatement, begin);
        r.children.push_back(expression());
        expect_op(";");
        close(r);
        return r;
      }
      if (t.text == "break" || t.text == "continue") {
        const NodeKind kind = t.text == "break" ? NodeKind::BreakStatement
                                                : NodeKind::ContinueStatement;
        next();
        SyntaxNode b(kind);
        if (at_ident()) {
          b.label.text = peek().text;
          next();
        }
        expect_op(";");
        b.begin = begin;
        close(b);
        return b;
      }
      if (t.text == "class" || t.text == "interface" || t.text == "enum" ||
          t.text == "synchronized" || t.text == "abstract" ||
          t.text == "static" || t.text == "assert")
        fail("unsupported statement");
    }
    if (at_ident() && at_op(":", 1)) fail("labeled statement");
    if (looks_like_local_declaration()) {
      SyntaxNode decl = local_declaration();
      expect_op(";");
      close(decl);
      return decl;
    }
    SyntaxNode stmt = make(NodeKind::ExpressionStatement, begin);
    stmt.children.push_back(expression());
    expect_op(";");
    close(stmt);
    return stmt;
  }

  SyntaxNode paren_expression() {
    expect_op("(");
    SyntaxNode e = expression();
    expect_op(")");
    return e;
  }

  SyntaxNode if_statement() {
    const std::size_t begin = pos_;
    next();
    SyntaxNode s = make(NodeKind::IfStatement, begin);
    s.children.push_back(paren_expression());
    s.children.push_back(statement());
    if (accept_kw("else")) s.children.push_back(statement());
    close(s);
    return s;
  }

  SyntaxNode for_statement() {
    const std::size_t begin = pos_;
    next();
    expect_op("(");
    // Enhanced for: [modifiers] Type name ':'
    {
      const State s = save();
      bool enhanced = false;
      try {
        skip_variable_modifiers();
        parse_type();
        enhanced = at_ident() && at_op(":", 1);
      } catch (const ParseFailure&) {
      }
      restore(s);
      if (enhanced) {
        SyntaxNode f = make(NodeKind::EnhancedForStatement, begin);
        const std::size_t var_begin = pos_;
        skip_variable_modifiers();
        const std::size_t type_begin = pos_;
        std::string type = parse_type();
        SyntaxNode var = make(NodeKind::SingleVariableDeclaration, var_begin);
        var.children.push_back(type_node(type, type_begin));
        var.children.push_back(declared_name(pos_));
        close(var);
        f.children.push_back(std::move(var));
        expect_op(":");
        f.children.push_back(expression());
        expect_op(")");
        f.children.push_back(statement());
        close(f);
        return f;
      }
    }
    SyntaxNode f = make(NodeKind::ForStatement, begin);
    if (!at_op(";")) {
      SyntaxNode init = make(NodeKind::ForInit, pos_);
      if (looks_like_local_declaration()) {
        init.children.push_back(local_declaration());
      } else {
        do {
          init.children.push_back(expression());
        } while (accept_op(","));
      }
      close(init);
      f.children.push_back(std::move(init));
    }
    expect_op(";");
    if (!at_op(";")) f.children.push_back(expression());
    expect_op(";");
    if (!at_op(")")) {
      SyntaxNode update = make(NodeKind::ForUpdate, pos_);
      do {
        update.children.push_back(expression());
      } while (accept_op(","));
      close(update);
      f.children.push_back(std::move(update));
    }
    expect_op(")");
    f.children.push_back(statement());
    close(f);
    return f;
  }

  SyntaxNode try_statement() {
    const std::size_t begin = pos_;
    next();
    SyntaxNode t = make(NodeKind::TryStatement, begin);
    bool has_resources = false;
    if (at_op("(")) {
      has_resources = true;
      SyntaxNode res = make(NodeKind::TryResources, pos_);
      next();
      while (!at_op(")")) {
        if (looks_like_local_declaration())
          res.children.push_back(local_declaration());
        else
          res.children.push_back(expression());
        if (!accept_op(";")) break;
      }
      expect_op(")");
      close(res);
      t.children.push_back(std::move(res));
    }
    t.children.push_back(block());
    bool handlers = false;
    while (at_kw("catch")) {
      handlers = true;
      const std::size_t catch_begin = pos_;
      next();
      expect_op("(");
      SyntaxNode clause = make(NodeKind::CatchClause, catch_begin);
      const std::size_t var_begin = pos_;
      skip_variable_modifiers();
      const std::size_t type_begin = pos_;
      std::string type = parse_type();
      while (accept_op("|")) type += "|" + parse_type();
      SyntaxNode var = make(NodeKind::SingleVariableDeclaration, var_begin);
      var.children.push_back(type_node(type, type_begin));
      var.children.push_back(declared_name(pos_));
      close(var);
      expect_op(")");
      clause.children.push_back(std::move(var));
      clause.children.push_back(block());
      close(clause);
      t.children.push_back(std::move(clause));
    }
    if (at_kw("finally")) {
      handlers = true;
      SyntaxNode fin = make(NodeKind::FinallyClause, pos_);
      next();
      fin.children.push_back(block());
      close(fin);
      t.children.push_back(std::move(fin));
    }
    if (!handlers && !has_resources) fail("try without catch or finally");
    close(t);
    return t;
  }

  SyntaxNode switch_statement() {
    const std::size_t begin = pos_;
    next();
    SyntaxNode s = make(NodeKind::SwitchStatement, begin);
    s.children.push_back(paren_expression());
    expect_op("{");
    while (!at_op("}")) {
      if (at_end()) hard_fail("unexpected end of input inside switch");
      if (at_kw("case") || at_kw("default")) {
        const std::size_t case_begin = pos_;
        SyntaxNode label(NodeKind::SwitchCase);
        if (accept_kw("default")) {
          label.label.text = "default";
        } else {
          next();
          do {
            label.children.push_back(ternary());
          } while (accept_op(","));
        }
        label.begin = case_begin;
        if (accept_op("->")) {
          close(label);
          s.children.push_back(std::move(label));
          if (at_op("{") || at_kw("throw")) {
            s.children.push_back(statement_strict());
          } else {
            SyntaxNode stmt = make(NodeKind::ExpressionStatement, pos_);
            stmt.children.push_back(expression());
            expect_op(";");
            close(stmt);
            s.children.push_back(std::move(stmt));
          }
          continue;
        }
        expect_op(":");
        close(label);
        s.children.push_back(std::move(label));
        continue;
      }
      s.children.push_back(statement());
    }
    next();
    close(s);
    return s;
  }

  // ---------------------------------------------------------- expressions --

  SyntaxNode expression() { return assignment(); }

  bool lambda_ahead() const {
    if (at_ident() && at_op("->", 1)) return true;
    if (!at_op("(")) return false;
    int depth = 0;
    for (std::size_t k = 0;; ++k) {
      const Token& t = peek(k);
      if (t.kind == TokenKind::End) return false;
      if (t.is_op("(")) ++depth;
      if (t.is_op(")") && --depth == 0) return peek(k + 1).is_op("->");
    }
  }

  SyntaxNode lambda() {
    const std::size_t begin = pos_;
    SyntaxNode lam = make(NodeKind::LambdaExpression, begin);
    if (at_ident()) {
      lam.children.push_back(declared_name(pos_));
    } else {
      expect_op("(");
      while (!at_op(")")) {
        if (at_ident() && (at_op(",", 1) || at_op(")", 1))) {
          lam.children.push_back(declared_name(pos_));
        } else {
          const std::size_t var_begin = pos_;
          skip_variable_modifiers();
          const std::size_t type_begin = pos_;
          std::string type = parse_type();
          if (accept_op("...")) type += "...";
          SyntaxNode var = make(NodeKind::SingleVariableDeclaration, var_begin);
          var.children.push_back(type_node(type, type_begin));
          var.children.push_back(declared_name(pos_));
          close(var);
          lam.children.push_back(std::move(var));
        }
        if (!accept_op(",")) break;
      }
      expect_op(")");
    }
    expect_op("->");
    if (at_op("{"))
      lam.children.push_back(block());
    else
      lam.children.push_back(expression());
    close(lam);
    return lam;
  }

  SyntaxNode assignment() {
    if (lambda_ahead()) return lambda();
    const std::size_t begin = pos_;
    SyntaxNode lhs = ternary();
    if (is_assignment_op(peek()) && !gt_split_) {
      SyntaxNode a = make(NodeLabel{NodeKind::Assignment, peek().text}, begin);
      next();
      a.children.push_back(std::move(lhs));
      a.children.push_back(assignment());
      close(a);
      return a;
    }
    return lhs;
  }

  SyntaxNode ternary() {
    const std::size_t begin = pos_;
    SyntaxNode cond = binary(1);
    if (!accept_op("?")) return cond;
    SyntaxNode c = make(NodeKind::ConditionalExpression, begin);
    c.children.push_back(std::move(cond));
    c.children.push_back(expression());
    expect_op(":");
    c.children.push_back(lambda_ahead() ? lambda() : ternary());
    close(c);
    return c;
  }

  SyntaxNode binary(int min_prec) {
    const std::size_t begin = pos_;
    SyntaxNode lhs = unary();
    while (true) {
      const Token& op = peek();
      const int prec = binary_precedence(op);
      if (prec < min_prec || gt_split_) return lhs;
      if (op.kind == TokenKind::Keyword) {  // instanceof
        next();
        SyntaxNode inst = make(NodeKind::InstanceofExpression, begin);
        inst.children.push_back(std::move(lhs));
        skip_variable_modifiers();
        const std::size_t type_begin = pos_;
        std::string type = parse_type();
        inst.children.push_back(type_node(type, type_begin));
        if (at_ident()) inst.children.push_back(declared_name(pos_));
        close(inst);
        lhs = std::move(inst);
        continue;
      }
      SyntaxNode node = make(NodeLabel{NodeKind::InfixExpression, op.text}, begin);
      next();
      node.children.push_back(std::move(lhs));
      node.children.push_back(binary(prec + 1));
      close(node);
      lhs = std::move(node);
    }
  }

  bool starts_cast_operand() const {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Identifier:
      case TokenKind::Number:
      case TokenKind::String:
      case TokenKind::Char:
        return true;
      case TokenKind::Keyword:
        return t.text == "this" || t.text == "super" || t.text == "new" ||
               t.text == "true" || t.text == "false" || t.text == "null" ||
               is_primitive_type(t.text);
      case TokenKind::Operator:
        return t.text == "(" || t.text == "!" || t.text == "~";
      default:
        return false;
    }
  }

  SyntaxNode unary() {
    const std::size_t begin = pos_;
    const Token& t = peek();
    if (t.kind == TokenKind::Operator &&
        (t.text == "++" || t.text == "--" || t.text == "+" || t.text == "-" ||
         t.text == "!" || t.text == "~")) {
      SyntaxNode p = make(NodeLabel{NodeKind::PrefixExpression, t.text}, begin);
      next();
      p.children.push_back(unary());
      close(p);
      return p;
    }
    if (t.is_op("(") && !lambda_ahead()) {
      const State s = save();
      try {
        next();
        const bool primitive =
            peek().kind == TokenKind::Keyword && is_primitive_type(peek().text);
        const std::size_t type_begin = pos_;
        std::string type = parse_type();
        while (accept_op("&")) type += "&" + parse_type();
        expect_op(")");
        if (primitive || starts_cast_operand() || lambda_ahead()) {
          SyntaxNode c = make(NodeKind::CastExpression, begin);
          SyntaxNode ty = make(NodeLabel{NodeKind::TypeName, type}, type_begin);
          c.children.push_back(std::move(ty));
          c.children.push_back(lambda_ahead() ? lambda() : unary());
          close(c);
          return c;
        }
      } catch (const ParseFailure&) {
      }
      restore(s);
    }
    return postfix(primary());
  }

  SyntaxNode arguments_into(SyntaxNode call) {
    expect_op("(");
    while (!at_op(")")) {
      call.children.push_back(expression());
      if (!accept_op(",")) break;
    }
    expect_op(")");
    close(call);
    return call;
  }

  static bool chain_spelling(const SyntaxNode& n, std::string& out) {
    if (n.label.kind == NodeKind::SimpleName) {
      out = *n.label.text;
      return true;
    }
    if (n.label.kind == NodeKind::FieldAccess && !n.children.empty()) {
      std::string head;
      if (!chain_spelling(n.children[0], head)) return false;
      out = head + "." + *n.label.text;
      return true;
    }
    return false;
  }

  SyntaxNode postfix(SyntaxNode expr) {
    const std::size_t begin = expr.begin;
    while (true) {
      if (at_op(".")) {
        next();
        if (at_op("<")) {
          type_arguments();
          const std::string name = expect_ident();
          SyntaxNode call =
              make(NodeLabel{NodeKind::MethodInvocation, name}, begin);
          call.has_receiver = true;
          call.children.push_back(std::move(expr));
          expr = arguments_into(std::move(call));
        } else if (at_ident()) {
          const std::string name = peek().text;
          next();
          if (at_op("(")) {
            SyntaxNode call =
                make(NodeLabel{NodeKind::MethodInvocation, name}, begin);
            call.has_receiver = true;
            call.children.push_back(std::move(expr));
            expr = arguments_into(std::move(call));
          } else {
            SyntaxNode field = make(NodeLabel{NodeKind::FieldAccess, name}, begin);
            field.children.push_back(std::move(expr));
            close(field);
            expr = std::move(field);
          }
        } else if (at_kw("class")) {
          std::string spelling;
          if (!chain_spelling(expr, spelling)) fail("bad class literal");
          next();
          SyntaxNode lit = make(NodeKind::TypeLiteral, begin);
          SyntaxNode ty = make(NodeLabel{NodeKind::TypeName, spelling}, begin);
          lit.children.push_back(std::move(ty));
          close(lit);
          expr = std::move(lit);
        } else if (at_kw("this")) {
          next();
          SyntaxNode th = make(NodeKind::ThisExpression, begin);
          th.children.push_back(std::move(expr));
          close(th);
          expr = std::move(th);
        } else {
          fail("unsupported member access");
        }
      } else if (at_op("[")) {
        next();
        SyntaxNode access = make(NodeKind::ArrayAccess, begin);
        access.children.push_back(std::move(expr));
        access.children.push_back(expression());
        expect_op("]");
        close(access);
        expr = std::move(access);
      } else if (at_op("::")) {
        next();
        std::string name;
        if (accept_kw("new")) {
          name = "new";
        } else {
          name = expect_ident();
        }
        SyntaxNode ref = make(NodeLabel{NodeKind::MethodReference, name}, begin);
        ref.children.push_back(std::move(expr));
        close(ref);
        expr = std::move(ref);
      } else if ((at_op("++") || at_op("--")) && !gt_split_) {
        SyntaxNode p =
            make(NodeLabel{NodeKind::PostfixExpression, peek().text}, begin);
        next();
        p.children.push_back(std::move(expr));
        close(p);
        expr = std::move(p);
      } else {
        return expr;
      }
    }
  }

  SyntaxNode primary() {
    const std::size_t begin = pos_;
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Number: {
        SyntaxNode n(NodeLabel{NodeKind::NumberLiteral, t.text});
        next();
        n.begin = begin;
        close(n);
        return n;
      }
      case TokenKind::String: {
        SyntaxNode n(NodeLabel{NodeKind::StringLiteral, t.text});
        next();
        n.begin = begin;
        close(n);
        return n;
      }
      case TokenKind::Char: {
        SyntaxNode n(NodeLabel{NodeKind::CharacterLiteral, t.text});
        next();
        n.begin = begin;
        close(n);
        return n;
      }
      case TokenKind::Identifier: {
        const std::string name = t.text;
        if (at_op("(", 1)) {
          next();
          SyntaxNode call =
              make(NodeLabel{NodeKind::MethodInvocation, name}, begin);
          return arguments_into(std::move(call));
        }
        if (at_op("[", 1) && at_op("]", 2)) {
          // Foo[].class / Foo[]::new
          std::string type = parse_type();
          SyntaxNode ty = make(NodeLabel{NodeKind::TypeName, type}, begin);
          if (at_op(".") && at_kw("class", 1)) {
            next();
            next();
            SyntaxNode lit = make(NodeKind::TypeLiteral, begin);
            lit.children.push_back(std::move(ty));
            close(lit);
            return lit;
          }
          if (at_op("::")) return ty;
          fail("unexpected array type");
        }
        if (at_op("<", 1)) {
          // Generic type as method-reference receiver: List<String>::new
          const State s = save();
          try {
            std::string type = parse_type();
            if (at_op("::")) return make(NodeLabel{NodeKind::TypeName, type}, begin);
          } catch (const ParseFailure&) {
          }
          restore(s);
        }
        SyntaxNode n(NodeLabel{NodeKind::SimpleName, name});
        n.begin = n.token = begin;
        next();
        close(n);
        return n;
      }
      case TokenKind::Keyword: {
        if (t.text == "true" || t.text == "false") {
          SyntaxNode n(NodeLabel{NodeKind::BooleanLiteral, t.text});
          next();
          n.begin = begin;
          close(n);
          return n;
        }
        if (t.text == "null") {
          next();
          return make(NodeKind::NullLiteral, begin);
        }
        if (t.text == "this") {
          next();
          if (at_op("(")) {
            SyntaxNode call =
                make(NodeLabel{NodeKind::MethodInvocation, "this"}, begin);
            return arguments_into(std::move(call));
          }
          return make(NodeKind::ThisExpression, begin);
        }
        if (t.text == "super") {
          next();
          if (at_op("(")) {
            SyntaxNode call =
                make(NodeLabel{NodeKind::MethodInvocation, "super"}, begin);
            return arguments_into(std::move(call));
          }
          return make(NodeKind::SuperExpression, begin);
        }
        if (t.text == "new") return creation();
        if (is_primitive_type(t.text) || t.text == "void") {
          std::string type = parse_type();
          SyntaxNode ty = make(NodeLabel{NodeKind::TypeName, type}, begin);
          if (at_op(".") && at_kw("class", 1)) {
            next();
            next();
            SyntaxNode lit = make(NodeKind::TypeLiteral, begin);
            lit.children.push_back(std::move(ty));
            close(lit);
            return lit;
          }
          if (at_op("::")) return ty;
          fail("unexpected primitive type");
        }
        fail("unexpected keyword '" + t.text + "'");
      }
      case TokenKind::Operator: {
        if (t.text == "(") {
          next();
          SyntaxNode p = make(NodeKind::ParenthesizedExpression, begin);
          p.children.push_back(expression());
          expect_op(")");
          close(p);
          return p;
        }
        fail("unexpected '" + t.text + "'");
      }
      default:
        fail("unexpected token");
    }
  }

  SyntaxNode creation() {
    const std::size_t begin = pos_;
    next();  // new
    while (at_op("@")) skip_annotation();
    const std::size_t type_begin = pos_;
    // Element/class type without array dimensions.
    std::string type;
    const Token& t = peek();
    if (t.kind == TokenKind::Keyword && is_primitive_type(t.text)) {
      type = t.text;
      next();
    } else if (t.kind == TokenKind::Identifier) {
      type = t.text;
      next();
      if (at_op("<")) type += type_arguments();
      while (at_op(".") && at_ident(1)) {
        next();
        type += "." + peek().text;
        next();
        if (at_op("<")) type += type_arguments();
      }
    } else {
      fail("expected type after 'new'");
    }

    if (at_op("[")) {
      SyntaxNode arr = make(NodeKind::ArrayCreation, begin);
      std::vector<SyntaxNode> dims;
      std::string dims_text;
      while (at_op("[")) {
        next();
        if (!at_op("]")) dims.push_back(expression());
        expect_op("]");
        dims_text += "[]";
      }
      arr.children.push_back(
          make(NodeLabel{NodeKind::TypeName, type + dims_text}, type_begin));
      for (auto& d : dims) arr.children.push_back(std::move(d));
      if (at_op("{")) arr.children.push_back(array_initializer());
      close(arr);
      return arr;
    }

    SyntaxNode obj = make(NodeKind::ClassInstanceCreation, begin);
    obj.children.push_back(make(NodeLabel{NodeKind::TypeName, type}, type_begin));
    obj = arguments_into(std::move(obj));
    if (at_op("{")) obj.children.push_back(class_body());
    close(obj);
    return obj;
  }

  SyntaxNode class_body() {
    const std::size_t begin = pos_;
    expect_op("{");
    SyntaxNode body = make(NodeKind::AnonymousClassBody, begin);
    while (!at_op("}")) {
      if (at_end()) hard_fail("unexpected end of input inside class body");
      const State s = save();
      try {
        body.children.push_back(method().root);
        continue;
      } catch (const ParseFailure&) {
        restore(s);
      }
      body.children.push_back(raw_statement());
    }
    next();
    close(body);
    return body;
  }

  // --------------------------------------------------------------- method --

  void skip_header_prefix(bool* annotated_test) {
    while (true) {
      if (at_op("@") && !at_kw("interface", 1)) {
        next();
        std::string last = expect_ident();
        while (at_op(".") && at_ident(1)) {
          next();
          last = expect_ident();
        }
        if (annotated_test && last == "Test") *annotated_test = true;
        if (at_op("(")) skip_balanced("(", ")");
      } else if (is_modifier(peek())) {
        next();
      } else {
        return;
      }
    }
  }

  MethodSyntax method() {
    MethodSyntax m;
    m.begin = pos_;
    skip_header_prefix(nullptr);
    if (at_op("<")) type_arguments();
    parse_type();
    if (!at_ident()) fail("expected method name");
    m.name_token = pos_;
    m.root.label = NodeLabel{NodeKind::MethodDeclaration, peek().text};
    m.root.begin = m.begin;
    next();
    expect_op("(");
    while (!at_op(")")) {
      const std::size_t var_begin = pos_;
      skip_variable_modifiers();
      const std::size_t type_begin = pos_;
      std::string type = parse_type();
      if (accept_op("...")) type += "...";
      SyntaxNode var = make(NodeKind::SingleVariableDeclaration, var_begin);
      var.children.push_back(type_node(type, type_begin));
      var.children.push_back(declared_name(pos_));
      while (at_op("[") && at_op("]", 1)) {
        next();
        next();
      }
      close(var);
      m.root.children.push_back(std::move(var));
      if (!accept_op(",")) break;
    }
    expect_op(")");
    while (at_op("[") && at_op("]", 1)) {
      next();
      next();
    }
    if (accept_kw("throws")) {
      do {
        parse_type();
      } while (accept_op(","));
    }
    if (!at_op("{")) fail("expected method body");
    m.root.children.push_back(block());
    m.end = pos_;
    m.root.end = pos_;
    return m;
  }

  std::optional<MethodHeader> header() {
    MethodHeader h{pos_, kNoToken, kNoToken, false};
    try {
      skip_header_prefix(&h.annotated_test);
      if (at_op("<")) type_arguments();
      parse_type();
      if (!at_ident() || !at_op("(", 1)) return std::nullopt;
      h.name_token = pos_;
      next();
      skip_balanced("(", ")");
      while (at_op("[") && at_op("]", 1)) {
        next();
        next();
      }
      if (accept_kw("throws")) {
        do {
          parse_type();
        } while (accept_op(","));
      }
      if (!at_op("{")) return std::nullopt;
      h.body_open = pos_;
      return h;
    } catch (const ParseFailure&) {
      return std::nullopt;
    }
  }

 private:
  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
  std::size_t gt_split_ = 0;
};

}  // namespace

MethodSyntax parse_method(const std::vector<Token>& tokens, std::size_t start) {
  Parser p(tokens);
  p.seek(start);
  try {
    return p.method();
  } catch (const ParseFailure& f) {
    const Token& t = tokens[std::min(f.at, tokens.size() - 1)];
    throw FrontendError("cannot parse method declaration: " + f.what, t.line,
                        t.column);
  }
}

std::optional<MethodHeader> match_method_header(const std::vector<Token>& tokens,
                                                std::size_t pos) {
  Parser p(tokens);
  p.seek(pos);
  return p.header();
}

std::size_t matching_brace(const std::vector<Token>& tokens, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < tokens.size(); ++i) {
    if (tokens[i].is_op("{")) ++depth;
    if (tokens[i].is_op("}") && --depth == 0) return i + 1;
  }
  return kNoToken;
}

AstTree to_tree(const SyntaxNode& root) {
  TreeBuilder builder;
  struct Item {
    const SyntaxNode* node;
    NodeIndex parent;
  };
  std::vector<Item> stack{{&root, kNoNode}};
  while (!stack.empty()) {
    auto [node, parent] = stack.back();
    stack.pop_back();
    NodeIndex id = parent == kNoNode ? builder.add_root(node->label)
                                     : builder.add_child(parent, node->label);
    // TreeBuilder keeps insertion order per parent, so push reversed and pop
    // in order: children must be added left to right.
    for (auto it = node->children.rbegin(); it != node->children.rend(); ++it)
      stack.push_back({&*it, id});
  }
  return builder.build();
}

}  // namespace tsmin::frontend
