#include "tsmin/frontend.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <sstream>

#include "tsmin/error.hpp"
#include "tsmin/lexer.hpp"
#include "tsmin/syntax.hpp"

namespace tsmin::frontend {

std::set<std::string> PreprocessConfig::default_assertion_names() {
  // org.junit.Assert (JUnit 4.13).
  return {"assertTrue",      "assertFalse",   "assertEquals",
          "assertNotEquals", "assertArrayEquals", "assertNull",
          "assertNotNull",   "assertSame",    "assertNotSame",
          "assertThat",      "assertThrows",  "fail"};
}

// ------------------------------------------------------------- extraction --

std::vector<ExtractedMethod> extract_test_methods(std::string_view file_source) {
  const auto all = lex(file_source, {.keep_comments = true});
  std::vector<Token> tokens;
  std::vector<std::size_t> origin;  // index into `all`
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i].kind == TokenKind::Comment || all[i].kind == TokenKind::DocComment)
      continue;
    tokens.push_back(all[i]);
    origin.push_back(i);
  }

  std::vector<ExtractedMethod> out;
  std::size_t i = 0;
  while (i + 1 < tokens.size()) {
    const bool member_start =
        i == 0 || tokens[i - 1].is_op(";") || tokens[i - 1].is_op("{") ||
        tokens[i - 1].is_op("}");
    if (!member_start) {
      ++i;
      continue;
    }
    auto header = match_method_header(tokens, i);
    if (!header) {
      ++i;
      continue;
    }
    const std::size_t end = matching_brace(tokens, header->body_open);
    if (end == kNoToken) {
      const Token& t = tokens[header->body_open];
      throw FrontendError("unbalanced method body", t.line, t.column);
    }
    const std::string& name = tokens[header->name_token].text;
    if (header->annotated_test || name.rfind("test", 0) == 0) {
      std::size_t start = tokens[header->begin].offset;
      int line = tokens[header->begin].line;
      const std::size_t orig = origin[header->begin];
      if (orig > 0 && all[orig - 1].kind == TokenKind::DocComment) {
        start = all[orig - 1].offset;
        line = all[orig - 1].line;
      }
      const std::size_t stop = tokens[end - 1].offset + 1;
      out.push_back({name, std::string(file_source.substr(start, stop - start)),
                     line});
    }
    i = end;
  }
  return out;
}

std::vector<ExtractedMethod> extract_test_methods(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::Io, "cannot read " + path.string());
  try {
    return extract_test_methods(std::string_view(buf.str()));
  } catch (const FrontendError& e) {
    throw Error(ErrorKind::Frontend, path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------- preprocessing --

namespace {

std::vector<std::regex> compile_patterns(const std::vector<std::string>& patterns) {
  std::vector<std::regex> out;
  for (const auto& p : patterns) {
    try {
      if (p.rfind("(?i)", 0) == 0)
        out.emplace_back(p.substr(4), std::regex::ECMAScript | std::regex::icase);
      else
        out.emplace_back(p, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
      throw Error(ErrorKind::Config,
                  "invalid logging receiver pattern '" + p + "': " + e.what());
    }
  }
  return out;
}

std::string receiver_spelling(const SyntaxNode& n) {
  switch (n.label.kind) {
    case NodeKind::SimpleName:
      return *n.label.text;
    case NodeKind::ThisExpression:
      return "this";
    case NodeKind::FieldAccess:
      return receiver_spelling(n.children[0]) + "." + *n.label.text;
    case NodeKind::MethodInvocation:
      return (n.has_receiver ? receiver_spelling(n.children[0]) + "." : "") +
             *n.label.text + "()";
    default:
      return "?";
  }
}

class Preprocessor {
 public:
  Preprocessor(const std::vector<Token>& tokens, const MethodSyntax& method,
               const PreprocessConfig& config)
      : tokens_(tokens),
        method_(method),
        config_(config),
        logging_patterns_(compile_patterns(config.logging_receiver_patterns)) {}

  std::string run() {
    collect_locals(method_.root);
    visit(method_.root, nullptr);

    // Emission list: token indices, or kNoToken for a synthetic ';'.
    std::vector<std::size_t> items;
    for (std::size_t i = method_.begin; i < method_.end;) {
      auto drop = drops_.find(i);
      if (drop == drops_.end()) {
        items.push_back(i++);
        continue;
      }
      for (std::size_t t : drop->second.replacement) items.push_back(t);
      i = drop->second.end;
    }

    std::map<std::string, std::string> renamed;
    std::vector<std::string> texts;
    texts.reserve(items.size());
    for (std::size_t t : items) {
      if (t == kNoToken) {
        texts.emplace_back(";");
      } else if (t == method_.name_token) {
        texts.push_back(config_.rename_target);
      } else if (rename_tokens_.count(t)) {
        const std::string& name = tokens_[t].text;
        auto it = renamed.find(name);
        if (it == renamed.end())
          it = renamed
                   .emplace(name, "id_" + std::to_string(renamed.size() + 1))
                   .first;
        texts.push_back(it->second);
      } else {
        texts.push_back(tokens_[t].text);
      }
    }
    return format_tokens(texts);
  }

 private:
  struct Drop {
    std::size_t end;
    std::vector<std::size_t> replacement;
  };

  void collect_locals(const SyntaxNode& n) {
    if (n.label.kind == NodeKind::SimpleName && n.declares)
      locals_.insert(*n.label.text);
    for (const auto& c : n.children) collect_locals(c);
  }

  bool is_assertion(const SyntaxNode& expr) const {
    const SyntaxNode* n = &expr;
    while (n->label.kind == NodeKind::MethodInvocation) {
      if (config_.assertion_method_names.count(*n->label.text)) return true;
      if (!n->has_receiver) break;
      n = &n->children[0];
    }
    return false;
  }

  bool is_logging(const SyntaxNode& expr) const {
    if (expr.label.kind != NodeKind::MethodInvocation) return false;
    if (config_.logging_method_names.count(*expr.label.text)) return true;
    if (!expr.has_receiver) return false;
    const std::string path = receiver_spelling(expr.children[0]);
    std::string root = path;
    if (root.rfind("this.", 0) == 0) root = root.substr(5);
    root = root.substr(0, root.find('.'));
    for (const auto& re : logging_patterns_)
      if (std::regex_search(path, re) || std::regex_search(root, re))
        return true;
    return false;
  }

  static bool is_statement_expression(const SyntaxNode& n) {
    return n.label.kind == NodeKind::MethodInvocation ||
           n.label.kind == NodeKind::ClassInstanceCreation;
  }

  void visit(const SyntaxNode& n, const SyntaxNode* parent) {
    if (n.label.kind == NodeKind::ExpressionStatement && !n.children.empty()) {
      const SyntaxNode& expr = n.children[0];
      const bool assertion = is_assertion(expr);
      if (assertion || is_logging(expr)) {
        Drop drop{n.end, {}};
        if (assertion && config_.keep_assertion_args) {
          const std::size_t first = expr.has_receiver ? 1 : 0;
          for (std::size_t a = first; a < expr.children.size(); ++a) {
            const SyntaxNode& arg = expr.children[a];
            if (!is_statement_expression(arg)) continue;
            for (std::size_t t = arg.begin; t < arg.end; ++t) {
              drop.replacement.push_back(t);
              mark_rename(t);
            }
            drop.replacement.push_back(kNoToken);
          }
        }
        const bool in_statement_list =
            parent && (parent->label.kind == NodeKind::Block ||
                       parent->label.kind == NodeKind::SwitchStatement);
        if (drop.replacement.empty() && !in_statement_list)
          drop.replacement.push_back(kNoToken);
        drops_.emplace(n.begin, std::move(drop));
        return;
      }
    }
    if (n.label.kind == NodeKind::SimpleName && n.token != kNoToken &&
        locals_.count(*n.label.text))
      rename_tokens_.insert(n.token);
    if (n.label.kind == NodeKind::RawToken) mark_rename(n.token);
    for (const auto& c : n.children) visit(c, &n);
  }

  // Identifier tokens inside raw statements and kept assertion arguments:
  // locals unless used as a member name or a call.
  void mark_rename(std::size_t t) {
    const Token& tok = tokens_[t];
    if (tok.kind != TokenKind::Identifier || !locals_.count(tok.text)) return;
    if (t > 0 && tokens_[t - 1].is_op(".")) return;
    if (t + 1 < tokens_.size() && tokens_[t + 1].is_op("(")) return;
    rename_tokens_.insert(t);
  }

  const std::vector<Token>& tokens_;
  const MethodSyntax& method_;
  const PreprocessConfig& config_;
  std::vector<std::regex> logging_patterns_;
  std::set<std::string> locals_;
  std::set<std::size_t> rename_tokens_;
  std::map<std::size_t, Drop> drops_;
};

MethodSyntax parse_whole_method(const std::vector<Token>& tokens) {
  MethodSyntax m = parse_method(tokens, 0);
  if (tokens[m.end].kind != TokenKind::End) {
    const Token& t = tokens[m.end];
    throw FrontendError("unexpected tokens after method body", t.line, t.column);
  }
  return m;
}

bool wordy(const std::string& t) {
  if (t.empty()) return false;
  const unsigned char c = static_cast<unsigned char>(t[0]);
  return std::isalnum(c) || c == '_' || c == '$' || c == '"' || c == '\'' ||
         c >= 0x80 || (c == '.' && t.size() > 1);
}

bool spaced_binary(const std::string& t) {
  static const std::set<std::string> ops = {
      "=",  "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=",
      ">>>=", "->", "?", ":",  "&&", "||", "==", "!=", "<=", ">=", "+",
      "-",  "*",  "/",  "%",  "&",  "|",  "^"};
  return ops.count(t) > 0;
}

bool control_keyword(const std::string& t) {
  return t == "if" || t == "for" || t == "while" || t == "switch" ||
         t == "catch" || t == "synchronized" || t == "try";
}

}  // namespace

std::string format_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  int indent = 0;
  bool newline = false;
  int paren = 0;
  std::vector<int> saved_paren;  // per open block brace
  std::vector<bool> brace_is_block;
  bool prev_binary = false;
  int generic_depth = 0;

  auto start_line = [&] {
    out += '\n';
    out.append(static_cast<std::size_t>(std::max(indent, 0)) * 4, ' ');
  };

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    const std::string prev = i ? tokens[i - 1] : std::string();
    const std::string next = i + 1 < tokens.size() ? tokens[i + 1] : std::string();

    const bool inline_ctx = !brace_is_block.empty() && !brace_is_block.back();
    bool block_open = false;
    if (t == "{")
      block_open = !(prev == "=" || prev == "]" ||
                     (inline_ctx && (prev == "," || prev == "{")));

    // Binary operator: follows an operand.
    const bool after_operand =
        (wordy(prev) && prev != "return" && prev != "case" && prev != "throw") ||
        prev == ")" || prev == "]";
    // '<' opens type arguments after a type-like name or '.', otherwise it
    // compares; '>' and '>>' close open type arguments first.
    bool relational = false;
    if (t == "<") {
      const bool type_like =
          prev == "." || (!prev.empty() && std::isupper(static_cast<unsigned char>(prev[0])));
      if (type_like || !after_operand)
        ++generic_depth;
      else
        relational = true;
    } else if (t == ">" || t == ">>" || t == ">>>") {
      const int closes = static_cast<int>(t.size());
      if (generic_depth >= closes)
        generic_depth -= closes;
      else if (t == ">")
        relational = after_operand;
    }
    const bool binary = (relational || spaced_binary(t)) &&
                        (after_operand ||
                         prev == "++" || prev == "--" || t == "->" || t == "=" ||
                         t == "?" || t == ":");

    if (t == "}" && !brace_is_block.empty() && brace_is_block.back()) {
      --indent;
      newline = true;
    }

    if (newline) {
      start_line();
      newline = false;
    } else if (!out.empty()) {
      bool space = false;
      if (binary || prev_binary) {
        space = true;
      } else if (t == "{" || prev == "," || prev == ";") {
        space = true;
      } else if (prev == "{") {
        space = false;
      } else if (t == "(" ) {
        space = control_keyword(prev);
      } else if (t == "}") {
        space = false;
      } else if (t == ")" || t == "]" || t == ";" || t == "," || t == "." ||
                 t == "[" || t == "::" || t == "++" || t == "--") {
        space = false;
      } else if (prev == "(" || prev == "[" || prev == "." || prev == "@" ||
                 prev == "::" || prev == "!" || prev == "~") {
        space = false;
      } else if (wordy(t) && (wordy(prev) || prev == ")" || prev == "]" ||
                              prev == "}" || prev == ">")) {
        space = true;
      }
      if (space) out += ' ';
    }
    out += t;
    prev_binary = binary;

    if (t == "(") ++paren;
    if (t == ")") --paren;
    if (t == "{") {
      brace_is_block.push_back(block_open);
      if (block_open) {
        saved_paren.push_back(paren);
        paren = 0;
        if (next == "}") {
          // Empty block: "{ }".
          out += " }";
          ++i;
          brace_is_block.pop_back();
          paren = saved_paren.back();
          saved_paren.pop_back();
          const std::string after = i + 1 < tokens.size() ? tokens[i + 1] : "";
          if (!(after.empty() || after == "else" || after == "catch" ||
                after == "finally" || after == "while" || after == ")" ||
                after == ";" || after == "," || after == "."))
            newline = true;
          continue;
        }
        ++indent;
        newline = true;
      }
    } else if (t == "}" && !brace_is_block.empty()) {
      const bool was_block = brace_is_block.back();
      brace_is_block.pop_back();
      if (was_block) {
        paren = saved_paren.back();
        saved_paren.pop_back();
        if (!(next.empty() || next == "else" || next == "catch" ||
              next == "finally" || next == "while" || next == ")" ||
              next == ";" || next == "," || next == "."))
          newline = true;
      }
    } else if (t == ";" && paren == 0) {
      newline = true;
    }
    if (t == ";" || t == "{" || t == "}") generic_depth = 0;
  }
  return out;
}

std::string preprocess(std::string_view method_source,
                       const PreprocessConfig& config) {
  const auto tokens = lex(method_source);
  const MethodSyntax method = parse_whole_method(tokens);
  return Preprocessor(tokens, method, config).run();
}

AstTree to_ast(std::string_view preprocessed_source) {
  const auto tokens = lex(preprocessed_source);
  return to_tree(parse_whole_method(tokens).root);
}

TestCase make_test_case(std::string id, std::filesystem::path file,
                        const ExtractedMethod& method,
                        const PreprocessConfig& config) {
  std::string pre = preprocess(method.source, config);
  AstTree tree = to_ast(pre);
  Digest digest = tree.digest();
  return TestCase{std::move(id), std::move(file), method.name, std::move(pre),
                  std::move(tree), digest};
}

}  // namespace tsmin::frontend
