#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tsmin::frontend {

enum class TokenKind {
  Identifier,
  Keyword,
  Number,
  String,    // includes text blocks
  Char,
  Operator,  // punctuation and operators, e.g. "(", "->", ">>>=", "@"
  Comment,     // only produced when comments are requested
  DocComment,  // "/** ... */", likewise
  End,
};

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t offset;  // byte offset into the lexed source
  int line;
  int column;

  bool is(TokenKind k, std::string_view t) const {
    return kind == k && text == t;
  }
  bool is_op(std::string_view t) const { return is(TokenKind::Operator, t); }
  bool is_keyword(std::string_view t) const {
    return is(TokenKind::Keyword, t);
  }
};

struct LexOptions {
  bool keep_comments = false;
};

/// Java-style tokenizer. The returned vector always ends with an End token.
/// Throws FrontendError on unterminated strings, characters or comments.
///
/// `>>` and `>>>` are emitted as single operators; the parser splits them
/// when closing type-argument lists.
std::vector<Token> lex(std::string_view source, LexOptions options = {});

bool is_java_keyword(std::string_view word);
bool is_primitive_type(std::string_view word);

}  // namespace tsmin::frontend
