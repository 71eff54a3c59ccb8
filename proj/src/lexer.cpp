#include "tsmin/lexer.hpp"

#include <algorithm>
#include <cctype>

#include "tsmin/error.hpp"

namespace tsmin::frontend {

namespace {

constexpr std::string_view kKeywords[] = {
    "abstract", "assert",     "boolean",   "break",      "byte",
    "case",     "catch",      "char",      "class",      "const",
    "continue", "default",    "do",        "double",     "else",
    "enum",     "extends",    "final",     "finally",    "float",
    "for",      "goto",       "if",        "implements", "import",
    "instanceof", "int",      "interface", "long",       "native",
    "new",      "package",    "private",   "protected",  "public",
    "return",   "short",      "static",    "strictfp",   "super",
    "switch",   "synchronized", "this",    "throw",      "throws",
    "transient", "try",       "void",      "volatile",   "while",
    "true",     "false",      "null",
};

constexpr std::string_view kPrimitives[] = {
    "boolean", "byte", "char", "short", "int", "long", "float", "double"};

// Longest first within each leading character is enough for maximal munch.
constexpr std::string_view kOperators[] = {
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&",
    "||",   "==",  "!=",  "<=",  ">=",  "+=", "-=", "*=", "/=", "&=",
    "|=",   "^=",  "%=",  "<<",  ">>",  "(",  ")",  "{",  "}",  "[",
    "]",    ";",   ",",   ".",   "@",   "=",  ">",  "<",  "!",  "~",
    "?",    ":",   "+",   "-",   "*",   "/",  "&",  "|",
};

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$' ||
         static_cast<unsigned char>(c) >= 0x80;
}
bool ident_part(char c) {
  return ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
}

class Lexer {
 public:
  Lexer(std::string_view src, LexOptions opts) : src_(src), opts_(opts) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= src_.size()) break;
      const std::size_t start = pos_;
      const int line = line_, col = col_;
      char c = src_[pos_];
      auto emit = [&](TokenKind kind) {
        out.push_back(
            {kind, std::string(src_.substr(start, pos_ - start)), start, line, col});
      };
      if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        if (opts_.keep_comments) emit(TokenKind::Comment);
      } else if (c == '/' && peek(1) == '*') {
        const bool doc = peek(2) == '*' && peek(3) != '/';
        advance(2);
        while (true) {
          if (pos_ >= src_.size())
            throw FrontendError("unterminated comment", line, col);
          if (src_[pos_] == '*' && peek(1) == '/') {
            advance(2);
            break;
          }
          advance();
        }
        if (opts_.keep_comments)
          emit(doc ? TokenKind::DocComment : TokenKind::Comment);
      } else if (ident_start(c)) {
        while (pos_ < src_.size() && ident_part(src_[pos_])) advance();
        auto word = src_.substr(start, pos_ - start);
        emit(is_java_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier);
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
        number();
        emit(TokenKind::Number);
      } else if (c == '"') {
        if (peek(1) == '"' && peek(2) == '"')
          text_block(line, col);
        else
          quoted('"', "unterminated string literal", line, col);
        emit(TokenKind::String);
      } else if (c == '\'') {
        quoted('\'', "unterminated character literal", line, col);
        emit(TokenKind::Char);
      } else {
        bool matched = false;
        for (auto op : kOperators) {
          if (src_.substr(pos_, op.size()) == op) {
            advance(op.size());
            matched = true;
            break;
          }
        }
        if (!matched) {
          if (c == '^' || c == '%') {
            advance();
          } else {
            throw FrontendError(std::string("unexpected character '") + c + "'",
                                line, col);
          }
        }
        emit(TokenKind::Operator);
      }
    }
    out.push_back({TokenKind::End, "", src_.size(), line_, col_});
    return out;
  }

 private:
  char peek(std::size_t k) const {
    return pos_ + k < src_.size() ? src_[pos_ + k] : '\0';
  }

  void advance(std::size_t k = 1) {
    for (std::size_t i = 0; i < k && pos_ < src_.size(); ++i) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_space() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_])))
      advance();
  }

  void number() {
    auto digit = [](char ch) {
      return std::isdigit(static_cast<unsigned char>(ch)) || ch == '_';
    };
    if (src_[pos_] == '0' && std::string_view("xXbB").find(peek(1)) !=
                                 std::string_view::npos) {
      advance(2);
      while (pos_ < src_.size() &&
             (std::isxdigit(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_'))
        advance();
    } else {
      while (pos_ < src_.size() && digit(src_[pos_])) advance();
      if (peek(0) == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        advance();
        while (pos_ < src_.size() && digit(src_[pos_])) advance();
      }
      if ((peek(0) == 'e' || peek(0) == 'E') &&
          (std::isdigit(static_cast<unsigned char>(peek(1))) ||
           ((peek(1) == '+' || peek(1) == '-') &&
            std::isdigit(static_cast<unsigned char>(peek(2)))))) {
        advance(2);
        while (pos_ < src_.size() && digit(src_[pos_])) advance();
      }
    }
    if (std::string_view("lLfFdD").find(peek(0)) != std::string_view::npos &&
        peek(0) != '\0')
      advance();
  }

  void quoted(char quote, const char* message, int line, int col) {
    advance();
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n')
        throw FrontendError(message, line, col);
      char ch = src_[pos_];
      if (ch == '\\') {
        advance(2);
        continue;
      }
      advance();
      if (ch == quote) return;
    }
  }

  void text_block(int line, int col) {
    advance(3);
    while (true) {
      if (pos_ >= src_.size())
        throw FrontendError("unterminated text block", line, col);
      if (src_[pos_] == '\\') {
        advance(2);
        continue;
      }
      if (src_[pos_] == '"' && peek(1) == '"' && peek(2) == '"') {
        advance(3);
        return;
      }
      advance();
    }
  }

  std::string_view src_;
  LexOptions opts_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

bool is_java_keyword(std::string_view word) {
  return std::find(std::begin(kKeywords), std::end(kKeywords), word) !=
         std::end(kKeywords);
}

bool is_primitive_type(std::string_view word) {
  return std::find(std::begin(kPrimitives), std::end(kPrimitives), word) !=
         std::end(kPrimitives);
}

std::vector<Token> lex(std::string_view source, LexOptions options) {
  return Lexer(source, options).run();
}

}  // namespace tsmin::frontend
