/**
 * @file lexer.hpp
 * @brief Tokenizer for the OpenQASM-style input language.
 */

#pragma once

#include "qdbg/source.hpp"

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace qdbg {

enum class TokenKind {
  Identifier,
  Number,
  String,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  LParen,
  RParen,
  Semicolon,
  Comma,
  Arrow,
  Star,
  Slash,
  Plus,
  Minus,
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  double value = 0.0;    // Number only
  bool imaginary = false; // Number carried an `i` suffix
  SourceSpan span;
};

/// Tokenizes the whole input. `//` comments are stripped. Identifiers may
/// contain a `-` when a letter follows (this is what makes `assert-ent`,
/// `assert-sup` and `assert-eq` single tokens).
class Lexer {
public:
  explicit Lexer(std::string_view source, int file_id = 0)
      : src_(source), file_id_(file_id) {}

  std::vector<Token> tokenize() {
    std::vector<Token> tokens;
    while (true) {
      skip_trivia();
      Token tok = next_token();
      const bool done = tok.kind == TokenKind::End;
      tokens.push_back(std::move(tok));
      if (done) {
        break;
      }
    }
    return tokens;
  }

private:
  [[nodiscard]] bool eof() const { return pos_ >= src_.size(); }
  [[nodiscard]] char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  char advance() {
    const char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_trivia() {
    while (!eof()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (!eof() && peek() != '\n') {
          advance();
        }
      } else {
        break;
      }
    }
  }

  [[nodiscard]] SourceSpan here() const { return {line_, col_, col_, file_id_}; }

  Token next_token() {
    if (eof()) {
      Token tok;
      tok.kind = TokenKind::End;
      tok.span = here();
      return tok;
    }
    const SourceSpan start = here();
    const char c = peek();
    if (std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_') {
      return lex_identifier(start);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) != 0) {
      return lex_number(start);
    }
    if (c == '"') {
      return lex_string(start);
    }
    advance();
    Token tok;
    tok.span = start;
    tok.text = std::string(1, c);
    switch (c) {
    case '{':
      tok.kind = TokenKind::LBrace;
      return tok;
    case '}':
      tok.kind = TokenKind::RBrace;
      return tok;
    case '[':
      tok.kind = TokenKind::LBracket;
      return tok;
    case ']':
      tok.kind = TokenKind::RBracket;
      return tok;
    case '(':
      tok.kind = TokenKind::LParen;
      return tok;
    case ')':
      tok.kind = TokenKind::RParen;
      return tok;
    case ';':
      tok.kind = TokenKind::Semicolon;
      return tok;
    case ',':
      tok.kind = TokenKind::Comma;
      return tok;
    case '*':
      tok.kind = TokenKind::Star;
      return tok;
    case '/':
      tok.kind = TokenKind::Slash;
      return tok;
    case '+':
      tok.kind = TokenKind::Plus;
      return tok;
    case '-':
      if (peek() == '>') {
        advance();
        tok.kind = TokenKind::Arrow;
        tok.text = "->";
        tok.span.column_end = tok.span.column_start + 1;
        return tok;
      }
      tok.kind = TokenKind::Minus;
      return tok;
    default:
      throw ParseError("unexpected character '" + tok.text + "'", start);
    }
  }

  Token lex_identifier(SourceSpan start) {
    std::string text;
    while (!eof()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_') {
        text.push_back(advance());
      } else if (c == '-' &&
                 std::isalpha(static_cast<unsigned char>(peek(1))) != 0) {
        text.push_back(advance());
      } else {
        break;
      }
    }
    Token tok;
    tok.kind = TokenKind::Identifier;
    tok.text = std::move(text);
    tok.span = start;
    tok.span.column_end = col_ - 1;
    return tok;
  }

  Token lex_number(SourceSpan start) {
    std::string text;
    while (std::isdigit(static_cast<unsigned char>(peek())) != 0) {
      text.push_back(advance());
    }
    if (peek() == '.') {
      text.push_back(advance());
      while (std::isdigit(static_cast<unsigned char>(peek())) != 0) {
        text.push_back(advance());
      }
    }
    if (peek() == 'e' || peek() == 'E') {
      const char sign = peek(1);
      const char digit = sign == '+' || sign == '-' ? peek(2) : sign;
      if (std::isdigit(static_cast<unsigned char>(digit)) != 0) {
        text.push_back(advance());
        if (peek() == '+' || peek() == '-') {
          text.push_back(advance());
        }
        while (std::isdigit(static_cast<unsigned char>(peek())) != 0) {
          text.push_back(advance());
        }
      }
    }
    Token tok;
    tok.kind = TokenKind::Number;
    tok.value = std::stod(text);
    if (peek() == 'i') {
      advance();
      tok.imaginary = true;
      text.push_back('i');
    }
    tok.text = std::move(text);
    tok.span = start;
    tok.span.column_end = col_ - 1;
    return tok;
  }

  Token lex_string(SourceSpan start) {
    advance(); // opening quote
    std::string text;
    while (!eof() && peek() != '"') {
      if (peek() == '\n') {
        throw ParseError("unterminated string literal", start);
      }
      text.push_back(advance());
    }
    if (eof()) {
      throw ParseError("unterminated string literal", start);
    }
    advance(); // closing quote
    Token tok;
    tok.kind = TokenKind::String;
    tok.text = std::move(text);
    tok.span = start;
    tok.span.column_end = col_ - 1;
    return tok;
  }

  std::string_view src_;
  int file_id_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

} // namespace qdbg
