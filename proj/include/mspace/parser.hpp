#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mspace/machine.hpp"

namespace mspace {

// Syntax error with 1-based source position.
struct ParseError : std::runtime_error {
  ParseError(std::size_t line, std::size_t col, const std::string& what)
      : std::runtime_error("syntax error at " + std::to_string(line) + ":" +
                           std::to_string(col) + ": " + what),
        line(line),
        col(col) {}
  std::size_t line, col;
};

namespace detail {

// Recursive-descent parser for machine expressions:
//   expr := term ('|' term)*
//   term := atom ('&' atom)*
//   atom := generator | '(' expr ')' | 'T' | 'F'
//   generator := 'z' nat | 'u' nat | 'l"' word '"' | 'i(' rational ',' rational ')'
class MachineParser {
 public:
  explicit MachineParser(std::string_view text) : text_(text) {}

  FormalMachine parse() {
    FormalMachine m = expr();
    skip_ws();
    if (!eof()) fail("trailing input");
    return m;
  }

 private:
  FormalMachine expr() {
    FormalMachine m = term();
    for (;;) {
      skip_ws();
      if (!eat('|')) return m;
      m = join(m, term());
    }
  }

  FormalMachine term() {
    FormalMachine m = atom();
    for (;;) {
      skip_ws();
      if (!eat('&')) return m;
      m = meet(m, atom());
    }
  }

  FormalMachine atom() {
    skip_ws();
    if (eof()) fail("expected a machine expression");
    const char c = peek();
    switch (c) {
      case '(': {
        advance();
        FormalMachine m = expr();
        skip_ws();
        if (!eat(')')) fail("expected ')'");
        return m;
      }
      case 'T': advance(); return FormalMachine::top();
      case 'F': advance(); return FormalMachine::bottom();
      case 'z': advance(); return FormalMachine::of(GeneratorId::digit(nat(), false));
      case 'u': advance(); return FormalMachine::of(GeneratorId::digit(nat(), true));
      case 'l': {
        advance();
        if (!eat('"')) fail("expected '\"' after 'l'");
        std::string word;
        while (!eof() && peek() != '"') {
          if (peek() != '0' && peek() != '1') fail("prefix words are binary");
          word.push_back(peek());
          advance();
        }
        if (!eat('"')) fail("unterminated prefix word");
        return FormalMachine::of(GeneratorId::prefix(std::move(word)));
      }
      case 'i': {
        advance();
        skip_ws();
        if (!eat('(')) fail("expected '(' after 'i'");
        Rational lo = rational();
        skip_ws();
        if (!eat(',')) fail("expected ',' in interval");
        Rational hi = rational();
        skip_ws();
        if (!eat(')')) fail("expected ')' after interval");
        try {
          return FormalMachine::of(GeneratorId::interval(std::move(lo), std::move(hi)));
        } catch (const std::invalid_argument& e) {
          fail(e.what());
        }
      }
      default: fail(std::string("unexpected character '") + c + "'");
    }
    return {};  // unreachable
  }

  std::uint64_t nat() {
    skip_ws();
    if (eof() || !std::isdigit(static_cast<unsigned char>(peek()))) fail("expected a number");
    std::uint64_t v = 0;
    while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + static_cast<std::uint64_t>(peek() - '0');
      advance();
    }
    return v;
  }

  Rational rational() {
    skip_ws();
    bool neg = false;
    if (!eof() && peek() == '-') { neg = true; advance(); }
    BigInt num(nat());
    if (neg) num = -num;
    skip_ws();
    if (eat('/')) {
      BigInt den{nat()};
      if (den == 0) fail("zero denominator");
      return Rational(num, den);
    }
    return Rational(num, BigInt(1));
  }

  // -- lexing ------------------------------------------------------------

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  void advance() {
    if (text_[pos_] == '\n') { ++line_; col_ = 1; }
    else ++col_;
    ++pos_;
  }
  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) advance();
  }
  bool eat(char c) {
    if (!eof() && peek() == c) { advance(); return true; }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, col_, what); }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1, col_ = 1;
};

}  // namespace detail

// Parse a machine expression into join-of-meets normal form.
inline FormalMachine parse_machine(std::string_view text) {
  return detail::MachineParser(text).parse();
}

// Canonical rendering; parse_machine(to_dsl(m)) == m for normal forms.
inline std::string to_dsl(const FormalMeet& b) {
  if (b.is_top()) return "T";
  std::string out;
  for (std::size_t i = 0; i < b.generators().size(); ++i) {
    if (i) out += " & ";
    out += b.generators()[i].to_string();
  }
  return out;
}

inline std::string to_dsl(const FormalMachine& m) {
  if (m.is_bottom()) return "F";
  const bool many = m.branches().size() > 1;
  std::string out;
  for (std::size_t i = 0; i < m.branches().size(); ++i) {
    if (i) out += " | ";
    const auto& b = m.branches()[i];
    if (many && b.size() > 1) out += "(" + to_dsl(b) + ")";
    else out += to_dsl(b);
  }
  return out;
}

}  // namespace mspace
