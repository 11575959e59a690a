#include "strelcast/parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <map>

namespace strelcast::strel {

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

enum class Tok {
  end,
  ident,
  number,
  lparen,
  rparen,
  lbracket,
  rbracket,
  comma,
  bang,
  amp,
  bar,
  arrow,
  greater,
  less,
  minus,
  plus,
};

struct Token {
  Tok kind = Tok::end;
  std::string_view text;
  std::size_t line = 1;
  std::size_t column = 1;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::end: return "end of input";
    case Tok::ident: return "identifier";
    case Tok::number: return "number";
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::lbracket: return "'['";
    case Tok::rbracket: return "']'";
    case Tok::comma: return "','";
    case Tok::bang: return "'!'";
    case Tok::amp: return "'&'";
    case Tok::bar: return "'|'";
    case Tok::arrow: return "'->'";
    case Tok::greater: return "'>'";
    case Tok::less: return "'<'";
    case Tok::minus: return "'-'";
    case Tok::plus: return "'+'";
  }
  return "token";
}

class Lexer {
 public:
  Lexer(std::string_view text, std::size_t line, std::size_t column)
      : text_(text), line_(line), column_(column) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token tok;
      tok.line = line_;
      tok.column = column_;
      if (pos_ >= text_.size()) {
        tok.kind = Tok::end;
        out.push_back(tok);
        return out;
      }
      const char c = text_[pos_];
      const std::size_t start = pos_;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
          advance();
        }
        tok.kind = Tok::ident;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
          advance();
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
          advance();
          if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) advance();
          while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            advance();
          }
        }
        tok.kind = Tok::number;
      } else {
        advance();
        switch (c) {
          case '(': tok.kind = Tok::lparen; break;
          case ')': tok.kind = Tok::rparen; break;
          case '[': tok.kind = Tok::lbracket; break;
          case ']': tok.kind = Tok::rbracket; break;
          case ',': tok.kind = Tok::comma; break;
          case '!': tok.kind = Tok::bang; break;
          case '&': tok.kind = Tok::amp; break;
          case '|': tok.kind = Tok::bar; break;
          case '>': tok.kind = Tok::greater; break;
          case '<': tok.kind = Tok::less; break;
          case '+': tok.kind = Tok::plus; break;
          case '-':
            if (pos_ < text_.size() && text_[pos_] == '>') {
              advance();
              tok.kind = Tok::arrow;
            } else {
              tok.kind = Tok::minus;
            }
            break;
          default:
            throw ParseError(std::string("unexpected character '") + c + "'", tok.line, tok.column);
        }
      }
      tok.text = text_.substr(start, pos_ - start);
      out.push_back(tok);
    }
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_;
  std::size_t column_;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, const ParseOptions& options)
      : tokens_(std::move(tokens)), options_(options) {}

  Formula parse_all() {
    if (peek().kind == Tok::end) fail("empty formula");
    auto f = implies();
    if (peek().kind != Tok::end) {
      fail(std::string("unexpected ") + describe(peek().kind) + " '" + std::string(peek().text) + "'");
    }
    return f;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& take() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, peek().line, peek().column);
  }
  [[noreturn]] static void fail_at(const Token& at, const std::string& message) {
    throw ParseError(message, at.line, at.column);
  }

  const Token& expect(Tok kind) {
    if (peek().kind != kind) {
      fail(std::string("expected ") + describe(kind) + ", found " + describe(peek().kind));
    }
    return take();
  }

  bool peek_keyword(std::string_view word) const {
    return peek().kind == Tok::ident && peek().text == word;
  }

  bool peek_temporal() const {
    return (peek_keyword("F") || peek_keyword("G")) && tokens_[pos_ + 1].kind == Tok::lbracket;
  }

  std::size_t bound() {
    const auto& tok = peek();
    if (tok.kind != Tok::number) fail_at(tok, "malformed interval: expected a nonnegative integer bound");
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), value);
    if (ec != std::errc{} || ptr != tok.text.data() + tok.text.size()) {
      fail_at(tok, "malformed interval: bound '" + std::string(tok.text) + "' is not a nonnegative integer");
    }
    take();
    return value;
  }

  std::pair<std::size_t, std::size_t> interval() {
    const auto& open = peek();
    if (open.kind != Tok::lbracket) fail("malformed interval: expected '['");
    take();
    const auto lo = bound();
    if (peek().kind != Tok::comma) fail("malformed interval: expected ',' between bounds");
    take();
    const auto hi = bound();
    if (peek().kind != Tok::rbracket) fail("malformed interval: expected ']'");
    take();
    if (lo > hi) {
      fail_at(open, "malformed interval: [" + std::to_string(lo) + "," + std::to_string(hi) +
                        "] has lower bound above upper bound");
    }
    return {lo, hi};
  }

  std::size_t radius() {
    if (peek().kind != Tok::lbracket) fail("malformed interval: expected '['");
    take();
    const auto d = bound();
    if (peek().kind != Tok::rbracket) fail("malformed interval: expected ']'");
    take();
    return d;
  }

  Formula implies() {
    auto lhs = disjunction_level();
    if (peek().kind == Tok::arrow) {
      take();
      auto rhs = implies();
      return implication(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Formula disjunction_level() {
    auto lhs = conjunction_level();
    while (peek().kind == Tok::bar) {
      take();
      lhs = disjunction(std::move(lhs), conjunction_level());
    }
    return lhs;
  }

  Formula conjunction_level() {
    auto lhs = temporal();
    while (peek().kind == Tok::amp) {
      take();
      lhs = conjunction(std::move(lhs), temporal());
    }
    return lhs;
  }

  Formula temporal() {
    if (peek_temporal()) {
      const bool is_eventually = peek().text == "F";
      take();
      const auto [lo, hi] = interval();
      auto operand = temporal();
      return is_eventually ? eventually(lo, hi, std::move(operand))
                           : always(lo, hi, std::move(operand));
    }
    return spatial();
  }

  Formula spatial() {
    auto lhs = prefix();
    while (peek_keyword("reach")) {
      take();
      const auto d = radius();
      lhs = reach(std::move(lhs), d, prefix());
    }
    return lhs;
  }

  Formula prefix() {
    if (peek_keyword("somewhere")) {
      take();
      const auto d = radius();
      return somewhere(d, prefix());
    }
    if (peek_keyword("escape")) {
      take();
      const auto [lo, hi] = interval();
      return escape(lo, hi, prefix());
    }
    return unary();
  }

  Formula unary() {
    if (peek().kind == Tok::bang) {
      take();
      return negation(unary());
    }
    if (peek_temporal()) return temporal();
    if (peek_keyword("somewhere") || peek_keyword("escape")) return prefix();
    return primary();
  }

  Formula primary() {
    const auto& tok = peek();
    if (tok.kind == Tok::lparen) {
      take();
      auto inner = implies();
      expect(Tok::rparen);
      return inner;
    }
    if (tok.kind != Tok::ident) {
      fail(std::string("expected a formula, found ") + describe(tok.kind));
    }
    if (tok.text == "true" || tok.text == "false") {
      take();
      return truth(tok.text == "true");
    }
    if (tok.text == "label") {
      take();
      expect(Tok::lparen);
      const auto& name = peek();
      if (name.kind != Tok::ident) fail("expected a label name");
      take();
      const std::string label_name(name.text);
      if (options_.known_labels && !options_.known_labels->contains(label_name)) {
        fail_at(name, "unknown label '" + label_name + "'");
      }
      expect(Tok::rparen);
      return label(label_name);
    }
    if (tok.text == "y") {
      take();
      Compare dir{};
      if (peek().kind == Tok::greater) {
        dir = Compare::greater;
      } else if (peek().kind == Tok::less) {
        dir = Compare::less;
      } else {
        fail("expected '>' or '<' after signal name");
      }
      take();
      return atomic(dir, threshold());
    }
    if (tok.text == "F" || tok.text == "G" || tok.text == "reach") {
      fail("malformed interval: operator '" + std::string(tok.text) + "' needs a bracketed bound");
    }
    fail("unknown identifier '" + std::string(tok.text) + "'");
  }

  double threshold() {
    bool negative = false;
    if (peek().kind == Tok::minus || peek().kind == Tok::plus) {
      negative = peek().kind == Tok::minus;
      take();
    }
    const auto& tok = peek();
    if (tok.kind != Tok::number) fail("expected a numeric threshold");
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), value);
    if (ec != std::errc{} || ptr != tok.text.data() + tok.text.size() || !std::isfinite(value)) {
      fail("malformed number '" + std::string(tok.text) + "'");
    }
    take();
    return negative ? -value : value;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const ParseOptions& options_;
};

Formula parse_at(std::string_view text, std::size_t line, std::size_t column,
                 const ParseOptions& options) {
  Parser parser(Lexer(text, line, column).run(), options);
  return parser.parse_all();
}

}  // namespace

Formula parse(std::string_view text, const ParseOptions& options) {
  return parse_at(text, 1, 1, options);
}

std::vector<NamedFormula> parse_property_script(std::string_view text, const ParseOptions& options) {
  std::vector<NamedFormula> out;
  std::map<std::string, std::size_t> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    ++line_no;
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::size_t first = 0;
    while (first < line.size() && std::isspace(static_cast<unsigned char>(line[first]))) ++first;
    if (first == line.size()) {
      if (end == text.size()) break;
      continue;
    }
    const auto assign = line.find(":=");
    if (assign == std::string_view::npos) {
      throw ParseError("expected 'name := formula'", line_no, first + 1);
    }
    auto name = line.substr(first, assign - first);
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.remove_suffix(1);
    if (name.empty()) throw ParseError("missing property name", line_no, first + 1);
    for (const char c : name) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.') {
        throw ParseError("invalid property name '" + std::string(name) + "'", line_no, first + 1);
      }
    }
    const std::string key(name);
    if (seen.contains(key)) {
      throw ParseError("duplicate property name '" + key + "' (first defined on line " +
                           std::to_string(seen[key]) + ")",
                       line_no, first + 1);
    }
    seen[key] = line_no;
    out.push_back({key, parse_at(line.substr(assign + 2), line_no, assign + 3, options)});
    if (end == text.size()) break;
  }
  return out;
}

}  // namespace strelcast::strel
