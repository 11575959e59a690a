#pragma once

#include "strelcast/formula.hpp"

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace strelcast::strel {

/// Syntax error, unknown label or malformed interval, with a 1-based source position.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);

  [[nodiscard]] std::size_t line() const { return line_; }
  [[nodiscard]] std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct ParseOptions {
  /// When set, `label(name)` must name one of these.
  std::optional<std::set<std::string>> known_labels;
};

/**
 * Parses the textual formula syntax.
 *
 *   atoms      y > c | y < c | label(name) | true | false
 *   unary      !p
 *   spatial    somewhere[d] p | escape[lo,hi] p | p reach[d] q
 *   temporal   F[a,b] p | G[a,b] p
 *   boolean    p & q | p | q | p -> q
 *
 * Binding strength decreases in that order; `->` is right associative, `&`, `|` and
 * `reach` are left associative, and parentheses override.
 */
Formula parse(std::string_view text, const ParseOptions& options = {});

struct NamedFormula {
  std::string name;
  Formula formula;
};

/// One `name := formula` per line; `#` starts a comment. Names must be unique.
std::vector<NamedFormula> parse_property_script(std::string_view text,
                                                const ParseOptions& options = {});

}  // namespace strelcast::strel
