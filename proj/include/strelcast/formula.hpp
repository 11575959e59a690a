#pragma once

#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <variant>

namespace strelcast::strel {

enum class Compare { greater, less };

struct Node;

/// Immutable, cheaply copyable handle to a STREL formula tree.
class Formula {
 public:
  explicit Formula(Node node);

  [[nodiscard]] const Node& node() const { return *node_; }

  template <typename T>
  [[nodiscard]] const T* as() const;

  template <typename T>
  [[nodiscard]] bool is() const {
    return as<T>() != nullptr;
  }

 private:
  std::shared_ptr<const Node> node_;
};

/// `true` / `false`. Robustness is +inf / -inf.
struct Constant {
  bool value;
};
/// y > threshold or y < threshold on the single monitored signal.
struct AtomicCompare {
  Compare direction;
  double threshold;
};
/// Membership of the location in a static label set.
struct AtomicLabel {
  std::string name;
};
struct Not {
  Formula operand;
};
struct And {
  Formula lhs;
  Formula rhs;
};
struct Or {
  Formula lhs;
  Formula rhs;
};
struct Implies {
  Formula lhs;
  Formula rhs;
};
/// Holds at some step in [s + lo, s + hi].
struct Eventually {
  std::size_t lo;
  std::size_t hi;
  Formula operand;
};
/// Holds at every step in [s + lo, s + hi].
struct Always {
  std::size_t lo;
  std::size_t hi;
  Formula operand;
};
/// lhs-locations lead to an rhs-location within d_max hops.
struct Reach {
  Formula lhs;
  std::size_t d_max;
  Formula rhs;
};
/// An operand-route ends at hop distance within [d_lo, d_hi] of the origin.
struct Escape {
  std::size_t d_lo;
  std::size_t d_hi;
  Formula operand;
};
/// Some location within d_max hops satisfies the operand.
struct Somewhere {
  std::size_t d_max;
  Formula operand;
};

using NodeVariant = std::variant<Constant, AtomicCompare, AtomicLabel, Not, And, Or, Implies,
                                 Eventually, Always, Reach, Escape, Somewhere>;

struct Node : NodeVariant {
  using NodeVariant::NodeVariant;
};

inline Formula::Formula(Node node) : node_(std::make_shared<const Node>(std::move(node))) {}

template <typename T>
const T* Formula::as() const {
  return std::get_if<T>(static_cast<const NodeVariant*>(node_.get()));
}

// Validating constructors. Invalid bounds or non-finite thresholds throw std::invalid_argument.
Formula truth(bool value);
Formula greater(double threshold);
Formula less(double threshold);
Formula atomic(Compare direction, double threshold);
Formula label(std::string name);
Formula negation(Formula operand);
Formula conjunction(Formula lhs, Formula rhs);
Formula disjunction(Formula lhs, Formula rhs);
Formula implication(Formula lhs, Formula rhs);
Formula eventually(std::size_t lo, std::size_t hi, Formula operand);
Formula always(std::size_t lo, std::size_t hi, Formula operand);
Formula reach(Formula lhs, std::size_t d_max, Formula rhs);
Formula escape(std::size_t d_lo, std::size_t d_hi, Formula operand);
Formula somewhere(std::size_t d_max, Formula operand);

/// Structural equality (thresholds compared exactly).
bool operator==(const Formula& a, const Formula& b);

/// Fully parenthesised surface syntax accepted by `parse`.
std::string to_string(const Formula& f);

/// Largest cumulative upper time bound along any root-to-leaf path; the number of steps
/// after the anchor a trace must provide.
std::size_t temporal_depth(const Formula& f);

/// Number of AST nodes.
std::size_t node_count(const Formula& f);

/// Labels referenced anywhere in the formula.
std::set<std::string> labels_used(const Formula& f);

/// True iff the formula uses only core constructors
/// (constants, atoms, !, &, F, G, reach, escape).
bool is_core(const Formula& f);

/// Rewrites derived operators into the core grammar:
/// somewhere[d] p -> true reach[d] p, a -> b -> !a | b, a | b -> !(!a & !b).
Formula expand_derived(const Formula& f);

}  // namespace strelcast::strel
