#include "strelcast/formula.hpp"

#include "strelcast/csv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace strelcast::strel {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void check_interval(std::size_t lo, std::size_t hi, const char* op) {
  if (lo > hi) {
    throw std::invalid_argument(std::string(op) + " interval [" + std::to_string(lo) + "," +
                                std::to_string(hi) + "] has lower bound above upper bound");
  }
}

std::string threshold_text(double c) { return csv::format(c); }

}  // namespace

Formula truth(bool value) { return Formula(Constant{value}); }

Formula atomic(Compare direction, double threshold) {
  if (!std::isfinite(threshold)) throw std::invalid_argument("atomic threshold must be finite");
  return Formula(AtomicCompare{direction, threshold});
}

Formula greater(double threshold) { return atomic(Compare::greater, threshold); }
Formula less(double threshold) { return atomic(Compare::less, threshold); }

Formula label(std::string name) {
  if (name.empty()) throw std::invalid_argument("label name must not be empty");
  return Formula(AtomicLabel{std::move(name)});
}

Formula negation(Formula operand) { return Formula(Not{std::move(operand)}); }
Formula conjunction(Formula lhs, Formula rhs) { return Formula(And{std::move(lhs), std::move(rhs)}); }
Formula disjunction(Formula lhs, Formula rhs) { return Formula(Or{std::move(lhs), std::move(rhs)}); }
Formula implication(Formula lhs, Formula rhs) {
  return Formula(Implies{std::move(lhs), std::move(rhs)});
}

Formula eventually(std::size_t lo, std::size_t hi, Formula operand) {
  check_interval(lo, hi, "F");
  return Formula(Eventually{lo, hi, std::move(operand)});
}

Formula always(std::size_t lo, std::size_t hi, Formula operand) {
  check_interval(lo, hi, "G");
  return Formula(Always{lo, hi, std::move(operand)});
}

Formula reach(Formula lhs, std::size_t d_max, Formula rhs) {
  return Formula(Reach{std::move(lhs), d_max, std::move(rhs)});
}

Formula escape(std::size_t d_lo, std::size_t d_hi, Formula operand) {
  check_interval(d_lo, d_hi, "escape");
  return Formula(Escape{d_lo, d_hi, std::move(operand)});
}

Formula somewhere(std::size_t d_max, Formula operand) {
  return Formula(Somewhere{d_max, std::move(operand)});
}

bool operator==(const Formula& a, const Formula& b) {
  if (&a.node() == &b.node()) return true;
  if (a.node().index() != b.node().index()) return false;
  return std::visit(
      overloaded{
          [&](const Constant& x) { return x.value == b.as<Constant>()->value; },
          [&](const AtomicCompare& x) {
            const auto* y = b.as<AtomicCompare>();
            return x.direction == y->direction && x.threshold == y->threshold;
          },
          [&](const AtomicLabel& x) { return x.name == b.as<AtomicLabel>()->name; },
          [&](const Not& x) { return x.operand == b.as<Not>()->operand; },
          [&](const And& x) {
            const auto* y = b.as<And>();
            return x.lhs == y->lhs && x.rhs == y->rhs;
          },
          [&](const Or& x) {
            const auto* y = b.as<Or>();
            return x.lhs == y->lhs && x.rhs == y->rhs;
          },
          [&](const Implies& x) {
            const auto* y = b.as<Implies>();
            return x.lhs == y->lhs && x.rhs == y->rhs;
          },
          [&](const Eventually& x) {
            const auto* y = b.as<Eventually>();
            return x.lo == y->lo && x.hi == y->hi && x.operand == y->operand;
          },
          [&](const Always& x) {
            const auto* y = b.as<Always>();
            return x.lo == y->lo && x.hi == y->hi && x.operand == y->operand;
          },
          [&](const Reach& x) {
            const auto* y = b.as<Reach>();
            return x.d_max == y->d_max && x.lhs == y->lhs && x.rhs == y->rhs;
          },
          [&](const Escape& x) {
            const auto* y = b.as<Escape>();
            return x.d_lo == y->d_lo && x.d_hi == y->d_hi && x.operand == y->operand;
          },
          [&](const Somewhere& x) {
            const auto* y = b.as<Somewhere>();
            return x.d_max == y->d_max && x.operand == y->operand;
          },
      },
      static_cast<const NodeVariant&>(a.node()));
}

std::string to_string(const Formula& f) {
  const auto interval = [](std::size_t a, std::size_t b) {
    return "[" + std::to_string(a) + "," + std::to_string(b) + "]";
  };
  return std::visit(
      overloaded{
          [](const Constant& x) -> std::string { return x.value ? "true" : "false"; },
          [](const AtomicCompare& x) -> std::string {
            return std::string("y ") + (x.direction == Compare::greater ? "> " : "< ") +
                   threshold_text(x.threshold);
          },
          [](const AtomicLabel& x) -> std::string { return "label(" + x.name + ")"; },
          [](const Not& x) -> std::string { return "!(" + to_string(x.operand) + ")"; },
          [](const And& x) -> std::string {
            return "(" + to_string(x.lhs) + " & " + to_string(x.rhs) + ")";
          },
          [](const Or& x) -> std::string {
            return "(" + to_string(x.lhs) + " | " + to_string(x.rhs) + ")";
          },
          [](const Implies& x) -> std::string {
            return "(" + to_string(x.lhs) + " -> " + to_string(x.rhs) + ")";
          },
          [&](const Eventually& x) -> std::string {
            return "F" + interval(x.lo, x.hi) + " (" + to_string(x.operand) + ")";
          },
          [&](const Always& x) -> std::string {
            return "G" + interval(x.lo, x.hi) + " (" + to_string(x.operand) + ")";
          },
          [](const Reach& x) -> std::string {
            // Temporal operators bind looser than reach, so their operands need brackets.
            const auto operand = [](const Formula& g) {
              const bool temporal = g.is<Eventually>() || g.is<Always>();
              return temporal ? "(" + to_string(g) + ")" : to_string(g);
            };
            return "(" + operand(x.lhs) + " reach[" + std::to_string(x.d_max) + "] " + operand(x.rhs) + ")";
          },
          [&](const Escape& x) -> std::string {
            return "escape" + interval(x.d_lo, x.d_hi) + " (" + to_string(x.operand) + ")";
          },
          [](const Somewhere& x) -> std::string {
            return "somewhere[" + std::to_string(x.d_max) + "] (" + to_string(x.operand) + ")";
          },
      },
      static_cast<const NodeVariant&>(f.node()));
}

std::size_t temporal_depth(const Formula& f) {
  return std::visit(
      overloaded{
          [](const Constant&) -> std::size_t { return 0; },
          [](const AtomicCompare&) -> std::size_t { return 0; },
          [](const AtomicLabel&) -> std::size_t { return 0; },
          [](const Not& x) { return temporal_depth(x.operand); },
          [](const And& x) { return std::max(temporal_depth(x.lhs), temporal_depth(x.rhs)); },
          [](const Or& x) { return std::max(temporal_depth(x.lhs), temporal_depth(x.rhs)); },
          [](const Implies& x) { return std::max(temporal_depth(x.lhs), temporal_depth(x.rhs)); },
          [](const Eventually& x) { return x.hi + temporal_depth(x.operand); },
          [](const Always& x) { return x.hi + temporal_depth(x.operand); },
          [](const Reach& x) { return std::max(temporal_depth(x.lhs), temporal_depth(x.rhs)); },
          [](const Escape& x) { return temporal_depth(x.operand); },
          [](const Somewhere& x) { return temporal_depth(x.operand); },
      },
      static_cast<const NodeVariant&>(f.node()));
}

std::size_t node_count(const Formula& f) {
  return 1 + std::visit(
                 overloaded{
                     [](const Constant&) -> std::size_t { return 0; },
                     [](const AtomicCompare&) -> std::size_t { return 0; },
                     [](const AtomicLabel&) -> std::size_t { return 0; },
                     [](const Not& x) { return node_count(x.operand); },
                     [](const And& x) { return node_count(x.lhs) + node_count(x.rhs); },
                     [](const Or& x) { return node_count(x.lhs) + node_count(x.rhs); },
                     [](const Implies& x) { return node_count(x.lhs) + node_count(x.rhs); },
                     [](const Eventually& x) { return node_count(x.operand); },
                     [](const Always& x) { return node_count(x.operand); },
                     [](const Reach& x) { return node_count(x.lhs) + node_count(x.rhs); },
                     [](const Escape& x) { return node_count(x.operand); },
                     [](const Somewhere& x) { return node_count(x.operand); },
                 },
                 static_cast<const NodeVariant&>(f.node()));
}

namespace {

void collect_labels(const Formula& f, std::set<std::string>& out) {
  std::visit(overloaded{
                 [](const Constant&) {},
                 [](const AtomicCompare&) {},
                 [&](const AtomicLabel& x) { out.insert(x.name); },
                 [&](const Not& x) { collect_labels(x.operand, out); },
                 [&](const And& x) {
                   collect_labels(x.lhs, out);
                   collect_labels(x.rhs, out);
                 },
                 [&](const Or& x) {
                   collect_labels(x.lhs, out);
                   collect_labels(x.rhs, out);
                 },
                 [&](const Implies& x) {
                   collect_labels(x.lhs, out);
                   collect_labels(x.rhs, out);
                 },
                 [&](const Eventually& x) { collect_labels(x.operand, out); },
                 [&](const Always& x) { collect_labels(x.operand, out); },
                 [&](const Reach& x) {
                   collect_labels(x.lhs, out);
                   collect_labels(x.rhs, out);
                 },
                 [&](const Escape& x) { collect_labels(x.operand, out); },
                 [&](const Somewhere& x) { collect_labels(x.operand, out); },
             },
             static_cast<const NodeVariant&>(f.node()));
}

}  // namespace

std::set<std::string> labels_used(const Formula& f) {
  std::set<std::string> out;
  collect_labels(f, out);
  return out;
}

bool is_core(const Formula& f) {
  return std::visit(
      overloaded{
          [](const Constant&) { return true; },
          [](const AtomicCompare&) { return true; },
          [](const AtomicLabel&) { return true; },
          [](const Not& x) { return is_core(x.operand); },
          [](const And& x) { return is_core(x.lhs) && is_core(x.rhs); },
          [](const Or&) { return false; },
          [](const Implies&) { return false; },
          [](const Eventually& x) { return is_core(x.operand); },
          [](const Always& x) { return is_core(x.operand); },
          [](const Reach& x) { return is_core(x.lhs) && is_core(x.rhs); },
          [](const Escape& x) { return is_core(x.operand); },
          [](const Somewhere&) { return false; },
      },
      static_cast<const NodeVariant&>(f.node()));
}

Formula expand_derived(const Formula& f) {
  return std::visit(
      overloaded{
          [&](const Constant&) { return f; },
          [&](const AtomicCompare&) { return f; },
          [&](const AtomicLabel&) { return f; },
          [](const Not& x) { return negation(expand_derived(x.operand)); },
          [](const And& x) { return conjunction(expand_derived(x.lhs), expand_derived(x.rhs)); },
          [](const Or& x) {
            return negation(conjunction(negation(expand_derived(x.lhs)),
                                        negation(expand_derived(x.rhs))));
          },
          [](const Implies& x) {
            return expand_derived(disjunction(negation(x.lhs), x.rhs));
          },
          [](const Eventually& x) { return eventually(x.lo, x.hi, expand_derived(x.operand)); },
          [](const Always& x) { return always(x.lo, x.hi, expand_derived(x.operand)); },
          [](const Reach& x) { return reach(expand_derived(x.lhs), x.d_max, expand_derived(x.rhs)); },
          [](const Escape& x) { return escape(x.d_lo, x.d_hi, expand_derived(x.operand)); },
          [](const Somewhere& x) { return reach(truth(true), x.d_max, expand_derived(x.operand)); },
      },
      static_cast<const NodeVariant&>(f.node()));
}

}  // namespace strelcast::strel
