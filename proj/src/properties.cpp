#include "strelcast/properties.hpp"

#include <cmath>
#include <stdexcept>

namespace strelcast::strel {

namespace {

void require_steps(std::size_t h, const char* what) {
  if (h < 1) throw std::invalid_argument(std::string(what) + " needs a horizon of at least one step");
}

Formula crowded(double c) { return greater(c); }

Formula p4_level(double c, std::size_t i, std::size_t n, const std::string& hospital) {
  if (n == 0) return label(hospital);
  auto stay_uncrowded = always(i, i + 1, negation(crowded(c)));
  auto next_hop = somewhere(1, p4_level(c, i + 1, n - 1, hospital));
  return disjunction(label(hospital), conjunction(std::move(stay_uncrowded), std::move(next_hop)));
}

}  // namespace

Formula build_p1(double c, std::size_t h) {
  require_steps(h, "P1");
  return implication(crowded(c), eventually(1, h, negation(crowded(c))));
}

Formula build_p2(double c, std::size_t h, std::size_t d) {
  require_steps(h, "P2");
  return eventually(h, h, implication(crowded(c), somewhere(d, negation(crowded(c)))));
}

Formula build_p3(double c, std::size_t h, std::size_t d) {
  require_steps(h, "P3");
  return always(1, h, somewhere(d, negation(crowded(c))));
}

Formula build_p4(double c, std::size_t d, const std::string& hospital_label) {
  return p4_level(c, 0, d, hospital_label);
}

void PropertyParams::validate() const {
  if (!std::isfinite(c)) throw std::invalid_argument("property threshold c must be finite");
  require_steps(h_p1, "P1");
  require_steps(h_p2, "P2");
  require_steps(h_p3, "P3");
  require_steps(h_p4, "P4");
  if (h_p4 != d_p4) {
    throw std::invalid_argument("P4 moves one cell per step: h_p4 (" + std::to_string(h_p4) +
                                " steps) must equal d_p4 (" + std::to_string(d_p4) + " cells)");
  }
}

std::size_t minutes_to_steps(double minutes, double step_minutes) {
  if (!(step_minutes > 0.0)) throw std::invalid_argument("step length must be positive");
  if (minutes < 0.0) throw std::invalid_argument("durations must be nonnegative");
  const double steps = minutes / step_minutes;
  const double rounded = std::round(steps);
  if (std::abs(steps - rounded) > 1e-9) {
    throw std::invalid_argument("duration of " + std::to_string(minutes) +
                                " min is not a whole number of " + std::to_string(step_minutes) +
                                "-min steps");
  }
  return static_cast<std::size_t>(rounded);
}

std::vector<NamedProperty> standard_properties(const PropertyParams& params) {
  params.validate();
  return {
      {"P1", build_p1(params.c, params.h_p1)},
      {"P2", build_p2(params.c, params.h_p2, params.d_p2)},
      {"P3", build_p3(params.c, params.h_p3, params.d_p3)},
      {"P4", build_p4(params.c, params.d_p4)},
  };
}

std::size_t p4_nesting_depth(const Formula& f) {
  const auto* disj = f.as<Or>();
  if (disj == nullptr) return 1;
  const auto* conj = disj->rhs.as<And>();
  if (conj == nullptr) return 1;
  const auto* hop = conj->rhs.as<Somewhere>();
  if (hop == nullptr) return 1;
  return 1 + p4_nesting_depth(hop->operand);
}

}  // namespace strelcast::strel
