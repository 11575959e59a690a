#pragma once

#include "strelcast/formula.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace strelcast::strel {

inline const std::string kHospitalLabel = "hospital";

// Crowdedness requirements. `c` is the crowdedness threshold, time bounds are in steps
// after the anchor and distances in grid hops.

/// Overloads are temporary: (y > c) -> F[1,h] !(y > c).
Formula build_p1(double c, std::size_t h);

/// Overloads are local: F[h,h] ((y > c) -> somewhere[d] !(y > c)).
Formula build_p2(double c, std::size_t h, std::size_t d);

/// Fault tolerance: G[1,h] somewhere[d] !(y > c).
Formula build_p3(double c, std::size_t h, std::size_t d);

/// Uncrowded reachability of a hospital, unrolled over d hops at one hop per step:
///   phi(i, 0) = hospital
///   phi(i, n) = hospital | (G[i,i+1] !(y > c) & somewhere[1] phi(i+1, n-1))
/// Returns phi(0, d); its temporal depth is d.
Formula build_p4(double c, std::size_t d, const std::string& hospital_label = kHospitalLabel);

/// Threshold and per-property step / hop parameters.
struct PropertyParams {
  double c = 500.0;
  std::size_t h_p1 = 3;
  std::size_t h_p2 = 1;
  std::size_t h_p3 = 3;
  std::size_t h_p4 = 4;
  std::size_t d_p2 = 1;
  std::size_t d_p3 = 1;
  std::size_t d_p4 = 4;

  void validate() const;
};

/// Converts a duration in minutes to whole steps; throws unless it divides evenly.
std::size_t minutes_to_steps(double minutes, double step_minutes);

struct NamedProperty {
  std::string name;
  Formula formula;
};

/// P1..P4 named "P1".."P4".
std::vector<NamedProperty> standard_properties(const PropertyParams& params);

/// Number of nested `somewhere` levels in a P4 unrolling plus one.
std::size_t p4_nesting_depth(const Formula& f);

}  // namespace strelcast::strel
