#pragma once

#include "lexv/bundle.hpp"

#include <cstdint>
#include <vector>

namespace lexv {

/// splitmix64 stream. Distributions are hand-rolled because the standard
/// library's are implementation-defined, and gen-cases must reproduce the
/// same bundles on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform01();                        // [0, 1)
  long uniform_int(long lo, long hi);        // inclusive
  bool chance(double p) { return uniform01() < p; }
  double normal(double mean, double sd);     // Box-Muller

 private:
  std::uint64_t state_;
};

struct GenOptions {
  std::size_t n = 50;
  std::uint64_t seed = 7;
  double var_mean = 12.85, var_sd = 5.60;
  long var_min = 4, var_max = 40;
  double constraint_mean = 30.81, constraint_sd = 9.62;
  long constraint_min = 4, constraint_max = 80;
  double hard_ratio = 0.63;
  std::size_t max_soft = 0;         // 0 means uncapped
  std::size_t max_constraints = 0;  // 0 means uncapped; small values switch to a compact profile
  long min_weight = 1, max_weight = 5;
};

/// Each bundle has a hidden witness with penalty = false that satisfies
/// every HARD constraint, so the law is consistent and a compliant revision
/// exists. Facts pin variables to perturbed witness values.
ConstraintBundle generate_case(const GenOptions& opts, std::size_t index);
std::vector<ConstraintBundle> generate_cases(const GenOptions& opts);

}  // namespace lexv
