#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmot/hash.hpp"

namespace mmot {

struct VerifyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Replaceable pieces, so the suite itself can be shown to catch breakage.
struct VerifyHooks {
  hash::HPrimeFn h_prime = hash::h_prime;
  double gamma = -1.0;  // triangle-area gamma; negative selects eps / 4
  std::uint64_t seed = 20240601;
  std::size_t samples = 20;  // random instances per property check
};

// Gluing counterexample, the non-metric planar values, hash audits up to
// n = 40, gluing and pairwise-triangle properties, pairwise MMOT as a
// 3-metric, and the collinear bound instance.
std::vector<VerifyCheck> run_verify(const VerifyHooks& hooks = {});

}  // namespace mmot
