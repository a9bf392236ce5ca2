#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace mmot::hash {

// Output triple; the first two components are kept ordered (a <= b).
struct Triple {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t c = 0;

  static Triple ordered(std::size_t x, std::size_t y, std::size_t c) {
    return x <= y ? Triple{x, y, c} : Triple{y, x, c};
  }
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

std::string to_string(const Triple& t);

// Nonnegative residue of x modulo m, also for negative x.
std::size_t mod(long long x, std::size_t m);

// h(i) = 1 + ((i - 2) mod n), 1 <= i <= n.
std::size_t h(std::size_t i, std::size_t n);

// h'(i, r) = 1 + ((i + r - 1) mod n) for i < n and 1 + (r mod (n - 1)) for
// i = n, with 1 <= r <= n - 1.
std::size_t h_prime(std::size_t i, std::size_t r, std::size_t n);

using HFn = std::function<std::size_t(std::size_t i, std::size_t n)>;
using HPrimeFn = std::function<std::size_t(std::size_t i, std::size_t r, std::size_t n)>;

// H^n(i, j) for 1 <= i < j <= n: two to four triples over [n + 1].
std::vector<Triple> H_n(std::size_t i, std::size_t j, std::size_t n, const HFn& hf = h);

// H'^n(i, j, r) = H'_1(i, j, r) followed by H'_1(j, i, r).
std::vector<Triple> H_prime_n(std::size_t i, std::size_t j, std::size_t r, std::size_t n,
                              const HPrimeFn& hp = h_prime);

struct HashAudit {
  std::size_t n = 0;
  std::size_t listed = 0;                  // triples produced, with repeats
  std::map<Triple, std::size_t> counts;    // multiplicity of each distinct triple
  std::map<std::size_t, std::size_t> histogram;  // multiplicity -> number of triples
  std::size_t max_multiplicity = 0;
  std::vector<std::string> failures;       // one line per broken property
  bool passed = false;

  std::size_t multiplicity(const Triple& t) const;
};

inline constexpr std::size_t kAuditCap = 60;

// Concatenates H^n(i, j) over i < j and checks: no duplicates; every (a,b,c)
// has 1 <= a < b <= n + 1, 1 <= c <= n and c not in {a, b}.
HashAudit audit_H(std::size_t n, const HFn& hf = h);

struct PrimeAuditOptions {
  // Count multiplicities over all r together; otherwise per r, and the
  // report carries the worst r.
  bool pool_over_r = true;
  std::size_t max_allowed = 5;
};

// Concatenates H'^n(i, j, r) over i < j and r in [n - 1] and checks that no
// triple repeats more than max_allowed times, 1 <= a <= b <= n,
// 1 <= c <= n and c not in {a, b}.
HashAudit audit_H_prime(std::size_t n, const PrimeAuditOptions& options = {},
                        const HPrimeFn& hp = h_prime);

}  // namespace mmot::hash
