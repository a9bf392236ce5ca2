#include "mmot/hash.hpp"

#include <algorithm>
#include <sstream>

#include "mmot/error.hpp"

namespace mmot::hash {

std::string to_string(const Triple& t) {
  std::ostringstream s;
  s << '(' << t.a << ',' << t.b << ',' << t.c << ')';
  return s.str();
}

std::size_t mod(long long x, std::size_t m) {
  if (m == 0) throw InvalidArgument("mod: zero modulus");
  const long long mm = static_cast<long long>(m);
  return static_cast<std::size_t>(((x % mm) + mm) % mm);
}

std::size_t h(std::size_t i, std::size_t n) {
  if (n < 1 || i < 1 || i > n) throw InvalidArgument("h: index out of range");
  return 1 + mod(static_cast<long long>(i) - 2, n);
}

std::size_t h_prime(std::size_t i, std::size_t r, std::size_t n) {
  if (n < 2 || i < 1 || i > n || r < 1 || r > n - 1)
    throw InvalidArgument("h': index out of range");
  if (i < n) return 1 + mod(static_cast<long long>(i + r) - 1, n);
  return 1 + mod(static_cast<long long>(r), n - 1);
}

std::vector<Triple> H_n(std::size_t i, std::size_t j, std::size_t n, const HFn& hf) {
  if (!(1 <= i && i < j && j <= n)) throw InvalidArgument("H^n: need 1 <= i < j <= n");
  std::vector<Triple> out;
  const std::size_t hi = hf(i, n);
  if (j == n && i == 1) {
    out.push_back({i, n + 1, hi});
  } else {
    out.push_back({i, j, hi});
    out.push_back({j, n + 1, hi});
  }
  const std::size_t hj = hf(j, n);
  if (i == j - 1) {
    out.push_back({j, n + 1, hj});
  } else {
    out.push_back({i, j, hj});
    out.push_back({i, n + 1, hj});
  }
  return out;
}

namespace {

void H_prime_1(std::size_t i, std::size_t j, std::size_t r, std::size_t n, const HPrimeFn& hp,
               std::vector<Triple>& out) {
  const std::size_t c = hp(i, r, n);
  if (j == c) {
    out.push_back(Triple::ordered(i, r, c));
  } else {
    out.push_back(Triple::ordered(i, j, c));
    out.push_back(Triple::ordered(j, r, c));
  }
}

}  // namespace

std::vector<Triple> H_prime_n(std::size_t i, std::size_t j, std::size_t r, std::size_t n,
                              const HPrimeFn& hp) {
  if (!(1 <= i && i < j && j <= n)) throw InvalidArgument("H'^n: need 1 <= i < j <= n");
  if (r < 1 || r + 1 > n) throw InvalidArgument("H'^n: need 1 <= r <= n - 1");
  std::vector<Triple> out;
  H_prime_1(i, j, r, n, hp, out);
  H_prime_1(j, i, r, n, hp, out);
  return out;
}

std::size_t HashAudit::multiplicity(const Triple& t) const {
  auto it = counts.find(t);
  return it == counts.end() ? 0 : it->second;
}

namespace {

void finish(HashAudit& rep) {
  rep.histogram.clear();
  rep.max_multiplicity = 0;
  for (const auto& [t, c] : rep.counts) {
    ++rep.histogram[c];
    rep.max_multiplicity = std::max(rep.max_multiplicity, c);
  }
}

void check_audit_n(std::size_t n, std::size_t lowest) {
  if (n < lowest || n > kAuditCap) {
    std::ostringstream msg;
    msg << "hash audit: n must lie in [" << lowest << ", " << kAuditCap << "]";
    throw InvalidArgument(msg.str());
  }
}

}  // namespace

HashAudit audit_H(std::size_t n, const HFn& hf) {
  check_audit_n(n, 2);
  HashAudit rep;
  rep.n = n;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = i + 1; j <= n; ++j)
      for (const Triple& t : H_n(i, j, n, hf)) {
        ++rep.listed;
        ++rep.counts[t];
        const bool range = 1 <= t.a && t.a < t.b && t.b <= n + 1 && 1 <= t.c && t.c <= n;
        if (!range || t.c == t.a || t.c == t.b)
          rep.failures.push_back("range/exclusion: " + to_string(t) + " from (" +
                                 std::to_string(i) + "," + std::to_string(j) + ")");
      }
  finish(rep);
  for (const auto& [t, c] : rep.counts)
    if (c > 1) rep.failures.push_back("duplicate: " + to_string(t) + " x" + std::to_string(c));
  rep.passed = rep.failures.empty();
  return rep;
}

HashAudit audit_H_prime(std::size_t n, const PrimeAuditOptions& options, const HPrimeFn& hp) {
  check_audit_n(n, 2);
  HashAudit pooled;
  pooled.n = n;
  HashAudit worst;
  for (std::size_t r = 1; r + 1 <= n; ++r) {
    HashAudit per_r;
    per_r.n = n;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = i + 1; j <= n; ++j)
        for (const Triple& t : H_prime_n(i, j, r, n, hp)) {
          ++per_r.listed;
          ++per_r.counts[t];
          ++pooled.listed;
          ++pooled.counts[t];
          const bool range = 1 <= t.a && t.a <= t.b && t.b <= n && 1 <= t.c && t.c <= n;
          if (!range || t.c == t.a || t.c == t.b)
            pooled.failures.push_back("range/exclusion: " + to_string(t) + " from (" +
                                      std::to_string(i) + "," + std::to_string(j) + "," +
                                      std::to_string(r) + ")");
        }
    finish(per_r);
    if (per_r.max_multiplicity > worst.max_multiplicity) worst = std::move(per_r);
  }
  finish(pooled);

  HashAudit rep;
  if (options.pool_over_r) {
    rep = std::move(pooled);
  } else {
    rep = std::move(worst);
    rep.failures = std::move(pooled.failures);
  }
  for (const auto& [t, c] : rep.counts)
    if (c > options.max_allowed)
      rep.failures.push_back("multiplicity: " + to_string(t) + " x" + std::to_string(c));
  rep.passed = rep.failures.empty();
  return rep;
}

}  // namespace mmot::hash
