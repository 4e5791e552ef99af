#include "latchbench/metrics/metrics.hpp"

#include <fmt/core.h>

#include "latchbench/core/error.hpp"

namespace latchbench::metrics {

OutcomeVector make_outcomes(std::size_t successes, std::size_t n, std::string strategy) {
  if (successes > n) throw DomainError("more successes than outcomes");
  OutcomeVector v;
  v.strategy = std::move(strategy);
  for (std::size_t i = 0; i < n; ++i) {
    v.keys.push_back(fmt::format("t{:04}", i));
    v.outcomes.push_back(i < successes ? 1 : 0);
  }
  return v;
}

double apa(const OutcomeVector& v) {
  if (v.outcomes.empty()) throw DomainError(fmt::format("apa: empty outcome vector for '{}'", v.strategy));
  if (!v.keys.empty() && v.keys.size() != v.outcomes.size()) throw DomainError("apa: keys and outcomes differ in length");
  std::size_t ones = 0;
  for (auto o : v.outcomes) ones += o != 0;
  return static_cast<double>(ones) / static_cast<double>(v.outcomes.size());
}

double resilience_lift(double apa_ssrp, double apa_vanilla) {
  if (apa_vanilla == 0.0) throw DomainError("n/a (baseline zero)");
  if (apa_vanilla < 0.0) throw DomainError("resilience_lift: negative baseline");
  return (apa_ssrp - apa_vanilla) / apa_vanilla;
}

PairedSignificance paired_significance(const OutcomeVector& a, const OutcomeVector& b) {
  if (a.n() != b.n()) throw DomainError(fmt::format("paired test: lengths differ ({} vs {})", a.n(), b.n()));
  if (a.keys != b.keys) throw DomainError("paired test: trajectory keys are not aligned");
  if (a.n() < 2) throw DomainError("paired test needs n >= 2");
  PairedSignificance s;
  s.n = a.n();
  std::vector<double> diffs;
  diffs.reserve(a.n());
  for (std::size_t i = 0; i < a.n(); ++i) {
    const int x = a.outcomes[i] != 0, y = b.outcomes[i] != 0;
    diffs.push_back(static_cast<double>(x - y));
    if (x && !y) ++s.b;
    if (!x && y) ++s.c;
  }
  s.t_test = one_sample_t_test(diffs);
  s.mcnemar_p = mcnemar_exact(s.b, s.c);
  return s;
}

}  // namespace latchbench::metrics
