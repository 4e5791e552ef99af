#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "latchbench/metrics/stats.hpp"

namespace latchbench::metrics {

/// 0/1 outcomes aligned by trajectory key.
struct OutcomeVector {
  std::string experiment_id;
  std::string strategy;
  std::vector<std::string> keys;
  std::vector<std::uint8_t> outcomes;

  std::size_t n() const { return outcomes.size(); }
};

/// Builds a vector from `successes` ones followed by zeros; keys are "t0000"...
OutcomeVector make_outcomes(std::size_t successes, std::size_t n, std::string strategy = {});

/// Mean of the outcomes. Throws DomainError when empty or when keys and
/// outcomes differ in length.
double apa(const OutcomeVector& v);

/// (apa_ssrp - apa_vanilla) / apa_vanilla. Throws DomainError when the
/// baseline is zero ("n/a (baseline zero)" in reports) or negative.
double resilience_lift(double apa_ssrp, double apa_vanilla);

struct PairedSignificance {
  TTestResult t_test;      // paired t-test on 0/1 differences
  double mcnemar_p = 1.0;  // exact, on discordant pairs
  std::size_t b = 0;       // a=1, b=0
  std::size_t c = 0;       // a=0, b=1
  std::size_t n = 0;
};

/// Throws DomainError on different lengths, misaligned keys, or n < 2.
PairedSignificance paired_significance(const OutcomeVector& a, const OutcomeVector& b);

}  // namespace latchbench::metrics
