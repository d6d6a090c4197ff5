#pragma once

// Shared fixtures for the unit and acceptance suites: the toy two-domain
// corpus, scenario builders with planted structure, and small helpers.

#include <cmath>
#include <cstdint>
#include <string>

#include "citeflow/corpus.hpp"
#include "citeflow/synth.hpp"

namespace citeflow::testing {

inline double rel_diff(double a, double b) {
    double denom = std::max(std::abs(a), std::abs(b));
    return denom == 0.0 ? 0.0 : std::abs(a - b) / denom;
}

// Toy corpus D1: domains X and Y, two citable articles each, four citing
// articles in X and two in Y; every X citer cites one Y article, every Y
// citer cites two X articles. Hand-built, membership 1.0, one-year windows.
Corpus d1_corpus();
PeriodSpec d1_period();

// The same corpus family expressed as a scenario (growth 2/1, propensity
// 1/2, pure cross exchange).
ScenarioSpec d1_scenario(std::uint64_t seed = 7);

// Exactly symmetric fixed point: every domain only cites itself, growth 1,
// equal volumes and propensities. All dispersion statistics are zero.
ScenarioSpec steady_scenario(int domains = 4, int years = 1, std::uint64_t seed = 1);

// Random corpus with planted growth/propensity/exchange; sizes capped by
// `max_edges`. Always at least two domains.
ScenarioSpec random_scenario(std::uint64_t seed, int max_domains = 100,
                             std::uint64_t max_edges = 100000);

// Fast-growing import-heavy domains among mature ones; growth and balance
// factors anti-align, so the volume-weighted covariance of (LG, LB) is
// negative.
ScenarioSpec emergence_scenario(std::uint64_t seed, int years = 1);

// Independent growth and balance plants: every exchange row equals the same
// attraction profile, chosen so each domain's balance tracks an independent
// lognormal draw. Uniform propensity keeps normalization neutral.
ScenarioSpec independence_scenario(std::uint64_t seed, int domains = 30);

// Two disciplines, two specialties each; per-specialty propensities. When
// `uniform_within_discipline`, the propensity is constant inside each
// discipline (specialty- and discipline-level normalization then agree).
ScenarioSpec two_discipline_scenario(bool uniform_within_discipline, std::uint64_t seed = 3);

// Hand-built witness for balance non-additivity: children with B = 2 and
// B = 0.5 and equal flows under one sub-discipline; the parent balance is 1
// while the children's weighted mean is 1.25.
Corpus witness_corpus();
PeriodSpec witness_period();

// Splits a share of single-membership articles across two specialties to
// exercise the fractional-counting paths. Deterministic in `seed`.
Corpus fractionalize(const Corpus& corpus, std::uint64_t seed, double share = 0.3);

}  // namespace citeflow::testing
