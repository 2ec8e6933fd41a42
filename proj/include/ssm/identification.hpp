#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssm/model.hpp"

namespace ssm {

// Closed-form recovery of support weights from a complete choice
// probability table. Each routine returns one weight per candidate set,
// keyed by set, in increasing mask order. On tables generated by a model of
// this class the recovered weights equal the true ones up to rounding; on
// arbitrary tables they may be negative or fail to sum to 1, which is what
// the identify_full diagnostics measure.

// Weights for every set containing item j, from the alternating transform
// of P_j over near-full assortments.
std::vector<SupportAtom> identify_from_item(const ChoiceProbabilityTable& table, int j);

// Weights for every set (the empty one included), from the
// inclusion-exclusion transform of outside-option probabilities.
std::vector<SupportAtom> identify_from_outside(const ChoiceProbabilityTable& table);

enum class IdentifyStrategy {
    per_item, // each nonempty set recovered through its smallest member
    outside,  // every set recovered from outside-option probabilities
};

struct IdentificationReport {
    SSMModel recovered;
    double residual_negativity = 0.0; // most negative raw weight, sign flipped
    double normalization_gap = 0.0;   // |sum of raw weights - 1|
};

// Recovers a full model. Raw weights more negative than -tol or a weight
// sum off 1 by more than tol reject the table (InconsistencyError); small
// negatives are clamped and the rest rescaled.
IdentificationReport identify_full(const ChoiceProbabilityTable& table,
                                   IdentifyStrategy strategy = IdentifyStrategy::per_item,
                                   double tol = 1e-8);

enum class AxiomKind {
    s_cannibalization,             // removing k moves j exactly as removing j moves k
    d_regularity,                  // inclusion-exclusion transform is nonnegative
    item_choice_free,              // per-item recovery does not depend on the item
    transforms_agree,              // item-based and outside-based recovery coincide
    cannibalization_monotonicity,  // removal increments shrink as assortments grow
};

struct AxiomViolation {
    AxiomKind kind;
    ItemSet s1;          // witness assortment (or candidate set for recovery checks)
    ItemSet s2;          // enclosing assortment for monotonicity
    int j = 0;
    int k = 0;
    double magnitude = 0.0;

    std::string describe() const;
};

// Exhaustive over all assortments and member pairs.
std::vector<AxiomViolation> check_s_cannibalization(const ChoiceProbabilityTable& table,
                                                    double tol = 1e-9);

// Exhaustive over all assortments.
std::vector<AxiomViolation> check_d_regularity(const ChoiceProbabilityTable& table,
                                               double tol = 1e-9);

// Consistency of the recovery transforms themselves: item-choice freedom and
// agreement between the two transforms. Exhaustive for n <= 8, uniformly
// sampled above (samples draws per check, seeded).
std::vector<AxiomViolation> check_corollaries(const ChoiceProbabilityTable& table,
                                              double tol = 1e-9, int samples = 2000,
                                              std::uint64_t seed = 0);

// Nested-assortment monotonicity of removal increments. Exhaustive for
// n <= 8, uniformly sampled above.
std::vector<AxiomViolation> check_cannibalization_monotonicity(const ChoiceProbabilityTable& table,
                                                               double tol = 1e-9,
                                                               int samples = 20000,
                                                               std::uint64_t seed = 0);

} // namespace ssm
