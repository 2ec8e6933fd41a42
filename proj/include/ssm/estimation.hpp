#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ssm/dataset.hpp"
#include "ssm/model.hpp"

namespace ssm {

struct EMConfig {
    int max_iters = 500;
    double ll_tol = 1e-9; // stop when one iteration gains less than this
};

// State of the support-restricted likelihood maximization.
struct RestrictedFit {
    std::vector<ItemSet> support;
    std::vector<double> lambda;          // aligned with support, sums to 1
    std::vector<std::vector<double>> y;  // y[row][id]: choice probabilities under lambda
    std::vector<double> ll_history;      // log-likelihood after each accepted update
    double log_lik = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string stop_reason;             // "ll_tol" | "max_iters" | "fp_floor"
};

// Expectation-maximization over a fixed support list. init, when given,
// must align with support; otherwise the start is uniform. Every observed
// choice must be explainable by some support set (CoverageError names the
// first offender). The recorded log-likelihood history is nondecreasing: an
// update whose evaluated log-likelihood drops (possible only at rounding
// noise) is rejected and the run stops there.
RestrictedFit em_fit(const ChoiceDataset& data, std::vector<ItemSet> support,
                     const std::optional<std::vector<double>>& init, const EMConfig& cfg);

// Lagrange prices of the restricted problem at an EM fixed point:
// alpha[row][id] = count/probability on observed cells (0 elsewhere),
// beta = -(total transactions).
struct DualPrices {
    std::vector<std::vector<double>> alpha; // aligned with data rows
    double beta = 0.0;
};
DualPrices dual_prices(const ChoiceDataset& data, const RestrictedFit& fit);

// Rate of likelihood improvement from introducing candidate set c:
//   sum over rows of [alpha_0 if c misses the assortment, else the mean of
//   alpha over the intersection] + beta.
// Positive means improving.
double reduced_cost(const ChoiceDataset& data, const DualPrices& duals, ItemSet c);

struct SubproblemResult {
    ItemSet best;
    double value = 0.0; // reduced cost of best
};

// Exact pricing by enumerating all subsets (universe capped at 24). Ties
// resolve to the smallest mask.
SubproblemResult cg_subproblem_bruteforce(const ChoiceDataset& data, const DualPrices& duals);

struct CGConfig {
    double rc_tol = 1e-7;     // stop when max reduced cost <= rc_tol * total
    int max_columns = 1000;   // new columns beyond the initial support
    EMConfig inner{500, 1e-9};
    EMConfig final_round{5000, 1e-9};
    double prune_tol = 1e-12; // final weights below this are dropped
};

struct CGFit {
    SSMModel model;
    double log_lik = 0.0;
    int columns_added = 0;
    int em_iterations = 0;        // summed over all restricted fits
    std::string stop_reason;      // "converged" | "column_limit"
    double final_reduced_cost = 0.0; // pricing value at stop; bounds the
                                     // gap to the unrestricted optimum
};

// Maximum-likelihood fit over all 2^n candidate sets by column generation:
// restricted EM, exact pricing, repeat. Starts from the empty set plus all
// singletons, which can explain any observation.
CGFit column_generation_fit(const ChoiceDataset& data, const CGConfig& cfg = {});

} // namespace ssm
