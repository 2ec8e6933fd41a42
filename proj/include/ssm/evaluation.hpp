#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ssm/dataset.hpp"
#include "ssm/itemset.hpp"
#include "ssm/model.hpp"

namespace ssm {

// Choice-probability oracle: probability of alternative i (0 = outside)
// when assortment s is offered.
using Predictor = std::function<double(ItemSet s, int i)>;

struct AssortmentMetrics {
    ItemSet assortment;
    std::int64_t count = 0; // transactions observed at this assortment
    double kl = 0.0;        // row value, unweighted
    double mape = 0.0;
    int skipped_cells = 0;  // cells with empirical probability 0
};

struct MetricsReport {
    double kl = 0.0;   // transaction-weighted average; +inf when the
                       // predictor assigns 0 to an observed outcome
    double mape = 0.0; // transaction-weighted, zero-frequency cells skipped
    std::int64_t skipped_cells = 0;
    std::vector<AssortmentMetrics> per_assortment;
};

MetricsReport compute_metrics(const ChoiceDataset& test, const Predictor& predict);
double kl_divergence(const ChoiceDataset& test, const Predictor& predict);
double mape(const ChoiceDataset& test, const Predictor& predict);

// Multinomial logit with the outside option's weight fixed at 1:
// P_j(S) = v_j / (1 + sum_{k in S} v_k).
struct MNLModel {
    Universe universe{1};
    std::vector<double> weights; // weights[j] for j in 1..n; slot 0 unused

    double prob(ItemSet s, int i) const;
};

// Constant per-product purchase share; the outside option absorbs the
// remainder, so P_0(S) = 1 - sum_{j in S} share_j.
struct IndependentModel {
    Universe universe{1};
    std::vector<double> shares; // shares[j] for j in 1..n; slot 0 unused

    double prob(ItemSet s, int i) const;
};

struct BaselineFit {
    IndependentModel independent;
    MNLModel mnl;
    std::vector<double> mnl_ll_history; // likelihood of each improving iterate;
                                        // flat-to-float tail iterations add none
    int mnl_iterations = 0;
    bool mnl_converged = false;
    std::vector<std::string> warnings;
};

// Independent shares are the overall empirical purchase shares; the logit
// weights come from a deterministic fixed-point ascent of the training
// log-likelihood (never-offered products get a tiny pinned weight).
BaselineFit fit_baselines(const ChoiceDataset& train);

struct AsymmetryEstimate {
    double index = 0.0;
    double std_error = 0.0;     // sampling standard error; 0 in exhaustive mode
    std::int64_t n_samples = 0; // terms averaged (Monte Carlo draws or
                                // exhaustive pairs)
    std::uint64_t seed = 0;     // 0 in exhaustive mode
    std::int64_t zero_denominator_draws = 0;
    bool exhaustive = false;
};

// How asymmetric the cannibalization pattern of a choice model is: the
// average over assortments S (|S| >= 2) and product pairs {j,k} of
// |[P_j(S\k) - P_j(S)] - [P_k(S\j) - P_k(S)]| / (P_j(S) + P_k(S)).
// Monte Carlo draws (S, {j,k}) uniformly; zero-denominator draws are
// rejected and counted. The exhaustive mode averages every pair with the
// same two-stage weighting and is limited to n <= 8.
AsymmetryEstimate asymmetry_index(Universe u, const Predictor& predict, std::int64_t n_samples,
                                  std::uint64_t seed);
AsymmetryEstimate asymmetry_index_exhaustive(Universe u, const Predictor& predict);

// Same index for a set-distribution model. Every term vanishes identically
// under such a model — both choice-probability differences collapse to the
// same per-type expression — and these overloads compute the cancellation
// type by type, so the result is exactly 0.0, not merely small.
AsymmetryEstimate asymmetry_index(const SSMModel& model, std::int64_t n_samples,
                                  std::uint64_t seed);
AsymmetryEstimate asymmetry_index_exhaustive(const SSMModel& model);

struct EvaluationRow {
    std::string name;
    MetricsReport metrics;
    std::vector<std::string> warnings;
};

// Fits each named model ("ssm", "mnl", "independent") on the training data
// and scores its predictions on the test data.
std::vector<EvaluationRow> evaluate(const ChoiceDataset& train, const ChoiceDataset& test,
                                    const std::vector<std::string>& models);

} // namespace ssm
