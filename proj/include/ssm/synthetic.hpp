#pragma once

#include <cstdint>
#include <vector>

#include "ssm/dataset.hpp"
#include "ssm/model.hpp"
#include "ssm/rng.hpp"

namespace ssm {

// support_size distinct preselected sets drawn uniformly (the empty set
// eligible unless allow_empty is false), weights uniform on the simplex.
SSMModel random_model(Universe u, int support_size, RandomStream& rng, bool allow_empty = true);

// count transactions: assortment uniform over nonempty subsets, then one
// sampled choice. Lines are numbered from 1.
std::vector<Transaction> sample_transactions(const SSMModel& model, std::int64_t count,
                                             RandomStream& rng);

ChoiceDataset sample_dataset(const SSMModel& model, std::int64_t count, RandomStream& rng);

// Recipe for a synthetic experiment, expanded from a single seed through
// fixed stream labels ("model", "transactions").
struct SyntheticSpec {
    int n = 5;
    int support_size = 3;
    std::int64_t transactions = 10000;
};

struct SyntheticRun {
    SSMModel model;
    std::vector<Transaction> transactions;
};

SyntheticRun generate(const SyntheticSpec& spec, std::uint64_t seed);

} // namespace ssm
