#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ssm/itemset.hpp"
#include "ssm/rng.hpp"

namespace ssm {

class ChoiceDataset;

// One support atom: a preselected set and its probability mass.
struct SupportAtom {
    ItemSet set;
    double weight = 0.0;
};

// Two-stage choice model: a consumer samples a preselected set C with
// probability lambda(C), then picks uniformly from C intersected with the
// offered assortment, falling back to the outside option when the
// intersection is empty.
class SSMModel {
public:
    // Duplicate sets are merged. Weights must be nonnegative and sum to 1
    // within weight_tol; construction fails loudly instead of rescaling
    // (use normalize() when rescaling is intended). The empty set is a
    // legal atom (a never-buying consumer type).
    static SSMModel create(Universe u, std::vector<SupportAtom> atoms, double weight_tol = 1e-9);

    // Same as create() but rescales weights to sum 1. Total mass must be
    // positive.
    static SSMModel normalize(Universe u, std::vector<SupportAtom> atoms);

    const Universe& universe() const { return universe_; }
    // Atoms in increasing mask order, unique sets.
    const std::vector<SupportAtom>& support() const { return support_; }
    // 0 when the set carries no mass.
    double weight_of(ItemSet c) const;

private:
    SSMModel(Universe u, std::vector<SupportAtom> atoms)
        : universe_(u), support_(std::move(atoms)) {}

    Universe universe_;
    std::vector<SupportAtom> support_;
};

// P_j(S) for j in S, or the no-purchase probability for j = 0. j must be a
// member of S or 0.
double choice_probability(const SSMModel& model, ItemSet s, int j);

// All choice probabilities for one assortment: entry 0 is the outside
// option, entry for each member id of s follows in increasing id order.
std::vector<std::pair<int, double>> choice_distribution(const SSMModel& model, ItemSet s);

// Distribution of the preselected set's intersection with s. Atoms with
// zero mass are omitted; the result is itself a distribution over subsets
// of s (the conditional model observed through assortment s).
struct ConditionalSetDistribution {
    ItemSet assortment;
    std::vector<SupportAtom> atoms; // increasing mask order
};
ConditionalSetDistribution conditional_distribution(const SSMModel& model, ItemSet s);

// Draw one choice from assortment s; returns a member id or 0.
int sample_choice(const SSMModel& model, ItemSet s, RandomStream& rng);

// Choice probabilities for every assortment, indexed by assortment mask and
// alternative id (0 = outside). Row entries for non-members are 0.
class ChoiceProbabilityTable {
public:
    static constexpr int kMaxUniverse = 16;

    static ChoiceProbabilityTable from_model(const SSMModel& model);

    // Builds from explicit rows; every assortment mask must appear exactly
    // once, probabilities must be nonnegative, sum to 1 over each row
    // within row_tol, vanish for non-members, and the empty assortment must
    // give the outside option probability 1.
    static ChoiceProbabilityTable from_rows(
        Universe u,
        const std::vector<std::pair<ItemSet, std::vector<std::pair<int, double>>>>& rows,
        double row_tol = 1e-9);

    const Universe& universe() const { return universe_; }
    double prob(ItemSet s, int j) const;

private:
    ChoiceProbabilityTable(Universe u, std::vector<double> cells)
        : universe_(u), cells_(std::move(cells)) {}

    std::size_t index(std::uint64_t mask, int j) const {
        return mask * std::size_t(universe_.n + 1) + std::size_t(j);
    }

    Universe universe_;
    std::vector<double> cells_; // [mask][j], j in 0..n
};

// A strict preference order over some products; everything absent ranks
// below the outside option and is never chosen. A consumer facing s buys
// the first listed product present in s, or walks away.
struct Ranking {
    std::vector<int> order;
    double weight = 0.0;
};

struct RankingDistribution {
    Universe universe;
    std::vector<Ranking> rankings;
};

// Expands each support atom C into all |C|! orderings, each carrying weight
// lambda(C)/|C|!. Reproduces the model's choice probabilities exactly.
// Guarded to atoms of size <= 8 (8! orderings per atom).
RankingDistribution to_ranking_distribution(const SSMModel& model);

double choice_probability(const RankingDistribution& rd, ItemSet s, int j);
ChoiceProbabilityTable table_from_rankings(const RankingDistribution& rd);

// Sum over observations of count * log P(choice | assortment). Returns
// nullopt when some observed cell has probability 0, a distinct "impossible"
// outcome callers must handle (not a float infinity).
std::optional<double> log_likelihood(const SSMModel& model, const ChoiceDataset& data);

} // namespace ssm
