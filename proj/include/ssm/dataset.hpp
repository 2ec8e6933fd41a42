#pragma once

#include <cstdint>
#include <vector>

#include "ssm/itemset.hpp"

namespace ssm {

// One sales record: the assortment shown and the alternative chosen
// (a member id, or 0 for no purchase). line is a 1-based source position
// used in error messages; 0 when not file-backed.
struct Transaction {
    ItemSet assortment;
    int choice = 0;
    long line = 0;
};

// Per-assortment choice counts.
struct AssortmentCounts {
    ItemSet assortment;
    std::vector<std::int64_t> counts; // index 0 = outside, i = product i
    std::int64_t total = 0;           // sum of counts

    std::int64_t count(int id) const { return counts[std::size_t(id)]; }
};

// Aggregated transactions: counts tau(S, i) grouped by unique assortment.
class ChoiceDataset {
public:
    // Rejects records whose assortment leaves the universe or whose choice
    // is neither 0 nor a member of its assortment, naming the line.
    static ChoiceDataset from_transactions(Universe u, const std::vector<Transaction>& records);

    const Universe& universe() const { return universe_; }
    // Unique assortments in increasing mask order.
    const std::vector<AssortmentCounts>& rows() const { return rows_; }
    std::int64_t total() const { return total_; }

    // Empirical choice share within one row; row total must be positive.
    double share(const AssortmentCounts& row, int id) const {
        return double(row.count(id)) / double(row.total);
    }

    // Flattens back to one record per observed (S, i), counts expanded.
    std::vector<Transaction> to_transactions() const;

private:
    ChoiceDataset(Universe u, std::vector<AssortmentCounts> rows, std::int64_t total)
        : universe_(u), rows_(std::move(rows)), total_(total) {}

    Universe universe_;
    std::vector<AssortmentCounts> rows_;
    std::int64_t total_ = 0;
};

} // namespace ssm
