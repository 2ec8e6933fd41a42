#include "ssm/dataset.hpp"

#include <algorithm>
#include <map>

#include "ssm/errors.hpp"

namespace ssm {

ChoiceDataset ChoiceDataset::from_transactions(Universe u,
                                               const std::vector<Transaction>& records) {
    std::map<std::uint64_t, AssortmentCounts> by_mask;
    std::int64_t total = 0;
    for (const auto& r : records) {
        const std::string where =
            r.line > 0 ? " (line " + std::to_string(r.line) + ")" : "";
        if (!u.covers(r.assortment))
            throw InputError("assortment " + r.assortment.str() + " not within universe of size " +
                             std::to_string(u.n) + where);
        if (!u.valid_choice(r.assortment, r.choice))
            throw InputError("choice " + std::to_string(r.choice) + " is neither 0 nor a member of " +
                             r.assortment.str() + where);
        auto [it, fresh] = by_mask.try_emplace(r.assortment.mask());
        if (fresh) {
            it->second.assortment = r.assortment;
            it->second.counts.assign(std::size_t(u.n) + 1, 0);
        }
        it->second.counts[std::size_t(r.choice)] += 1;
        it->second.total += 1;
        total += 1;
    }
    std::vector<AssortmentCounts> rows;
    rows.reserve(by_mask.size());
    for (auto& [mask, row] : by_mask) rows.push_back(std::move(row));
    return ChoiceDataset(u, std::move(rows), total);
}

std::vector<Transaction> ChoiceDataset::to_transactions() const {
    std::vector<Transaction> out;
    out.reserve(std::size_t(total_));
    for (const auto& row : rows_)
        for (int id = 0; id <= universe_.n; ++id)
            for (std::int64_t k = 0; k < row.counts[std::size_t(id)]; ++k)
                out.push_back(Transaction{row.assortment, id, 0});
    return out;
}

} // namespace ssm
