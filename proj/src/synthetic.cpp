#include "ssm/synthetic.hpp"

#include <set>

#include "ssm/errors.hpp"

namespace ssm {

SSMModel random_model(Universe u, int support_size, RandomStream& rng, bool allow_empty) {
    const std::uint64_t pool = (std::uint64_t(1) << u.n) - (allow_empty ? 0 : 1);
    if (support_size < 1 || std::uint64_t(support_size) > pool)
        throw DomainError("support size " + std::to_string(support_size) +
                          " impossible for universe of size " + std::to_string(u.n));
    std::set<std::uint64_t> masks;
    while (masks.size() < std::size_t(support_size)) {
        std::uint64_t m = rng.uniform_below(std::uint64_t(1) << u.n);
        if (!allow_empty && m == 0) continue;
        masks.insert(m);
    }
    std::vector<SupportAtom> atoms;
    atoms.reserve(masks.size());
    for (std::uint64_t m : masks) atoms.push_back({ItemSet(m), rng.exponential()});
    return SSMModel::normalize(u, std::move(atoms));
}

std::vector<Transaction> sample_transactions(const SSMModel& model, std::int64_t count,
                                             RandomStream& rng) {
    if (count < 0) throw DomainError("negative transaction count");
    const Universe u = model.universe();
    const std::uint64_t all = u.full().mask();
    std::vector<Transaction> out;
    out.reserve(std::size_t(count));
    for (std::int64_t t = 0; t < count; ++t) {
        const ItemSet s(1 + rng.uniform_below(all)); // uniform over nonempty assortments
        out.push_back(Transaction{s, sample_choice(model, s, rng), long(t + 1)});
    }
    return out;
}

ChoiceDataset sample_dataset(const SSMModel& model, std::int64_t count, RandomStream& rng) {
    return ChoiceDataset::from_transactions(model.universe(), sample_transactions(model, count, rng));
}

SyntheticRun generate(const SyntheticSpec& spec, std::uint64_t seed) {
    const Universe u = Universe::of(spec.n);
    RandomStream model_rng(seed, "model");
    SSMModel model = random_model(u, spec.support_size, model_rng);
    RandomStream txn_rng(seed, "transactions");
    return SyntheticRun{model, sample_transactions(model, spec.transactions, txn_rng)};
}

} // namespace ssm
