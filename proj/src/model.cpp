#include "ssm/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ssm/dataset.hpp"
#include "ssm/errors.hpp"

namespace ssm {

namespace {

std::string fmt_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
}

} // namespace

SSMModel SSMModel::create(Universe u, std::vector<SupportAtom> atoms, double weight_tol) {
    for (const auto& a : atoms) {
        u.require_covers(a.set, "support set");
        if (!(a.weight >= 0.0))
            throw DomainError("negative or NaN weight " + fmt_num(a.weight) +
                              " on support set " + a.set.str());
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const SupportAtom& a, const SupportAtom& b) { return a.set.mask() < b.set.mask(); });
    std::vector<SupportAtom> merged;
    merged.reserve(atoms.size());
    for (const auto& a : atoms) {
        if (!merged.empty() && merged.back().set == a.set)
            merged.back().weight += a.weight;
        else
            merged.push_back(a);
    }
    double sum = 0.0;
    for (const auto& a : merged) sum += a.weight;
    if (std::abs(sum - 1.0) > weight_tol)
        throw DomainError("support weights sum to " + fmt_num(sum) +
                          ", not 1 (call normalize() to rescale)");
    return SSMModel(u, std::move(merged));
}

SSMModel SSMModel::normalize(Universe u, std::vector<SupportAtom> atoms) {
    double sum = 0.0;
    for (const auto& a : atoms) {
        if (!(a.weight >= 0.0))
            throw DomainError("negative or NaN weight on support set " + a.set.str());
        sum += a.weight;
    }
    if (!(sum > 0.0)) throw DomainError("cannot normalize: total support mass is not positive");
    for (auto& a : atoms) a.weight /= sum;
    return create(u, std::move(atoms), 1e-9);
}

double SSMModel::weight_of(ItemSet c) const {
    auto it = std::lower_bound(
        support_.begin(), support_.end(), c.mask(),
        [](const SupportAtom& a, std::uint64_t m) { return a.set.mask() < m; });
    if (it != support_.end() && it->set == c) return it->weight;
    return 0.0;
}

double choice_probability(const SSMModel& model, ItemSet s, int j) {
    model.universe().require_covers(s, "assortment");
    if (!model.universe().valid_choice(s, j))
        throw DomainError("alternative " + std::to_string(j) + " not offered in " + s.str());
    double p = 0.0;
    if (j == 0) {
        for (const auto& a : model.support())
            if (!a.set.intersects(s)) p += a.weight;
    } else {
        for (const auto& a : model.support())
            if (a.set.contains(j)) p += a.weight / double((a.set & s).size());
    }
    return p;
}

std::vector<std::pair<int, double>> choice_distribution(const SSMModel& model, ItemSet s) {
    model.universe().require_covers(s, "assortment");
    std::vector<std::pair<int, double>> out;
    out.reserve(std::size_t(s.size()) + 1);
    out.emplace_back(0, 0.0);
    for (int id : s) out.emplace_back(id, 0.0);
    for (const auto& a : model.support()) {
        ItemSet inter = a.set & s;
        if (inter.empty()) {
            out[0].second += a.weight;
        } else {
            const double share = a.weight / double(inter.size());
            // out entries follow id order, as does inter.
            std::size_t k = 1;
            for (int id : inter) {
                while (out[k].first != id) ++k;
                out[k].second += share;
            }
        }
    }
    return out;
}

ConditionalSetDistribution conditional_distribution(const SSMModel& model, ItemSet s) {
    model.universe().require_covers(s, "assortment");
    std::vector<SupportAtom> acc;
    for (const auto& a : model.support()) {
        if (a.weight == 0.0) continue;
        ItemSet proj = a.set & s;
        auto it = std::lower_bound(
            acc.begin(), acc.end(), proj.mask(),
            [](const SupportAtom& x, std::uint64_t m) { return x.set.mask() < m; });
        if (it != acc.end() && it->set == proj)
            it->weight += a.weight;
        else
            acc.insert(it, SupportAtom{proj, a.weight});
    }
    return ConditionalSetDistribution{s, std::move(acc)};
}

int sample_choice(const SSMModel& model, ItemSet s, RandomStream& rng) {
    model.universe().require_covers(s, "assortment");
    const auto& atoms = model.support();
    if (atoms.empty()) throw DomainError("model has empty support");
    // First stage: draw the preselected set by cumulative weight.
    double u = rng.uniform01();
    std::size_t pick = atoms.size() - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        acc += atoms[i].weight;
        if (u < acc) {
            pick = i;
            break;
        }
    }
    // Second stage: uniform within the intersection, outside when empty.
    ItemSet inter = atoms[pick].set & s;
    if (inter.empty()) return 0;
    auto k = rng.uniform_below(std::uint64_t(inter.size()));
    for (int id : inter) {
        if (k == 0) return id;
        --k;
    }
    return 0; // unreachable
}

ChoiceProbabilityTable ChoiceProbabilityTable::from_model(const SSMModel& model) {
    const Universe u = model.universe();
    if (u.n > kMaxUniverse)
        throw CapacityError("full table needs n <= " + std::to_string(kMaxUniverse) + ", got n = " +
                            std::to_string(u.n));
    const std::uint64_t rows = std::uint64_t(1) << u.n;
    std::vector<double> cells(rows * std::size_t(u.n + 1), 0.0);
    ChoiceProbabilityTable t(u, std::move(cells));
    for (std::uint64_t m = 0; m < rows; ++m) {
        ItemSet s(m);
        for (const auto& a : model.support()) {
            ItemSet inter = a.set & s;
            if (inter.empty()) {
                t.cells_[t.index(m, 0)] += a.weight;
            } else {
                const double share = a.weight / double(inter.size());
                for (int id : inter) t.cells_[t.index(m, id)] += share;
            }
        }
    }
    return t;
}

ChoiceProbabilityTable ChoiceProbabilityTable::from_rows(
    Universe u, const std::vector<std::pair<ItemSet, std::vector<std::pair<int, double>>>>& rows,
    double row_tol) {
    if (u.n > kMaxUniverse)
        throw CapacityError("full table needs n <= " + std::to_string(kMaxUniverse) + ", got n = " +
                            std::to_string(u.n));
    const std::uint64_t nrows = std::uint64_t(1) << u.n;
    std::vector<double> cells(nrows * std::size_t(u.n + 1), 0.0);
    std::vector<char> seen(nrows, 0);
    ChoiceProbabilityTable t(u, std::move(cells));
    for (const auto& [s, probs] : rows) {
        u.require_covers(s, "table assortment");
        if (seen[s.mask()])
            throw InputError("duplicate table row for assortment " + s.str());
        seen[s.mask()] = 1;
        double sum = 0.0;
        std::vector<char> given(std::size_t(u.n) + 1, 0);
        for (const auto& [id, p] : probs) {
            if (!u.valid_choice(s, id))
                throw InputError("table row " + s.str() + " lists alternative " +
                                 std::to_string(id) + " outside the assortment");
            if (given[std::size_t(id)])
                throw InputError("table row " + s.str() + " repeats alternative " +
                                 std::to_string(id));
            given[std::size_t(id)] = 1;
            if (!(p >= 0.0) || p > 1.0 + row_tol)
                throw InputError("table row " + s.str() + " has probability " + fmt_num(p) +
                                 " outside [0,1]");
            t.cells_[t.index(s.mask(), id)] = p;
            sum += p;
        }
        if (std::abs(sum - 1.0) > row_tol)
            throw InputError("table row " + s.str() + " sums to " + fmt_num(sum) + ", not 1");
    }
    for (std::uint64_t m = 0; m < nrows; ++m)
        if (!seen[m]) throw InputError("table is missing assortment " + ItemSet(m).str());
    return t;
}

double ChoiceProbabilityTable::prob(ItemSet s, int j) const {
    universe_.require_covers(s, "assortment");
    if (!universe_.valid_choice(s, j))
        throw DomainError("alternative " + std::to_string(j) + " not offered in " + s.str());
    return cells_[index(s.mask(), j)];
}

RankingDistribution to_ranking_distribution(const SSMModel& model) {
    RankingDistribution rd{model.universe(), {}};
    for (const auto& a : model.support()) {
        if (a.set.size() > 8)
            throw CapacityError("ranking expansion limited to support sets of size <= 8, got " +
                                a.set.str());
        if (a.weight == 0.0) continue;
        std::vector<int> ids = a.set.ids();
        if (ids.empty()) {
            // A never-buyer: ranks the outside option above everything.
            rd.rankings.push_back(Ranking{{}, a.weight});
            continue;
        }
        std::sort(ids.begin(), ids.end());
        double fact = 1.0;
        for (std::size_t k = 2; k <= ids.size(); ++k) fact *= double(k);
        const double w = a.weight / fact;
        do {
            rd.rankings.push_back(Ranking{ids, w});
        } while (std::next_permutation(ids.begin(), ids.end()));
    }
    return rd;
}

double choice_probability(const RankingDistribution& rd, ItemSet s, int j) {
    rd.universe.require_covers(s, "assortment");
    if (!rd.universe.valid_choice(s, j))
        throw DomainError("alternative " + std::to_string(j) + " not offered in " + s.str());
    double p = 0.0;
    for (const auto& r : rd.rankings) {
        int top = 0;
        for (int id : r.order) {
            if (s.contains(id)) {
                top = id;
                break;
            }
        }
        if (top == j) p += r.weight;
    }
    return p;
}

ChoiceProbabilityTable table_from_rankings(const RankingDistribution& rd) {
    const Universe u = rd.universe;
    if (u.n > ChoiceProbabilityTable::kMaxUniverse)
        throw CapacityError("full table needs n <= 16");
    std::vector<std::pair<ItemSet, std::vector<std::pair<int, double>>>> rows;
    const std::uint64_t nrows = std::uint64_t(1) << u.n;
    rows.reserve(nrows);
    for (std::uint64_t m = 0; m < nrows; ++m) {
        ItemSet s(m);
        std::vector<std::pair<int, double>> probs;
        probs.emplace_back(0, 0.0);
        for (int id : s) probs.emplace_back(id, 0.0);
        for (const auto& r : rd.rankings) {
            int top = 0;
            for (int id : r.order) {
                if (s.contains(id)) {
                    top = id;
                    break;
                }
            }
            for (auto& [id, p] : probs) {
                if (id == top) {
                    p += r.weight;
                    break;
                }
            }
        }
        rows.emplace_back(s, std::move(probs));
    }
    return ChoiceProbabilityTable::from_rows(u, rows);
}

std::optional<double> log_likelihood(const SSMModel& model, const ChoiceDataset& data) {
    if (!(model.universe() == data.universe()))
        throw DomainError("model and dataset universes differ");
    double ll = 0.0;
    for (const auto& row : data.rows()) {
        for (int id = 0; id <= model.universe().n; ++id) {
            const std::int64_t c = row.counts[std::size_t(id)];
            if (c == 0) continue;
            const double p = choice_probability(model, row.assortment, id);
            if (p <= 0.0) return std::nullopt;
            ll += double(c) * std::log(p);
        }
    }
    return ll;
}

} // namespace ssm
