#include "ssm/identification.hpp"

#include <cmath>
#include <cstdio>

#include "ssm/errors.hpp"
#include "ssm/rng.hpp"

namespace ssm {

namespace {

std::string fmt_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
}

// Weight of one set c through item j in c. Write D for the complement of c.
// Only crossings X with |c u X| >= n-1 contribute, i.e. X must contain all
// of D or all but one element; the weight collapses to
//   sum over A subset of c with j in A of (-1)^|A| *
//     (sum over t in D of P_j(A u D \ {t})  -  n * P_j(A u D)).
// Terms alternate in sign, hence the compensated accumulator.
double weight_via_item(const ChoiceProbabilityTable& table, ItemSet c, int j) {
    const Universe u = table.universe();
    const ItemSet comp = u.full() - c;
    CompensatedSum acc;
    for_each_subset(c.without(j), [&](ItemSet rest) {
        const ItemSet a = rest.with(j);
        const double sign = (a.size() % 2 == 0) ? 1.0 : -1.0;
        for (int t : comp) acc.add(sign * table.prob((a | comp).without(t), j));
        acc.add(sign * -double(u.n) * table.prob(a | comp, j));
    });
    return acc.value();
}

// Weight of one set c from outside-option probabilities:
//   sum over X subset of c of (-1)^(|c|-|X|) * P_0(N \ X).
double weight_via_outside(const ChoiceProbabilityTable& table, ItemSet c) {
    const Universe u = table.universe();
    CompensatedSum acc;
    const int csz = c.size();
    for_each_subset(c, [&](ItemSet x) {
        const double sign = ((csz - x.size()) % 2 == 0) ? 1.0 : -1.0;
        acc.add(sign * table.prob(u.full() - x, 0));
    });
    return acc.value();
}

double delta(const ChoiceProbabilityTable& table, ItemSet s, int j, int k) {
    return table.prob(s.without(k), j) - table.prob(s, j);
}

} // namespace

std::vector<SupportAtom> identify_from_item(const ChoiceProbabilityTable& table, int j) {
    const Universe u = table.universe();
    if (j < 1 || j > u.n)
        throw DomainError("item " + std::to_string(j) + " outside universe of size " +
                          std::to_string(u.n));
    std::vector<SupportAtom> out;
    out.reserve(std::size_t(1) << (u.n - 1));
    const std::uint64_t all = u.full().mask();
    for (std::uint64_t m = 0; m <= all; ++m) {
        ItemSet c(m);
        if (!c.contains(j)) continue;
        out.push_back(SupportAtom{c, weight_via_item(table, c, j)});
    }
    return out;
}

std::vector<SupportAtom> identify_from_outside(const ChoiceProbabilityTable& table) {
    const Universe u = table.universe();
    std::vector<SupportAtom> out;
    out.reserve(std::size_t(1) << u.n);
    const std::uint64_t all = u.full().mask();
    for (std::uint64_t m = 0; m <= all; ++m)
        out.push_back(SupportAtom{ItemSet(m), weight_via_outside(table, ItemSet(m))});
    return out;
}

IdentificationReport identify_full(const ChoiceProbabilityTable& table, IdentifyStrategy strategy,
                                   double tol) {
    const Universe u = table.universe();
    std::vector<SupportAtom> raw;
    raw.reserve(std::size_t(1) << u.n);
    const std::uint64_t all = u.full().mask();
    for (std::uint64_t m = 0; m <= all; ++m) {
        ItemSet c(m);
        double w;
        if (c.empty())
            // The item transform needs a member item, so the weight of the
            // empty set always comes from P_0(N), its outside-transform value.
            w = table.prob(u.full(), 0);
        else
            w = strategy == IdentifyStrategy::per_item ? weight_via_item(table, c, c.lowest())
                                                       : weight_via_outside(table, c);
        raw.push_back(SupportAtom{c, w});
    }

    double most_negative = 0.0;
    ItemSet worst;
    CompensatedSum total;
    for (const auto& a : raw) {
        if (a.weight < most_negative) {
            most_negative = a.weight;
            worst = a.set;
        }
        total.add(a.weight);
    }
    IdentificationReport report{SSMModel::create(u, {{ItemSet(), 1.0}}), -most_negative,
                                std::abs(total.value() - 1.0)};
    if (report.residual_negativity > tol)
        throw InconsistencyError("table is not consistent with any model of this class: "
                                 "recovered weight of " +
                                 worst.str() + " is " + fmt_num(most_negative) +
                                 " (negativity " + fmt_num(report.residual_negativity) +
                                 " > tol " + fmt_num(tol) + ")");
    if (report.normalization_gap > tol)
        throw InconsistencyError("table is not consistent with any model of this class: "
                                 "recovered weights sum to " +
                                 fmt_num(total.value()) + " (gap " +
                                 fmt_num(report.normalization_gap) + " > tol " + fmt_num(tol) +
                                 ")");

    std::vector<SupportAtom> kept;
    for (const auto& a : raw)
        if (a.weight > 0.0) kept.push_back(a);
    if (kept.empty()) kept.push_back(SupportAtom{ItemSet(), 1.0});
    report.recovered = SSMModel::normalize(u, std::move(kept));
    return report;
}

std::string AxiomViolation::describe() const {
    switch (kind) {
    case AxiomKind::s_cannibalization:
        return "S-cannibalization broken at S=" + s1.str() + ", j=" + std::to_string(j) + ", k=" +
               std::to_string(k) + ": removal effects differ by " + fmt_num(magnitude);
    case AxiomKind::d_regularity:
        return "D-regularity broken at S=" + s1.str() + ": transform value " + fmt_num(-magnitude);
    case AxiomKind::item_choice_free:
        return "item-based recovery of C=" + s1.str() + " depends on the item: j=" +
               std::to_string(j) + " vs k=" + std::to_string(k) + " differ by " +
               fmt_num(magnitude);
    case AxiomKind::transforms_agree:
        return "item and outside recoveries of C=" + s1.str() + " differ by " + fmt_num(magnitude);
    case AxiomKind::cannibalization_monotonicity:
        return "removal increment grows from S1=" + s1.str() + " to S2=" + s2.str() + " for j=" +
               std::to_string(j) + ", k=" + std::to_string(k) + " by " + fmt_num(magnitude);
    }
    return "";
}

std::vector<AxiomViolation> check_s_cannibalization(const ChoiceProbabilityTable& table,
                                                    double tol) {
    const Universe u = table.universe();
    std::vector<AxiomViolation> out;
    const std::uint64_t all = u.full().mask();
    for (std::uint64_t m = 0; m <= all; ++m) {
        ItemSet s(m);
        if (s.size() < 2) continue;
        for (int j : s)
            for (int k : s) {
                if (k <= j) continue;
                const double gap = delta(table, s, j, k) - delta(table, s, k, j);
                if (std::abs(gap) > tol)
                    out.push_back(
                        AxiomViolation{AxiomKind::s_cannibalization, s, {}, j, k, std::abs(gap)});
            }
    }
    return out;
}

std::vector<AxiomViolation> check_d_regularity(const ChoiceProbabilityTable& table, double tol) {
    const Universe u = table.universe();
    std::vector<AxiomViolation> out;
    const std::uint64_t all = u.full().mask();
    for (std::uint64_t m = 0; m <= all; ++m) {
        const double v = weight_via_outside(table, ItemSet(m));
        if (v < -tol)
            out.push_back(AxiomViolation{AxiomKind::d_regularity, ItemSet(m), {}, 0, 0, -v});
    }
    return out;
}

std::vector<AxiomViolation> check_corollaries(const ChoiceProbabilityTable& table, double tol,
                                              int samples, std::uint64_t seed) {
    const Universe u = table.universe();
    std::vector<AxiomViolation> out;

    auto check_item_free = [&](ItemSet c) {
        const double ref = weight_via_item(table, c, c.lowest());
        for (int j : c) {
            if (j == c.lowest()) continue;
            const double gap = weight_via_item(table, c, j) - ref;
            if (std::abs(gap) > tol)
                out.push_back(AxiomViolation{AxiomKind::item_choice_free, c, {}, c.lowest(), j,
                                             std::abs(gap)});
        }
    };
    auto check_agreement = [&](ItemSet c) {
        const double gap = weight_via_item(table, c, c.lowest()) - weight_via_outside(table, c);
        if (std::abs(gap) > tol)
            out.push_back(
                AxiomViolation{AxiomKind::transforms_agree, c, {}, c.lowest(), 0, std::abs(gap)});
    };

    if (u.n <= 8) {
        const std::uint64_t all = u.full().mask();
        for (std::uint64_t m = 1; m <= all; ++m) {
            ItemSet c(m);
            if (c.size() >= 2) check_item_free(c);
            check_agreement(c);
        }
    } else {
        RandomStream rng(seed, "corollary-checks");
        const std::uint64_t all = u.full().mask();
        for (int i = 0; i < samples; ++i) {
            ItemSet c(1 + rng.uniform_below(all)); // uniform over nonempty sets
            if (c.size() >= 2) check_item_free(c);
            check_agreement(c);
        }
    }
    return out;
}

std::vector<AxiomViolation> check_cannibalization_monotonicity(const ChoiceProbabilityTable& table,
                                                               double tol, int samples,
                                                               std::uint64_t seed) {
    const Universe u = table.universe();
    std::vector<AxiomViolation> out;

    auto check_quad = [&](ItemSet s1, ItemSet s2) {
        for (int j : s1)
            for (int k : s1) {
                if (k == j) continue;
                const double gap = delta(table, s2, j, k) - delta(table, s1, j, k);
                if (gap > tol)
                    out.push_back(AxiomViolation{AxiomKind::cannibalization_monotonicity, s1, s2, j,
                                                 k, gap});
            }
    };

    if (u.n <= 8) {
        const std::uint64_t all = u.full().mask();
        for (std::uint64_t m2 = 0; m2 <= all; ++m2) {
            ItemSet s2(m2);
            if (s2.size() < 2) continue;
            for_each_subset(s2, [&](ItemSet s1) {
                if (s1.size() < 2 || s1 == s2) return;
                check_quad(s1, s2);
            });
        }
    } else {
        RandomStream rng(seed, "monotonicity-checks");
        const std::uint64_t all = u.full().mask();
        for (int i = 0; i < samples; ++i) {
            ItemSet s2(rng.next_u64() & all);
            if (s2.size() < 3) continue; // need a strict sub-assortment with a pair
            ItemSet s1(rng.next_u64() & s2.mask());
            if (s1.size() < 2 || s1 == s2) continue;
            check_quad(s1, s2);
        }
    }
    return out;
}

} // namespace ssm
