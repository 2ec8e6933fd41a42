#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "ssm/dataset.hpp"
#include "ssm/errors.hpp"
#include "ssm/model.hpp"

using namespace ssm;

namespace {

// Three-type model used across suites: weights 0.6, 0.1, 0.3 on
// {1,2,3,4}, {1,3,5}, {3,4,5} over five products.
SSMModel three_type_model() {
    return SSMModel::create(Universe::of(5), {
                                                 {ItemSet::of({1, 3, 5}), 0.1},
                                                 {ItemSet::of({1, 2, 3, 4}), 0.6},
                                                 {ItemSet::of({3, 4, 5}), 0.3},
                                             });
}

} // namespace

TEST_CASE("construction validates and merges") {
    Universe u = Universe::of(3);
    CHECK_THROWS_AS(SSMModel::create(u, {{ItemSet::of({1}), 0.5}}), DomainError);
    CHECK_THROWS_AS(SSMModel::create(u, {{ItemSet::of({1}), -0.2}, {ItemSet::of({2}), 1.2}}),
                    DomainError);
    CHECK_THROWS_AS(SSMModel::create(u, {{ItemSet::of({4}), 1.0}}), DomainError);

    SSMModel m = SSMModel::create(
        u, {{ItemSet::of({2}), 0.25}, {ItemSet::of({1}), 0.5}, {ItemSet::of({2}), 0.25}});
    CHECK(m.support().size() == 2);
    CHECK(m.support()[0].set == ItemSet::of({1}));
    CHECK(m.support()[1].set == ItemSet::of({2}));
    CHECK(m.weight_of(ItemSet::of({2})) == 0.5);
    CHECK(m.weight_of(ItemSet::of({1, 2})) == 0.0);

    SSMModel scaled = SSMModel::normalize(u, {{ItemSet::of({1}), 2.0}, {ItemSet::of({3}), 6.0}});
    CHECK(scaled.weight_of(ItemSet::of({1})) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK_THROWS_AS(SSMModel::normalize(u, {{ItemSet::of({1}), 0.0}}), DomainError);

    // The empty set is a legal atom.
    SSMModel lazy = SSMModel::create(u, {{ItemSet(), 0.4}, {ItemSet::of({1}), 0.6}});
    CHECK(choice_probability(lazy, ItemSet::of({1}), 0) == doctest::Approx(0.4));
}

TEST_CASE("three-type model: probabilities and conditionals") {
    SSMModel m = three_type_model();
    ItemSet s = ItemSet::of({2, 3});

    CHECK(std::abs(choice_probability(m, s, 2) - 0.3) < 1e-15);
    CHECK(std::abs(choice_probability(m, s, 3) - 0.7) < 1e-15);
    CHECK(choice_probability(m, s, 0) == 0.0);
    CHECK_THROWS_AS(choice_probability(m, s, 4), DomainError);
    CHECK_THROWS_AS(choice_probability(m, ItemSet::of({9}), 0), DomainError);

    ConditionalSetDistribution cond = conditional_distribution(m, s);
    REQUIRE(cond.atoms.size() == 2);
    CHECK(cond.atoms[0].set == ItemSet::of({3}));
    CHECK(std::abs(cond.atoms[0].weight - 0.4) < 1e-15);
    CHECK(cond.atoms[1].set == ItemSet::of({2, 3}));
    CHECK(std::abs(cond.atoms[1].weight - 0.6) < 1e-15);

    // Feeding the conditional atoms back through the uniform second stage
    // reproduces the choice probabilities.
    for (int j : s) {
        double p = 0.0;
        for (const auto& a : cond.atoms)
            if (a.set.contains(j)) p += a.weight / double(a.set.size());
        CHECK(p == doctest::Approx(choice_probability(m, s, j)).epsilon(1e-14));
    }
}

TEST_CASE("choice distribution rows sum to one") {
    SSMModel m = three_type_model();
    for (std::uint64_t mask = 0; mask < 32; ++mask) {
        auto dist = choice_distribution(m, ItemSet(mask));
        double sum = 0.0;
        for (auto& [id, p] : dist) {
            CHECK(p >= 0.0);
            sum += p;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("full table matches pointwise probabilities") {
    SSMModel m = three_type_model();
    ChoiceProbabilityTable t = ChoiceProbabilityTable::from_model(m);
    for (std::uint64_t mask = 0; mask < 32; ++mask) {
        ItemSet s(mask);
        CHECK(t.prob(s, 0) == choice_probability(m, s, 0));
        for (int j : s) CHECK(t.prob(s, j) == choice_probability(m, s, j));
    }
    CHECK(t.prob(ItemSet(), 0) == 1.0);
}

TEST_CASE("table row validation") {
    Universe u = Universe::of(2);
    using Row = std::pair<ItemSet, std::vector<std::pair<int, double>>>;
    std::vector<Row> rows = {
        {ItemSet(), {{0, 1.0}}},
        {ItemSet::of({1}), {{0, 0.5}, {1, 0.5}}},
        {ItemSet::of({2}), {{0, 0.5}, {2, 0.5}}},
        {ItemSet::of({1, 2}), {{0, 0.2}, {1, 0.3}, {2, 0.5}}},
    };
    CHECK_NOTHROW(ChoiceProbabilityTable::from_rows(u, rows));

    auto bad = rows;
    bad[3].second[1].second = 0.4; // row no longer sums to 1
    CHECK_THROWS_AS(ChoiceProbabilityTable::from_rows(u, bad), InputError);

    bad = rows;
    bad[1].second.push_back({2, 0.0}); // alternative outside the assortment
    CHECK_THROWS_AS(ChoiceProbabilityTable::from_rows(u, bad), InputError);

    bad = rows;
    bad.pop_back(); // missing assortment
    CHECK_THROWS_AS(ChoiceProbabilityTable::from_rows(u, bad), InputError);

    bad = rows;
    bad.push_back(rows[1]); // duplicate assortment
    CHECK_THROWS_AS(ChoiceProbabilityTable::from_rows(u, bad), InputError);
}

TEST_CASE("ranking expansion reproduces the table") {
    SSMModel m = three_type_model();
    RankingDistribution rd = to_ranking_distribution(m);
    // 3! + 4! + 3! orderings.
    CHECK(rd.rankings.size() == 6 + 24 + 6);
    double mass = 0.0;
    for (const auto& r : rd.rankings) mass += r.weight;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(std::abs(choice_probability(rd, ItemSet::of({2, 3}), 3) - 0.7) < 1e-12);

    ChoiceProbabilityTable direct = ChoiceProbabilityTable::from_model(m);
    ChoiceProbabilityTable via = table_from_rankings(rd);
    for (std::uint64_t mask = 0; mask < 32; ++mask) {
        ItemSet s(mask);
        CHECK(std::abs(direct.prob(s, 0) - via.prob(s, 0)) <= 1e-12);
        for (int j : s) CHECK(std::abs(direct.prob(s, j) - via.prob(s, j)) <= 1e-12);
    }
}

TEST_CASE("sampling matches probabilities") {
    SSMModel m = three_type_model();
    ItemSet s = ItemSet::of({2, 3});
    RandomStream rng(99, "sampling");
    const int draws = 200000;
    int c2 = 0, c3 = 0;
    for (int i = 0; i < draws; ++i) {
        int pick = sample_choice(m, s, rng);
        if (pick == 2) ++c2;
        else if (pick == 3) ++c3;
        else CHECK(pick == 0);
    }
    CHECK(c2 + c3 == draws); // outside has probability 0 here
    CHECK(double(c2) / draws == doctest::Approx(0.3).epsilon(0.02));
    CHECK(double(c3) / draws == doctest::Approx(0.7).epsilon(0.02));
}

TEST_CASE("log-likelihood and the impossible marker") {
    Universe u = Universe::of(2);
    SSMModel m = SSMModel::create(u, {{ItemSet::of({1}), 1.0}});
    std::vector<Transaction> recs = {
        {ItemSet::of({1, 2}), 1, 0},
        {ItemSet::of({1, 2}), 1, 0},
        {ItemSet::of({2}), 0, 0},
    };
    ChoiceDataset data = ChoiceDataset::from_transactions(u, recs);
    auto ll = log_likelihood(m, data);
    REQUIRE(ll.has_value());
    // P_1({1,2}) = 1 and P_0({2}) = 1, so the log-likelihood is 0.
    CHECK(*ll == doctest::Approx(0.0));

    recs.push_back({ItemSet::of({1, 2}), 2, 0}); // product 2 is never preselected
    ChoiceDataset bad = ChoiceDataset::from_transactions(u, recs);
    CHECK(!log_likelihood(m, bad).has_value());
}

TEST_CASE("dataset ingestion validates and aggregates") {
    Universe u = Universe::of(3);
    std::vector<Transaction> recs = {
        {ItemSet::of({1, 2}), 1, 1},
        {ItemSet::of({1, 2}), 2, 2},
        {ItemSet::of({1, 2}), 1, 3},
        {ItemSet(), 0, 4},
    };
    ChoiceDataset d = ChoiceDataset::from_transactions(u, recs);
    CHECK(d.total() == 4);
    REQUIRE(d.rows().size() == 2);
    CHECK(d.rows()[0].assortment == ItemSet());
    CHECK(d.rows()[0].count(0) == 1);
    CHECK(d.rows()[1].assortment == ItemSet::of({1, 2}));
    CHECK(d.rows()[1].count(1) == 2);
    CHECK(d.rows()[1].count(2) == 1);
    CHECK(d.rows()[1].total == 3);
    CHECK(d.share(d.rows()[1], 1) == doctest::Approx(2.0 / 3.0));

    CHECK(d.to_transactions().size() == 4);

    std::vector<Transaction> bad = {{ItemSet::of({1}), 2, 7}};
    CHECK_THROWS_WITH_AS(ChoiceDataset::from_transactions(u, bad),
                         "choice 2 is neither 0 nor a member of {1} (line 7)", InputError);
}
