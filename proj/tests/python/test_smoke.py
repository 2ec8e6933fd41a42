import math

import pytest

import ssmkit


@pytest.fixture
def example_model():
    return ssmkit.Model.create(
        5, [([1, 3, 5], 0.1), ([1, 2, 3, 4], 0.6), ([3, 4, 5], 0.3)]
    )


def test_choice_probabilities(example_model):
    m = example_model
    assert m.n == 5
    assert m.choice_probability([2, 3], 2) == pytest.approx(0.3, abs=1e-15)
    assert m.choice_probability([2, 3], 3) == pytest.approx(0.7, abs=1e-15)
    dist = m.choice_distribution([2, 3])
    assert dist[0] == pytest.approx(0.0, abs=1e-15)
    assert sum(dist.values()) == pytest.approx(1.0, abs=1e-12)
    assert m.weight_of([1, 3, 5]) == pytest.approx(0.1)
    assert m.weight_of([1, 2]) == 0.0


def test_table_identify_roundtrip(example_model):
    table = ssmkit.Table.from_model(example_model)
    assert table.n == 5
    assert table.prob([2, 3], 3) == pytest.approx(0.7, abs=1e-15)
    for strategy in ("per-item", "outside"):
        recovered, info = ssmkit.identify(table, strategy=strategy)
        assert info["residual_negativity"] <= 1e-9
        assert info["normalization_gap"] <= 1e-9
        for ids, weight in example_model.support():
            assert recovered.weight_of(ids) == pytest.approx(weight, abs=1e-9)
    assert ssmkit.check_axioms(table) == []


def test_simulate_and_fit():
    model, sales = ssmkit.simulate(n=4, support_size=3, transactions=3000, seed=7)
    assert len(sales) == 3000
    assert all(choice == 0 or choice in set(assortment) for assortment, choice in sales)
    fitted, info = ssmkit.fit(sales, n=4)
    assert info["log_likelihood"] < 0.0
    assert info["stop_reason"] in ("converged", "column_limit")
    # the fit should explain the data at least as well as the truth
    def ll(m):
        total = 0.0
        for assortment, choice in sales:
            total += math.log(m.choice_probability(assortment, choice))
        return total

    assert ll(fitted) >= ll(model) - 1e-6


def test_optimize_methods_agree(example_model):
    prices = {1: 5, 2: 4, 3: 3, 4: 2, 5: 1}
    revenue = ssmkit.expected_revenue(example_model, [2, 3], prices)
    assert revenue == pytest.approx(3.3, abs=1e-12)
    results = {
        method: ssmkit.optimize(example_model, prices, method=method, epsilon=1.0)
        for method in ("brute", "dp", "fptas")
    }
    best = results["brute"]["revenue"]
    assert best >= 3.3
    assert results["dp"]["revenue"] == pytest.approx(best, abs=1e-9)
    assert results["fptas"]["revenue"] == pytest.approx(best, abs=1e-9)
    with pytest.raises(ValueError):
        ssmkit.optimize(example_model, prices, method="annealing")
    with pytest.raises(ValueError):
        ssmkit.optimize(example_model, {1: 5}, method="brute")  # prices missing items


def test_asymmetry_exactly_zero(example_model):
    sampled = ssmkit.asymmetry_index(example_model, samples=2000, seed=3)
    assert sampled["index"] == 0.0
    full = ssmkit.asymmetry_index(example_model, exhaustive=True)
    assert full["index"] == 0.0
    assert full["exhaustive"]


def test_evaluate_ranks_models():
    _, train = ssmkit.simulate(n=4, support_size=3, transactions=4000, seed=11)
    _, test = ssmkit.simulate(n=4, support_size=3, transactions=2000, seed=12)
    rows = ssmkit.evaluate(train, train, n=4)
    assert [r["model"] for r in rows] == ["ssm", "mnl", "independent"]
    for r in rows:
        assert r["kl"] >= -1e-12
        assert r["mape"] >= 0.0
    with pytest.raises(ValueError):
        ssmkit.evaluate(train, test, n=4, models=["psychic"])


def test_vertex_cover_instance_decides():
    triangle = [(1, 2), (2, 3), (1, 3)]
    inst = ssmkit.vertex_cover_instance(3, triangle, 2)
    best = ssmkit.optimize(inst["model"], inst["prices"], method="brute")
    assert best["revenue"] >= inst["threshold"] - 1e-9  # cover of size 2 exists
    tight = ssmkit.vertex_cover_instance(3, triangle, 1)
    best1 = ssmkit.optimize(tight["model"], tight["prices"], method="brute")
    assert best1["revenue"] < tight["threshold"] - 1e-9  # no cover of size 1


def test_model_file_roundtrip(tmp_path, example_model):
    path = str(tmp_path / "model.json")
    ssmkit.save_model(example_model, path)
    loaded = ssmkit.load_model(path)
    assert loaded.support() == example_model.support()
    table_path = str(tmp_path / "table.json")
    ssmkit.save_table(ssmkit.Table.from_model(example_model), table_path)
    assert ssmkit.load_table(table_path).prob([2, 3], 3) == pytest.approx(0.7, abs=1e-12)


def test_error_types():
    with pytest.raises(ValueError):
        ssmkit.Model.create(3, [([1], 0.5)])  # weights do not sum to 1
    with pytest.raises(ValueError):
        ssmkit.Model.create(2, [([1, 7], 1.0)])  # id outside the universe
    assert issubclass(ssmkit.InconsistencyError, Exception)
    assert issubclass(ssmkit.CapacityError, Exception)
