// Python bindings for the core library. Sets cross the boundary as plain
// lists of ids, prices as {id: price} dicts, transactions as
// (assortment, choice) pairs; reports come back as dicts.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <utility>
#include <vector>

#include "ssm/assortment.hpp"
#include "ssm/dataset.hpp"
#include "ssm/errors.hpp"
#include "ssm/estimation.hpp"
#include "ssm/evaluation.hpp"
#include "ssm/identification.hpp"
#include "ssm/io.hpp"
#include "ssm/model.hpp"
#include "ssm/synthetic.hpp"

namespace py = pybind11;
using namespace ssm;

namespace {

ItemSet set_from_ids(const std::vector<int>& ids) {
    ItemSet s;
    for (int id : ids) s = s.with(id);
    return s;
}

SSMModel model_from_pairs(int n, const std::vector<std::pair<std::vector<int>, double>>& atoms) {
    std::vector<SupportAtom> support;
    support.reserve(atoms.size());
    for (const auto& [ids, w] : atoms) support.push_back({set_from_ids(ids), w});
    return SSMModel::create(Universe{n}, std::move(support));
}

std::vector<std::pair<std::vector<int>, double>> pairs_from_model(const SSMModel& m) {
    std::vector<std::pair<std::vector<int>, double>> out;
    out.reserve(m.support().size());
    for (const auto& a : m.support()) out.emplace_back(a.set.ids(), a.weight);
    return out;
}

std::vector<Transaction> records_from_pairs(
    const std::vector<std::pair<std::vector<int>, int>>& raw) {
    std::vector<Transaction> records;
    records.reserve(raw.size());
    for (const auto& [ids, choice] : raw) records.push_back({set_from_ids(ids), choice, 0});
    return records;
}

ChoiceDataset dataset_from_pairs(int n,
                                 const std::vector<std::pair<std::vector<int>, int>>& raw) {
    return ChoiceDataset::from_transactions(Universe{n}, records_from_pairs(raw));
}

py::dict violation_dict(const AxiomViolation& v) {
    py::dict d;
    d["kind"] = [&] {
        switch (v.kind) {
            case AxiomKind::s_cannibalization: return "s_cannibalization";
            case AxiomKind::d_regularity: return "d_regularity";
            case AxiomKind::item_choice_free: return "item_choice_free";
            case AxiomKind::transforms_agree: return "transforms_agree";
            case AxiomKind::cannibalization_monotonicity: return "cannibalization_monotonicity";
        }
        return "unknown";
    }();
    d["s1"] = v.s1.ids();
    d["s2"] = v.s2.ids();
    d["j"] = v.j;
    d["k"] = v.k;
    d["magnitude"] = v.magnitude;
    d["description"] = v.describe();
    return d;
}

py::dict asymmetry_dict(const AsymmetryEstimate& est) {
    py::dict d;
    d["index"] = est.index;
    d["std_error"] = est.std_error;
    d["n_samples"] = est.n_samples;
    d["seed"] = est.seed;
    d["zero_denominator_draws"] = est.zero_denominator_draws;
    d["exhaustive"] = est.exhaustive;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Stochastic set model toolkit: choice probabilities, identification, "
              "estimation, axiom checks, and assortment optimization";

    py::register_exception<InconsistencyError>(m, "InconsistencyError");
    py::register_exception<CapacityError>(m, "CapacityError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const InputError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const DomainError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    py::class_<SSMModel>(m, "Model")
        .def_static("create", &model_from_pairs, py::arg("n"), py::arg("support"),
                    "Model over products 1..n from [(set, weight), ...]; weights must sum to 1")
        .def_property_readonly("n", [](const SSMModel& self) { return self.universe().n; })
        .def("support", &pairs_from_model, "Support as [(sorted id list, weight), ...]")
        .def("weight_of",
             [](const SSMModel& self, const std::vector<int>& ids) {
                 return self.weight_of(set_from_ids(ids));
             },
             py::arg("preselected_set"))
        .def("choice_probability",
             [](const SSMModel& self, const std::vector<int>& assortment, int j) {
                 return choice_probability(self, set_from_ids(assortment), j);
             },
             py::arg("assortment"), py::arg("j"),
             "Probability of choosing j (0 = outside option) from the assortment")
        .def("choice_distribution",
             [](const SSMModel& self, const std::vector<int>& assortment) {
                 py::dict out;
                 for (const auto& [id, p] :
                      choice_distribution(self, set_from_ids(assortment))) {
                     out[py::int_(id)] = p;
                 }
                 return out;
             },
             py::arg("assortment"), "Distribution {0: p_outside, id: p_id, ...}")
        .def("__repr__", [](const SSMModel& self) {
            return "Model(n=" + std::to_string(self.universe().n) + ", support_size=" +
                   std::to_string(self.support().size()) + ")";
        });

    py::class_<ChoiceProbabilityTable>(m, "Table")
        .def_static("from_model", &ChoiceProbabilityTable::from_model, py::arg("model"),
                    "Exact choice probabilities of every assortment (n <= 16)")
        .def_property_readonly("n",
                               [](const ChoiceProbabilityTable& t) { return t.universe().n; })
        .def("prob",
             [](const ChoiceProbabilityTable& t, const std::vector<int>& assortment, int j) {
                 return t.prob(set_from_ids(assortment), j);
             },
             py::arg("assortment"), py::arg("j"));

    m.def("simulate",
          [](int n, int support_size, long long transactions, std::uint64_t seed) {
              SyntheticSpec spec;
              spec.n = n;
              spec.support_size = support_size;
              spec.transactions = transactions;
              auto run = generate(spec, seed);
              std::vector<std::pair<std::vector<int>, int>> raw;
              raw.reserve(run.transactions.size());
              for (const auto& t : run.transactions)
                  raw.emplace_back(t.assortment.ids(), t.choice);
              return py::make_tuple(run.model, raw);
          },
          py::arg("n") = 5, py::arg("support_size") = 3, py::arg("transactions") = 10000,
          py::arg("seed") = 12345,
          "Draw a random model and sales data; returns (model, [(assortment, choice), ...])");

    m.def("fit",
          [](const std::vector<std::pair<std::vector<int>, int>>& transactions, int n,
             double rc_tol, int max_columns) {
              auto data = dataset_from_pairs(n, transactions);
              CGConfig cfg;
              cfg.rc_tol = rc_tol;
              cfg.max_columns = max_columns;
              auto result = column_generation_fit(data, cfg);
              py::dict info;
              info["log_likelihood"] = result.log_lik;
              info["columns_added"] = result.columns_added;
              info["em_iterations"] = result.em_iterations;
              info["stop_reason"] = result.stop_reason;
              info["final_reduced_cost"] = result.final_reduced_cost;
              return py::make_tuple(result.model, info);
          },
          py::arg("transactions"), py::arg("n"), py::arg("rc_tol") = 1e-7,
          py::arg("max_columns") = 1000,
          "Maximum-likelihood model for (assortment, choice) data; returns (model, info)");

    m.def("identify",
          [](const ChoiceProbabilityTable& table, const std::string& strategy, double tol) {
              const auto kind = strategy == "outside" ? IdentifyStrategy::outside
                                                      : IdentifyStrategy::per_item;
              if (strategy != "outside" && strategy != "per-item")
                  throw InputError("strategy must be per-item or outside, got " + strategy);
              auto report = identify_full(table, kind, tol);
              py::dict info;
              info["residual_negativity"] = report.residual_negativity;
              info["normalization_gap"] = report.normalization_gap;
              return py::make_tuple(report.recovered, info);
          },
          py::arg("table"), py::arg("strategy") = "per-item", py::arg("tol") = 1e-8,
          "Recover the set distribution behind a full table; returns (model, info)");

    m.def("check_axioms",
          [](const ChoiceProbabilityTable& table, double tol, int samples, std::uint64_t seed) {
              py::list out;
              for (const auto& v : check_s_cannibalization(table, tol))
                  out.append(violation_dict(v));
              for (const auto& v : check_d_regularity(table, tol)) out.append(violation_dict(v));
              for (const auto& v : check_corollaries(table, tol, samples, seed))
                  out.append(violation_dict(v));
              for (const auto& v :
                   check_cannibalization_monotonicity(table, tol, samples, seed))
                  out.append(violation_dict(v));
              return out;
          },
          py::arg("table"), py::arg("tol") = 1e-8, py::arg("samples") = 20000,
          py::arg("seed") = 0, "All axiom violations of the table as a list of dicts");

    m.def("expected_revenue",
          [](const SSMModel& model, const std::vector<int>& assortment,
             const std::map<int, double>& prices) {
              return expected_revenue(model, set_from_ids(assortment), prices);
          },
          py::arg("model"), py::arg("assortment"), py::arg("prices"));

    m.def("optimize",
          [](const SSMModel& model, const std::map<int, double>& prices,
             const std::string& method, double epsilon) {
              AssortmentSolution sol;
              if (method == "brute")
                  sol = brute_force_assortment(model, prices);
              else if (method == "dp")
                  sol = dp_exact_assortment(model, prices);
              else if (method == "fptas")
                  sol = fptas_assortment(model, prices, epsilon);
              else
                  throw InputError("method must be brute, dp, or fptas, got " + method);
              py::dict out;
              out["assortment"] = sol.assortment.ids();
              out["revenue"] = sol.revenue;
              out["method"] = sol.method;
              return out;
          },
          py::arg("model"), py::arg("prices"), py::arg("method") = "brute",
          py::arg("epsilon") = 0.1, "Revenue-maximizing assortment under per-product prices");

    m.def("asymmetry_index",
          [](const SSMModel& model, long long samples, std::uint64_t seed, bool exhaustive) {
              return asymmetry_dict(exhaustive ? asymmetry_index_exhaustive(model)
                                               : asymmetry_index(model, samples, seed));
          },
          py::arg("model"), py::arg("samples") = 10000, py::arg("seed") = 0,
          py::arg("exhaustive") = false,
          "Cannibalization-asymmetry index; exactly 0 for models of this class");

    m.def("evaluate",
          [](const std::vector<std::pair<std::vector<int>, int>>& train,
             const std::vector<std::pair<std::vector<int>, int>>& test, int n,
             const std::vector<std::string>& models) {
              auto rows = evaluate(dataset_from_pairs(n, train), dataset_from_pairs(n, test),
                                   models);
              py::list out;
              for (const auto& row : rows) {
                  py::dict d;
                  d["model"] = row.name;
                  d["kl"] = row.metrics.kl;
                  d["mape"] = row.metrics.mape;
                  d["skipped_cells"] = row.metrics.skipped_cells;
                  d["warnings"] = row.warnings;
                  out.append(std::move(d));
              }
              return out;
          },
          py::arg("train"), py::arg("test"), py::arg("n"),
          py::arg("models") = std::vector<std::string>{"ssm", "mnl", "independent"},
          "Fit the named models on train and score KL/MAPE on test");

    m.def("vertex_cover_instance",
          [](int num_vertices, const std::vector<std::pair<int, int>>& edges, int k) {
              std::vector<GraphEdge> list;
              list.reserve(edges.size());
              for (const auto& [u, v] : edges) list.push_back({u, v});
              auto inst = vertex_cover_instance(num_vertices, list, k);
              py::dict out;
              out["model"] = inst.model;
              out["prices"] = inst.prices;
              out["threshold"] = inst.threshold;
              out["k"] = inst.cover_size;
              return out;
          },
          py::arg("num_vertices"), py::arg("edges"), py::arg("k"),
          "Pricing instance whose optimal revenue clears the threshold iff a vertex cover of "
          "size k exists");

    m.def("load_model", &load_model_json, py::arg("path"));
    m.def("save_model", &save_model_json, py::arg("model"), py::arg("path"));
    m.def("load_table", &load_table_json, py::arg("path"));
    m.def("save_table", &save_table_json, py::arg("table"), py::arg("path"));
}
