#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ssm/assortment.hpp"
#include "ssm/errors.hpp"
#include "ssm/estimation.hpp"
#include "ssm/evaluation.hpp"
#include "ssm/identification.hpp"
#include "ssm/io.hpp"
#include "ssm/model.hpp"
#include "ssm/synthetic.hpp"

namespace {

using nlohmann::json;

// Tolerance defaults can be overridden process-wide through SSM_* variables;
// explicit flags still win.
double env_double(const char* name, double fallback) {
    const char* raw = std::getenv(name);
    if (raw == nullptr || *raw == '\0') return fallback;
    char* end = nullptr;
    const double value = std::strtod(raw, &end);
    if (end == nullptr || *end != '\0' || !(value > 0.0)) {
        throw ssm::InputError(std::string(name) + " must be a positive number, got \"" + raw +
                              "\"");
    }
    return value;
}

json set_json(ssm::ItemSet s) {
    json out = json::array();
    for (int id : s) out.push_back(id);
    return out;
}

void emit(const json& j) { std::cout << j.dump(2) << std::endl; }

const char* kind_name(ssm::AxiomKind kind) {
    switch (kind) {
        case ssm::AxiomKind::s_cannibalization: return "s_cannibalization";
        case ssm::AxiomKind::d_regularity: return "d_regularity";
        case ssm::AxiomKind::item_choice_free: return "item_choice_free";
        case ssm::AxiomKind::transforms_agree: return "transforms_agree";
        case ssm::AxiomKind::cannibalization_monotonicity: return "cannibalization_monotonicity";
    }
    return "unknown";
}

int infer_universe(int flag_n, int needed, const char* what) {
    if (flag_n == 0) {
        if (needed == 0) {
            throw ssm::InputError(std::string("cannot infer the universe size from ") + what +
                                  "; pass --n");
        }
        return needed;
    }
    if (flag_n < needed) {
        throw ssm::InputError("--n " + std::to_string(flag_n) + " is smaller than product id " +
                              std::to_string(needed) + " found in " + what);
    }
    return flag_n;
}

} // namespace

namespace {

// Builds the whole interface and runs one invocation. Throws on any failure,
// including a malformed SSM_* tolerance override read during setup.
int run_cli(CLI::App& app, int argc, char** argv) {
    int exit_code = 0;
    app.require_subcommand(1);
    app.fallthrough(); // lets --seed appear after the subcommand name too

    std::uint64_t seed = 12345;
    app.add_option("--seed", seed,
                   "Root seed; every random procedure derives its own stream from it")
        ->capture_default_str();

    // ---------------------------------------------------------------- simulate
    auto* simulate = app.add_subcommand("simulate", "Generate a random model and sales data");
    int sim_n = 5;
    int sim_support = 3;
    std::int64_t sim_count = 10000;
    std::string sim_model_out;
    std::string sim_data_out;
    simulate->add_option("--n", sim_n, "Universe size (1..16)")->capture_default_str();
    simulate->add_option("--support-size", sim_support, "Number of preselected sets")
        ->capture_default_str();
    simulate->add_option("--transactions", sim_count, "Transactions to sample")
        ->capture_default_str();
    simulate->add_option("--model-out", sim_model_out, "Output path for the model JSON")
        ->required();
    simulate->add_option("--transactions-out", sim_data_out, "Output path for the sales CSV")
        ->required();
    simulate->callback([&] {
        if (sim_n < 1 || sim_n > 16) {
            throw ssm::InputError("--n must lie in 1..16, got " + std::to_string(sim_n));
        }
        ssm::SyntheticSpec spec;
        spec.n = sim_n;
        spec.support_size = sim_support;
        spec.transactions = sim_count;
        auto run = ssm::generate(spec, seed);
        ssm::save_model_json(run.model, sim_model_out);
        ssm::save_transactions_csv(run.transactions, sim_data_out);
        json report;
        report["n"] = sim_n;
        report["support_size"] = sim_support;
        report["transactions"] = sim_count;
        report["seed"] = seed;
        report["model"] = sim_model_out;
        report["transactions_csv"] = sim_data_out;
        emit(report);
    });

    // --------------------------------------------------------------------- fit
    auto* fit = app.add_subcommand("fit", "Maximum-likelihood model from sales data");
    std::string fit_data;
    std::string fit_out;
    std::string fit_report_out;
    int fit_n = 0;
    int fit_max_columns = 1000;
    int fit_em_iters = 500;
    double fit_rc_tol = env_double("SSM_RC_TOL", 1e-7);
    double fit_em_tol = env_double("SSM_EM_TOL", 1e-9);
    fit->add_option("--transactions", fit_data, "Sales CSV (assortment,choice)")->required();
    fit->add_option("--out", fit_out, "Output path for the fitted model JSON")->required();
    fit->add_option("--report", fit_report_out, "Optional path for the fit report JSON");
    fit->add_option("--n", fit_n, "Universe size (default: largest id in the data)");
    fit->add_option("--max-columns", fit_max_columns, "Cap on generated candidate sets")
        ->capture_default_str();
    fit->add_option("--em-iters", fit_em_iters, "Inner EM iteration cap")->capture_default_str();
    fit->add_option("--rc-tol", fit_rc_tol,
                    "Pricing tolerance relative to the transaction count (env SSM_RC_TOL)")
        ->capture_default_str();
    fit->add_option("--em-tol", fit_em_tol,
                    "EM log-likelihood gain tolerance (env SSM_EM_TOL)")
        ->capture_default_str();
    fit->callback([&] {
        auto file = ssm::load_transactions_csv(fit_data);
        const int n = infer_universe(fit_n, file.max_id, fit_data.c_str());
        auto data = ssm::ChoiceDataset::from_transactions(ssm::Universe{n}, file.records);
        ssm::CGConfig cfg;
        cfg.rc_tol = fit_rc_tol;
        cfg.max_columns = fit_max_columns;
        cfg.inner = {fit_em_iters, fit_em_tol};
        cfg.final_round = {10 * fit_em_iters, fit_em_tol};
        auto result = ssm::column_generation_fit(data, cfg);
        ssm::save_model_json(result.model, fit_out);
        json report;
        report["transactions"] = data.total();
        report["n"] = n;
        report["log_likelihood"] = ssm::round_sig12(result.log_lik);
        report["columns_added"] = result.columns_added;
        report["em_iterations"] = result.em_iterations;
        report["stop_reason"] = result.stop_reason;
        report["final_reduced_cost"] = ssm::round_sig12(result.final_reduced_cost);
        report["support_size"] = result.model.support().size();
        report["model"] = fit_out;
        if (!fit_report_out.empty()) {
            ssm::write_text_file(fit_report_out, report.dump(2) + "\n");
        }
        emit(report);
    });

    // ---------------------------------------------------------------- identify
    auto* identify = app.add_subcommand(
        "identify", "Recover the set distribution from a full choice-probability table");
    std::string id_table;
    std::string id_out;
    std::string id_strategy = "per-item";
    double id_tol = env_double("SSM_IDENTIFY_TOL", 1e-8);
    identify->add_option("--table", id_table, "Choice-probability table JSON")->required();
    identify->add_option("--out", id_out, "Optional path for the recovered model JSON");
    identify->add_option("--strategy", id_strategy, "Recovery route: per-item or outside")
        ->check(CLI::IsMember({"per-item", "outside"}))
        ->capture_default_str();
    identify->add_option("--tol", id_tol,
                         "Rejection threshold on negativity/normalization (env SSM_IDENTIFY_TOL)")
        ->capture_default_str();
    identify->callback([&] {
        auto table = ssm::load_table_json(id_table);
        const auto strategy = id_strategy == "outside" ? ssm::IdentifyStrategy::outside
                                                       : ssm::IdentifyStrategy::per_item;
        auto report = ssm::identify_full(table, strategy, id_tol);
        if (!id_out.empty()) ssm::save_model_json(report.recovered, id_out);
        json out;
        out["strategy"] = id_strategy;
        out["residual_negativity"] = ssm::round_sig12(report.residual_negativity);
        out["normalization_gap"] = ssm::round_sig12(report.normalization_gap);
        out["support_size"] = report.recovered.support().size();
        if (!id_out.empty()) out["model"] = id_out;
        emit(out);
    });

    // ------------------------------------------------------------ check-axioms
    auto* check = app.add_subcommand(
        "check-axioms", "Test a choice-probability table against the model-class axioms");
    std::string chk_table;
    int chk_samples = 20000;
    double chk_tol = env_double("SSM_AXIOM_TOL", 1e-8);
    check->add_option("--table", chk_table, "Choice-probability table JSON")->required();
    check->add_option("--tol", chk_tol, "Violation tolerance (env SSM_AXIOM_TOL)")
        ->capture_default_str();
    check->add_option("--samples", chk_samples,
                      "Sample count for the checks that sample above 8 products")
        ->capture_default_str();
    check->callback([&] {
        auto table = ssm::load_table_json(chk_table);
        std::vector<ssm::AxiomViolation> violations;
        auto collect = [&](std::vector<ssm::AxiomViolation> found) {
            violations.insert(violations.end(), found.begin(), found.end());
        };
        collect(ssm::check_s_cannibalization(table, chk_tol));
        collect(ssm::check_d_regularity(table, chk_tol));
        collect(ssm::check_corollaries(table, chk_tol, chk_samples, seed));
        collect(ssm::check_cannibalization_monotonicity(table, chk_tol, chk_samples, seed));
        json out;
        out["tol"] = ssm::round_sig12(chk_tol);
        out["count"] = violations.size();
        json list = json::array();
        for (const auto& v : violations) {
            json entry;
            entry["kind"] = kind_name(v.kind);
            entry["s1"] = set_json(v.s1);
            entry["s2"] = set_json(v.s2);
            entry["j"] = v.j;
            entry["k"] = v.k;
            entry["magnitude"] = ssm::round_sig12(v.magnitude);
            entry["description"] = v.describe();
            list.push_back(std::move(entry));
        }
        out["violations"] = std::move(list);
        emit(out);
        if (!violations.empty()) exit_code = 2;
    });

    // ---------------------------------------------------------------- optimize
    auto* optimize = app.add_subcommand("optimize", "Find the revenue-maximizing assortment");
    std::string opt_model;
    std::string opt_prices;
    std::string opt_method;
    double opt_eps = 0.1;
    optimize->add_option("--model", opt_model, "Model JSON")->required();
    optimize->add_option("--prices", opt_prices, "Prices CSV (id,price)")->required();
    optimize->add_option("--method", opt_method, "brute, dp, or fptas")
        ->check(CLI::IsMember({"brute", "dp", "fptas"}))
        ->required();
    optimize->add_option("--epsilon", opt_eps, "Approximation parameter for fptas")
        ->capture_default_str();
    optimize->callback([&] {
        auto model = ssm::load_model_json(opt_model);
        auto prices = ssm::load_prices_csv(opt_prices);
        const auto start = std::chrono::steady_clock::now();
        ssm::AssortmentSolution sol;
        if (opt_method == "brute") {
            sol = ssm::brute_force_assortment(model, prices);
        } else if (opt_method == "dp") {
            sol = ssm::dp_exact_assortment(model, prices);
        } else {
            sol = ssm::fptas_assortment(model, prices, opt_eps);
        }
        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();
        json out;
        out["assortment"] = set_json(sol.assortment);
        out["revenue"] = ssm::round_sig12(sol.revenue);
        out["method"] = sol.method;
        out["runtime_ms"] = ssm::round_sig12(ms);
        emit(out);
    });

    // ---------------------------------------------------------------- evaluate
    auto* evaluate = app.add_subcommand(
        "evaluate", "Fit models on training data and score them on held-out data");
    std::string eval_train;
    std::string eval_test;
    std::string eval_json_out;
    int eval_n = 0;
    std::vector<std::string> eval_models{"ssm", "mnl", "independent"};
    evaluate->add_option("--train", eval_train, "Training sales CSV")->required();
    evaluate->add_option("--test", eval_test, "Held-out sales CSV")->required();
    evaluate->add_option("--models", eval_models, "Models to fit: ssm, mnl, independent")
        ->delimiter(',')
        ->capture_default_str();
    evaluate->add_option("--n", eval_n, "Universe size (default: largest id in either file)");
    evaluate->add_option("--json-out", eval_json_out, "Optional path for the JSON report");
    evaluate->callback([&] {
        auto train_file = ssm::load_transactions_csv(eval_train);
        auto test_file = ssm::load_transactions_csv(eval_test);
        const int needed = std::max(train_file.max_id, test_file.max_id);
        const int n = infer_universe(eval_n, needed, "the data");
        auto train = ssm::ChoiceDataset::from_transactions(ssm::Universe{n}, train_file.records);
        auto test = ssm::ChoiceDataset::from_transactions(ssm::Universe{n}, test_file.records);
        auto rows = ssm::evaluate(train, test, eval_models);

        std::printf("%-12s  %-16s  %-16s  %s\n", "model", "kl", "mape", "skipped_cells");
        for (const auto& row : rows) {
            std::printf("%-12s  %-16s  %-16s  %lld\n", row.name.c_str(),
                        ssm::fmt_g12(row.metrics.kl).c_str(),
                        ssm::fmt_g12(row.metrics.mape).c_str(),
                        static_cast<long long>(row.metrics.skipped_cells));
        }
        for (const auto& row : rows) {
            for (const auto& warning : row.warnings) {
                std::printf("warning (%s): %s\n", row.name.c_str(), warning.c_str());
            }
        }
        if (!eval_json_out.empty()) {
            json results = json::array();
            for (const auto& row : rows) {
                json entry;
                entry["model"] = row.name;
                entry["kl"] = ssm::round_sig12(row.metrics.kl);
                entry["mape"] = ssm::round_sig12(row.metrics.mape);
                entry["skipped_cells"] = row.metrics.skipped_cells;
                entry["warnings"] = row.warnings;
                results.push_back(std::move(entry));
            }
            json doc;
            doc["results"] = std::move(results);
            ssm::write_text_file(eval_json_out, doc.dump(2) + "\n");
        }
    });

    // --------------------------------------------------------------- asymmetry
    auto* asymmetry = app.add_subcommand(
        "asymmetry", "Cannibalization-asymmetry index of a model (0 for this model class)");
    std::string asym_model;
    std::int64_t asym_samples = 10000;
    bool asym_exhaustive = false;
    asymmetry->add_option("--model", asym_model, "Model JSON")->required();
    asymmetry->add_option("--samples", asym_samples, "Monte Carlo sample count")
        ->capture_default_str();
    asymmetry->add_flag("--exhaustive", asym_exhaustive,
                        "Enumerate every assortment and pair instead of sampling (n <= 8)");
    asymmetry->callback([&] {
        auto model = ssm::load_model_json(asym_model);
        const ssm::AsymmetryEstimate est = asym_exhaustive
                                               ? ssm::asymmetry_index_exhaustive(model)
                                               : ssm::asymmetry_index(model, asym_samples, seed);
        json out;
        out["index"] = ssm::round_sig12(est.index);
        out["std_error"] = ssm::round_sig12(est.std_error);
        out["n_samples"] = est.n_samples;
        out["seed"] = est.seed;
        out["zero_denominator_draws"] = est.zero_denominator_draws;
        out["exhaustive"] = est.exhaustive;
        emit(out);
    });

    // --------------------------------------------------------------- reduce-vc
    auto* reduce = app.add_subcommand(
        "reduce-vc", "Turn a vertex-cover question into a pricing instance");
    std::string vc_graph;
    std::string vc_model_out;
    std::string vc_prices_out;
    int vc_k = 0;
    int vc_vertices = 0;
    reduce->add_option("--graph", vc_graph, "Edge list file (one \"u v\" per line)")->required();
    reduce->add_option("--k", vc_k, "Cover size of the decision question")->required();
    reduce->add_option("--vertices", vc_vertices,
                       "Vertex count (default: largest endpoint in the file)");
    reduce->add_option("--model-out", vc_model_out, "Output path for the instance model JSON")
        ->required();
    reduce->add_option("--prices-out", vc_prices_out, "Output path for the instance prices CSV")
        ->required();
    reduce->callback([&] {
        auto graph = ssm::load_graph(vc_graph);
        int vertices = graph.num_vertices;
        if (vc_vertices > 0) {
            if (vc_vertices < graph.num_vertices) {
                throw ssm::InputError("--vertices " + std::to_string(vc_vertices) +
                                      " is smaller than endpoint " +
                                      std::to_string(graph.num_vertices) + " in " + vc_graph);
            }
            vertices = vc_vertices;
        }
        if (vertices == 0) {
            throw ssm::InputError("graph has no edges; pass --vertices for an edgeless graph");
        }
        auto instance = ssm::vertex_cover_instance(vertices, graph.edges, vc_k);
        ssm::save_model_json(instance.model, vc_model_out);
        ssm::save_prices_csv(instance.prices, vc_prices_out);
        json out;
        out["vertices"] = vertices;
        out["edges"] = graph.edges.size();
        out["k"] = vc_k;
        out["threshold"] = ssm::round_sig12(instance.threshold);
        out["model"] = vc_model_out;
        out["prices"] = vc_prices_out;
        emit(out);
    });

    app.parse(argc, argv);
    return exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic set model toolkit: simulation, estimation, identification, axiom "
                 "checks, assortment optimization, and evaluation"};
    try {
        return run_cli(app, argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ssm::InconsistencyError& e) {
        json err;
        err["error"] = "inconsistency";
        err["message"] = e.what();
        emit(err);
        return 2;
    } catch (const ssm::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
