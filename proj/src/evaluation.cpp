#include "ssm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "ssm/errors.hpp"
#include "ssm/estimation.hpp"
#include "ssm/rng.hpp"

namespace ssm {
namespace {

constexpr double kMnlGradientTol = 1e-8;
constexpr int kMnlMaxIterations = 10000;
constexpr double kMnlPinnedWeight = 1e-6;
constexpr double kMnlWeightFloor = 1e-12;

double row_share(const AssortmentCounts& row, int id) {
    return double(row.count(id)) / double(row.total);
}

// Alternatives priced into a row: the outside option plus every member.
template <typename F>
void for_each_cell(const AssortmentCounts& row, F&& f) {
    f(0);
    for (int id : row.assortment) f(id);
}

struct Term {
    double numerator = 0.0;
    double denominator = 0.0;
};

// |numerator|/denominator averaged over Monte Carlo draws of (S, {j,k}).
template <typename TermFn>
AsymmetryEstimate monte_carlo_index(Universe u, std::int64_t n_samples, std::uint64_t seed,
                                    TermFn&& term_of) {
    if (u.n < 2) throw InputError("asymmetry index needs at least 2 products");
    if (n_samples < 1) throw InputError("need at least one sample");
    RandomStream rng(seed, "asymmetry");
    const std::uint64_t all = (u.n == 64) ? ~std::uint64_t(0) : (std::uint64_t(1) << u.n);

    AsymmetryEstimate out;
    out.n_samples = n_samples;
    out.seed = seed;
    const std::int64_t reject_limit = 1000 + 100 * n_samples;
    double sum = 0.0;
    double sum_sq = 0.0;
    std::int64_t kept = 0;
    while (kept < n_samples) {
        const ItemSet s(rng.uniform_below(all));
        if (s.size() < 2) continue;
        const std::vector<int> ids = s.ids();
        const std::size_t a = std::size_t(rng.uniform_below(ids.size()));
        std::size_t b;
        do {
            b = std::size_t(rng.uniform_below(ids.size()));
        } while (b == a);
        const Term t = term_of(s, ids[a], ids[b]);
        if (!(t.denominator > 0.0)) {
            if (++out.zero_denominator_draws > reject_limit) {
                throw InputError("asymmetry index undefined: choice mass is zero on almost "
                                 "every sampled pair");
            }
            continue;
        }
        const double value = std::abs(t.numerator) / t.denominator;
        sum += value;
        sum_sq += value * value;
        ++kept;
    }
    out.index = sum / double(n_samples);
    if (n_samples > 1) {
        const double mean = out.index;
        const double var =
            std::max(0.0, (sum_sq - double(n_samples) * mean * mean) / double(n_samples - 1));
        out.std_error = std::sqrt(var / double(n_samples));
    }
    return out;
}

// Every (S, {j,k}) term enumerated, weighted to match the two-stage draw:
// uniform over assortments, then uniform over pairs inside, so each pair of
// an m-product assortment carries weight 1/C(m,2). Zero-denominator pairs
// are dropped and the retained weight renormalized.
template <typename TermFn>
AsymmetryEstimate exhaustive_index(Universe u, TermFn&& term_of) {
    if (u.n < 2) throw InputError("asymmetry index needs at least 2 products");
    if (u.n > 8) {
        throw CapacityError("exhaustive asymmetry index is limited to 8 products, got " +
                            std::to_string(u.n));
    }
    AsymmetryEstimate out;
    out.exhaustive = true;
    double acc = 0.0;
    double weight_kept = 0.0;
    const std::uint64_t all = u.full().mask();
    for (std::uint64_t mask = 0; mask <= all; ++mask) {
        const ItemSet s(mask);
        const int m = s.size();
        if (m < 2) continue;
        const double pair_weight = 2.0 / (double(m) * double(m - 1));
        const std::vector<int> ids = s.ids();
        for (std::size_t a = 0; a < ids.size(); ++a) {
            for (std::size_t b = a + 1; b < ids.size(); ++b) {
                const Term t = term_of(s, ids[a], ids[b]);
                if (!(t.denominator > 0.0)) {
                    ++out.zero_denominator_draws;
                    continue;
                }
                acc += pair_weight * (std::abs(t.numerator) / t.denominator);
                weight_kept += pair_weight;
                ++out.n_samples;
            }
        }
    }
    if (weight_kept == 0.0) {
        throw InputError("asymmetry index undefined: choice mass is zero on every pair");
    }
    out.index = acc / weight_kept;
    return out;
}

Term predictor_term(const Predictor& predict, ItemSet s, int j, int k) {
    Term t;
    t.numerator = (predict(s.without(k), j) - predict(s, j)) -
                  (predict(s.without(j), k) - predict(s, k));
    t.denominator = predict(s, j) + predict(s, k);
    return t;
}

// The same term for a set-distribution model, evaluated type by type. For a
// type holding both products the two probability shifts are the identical
// expression 1/(c-1) - 1/c; for a type holding one of them its own shift is
// a literal x - x. Either way each type contributes an exact 0.0, so the
// numerator is exactly zero rather than zero up to rounding.
Term ssm_term(const SSMModel& model, ItemSet s, int j, int k) {
    auto inv = [](int c) { return c > 0 ? 1.0 / double(c) : 0.0; };
    Term t;
    double numerator = 0.0;
    double mass_j = 0.0;
    double mass_k = 0.0;
    for (const SupportAtom& atom : model.support()) {
        const bool has_j = atom.set.contains(j);
        const bool has_k = atom.set.contains(k);
        if (!has_j && !has_k) continue;
        const int c_full = (atom.set & s).size();
        const double inv_full = inv(c_full);
        double shift_j = 0.0;
        double shift_k = 0.0;
        if (has_j) {
            shift_j = inv((atom.set & s.without(k)).size()) - inv_full;
            mass_j += atom.weight * inv_full;
        }
        if (has_k) {
            shift_k = inv((atom.set & s.without(j)).size()) - inv_full;
            mass_k += atom.weight * inv_full;
        }
        numerator += atom.weight * (shift_j - shift_k);
    }
    t.numerator = numerator;
    t.denominator = mass_j + mass_k;
    return t;
}

} // namespace

MetricsReport compute_metrics(const ChoiceDataset& test, const Predictor& predict) {
    if (test.rows().empty() || test.total() == 0) throw InputError("test data is empty");
    MetricsReport report;
    double kl_acc = 0.0;
    double mape_acc = 0.0;
    for (const AssortmentCounts& row : test.rows()) {
        AssortmentMetrics rm;
        rm.assortment = row.assortment;
        rm.count = row.total;
        double row_kl = 0.0;
        double row_mape = 0.0;
        for_each_cell(row, [&](int id) {
            const double observed = row_share(row, id);
            if (observed == 0.0) {
                ++rm.skipped_cells;
                return;
            }
            const double predicted = predict(row.assortment, id);
            if (predicted > 0.0) {
                row_kl += observed * std::log(predicted / observed);
            } else {
                row_kl = -std::numeric_limits<double>::infinity();
            }
            row_mape += std::abs(predicted - observed) / observed;
        });
        rm.kl = 0.0 - row_kl;
        rm.mape = row_mape;
        report.per_assortment.push_back(rm);
        report.skipped_cells += rm.skipped_cells;
        kl_acc += double(row.total) * rm.kl;
        mape_acc += double(row.total) * rm.mape;
    }
    report.kl = kl_acc / double(test.total());
    report.mape = mape_acc / double(test.total());
    return report;
}

double kl_divergence(const ChoiceDataset& test, const Predictor& predict) {
    return compute_metrics(test, predict).kl;
}

double mape(const ChoiceDataset& test, const Predictor& predict) {
    return compute_metrics(test, predict).mape;
}

double MNLModel::prob(ItemSet s, int i) const {
    universe.require_covers(s, "assortment");
    double total = 1.0;
    for (int id : s) total += weights[std::size_t(id)];
    if (i == 0) return 1.0 / total;
    if (!s.contains(i)) return 0.0;
    return weights[std::size_t(i)] / total;
}

double IndependentModel::prob(ItemSet s, int i) const {
    universe.require_covers(s, "assortment");
    if (i == 0) {
        double purchase = 0.0;
        for (int id : s) purchase += shares[std::size_t(id)];
        return 1.0 - purchase;
    }
    return s.contains(i) ? shares[std::size_t(i)] : 0.0;
}

BaselineFit fit_baselines(const ChoiceDataset& train) {
    if (train.rows().empty() || train.total() == 0) throw InputError("training data is empty");
    const Universe u = train.universe();
    const double total = double(train.total());

    BaselineFit fit;
    fit.independent.universe = u;
    fit.independent.shares.assign(std::size_t(u.n) + 1, 0.0);
    for (const AssortmentCounts& row : train.rows()) {
        for (int id : row.assortment) {
            fit.independent.shares[std::size_t(id)] += double(row.count(id));
        }
    }
    double share_sum = 0.0;
    for (double& s : fit.independent.shares) {
        s /= total;
        share_sum += s;
    }
    if (share_sum > 1.0) { // cannot happen with consistent counts; stay safe
        for (double& s : fit.independent.shares) s /= share_sum;
    }

    fit.mnl.universe = u;
    fit.mnl.weights.assign(std::size_t(u.n) + 1, 1.0);
    std::vector<bool> offered(std::size_t(u.n) + 1, false);
    for (const AssortmentCounts& row : train.rows()) {
        for (int id : row.assortment) offered[std::size_t(id)] = true;
    }
    for (int j = 1; j <= u.n; ++j) {
        if (!offered[std::size_t(j)]) {
            fit.mnl.weights[std::size_t(j)] = kMnlPinnedWeight;
            fit.warnings.push_back("product " + std::to_string(j) +
                                   " never appears in any training assortment; its logit weight "
                                   "is pinned at 1e-6");
        }
    }

    auto log_lik = [&](const std::vector<double>& v) {
        double ll = 0.0;
        for (const AssortmentCounts& row : train.rows()) {
            double denom = 1.0;
            for (int id : row.assortment) denom += v[std::size_t(id)];
            const double log_denom = std::log(denom);
            ll += double(row.count(0)) * (0.0 - log_denom);
            for (int id : row.assortment) {
                const auto chosen = row.count(id);
                if (chosen > 0) ll += double(chosen) * (std::log(v[std::size_t(id)]) - log_denom);
            }
        }
        return ll;
    };

    std::vector<double>& v = fit.mnl.weights;
    fit.mnl_ll_history.push_back(log_lik(v));
    for (int iter = 1; iter <= kMnlMaxIterations; ++iter) {
        // gradient with respect to log v: chosen count minus expected count
        double grad_max = 0.0;
        std::vector<double> numer(std::size_t(u.n) + 1, 0.0);
        std::vector<double> scale(std::size_t(u.n) + 1, 0.0);
        for (const AssortmentCounts& row : train.rows()) {
            double denom = 1.0;
            for (int id : row.assortment) denom += v[std::size_t(id)];
            for (int id : row.assortment) {
                numer[std::size_t(id)] += double(row.count(id));
                scale[std::size_t(id)] += double(row.total) / denom;
            }
        }
        for (int j = 1; j <= u.n; ++j) {
            if (!offered[std::size_t(j)]) continue;
            grad_max = std::max(grad_max, std::abs(numer[std::size_t(j)] -
                                                   v[std::size_t(j)] * scale[std::size_t(j)]));
        }
        if (grad_max <= kMnlGradientTol) {
            fit.mnl_converged = true;
            break;
        }

        for (int j = 1; j <= u.n; ++j) {
            if (!offered[std::size_t(j)]) continue;
            v[std::size_t(j)] = std::max(numer[std::size_t(j)] / scale[std::size_t(j)],
                                         kMnlWeightFloor);
        }
        fit.mnl_iterations = iter;
        // each step raises the likelihood by construction; once the gain
        // drops below float resolution the recorded curve stops growing
        const double next_ll = log_lik(v);
        if (next_ll >= fit.mnl_ll_history.back()) fit.mnl_ll_history.push_back(next_ll);
    }

    if (!fit.mnl_converged) {
        bool zero_outside_row = false;
        for (const AssortmentCounts& row : train.rows()) {
            if (row.count(0) == 0) zero_outside_row = true;
        }
        if (zero_outside_row) {
            fit.warnings.push_back("an assortment with no no-purchase observations pushes the "
                                   "logit optimum to the boundary; weights reported at the "
                                   "iteration cap");
        } else {
            fit.warnings.push_back("logit ascent stopped before reaching the gradient tolerance");
        }
    }
    return fit;
}

AsymmetryEstimate asymmetry_index(Universe u, const Predictor& predict, std::int64_t n_samples,
                                  std::uint64_t seed) {
    return monte_carlo_index(u, n_samples, seed, [&](ItemSet s, int j, int k) {
        return predictor_term(predict, s, j, k);
    });
}

AsymmetryEstimate asymmetry_index_exhaustive(Universe u, const Predictor& predict) {
    return exhaustive_index(u, [&](ItemSet s, int j, int k) {
        return predictor_term(predict, s, j, k);
    });
}

AsymmetryEstimate asymmetry_index(const SSMModel& model, std::int64_t n_samples,
                                  std::uint64_t seed) {
    return monte_carlo_index(model.universe(), n_samples, seed, [&](ItemSet s, int j, int k) {
        return ssm_term(model, s, j, k);
    });
}

AsymmetryEstimate asymmetry_index_exhaustive(const SSMModel& model) {
    return exhaustive_index(model.universe(), [&](ItemSet s, int j, int k) {
        return ssm_term(model, s, j, k);
    });
}

std::vector<EvaluationRow> evaluate(const ChoiceDataset& train, const ChoiceDataset& test,
                                    const std::vector<std::string>& models) {
    if (train.rows().empty()) throw InputError("training data is empty");
    if (test.rows().empty()) throw InputError("test data is empty");
    if (models.empty()) throw InputError("no models requested");

    bool needs_baselines = false;
    for (const std::string& name : models) {
        if (name == "mnl" || name == "independent") needs_baselines = true;
    }
    std::optional<BaselineFit> baselines;
    if (needs_baselines) baselines = fit_baselines(train);

    std::vector<EvaluationRow> out;
    for (const std::string& name : models) {
        EvaluationRow row;
        row.name = name;
        if (name == "ssm") {
            CGFit fit = column_generation_fit(train, CGConfig{});
            const SSMModel fitted = fit.model;
            row.metrics = compute_metrics(
                test, [fitted](ItemSet s, int i) { return choice_probability(fitted, s, i); });
        } else if (name == "mnl") {
            const MNLModel mnl = baselines->mnl;
            row.metrics =
                compute_metrics(test, [mnl](ItemSet s, int i) { return mnl.prob(s, i); });
            row.warnings = baselines->warnings;
        } else if (name == "independent") {
            const IndependentModel ind = baselines->independent;
            row.metrics =
                compute_metrics(test, [ind](ItemSet s, int i) { return ind.prob(s, i); });
        } else {
            throw InputError("unknown model \"" + name + "\" (expected ssm, mnl, or independent)");
        }
        out.push_back(std::move(row));
    }
    return out;
}

} // namespace ssm
