#include "ssm/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "ssm/errors.hpp"

namespace ssm {

namespace {

std::string fmt_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
}

// Choice probabilities y[row][id] under weights lambda.
void fill_y(const ChoiceDataset& data, const std::vector<ItemSet>& support,
            const std::vector<double>& lambda, std::vector<std::vector<double>>& y) {
    const int n = data.universe().n;
    y.assign(data.rows().size(), {});
    for (std::size_t r = 0; r < data.rows().size(); ++r) {
        const ItemSet s = data.rows()[r].assortment;
        auto& row = y[r];
        row.assign(std::size_t(n) + 1, 0.0);
        for (std::size_t c = 0; c < support.size(); ++c) {
            const ItemSet inter = support[c] & s;
            if (inter.empty()) {
                row[0] += lambda[c];
            } else {
                const double share = lambda[c] / double(inter.size());
                for (int id : inter) row[std::size_t(id)] += share;
            }
        }
    }
}

double log_lik_of(const ChoiceDataset& data, const std::vector<std::vector<double>>& y) {
    double ll = 0.0;
    for (std::size_t r = 0; r < data.rows().size(); ++r) {
        const auto& counts = data.rows()[r].counts;
        for (std::size_t id = 0; id < counts.size(); ++id) {
            if (counts[id] == 0) continue;
            ll += double(counts[id]) * std::log(y[r][id]);
        }
    }
    return ll;
}

} // namespace

RestrictedFit em_fit(const ChoiceDataset& data, std::vector<ItemSet> support,
                     const std::optional<std::vector<double>>& init, const EMConfig& cfg) {
    const Universe u = data.universe();
    if (data.total() <= 0) throw DomainError("cannot fit an empty dataset");
    if (support.empty()) throw DomainError("empty support");
    {
        std::set<std::uint64_t> seen;
        for (const auto& c : support) {
            u.require_covers(c, "support set");
            if (!seen.insert(c.mask()).second)
                throw DomainError("duplicate support set " + c.str());
        }
    }
    // Every observed cell needs a support set that can produce it.
    for (const auto& row : data.rows()) {
        for (int id = 0; id <= u.n; ++id) {
            if (row.count(id) == 0) continue;
            bool covered = false;
            for (const auto& c : support) {
                if (id == 0 ? !c.intersects(row.assortment) : c.contains(id)) {
                    covered = true;
                    break;
                }
            }
            if (!covered)
                throw CoverageError("no candidate support set explains choice " +
                                    std::to_string(id) + " from assortment " +
                                    row.assortment.str());
        }
    }

    RestrictedFit fit;
    fit.support = std::move(support);
    const std::size_t k = fit.support.size();
    if (init) {
        if (init->size() != k) throw DomainError("init weight count does not match support");
        double sum = 0.0;
        for (double w : *init) {
            if (!(w >= 0.0)) throw DomainError("negative init weight");
            sum += w;
        }
        if (!(sum > 0.0)) throw DomainError("init weights sum to zero");
        fit.lambda.resize(k);
        for (std::size_t i = 0; i < k; ++i) fit.lambda[i] = (*init)[i] / sum;
    } else {
        fit.lambda.assign(k, 1.0 / double(k));
    }

    const double total = double(data.total());
    fill_y(data, fit.support, fit.lambda, fit.y);
    double ll = log_lik_of(data, fit.y);
    if (!std::isfinite(ll))
        throw CoverageError("initial weights give an observed choice probability 0");

    std::vector<double> next(k);
    std::vector<std::vector<double>> next_y;
    fit.stop_reason = "max_iters";
    for (int it = 0; it < cfg.max_iters; ++it) {
        // E-step: expected usage of each support set given current weights;
        // M-step: those usages, rescaled, are the next weights.
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t r = 0; r < data.rows().size(); ++r) {
            const auto& row = data.rows()[r];
            const auto& yr = fit.y[r];
            for (std::size_t c = 0; c < k; ++c) {
                const ItemSet inter = fit.support[c] & row.assortment;
                double use = 0.0;
                if (inter.empty()) {
                    if (row.counts[0] > 0) use = double(row.counts[0]) / yr[0];
                } else {
                    const double inv = 1.0 / double(inter.size());
                    for (int id : inter) {
                        const auto cnt = row.counts[std::size_t(id)];
                        if (cnt > 0) use += double(cnt) * inv / yr[std::size_t(id)];
                    }
                }
                next[c] += use * fit.lambda[c];
            }
        }
        for (double& w : next) w /= total;

        fill_y(data, fit.support, next, next_y);
        const double next_ll = log_lik_of(data, next_y);
        if (next_ll < ll) {
            // Exact EM cannot lose likelihood; a drop is rounding noise at
            // the fixed point. Keep the previous iterate.
            fit.stop_reason = "fp_floor";
            fit.converged = true;
            break;
        }
        fit.lambda = next;
        fit.y.swap(next_y);
        fit.iterations = it + 1;
        fit.ll_history.push_back(next_ll);
        const double gain = next_ll - ll;
        ll = next_ll;
        if (gain < cfg.ll_tol) {
            fit.stop_reason = "ll_tol";
            fit.converged = true;
            break;
        }
    }
    fit.log_lik = ll;
    return fit;
}

DualPrices dual_prices(const ChoiceDataset& data, const RestrictedFit& fit) {
    DualPrices d;
    d.beta = -double(data.total());
    d.alpha.resize(data.rows().size());
    for (std::size_t r = 0; r < data.rows().size(); ++r) {
        const auto& counts = data.rows()[r].counts;
        d.alpha[r].assign(counts.size(), 0.0);
        for (std::size_t id = 0; id < counts.size(); ++id) {
            if (counts[id] == 0) continue;
            const double y = fit.y[r][id];
            if (!(y > 0.0))
                throw DomainError("degenerate duals: observed choice " + std::to_string(id) +
                                  " from " + data.rows()[r].assortment.str() +
                                  " has probability 0 in the fitted state");
            d.alpha[r][id] = double(counts[id]) / y;
        }
    }
    return d;
}

double reduced_cost(const ChoiceDataset& data, const DualPrices& duals, ItemSet c) {
    data.universe().require_covers(c, "candidate set");
    double v = duals.beta;
    for (std::size_t r = 0; r < data.rows().size(); ++r) {
        const ItemSet inter = c & data.rows()[r].assortment;
        if (inter.empty()) {
            v += duals.alpha[r][0];
        } else {
            double sum = 0.0;
            for (int id : inter) sum += duals.alpha[r][std::size_t(id)];
            v += sum / double(inter.size());
        }
    }
    return v;
}

SubproblemResult cg_subproblem_bruteforce(const ChoiceDataset& data, const DualPrices& duals) {
    const Universe u = data.universe();
    if (u.n > 24)
        throw CapacityError("exhaustive pricing enumerates 2^n sets; n = " + std::to_string(u.n) +
                            " exceeds 24");
    SubproblemResult best{ItemSet(), reduced_cost(data, duals, ItemSet())};
    const std::uint64_t all = u.full().mask();
    for (std::uint64_t m = 1; m <= all; ++m) {
        const double v = reduced_cost(data, duals, ItemSet(m));
        if (v > best.value) {
            best.best = ItemSet(m);
            best.value = v;
        }
    }
    return best;
}

CGFit column_generation_fit(const ChoiceDataset& data, const CGConfig& cfg) {
    const Universe u = data.universe();
    std::vector<ItemSet> support;
    support.push_back(ItemSet());
    for (int i = 1; i <= u.n; ++i) support.push_back(ItemSet().with(i));

    const double total = double(data.total());
    std::optional<std::vector<double>> warm;
    CGFit out{SSMModel::create(u, {{ItemSet(), 1.0}}), 0.0, 0, 0, "", 0.0};
    RestrictedFit fit;
    EMConfig inner = cfg.inner;
    int stall_rounds = 0;
    while (true) {
        fit = em_fit(data, support, warm, inner);
        out.em_iterations += fit.iterations;
        const DualPrices duals = dual_prices(data, fit);
        const SubproblemResult sub = cg_subproblem_bruteforce(data, duals);
        out.final_reduced_cost = sub.value;
        if (sub.value <= cfg.rc_tol * total) {
            out.stop_reason = "converged";
            break;
        }
        if (std::find(support.begin(), support.end(), sub.best) != support.end()) {
            // An in-support column priced above the threshold means the
            // restricted fit is not yet converged enough for its duals to
            // be trusted (at the exact restricted optimum every existing
            // column prices at or below zero). Push the same fit further
            // instead of duplicating the column.
            if (fit.stop_reason == "fp_floor") {
                // No better iterate is representable; the recorded pricing
                // value documents the residual.
                out.stop_reason = "converged";
                break;
            }
            if (++stall_rounds > 1000)
                throw InternalError("pricing kept re-proposing existing column " +
                                    sub.best.str() + " with reduced cost " + fmt_num(sub.value));
            inner.ll_tol = std::max(inner.ll_tol * 0.1, 1e-16);
            warm = fit.lambda;
            continue;
        }
        if (out.columns_added >= cfg.max_columns) {
            out.stop_reason = "column_limit";
            break;
        }
        inner = cfg.inner;
        support.push_back(sub.best);
        ++out.columns_added;
        // Warm start: shrink current weights and give the newcomer a slot.
        const double slot = 1.0 / double(support.size());
        std::vector<double> w = fit.lambda;
        for (double& x : w) x *= 1.0 - slot;
        w.push_back(slot);
        warm = std::move(w);
    }

    fit = em_fit(data, support, fit.lambda, cfg.final_round);
    out.em_iterations += fit.iterations;
    {
        const DualPrices duals = dual_prices(data, fit);
        out.final_reduced_cost = cg_subproblem_bruteforce(data, duals).value;
    }

    std::vector<SupportAtom> atoms;
    for (std::size_t c = 0; c < fit.support.size(); ++c)
        if (fit.lambda[c] >= cfg.prune_tol) atoms.push_back({fit.support[c], fit.lambda[c]});
    SSMModel pruned = SSMModel::normalize(u, atoms);
    auto ll = log_likelihood(pruned, data);
    if (ll) {
        out.model = std::move(pruned);
        out.log_lik = *ll;
    } else {
        // A pruned column was load-bearing after all; keep everything.
        std::vector<SupportAtom> full;
        for (std::size_t c = 0; c < fit.support.size(); ++c)
            full.push_back({fit.support[c], fit.lambda[c]});
        out.model = SSMModel::normalize(u, full);
        out.log_lik = fit.log_lik;
    }
    return out;
}

} // namespace ssm
