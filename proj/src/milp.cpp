#include "ssm/milp.hpp"

#include <cmath>
#include <cstdio>

#include "ssm/errors.hpp"

namespace ssm {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

CGSubproblemFormulation cg_subproblem_milp_spec(const ChoiceDataset& data,
                                                const DualPrices& duals) {
    const Universe u = data.universe();
    CGSubproblemFormulation f;
    f.n = u.n;
    f.objective_constant = duals.beta;
    f.x_of.assign(std::size_t(u.n) + 1, -1);
    for (int i = 1; i <= u.n; ++i) {
        f.x_of[std::size_t(i)] = int(f.vars.size());
        f.vars.push_back(MilpVariable{"x_" + std::to_string(i), 0.0, 1.0, true});
    }
    for (std::size_t r = 0; r < data.rows().size(); ++r) {
        const ItemSet s = data.rows()[r].assortment;
        const std::string tag = std::to_string(r + 1);
        const int z = int(f.vars.size());
        f.vars.push_back(MilpVariable{"z_" + tag, 0.0, 1.0, true});
        const int uvar = int(f.vars.size());
        f.vars.push_back(MilpVariable{"u_" + tag, 1.0 / double(u.n), 1.0, false});
        f.assortment_masks.push_back(s.mask());
        f.z_of.push_back(z);
        f.u_of.push_back(uvar);
        f.q_of.emplace_back();

        if (duals.alpha[r][0] != 0.0) f.objective.emplace_back(z, duals.alpha[r][0]);

        MilpConstraint pick{"pick_" + tag, {{z, 1.0}}, '=', 1.0};
        for (int id : s) {
            const int q = int(f.vars.size());
            const std::string qtag = tag + "_" + std::to_string(id);
            f.vars.push_back(MilpVariable{"q_" + qtag, 0.0, 1.0, false});
            f.q_of.back().emplace_back(id, q);
            const int x = f.x_of[std::size_t(id)];
            if (duals.alpha[r][std::size_t(id)] != 0.0)
                f.objective.emplace_back(q, duals.alpha[r][std::size_t(id)]);
            // q = x * u, linearized.
            f.constraints.push_back(MilpConstraint{"cap_x_" + qtag, {{q, 1.0}, {x, -1.0}}, '<', 0.0});
            f.constraints.push_back(
                MilpConstraint{"cap_u_" + qtag, {{q, 1.0}, {uvar, -1.0}}, '<', 0.0});
            f.constraints.push_back(
                MilpConstraint{"tight_" + qtag, {{uvar, 1.0}, {x, 1.0}, {q, -1.0}}, '<', 1.0});
            pick.terms.emplace_back(q, 1.0);
        }
        // Exactly one alternative absorbs the choice: the outside flag or
        // the uniform shares over the intersection.
        f.constraints.push_back(std::move(pick));
    }
    return f;
}

std::string CGSubproblemFormulation::to_lp() const {
    std::string out;
    out += "\\ pricing subproblem: choose one candidate set maximizing dual coverage\n";
    out += "Maximize\n obj:";
    for (const auto& [v, coef] : objective) {
        out += coef < 0 ? " - " : " + ";
        out += num(std::abs(coef)) + " " + vars[std::size_t(v)].name;
    }
    if (objective_constant != 0.0) {
        out += objective_constant < 0 ? " - " : " + ";
        out += num(std::abs(objective_constant));
    }
    out += "\nSubject To\n";
    for (const auto& c : constraints) {
        out += " " + c.name + ":";
        for (const auto& [v, coef] : c.terms) {
            out += coef < 0 ? " - " : " + ";
            out += num(std::abs(coef)) + " " + vars[std::size_t(v)].name;
        }
        out += c.sense == '<' ? " <= " : (c.sense == '>' ? " >= " : " = ");
        out += num(c.rhs) + "\n";
    }
    out += "Bounds\n";
    for (const auto& v : vars)
        if (!v.binary) out += " " + num(v.lb) + " <= " + v.name + " <= " + num(v.ub) + "\n";
    out += "Binary\n";
    for (const auto& v : vars)
        if (v.binary) out += " " + v.name + "\n";
    out += "End\n";
    return out;
}

std::vector<double> complete_assignment(const CGSubproblemFormulation& f, ItemSet x) {
    std::vector<double> val(f.vars.size(), 0.0);
    for (int i = 1; i <= f.n; ++i) val[std::size_t(f.x_of[std::size_t(i)])] = x.contains(i) ? 1.0 : 0.0;
    for (std::size_t b = 0; b < f.assortment_masks.size(); ++b) {
        const ItemSet inter = x & ItemSet(f.assortment_masks[b]);
        const double uv = inter.empty() ? 1.0 / double(f.n) : 1.0 / double(inter.size());
        val[std::size_t(f.u_of[b])] = uv;
        val[std::size_t(f.z_of[b])] = inter.empty() ? 1.0 : 0.0;
        for (const auto& [id, q] : f.q_of[b]) val[std::size_t(q)] = x.contains(id) ? uv : 0.0;
    }
    // The completion must satisfy the program it came from.
    const double eps = 1e-9;
    for (std::size_t i = 0; i < f.vars.size(); ++i) {
        if (val[i] < f.vars[i].lb - eps || val[i] > f.vars[i].ub + eps)
            throw InternalError("completion violates bounds of " + f.vars[i].name);
    }
    for (const auto& c : f.constraints) {
        double lhs = 0.0;
        for (const auto& [v, coef] : c.terms) lhs += coef * val[std::size_t(v)];
        const bool ok = c.sense == '<' ? lhs <= c.rhs + eps
                                       : (c.sense == '>' ? lhs >= c.rhs - eps
                                                         : std::abs(lhs - c.rhs) <= eps);
        if (!ok) throw InternalError("completion violates constraint " + c.name);
    }
    return val;
}

MilpSolution solve_subproblem_formulation(const CGSubproblemFormulation& f) {
    if (f.n > 24)
        throw CapacityError("built-in backend enumerates 2^n selections; n = " +
                            std::to_string(f.n) + " exceeds 24");
    MilpSolution best;
    bool have = false;
    const std::uint64_t all = (std::uint64_t(1) << f.n) - 1;
    for (std::uint64_t m = 0; m <= all; ++m) {
        const ItemSet x(m);
        const std::vector<double> val = complete_assignment(f, x);
        double obj = f.objective_constant;
        for (const auto& [v, coef] : f.objective) obj += coef * val[std::size_t(v)];
        if (!have || obj > best.objective) {
            best = MilpSolution{x, obj};
            have = true;
        }
    }
    return best;
}

} // namespace ssm
