#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ssm/estimation.hpp"

namespace ssm {

struct MilpVariable {
    std::string name;
    double lb = 0.0;
    double ub = 1.0;
    bool binary = false;
};

// sense '<' means <=, '>' means >=, '=' equality.
struct MilpConstraint {
    std::string name;
    std::vector<std::pair<int, double>> terms; // (variable index, coefficient)
    char sense = '<';
    double rhs = 0.0;
};

// The pricing subproblem as a standalone mixed-integer program, solvable by
// any exact MILP code. Selection variables x_i pick the candidate set; per
// assortment, z flags an empty intersection, u carries the reciprocal
// intersection size, and q_i linearizes x_i * u. Maximizing dual-weighted
// coverage over these variables equals maximizing reduced cost.
struct CGSubproblemFormulation {
    std::vector<MilpVariable> vars;
    std::vector<std::pair<int, double>> objective; // maximize
    double objective_constant = 0.0;               // the dual beta
    std::vector<MilpConstraint> constraints;

    // Structure for backends: which variable plays which role.
    int n = 0;
    std::vector<int> x_of;                              // [id] -> var index, id 1..n
    std::vector<std::uint64_t> assortment_masks;        // one per block
    std::vector<int> z_of, u_of;                        // per block
    std::vector<std::vector<std::pair<int, int>>> q_of; // per block: (id, var index)

    // LP-format text (CPLEX dialect), readable by the usual solvers.
    std::string to_lp() const;
};

CGSubproblemFormulation cg_subproblem_milp_spec(const ChoiceDataset& data,
                                                const DualPrices& duals);

struct MilpSolution {
    ItemSet chosen;
    double objective = 0.0; // includes objective_constant
};

// Exact built-in backend: enumerates the binary selection block, completes
// the remaining variables through the constraints, verifies feasibility,
// and evaluates the formulation's own objective. Ties resolve to the
// smallest selection mask. Universe capped at 24.
MilpSolution solve_subproblem_formulation(const CGSubproblemFormulation& f);

// Completion for a fixed selection: returns a full variable assignment and
// checks it against every constraint and bound (InternalError on failure).
std::vector<double> complete_assignment(const CGSubproblemFormulation& f, ItemSet x);

} // namespace ssm
