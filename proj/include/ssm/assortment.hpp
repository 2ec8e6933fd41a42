#pragma once

#include <map>
#include <string>
#include <vector>

#include "ssm/itemset.hpp"
#include "ssm/model.hpp"

namespace ssm {

// Product prices keyed by product id. Every id must lie in the model's
// universe and every price must be strictly positive.
using PriceMap = std::map<int, double>;

// Expected revenue of offering `s`: each customer type C with a nonempty
// intersection C∩S buys a uniformly random item of the intersection, so the
// type contributes weight(C) * mean(prices over C∩S). Types that miss the
// assortment contribute nothing.
double expected_revenue(const SSMModel& model, ItemSet s, const PriceMap& prices);

struct AssortmentSolution {
    ItemSet assortment;
    double revenue = 0.0;    // recomputed with the original prices
    std::string method;      // "brute" | "dp_exact" | "fptas(eps)"
};

// Exhaustive search over all 2^n assortments; ties broken toward the
// smallest bitmask. Guarded at n <= 20.
AssortmentSolution brute_force_assortment(const SSMModel& model, const PriceMap& prices);

// Exact dynamic program for positive integral prices. Customer types are the
// nonempty support sets with non-negligible weight; at most 6 are allowed.
// Products are processed in nonincreasing price order and the program tracks,
// per type, the accumulated revenue and hit count of the assortment built so
// far; only reachable states are materialized.
AssortmentSolution dp_exact_assortment(const SSMModel& model, const PriceMap& prices);

// (1-eps)-approximation for arbitrary positive prices, eps in (0,1]: prices
// are discretized to integers r~_i = floor(r_i / (r_min * eps)) and the exact
// dynamic program runs on the discretized instance. The reported revenue is
// recomputed with the original prices.
AssortmentSolution fptas_assortment(const SSMModel& model, const PriceMap& prices, double eps);

struct GraphEdge {
    int u = 0;
    int v = 0;
};

struct VertexCoverInstance {
    SSMModel model;      // universe of num_vertices + 1 products
    PriceMap prices;     // 1 for each vertex product, 3 for the extra product
    double threshold = 0.0;
    int cover_size = 0;  // the k of the decision question
};

// Builds the pricing instance whose optimal revenue answers "does the graph
// have a vertex cover of size <= k?": revenue >= threshold iff the cover
// exists. Vertices are numbered 1..num_vertices; the graph must be simple.
VertexCoverInstance vertex_cover_instance(int num_vertices, const std::vector<GraphEdge>& edges,
                                          int cover_size);

// Exhaustive vertex-cover decision used to validate the reduction.
bool has_vertex_cover(int num_vertices, const std::vector<GraphEdge>& edges, int cover_size);

}  // namespace ssm
