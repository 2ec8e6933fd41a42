#include "ssm/assortment.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <unordered_map>

#include "ssm/errors.hpp"

namespace ssm {
namespace {

std::string fmt_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
}

constexpr std::size_t kMaxDpTypes = 6;
constexpr double kTypeWeightFloor = 1e-12;
constexpr std::size_t kMaxDpStates = 2'000'000;
// Packed per-type state is (accumulated_value << 6) | hit_count, so the
// accumulated integer value must stay below 2^58.
constexpr std::uint64_t kMaxPackedValue = std::uint64_t{1} << 58;

void validate_prices(const SSMModel& model, const PriceMap& prices) {
    const Universe u = model.universe();
    for (const auto& [id, price] : prices) {
        if (id < 1 || id > u.n) {
            throw InputError("price refers to product " + std::to_string(id) +
                             " outside the universe of size " + std::to_string(u.n));
        }
        if (!(price > 0.0)) {
            throw InputError("price of product " + std::to_string(id) + " must be positive");
        }
    }
    for (const SupportAtom& atom : model.support()) {
        for (int id : atom.set) {
            if (prices.find(id) == prices.end()) {
                throw InputError("no price given for product " + std::to_string(id));
            }
        }
    }
}

double min_price(const PriceMap& prices) {
    double best = 0.0;
    bool seen = false;
    for (const auto& [id, price] : prices) {
        (void)id;
        if (!seen || price < best) {
            best = price;
            seen = true;
        }
    }
    if (!seen) throw InputError("price list is empty");
    return best;
}

struct DpType {
    ItemSet set;
    double weight = 0.0;
};

// Nonempty support sets with non-negligible weight; everything else cannot
// move the optimum and would only inflate the state space.
std::vector<DpType> dp_types(const SSMModel& model) {
    std::vector<DpType> types;
    for (const SupportAtom& atom : model.support()) {
        if (atom.set.empty() || atom.weight <= kTypeWeightFloor) continue;
        types.push_back({atom.set, atom.weight});
    }
    if (types.size() > kMaxDpTypes) {
        throw CapacityError("dynamic program supports at most " + std::to_string(kMaxDpTypes) +
                            " customer types, got " + std::to_string(types.size()));
    }
    return types;
}

struct StateKey {
    std::array<std::uint64_t, kMaxDpTypes> packed{};
    bool operator==(const StateKey& other) const { return packed == other.packed; }
};

struct StateKeyHash {
    std::size_t operator()(const StateKey& key) const {
        std::uint64_t h = 1469598103934665603ull;
        for (std::uint64_t word : key.packed) {
            h ^= word;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

// The assortment (over original product ids) that reached a state. Distinct
// assortments reaching the same state have identical optimal completions, so
// one representative suffices; we keep the smallest by (size, mask).
struct StateRepr {
    std::uint64_t mask = 0;
    int count = 0;
};

bool repr_before(const StateRepr& a, const StateRepr& b) {
    if (a.count != b.count) return a.count < b.count;
    return a.mask < b.mask;
}

using StateMap = std::unordered_map<StateKey, StateRepr, StateKeyHash>;

void insert_state(StateMap& states, const StateKey& key, const StateRepr& repr) {
    auto [it, inserted] = states.emplace(key, repr);
    if (!inserted && repr_before(repr, it->second)) it->second = repr;
}

// Runs the exact dynamic program on integer prices `valued` (one entry per
// item of `items`, already sorted by nonincreasing price) and returns the
// best assortment together with its value under those integer prices.
std::pair<ItemSet, double> run_dp(const std::vector<DpType>& types, const std::vector<int>& items,
                                  const std::vector<std::uint64_t>& valued) {
    for (const DpType& type : types) {
        std::uint64_t total = 0;
        for (int id : type.set) {
            auto pos = std::find(items.begin(), items.end(), id);
            if (pos != items.end()) total += valued[static_cast<std::size_t>(pos - items.begin())];
        }
        if (total >= kMaxPackedValue) {
            throw CapacityError("integer prices too large for the dynamic program state encoding");
        }
    }

    StateMap states;
    states.emplace(StateKey{}, StateRepr{});

    for (std::size_t idx = 0; idx < items.size(); ++idx) {
        const int id = items[idx];
        const std::uint64_t value = valued[idx];
        StateMap next;
        next.reserve(states.size() * 2);
        for (const auto& [key, repr] : states) {
            insert_state(next, key, repr);  // leave the product out
            StateKey with = key;
            bool hits_any = false;
            for (std::size_t m = 0; m < types.size(); ++m) {
                if (!types[m].set.contains(id)) continue;
                hits_any = true;
                with.packed[m] += (value << 6) + 1;
            }
            if (!hits_any) continue;  // offering it changes nothing; excluded wins ties
            StateRepr grown{repr.mask | (std::uint64_t{1} << (id - 1)), repr.count + 1};
            insert_state(next, with, grown);
        }
        states = std::move(next);
        if (states.size() > kMaxDpStates) {
            throw CapacityError("dynamic program exceeded the state budget of " +
                                std::to_string(kMaxDpStates) + " states");
        }
    }

    bool have_best = false;
    double best_value = 0.0;
    StateRepr best_repr;
    for (const auto& [key, repr] : states) {
        double value = 0.0;
        for (std::size_t m = 0; m < types.size(); ++m) {
            const std::uint64_t hits = key.packed[m] & 63u;
            if (hits == 0) continue;
            const std::uint64_t accumulated = key.packed[m] >> 6;
            value += types[m].weight * (static_cast<double>(accumulated) / static_cast<double>(hits));
        }
        if (!have_best || value > best_value ||
            (value == best_value && repr_before(repr, best_repr))) {
            have_best = true;
            best_value = value;
            best_repr = repr;
        }
    }
    return {ItemSet(best_repr.mask), best_value};
}

// Items worth offering (members of some kept type), nonincreasing price,
// ties toward the smaller id.
std::vector<int> dp_item_order(const std::vector<DpType>& types, const PriceMap& prices) {
    ItemSet pool;
    for (const DpType& type : types) pool = pool | type.set;
    std::vector<int> items = pool.ids();
    std::sort(items.begin(), items.end(), [&](int a, int b) {
        const double pa = prices.at(a);
        const double pb = prices.at(b);
        if (pa != pb) return pa > pb;
        return a < b;
    });
    return items;
}

}  // namespace

double expected_revenue(const SSMModel& model, ItemSet s, const PriceMap& prices) {
    validate_prices(model, prices);
    CompensatedSum total;
    for (const SupportAtom& atom : model.support()) {
        const ItemSet hit = atom.set & s;
        if (hit.empty()) continue;
        double sum = 0.0;
        for (int id : hit) sum += prices.at(id);
        total.add(atom.weight * (sum / static_cast<double>(hit.size())));
    }
    return total.value();
}

AssortmentSolution brute_force_assortment(const SSMModel& model, const PriceMap& prices) {
    validate_prices(model, prices);
    const int n = model.universe().n;
    if (n > 20) {
        throw CapacityError("brute force is limited to 20 products, got " + std::to_string(n));
    }
    AssortmentSolution best{ItemSet{}, expected_revenue(model, ItemSet{}, prices), "brute"};
    const std::uint64_t all = (n == 0) ? 0 : ((std::uint64_t{1} << n) - 1);
    for (std::uint64_t mask = 1; mask <= all && all != 0; ++mask) {
        const double revenue = expected_revenue(model, ItemSet(mask), prices);
        if (revenue > best.revenue) {
            best.assortment = ItemSet(mask);
            best.revenue = revenue;
        }
    }
    return best;
}

AssortmentSolution dp_exact_assortment(const SSMModel& model, const PriceMap& prices) {
    validate_prices(model, prices);
    const std::vector<DpType> types = dp_types(model);
    const std::vector<int> items = dp_item_order(types, prices);
    std::vector<std::uint64_t> valued;
    valued.reserve(items.size());
    for (int id : items) {
        const double price = prices.at(id);
        if (std::floor(price) != price) {
            throw InputError("exact dynamic program requires integral prices; product " +
                             std::to_string(id) + " has price " + fmt_num(price));
        }
        valued.push_back(static_cast<std::uint64_t>(price));
    }
    auto [assortment, value] = run_dp(types, items, valued);
    (void)value;
    return {assortment, expected_revenue(model, assortment, prices), "dp_exact"};
}

AssortmentSolution fptas_assortment(const SSMModel& model, const PriceMap& prices, double eps) {
    if (!(eps > 0.0) || eps > 1.0) {
        throw InputError("eps must lie in (0, 1], got " + fmt_num(eps));
    }
    validate_prices(model, prices);
    const std::vector<DpType> types = dp_types(model);
    const std::vector<int> items = dp_item_order(types, prices);
    const double unit = min_price(prices) * eps;
    std::vector<std::uint64_t> valued;
    valued.reserve(items.size());
    for (int id : items) {
        valued.push_back(static_cast<std::uint64_t>(std::floor(prices.at(id) / unit)));
    }
    auto [assortment, value] = run_dp(types, items, valued);
    (void)value;
    char label[48];
    std::snprintf(label, sizeof(label), "fptas(%g)", eps);
    return {assortment, expected_revenue(model, assortment, prices), label};
}

VertexCoverInstance vertex_cover_instance(int num_vertices, const std::vector<GraphEdge>& edges,
                                          int cover_size) {
    if (num_vertices < 1) throw InputError("graph needs at least one vertex");
    if (num_vertices > 62) {
        throw CapacityError("graph is limited to 62 vertices, got " + std::to_string(num_vertices));
    }
    if (cover_size < 0) throw InputError("cover size must be nonnegative");
    std::vector<std::uint64_t> seen;
    for (const GraphEdge& e : edges) {
        if (e.u < 1 || e.u > num_vertices || e.v < 1 || e.v > num_vertices) {
            throw InputError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                             ") has an endpoint outside 1.." + std::to_string(num_vertices));
        }
        if (e.u == e.v) {
            throw InputError("self-loop at vertex " + std::to_string(e.u) + " is not allowed");
        }
        const std::uint64_t key = (std::uint64_t{1} << (e.u - 1)) | (std::uint64_t{1} << (e.v - 1));
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
            throw InputError("duplicate edge (" + std::to_string(e.u) + ", " +
                             std::to_string(e.v) + ")");
        }
        seen.push_back(key);
    }

    const int extra = num_vertices + 1;
    const double edge_weight = 1.0 / (static_cast<double>(edges.size()) + num_vertices / 3.0);
    const double vertex_weight = edge_weight / 3.0;

    std::vector<SupportAtom> support;
    for (const GraphEdge& e : edges) {
        support.push_back({ItemSet::of({e.u, e.v}), edge_weight});
    }
    for (int v = 1; v <= num_vertices; ++v) {
        support.push_back({ItemSet::of({v, extra}), vertex_weight});
    }

    PriceMap prices;
    for (int v = 1; v <= num_vertices; ++v) prices[v] = 1.0;
    prices[extra] = 3.0;
    const double threshold =
        (static_cast<double>(edges.size()) + num_vertices - cover_size / 3.0) * edge_weight;
    return {SSMModel::create(Universe{extra}, support), std::move(prices), threshold, cover_size};
}

bool has_vertex_cover(int num_vertices, const std::vector<GraphEdge>& edges, int cover_size) {
    if (num_vertices < 1 || num_vertices > 26) {
        throw CapacityError("exhaustive cover search is limited to 26 vertices");
    }
    if (cover_size >= num_vertices) return true;
    const std::uint64_t all = (std::uint64_t{1} << num_vertices) - 1;
    for (std::uint64_t mask = 0; mask <= all; ++mask) {
        if (std::popcount(mask) > cover_size) continue;
        bool covers = true;
        for (const GraphEdge& e : edges) {
            if ((mask & (std::uint64_t{1} << (e.u - 1))) == 0 &&
                (mask & (std::uint64_t{1} << (e.v - 1))) == 0) {
                covers = false;
                break;
            }
        }
        if (covers) return true;
    }
    return false;
}

}  // namespace ssm
