#pragma once

#include <string>
#include <vector>

#include "ssm/assortment.hpp"
#include "ssm/dataset.hpp"
#include "ssm/model.hpp"

namespace ssm {

// All emitted numbers are rounded to 12 significant digits; every format
// below round-trips exactly once re-emitted (save(load(x)) == x for files
// produced by save).

double round_sig12(double x);
std::string fmt_g12(double x);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Model JSON: {"n": int, "support": [{"set": [ids...], "weight": w}, ...]}
// with each set a sorted id list.
std::string model_to_json(const SSMModel& model);
SSMModel model_from_json(const std::string& text, const std::string& origin = "<input>");
SSMModel load_model_json(const std::string& path);
void save_model_json(const SSMModel& model, const std::string& path);

// Table JSON: {"n": int, "rows": [{"S": [ids...], "probs": {"0": p, "j": p,
// ...}}, ...]} with one row per assortment (all 2^n of them).
std::string table_to_json(const ChoiceProbabilityTable& table);
ChoiceProbabilityTable table_from_json(const std::string& text,
                                       const std::string& origin = "<input>");
ChoiceProbabilityTable load_table_json(const std::string& path);
void save_table_json(const ChoiceProbabilityTable& table, const std::string& path);

// Transactions CSV: header "assortment,choice"; the assortment column is a
// ";"-joined id list (empty string = empty assortment).
struct TransactionsFile {
    std::vector<Transaction> records;
    int max_id = 0; // largest product id seen; 0 when no ids occur
};
TransactionsFile transactions_from_csv(const std::string& text,
                                       const std::string& origin = "<input>");
TransactionsFile load_transactions_csv(const std::string& path);
std::string transactions_to_csv(const std::vector<Transaction>& records);
void save_transactions_csv(const std::vector<Transaction>& records, const std::string& path);

// Prices CSV: header "id,price", one product per row.
PriceMap prices_from_csv(const std::string& text, const std::string& origin = "<input>");
PriceMap load_prices_csv(const std::string& path);
std::string prices_to_csv(const PriceMap& prices);
void save_prices_csv(const PriceMap& prices, const std::string& path);

// Graph edge list: one "u v" pair per line; blank lines and lines starting
// with '#' are ignored. The vertex count is the largest endpoint seen.
struct GraphFile {
    int num_vertices = 0;
    std::vector<GraphEdge> edges;
};
GraphFile graph_from_text(const std::string& text, const std::string& origin = "<input>");
GraphFile load_graph(const std::string& path);

} // namespace ssm
