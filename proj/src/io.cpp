#include "ssm/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ssm/errors.hpp"

namespace ssm {
namespace {

using nlohmann::json;

[[noreturn]] void bad_input(const std::string& origin, const std::string& message) {
    throw InputError(origin + ": " + message);
}

[[noreturn]] void bad_line(const std::string& origin, long line, const std::string& message) {
    bad_input(origin, "line " + std::to_string(line) + ": " + message);
}

json parse_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        bad_input(origin, e.what());
    }
}

int require_universe_size(const json& j, const std::string& origin) {
    if (!j.is_object() || !j.contains("n") || !j["n"].is_number_integer()) {
        bad_input(origin, "expected an object with an integer field \"n\"");
    }
    const int n = j["n"].get<int>();
    if (n < 1 || n > 63) bad_input(origin, "\"n\" must lie in 1..63, got " + std::to_string(n));
    return n;
}

ItemSet set_from_json(const json& ids, int n, const std::string& origin, const char* what) {
    if (!ids.is_array()) bad_input(origin, std::string(what) + " must be an array of ids");
    ItemSet s;
    for (const json& v : ids) {
        if (!v.is_number_integer()) {
            bad_input(origin, std::string(what) + " contains a non-integer id");
        }
        const int id = v.get<int>();
        if (id < 1 || id > n) {
            bad_input(origin, std::string(what) + " id " + std::to_string(id) +
                                  " outside 1.." + std::to_string(n));
        }
        s = s.with(id);
    }
    return s;
}

json set_to_json(ItemSet s) {
    json out = json::array();
    for (int id : s) out.push_back(id);
    return out;
}

int parse_int_field(const std::string& field, const std::string& origin, long line,
                    const char* what) {
    if (field.empty()) bad_line(origin, line, std::string("empty ") + what);
    char* end = nullptr;
    const long value = std::strtol(field.c_str(), &end, 10);
    if (end == nullptr || *end != '\0' || value < -1000000 || value > 1000000) {
        bad_line(origin, line, std::string("cannot parse ") + what + " \"" + field + "\"");
    }
    return int(value);
}

// Splits one CSV line at the first comma; our formats never quote fields.
std::pair<std::string, std::string> split_two(const std::string& line, const std::string& origin,
                                              long line_no) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) bad_line(origin, line_no, "expected two comma-separated fields");
    if (line.find(',', comma + 1) != std::string::npos) {
        bad_line(origin, line_no, "expected exactly one comma");
    }
    return {line.substr(0, comma), line.substr(comma + 1)};
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string current;
    for (char c : text) {
        if (c == '\n') {
            if (!current.empty() && current.back() == '\r') current.pop_back();
            lines.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    if (!current.empty() && current.back() == '\r') current.pop_back();
    if (!current.empty()) lines.push_back(std::move(current));
    return lines;
}

} // namespace

double round_sig12(double x) {
    if (x == 0.0) return 0.0; // canonicalize -0.0 so reports never show a signed zero
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return std::strtod(buf, nullptr);
}

std::string fmt_g12(double x) {
    if (x == 0.0) x = 0.0;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path + " for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw InputError("failed while reading " + path);
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open " + path + " for writing");
    out << content;
    out.flush();
    if (!out) throw InputError("failed while writing " + path);
}

std::string model_to_json(const SSMModel& model) {
    json j;
    j["n"] = model.universe().n;
    json support = json::array();
    for (const SupportAtom& atom : model.support()) {
        json entry;
        entry["set"] = set_to_json(atom.set);
        entry["weight"] = round_sig12(atom.weight);
        support.push_back(std::move(entry));
    }
    j["support"] = std::move(support);
    return j.dump(2) + "\n";
}

SSMModel model_from_json(const std::string& text, const std::string& origin) {
    const json j = parse_json(text, origin);
    const int n = require_universe_size(j, origin);
    if (!j.contains("support") || !j["support"].is_array()) {
        bad_input(origin, "expected an array field \"support\"");
    }
    std::vector<SupportAtom> atoms;
    for (const json& entry : j["support"]) {
        if (!entry.is_object() || !entry.contains("set") || !entry.contains("weight") ||
            !entry["weight"].is_number()) {
            bad_input(origin, "each support entry needs a \"set\" array and a numeric \"weight\"");
        }
        atoms.push_back({set_from_json(entry["set"], n, origin, "support set"),
                         entry["weight"].get<double>()});
    }
    try {
        return SSMModel::create(Universe{n}, std::move(atoms));
    } catch (const DomainError& e) {
        bad_input(origin, e.what());
    }
}

SSMModel load_model_json(const std::string& path) {
    return model_from_json(read_text_file(path), path);
}

void save_model_json(const SSMModel& model, const std::string& path) {
    write_text_file(path, model_to_json(model));
}

std::string table_to_json(const ChoiceProbabilityTable& table) {
    const int n = table.universe().n;
    json rows = json::array();
    const std::uint64_t all = table.universe().full().mask();
    for (std::uint64_t mask = 0; mask <= all; ++mask) {
        const ItemSet s(mask);
        json row;
        row["S"] = set_to_json(s);
        json probs = json::object();
        probs["0"] = round_sig12(table.prob(s, 0));
        for (int id : s) probs[std::to_string(id)] = round_sig12(table.prob(s, id));
        row["probs"] = std::move(probs);
        rows.push_back(std::move(row));
    }
    json j;
    j["n"] = n;
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

ChoiceProbabilityTable table_from_json(const std::string& text, const std::string& origin) {
    const json j = parse_json(text, origin);
    const int n = require_universe_size(j, origin);
    if (!j.contains("rows") || !j["rows"].is_array()) {
        bad_input(origin, "expected an array field \"rows\"");
    }
    std::vector<std::pair<ItemSet, std::vector<std::pair<int, double>>>> rows;
    for (const json& row : j["rows"]) {
        if (!row.is_object() || !row.contains("S") || !row.contains("probs") ||
            !row["probs"].is_object()) {
            bad_input(origin, "each row needs an \"S\" array and a \"probs\" object");
        }
        const ItemSet s = set_from_json(row["S"], n, origin, "assortment");
        std::vector<std::pair<int, double>> probs;
        for (const auto& [key, value] : row["probs"].items()) {
            char* end = nullptr;
            const long id = std::strtol(key.c_str(), &end, 10);
            if (end == nullptr || *end != '\0' || id < 0 || id > n) {
                bad_input(origin, "bad probability key \"" + key + "\"");
            }
            if (!value.is_number()) {
                bad_input(origin, "probability for \"" + key + "\" is not a number");
            }
            probs.emplace_back(int(id), value.get<double>());
        }
        rows.emplace_back(s, std::move(probs));
    }
    try {
        return ChoiceProbabilityTable::from_rows(Universe{n}, rows);
    } catch (const Error& e) {
        bad_input(origin, e.what());
    }
}

ChoiceProbabilityTable load_table_json(const std::string& path) {
    return table_from_json(read_text_file(path), path);
}

void save_table_json(const ChoiceProbabilityTable& table, const std::string& path) {
    write_text_file(path, table_to_json(table));
}

TransactionsFile transactions_from_csv(const std::string& text, const std::string& origin) {
    const std::vector<std::string> lines = split_lines(text);
    if (lines.empty() || lines[0] != "assortment,choice") {
        bad_input(origin, "expected header \"assortment,choice\"");
    }
    TransactionsFile out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const long line_no = long(i) + 1;
        if (lines[i].empty()) continue;
        auto [set_field, choice_field] = split_two(lines[i], origin, line_no);
        ItemSet assortment;
        if (!set_field.empty()) {
            std::string part;
            std::istringstream parts(set_field);
            while (std::getline(parts, part, ';')) {
                const int id = parse_int_field(part, origin, line_no, "product id");
                if (id < 1 || id > 63) {
                    bad_line(origin, line_no, "product id " + std::to_string(id) +
                                                  " outside 1..63");
                }
                assortment = assortment.with(id);
                out.max_id = std::max(out.max_id, id);
            }
        }
        const int choice = parse_int_field(choice_field, origin, line_no, "choice");
        if (choice < 0 || choice > 63) {
            bad_line(origin, line_no, "choice " + std::to_string(choice) + " outside 0..63");
        }
        out.max_id = std::max(out.max_id, choice);
        out.records.push_back({assortment, choice, line_no});
    }
    return out;
}

TransactionsFile load_transactions_csv(const std::string& path) {
    return transactions_from_csv(read_text_file(path), path);
}

std::string transactions_to_csv(const std::vector<Transaction>& records) {
    std::string out = "assortment,choice\n";
    for (const Transaction& t : records) {
        bool first = true;
        for (int id : t.assortment) {
            if (!first) out += ';';
            out += std::to_string(id);
            first = false;
        }
        out += ',';
        out += std::to_string(t.choice);
        out += '\n';
    }
    return out;
}

void save_transactions_csv(const std::vector<Transaction>& records, const std::string& path) {
    write_text_file(path, transactions_to_csv(records));
}

PriceMap prices_from_csv(const std::string& text, const std::string& origin) {
    const std::vector<std::string> lines = split_lines(text);
    if (lines.empty() || lines[0] != "id,price") bad_input(origin, "expected header \"id,price\"");
    PriceMap prices;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const long line_no = long(i) + 1;
        if (lines[i].empty()) continue;
        auto [id_field, price_field] = split_two(lines[i], origin, line_no);
        const int id = parse_int_field(id_field, origin, line_no, "product id");
        if (id < 1) bad_line(origin, line_no, "product id must be positive");
        if (prices.count(id)) {
            bad_line(origin, line_no, "duplicate price for product " + std::to_string(id));
        }
        char* end = nullptr;
        const double price = std::strtod(price_field.c_str(), &end);
        if (price_field.empty() || end == nullptr || *end != '\0') {
            bad_line(origin, line_no, "cannot parse price \"" + price_field + "\"");
        }
        prices[id] = price;
    }
    if (prices.empty()) bad_input(origin, "no prices given");
    return prices;
}

PriceMap load_prices_csv(const std::string& path) {
    return prices_from_csv(read_text_file(path), path);
}

std::string prices_to_csv(const PriceMap& prices) {
    std::string out = "id,price\n";
    for (const auto& [id, price] : prices) {
        out += std::to_string(id);
        out += ',';
        out += fmt_g12(price);
        out += '\n';
    }
    return out;
}

void save_prices_csv(const PriceMap& prices, const std::string& path) {
    write_text_file(path, prices_to_csv(prices));
}

GraphFile graph_from_text(const std::string& text, const std::string& origin) {
    GraphFile out;
    const std::vector<std::string> lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const long line_no = long(i) + 1;
        const std::string& line = lines[i];
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        int u = 0;
        int v = 0;
        std::string extra;
        if (!(fields >> u >> v) || (fields >> extra)) {
            bad_line(origin, line_no, "expected two vertex ids, got \"" + line + "\"");
        }
        if (u < 1 || v < 1) bad_line(origin, line_no, "vertex ids must be positive");
        out.edges.push_back({u, v});
        out.num_vertices = std::max({out.num_vertices, u, v});
    }
    return out;
}

GraphFile load_graph(const std::string& path) {
    return graph_from_text(read_text_file(path), path);
}

} // namespace ssm
