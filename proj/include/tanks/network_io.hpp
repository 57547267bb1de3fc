#pragma once

// JSON and CSV network documents.
//
// JSON: {"banks": [{"id": "A", "cash": 1}],
//        "liabilities": [{"from": "A", "to": "B", "amount": "1/3"}]}
// Amounts are JSON numbers or strings of the form "p/q" (or "p", or a decimal
// literal). Omitted pairs are zero. Bank order is input order.
//
// CSV: one file of `id,cash` rows and one of `from,to,amount` rows; a first
// row naming the columns is skipped.

#include "tanks/network.hpp"

#include "json.hpp"

#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>

namespace tanks {

using json = nlohmann::ordered_json;

template <class T>
json scalar_json(const T& x) {
    if constexpr (is_exact_v<T>)
        return to_string(x);
    else
        return x;
}

template <class T>
json scalars_json(const Vector<T>& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(scalar_json(x));
    return a;
}

template <class T>
json ids_json(const FinancialNetwork<T>& net, const BankSet& set) {
    json a = json::array();
    for (auto i : set) a.push_back(net.id(i));
    return a;
}

namespace detail {

template <class T>
T scalar_from_json(const json& v, const std::string& where) {
    if (v.is_string()) {
        try {
            return parse_scalar<T>(v.get<std::string>());
        } catch (const Error& e) {
            throw Error(ErrorKind::SchemaError, where + ": " + e.what());
        }
    }
    if (v.is_number_integer()) {
        if constexpr (is_exact_v<T>)
            return v.is_number_unsigned() ? Rational(v.get<std::uint64_t>()) : Rational(v.get<std::int64_t>());
        else
            return v.is_number_unsigned() ? static_cast<double>(v.get<std::uint64_t>())
                                          : static_cast<double>(v.get<std::int64_t>());
    }
    if (v.is_number_float()) return from_double<T>(v.get<double>());
    throw Error(ErrorKind::SchemaError, where + ": expected a number or rational string");
}

inline const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw Error(ErrorKind::SchemaError, where + " must be an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw Error(ErrorKind::SchemaError, where + " is missing \"" + key + "\"");
    return *it;
}

inline std::string id_from_json(const json& v, const std::string& where) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return v.dump();
    throw Error(ErrorKind::SchemaError, where + ": bank id must be a string");
}

struct Row {
    std::vector<std::string> fields;
    std::size_t line;
};

inline std::string trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return std::string(s);
}

inline std::vector<Row> csv_rows(std::string_view text, std::size_t width, const std::string& what) {
    std::vector<Row> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        Row row{{}, lineno};
        std::string_view rest(line);
        while (true) {
            auto comma = rest.find(',');
            row.fields.push_back(trim(rest.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (row.fields.size() != width)
            throw Error(ErrorKind::SyntaxError, what + " line " + std::to_string(lineno) + ": expected " +
                                                    std::to_string(width) + " fields");
        rows.push_back(std::move(row));
    }
    return rows;
}

template <class T>
FinancialNetwork<T> assemble(const std::vector<std::pair<std::string, T>>& banks,
                             const std::vector<std::tuple<std::string, std::string, T>>& edges) {
    if (banks.empty()) throw Error(ErrorKind::SchemaError, "network has no banks");
    const std::size_t n = banks.size();
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::string> ids;
    Vector<T> cash;
    for (const auto& [id, c] : banks) {
        if (!index.emplace(id, ids.size()).second) throw Error(ErrorKind::SchemaError, "duplicate bank id '" + id + "'");
        ids.push_back(id);
        cash.push_back(c);
    }
    Matrix<T> l(n, n);
    Matrix<char> seen(n, n, 0);
    for (const auto& [from, to, amount] : edges) {
        auto f = index.find(from);
        auto t = index.find(to);
        if (f == index.end()) throw Error(ErrorKind::SchemaError, "liability from unknown bank '" + from + "'");
        if (t == index.end()) throw Error(ErrorKind::SchemaError, "liability to unknown bank '" + to + "'");
        if (seen(f->second, t->second))
            throw Error(ErrorKind::SchemaError, "liability " + from + "->" + to + " listed twice");
        seen(f->second, t->second) = 1;
        l(f->second, t->second) = amount;
    }
    return FinancialNetwork<T>(std::move(l), std::move(cash), std::move(ids));
}

}  // namespace detail

template <class T>
FinancialNetwork<T> network_from_json(const json& doc) {
    const auto& banks = detail::require(doc, "banks", "document");
    if (!banks.is_array()) throw Error(ErrorKind::SchemaError, "\"banks\" must be an array");
    std::vector<std::pair<std::string, T>> bank_rows;
    for (std::size_t k = 0; k < banks.size(); ++k) {
        const std::string where = "banks[" + std::to_string(k) + "]";
        bank_rows.emplace_back(detail::id_from_json(detail::require(banks[k], "id", where), where),
                               detail::scalar_from_json<T>(detail::require(banks[k], "cash", where), where + ".cash"));
    }
    std::vector<std::tuple<std::string, std::string, T>> edges;
    if (auto it = doc.find("liabilities"); it != doc.end()) {
        if (!it->is_array()) throw Error(ErrorKind::SchemaError, "\"liabilities\" must be an array");
        for (std::size_t k = 0; k < it->size(); ++k) {
            const auto& e = (*it)[k];
            const std::string where = "liabilities[" + std::to_string(k) + "]";
            edges.emplace_back(detail::id_from_json(detail::require(e, "from", where), where),
                               detail::id_from_json(detail::require(e, "to", where), where),
                               detail::scalar_from_json<T>(detail::require(e, "amount", where), where + ".amount"));
        }
    }
    return detail::assemble<T>(bank_rows, edges);
}

template <class T>
FinancialNetwork<T> parse_network(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::SyntaxError, e.what());
    }
    return network_from_json<T>(doc);
}

template <class T>
json network_to_json(const FinancialNetwork<T>& net) {
    json doc;
    json banks = json::array();
    for (std::size_t i = 0; i < net.size(); ++i) banks.push_back({{"id", net.id(i)}, {"cash", scalar_json(net.cash()[i])}});
    json edges = json::array();
    for (std::size_t i = 0; i < net.size(); ++i)
        for (std::size_t j = 0; j < net.size(); ++j)
            if (net.liabilities()(i, j) != T(0))
                edges.push_back({{"from", net.id(i)}, {"to", net.id(j)}, {"amount", scalar_json(net.liabilities()(i, j))}});
    doc["banks"] = std::move(banks);
    doc["liabilities"] = std::move(edges);
    return doc;
}

template <class T>
std::string serialize_network(const FinancialNetwork<T>& net) {
    return network_to_json(net).dump(2) + "\n";
}

template <class T>
FinancialNetwork<T> parse_network_csv(std::string_view banks_csv, std::string_view liabilities_csv) {
    auto bank_rows = detail::csv_rows(banks_csv, 2, "banks csv");
    if (!bank_rows.empty() && bank_rows.front().fields[0] == "id") bank_rows.erase(bank_rows.begin());
    auto edge_rows = detail::csv_rows(liabilities_csv, 3, "liabilities csv");
    if (!edge_rows.empty() && edge_rows.front().fields[0] == "from") edge_rows.erase(edge_rows.begin());

    std::vector<std::pair<std::string, T>> banks;
    for (const auto& r : bank_rows) banks.emplace_back(r.fields[0], parse_scalar<T>(r.fields[1]));
    std::vector<std::tuple<std::string, std::string, T>> edges;
    for (const auto& r : edge_rows) edges.emplace_back(r.fields[0], r.fields[1], parse_scalar<T>(r.fields[2]));
    return detail::assemble<T>(banks, edges);
}

}  // namespace tanks
