#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "anb/varset.hpp"

namespace anb {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Variable {
    std::string name;
    int arity = 0;
    std::vector<std::string> states;   // display label per state index
    std::optional<double> cutoff;      // set when the column was median-binarized
};

// Discrete data matrix. Variable 0 is the class.
struct Dataset {
    std::vector<Variable> vars;
    std::vector<std::vector<std::uint8_t>> rows;

    int n_vars() const { return static_cast<int>(vars.size()); }
    int arity(int v) const { return vars[v].arity; }
    std::size_t n_rows() const { return rows.size(); }

    void check() const {
        for (const auto& v : vars)
            if (v.arity < 2) throw SchemaError("variable '" + v.name + "' has arity < 2");
        for (const auto& r : rows) {
            if (r.size() != vars.size()) throw SchemaError("row width mismatch");
            for (std::size_t i = 0; i < r.size(); ++i)
                if (r[i] >= vars[i].arity) throw SchemaError("state out of range");
        }
    }

    Dataset subset_rows(const std::vector<std::size_t>& idx) const {
        Dataset out;
        out.vars = vars;
        out.rows.reserve(idx.size());
        for (auto i : idx) out.rows.push_back(rows[i]);
        return out;
    }

    // Keep only the variables in `keep` (must include the class); indices are
    // re-packed in ascending order of the original ids.
    Dataset project(VarSet keep) const {
        if (!keep.contains(0)) throw SchemaError("project: class variable must be kept");
        Dataset out;
        auto members = keep.members();
        for (int v : members) out.vars.push_back(vars[v]);
        out.rows.reserve(rows.size());
        for (const auto& r : rows) {
            std::vector<std::uint8_t> nr;
            nr.reserve(members.size());
            for (int v : members) nr.push_back(r[v]);
            out.rows.push_back(std::move(nr));
        }
        return out;
    }
};

struct DiscretizedColumn {
    std::vector<std::uint8_t> states;  // 0: value <= median, 1: value > median
    double median = 0.0;
};

// Two-bin median split of a numeric column. The cut-off is computed over the
// whole column before any fold splitting happens downstream.
inline DiscretizedColumn discretize_median(const std::vector<double>& col) {
    if (col.size() < 2) throw SchemaError("discretize_median: need at least 2 values");
    std::vector<double> sorted(col);
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == sorted.back())
        throw SchemaError("discretize_median: all values identical");
    std::size_t n = sorted.size();
    double median = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    DiscretizedColumn out;
    out.median = median;
    out.states.reserve(col.size());
    for (double v : col) out.states.push_back(v <= median ? 0 : 1);
    return out;
}

enum class Discretize { Auto, None };

struct CsvOptions {
    std::string class_column;
    std::string missing_marker = "?";
    Discretize discretize = Discretize::Auto;
    // auto rule: a feature column whose values all parse as numbers is
    // binarized when a non-integral value occurs or when it has more distinct
    // values than this threshold
    int max_numeric_states = 15;
};

namespace detail {

// RFC-4180-ish: quoted fields, embedded commas/quotes, \r\n line ends.
inline std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> rec;
    std::string field;
    bool in_quotes = false, any = false;
    char c;
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field += '"';
                    in.get(c);
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"': in_quotes = true; any = true; break;
            case ',': rec.push_back(field); field.clear(); any = true; break;
            case '\r': break;
            case '\n':
                if (any || !field.empty() || !rec.empty()) {
                    rec.push_back(field);
                    records.push_back(rec);
                }
                rec.clear();
                field.clear();
                any = false;
                break;
            default: field += c; any = true; break;
        }
    }
    if (any || !field.empty() || !rec.empty()) {
        rec.push_back(field);
        records.push_back(rec);
    }
    return records;
}

inline bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

inline Dataset ingest_csv_stream(std::istream& in, const CsvOptions& opt) {
    auto records = detail::parse_csv(in);
    if (records.empty()) throw SchemaError("empty CSV: header row required");
    const auto& header = records.front();
    int class_idx = -1;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == opt.class_column) class_idx = static_cast<int>(i);
    if (class_idx < 0) throw SchemaError("class column '" + opt.class_column + "' not found");

    std::size_t width = header.size();
    // drop rows containing the missing marker
    std::vector<const std::vector<std::string>*> kept;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& row = records[r];
        if (row.size() != width) throw SchemaError("row " + std::to_string(r) + " has wrong width");
        bool missing = false;
        for (const auto& f : row) missing |= (f == opt.missing_marker);
        if (!missing) kept.push_back(&row);
    }

    // class column first, others in file order
    std::vector<int> order;
    order.push_back(class_idx);
    for (std::size_t i = 0; i < width; ++i)
        if (static_cast<int>(i) != class_idx) order.push_back(static_cast<int>(i));

    Dataset out;
    out.vars.resize(width);
    out.rows.assign(kept.size(), std::vector<std::uint8_t>(width, 0));

    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        int col = order[pos];
        Variable var;
        var.name = header[col];

        std::vector<double> numeric(kept.size());
        bool all_numeric = !kept.empty();
        bool all_integral = true;
        for (std::size_t r = 0; r < kept.size() && all_numeric; ++r) {
            double v;
            if (!detail::parse_number((*kept[r])[col], v)) {
                all_numeric = false;
                break;
            }
            numeric[r] = v;
            if (v != static_cast<double>(static_cast<long long>(v))) all_integral = false;
        }
        std::vector<std::string> distinct;
        auto state_of = [&](const std::string& s) -> int {
            for (std::size_t k = 0; k < distinct.size(); ++k)
                if (distinct[k] == s) return static_cast<int>(k);
            distinct.push_back(s);
            return static_cast<int>(distinct.size()) - 1;
        };

        bool binarize = false;
        if (opt.discretize == Discretize::Auto && pos != 0 && all_numeric) {
            std::vector<double> sorted(numeric);
            std::sort(sorted.begin(), sorted.end());
            std::size_t ndistinct = std::unique(sorted.begin(), sorted.end()) - sorted.begin();
            binarize = ndistinct > 1 &&
                       (!all_integral || ndistinct > static_cast<std::size_t>(opt.max_numeric_states));
        }

        if (binarize) {
            auto disc = discretize_median(numeric);
            var.cutoff = disc.median;
            var.states = {"<=" + detail::format_double(disc.median),
                          ">" + detail::format_double(disc.median)};
            var.arity = 2;
            for (std::size_t r = 0; r < kept.size(); ++r) out.rows[r][pos] = disc.states[r];
        } else {
            for (std::size_t r = 0; r < kept.size(); ++r) {
                int s = state_of((*kept[r])[col]);
                if (s > 255) throw SchemaError("variable '" + var.name + "': more than 256 states");
                out.rows[r][pos] = static_cast<std::uint8_t>(s);
            }
            var.states = distinct;
            var.arity = static_cast<int>(distinct.size());
        }
        if (var.arity < 2)
            throw SchemaError("variable '" + var.name + "' has fewer than 2 observed values");
        out.vars[pos] = std::move(var);
    }
    return out;
}

inline Dataset ingest_csv(const std::string& path, const CsvOptions& opt) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return ingest_csv_stream(in, opt);
}

// Re-encode a CSV against an existing schema (e.g. predicting with a trained
// model): categorical values map through the stored state labels, binarized
// columns through the stored cut-off. Columns not in the schema are ignored.
struct SchemaIngest {
    Dataset data;
    bool has_class = false;
};

inline SchemaIngest ingest_csv_with_schema(std::istream& in, const std::vector<Variable>& schema,
                                           const std::string& missing_marker) {
    auto records = detail::parse_csv(in);
    if (records.empty()) throw SchemaError("empty CSV: header row required");
    const auto& header = records.front();

    std::vector<int> col_of(schema.size(), -1);
    std::vector<std::string> absent;
    for (std::size_t i = 0; i < schema.size(); ++i) {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (header[c] == schema[i].name) col_of[i] = static_cast<int>(c);
        if (col_of[i] < 0 && i > 0) absent.push_back(schema[i].name);
    }
    if (!absent.empty()) {
        std::string msg = "columns required by the model are missing:";
        for (const auto& n : absent) msg += " " + n;
        throw SchemaError(msg);
    }

    SchemaIngest out;
    out.has_class = col_of[0] >= 0;
    out.data.vars = schema;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& row = records[r];
        if (row.size() != header.size())
            throw SchemaError("row " + std::to_string(r) + " has wrong width");
        bool missing = false;
        for (std::size_t i = 0; i < schema.size(); ++i)
            if (col_of[i] >= 0 && row[col_of[i]] == missing_marker) missing = true;
        if (missing) continue;

        std::vector<std::uint8_t> encoded(schema.size(), 0);
        for (std::size_t i = 0; i < schema.size(); ++i) {
            if (col_of[i] < 0) continue;
            const std::string& raw = row[col_of[i]];
            const Variable& var = schema[i];
            if (var.cutoff) {
                double v;
                if (!detail::parse_number(raw, v))
                    throw SchemaError("variable '" + var.name + "': non-numeric value '" + raw +
                                      "' for a binarized column");
                encoded[i] = v <= *var.cutoff ? 0 : 1;
            } else {
                int s = -1;
                for (std::size_t k = 0; k < var.states.size(); ++k)
                    if (var.states[k] == raw) s = static_cast<int>(k);
                if (s < 0)
                    throw SchemaError("variable '" + var.name + "': value '" + raw +
                                      "' not seen in training");
                encoded[i] = static_cast<std::uint8_t>(s);
            }
        }
        out.data.rows.push_back(std::move(encoded));
    }
    return out;
}

inline nlohmann::json dataset_to_json(const Dataset& d) {
    nlohmann::json vars = nlohmann::json::array();
    for (const auto& v : d.vars) {
        nlohmann::json jv{{"name", v.name}, {"arity", v.arity}, {"states", v.states}};
        if (v.cutoff) jv["cutoff"] = *v.cutoff;
        vars.push_back(jv);
    }
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : d.rows) rows.push_back(std::vector<int>(r.begin(), r.end()));
    return nlohmann::json{
        {"format", "anb.dataset"}, {"version", 1}, {"variables", vars}, {"rows", rows}};
}

inline Dataset dataset_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "anb.dataset") throw SchemaError("not an anb.dataset file");
    if (j.value("version", 0) != 1) throw SchemaError("unsupported dataset version");
    Dataset d;
    for (const auto& jv : j.at("variables")) {
        Variable v;
        v.name = jv.at("name").get<std::string>();
        v.arity = jv.at("arity").get<int>();
        v.states = jv.at("states").get<std::vector<std::string>>();
        if (jv.contains("cutoff")) v.cutoff = jv.at("cutoff").get<double>();
        d.vars.push_back(std::move(v));
    }
    for (const auto& jr : j.at("rows")) {
        std::vector<std::uint8_t> row;
        for (int s : jr.get<std::vector<int>>()) row.push_back(static_cast<std::uint8_t>(s));
        d.rows.push_back(std::move(row));
    }
    d.check();
    return d;
}

inline Dataset load_dataset(const std::string& path, const CsvOptions& opt) {
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open '" + path + "'");
        nlohmann::json j;
        in >> j;
        return dataset_from_json(j);
    }
    return ingest_csv(path, opt);
}

}  // namespace anb
