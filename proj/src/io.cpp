#include "lopt/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace lopt::io {

namespace {

std::string trim(std::string s)
{
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, sep)) {
        out.push_back(trim(cell));
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

double parse_double(const std::string& s, const std::string& where)
{
    double value = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    if (!s.empty() && *begin == '+') {
        ++begin;
    }
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw InputError(where + ": not a number: '" + s + "'");
    }
    return value;
}

PointMatrix<double> matrix_from_json(const json& rows, const char* what)
{
    detail::require(rows.is_array() && !rows.empty(), what);
    const auto n = static_cast<Index>(rows.size());
    detail::require(rows.front().is_array() && !rows.front().empty(), what);
    const auto d = static_cast<Index>(rows.front().size());
    PointMatrix<double> m(n, d);
    for (Index i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        detail::require(row.is_array() && static_cast<Index>(row.size()) == d, what);
        for (Index k = 0; k < d; ++k) {
            m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
        }
    }
    return m;
}

json matrix_to_json(const PointMatrix<double>& m)
{
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index k = 0; k < m.cols(); ++k) {
            row.push_back(m(i, k));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

std::string format_double(double value)
{
    return fmt::format("{}", value);
}

Measure parse_measure_csv(std::istream& in, const std::string& origin)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw InputError(origin + ": empty point-set file");
    }
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) {
        line.erase(0, 3); // UTF-8 BOM
    }
    const auto header = split(trim(line), ',');
    detail::require(header.size() >= 2, "point-set header needs at least one coordinate and w");
    const auto d = static_cast<Index>(header.size() - 1);
    for (Index k = 0; k < d; ++k) {
        if (header[static_cast<std::size_t>(k)] != "x" + std::to_string(k)) {
            throw InputError(origin + ": header column " + std::to_string(k) + " must be x" + std::to_string(k));
        }
    }
    if (header.back() != "w") {
        throw InputError(origin + ": last header column must be w");
    }

    std::vector<double> values;
    Index rows = 0;
    Index line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto cells = split(line, ',');
        if (static_cast<Index>(cells.size()) != d + 1) {
            throw InputError(origin + ":" + std::to_string(line_no) + ": expected " + std::to_string(d + 1)
                             + " columns");
        }
        for (const auto& c : cells) {
            values.push_back(parse_double(c, origin + ":" + std::to_string(line_no)));
        }
        ++rows;
    }
    if (rows == 0) {
        throw InputError(origin + ": point set has no atoms");
    }
    PointMatrix<double> pts(rows, d);
    WeightVector<double> w(rows);
    for (Index i = 0; i < rows; ++i) {
        for (Index k = 0; k < d; ++k) {
            pts(i, k) = values[static_cast<std::size_t>(i * (d + 1) + k)];
        }
        w(i) = values[static_cast<std::size_t>(i * (d + 1) + d)];
    }
    return Measure(std::move(pts), std::move(w));
}

Measure read_measure_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    return parse_measure_csv(in, path.string());
}

std::string format_measure_csv(const Measure& mu)
{
    std::string out;
    for (Index k = 0; k < mu.dim(); ++k) {
        out += fmt::format("x{},", k);
    }
    out += "w\n";
    for (Index n = 0; n < mu.size(); ++n) {
        for (Index k = 0; k < mu.dim(); ++k) {
            out += format_double(mu.points()(n, k));
            out += ',';
        }
        out += format_double(mu.weight(n));
        out += '\n';
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InputError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw InputError("failed writing " + path.string());
    }
}

void write_measure_csv(const std::filesystem::path& path, const Measure& mu)
{
    write_text(path, format_measure_csv(mu));
}

json plan_to_json(const Plan& plan)
{
    json entries = json::array();
    for (const auto& e : plan.entries) {
        entries.push_back(json::array({e.row(), e.col(), e.value()}));
    }
    return {{"n0", plan.source_size}, {"n1", plan.target_size}, {"entries", std::move(entries)}};
}

Plan plan_from_json(const json& j)
{
    try {
        Plan plan;
        plan.source_size = j.at("n0").get<Index>();
        plan.target_size = j.at("n1").get<Index>();
        for (const auto& e : j.at("entries")) {
            detail::require(e.is_array() && e.size() == 3, "plan entry must be [i, j, mass]");
            plan.entries.emplace_back(e[0].get<Index>(), e[1].get<Index>(), e[2].get<double>());
        }
        plan.validate();
        return plan;
    } catch (const json::exception& ex) {
        throw InputError(std::string("malformed plan JSON: ") + ex.what());
    }
}

json embedding_to_json(const LoptEmbedding<double>& e)
{
    json p_hat = json::array();
    for (Index n = 0; n < e.p_hat.size(); ++n) {
        p_hat.push_back(e.p_hat(n));
    }
    return {{"kind", "lopt"},
            {"reference_hash", e.reference.hex()},
            {"lambda", e.lambda},
            {"u", matrix_to_json(e.u)},
            {"p_hat", std::move(p_hat)},
            {"deficit", e.deficit}};
}

json embedding_to_json(const LotEmbedding<double>& e)
{
    return {{"kind", "lot"},
            {"reference_hash", e.reference.hex()},
            {"lambda", nullptr},
            {"u", matrix_to_json(e.u)},
            {"p_hat", nullptr},
            {"deficit", 0.0}};
}

bool is_lot_embedding(const json& j)
{
    return j.contains("kind") && j.at("kind") == "lot";
}

LoptEmbedding<double> lopt_embedding_from_json(const json& j)
{
    try {
        detail::require(!is_lot_embedding(j), "expected an LOPT embedding, got an LOT embedding");
        LoptEmbedding<double> e;
        e.reference = ReferenceId::from_hex(j.at("reference_hash").get<std::string>());
        e.lambda = j.at("lambda").get<double>();
        e.u = matrix_from_json(j.at("u"), "embedding u must be a non-empty rectangular array");
        const auto& p = j.at("p_hat");
        detail::require(p.is_array() && static_cast<Index>(p.size()) == e.u.rows(), "p_hat length must match u");
        e.p_hat.resize(e.u.rows());
        for (Index n = 0; n < e.u.rows(); ++n) {
            e.p_hat(n) = p[static_cast<std::size_t>(n)].get<double>();
        }
        e.deficit = j.at("deficit").get<double>();
        detail::require(e.lambda >= 0.0, "embedding lambda must be nonnegative");
        return e;
    } catch (const json::exception& ex) {
        throw InputError(std::string("malformed embedding JSON: ") + ex.what());
    }
}

LotEmbedding<double> lot_embedding_from_json(const json& j)
{
    try {
        detail::require(is_lot_embedding(j), "expected an LOT embedding");
        LotEmbedding<double> e;
        e.reference = ReferenceId::from_hex(j.at("reference_hash").get<std::string>());
        e.u = matrix_from_json(j.at("u"), "embedding u must be a non-empty rectangular array");
        return e;
    } catch (const json::exception& ex) {
        throw InputError(std::string("malformed embedding JSON: ") + ex.what());
    }
}

json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception& ex) {
        throw InputError(path.string() + ": " + ex.what());
    }
}

void write_json(const std::filesystem::path& path, const json& j)
{
    write_text(path, j.dump(2) + "\n");
}

std::vector<double> parse_real_list(const std::string& text)
{
    std::vector<double> out;
    for (const auto& cell : split(text, ',')) {
        detail::require(!cell.empty(), "empty entry in number list");
        out.push_back(parse_double(cell, "list"));
    }
    return out;
}

} // namespace lopt::io
