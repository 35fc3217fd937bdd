#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "lopt/embeddings.hpp"
#include "lopt/measures.hpp"

namespace lopt::io {

using nlohmann::json;

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

/// Point-set CSV: header `x0,...,x{d-1},w`, one atom per row.
Measure parse_measure_csv(std::istream& in, const std::string& origin = "<stream>");
Measure read_measure_csv(const std::filesystem::path& path);
std::string format_measure_csv(const Measure& mu);
void write_measure_csv(const std::filesystem::path& path, const Measure& mu);

/// `{"n0": int, "n1": int, "entries": [[i, j, mass], ...]}`
json plan_to_json(const Plan& plan);
Plan plan_from_json(const json& j);

/// `{"reference_hash": str, "lambda": float, "u": [[...]], "p_hat": [...], "deficit": float}`
json embedding_to_json(const LoptEmbedding<double>& e);
LoptEmbedding<double> lopt_embedding_from_json(const json& j);

/// Same layout with `"kind": "lot"`, null lambda and p_hat, zero deficit.
json embedding_to_json(const LotEmbedding<double>& e);
LotEmbedding<double> lot_embedding_from_json(const json& j);

bool is_lot_embedding(const json& j);

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Comma-separated list of reals, e.g. "0,0.25,1".
std::vector<double> parse_real_list(const std::string& text);

} // namespace lopt::io
