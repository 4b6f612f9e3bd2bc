#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fairx/exchange.hpp"
#include "fairx/instance.hpp"
#include "fairx/solver.hpp"
#include "fairx/verify.hpp"

namespace fairx {

// Instance files: human-readable JSON (schema_version 1). The top-level
// "seed" both documents generator provenance and seeds the sampled oracle.
Instance parse_instance_text(const std::string& text);
Instance parse_instance_file(const std::string& path);
std::string instance_to_json(const Instance& inst);

// Reproducible random instance; family is additive | concave_of_sum |
// coverage. Weights U[0.5,2]; coverage uses 2n topics, values U[0,1] and hit
// probabilities U[0,1]; self entries are zero.
Instance generate_instance(int n, const std::string& family, double eps, std::uint64_t seed);

// Exchange matrices parse from a bare {"n":..,"exchange":[[..]]} document or
// from a full solver result (its "exchange" key).
ExchangeMatrix parse_exchange_text(const std::string& text);
ExchangeMatrix parse_exchange_file(const std::string& path);

std::string result_to_json(const SolverResult& res, const Instance& inst);
std::string trace_to_jsonl(const SolverTrace& trace);
std::string trajectory_to_csv(const std::vector<std::vector<double>>& rows);
std::string report_to_json(const VerificationReport& report);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace fairx
