#pragma once

#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "dte/dataset.hpp"
#include "dte/dtetests.hpp"
#include "dte/harness.hpp"

namespace dte::io {

inline constexpr const char* kVersion = "0.1.0";

// Dataset CSV: header x1,...,xd,a,y; one row per unit; a in {0,1}; no
// missing cells. Malformed rows raise InputError naming the first offending
// row. d is inferred from the header.
Dataset read_dataset_csv(const std::string& path);
Dataset parse_dataset_csv(const std::string& text);

// Values serialized with 17 significant digits, so ingestion reproduces the
// in-memory dataset exactly.
std::string dataset_to_csv(const Dataset& data);
void write_dataset_csv(const Dataset& data, const std::string& path);

// Single-test result document: method, n, d, statistic, p_value, alpha,
// reject, config echo, tool version. Timestamp is omitted when
// `with_timestamp` is false.
nlohmann::json result_to_json(const tests::TestResult& result,
                              const tests::TestConfig& config, int n, int d,
                              std::optional<int> permutations,
                              bool with_timestamp);

// Machine-readable error document for the CLI.
nlohmann::json error_to_json(const std::string& kind,
                             const std::string& message);

std::string rate_table_to_csv(const harness::RateTable& table);
std::string timing_table_to_csv(const std::vector<harness::TimingRow>& rows);
std::string statistics_to_csv(const std::vector<double>& stats);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace dte::io
