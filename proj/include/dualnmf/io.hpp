#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dualnmf/factorizer.hpp"
#include "dualnmf/types.hpp"

namespace dualnmf {

struct ReadOptions {
    enum class Flag { Auto, Yes, No };
    Flag header = Flag::Auto;      // single leading header row
    Flag row_labels = Flag::Auto;  // leading non-numeric label column
    char delimiter = '\0';         // '\0' = auto-detect comma vs tab
};

// Parse a delimiter-separated numeric matrix. Auto-detection: tab wins over
// comma if the first line contains one; a first row with any non-numeric
// token is a header; a label column is assumed when every data row starts
// with a non-numeric token. Entry coordinates in errors are 1-based and
// relative to the parsed matrix (header/label excluded).
//
// Throws ParseError (bad token, non-finite value, empty matrix),
// NegativeEntry, RaggedRows.
NonNegMatrix parse_matrix(std::string_view text, const ReadOptions& opts = {});

// parse_matrix applied to the contents of a file.
NonNegMatrix read_matrix(const std::filesystem::path& path,
                         const ReadOptions& opts = {});

// Shortest decimal representation that round-trips the exact double.
std::string format_double(double value);

// CSV with one row per matrix row, entries via format_double. Written
// atomically (temp file + rename).
void write_matrix_csv(const std::filesystem::path& path,
                      const NonNegMatrix& M);

// Atomic whole-file write (temp file + rename). Throws WriteFailure.
void write_text_file(const std::filesystem::path& path,
                     std::string_view content);

// FNV-1a 64-bit digest, rendered as "fnv1a64:<16 hex digits>".
std::string digest_bytes(std::string_view bytes);
std::string digest_file(const std::filesystem::path& path);

// Provenance record for one factorization run. Serialized as a flat JSON
// object; the field names are a stable interface.
struct RunManifest {
    std::string artifact_version;
    std::string created_utc;  // ISO 8601; the only non-deterministic field
    std::string input_path;
    std::string input_digest;
    Index rows = 0;
    Index cols = 0;
    FactorConfig config;
    bool rank_warning = false;
    std::vector<RestartSummary> restarts;
    std::size_t winner_index = 0;
    double r_squared = 0.0;
    double final_objective = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
};

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(std::string_view json_text);
RunManifest read_manifest(const std::filesystem::path& path);

// Emits W.csv, H.csv, trace.csv ("iteration,objective", one line per trace
// point) and manifest.json into out_dir, creating it if needed. All numeric
// output round-trips exactly, so re-reading W.csv/H.csv and recomputing the
// objective reproduces final_objective.
void write_result(const FactorResult& result, const RunManifest& manifest,
                  const std::filesystem::path& out_dir);

}  // namespace dualnmf
