#include "dualnmf/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dualnmf {

namespace {

using nlohmann::json;

bool parse_token(std::string_view token, double& out) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw WriteFailure("cannot open '" + tmp.string() +
                               "' for writing");
        }
        out.write(content.data(),
                  static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw WriteFailure("short write to '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw WriteFailure("cannot rename '" + tmp.string() + "' to '" +
                           path.string() + "': " + ec.message());
    }
}

json summary_to_json(const RestartSummary& s) {
    return json{{"index", s.index},
                {"seed", s.seed},
                {"iterations", s.iterations},
                {"final_objective", s.final_objective},
                {"converged", s.converged},
                {"failed", s.failed},
                {"error", s.error}};
}

RestartSummary summary_from_json(const json& j) {
    RestartSummary s;
    s.index = j.at("index").get<std::size_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.iterations = j.at("iterations").get<std::size_t>();
    s.final_objective = j.at("final_objective").get<double>();
    s.converged = j.at("converged").get<bool>();
    s.failed = j.at("failed").get<bool>();
    s.error = j.at("error").get<std::string>();
    return s;
}

}  // namespace

NonNegMatrix parse_matrix(std::string_view text, const ReadOptions& opts) {
    // Split into lines, dropping a trailing newline's empty remnant.
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t pos = text.find('\n', start);
        if (pos == std::string_view::npos) {
            if (start < text.size()) lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw ParseError("empty matrix");

    char delim = opts.delimiter;
    if (delim == '\0') {
        delim = lines.front().find('\t') != std::string_view::npos ? '\t'
                                                                   : ',';
    }

    std::vector<std::vector<std::string_view>> rows;
    rows.reserve(lines.size());
    for (std::size_t r = 0; r < lines.size(); ++r) {
        if (trim(lines[r]).empty()) {
            throw ParseError(r + 1, 1, "", "blank row inside matrix");
        }
        auto fields = split(lines[r], delim);
        for (auto& f : fields) f = trim(f);
        rows.push_back(std::move(fields));
    }

    bool has_header = opts.header == ReadOptions::Flag::Yes;
    if (opts.header == ReadOptions::Flag::Auto) {
        double ignored;
        for (const auto& tok : rows.front()) {
            if (!parse_token(tok, ignored)) {
                has_header = true;
                break;
            }
        }
    }
    const std::size_t first_data = has_header ? 1 : 0;
    if (first_data >= rows.size()) throw ParseError("no data rows");

    bool has_labels = opts.row_labels == ReadOptions::Flag::Yes;
    if (opts.row_labels == ReadOptions::Flag::Auto) {
        has_labels = true;
        double ignored;
        for (std::size_t r = first_data; r < rows.size(); ++r) {
            if (rows[r].empty() || parse_token(rows[r].front(), ignored)) {
                has_labels = false;
                break;
            }
        }
    }
    const std::size_t first_col = has_labels ? 1 : 0;

    const std::size_t n_rows = rows.size() - first_data;
    if (rows[first_data].size() <= first_col) {
        throw ParseError("no data columns");
    }
    const std::size_t n_cols = rows[first_data].size() - first_col;

    NonNegMatrix M(static_cast<Index>(n_rows), static_cast<Index>(n_cols));
    for (std::size_t r = 0; r < n_rows; ++r) {
        const auto& fields = rows[first_data + r];
        if (fields.size() - first_col != n_cols) {
            throw RaggedRows(r + 1, n_cols, fields.size() - first_col);
        }
        for (std::size_t c = 0; c < n_cols; ++c) {
            const std::string_view tok = fields[first_col + c];
            double value;
            if (!parse_token(tok, value)) {
                throw ParseError(r + 1, c + 1, std::string(tok),
                                 "not a number");
            }
            if (!std::isfinite(value)) {
                throw ParseError(r + 1, c + 1, std::string(tok),
                                 "non-finite entry");
            }
            if (value < 0.0) {
                throw NegativeEntry(r + 1, c + 1, value);
            }
            M(static_cast<Index>(r), static_cast<Index>(c)) = value;
        }
    }
    return M;
}

NonNegMatrix read_matrix(const std::filesystem::path& path,
                         const ReadOptions& opts) {
    return parse_matrix(read_file(path), opts);
}

std::string format_double(double value) {
    std::array<char, 32> buf;
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

void write_matrix_csv(const std::filesystem::path& path,
                      const NonNegMatrix& M) {
    std::string out;
    out.reserve(static_cast<std::size_t>(M.size()) * 20);
    for (Index i = 0; i < M.rows(); ++i) {
        for (Index j = 0; j < M.cols(); ++j) {
            if (j > 0) out += ',';
            out += format_double(M(i, j));
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

void write_text_file(const std::filesystem::path& path,
                     std::string_view content) {
    write_file_atomic(path, content);
}

std::string digest_bytes(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return std::string("fnv1a64:") + buf;
}

std::string digest_file(const std::filesystem::path& path) {
    return digest_bytes(read_file(path));
}

std::string manifest_to_json(const RunManifest& m) {
    json j;
    j["artifact_version"] = m.artifact_version;
    j["created_utc"] = m.created_utc;
    j["input_path"] = m.input_path;
    j["input_digest"] = m.input_digest;
    j["rows"] = m.rows;
    j["cols"] = m.cols;
    j["config"] = {
        {"rank", m.config.rank},
        {"alpha", m.config.alpha},
        {"delta", m.config.delta},
        {"max_iters", m.config.max_iters},
        {"restarts", m.config.restarts},
        {"seed", m.config.seed},
        {"eps_floor", m.config.eps_floor},
        {"convergence",
         m.config.convergence == ConvergenceMode::Relative ? "rel" : "abs"},
    };
    j["rank_warning"] = m.rank_warning;
    j["restarts"] = json::array();
    for (const auto& s : m.restarts) j["restarts"].push_back(summary_to_json(s));
    j["winner_index"] = m.winner_index;
    j["r_squared"] = m.r_squared;
    j["final_objective"] = m.final_objective;
    j["converged"] = m.converged;
    j["iterations"] = m.iterations;
    return j.dump(2) + "\n";
}

RunManifest manifest_from_json(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("manifest: ") + e.what());
    }
    RunManifest m;
    try {
        m.artifact_version = j.at("artifact_version").get<std::string>();
        m.created_utc = j.at("created_utc").get<std::string>();
        m.input_path = j.at("input_path").get<std::string>();
        m.input_digest = j.at("input_digest").get<std::string>();
        m.rows = j.at("rows").get<Index>();
        m.cols = j.at("cols").get<Index>();
        const json& c = j.at("config");
        m.config.rank = c.at("rank").get<std::size_t>();
        m.config.alpha = c.at("alpha").get<double>();
        m.config.delta = c.at("delta").get<double>();
        m.config.max_iters = c.at("max_iters").get<std::size_t>();
        m.config.restarts = c.at("restarts").get<std::size_t>();
        m.config.seed = c.at("seed").get<std::uint64_t>();
        m.config.eps_floor = c.at("eps_floor").get<double>();
        m.config.convergence = c.at("convergence").get<std::string>() == "rel"
                                   ? ConvergenceMode::Relative
                                   : ConvergenceMode::Absolute;
        m.rank_warning = j.at("rank_warning").get<bool>();
        for (const auto& s : j.at("restarts")) {
            m.restarts.push_back(summary_from_json(s));
        }
        m.winner_index = j.at("winner_index").get<std::size_t>();
        m.r_squared = j.at("r_squared").get<double>();
        m.final_objective = j.at("final_objective").get<double>();
        m.converged = j.at("converged").get<bool>();
        m.iterations = j.at("iterations").get<std::size_t>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("manifest: ") + e.what());
    }
    return m;
}

RunManifest read_manifest(const std::filesystem::path& path) {
    return manifest_from_json(read_file(path));
}

void write_result(const FactorResult& result, const RunManifest& manifest,
                  const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw WriteFailure("cannot create '" + out_dir.string() +
                           "': " + ec.message());
    }
    write_matrix_csv(out_dir / "W.csv", result.W);
    write_matrix_csv(out_dir / "H.csv", result.H);

    std::string trace = "iteration,objective\n";
    for (const auto& pt : result.trace) {
        trace += std::to_string(pt.iteration);
        trace += ',';
        trace += format_double(pt.objective);
        trace += '\n';
    }
    write_file_atomic(out_dir / "trace.csv", trace);
    write_file_atomic(out_dir / "manifest.json", manifest_to_json(manifest));
}

}  // namespace dualnmf
