#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>

#include "dualnmf/types.hpp"

namespace testsupport {

inline double rel_err(double got, double expected) {
    const double scale = std::max(std::abs(expected), 1e-300);
    return std::abs(got - expected) / scale;
}

// Uniform double in [lo, hi) from the generator's top 53 bits.
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

inline dualnmf::NonNegMatrix random_matrix(std::mt19937_64& rng,
                                           dualnmf::Index rows,
                                           dualnmf::Index cols, double lo,
                                           double hi) {
    dualnmf::NonNegMatrix M(rows, cols);
    for (dualnmf::Index i = 0; i < M.size(); ++i) {
        M.data()[i] = uniform(rng, lo, hi);
    }
    return M;
}

struct CommandResult {
    int exit_code;
    std::string output;  // stdout only
};

// Runs a shell command and captures its standard output.
inline CommandResult run_command(const std::string& command) {
    FILE* pipe = popen(command.c_str(), "r");
    if (pipe == nullptr) {
        throw std::runtime_error("popen failed for: " + command);
    }
    std::string output;
    std::array<char, 4096> buf;
    while (std::fgets(buf.data(), buf.size(), pipe) != nullptr) {
        output += buf.data();
    }
    const int status = pclose(pipe);
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, output};
}

}  // namespace testsupport
