#pragma once

#include "dcforge/io.hpp"
#include "dcforge/verification.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dcforge::cli {

struct RunConfig {
    std::string subcommand;
    std::string in, query, out;
    std::uint64_t seed = 42;
    std::optional<double> tol;
    std::optional<int> samples;
    bool verify = false;
    bool dc = false;
    bool json = false;
    std::vector<std::string> measures;
    std::string penalty;
    double alpha = 0.5;
    double lambda = 0.5;
    double width = 10.0;
};

/// Exit codes: 0 all checks pass, 1 a check failed or the model was rejected, 2 input error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// The report object a subcommand produces (also written by --out).
io::Json execute(const RunConfig& cfg);

/// Fixed reference instances exercised by `verify-suite`, merged by name.
std::vector<CheckReport> verification_suite(std::uint64_t seed, std::optional<int> samples = std::nullopt,
                                            std::optional<double> tol = std::nullopt);

/// Fixed-width rendering of a report.
std::string format_table(const io::Json& report);

} // namespace dcforge::cli
