#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ftbdd::cli {

/// One `ftbdd analyze` invocation.
struct AnalysisRequest {
    /// Model path; "-" reads standard input.
    std::string input;
    /// mcs | unreliability | curve | importance | mttf
    std::string metric;

    double time = 1.0;
    double horizon = 10.0;
    std::size_t points = 100;
    std::string measure = "birnbaum";
    /// limit | substitution
    std::string method = "limit";
    double epsilon = 1e-12;
    double initialStep = 1e-10;
    std::size_t samples = 1'000'000;

    /// dfs | tdlr | input | path of an order file
    std::string ordering = "dfs";
    std::size_t chunkSize = 1024;
    bool modularise = true;
    bool cacheGates = false;
    std::optional<std::size_t> maxOrder;
    std::size_t maxSolutions = 1'000'000;
    std::size_t maxStates = 1'000'000;

    /// json | csv
    std::string format = "json";
    std::string dumpBdd;
    std::string dumpCtmc;
};

/// Exit status: 0 on success, 1 for bad input or usage, 2 when the analysis itself fails
/// (limits exceeded, no convergence, undefined measure).
int run(AnalysisRequest const& request, std::ostream& out, std::ostream& err);

/// Parses `ftbdd analyze ...` arguments (program name excluded) and runs the request.
int runCommandLine(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

}  // namespace ftbdd::cli
