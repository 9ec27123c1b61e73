#include "ftbdd/sft_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "ftbdd/errors.hpp"
#include "ftbdd/sft_to_bdd.hpp"

namespace ftbdd {

std::vector<double> uniformTimes(double horizon, std::size_t count) {
    if (count == 0) {
        throw std::invalid_argument("at least one time point is required");
    }
    if (!(horizon >= 0.0)) {
        throw std::invalid_argument("horizon must be nonnegative");
    }
    if (count == 1) {
        return {horizon};
    }
    std::vector<double> times(count);
    for (std::size_t i = 0; i < count; ++i) {
        times[i] = horizon * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return times;
}

std::vector<CutSet> minimalCutSets(FaultTree const& tree, VariableOrder const& order, CutSetOptions const& options) {
    BddManager manager = makeManager(tree, order);
    Bdd top = translate(tree, order, manager);
    Bdd minimal = manager.minsol(top);
    auto solutions = manager.enumerate_solutions(minimal, options.solutionLimit);
    std::vector<CutSet> result;
    result.reserve(solutions.size());
    for (auto const& solution : solutions) {
        if (options.maxOrder && solution.size() > *options.maxOrder) {
            continue;
        }
        CutSet set;
        set.reserve(solution.size());
        for (auto level : solution) {
            set.push_back(order.at(level));
        }
        result.push_back(std::move(set));
    }
    return result;
}

std::vector<FailureDistribution> levelDistributions(FaultTree const& tree, VariableOrder const& order) {
    std::vector<FailureDistribution> result;
    result.reserve(order.size());
    for (NodeId id : order.events()) {
        result.push_back(tree.node(id).distribution.value());
    }
    return result;
}

std::vector<double> levelProbabilities(std::span<FailureDistribution const> distributions, double time) {
    std::vector<double> result;
    result.reserve(distributions.size());
    for (auto const& distribution : distributions) {
        result.push_back(failureProbability(distribution, time));
    }
    return result;
}

namespace {

void requireCoverage(BddManager const& manager, std::size_t provided) {
    if (provided < manager.variableCount()) {
        throw std::invalid_argument("probabilities cover " + std::to_string(provided) + " of " + std::to_string(manager.variableCount()) +
                                    " variables");
    }
}

}  // namespace

double unreliability(BddManager const& manager, Bdd f, std::span<double const> probabilities) {
    requireCoverage(manager, probabilities.size());
    if (f.isTerminal()) {
        return f.isOne() ? 1.0 : 0.0;
    }
    auto const order = manager.topologicalOrder(f);
    std::unordered_map<std::uint32_t, double> value;
    value.reserve(order.size() + 2);
    value[0] = 0.0;
    value[1] = 1.0;
    for (auto node : order) {
        double const p = probabilities[manager.levelOf(node)];
        value[node] = p * value[manager.highOf(node)] + (1.0 - p) * value[manager.lowOf(node)];
    }
    return value[f.index()];
}

TimeCurve unreliabilityCurve(BddManager const& manager, Bdd f, std::span<FailureDistribution const> distributions, std::span<double const> times,
                             std::size_t chunkSize) {
    requireCoverage(manager, distributions.size());
    if (times.empty()) {
        throw std::invalid_argument("time grid is empty");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0) || (i > 0 && !(times[i] > times[i - 1]))) {
            throw std::invalid_argument("time points must be nonnegative and strictly increasing");
        }
    }
    if (chunkSize == 0) {
        throw std::invalid_argument("chunk size must be positive");
    }

    TimeCurve curve;
    curve.times.assign(times.begin(), times.end());
    curve.values.resize(times.size());
    if (f.isTerminal()) {
        std::fill(curve.values.begin(), curve.values.end(), f.isOne() ? 1.0 : 0.0);
        return curve;
    }

    auto const order = manager.topologicalOrder(f);
    // Keep the per-node value table bounded; the chunking does not change any single result.
    constexpr std::size_t kMaxCells = std::size_t{1} << 24;
    std::size_t const chunk = std::max<std::size_t>(1, std::min(chunkSize, kMaxCells / (order.size() + 2)));

    // Slot 0 and 1 hold the terminals, internal node k of `order` lives in slot k + 2.
    std::unordered_map<std::uint32_t, std::size_t> slot;
    slot.reserve(order.size() + 2);
    slot[0] = 0;
    slot[1] = 1;
    for (std::size_t k = 0; k < order.size(); ++k) {
        slot[order[k]] = k + 2;
    }
    struct Step {
        std::uint32_t level;
        std::size_t high;
        std::size_t low;
    };
    std::vector<Step> steps;
    steps.reserve(order.size());
    std::vector<bool> levelUsed(manager.variableCount(), false);
    for (auto node : order) {
        steps.push_back({manager.levelOf(node), slot[manager.highOf(node)], slot[manager.lowOf(node)]});
        levelUsed[manager.levelOf(node)] = true;
    }

    std::vector<double> table((order.size() + 2) * chunk);
    std::vector<double> probs(manager.variableCount() * chunk);
    for (std::size_t begin = 0; begin < times.size(); begin += chunk) {
        std::size_t const width = std::min(chunk, times.size() - begin);
        for (std::uint32_t level = 0; level < manager.variableCount(); ++level) {
            if (!levelUsed[level]) {
                continue;
            }
            double* row = probs.data() + level * chunk;
            for (std::size_t j = 0; j < width; ++j) {
                row[j] = failureProbability(distributions[level], times[begin + j]);
            }
        }
        std::fill_n(table.data(), chunk, 0.0);
        std::fill_n(table.data() + chunk, chunk, 1.0);
        for (std::size_t k = 0; k < steps.size(); ++k) {
            auto const& step = steps[k];
            double const* p = probs.data() + step.level * chunk;
            double const* hi = table.data() + step.high * chunk;
            double const* lo = table.data() + step.low * chunk;
            double* out = table.data() + (k + 2) * chunk;
            for (std::size_t j = 0; j < width; ++j) {
                out[j] = p[j] * hi[j] + (1.0 - p[j]) * lo[j];
            }
        }
        double const* root = table.data() + slot[f.index()] * chunk;
        std::copy_n(root, width, curve.values.begin() + static_cast<std::ptrdiff_t>(begin));
    }
    return curve;
}

double birnbaum(BddManager& manager, Bdd f, std::uint32_t level, std::span<double const> probabilities) {
    if (level >= manager.variableCount()) {
        throw std::out_of_range("unknown basic event level " + std::to_string(level));
    }
    double const failed = unreliability(manager, manager.restrict(f, level, true), probabilities);
    double const working = unreliability(manager, manager.restrict(f, level, false), probabilities);
    return failed - working;
}

std::string_view toString(ImportanceMeasure measure) {
    switch (measure) {
        case ImportanceMeasure::Birnbaum:
            return "birnbaum";
        case ImportanceMeasure::CriticalImportance:
            return "cif";
        case ImportanceMeasure::VeselyFussell:
            return "vf";
        case ImportanceMeasure::RiskAchievementWorth:
            return "raw";
        case ImportanceMeasure::RiskReductionWorth:
            return "rrw";
    }
    return "?";
}

ImportanceMeasure parseImportanceMeasure(std::string_view text) {
    if (text == "birnbaum" || text == "bi") {
        return ImportanceMeasure::Birnbaum;
    }
    if (text == "cif" || text == "critical") {
        return ImportanceMeasure::CriticalImportance;
    }
    if (text == "vf" || text == "vesely-fussell") {
        return ImportanceMeasure::VeselyFussell;
    }
    if (text == "raw") {
        return ImportanceMeasure::RiskAchievementWorth;
    }
    if (text == "rrw") {
        return ImportanceMeasure::RiskReductionWorth;
    }
    throw std::invalid_argument("unknown importance measure '" + std::string(text) + "'");
}

double importance(BddManager& manager, Bdd f, std::uint32_t level, std::span<double const> probabilities, ImportanceMeasure measure) {
    if (level >= manager.variableCount()) {
        throw std::out_of_range("unknown basic event level " + std::to_string(level));
    }
    if (measure == ImportanceMeasure::Birnbaum) {
        return birnbaum(manager, f, level, probabilities);
    }
    double const total = unreliability(manager, f, probabilities);
    auto requirePositive = [&](double denominator, char const* what) {
        if (!(denominator > 0.0)) {
            throw UndefinedMeasure(std::string(toString(measure)) + " undefined for '" + manager.variableName(level) + "': " + what + " is zero");
        }
    };
    switch (measure) {
        case ImportanceMeasure::CriticalImportance:
            requirePositive(total, "unreliability");
            return birnbaum(manager, f, level, probabilities) * probabilities[level] / total;
        case ImportanceMeasure::VeselyFussell: {
            requirePositive(total, "unreliability");
            Bdd containing = manager.pathsContaining(manager.minsol(f), level);
            return unreliability(manager, manager.upwardClosure(containing), probabilities) / total;
        }
        case ImportanceMeasure::RiskAchievementWorth:
            requirePositive(total, "unreliability");
            return unreliability(manager, manager.restrict(f, level, true), probabilities) / total;
        case ImportanceMeasure::RiskReductionWorth: {
            double const working = unreliability(manager, manager.restrict(f, level, false), probabilities);
            requirePositive(working, "P[F | not e]");
            return total / working;
        }
        case ImportanceMeasure::Birnbaum:
            break;
    }
    return 0.0;
}

namespace {

void requireExponential(std::span<FailureDistribution const> distributions) {
    for (auto const& distribution : distributions) {
        if (!std::holds_alternative<ExponentialDistribution>(distribution)) {
            throw AnalysisError("MTTF requires exponentially distributed basic events");
        }
    }
}

void requireEventualFailure(Bdd f) {
    if (f.isZero()) {
        throw AnalysisError("the top event can never fail; MTTF is infinite");
    }
}

/// Survival probability at each of the given (strictly increasing) times.
std::vector<double> survival(BddManager const& manager, Bdd f, std::span<FailureDistribution const> distributions, std::span<double const> times,
                             std::size_t chunkSize) {
    auto curve = unreliabilityCurve(manager, f, distributions, times, chunkSize);
    for (auto& v : curve.values) {
        v = 1.0 - v;
    }
    return std::move(curve.values);
}

}  // namespace

double mttfLimit(BddManager const& manager, Bdd f, std::span<FailureDistribution const> distributions, MttfLimitOptions const& options) {
    requireExponential(distributions);
    requireEventualFailure(f);
    if (!(options.initialStep > 0.0) || !(options.growth >= 1.0) || !(options.epsilon > 0.0)) {
        throw std::invalid_argument("invalid MTTF panel parameters");
    }
    constexpr std::size_t kMaxRefinements = 24;

    double total = 0.0;
    double start = 0.0;
    double width = options.initialStep;
    for (std::size_t panel = 0; panel < options.maxPanels; ++panel) {
        double const end = start + width;
        // Composite trapezoid with interval doubling; Richardson estimate as stopping test.
        std::vector<double> ends{start, end};
        auto values = survival(manager, f, distributions, ends, options.chunkSize);
        std::size_t intervals = 1;
        double sum = 0.5 * (values[0] + values[1]);
        double coarse = width * sum;
        double estimate = coarse;
        for (std::size_t refinement = 0; refinement < kMaxRefinements; ++refinement) {
            double const h = width / static_cast<double>(intervals);
            std::vector<double> midpoints(intervals);
            for (std::size_t i = 0; i < intervals; ++i) {
                midpoints[i] = start + (static_cast<double>(i) + 0.5) * h;
            }
            auto mids = survival(manager, f, distributions, midpoints, options.chunkSize);
            for (double v : mids) {
                sum += v;
            }
            intervals *= 2;
            double const fine = sum * (width / static_cast<double>(intervals));
            double const error = std::abs(fine - coarse) / 3.0;
            estimate = fine + (fine - coarse) / 3.0;
            if (intervals >= 4 && error <= std::max(options.epsilon / 10.0, options.panelRelativeTolerance * std::abs(fine))) {
                break;
            }
            coarse = fine;
        }
        total += estimate;
        if (estimate < options.epsilon) {
            return total;
        }
        start = end;
        width *= options.growth;
    }
    throw LimitExceeded("MTTF did not converge within " + std::to_string(options.maxPanels) + " panels");
}

double mttfSubstitution(BddManager const& manager, Bdd f, std::span<FailureDistribution const> distributions, std::size_t samples,
                        std::size_t chunkSize) {
    requireExponential(distributions);
    requireEventualFailure(f);
    if (samples < 2) {
        throw std::invalid_argument("at least two samples are required");
    }
    double const h = 1.0 / static_cast<double>(samples);
    std::vector<double> times(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        double const u = static_cast<double>(i) * h;
        times[i] = u / (1.0 - u);
    }
    auto values = survival(manager, f, distributions, times, chunkSize);
    // g(u) = R(u / (1 - u)) / (1 - u)^2; g(1) = 0 because R decays exponentially.
    double sum = 0.5 * values[0];
    for (std::size_t i = 1; i < samples; ++i) {
        double const u = static_cast<double>(i) * h;
        double const w = 1.0 - u;
        sum += values[i] / (w * w);
    }
    return sum * h;
}

}  // namespace ftbdd
