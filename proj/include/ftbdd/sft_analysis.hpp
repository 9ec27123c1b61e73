#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ftbdd/bdd.hpp"
#include "ftbdd/fault_tree.hpp"
#include "ftbdd/variable_order.hpp"

namespace ftbdd {

/// Probabilities over a strictly increasing grid of time points.
struct TimeCurve {
    std::vector<double> times;
    std::vector<double> values;
};

/// `count` points spread uniformly over [0, horizon]; a single point sits at the horizon.
std::vector<double> uniformTimes(double horizon, std::size_t count);

using CutSet = std::vector<NodeId>;

struct CutSetOptions {
    /// Drop cut sets with more events than this.
    std::optional<std::size_t> maxOrder;
    /// Cap on the number of minimal solutions enumerated from the BDD.
    std::size_t solutionLimit = 1'000'000;
};

/// Minimal cut sets of a static tree, each listed in variable order. Enumeration order is
/// 1-edge-first depth-first over the minimal-solution BDD.
std::vector<CutSet> minimalCutSets(FaultTree const& tree, VariableOrder const& order, CutSetOptions const& options = {});

/// Distribution of each BDD level's basic event.
std::vector<FailureDistribution> levelDistributions(FaultTree const& tree, VariableOrder const& order);
/// Failure probability of each BDD level's basic event at time t.
std::vector<double> levelProbabilities(std::span<FailureDistribution const> distributions, double time);

/// Top-event probability of f when variable i fails independently with probability
/// `probabilities[i]`. One bottom-up Shannon pass.
double unreliability(BddManager const& manager, Bdd f, std::span<double const> probabilities);

/// Unreliability at every time point, evaluated `chunkSize` time points per BDD pass.
/// Each point is bitwise identical to the scalar unreliability() at that time.
TimeCurve unreliabilityCurve(BddManager const& manager, Bdd f, std::span<FailureDistribution const> distributions,
                             std::span<double const> times, std::size_t chunkSize = 1024);

/// P[F | e] - P[F | not e].
double birnbaum(BddManager& manager, Bdd f, std::uint32_t level, std::span<double const> probabilities);

enum class ImportanceMeasure {
    Birnbaum,
    CriticalImportance,
    VeselyFussell,
    RiskAchievementWorth,
    RiskReductionWorth,
};

std::string_view toString(ImportanceMeasure measure);
/// Accepts "birnbaum", "cif", "vf", "raw", "rrw" (and the long names); throws std::invalid_argument.
ImportanceMeasure parseImportanceMeasure(std::string_view text);

/// Importance of the basic event at `level`. Ratio measures throw UndefinedMeasure when their
/// denominator is zero.
///   CIF = BI * p(e) / U
///   VF  = P[some minimal cut set containing e has failed] / U
///   RAW = P[F | e] / U
///   RRW = U / P[F | not e]
double importance(BddManager& manager, Bdd f, std::uint32_t level, std::span<double const> probabilities, ImportanceMeasure measure);

struct MttfLimitOptions {
    /// Stop once one panel contributes less than this.
    double epsilon = 1e-12;
    /// Width of the first panel; each next panel is `growth` times wider.
    double initialStep = 1e-10;
    double growth = 10.0;
    std::size_t maxPanels = 200;
    /// Relative accuracy requested inside a panel (on top of epsilon / 10 absolute).
    double panelRelativeTolerance = 1e-10;
    std::size_t chunkSize = 1024;
};

/// Mean time to failure as the integral of the survival function over consecutive panels
/// [r_i, r_{i+1}], stopping at the first panel whose integral is below epsilon.
double mttfLimit(BddManager const& manager, Bdd f, std::span<FailureDistribution const> distributions, MttfLimitOptions const& options = {});

/// Mean time to failure via t = u / (1 - u) on [0, 1) with a fixed number of trapezoid samples.
double mttfSubstitution(BddManager const& manager, Bdd f, std::span<FailureDistribution const> distributions, std::size_t samples = 1'000'000,
                        std::size_t chunkSize = 1024);

}  // namespace ftbdd
