#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ftbdd/fault_tree.hpp"
#include "ftbdd/sft_analysis.hpp"

namespace ftbdd {

/// Continuous-time Markov chain in compressed sparse row form. State 0 is the initial state.
/// Failed states (top event failed) have no outgoing transitions.
struct Ctmc {
    std::vector<std::size_t> rowStart{0};
    std::vector<std::uint32_t> targets;
    std::vector<double> rates;
    std::vector<bool> failed;
    /// Human-readable state descriptions; only filled when requested at build time.
    std::vector<std::string> labels;

    std::size_t stateCount() const {
        return failed.size();
    }
    std::size_t transitionCount() const {
        return targets.size();
    }
    double exitRate(std::size_t state) const;
};

struct CtmcOptions {
    std::size_t maxStates = 1'000'000;
    bool keepLabels = false;
};

/// Explores every basic-event failure order of a (sub-)tree breadth-first from the all-operational
/// state. One transition per operational basic event; its rate is the active rate, or the
/// dormant rate (omitted when zero) for events in unclaimed spare modules.
///
/// A failure is resolved atomically in waves. Each wave evaluates gates bottom-up, with SPAREs
/// claiming their leftmost available child (lower SPAREs first, then lower node id). PDEPs
/// whose trigger failed then fire; their dependents fail in the next wave, and outcomes of
/// probabilistic dependencies are folded into the rates. Activation is recomputed at the end.
/// Failures that would break a SEQ order are never generated.
///
/// Throws AnalysisError for non-exponential basic events and LimitExceeded past maxStates.
Ctmc buildCtmc(FaultTree const& tree, CtmcOptions const& options = {});

/// Poisson probabilities e^-q q^k / k! for k in [left, left + weights.size()), truncated so the
/// neglected mass on both sides is at most `tail`.
struct PoissonWeights {
    std::size_t left = 0;
    std::vector<double> weights;
};
PoissonWeights poissonWeights(double q, double tail = 1e-10);

/// Probability of being in a failed state at each time, by uniformization.
TimeCurve transientFailureProbability(Ctmc const& ctmc, std::span<double const> times, double tail = 1e-10);

/// Full transient state distribution at one time point.
std::vector<double> transientDistribution(Ctmc const& ctmc, double time, double tail = 1e-10);

/// One line per transition "src tgt rate", followed by "state <id> [failed] <label>" lines.
void writeCtmc(std::ostream& out, Ctmc const& ctmc);

}  // namespace ftbdd
