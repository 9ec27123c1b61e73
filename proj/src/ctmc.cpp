#include "ftbdd/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "ftbdd/errors.hpp"

namespace ftbdd {

double Ctmc::exitRate(std::size_t state) const {
    double sum = 0.0;
    for (std::size_t k = rowStart[state]; k < rowStart[state + 1]; ++k) {
        sum += rates[k];
    }
    return sum;
}

namespace {

constexpr std::uint8_t kOperational = 0;
constexpr std::uint8_t kFailed = 1;
constexpr std::uint8_t kFailSafe = 2;
constexpr std::uint8_t kNoClaim = 0xFF;

// A DFT state packed into bytes: node status, activation flags, SPARE claims, PDEP fired flags.
using State = std::string;

class Semantics {
public:
    explicit Semantics(FaultTree const& tree) : tree_(tree), n_(tree.size()) {
        for (NodeId id = 0; id < n_; ++id) {
            auto const& node = tree.node(id);
            if (node.type == NodeType::BasicEvent) {
                if (!node.distribution || !std::holds_alternative<ExponentialDistribution>(*node.distribution)) {
                    throw AnalysisError("basic event '" + node.name + "' is not exponentially distributed; Markov analysis needs rates");
                }
            } else if (node.type == NodeType::Spare) {
                if (node.children.size() >= kNoClaim) {
                    throw AnalysisError("SPARE '" + node.name + "' has too many children");
                }
                spareIndex_[id] = spares_.size();
                spares_.push_back(id);
            } else if (node.type == NodeType::Pdep) {
                pdeps_.push_back(id);
            }
        }
        activeOffset_ = n_;
        claimOffset_ = 2 * n_;
        firedOffset_ = claimOffset_ + spares_.size();
        size_ = firedOffset_ + pdeps_.size();

        seqPredecessor_.resize(n_);
        for (auto const& node : tree.nodes()) {
            if (node.type == NodeType::Seq) {
                for (std::size_t i = 1; i < node.children.size(); ++i) {
                    seqPredecessor_[node.children[i]].push_back(node.children[i - 1]);
                }
            }
        }
        computeEvaluationOrder();
        computeSpareModules();
    }

    State initial() const {
        State s(size_, '\0');
        for (std::size_t i = 0; i < spares_.size(); ++i) {
            s[claimOffset_ + i] = static_cast<char>(kNoClaim);
        }
        evaluate(s);
        activate(s);
        return s;
    }

    bool failed(State const& s) const {
        return status(s, tree_.top()) == kFailed;
    }

    /// Successor states with their rates; equal targets are not merged here.
    void successors(State const& s, std::vector<std::pair<State, double>>& out) const {
        out.clear();
        for (NodeId id = 0; id < n_; ++id) {
            auto const& node = tree_.node(id);
            if (node.type != NodeType::BasicEvent || status(s, id) != kOperational) {
                continue;
            }
            if (std::any_of(seqPredecessor_[id].begin(), seqPredecessor_[id].end(), [&](NodeId p) { return status(s, p) != kFailed; })) {
                continue;
            }
            auto const& exp = std::get<ExponentialDistribution>(*node.distribution);
            double const rate = flag(s, activeOffset_ + id) ? exp.rate : exp.dormancy * exp.rate;
            if (!(rate > 0.0)) {
                continue;
            }
            for (auto& [weight, next] : resolve(s, id)) {
                out.emplace_back(std::move(next), rate * weight);
            }
        }
    }

    std::string label(State const& s) const {
        std::string failedList;
        std::string failSafe;
        std::string dormant;
        for (NodeId id = 0; id < n_; ++id) {
            auto const& name = tree_.node(id).name;
            if (status(s, id) == kFailed) {
                failedList += (failedList.empty() ? "" : ",") + name;
            } else if (status(s, id) == kFailSafe) {
                failSafe += (failSafe.empty() ? "" : ",") + name;
            }
            if (tree_.node(id).type == NodeType::BasicEvent && !flag(s, activeOffset_ + id)) {
                dormant += (dormant.empty() ? "" : ",") + name;
            }
        }
        std::string claims;
        for (std::size_t i = 0; i < spares_.size(); ++i) {
            auto const claim = static_cast<std::uint8_t>(s[claimOffset_ + i]);
            if (claim != kNoClaim) {
                auto const& spare = tree_.node(spares_[i]);
                claims += (claims.empty() ? "" : ",") + spare.name + "->" + tree_.node(spare.children[claim]).name;
            }
        }
        return "failed={" + failedList + "} failsafe={" + failSafe + "} dormant={" + dormant + "} claims={" + claims + "}";
    }

private:
    std::uint8_t status(State const& s, NodeId id) const {
        return static_cast<std::uint8_t>(s[id]);
    }
    static bool flag(State const& s, std::size_t index) {
        return s[index] != '\0';
    }
    static void set(State& s, std::size_t index, std::uint8_t value) {
        s[index] = static_cast<char>(value);
    }

    // Gates ordered by height above the leaves, then by id. The order only depends on the sub-tree
    // below each gate, so a module sees the same order on its own as inside the whole tree.
    void computeEvaluationOrder() {
        std::vector<int> height(n_, -1);
        std::vector<std::pair<NodeId, std::size_t>> stack;
        for (NodeId start = 0; start < n_; ++start) {
            if (height[start] >= 0) {
                continue;
            }
            stack.emplace_back(start, 0);
            while (!stack.empty()) {
                auto& [id, next] = stack.back();
                auto const& children = tree_.node(id).children;
                if (next < children.size()) {
                    NodeId child = children[next++];
                    if (height[child] < 0) {
                        stack.emplace_back(child, 0);
                    }
                    continue;
                }
                int h = 0;
                for (NodeId child : children) {
                    h = std::max(h, height[child] + 1);
                }
                height[id] = h;
                stack.pop_back();
            }
        }
        for (NodeId id = 0; id < n_; ++id) {
            auto type = tree_.node(id).type;
            if (type != NodeType::BasicEvent && !isRestriction(type)) {
                evaluationOrder_.push_back(id);
            }
        }
        std::stable_sort(evaluationOrder_.begin(), evaluationOrder_.end(), [&](NodeId a, NodeId b) { return height[a] < height[b]; });
    }

    void computeSpareModules() {
        inSpareModule_.assign(n_, false);
        std::vector<NodeId> stack;
        for (NodeId spare : spares_) {
            for (NodeId child : tree_.node(spare).children) {
                stack.push_back(child);
            }
        }
        while (!stack.empty()) {
            NodeId id = stack.back();
            stack.pop_back();
            if (inSpareModule_[id]) {
                continue;
            }
            inSpareModule_[id] = true;
            if (isRestriction(tree_.node(id).type)) {
                continue;
            }
            for (NodeId child : tree_.node(id).children) {
                stack.push_back(child);
            }
        }
    }

    bool claimedByOther(State const& s, std::size_t spare, NodeId child) const {
        for (std::size_t i = 0; i < spares_.size(); ++i) {
            if (i == spare) {
                continue;
            }
            auto const claim = static_cast<std::uint8_t>(s[claimOffset_ + i]);
            if (claim != kNoClaim && tree_.node(spares_[i]).children[claim] == child) {
                return true;
            }
        }
        return false;
    }

    /// One bottom-up pass of gate evaluation and SPARE claiming.
    void evaluate(State& s) const {
        for (NodeId id : evaluationOrder_) {
            auto const& node = tree_.node(id);
            if (status(s, id) != kOperational) {
                continue;
            }
            auto const& children = node.children;
            auto isFailed = [&](NodeId c) { return status(s, c) == kFailed; };
            std::size_t const failedCount = static_cast<std::size_t>(std::count_if(children.begin(), children.end(), isFailed));
            switch (node.type) {
                case NodeType::And:
                    if (failedCount == children.size()) {
                        set(s, id, kFailed);
                    }
                    break;
                case NodeType::Or:
                    if (failedCount > 0) {
                        set(s, id, kFailed);
                    }
                    break;
                case NodeType::Vot:
                    if (failedCount >= node.threshold) {
                        set(s, id, kFailed);
                    }
                    break;
                case NodeType::Pand: {
                    bool outOfOrder = false;
                    bool gap = false;
                    for (NodeId c : children) {
                        if (isFailed(c)) {
                            outOfOrder = outOfOrder || gap;
                        } else {
                            gap = true;
                        }
                    }
                    if (outOfOrder) {
                        set(s, id, kFailSafe);
                    } else if (failedCount == children.size()) {
                        set(s, id, kFailed);
                    }
                    break;
                }
                case NodeType::Por:
                    if (isFailed(children.front())) {
                        set(s, id, kFailed);
                    } else if (failedCount > 0) {
                        set(s, id, kFailSafe);
                    }
                    break;
                case NodeType::Spare: {
                    std::size_t const spare = spareIndex_.at(id);
                    auto const claim = static_cast<std::uint8_t>(s[claimOffset_ + spare]);
                    if (claim != kNoClaim && !isFailed(children[claim])) {
                        break;
                    }
                    std::uint8_t next = kNoClaim;
                    for (std::size_t pos = 0; pos < children.size(); ++pos) {
                        if (!isFailed(children[pos]) && !claimedByOther(s, spare, children[pos])) {
                            next = static_cast<std::uint8_t>(pos);
                            break;
                        }
                    }
                    set(s, claimOffset_ + spare, next);
                    if (next == kNoClaim) {
                        set(s, id, kFailed);
                    }
                    break;
                }
                default:
                    break;
            }
        }
    }

    /// Activation is monotone: a component once activated stays active.
    void activate(State& s) const {
        std::vector<bool> reached(n_, false);
        std::vector<NodeId> stack{tree_.top()};
        while (!stack.empty()) {
            NodeId id = stack.back();
            stack.pop_back();
            if (reached[id]) {
                continue;
            }
            reached[id] = true;
            auto const& node = tree_.node(id);
            if (isRestriction(node.type)) {
                continue;
            }
            if (node.type == NodeType::Spare) {
                auto const claim = static_cast<std::uint8_t>(s[claimOffset_ + spareIndex_.at(id)]);
                if (claim != kNoClaim) {
                    stack.push_back(node.children[claim]);
                }
                continue;
            }
            for (NodeId child : node.children) {
                stack.push_back(child);
            }
        }
        for (NodeId id = 0; id < n_; ++id) {
            if (reached[id] || !inSpareModule_[id]) {
                set(s, activeOffset_ + id, 1);
            }
        }
    }

    std::vector<std::pair<double, State>> resolve(State const& from, NodeId event) const {
        std::vector<std::pair<double, State>> pending;
        std::vector<std::pair<double, State>> done;
        State start = from;
        set(start, event, kFailed);
        pending.emplace_back(1.0, std::move(start));
        while (!pending.empty()) {
            auto [weight, s] = std::move(pending.back());
            pending.pop_back();
            evaluate(s);

            std::vector<NodeId> certain;
            std::vector<std::pair<NodeId, double>> uncertain;
            for (std::size_t i = 0; i < pdeps_.size(); ++i) {
                auto const& pdep = tree_.node(pdeps_[i]);
                if (flag(s, firedOffset_ + i) || status(s, pdep.children.front()) != kFailed) {
                    continue;
                }
                set(s, firedOffset_ + i, 1);
                for (std::size_t c = 1; c < pdep.children.size(); ++c) {
                    NodeId dependent = pdep.children[c];
                    if (status(s, dependent) != kOperational) {
                        continue;
                    }
                    if (pdep.dependencyProbability >= 1.0) {
                        certain.push_back(dependent);
                    } else {
                        uncertain.emplace_back(dependent, pdep.dependencyProbability);
                    }
                }
            }
            if (certain.empty() && uncertain.empty()) {
                activate(s);
                done.emplace_back(weight, std::move(s));
                continue;
            }
            if (uncertain.size() > 20) {
                throw LimitExceeded("too many simultaneous probabilistic dependencies");
            }
            for (std::size_t mask = 0; mask < (std::size_t{1} << uncertain.size()); ++mask) {
                State next = s;
                double w = weight;
                for (NodeId dependent : certain) {
                    set(next, dependent, kFailed);
                }
                for (std::size_t k = 0; k < uncertain.size(); ++k) {
                    if (mask & (std::size_t{1} << k)) {
                        w *= uncertain[k].second;
                        set(next, uncertain[k].first, kFailed);
                    } else {
                        w *= 1.0 - uncertain[k].second;
                    }
                }
                pending.emplace_back(w, std::move(next));
            }
        }
        return done;
    }

    FaultTree const& tree_;
    std::size_t n_;
    std::size_t activeOffset_ = 0;
    std::size_t claimOffset_ = 0;
    std::size_t firedOffset_ = 0;
    std::size_t size_ = 0;
    std::vector<NodeId> spares_;
    std::unordered_map<NodeId, std::size_t> spareIndex_;
    std::vector<NodeId> pdeps_;
    std::vector<std::vector<NodeId>> seqPredecessor_;
    std::vector<NodeId> evaluationOrder_;
    std::vector<bool> inSpareModule_;
};

}  // namespace

Ctmc buildCtmc(FaultTree const& tree, CtmcOptions const& options) {
    Semantics semantics(tree);
    std::unordered_map<State, std::uint32_t> index;
    std::vector<State> states;
    auto intern = [&](State state) -> std::uint32_t {
        auto [it, inserted] = index.try_emplace(std::move(state), static_cast<std::uint32_t>(states.size()));
        if (inserted) {
            if (states.size() >= options.maxStates) {
                throw LimitExceeded("state space exceeds " + std::to_string(options.maxStates) + " states");
            }
            states.push_back(it->first);
        }
        return it->second;
    };
    intern(semantics.initial());

    Ctmc ctmc;
    std::vector<std::pair<State, double>> successors;
    std::map<std::uint32_t, double> row;
    for (std::size_t current = 0; current < states.size(); ++current) {
        bool const isFailed = semantics.failed(states[current]);
        ctmc.failed.push_back(isFailed);
        if (options.keepLabels) {
            ctmc.labels.push_back(semantics.label(states[current]));
        }
        row.clear();
        if (!isFailed) {
            semantics.successors(states[current], successors);
            for (auto& [next, rate] : successors) {
                row[intern(std::move(next))] += rate;
            }
        }
        for (auto const& [target, rate] : row) {
            ctmc.targets.push_back(target);
            ctmc.rates.push_back(rate);
        }
        ctmc.rowStart.push_back(ctmc.targets.size());
    }
    return ctmc;
}

PoissonWeights poissonWeights(double q, double tail) {
    PoissonWeights result;
    if (!(q >= 0.0) || !std::isfinite(q)) {
        throw std::invalid_argument("Poisson parameter must be finite and nonnegative");
    }
    if (q == 0.0) {
        result.weights = {1.0};
        return result;
    }
    auto const mode = static_cast<std::size_t>(std::floor(q));
    double const modeWeight = std::exp(-q + static_cast<double>(mode) * std::log(q) - std::lgamma(static_cast<double>(mode) + 1.0));
    double const half = tail / 2.0;

    std::vector<double> below;
    double w = modeWeight;
    for (std::size_t k = mode; k > 0;) {
        // Remaining left mass is bounded by a geometric series with ratio k / q < 1.
        double const ratio = static_cast<double>(k) / q;
        if (ratio < 1.0 && w * ratio / (1.0 - ratio) <= half) {
            break;
        }
        w *= ratio;
        --k;
        below.push_back(w);
    }
    result.left = mode - below.size();
    result.weights.assign(below.rbegin(), below.rend());
    result.weights.push_back(modeWeight);
    w = modeWeight;
    for (std::size_t k = mode;; ++k) {
        double const ratio = q / static_cast<double>(k + 2);
        if (ratio < 1.0 && w * (q / static_cast<double>(k + 1)) / (1.0 - ratio) <= half) {
            break;
        }
        w *= q / static_cast<double>(k + 1);
        result.weights.push_back(w);
    }
    return result;
}

namespace {

double maxExitRate(Ctmc const& ctmc) {
    double rate = 0.0;
    for (std::size_t s = 0; s < ctmc.stateCount(); ++s) {
        rate = std::max(rate, ctmc.exitRate(s));
    }
    return rate;
}

/// next = current * (I + Q / rate)
void uniformizedStep(Ctmc const& ctmc, double rate, std::vector<double> const& current, std::vector<double>& next) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < ctmc.stateCount(); ++s) {
        double const mass = current[s];
        if (mass == 0.0) {
            continue;
        }
        double leaving = 0.0;
        for (std::size_t k = ctmc.rowStart[s]; k < ctmc.rowStart[s + 1]; ++k) {
            double const moved = mass * (ctmc.rates[k] / rate);
            next[ctmc.targets[k]] += moved;
            leaving += moved;
        }
        next[s] += mass - leaving;
    }
}

void checkTimes(std::span<double const> times) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0) || !std::isfinite(times[i]) || (i > 0 && times[i] < times[i - 1])) {
            throw std::invalid_argument("time points must be finite, nonnegative and increasing");
        }
    }
}

}  // namespace

TimeCurve transientFailureProbability(Ctmc const& ctmc, std::span<double const> times, double tail) {
    if (ctmc.stateCount() == 0) {
        throw AnalysisError("empty Markov chain");
    }
    checkTimes(times);
    TimeCurve curve;
    curve.times.assign(times.begin(), times.end());
    curve.values.assign(times.size(), ctmc.failed[0] ? 1.0 : 0.0);
    double const rate = maxExitRate(ctmc);
    if (rate == 0.0 || times.empty()) {
        return curve;
    }

    std::vector<PoissonWeights> weights;
    weights.reserve(times.size());
    std::size_t steps = 0;
    for (double t : times) {
        weights.push_back(poissonWeights(rate * t, tail));
        steps = std::max(steps, weights.back().left + weights.back().weights.size());
    }

    // Failed mass after k uniformized steps; failed states are absorbing, so this is all we need.
    std::vector<double> failedMass;
    failedMass.reserve(steps);
    std::vector<double> current(ctmc.stateCount(), 0.0);
    std::vector<double> next(ctmc.stateCount(), 0.0);
    current[0] = 1.0;
    for (std::size_t k = 0; k < steps; ++k) {
        double mass = 0.0;
        for (std::size_t s = 0; s < ctmc.stateCount(); ++s) {
            if (ctmc.failed[s]) {
                mass += current[s];
            }
        }
        failedMass.push_back(mass);
        if (k + 1 < steps) {
            uniformizedStep(ctmc, rate, current, next);
            current.swap(next);
        }
    }

    for (std::size_t i = 0; i < times.size(); ++i) {
        auto const& w = weights[i];
        double value = 0.0;
        for (std::size_t j = 0; j < w.weights.size(); ++j) {
            value += w.weights[j] * failedMass[w.left + j];
        }
        curve.values[i] = std::clamp(value, 0.0, 1.0);
    }
    return curve;
}

std::vector<double> transientDistribution(Ctmc const& ctmc, double time, double tail) {
    if (ctmc.stateCount() == 0) {
        throw AnalysisError("empty Markov chain");
    }
    double const t[] = {time};
    checkTimes(t);
    std::vector<double> result(ctmc.stateCount(), 0.0);
    double const rate = maxExitRate(ctmc);
    if (rate == 0.0) {
        result[0] = 1.0;
        return result;
    }
    auto const w = poissonWeights(rate * time, tail);
    std::vector<double> current(ctmc.stateCount(), 0.0);
    std::vector<double> next(ctmc.stateCount(), 0.0);
    current[0] = 1.0;
    for (std::size_t k = 0; k < w.left + w.weights.size(); ++k) {
        if (k >= w.left) {
            double const weight = w.weights[k - w.left];
            for (std::size_t s = 0; s < result.size(); ++s) {
                result[s] += weight * current[s];
            }
        }
        uniformizedStep(ctmc, rate, current, next);
        current.swap(next);
    }
    return result;
}

void writeCtmc(std::ostream& out, Ctmc const& ctmc) {
    auto const precision = out.precision(17);
    for (std::size_t s = 0; s < ctmc.stateCount(); ++s) {
        for (std::size_t k = ctmc.rowStart[s]; k < ctmc.rowStart[s + 1]; ++k) {
            out << s << " " << ctmc.targets[k] << " " << ctmc.rates[k] << "\n";
        }
    }
    for (std::size_t s = 0; s < ctmc.stateCount(); ++s) {
        out << "state " << s << (ctmc.failed[s] ? " failed" : "");
        if (s < ctmc.labels.size()) {
            out << " " << ctmc.labels[s];
        }
        out << "\n";
    }
    out.precision(precision);
}

}  // namespace ftbdd
