#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "ftbdd/fault_tree.hpp"

namespace testing {

using ftbdd::FaultTree;
using ftbdd::NodeId;
using ftbdd::NodeType;

inline std::vector<NodeId> pickDistinct(std::vector<NodeId> const& pool, std::size_t count, std::mt19937_64& rng) {
    std::vector<NodeId> copy = pool;
    std::shuffle(copy.begin(), copy.end(), rng);
    copy.resize(std::min(count, copy.size()));
    return copy;
}

/// Random coherent static tree over `events` basic events. Gates are AND, OR and VOT; nodes are
/// shared between gates now and then. Every node is reachable from the top.
inline FaultTree randomStaticTree(std::mt19937_64& rng, std::size_t events, std::size_t gates, std::string const& prefix = "") {
    FaultTree tree;
    std::uniform_real_distribution<double> rate(0.05, 2.0);
    std::vector<NodeId> unused;
    std::vector<NodeId> all;
    for (std::size_t i = 0; i < events; ++i) {
        NodeId id = tree.addBasicEvent(prefix + "e" + std::to_string(i), rate(rng));
        unused.push_back(id);
        all.push_back(id);
    }
    std::shuffle(unused.begin(), unused.end(), rng);
    for (std::size_t g = 0; g < gates || unused.size() > 1; ++g) {
        bool const last = g + 1 >= gates && unused.size() <= 4;
        std::size_t arity = last ? std::max<std::size_t>(unused.size(), 2) : std::uniform_int_distribution<std::size_t>(2, 4)(rng);
        std::vector<NodeId> children;
        // Prefer nodes nobody uses yet, mixing in shared ones.
        while (children.size() < arity && !unused.empty()) {
            if (std::bernoulli_distribution(0.8)(rng) || children.size() + 1 == arity) {
                NodeId next = unused.back();
                unused.pop_back();
                if (std::find(children.begin(), children.end(), next) == children.end()) {
                    children.push_back(next);
                }
            } else {
                NodeId shared = all[std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(rng)];
                if (std::find(children.begin(), children.end(), shared) == children.end()) {
                    children.push_back(shared);
                }
            }
        }
        while (children.size() < 2) {
            NodeId shared = all[std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(rng)];
            if (std::find(children.begin(), children.end(), shared) == children.end()) {
                children.push_back(shared);
            }
        }
        std::string name = prefix + "g" + std::to_string(g);
        NodeId gate;
        switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
            case 0:
                gate = tree.addGate(name, NodeType::And, children);
                break;
            case 1:
                gate = tree.addGate(name, NodeType::Or, children);
                break;
            default:
                gate = tree.addVot(name, std::uniform_int_distribution<unsigned>(1, static_cast<unsigned>(children.size()))(rng), children);
                break;
        }
        all.push_back(gate);
        unused.insert(unused.begin() + static_cast<std::ptrdiff_t>(std::uniform_int_distribution<std::size_t>(0, unused.size())(rng)), gate);
    }
    tree.setTop(unused.front());
    return tree;
}

/// Random tree with every node type, used for format round trips. Ids follow no particular
/// structure; names may contain spaces.
inline FaultTree randomGalileoTree(std::mt19937_64& rng) {
    FaultTree tree;
    std::uniform_int_distribution<std::size_t> eventCount(2, 10);
    std::size_t const events = eventCount(rng);
    std::vector<NodeId> bes;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < events; ++i) {
        std::string name = (i % 3 == 0 ? "basic event " : "be") + std::to_string(i);
        if (std::bernoulli_distribution(0.2)(rng)) {
            bes.push_back(tree.addBasicEvent(name, ftbdd::ConstantProbability{unit(rng)}));
        } else {
            double dormancy = std::bernoulli_distribution(0.5)(rng) ? 1.0 : unit(rng);
            bes.push_back(tree.addBasicEvent(name, 1e-3 + unit(rng) * 5.0, dormancy));
        }
    }
    std::vector<NodeId> pool = bes;
    std::size_t const gateCount = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    NodeId top = 0;
    for (std::size_t g = 0; g < gateCount; ++g) {
        std::size_t arity = std::uniform_int_distribution<std::size_t>(2, std::min<std::size_t>(4, pool.size()))(rng);
        auto children = pickDistinct(pool, arity, rng);
        std::string name = "gate" + std::to_string(g);
        static constexpr NodeType kinds[] = {NodeType::And, NodeType::Or, NodeType::Vot, NodeType::Pand, NodeType::Por, NodeType::Spare};
        NodeType kind = kinds[std::uniform_int_distribution<int>(0, 5)(rng)];
        if (kind == NodeType::Vot) {
            top = tree.addVot(name, std::uniform_int_distribution<unsigned>(1, static_cast<unsigned>(children.size()))(rng), children);
        } else if (kind == NodeType::Spare) {
            static char const* const keywords[] = {"wsp", "csp", "hsp"};
            ftbdd::Node spare;
            spare.name = name;
            spare.type = kind;
            spare.children = children;
            spare.keyword = keywords[std::uniform_int_distribution<int>(0, 2)(rng)];
            top = tree.addNode(std::move(spare));
        } else {
            top = tree.addGate(name, kind, children);
        }
        pool.push_back(top);
    }
    // Make sure everything hangs below the top.
    std::vector<NodeId> orphans;
    auto parents = tree.parents();
    for (NodeId id = 0; id < tree.size(); ++id) {
        if (id != top && parents[id].empty()) {
            orphans.push_back(id);
        }
    }
    if (!orphans.empty()) {
        orphans.insert(orphans.begin(), top);
        top = tree.addGate("root", NodeType::Or, orphans);
    }
    tree.setTop(top);
    std::vector<NodeId> free = bes;
    std::shuffle(free.begin(), free.end(), rng);
    if (free.size() >= 2 && std::bernoulli_distribution(0.3)(rng)) {
        tree.addGate("sequence", NodeType::Seq, {free.back(), free[free.size() - 2]});
        free.resize(free.size() - 2);
    }
    if (free.size() >= 3 && std::bernoulli_distribution(0.5)(rng)) {
        double p = std::bernoulli_distribution(0.5)(rng) ? 1.0 : 0.01 + 0.98 * unit(rng);
        tree.addPdep("dependency", p, {free[0], free[1], free[2]});
    }
    return tree;
}

/// One block of a random dynamic tree, built on fresh basic events named after `prefix`.
inline NodeId randomBlock(FaultTree& tree, std::mt19937_64& rng, std::string const& prefix, std::size_t& budget) {
    std::uniform_real_distribution<double> rate(0.2, 2.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto be = [&](std::string const& name, double dormancy = 1.0) {
        --budget;
        return tree.addBasicEvent(prefix + name, rate(rng), dormancy);
    };
    int const kind = budget >= 3 ? std::uniform_int_distribution<int>(0, 8)(rng) : std::uniform_int_distribution<int>(0, 3)(rng);
    switch (kind) {
        case 0: {
            NodeId a = be("a");
            NodeId b = be("b");
            return tree.addGate(prefix + "pand", NodeType::Pand, {a, b});
        }
        case 1: {
            NodeId a = be("a");
            NodeId b = be("b");
            return tree.addGate(prefix + "por", NodeType::Por, {a, b});
        }
        case 2: {
            NodeId a = be("a");
            NodeId b = be("b", unit(rng));
            return tree.addGate(prefix + "spare", NodeType::Spare, {a, b});
        }
        case 3: {
            NodeId a = be("a");
            NodeId b = be("b");
            tree.addGate(prefix + "seq", NodeType::Seq, {a, b});
            return tree.addGate(prefix + "and", NodeType::And, {a, b});
        }
        case 4: {
            NodeId a = be("a");
            NodeId b = be("b");
            NodeId c = be("c");
            NodeId p = tree.addGate(prefix + "pand", NodeType::Pand, {a, b});
            return tree.addGate(prefix + "or", NodeType::Or, {p, c});
        }
        case 5: {
            NodeId trigger = be("t");
            NodeId a = be("a");
            NodeId b = be("b");
            double p = std::bernoulli_distribution(0.5)(rng) ? 1.0 : 0.2 + 0.6 * unit(rng);
            tree.addPdep(prefix + "dep", p, {trigger, a});
            NodeId inner = tree.addGate(prefix + "and", NodeType::And, {a, b});
            return tree.addGate(prefix + "or", NodeType::Or, {inner, trigger});
        }
        case 6: {
            NodeId a = be("a");
            NodeId b = be("b", unit(rng));
            NodeId c = be("c", unit(rng));
            NodeId spare = tree.addGate(prefix + "sparegate", NodeType::And, {b, c});
            return tree.addGate(prefix + "spare", NodeType::Spare, {a, spare});
        }
        case 7: {
            NodeId a = be("a");
            NodeId b = be("b");
            NodeId c = be("c");
            NodeId v = tree.addVot(prefix + "vot", 2, {a, b, c});
            NodeId d = be("d");
            return tree.addGate(prefix + "pand", NodeType::Pand, {d, v});
        }
        default: {
            std::size_t const n = std::min<std::size_t>(budget, 3);
            std::vector<NodeId> events;
            for (std::size_t i = 0; i < n; ++i) {
                events.push_back(be("s" + std::to_string(i)));
            }
            NodeType type = std::bernoulli_distribution(0.5)(rng) ? NodeType::And : NodeType::Or;
            return tree.addGate(prefix + "static", type, events);
        }
    }
}

/// Random dynamic tree with at most `maxEvents` basic events: a static top over independent
/// blocks, most of them dynamic. Occasionally a basic event is shared between two blocks, and
/// occasionally the top gate is itself dynamic.
inline FaultTree randomDynamicTree(std::mt19937_64& rng, std::size_t maxEvents = 14) {
    FaultTree tree;
    std::size_t budget = maxEvents;
    std::vector<NodeId> blocks;
    std::size_t const wanted = std::uniform_int_distribution<std::size_t>(2, 4)(rng);
    while (blocks.size() < wanted && budget >= 4) {
        blocks.push_back(randomBlock(tree, rng, "m" + std::to_string(blocks.size()) + "_", budget));
    }
    if (blocks.size() < 2) {
        blocks.push_back(tree.addBasicEvent("lone", 0.7));
        --budget;
    }
    if (budget > 0 && std::bernoulli_distribution(0.2)(rng)) {
        NodeId shared = tree.addBasicEvent("shared", 0.5);
        NodeId g0 = tree.addGate("join0", NodeType::Or, {blocks[0], shared});
        NodeId g1 = tree.addGate("join1", NodeType::And, {blocks[1], shared});
        blocks[0] = g0;
        blocks[1] = g1;
    }
    NodeId top;
    int const kind = std::uniform_int_distribution<int>(0, 9)(rng);
    if (kind < 4) {
        top = tree.addGate("top", NodeType::Or, blocks);
    } else if (kind < 7) {
        top = tree.addGate("top", NodeType::And, blocks);
    } else if (kind < 9) {
        top = tree.addVot("top", 2, blocks);
    } else {
        top = tree.addGate("top", NodeType::Pand, blocks);
    }
    tree.setTop(top);
    return tree;
}

}  // namespace testing
