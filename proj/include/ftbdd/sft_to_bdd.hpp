#pragma once

#include <span>

#include "ftbdd/bdd.hpp"
#include "ftbdd/fault_tree.hpp"
#include "ftbdd/variable_order.hpp"

namespace ftbdd {

struct TranslationOptions {
    /// Keep every gate's BDD after its last parent has consumed it.
    bool cacheGates = false;
};

/// Manager whose variables are the basic events of `order`, level by level.
BddManager makeManager(FaultTree const& tree, VariableOrder const& order);

/// BDD of the top event of a static fault tree. Gates are translated once each, children
/// combined left to right. Throws std::invalid_argument for trees with dynamic nodes.
Bdd translate(FaultTree const& tree, VariableOrder const& order, BddManager& manager, TranslationOptions options = {});

/// BDD of an arbitrary node (and its sub-tree).
Bdd translateNode(FaultTree const& tree, NodeId node, VariableOrder const& order, BddManager& manager);

/// At-least-k-of-n over child BDDs via Shannon decomposition on the first child.
Bdd translateVot(BddManager& manager, unsigned threshold, std::span<Bdd const> children);

}  // namespace ftbdd
