#pragma once

#include <span>
#include <string>
#include <vector>

#include "ftbdd/fault_tree.hpp"

namespace ftbdd {

/// A total order over the basic events of one tree. Position i is BDD level i.
class VariableOrder {
public:
    VariableOrder() = default;
    /// Throws std::invalid_argument unless `order` is a permutation of the tree's basic events.
    VariableOrder(FaultTree const& tree, std::vector<NodeId> order);

    std::vector<NodeId> const& events() const {
        return events_;
    }
    std::size_t size() const {
        return events_.size();
    }
    NodeId at(std::size_t level) const {
        return events_.at(level);
    }
    /// BDD level of a basic event; throws std::out_of_range for nodes outside the order.
    std::uint32_t levelOf(NodeId event) const;
    std::vector<std::string> names(FaultTree const& tree) const;

private:
    std::vector<NodeId> events_;
    std::vector<std::uint32_t> levels_;
};

/// Basic events in first-visit order of a depth-first traversal from the top.
VariableOrder dfsOrder(FaultTree const& tree);
/// Basic events by breadth-first level from the top, left to right within a level.
VariableOrder tdlrOrder(FaultTree const& tree);
/// Explicit order by name. Missing and foreign names are reported by name.
VariableOrder orderFromList(FaultTree const& tree, std::span<std::string const> names);
/// Order file: one basic event name per line; blank lines ignored.
VariableOrder orderFromFile(FaultTree const& tree, std::string const& path);

}  // namespace ftbdd
