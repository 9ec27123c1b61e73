#include "ftbdd/variable_order.hpp"

#include <deque>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace ftbdd {

namespace {
constexpr std::uint32_t kNoLevel = std::numeric_limits<std::uint32_t>::max();
}

VariableOrder::VariableOrder(FaultTree const& tree, std::vector<NodeId> order) : events_(std::move(order)), levels_(tree.size(), kNoLevel) {
    for (std::uint32_t level = 0; level < events_.size(); ++level) {
        NodeId id = events_[level];
        if (id >= tree.size() || tree.node(id).type != NodeType::BasicEvent) {
            throw std::invalid_argument("variable order contains a non-basic-event");
        }
        if (levels_[id] != kNoLevel) {
            throw std::invalid_argument("basic event '" + tree.node(id).name + "' appears twice in the variable order");
        }
        levels_[id] = level;
    }
    for (NodeId id : tree.basicEvents()) {
        if (levels_[id] == kNoLevel) {
            throw std::invalid_argument("basic event '" + tree.node(id).name + "' is missing from the variable order");
        }
    }
}

std::uint32_t VariableOrder::levelOf(NodeId event) const {
    if (event >= levels_.size() || levels_[event] == kNoLevel) {
        throw std::out_of_range("node is not part of the variable order");
    }
    return levels_[event];
}

std::vector<std::string> VariableOrder::names(FaultTree const& tree) const {
    std::vector<std::string> result;
    result.reserve(events_.size());
    for (NodeId id : events_) {
        result.push_back(tree.node(id).name);
    }
    return result;
}

VariableOrder dfsOrder(FaultTree const& tree) {
    std::vector<NodeId> order;
    std::vector<bool> seen(tree.size(), false);
    auto visit = [&](NodeId start) {
        std::vector<NodeId> stack{start};
        while (!stack.empty()) {
            NodeId id = stack.back();
            stack.pop_back();
            if (seen[id]) {
                continue;
            }
            seen[id] = true;
            auto const& node = tree.node(id);
            if (node.type == NodeType::BasicEvent) {
                order.push_back(id);
            }
            for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) {
                if (!seen[*it]) {
                    stack.push_back(*it);
                }
            }
        }
    };
    visit(tree.top());
    // Basic events only reachable through unreferenced restrictions.
    for (NodeId id = 0; id < tree.size(); ++id) {
        if (!seen[id] && isRestriction(tree.node(id).type)) {
            visit(id);
        }
    }
    return VariableOrder(tree, std::move(order));
}

VariableOrder tdlrOrder(FaultTree const& tree) {
    std::vector<NodeId> order;
    std::vector<bool> seen(tree.size(), false);
    std::deque<NodeId> queue;
    auto run = [&](NodeId start) {
        seen[start] = true;
        queue.push_back(start);
        while (!queue.empty()) {
            NodeId id = queue.front();
            queue.pop_front();
            auto const& node = tree.node(id);
            if (node.type == NodeType::BasicEvent) {
                order.push_back(id);
            }
            for (NodeId child : node.children) {
                if (!seen[child]) {
                    seen[child] = true;
                    queue.push_back(child);
                }
            }
        }
    };
    run(tree.top());
    for (NodeId id = 0; id < tree.size(); ++id) {
        if (!seen[id] && isRestriction(tree.node(id).type)) {
            run(id);
        }
    }
    return VariableOrder(tree, std::move(order));
}

VariableOrder orderFromList(FaultTree const& tree, std::span<std::string const> names) {
    std::vector<NodeId> order;
    std::unordered_set<NodeId> listed;
    std::string problems;
    for (auto const& name : names) {
        auto id = tree.find(name);
        if (!id || tree.node(*id).type != NodeType::BasicEvent) {
            problems += " unknown basic event '" + name + "';";
            continue;
        }
        if (!listed.insert(*id).second) {
            problems += " duplicate basic event '" + name + "';";
            continue;
        }
        order.push_back(*id);
    }
    for (NodeId id : tree.basicEvents()) {
        if (!listed.contains(id)) {
            problems += " missing basic event '" + tree.node(id).name + "';";
        }
    }
    if (!problems.empty()) {
        problems.pop_back();
        throw std::invalid_argument("invalid variable order:" + problems);
    }
    return VariableOrder(tree, std::move(order));
}

VariableOrder orderFromFile(FaultTree const& tree, std::string const& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read order file '" + path + "'");
    }
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            continue;
        }
        auto last = line.find_last_not_of(" \t\r");
        std::string name = line.substr(first, last - first + 1);
        if (name.size() >= 2 && name.front() == '"' && name.back() == '"') {
            name = name.substr(1, name.size() - 2);
        }
        names.push_back(std::move(name));
    }
    return orderFromList(tree, names);
}

}  // namespace ftbdd
