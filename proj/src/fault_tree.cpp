#include "ftbdd/fault_tree.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ftbdd {

std::string_view toString(NodeType type) {
    switch (type) {
        case NodeType::BasicEvent:
            return "BE";
        case NodeType::And:
            return "AND";
        case NodeType::Or:
            return "OR";
        case NodeType::Vot:
            return "VOT";
        case NodeType::Pand:
            return "PAND";
        case NodeType::Por:
            return "POR";
        case NodeType::Pdep:
            return "PDEP";
        case NodeType::Seq:
            return "SEQ";
        case NodeType::Spare:
            return "SPARE";
    }
    return "?";
}

double TabulatedDistribution::at(double time) const {
    auto it = std::lower_bound(times.begin(), times.end(), time);
    if (it == times.end() || *it != time) {
        throw std::out_of_range("time " + std::to_string(time) + " is not a support point of the tabulated distribution");
    }
    return probabilities[static_cast<std::size_t>(it - times.begin())];
}

double failureProbability(FailureDistribution const& distribution, double time) {
    struct Visitor {
        double time;
        double operator()(ExponentialDistribution const& d) const {
            return -std::expm1(-d.rate * time);
        }
        double operator()(ConstantProbability const& d) const {
            return d.probability;
        }
        double operator()(TabulatedDistribution const& d) const {
            return d.at(time);
        }
    };
    return std::visit(Visitor{time}, distribution);
}

NodeId FaultTree::addNode(Node node) {
    if (byName_.contains(node.name)) {
        throw std::invalid_argument("duplicate node name '" + node.name + "'");
    }
    auto id = static_cast<NodeId>(nodes_.size());
    byName_.emplace(node.name, id);
    nodes_.push_back(std::move(node));
    return id;
}

NodeId FaultTree::addBasicEvent(std::string name, FailureDistribution distribution) {
    Node node;
    node.name = std::move(name);
    node.type = NodeType::BasicEvent;
    node.distribution = std::move(distribution);
    return addNode(std::move(node));
}

NodeId FaultTree::addBasicEvent(std::string name, double rate, double dormancy) {
    return addBasicEvent(std::move(name), ExponentialDistribution{rate, dormancy});
}

NodeId FaultTree::addGate(std::string name, NodeType type, std::vector<NodeId> children) {
    Node node;
    node.name = std::move(name);
    node.type = type;
    node.children = std::move(children);
    if (type == NodeType::Vot) {
        node.threshold = 1;
    }
    return addNode(std::move(node));
}

NodeId FaultTree::addVot(std::string name, unsigned threshold, std::vector<NodeId> children) {
    auto id = addGate(std::move(name), NodeType::Vot, std::move(children));
    nodes_[id].threshold = threshold;
    return id;
}

NodeId FaultTree::addPdep(std::string name, double probability, std::vector<NodeId> children) {
    auto id = addGate(std::move(name), NodeType::Pdep, std::move(children));
    nodes_[id].dependencyProbability = probability;
    return id;
}

void FaultTree::setChildren(NodeId id, std::vector<NodeId> children) {
    nodes_.at(id).children = std::move(children);
}

void FaultTree::setDistribution(NodeId id, FailureDistribution distribution) {
    nodes_.at(id).distribution = std::move(distribution);
}

void FaultTree::setTop(NodeId id) {
    if (id >= nodes_.size()) {
        throw std::out_of_range("top event id out of range");
    }
    top_ = id;
}

std::optional<NodeId> FaultTree::find(std::string_view name) const {
    auto it = byName_.find(std::string(name));
    if (it == byName_.end()) {
        return std::nullopt;
    }
    return it->second;
}

NodeId FaultTree::id(std::string_view name) const {
    auto found = find(name);
    if (!found) {
        throw std::out_of_range("unknown node '" + std::string(name) + "'");
    }
    return *found;
}

NodeId FaultTree::top() const {
    if (!top_) {
        throw std::logic_error("fault tree has no top event");
    }
    return *top_;
}

std::vector<NodeId> FaultTree::basicEvents() const {
    std::vector<NodeId> result;
    for (NodeId id = 0; id < nodes_.size(); ++id) {
        if (nodes_[id].type == NodeType::BasicEvent) {
            result.push_back(id);
        }
    }
    return result;
}

std::vector<std::vector<NodeId>> FaultTree::parents() const {
    std::vector<std::vector<NodeId>> result(nodes_.size());
    for (NodeId id = 0; id < nodes_.size(); ++id) {
        for (NodeId child : nodes_[id].children) {
            if (child < nodes_.size()) {
                result[child].push_back(id);
            }
        }
    }
    return result;
}

bool ValidationReport::contains(std::string_view rule) const {
    return std::any_of(violations.begin(), violations.end(), [&](Violation const& v) { return v.rule == rule; });
}

std::string ValidationReport::describe() const {
    std::ostringstream out;
    for (auto const& v : violations) {
        out << "'" << v.node << "': " << v.rule << "\n";
    }
    return out.str();
}

namespace {

void checkDistribution(Node const& node, ValidationReport& report) {
    auto add = [&](std::string rule) { report.violations.push_back({node.name, std::move(rule)}); };
    if (auto const* exp = std::get_if<ExponentialDistribution>(&*node.distribution)) {
        if (!(exp->rate > 0.0) || !std::isfinite(exp->rate)) {
            add("rate must be positive");
        }
        if (!(exp->dormancy >= 0.0 && exp->dormancy <= 1.0)) {
            add("dormancy outside [0,1]");
        }
    } else if (auto const* constant = std::get_if<ConstantProbability>(&*node.distribution)) {
        if (!(constant->probability >= 0.0 && constant->probability <= 1.0)) {
            add("probability outside [0,1]");
        }
    } else {
        auto const& table = std::get<TabulatedDistribution>(*node.distribution);
        if (table.times.size() != table.probabilities.size() || table.times.empty()) {
            add("malformed tabulated distribution");
            return;
        }
        for (std::size_t i = 0; i < table.times.size(); ++i) {
            if (!(table.probabilities[i] >= 0.0 && table.probabilities[i] <= 1.0)) {
                add("probability outside [0,1]");
                return;
            }
            if (i > 0 && !(table.times[i] > table.times[i - 1])) {
                add("tabulated times not increasing");
                return;
            }
        }
    }
}

}  // namespace

ValidationReport validate(FaultTree const& tree) {
    ValidationReport report;
    auto const& nodes = tree.nodes();
    auto const count = nodes.size();
    auto add = [&](std::string const& node, std::string rule) { report.violations.push_back({node, std::move(rule)}); };

    if (!tree.hasTop()) {
        add("", "missing top event");
    }

    bool childrenInRange = true;
    std::vector<bool> seqChild(count, false);
    std::vector<bool> dependent(count, false);
    for (auto const& node : nodes) {
        for (NodeId child : node.children) {
            if (child >= count) {
                add(node.name, "unknown child");
                childrenInRange = false;
            }
        }
        if (node.type == NodeType::Seq) {
            for (NodeId child : node.children) {
                if (child < count) {
                    seqChild[child] = true;
                }
            }
        } else if (node.type == NodeType::Pdep) {
            for (std::size_t i = 1; i < node.children.size(); ++i) {
                if (node.children[i] < count) {
                    dependent[node.children[i]] = true;
                }
            }
        }
    }

    for (auto const& node : nodes) {
        if (node.type == NodeType::BasicEvent) {
            if (!node.children.empty()) {
                add(node.name, "basic event with children");
            }
            if (!node.distribution) {
                add(node.name, "basic event without distribution");
            } else {
                checkDistribution(node, report);
            }
            continue;
        }
        if (node.distribution) {
            add(node.name, "gate with distribution");
        }
        auto const n = node.children.size();
        if (n == 0) {
            add(node.name, "gate without children");
            continue;
        }
        auto sorted = node.children;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            add(node.name, "duplicate child");
        }
        switch (node.type) {
            case NodeType::Vot:
                if (node.threshold == 0) {
                    add(node.name, "k must be positive");
                } else if (node.threshold > n) {
                    add(node.name, "k exceeds child count");
                }
                break;
            case NodeType::Pdep:
                if (n < 2) {
                    add(node.name, "too few children");
                }
                if (!(node.dependencyProbability > 0.0 && node.dependencyProbability <= 1.0)) {
                    add(node.name, "dependency probability outside (0,1]");
                }
                if (childrenInRange) {
                    if (isRestriction(nodes[node.children[0]].type)) {
                        add(node.name, "trigger is a restriction");
                    }
                    for (std::size_t i = 1; i < n; ++i) {
                        if (nodes[node.children[i]].type != NodeType::BasicEvent) {
                            add(node.name, "dependent is not a basic event");
                        }
                    }
                }
                break;
            case NodeType::Seq:
                if (n < 2) {
                    add(node.name, "too few children");
                }
                if (childrenInRange) {
                    for (NodeId child : node.children) {
                        if (nodes[child].type != NodeType::BasicEvent) {
                            add(node.name, "sequenced child is not a basic event");
                        }
                    }
                }
                break;
            case NodeType::Spare:
                if (n < 2) {
                    add(node.name, "too few children");
                }
                break;
            default:
                break;
        }
    }

    for (NodeId id = 0; id < count; ++id) {
        if (seqChild[id] && dependent[id]) {
            add(nodes[id].name, "basic event both sequenced and dependent");
        }
    }

    if (!childrenInRange) {
        return report;
    }

    // Cycle detection: iterative three-colour DFS.
    enum class Colour : std::uint8_t { White, Grey, Black };
    std::vector<Colour> colour(count, Colour::White);
    for (NodeId start = 0; start < count; ++start) {
        if (colour[start] != Colour::White) {
            continue;
        }
        std::vector<std::pair<NodeId, std::size_t>> stack{{start, 0}};
        colour[start] = Colour::Grey;
        while (!stack.empty()) {
            auto& [id, next] = stack.back();
            if (next < nodes[id].children.size()) {
                NodeId child = nodes[id].children[next++];
                if (colour[child] == Colour::Grey) {
                    add(nodes[child].name, "cycle through node");
                } else if (colour[child] == Colour::White) {
                    colour[child] = Colour::Grey;
                    stack.emplace_back(child, 0);
                }
            } else {
                colour[id] = Colour::Black;
                stack.pop_back();
            }
        }
    }

    if (tree.hasTop()) {
        std::vector<bool> reached(count, false);
        std::vector<NodeId> stack{tree.top()};
        reached[tree.top()] = true;
        for (NodeId id = 0; id < count; ++id) {
            if (isRestriction(nodes[id].type) && !reached[id]) {
                reached[id] = true;
                stack.push_back(id);
            }
        }
        while (!stack.empty()) {
            NodeId id = stack.back();
            stack.pop_back();
            for (NodeId child : nodes[id].children) {
                if (!reached[child]) {
                    reached[child] = true;
                    stack.push_back(child);
                }
            }
        }
        for (NodeId id = 0; id < count; ++id) {
            if (!reached[id] && !isRestriction(nodes[id].type)) {
                add(nodes[id].name, "node unreachable from top");
            }
        }
    }
    return report;
}

bool isStatic(FaultTree const& tree) {
    return std::all_of(tree.nodes().begin(), tree.nodes().end(), [](Node const& n) { return isStaticType(n.type); });
}

std::vector<NodeId> descendantsOf(FaultTree const& tree, NodeId root) {
    std::vector<bool> seen(tree.size(), false);
    std::vector<NodeId> stack{root};
    seen.at(root) = true;
    std::vector<NodeId> result;
    while (!stack.empty()) {
        NodeId id = stack.back();
        stack.pop_back();
        result.push_back(id);
        for (NodeId child : tree.node(id).children) {
            if (!seen[child]) {
                seen[child] = true;
                stack.push_back(child);
            }
        }
    }
    std::sort(result.begin(), result.end());
    return result;
}

FaultTree subTree(FaultTree const& tree, NodeId root) {
    std::vector<bool> member(tree.size(), false);
    for (NodeId id : descendantsOf(tree, root)) {
        member[id] = true;
    }
    if (tree.node(root).type != NodeType::BasicEvent) {
        for (NodeId id = 0; id < tree.size(); ++id) {
            auto const& node = tree.node(id);
            if (!member[id] && isRestriction(node.type) &&
                std::all_of(node.children.begin(), node.children.end(), [&](NodeId c) { return member[c]; })) {
                member[id] = true;
            }
        }
    }

    std::vector<NodeId> remap(tree.size(), 0);
    NodeId next = 0;
    for (NodeId id = 0; id < tree.size(); ++id) {
        if (member[id]) {
            remap[id] = next++;
        }
    }
    FaultTree result;
    for (NodeId id = 0; id < tree.size(); ++id) {
        if (!member[id]) {
            continue;
        }
        Node copy = tree.node(id);
        for (auto& child : copy.children) {
            child = remap[child];
        }
        result.addNode(std::move(copy));
    }
    result.setTop(remap[root]);
    return result;
}

}  // namespace ftbdd
