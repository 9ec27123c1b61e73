#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace ftbdd {

using NodeId = std::uint32_t;

enum class NodeType {
    BasicEvent,
    And,
    Or,
    Vot,
    Pand,
    Por,
    Pdep,
    Seq,
    Spare,
};

std::string_view toString(NodeType type);

/// Static node types are the ones a BDD can encode directly.
constexpr bool isStaticType(NodeType type) {
    return type == NodeType::BasicEvent || type == NodeType::And || type == NodeType::Or || type == NodeType::Vot;
}

/// PDEP and SEQ constrain failures of other nodes but never fail themselves.
constexpr bool isRestriction(NodeType type) {
    return type == NodeType::Pdep || type == NodeType::Seq;
}

/// Exponential failure with rate `rate` while active and `dormancy * rate` while dormant.
struct ExponentialDistribution {
    double rate = 1.0;
    double dormancy = 1.0;
};

/// Time-independent failure probability. Only usable for static analysis.
struct ConstantProbability {
    double probability = 0.0;
};

/// Failure CDF known only at a fixed set of time points (the result of solving a dynamic module).
struct TabulatedDistribution {
    std::vector<double> times;
    std::vector<double> probabilities;

    /// Value at a support point; throws std::out_of_range for any other time.
    double at(double time) const;
};

using FailureDistribution = std::variant<ExponentialDistribution, ConstantProbability, TabulatedDistribution>;

/// P(X <= t) for a basic event with the given distribution.
double failureProbability(FailureDistribution const& distribution, double time);

struct Node {
    std::string name;
    NodeType type = NodeType::BasicEvent;
    std::vector<NodeId> children;
    // VOT threshold k.
    unsigned threshold = 0;
    // PDEP probability p; 1 means FDEP.
    double dependencyProbability = 1.0;
    // Galileo keyword the node was read from (e.g. "wsp", "fdep"); empty means the canonical one.
    std::string keyword;
    std::optional<FailureDistribution> distribution;
};

/// A static or dynamic fault tree: typed nodes with ordered children, one top event and a
/// failure distribution per basic event. Node ids are dense and follow insertion order.
///
/// The tree is built incrementally and is not checked while building; call validate() once
/// construction is done. Children may reference nodes added later.
class FaultTree {
public:
    /// Throws std::invalid_argument if the name is already taken.
    NodeId addNode(Node node);

    NodeId addBasicEvent(std::string name, FailureDistribution distribution);
    NodeId addBasicEvent(std::string name, double rate, double dormancy = 1.0);
    NodeId addGate(std::string name, NodeType type, std::vector<NodeId> children);
    NodeId addVot(std::string name, unsigned threshold, std::vector<NodeId> children);
    NodeId addPdep(std::string name, double probability, std::vector<NodeId> children);

    void setChildren(NodeId id, std::vector<NodeId> children);
    void setDistribution(NodeId id, FailureDistribution distribution);
    void setTop(NodeId id);

    std::size_t size() const {
        return nodes_.size();
    }
    Node const& node(NodeId id) const {
        return nodes_.at(id);
    }
    std::vector<Node> const& nodes() const {
        return nodes_;
    }
    std::optional<NodeId> find(std::string_view name) const;
    /// Throws std::out_of_range for unknown names.
    NodeId id(std::string_view name) const;

    bool hasTop() const {
        return top_.has_value();
    }
    NodeId top() const;

    /// Basic events in id order.
    std::vector<NodeId> basicEvents() const;
    /// Parents of every node (restriction nodes included as parents of their children).
    std::vector<std::vector<NodeId>> parents() const;

private:
    std::vector<Node> nodes_;
    std::unordered_map<std::string, NodeId> byName_;
    std::optional<NodeId> top_;
};

struct Violation {
    std::string node;
    std::string rule;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const {
        return violations.empty();
    }
    bool contains(std::string_view rule) const;
    std::string describe() const;
};

ValidationReport validate(FaultTree const& tree);

/// True iff every node is a BE, AND, OR or VOT.
bool isStatic(FaultTree const& tree);

/// The tree induced by `root` and all of its descendants, with `root` as top. Restriction nodes
/// that nobody references are carried along when all of their children are inside.
FaultTree subTree(FaultTree const& tree, NodeId root);

/// Ids of `root` and everything reachable from it through child edges, sorted.
std::vector<NodeId> descendantsOf(FaultTree const& tree, NodeId root);

}  // namespace ftbdd
