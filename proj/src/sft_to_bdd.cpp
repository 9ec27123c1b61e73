#include "ftbdd/sft_to_bdd.hpp"

#include <map>
#include <optional>
#include <stdexcept>

namespace ftbdd {

BddManager makeManager(FaultTree const& tree, VariableOrder const& order) {
    return BddManager(order.names(tree));
}

namespace {

Bdd votRec(BddManager& manager, unsigned threshold, std::span<Bdd const> children, std::map<std::pair<std::size_t, unsigned>, Bdd>& memo) {
    if (threshold == 0) {
        return manager.one();
    }
    if (children.size() < threshold) {
        return manager.zero();
    }
    auto key = std::make_pair(children.size(), threshold);
    if (auto it = memo.find(key); it != memo.end()) {
        return it->second;
    }
    auto chosen = votRec(manager, threshold - 1, children.subspan(1), memo);
    auto notChosen = votRec(manager, threshold, children.subspan(1), memo);
    auto result = manager.ite(children.front(), chosen, notChosen);
    memo.emplace(key, result);
    return result;
}

class Translator {
public:
    Translator(FaultTree const& tree, VariableOrder const& order, BddManager& manager, bool cacheGates)
        : tree_(tree), order_(order), manager_(manager), cacheGates_(cacheGates), results_(tree.size()), pendingParents_(tree.size(), 0) {
        for (auto const& node : tree.nodes()) {
            for (NodeId child : node.children) {
                ++pendingParents_[child];
            }
        }
    }

    Bdd run(NodeId root) {
        // Post-order over the DAG; each node translated once.
        std::vector<std::pair<NodeId, bool>> stack{{root, false}};
        std::vector<bool> scheduled(tree_.size(), false);
        while (!stack.empty()) {
            auto [id, expanded] = stack.back();
            stack.pop_back();
            if (expanded) {
                results_[id] = translateOne(id);
                continue;
            }
            if (scheduled[id]) {
                continue;
            }
            scheduled[id] = true;
            stack.push_back({id, true});
            auto const& children = tree_.node(id).children;
            for (auto it = children.rbegin(); it != children.rend(); ++it) {
                if (!scheduled[*it]) {
                    stack.push_back({*it, false});
                }
            }
        }
        return *results_[root];
    }

private:
    Bdd consume(NodeId child) {
        Bdd result = *results_[child];
        if (--pendingParents_[child] == 0 && !cacheGates_ && tree_.node(child).type != NodeType::BasicEvent) {
            results_[child].reset();
        }
        return result;
    }

    Bdd translateOne(NodeId id) {
        auto const& node = tree_.node(id);
        switch (node.type) {
            case NodeType::BasicEvent:
                return manager_.var(order_.levelOf(id));
            case NodeType::And: {
                Bdd acc = manager_.one();
                for (NodeId child : node.children) {
                    acc = manager_.apply_and(acc, consume(child));
                }
                return acc;
            }
            case NodeType::Or: {
                Bdd acc = manager_.zero();
                for (NodeId child : node.children) {
                    acc = manager_.apply_or(acc, consume(child));
                }
                return acc;
            }
            case NodeType::Vot: {
                std::vector<Bdd> children;
                children.reserve(node.children.size());
                for (NodeId child : node.children) {
                    children.push_back(consume(child));
                }
                return translateVot(manager_, node.threshold, children);
            }
            default:
                throw std::invalid_argument("dynamic node '" + node.name + "' (" + std::string(toString(node.type)) + ") cannot be translated into a BDD");
        }
    }

    FaultTree const& tree_;
    VariableOrder const& order_;
    BddManager& manager_;
    bool cacheGates_;
    std::vector<std::optional<Bdd>> results_;
    std::vector<std::size_t> pendingParents_;
};

}  // namespace

Bdd translateVot(BddManager& manager, unsigned threshold, std::span<Bdd const> children) {
    if (threshold == 0 || threshold > children.size()) {
        throw std::invalid_argument("VOT threshold " + std::to_string(threshold) + " out of range for " + std::to_string(children.size()) + " children");
    }
    std::map<std::pair<std::size_t, unsigned>, Bdd> memo;
    return votRec(manager, threshold, children, memo);
}

Bdd translate(FaultTree const& tree, VariableOrder const& order, BddManager& manager, TranslationOptions options) {
    if (!isStatic(tree)) {
        throw std::invalid_argument("fault tree is not static");
    }
    if (manager.variableCount() != order.size()) {
        throw std::invalid_argument("manager does not match the variable order");
    }
    return Translator(tree, order, manager, options.cacheGates).run(tree.top());
}

Bdd translateNode(FaultTree const& tree, NodeId node, VariableOrder const& order, BddManager& manager) {
    return Translator(tree, order, manager, false).run(node);
}

}  // namespace ftbdd
