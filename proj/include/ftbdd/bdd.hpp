#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace ftbdd {

class BddManager;

/// Handle to a node of one BddManager. Two handles are equal iff they denote the same node of
/// the same manager, which by canonicity means the same Boolean function.
class Bdd {
public:
    Bdd() = default;

    BddManager* manager() const {
        return manager_;
    }
    std::uint32_t index() const {
        return index_;
    }
    bool isZero() const {
        return index_ == 0;
    }
    bool isOne() const {
        return index_ == 1;
    }
    bool isTerminal() const {
        return index_ <= 1;
    }
    bool valid() const {
        return manager_ != nullptr;
    }

    /// Level of the root variable; kTerminalLevel for terminals.
    std::uint32_t level() const;
    Bdd high() const;
    Bdd low() const;

    friend bool operator==(Bdd const&, Bdd const&) = default;

private:
    friend class BddManager;
    Bdd(BddManager* manager, std::uint32_t index) : manager_(manager), index_(index) {}

    BddManager* manager_ = nullptr;
    std::uint32_t index_ = 0;
};

struct BddHash {
    std::size_t operator()(Bdd const& f) const noexcept {
        return std::hash<std::uint32_t>{}(f.index()) ^ (std::hash<void*>{}(f.manager()) << 1);
    }
};

/// Reduced ordered BDDs over a fixed list of variables. Variable i sits at level i, so the
/// constructor argument is the variable order. Node 0 is the 0-terminal, node 1 the 1-terminal.
///
/// Besides the Boolean operations, the manager provides the minimal-solution operators used for
/// cut-set extraction. Their results are read as path sets: every path to the 1-terminal
/// contributes the set of variables whose 1-edge it takes.
///
/// Nodes are never freed; a manager lives for one analysis.
class BddManager {
public:
    static constexpr std::uint32_t kTerminalLevel = UINT32_MAX;

    explicit BddManager(std::vector<std::string> variableNames);
    BddManager(BddManager const&) = delete;
    BddManager& operator=(BddManager const&) = delete;

    std::size_t variableCount() const {
        return names_.size();
    }
    std::string const& variableName(std::uint32_t level) const {
        return names_.at(level);
    }
    std::vector<std::string> const& variableNames() const {
        return names_;
    }

    Bdd zero() {
        return {this, 0};
    }
    Bdd one() {
        return {this, 1};
    }
    /// The function x_level. Throws std::out_of_range for unknown levels.
    Bdd var(std::uint32_t level);

    Bdd apply_and(Bdd f, Bdd g);
    Bdd apply_or(Bdd f, Bdd g);
    Bdd negate(Bdd f);
    Bdd ite(Bdd f, Bdd g, Bdd h);
    /// Shannon cofactor f|x=value.
    Bdd restrict(Bdd f, std::uint32_t level, bool value);

    /// Path sets of f that contain no path set of g.
    Bdd without(Bdd f, Bdd g);
    /// Path-set BDD of the minimal solutions of the monotone function f.
    Bdd minsol(Bdd f);
    /// Path sets of f that contain the variable at `level`.
    Bdd pathsContaining(Bdd f, std::uint32_t level);
    /// Monotone function true on every superset of some path set of f.
    Bdd upwardClosure(Bdd f);

    bool evaluate(Bdd f, std::span<bool const> assignment) const;
    /// Path sets of f in 1-edge-first depth-first order. Throws LimitExceeded when more than
    /// `limit` sets would be produced.
    std::vector<std::vector<std::uint32_t>> enumerate_solutions(Bdd f, std::size_t limit = 1'000'000) const;
    /// Distinct non-terminal nodes reachable from f.
    std::size_t internal_node_count(Bdd f) const;
    /// Internal nodes reachable from f, children before parents.
    std::vector<std::uint32_t> topologicalOrder(Bdd f) const;
    /// Total nodes allocated so far, terminals included.
    std::size_t allocatedNodes() const {
        return nodes_.size();
    }
    void clearCaches();

    /// Graphviz rendering: solid 1-edges, dashed 0-edges.
    void writeDot(std::ostream& out, Bdd f) const;

    std::uint32_t levelOf(std::uint32_t node) const {
        return nodes_[node].level;
    }
    std::uint32_t highOf(std::uint32_t node) const {
        return nodes_[node].high;
    }
    std::uint32_t lowOf(std::uint32_t node) const {
        return nodes_[node].low;
    }

private:
    struct NodeData {
        std::uint32_t level;
        std::uint32_t high;
        std::uint32_t low;
    };
    struct TripleHash {
        std::size_t operator()(NodeData const& n) const noexcept;
    };
    struct TripleEq {
        bool operator()(NodeData const& a, NodeData const& b) const noexcept {
            return a.level == b.level && a.high == b.high && a.low == b.low;
        }
    };
    enum class Op : std::uint32_t { And, Or, Not, Ite, Restrict, Without, Minsol, Containing, Closure };
    struct CacheKey {
        Op op;
        std::uint32_t a;
        std::uint32_t b;
        std::uint32_t c;
        friend bool operator==(CacheKey const&, CacheKey const&) = default;
    };
    struct CacheHash {
        std::size_t operator()(CacheKey const& k) const noexcept;
    };

    std::uint32_t make(std::uint32_t level, std::uint32_t high, std::uint32_t low);
    void check(Bdd f) const;

    std::uint32_t andRec(std::uint32_t f, std::uint32_t g);
    std::uint32_t orRec(std::uint32_t f, std::uint32_t g);
    std::uint32_t notRec(std::uint32_t f);
    std::uint32_t iteRec(std::uint32_t f, std::uint32_t g, std::uint32_t h);
    std::uint32_t restrictRec(std::uint32_t f, std::uint32_t level, std::uint32_t value);
    std::uint32_t withoutRec(std::uint32_t f, std::uint32_t g);
    std::uint32_t minsolRec(std::uint32_t f);
    std::uint32_t containingRec(std::uint32_t f, std::uint32_t level);
    std::uint32_t closureRec(std::uint32_t f);

    bool lookup(CacheKey const& key, std::uint32_t& result) const;
    std::uint32_t store(CacheKey const& key, std::uint32_t result);

    std::vector<std::string> names_;
    std::vector<NodeData> nodes_;
    std::unordered_map<NodeData, std::uint32_t, TripleHash, TripleEq> unique_;
    std::unordered_map<CacheKey, std::uint32_t, CacheHash> cache_;
};

}  // namespace ftbdd
