#include "ftbdd/bdd.hpp"

#include <algorithm>
#include <cassert>
#include <ostream>
#include <stdexcept>

#include "ftbdd/errors.hpp"

namespace ftbdd {

std::uint32_t Bdd::level() const {
    return manager_->levelOf(index_);
}

Bdd Bdd::high() const {
    return {manager_, manager_->highOf(index_)};
}

Bdd Bdd::low() const {
    return {manager_, manager_->lowOf(index_)};
}

std::size_t BddManager::TripleHash::operator()(NodeData const& n) const noexcept {
    std::uint64_t h = n.level;
    h = h * 0x9E3779B97F4A7C15ULL ^ n.high;
    h = h * 0x9E3779B97F4A7C15ULL ^ n.low;
    return static_cast<std::size_t>(h ^ (h >> 29));
}

std::size_t BddManager::CacheHash::operator()(CacheKey const& k) const noexcept {
    std::uint64_t h = static_cast<std::uint32_t>(k.op);
    h = h * 0x9E3779B97F4A7C15ULL ^ k.a;
    h = h * 0x9E3779B97F4A7C15ULL ^ k.b;
    h = h * 0x9E3779B97F4A7C15ULL ^ k.c;
    return static_cast<std::size_t>(h ^ (h >> 31));
}

BddManager::BddManager(std::vector<std::string> variableNames) : names_(std::move(variableNames)) {
    nodes_.push_back({kTerminalLevel, 0, 0});
    nodes_.push_back({kTerminalLevel, 1, 1});
}

std::uint32_t BddManager::make(std::uint32_t level, std::uint32_t high, std::uint32_t low) {
    if (high == low) {
        return high;
    }
    assert(level < nodes_[high].level && level < nodes_[low].level);
    NodeData key{level, high, low};
    auto it = unique_.find(key);
    if (it != unique_.end()) {
        return it->second;
    }
    auto index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(key);
    unique_.emplace(key, index);
    return index;
}

void BddManager::check(Bdd f) const {
    if (f.manager() != this) {
        throw std::invalid_argument("BDD operand belongs to a different manager");
    }
}

bool BddManager::lookup(CacheKey const& key, std::uint32_t& result) const {
    auto it = cache_.find(key);
    if (it == cache_.end()) {
        return false;
    }
    result = it->second;
    return true;
}

std::uint32_t BddManager::store(CacheKey const& key, std::uint32_t result) {
    cache_.emplace(key, result);
    return result;
}

void BddManager::clearCaches() {
    cache_.clear();
}

Bdd BddManager::var(std::uint32_t level) {
    if (level >= names_.size()) {
        throw std::out_of_range("unknown BDD variable " + std::to_string(level));
    }
    return {this, make(level, 1, 0)};
}

Bdd BddManager::apply_and(Bdd f, Bdd g) {
    check(f);
    check(g);
    return {this, andRec(f.index(), g.index())};
}

Bdd BddManager::apply_or(Bdd f, Bdd g) {
    check(f);
    check(g);
    return {this, orRec(f.index(), g.index())};
}

Bdd BddManager::negate(Bdd f) {
    check(f);
    return {this, notRec(f.index())};
}

Bdd BddManager::ite(Bdd f, Bdd g, Bdd h) {
    check(f);
    check(g);
    check(h);
    return {this, iteRec(f.index(), g.index(), h.index())};
}

Bdd BddManager::restrict(Bdd f, std::uint32_t level, bool value) {
    check(f);
    if (level >= names_.size()) {
        throw std::out_of_range("unknown BDD variable " + std::to_string(level));
    }
    return {this, restrictRec(f.index(), level, value ? 1U : 0U)};
}

Bdd BddManager::without(Bdd f, Bdd g) {
    check(f);
    check(g);
    return {this, withoutRec(f.index(), g.index())};
}

Bdd BddManager::minsol(Bdd f) {
    check(f);
    return {this, minsolRec(f.index())};
}

Bdd BddManager::pathsContaining(Bdd f, std::uint32_t level) {
    check(f);
    if (level >= names_.size()) {
        throw std::out_of_range("unknown BDD variable " + std::to_string(level));
    }
    return {this, containingRec(f.index(), level)};
}

Bdd BddManager::upwardClosure(Bdd f) {
    check(f);
    return {this, closureRec(f.index())};
}

std::uint32_t BddManager::andRec(std::uint32_t f, std::uint32_t g) {
    if (f == 0 || g == 0) {
        return 0;
    }
    if (f == 1) {
        return g;
    }
    if (g == 1 || f == g) {
        return f;
    }
    if (f > g) {
        std::swap(f, g);
    }
    CacheKey key{Op::And, f, g, 0};
    std::uint32_t result;
    if (lookup(key, result)) {
        return result;
    }
    auto const lf = nodes_[f].level;
    auto const lg = nodes_[g].level;
    auto const top = std::min(lf, lg);
    auto const f1 = lf == top ? nodes_[f].high : f;
    auto const f0 = lf == top ? nodes_[f].low : f;
    auto const g1 = lg == top ? nodes_[g].high : g;
    auto const g0 = lg == top ? nodes_[g].low : g;
    auto const high = andRec(f1, g1);
    auto const low = andRec(f0, g0);
    return store(key, make(top, high, low));
}

std::uint32_t BddManager::orRec(std::uint32_t f, std::uint32_t g) {
    if (f == 1 || g == 1) {
        return 1;
    }
    if (f == 0) {
        return g;
    }
    if (g == 0 || f == g) {
        return f;
    }
    if (f > g) {
        std::swap(f, g);
    }
    CacheKey key{Op::Or, f, g, 0};
    std::uint32_t result;
    if (lookup(key, result)) {
        return result;
    }
    auto const lf = nodes_[f].level;
    auto const lg = nodes_[g].level;
    auto const top = std::min(lf, lg);
    auto const f1 = lf == top ? nodes_[f].high : f;
    auto const f0 = lf == top ? nodes_[f].low : f;
    auto const g1 = lg == top ? nodes_[g].high : g;
    auto const g0 = lg == top ? nodes_[g].low : g;
    auto const high = orRec(f1, g1);
    auto const low = orRec(f0, g0);
    return store(key, make(top, high, low));
}

std::uint32_t BddManager::notRec(std::uint32_t f) {
    if (f <= 1) {
        return 1 - f;
    }
    CacheKey key{Op::Not, f, 0, 0};
    std::uint32_t result;
    if (lookup(key, result)) {
        return result;
    }
    auto const high = notRec(nodes_[f].high);
    auto const low = notRec(nodes_[f].low);
    return store(key, make(nodes_[f].level, high, low));
}

std::uint32_t BddManager::iteRec(std::uint32_t f, std::uint32_t g, std::uint32_t h) {
    if (f == 1) {
        return g;
    }
    if (f == 0) {
        return h;
    }
    if (g == h) {
        return g;
    }
    if (g == 1 && h == 0) {
        return f;
    }
    CacheKey key{Op::Ite, f, g, h};
    std::uint32_t result;
    if (lookup(key, result)) {
        return result;
    }
    auto const top = std::min({nodes_[f].level, nodes_[g].level, nodes_[h].level});
    auto cofactor = [&](std::uint32_t n, bool high) {
        if (nodes_[n].level != top) {
            return n;
        }
        return high ? nodes_[n].high : nodes_[n].low;
    };
    auto const hi = iteRec(cofactor(f, true), cofactor(g, true), cofactor(h, true));
    auto const lo = iteRec(cofactor(f, false), cofactor(g, false), cofactor(h, false));
    return store(key, make(top, hi, lo));
}

std::uint32_t BddManager::restrictRec(std::uint32_t f, std::uint32_t level, std::uint32_t value) {
    auto const lf = nodes_[f].level;
    if (lf > level) {
        return f;
    }
    if (lf == level) {
        return value ? nodes_[f].high : nodes_[f].low;
    }
    CacheKey key{Op::Restrict, f, level, value};
    std::uint32_t result;
    if (lookup(key, result)) {
        return result;
    }
    auto const high = restrictRec(nodes_[f].high, level, value);
    auto const low = restrictRec(nodes_[f].low, level, value);
    return store(key, make(lf, high, low));
}

// Rauzy's without: keep the path sets of f that are not supersets of a path set of g.
std::uint32_t BddManager::withoutRec(std::uint32_t f, std::uint32_t g) {
    if (f == 0 || g == 1) {
        return 0;
    }
    if (g == 0) {
        return f;
    }
    if (f == g) {
        return 0;
    }
    CacheKey key{Op::Without, f, g, 0};
    std::uint32_t result;
    if (lookup(key, result)) {
        return result;
    }
    auto const lf = nodes_[f].level;
    auto const lg = nodes_[g].level;
    if (lf < lg) {
        auto const high = withoutRec(nodes_[f].high, g);
        auto const low = withoutRec(nodes_[f].low, g);
        result = make(lf, high, low);
    } else if (lf > lg) {
        // Path sets of f never contain g's root variable, so only g's 0-branch can subsume them.
        result = withoutRec(f, nodes_[g].low);
    } else {
        auto const high = withoutRec(withoutRec(nodes_[f].high, nodes_[g].high), nodes_[g].low);
        auto const low = withoutRec(nodes_[f].low, nodes_[g].low);
        result = make(lf, high, low);
    }
    return store(key, result);
}

std::uint32_t BddManager::minsolRec(std::uint32_t f) {
    if (f <= 1) {
        return f;
    }
    CacheKey key{Op::Minsol, f, 0, 0};
    std::uint32_t result;
    if (lookup(key, result)) {
        return result;
    }
    auto const low = minsolRec(nodes_[f].low);
    auto const high = withoutRec(minsolRec(nodes_[f].high), low);
    return store(key, make(nodes_[f].level, high, low));
}

std::uint32_t BddManager::containingRec(std::uint32_t f, std::uint32_t level) {
    auto const lf = nodes_[f].level;
    if (lf > level) {
        return 0;
    }
    if (lf == level) {
        return make(lf, nodes_[f].high, 0);
    }
    CacheKey key{Op::Containing, f, level, 0};
    std::uint32_t result;
    if (lookup(key, result)) {
        return result;
    }
    auto const high = containingRec(nodes_[f].high, level);
    auto const low = containingRec(nodes_[f].low, level);
    return store(key, make(lf, high, low));
}

std::uint32_t BddManager::closureRec(std::uint32_t f) {
    if (f <= 1) {
        return f;
    }
    CacheKey key{Op::Closure, f, 0, 0};
    std::uint32_t result;
    if (lookup(key, result)) {
        return result;
    }
    auto const low = closureRec(nodes_[f].low);
    auto const high = orRec(closureRec(nodes_[f].high), low);
    return store(key, make(nodes_[f].level, high, low));
}

bool BddManager::evaluate(Bdd f, std::span<bool const> assignment) const {
    check(f);
    auto node = f.index();
    while (node > 1) {
        auto const level = nodes_[node].level;
        if (level >= assignment.size()) {
            throw std::out_of_range("assignment does not cover variable " + std::to_string(level));
        }
        node = assignment[level] ? nodes_[node].high : nodes_[node].low;
    }
    return node == 1;
}

std::vector<std::vector<std::uint32_t>> BddManager::enumerate_solutions(Bdd f, std::size_t limit) const {
    check(f);
    std::vector<std::vector<std::uint32_t>> result;
    std::vector<std::uint32_t> path;
    // Explicit stack of (node, next branch) frames; branch 0 = 1-edge pending, 1 = 0-edge pending, 2 = done.
    struct Frame {
        std::uint32_t node;
        int state;
    };
    std::vector<Frame> stack{{f.index(), 0}};
    while (!stack.empty()) {
        auto& frame = stack.back();
        if (frame.node == 0) {
            stack.pop_back();
            continue;
        }
        if (frame.node == 1) {
            if (result.size() >= limit) {
                throw LimitExceeded("more than " + std::to_string(limit) + " solutions");
            }
            result.push_back(path);
            stack.pop_back();
            continue;
        }
        auto const node = frame.node;
        if (frame.state == 0) {
            frame.state = 1;
            path.push_back(nodes_[node].level);
            stack.push_back({nodes_[node].high, 0});
        } else if (frame.state == 1) {
            frame.state = 2;
            path.pop_back();
            stack.push_back({nodes_[node].low, 0});
        } else {
            stack.pop_back();
        }
    }
    return result;
}

std::vector<std::uint32_t> BddManager::topologicalOrder(Bdd f) const {
    check(f);
    std::vector<std::uint32_t> order;
    if (f.isTerminal()) {
        return order;
    }
    std::vector<bool> visited(nodes_.size(), false);
    std::vector<std::pair<std::uint32_t, bool>> stack{{f.index(), false}};
    while (!stack.empty()) {
        auto [node, expanded] = stack.back();
        stack.pop_back();
        if (expanded) {
            order.push_back(node);
            continue;
        }
        if (node <= 1 || visited[node]) {
            continue;
        }
        visited[node] = true;
        stack.push_back({node, true});
        stack.push_back({nodes_[node].low, false});
        stack.push_back({nodes_[node].high, false});
    }
    return order;
}

std::size_t BddManager::internal_node_count(Bdd f) const {
    return topologicalOrder(f).size();
}

void BddManager::writeDot(std::ostream& out, Bdd f) const {
    check(f);
    out << "digraph bdd {\n";
    out << "  n0 [shape=box,label=\"0\"];\n";
    out << "  n1 [shape=box,label=\"1\"];\n";
    for (auto node : topologicalOrder(f)) {
        out << "  n" << node << " [shape=circle,label=\"" << names_[nodes_[node].level] << "\"];\n";
        out << "  n" << node << " -> n" << nodes_[node].high << " [style=solid];\n";
        out << "  n" << node << " -> n" << nodes_[node].low << " [style=dashed];\n";
    }
    out << "}\n";
}

}  // namespace ftbdd
