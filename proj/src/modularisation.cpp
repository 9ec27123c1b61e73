#include "ftbdd/modularisation.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "ftbdd/errors.hpp"
#include "ftbdd/galileo.hpp"
#include "ftbdd/sft_to_bdd.hpp"

namespace ftbdd {

namespace {

constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();

struct VisitDates {
    std::vector<std::size_t> first;
    std::vector<std::size_t> last;
    std::vector<std::size_t> exit;
    std::vector<NodeId> finishOrder;
};

VisitDates visitDates(FaultTree const& tree) {
    std::size_t const n = tree.size();
    VisitDates dates{std::vector<std::size_t>(n, kUnvisited), std::vector<std::size_t>(n, kUnvisited), std::vector<std::size_t>(n, kUnvisited), {}};
    std::size_t clock = 0;
    std::vector<std::pair<NodeId, std::size_t>> stack;
    auto visit = [&](NodeId id) {
        ++clock;
        dates.last[id] = clock;
        if (dates.first[id] == kUnvisited) {
            dates.first[id] = clock;
            stack.emplace_back(id, 0);
        }
    };
    visit(tree.top());
    while (!stack.empty()) {
        auto [id, next] = stack.back();
        auto const& children = tree.node(id).children;
        if (next < children.size()) {
            stack.back().second = next + 1;
            visit(children[next]);
            continue;
        }
        stack.pop_back();
        dates.exit[id] = ++clock;
        dates.finishOrder.push_back(id);
    }
    return dates;
}

std::vector<bool> underSpare(FaultTree const& tree) {
    std::vector<bool> marked(tree.size(), false);
    std::vector<NodeId> stack;
    for (auto const& node : tree.nodes()) {
        if (node.type == NodeType::Spare) {
            stack.insert(stack.end(), node.children.begin(), node.children.end());
        }
    }
    while (!stack.empty()) {
        NodeId id = stack.back();
        stack.pop_back();
        if (marked[id]) {
            continue;
        }
        marked[id] = true;
        auto const& children = tree.node(id).children;
        stack.insert(stack.end(), children.begin(), children.end());
    }
    return marked;
}

std::vector<bool> referenced(FaultTree const& tree) {
    std::vector<bool> result(tree.size(), false);
    for (auto const& node : tree.nodes()) {
        for (NodeId child : node.children) {
            result[child] = true;
        }
    }
    return result;
}

std::vector<NodeId> moduleMembers(FaultTree const& tree, NodeId root, std::vector<bool> const& isReferenced) {
    auto members = descendantsOf(tree, root);
    if (tree.node(root).type == NodeType::BasicEvent) {
        return members;
    }
    std::vector<bool> inside(tree.size(), false);
    for (NodeId id : members) {
        inside[id] = true;
    }
    for (NodeId id = 0; id < tree.size(); ++id) {
        auto const& node = tree.node(id);
        if (isRestriction(node.type) && !isReferenced[id] && !inside[id] &&
            std::all_of(node.children.begin(), node.children.end(), [&](NodeId c) { return inside[c]; })) {
            members.push_back(id);
        }
    }
    std::sort(members.begin(), members.end());
    return members;
}

bool isDynamic(NodeType type) {
    return !isStaticType(type);
}

bool contains(std::vector<NodeId> const& sorted, NodeId id) {
    return std::binary_search(sorted.begin(), sorted.end(), id);
}

bool includes(Module const& outer, Module const& inner) {
    return outer.root != inner.root && std::includes(outer.members.begin(), outer.members.end(), inner.members.begin(), inner.members.end());
}

}  // namespace

std::vector<Module> detectModules(FaultTree const& tree) {
    auto const dates = visitDates(tree);
    std::size_t const n = tree.size();
    std::vector<std::size_t> lo(n, kUnvisited);
    std::vector<std::size_t> hi(n, 0);
    for (NodeId id : dates.finishOrder) {
        for (NodeId child : tree.node(id).children) {
            lo[id] = std::min({lo[id], dates.first[child], lo[child]});
            hi[id] = std::max({hi[id], dates.last[child], hi[child]});
        }
    }

    auto const spareBound = underSpare(tree);
    auto const isReferenced = referenced(tree);
    std::vector<Module> modules;
    for (NodeId id = 0; id < n; ++id) {
        auto const& node = tree.node(id);
        if (dates.first[id] == kUnvisited) {
            continue;
        }
        bool module = id == tree.top();
        if (!module && node.type != NodeType::BasicEvent && !isRestriction(node.type) && !spareBound[id]) {
            module = dates.first[id] < lo[id] && hi[id] < dates.exit[id];
            auto inside = [&](NodeId c) { return dates.first[c] > dates.first[id] && dates.first[c] < dates.exit[id]; };
            for (NodeId r = 0; module && r < n; ++r) {
                auto const& restriction = tree.node(r);
                if (!isRestriction(restriction.type)) {
                    continue;
                }
                auto const in = std::count_if(restriction.children.begin(), restriction.children.end(), inside);
                module = in == 0 || in == static_cast<std::ptrdiff_t>(restriction.children.size());
            }
        }
        if (module) {
            modules.push_back(Module{id, moduleMembers(tree, id, isReferenced), dates.first[id]});
        }
    }
    std::sort(modules.begin(), modules.end(), [](Module const& a, Module const& b) { return a.firstVisit < b.firstVisit; });
    return modules;
}

std::vector<Module> selectDynamicModules(FaultTree const& tree, std::span<Module const> modules) {
    std::vector<Module> remaining(modules.begin(), modules.end());
    std::stable_sort(remaining.begin(), remaining.end(), [](Module const& a, Module const& b) {
        if (a.members.size() != b.members.size()) {
            return a.members.size() > b.members.size();
        }
        return a.firstVisit < b.firstVisit;
    });
    std::vector<bool> kept(remaining.size(), true);
    for (std::size_t i = 0; i < remaining.size(); ++i) {
        auto const& candidate = remaining[i];
        bool dynamic = false;
        for (NodeId id : candidate.members) {
            if (!isDynamic(tree.node(id).type)) {
                continue;
            }
            bool covered = false;
            for (std::size_t j = 0; j < remaining.size() && !covered; ++j) {
                covered = j != i && kept[j] && includes(candidate, remaining[j]) && contains(remaining[j].members, id);
            }
            if (!covered) {
                dynamic = true;
                break;
            }
        }
        kept[i] = dynamic;
    }

    std::vector<Module> selected;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
        if (!kept[i]) {
            continue;
        }
        bool nested = false;
        for (std::size_t j = 0; j < remaining.size() && !nested; ++j) {
            nested = kept[j] && includes(remaining[j], remaining[i]);
        }
        if (!nested) {
            selected.push_back(remaining[i]);
        }
    }
    std::sort(selected.begin(), selected.end(), [](Module const& a, Module const& b) { return a.firstVisit < b.firstVisit; });
    return selected;
}

FaultTree replaceModules(FaultTree const& tree, std::span<Module const> modules, std::span<TabulatedDistribution const> tables) {
    if (modules.size() != tables.size()) {
        throw std::invalid_argument("one table per module is required");
    }
    std::size_t const n = tree.size();
    constexpr std::size_t kRemoved = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> replacement(n, kRemoved - 1);
    for (std::size_t m = 0; m < modules.size(); ++m) {
        for (NodeId id : modules[m].members) {
            if (replacement[id] != kRemoved - 1) {
                throw std::invalid_argument("modules to replace overlap at '" + tree.node(id).name + "'");
            }
            replacement[id] = id == modules[m].root ? m : kRemoved;
        }
    }

    std::vector<NodeId> newId(n, 0);
    NodeId next = 0;
    for (NodeId id = 0; id < n; ++id) {
        if (replacement[id] != kRemoved) {
            newId[id] = next++;
        }
    }

    FaultTree result;
    for (NodeId id = 0; id < n; ++id) {
        if (replacement[id] == kRemoved) {
            continue;
        }
        auto const& node = tree.node(id);
        if (replacement[id] != kRemoved - 1) {
            result.addBasicEvent(node.name, tables[replacement[id]]);
            continue;
        }
        Node copy = node;
        for (NodeId& child : copy.children) {
            if (replacement[child] == kRemoved) {
                throw std::logic_error("'" + node.name + "' refers to the inside of a module");
            }
            child = newId[child];
        }
        result.addNode(std::move(copy));
    }
    if (replacement[tree.top()] == kRemoved) {
        throw std::logic_error("top event lies inside a module");
    }
    result.setTop(newId[tree.top()]);
    return result;
}

FaultTree replaceModule(FaultTree const& tree, Module const& module, TabulatedDistribution const& table) {
    return replaceModules(tree, std::span<Module const>(&module, 1), std::span<TabulatedDistribution const>(&table, 1));
}

std::shared_ptr<Ctmc const> ModuleCache::get(FaultTree const& module, CtmcOptions const& options) {
    std::string key = serializeGalileo(module);
    {
        std::lock_guard lock(mutex_);
        if (auto it = chains_.find(key); it != chains_.end()) {
            ++hits_;
            return it->second;
        }
    }
    auto chain = std::make_shared<Ctmc const>(buildCtmc(module, options));
    std::lock_guard lock(mutex_);
    return chains_.try_emplace(std::move(key), std::move(chain)).first->second;
}

std::size_t ModuleCache::size() const {
    std::lock_guard lock(mutex_);
    return chains_.size();
}

std::size_t ModuleCache::hits() const {
    std::lock_guard lock(mutex_);
    return hits_;
}

namespace {

TimeCurve staticCurve(FaultTree const& tree, std::span<double const> times, DftAnalysisOptions const& options) {
    auto const order = options.ordering(tree);
    auto manager = makeManager(tree, order);
    Bdd f = translate(tree, order, manager);
    auto const distributions = levelDistributions(tree, order);
    return unreliabilityCurve(manager, f, distributions, times, options.chunkSize);
}

std::shared_ptr<Ctmc const> chainFor(FaultTree const& tree, CtmcOptions const& options, ModuleCache* cache) {
    if (cache != nullptr) {
        return cache->get(tree, options);
    }
    return std::make_shared<Ctmc const>(buildCtmc(tree, options));
}

}  // namespace

DftAnalysisResult analyzeDft(FaultTree const& tree, std::span<double const> times, DftAnalysisOptions const& options, ModuleCache* cache) {
    if (auto report = validate(tree); !report.ok()) {
        throw std::invalid_argument("invalid fault tree: " + report.describe());
    }
    if (times.empty()) {
        throw std::invalid_argument("at least one time point is required");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0) || (i > 0 && !(times[i] > times[i - 1]))) {
            throw std::invalid_argument("time points must be nonnegative and strictly increasing");
        }
    }

    DftAnalysisResult result;
    if (isStatic(tree)) {
        result.curve = staticCurve(tree, times, options);
        result.residual = tree;
        return result;
    }
    for (NodeId id : tree.basicEvents()) {
        auto const& dist = tree.node(id).distribution;
        if (!dist || !std::holds_alternative<ExponentialDistribution>(*dist)) {
            throw AnalysisError("basic event '" + tree.node(id).name + "' of a dynamic tree is not exponentially distributed");
        }
    }

    if (!options.modularise) {
        auto chain = chainFor(tree, options.ctmc, cache);
        result.curve = transientFailureProbability(*chain, times);
        result.ctmcStates = chain->stateCount();
        result.substituted.push_back(tree.node(tree.top()).name);
        return result;
    }

    auto const modules = detectModules(tree);
    auto const selected = selectDynamicModules(tree, modules);
    std::vector<TabulatedDistribution> tables;
    for (auto const& module : selected) {
        auto chain = chainFor(subTree(tree, module.root), options.ctmc, cache);
        auto curve = transientFailureProbability(*chain, times);
        for (double& value : curve.values) {
            value = std::clamp(value, 0.0, 1.0);
        }
        result.ctmcStates += chain->stateCount();
        result.substituted.push_back(tree.node(module.root).name);
        tables.push_back(TabulatedDistribution{std::move(curve.times), std::move(curve.values)});
    }
    result.residual = replaceModules(tree, selected, tables);
    if (!isStatic(result.residual)) {
        throw std::logic_error("dynamic gates left after module substitution");
    }
    result.curve = staticCurve(result.residual, times, options);
    return result;
}

}  // namespace ftbdd
