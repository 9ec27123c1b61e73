#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "ftbdd/ctmc.hpp"
#include "ftbdd/fault_tree.hpp"
#include "ftbdd/sft_analysis.hpp"
#include "ftbdd/variable_order.hpp"

namespace ftbdd {

/// An independent sub-tree: nothing outside reaches a member except through the root.
struct Module {
    NodeId root = 0;
    /// Sorted ids: the root, its descendants and the unreferenced PDEP/SEQ nodes acting only on them.
    std::vector<NodeId> members;
    /// Date of the root's first visit in the depth-first traversal.
    std::size_t firstVisit = 0;
};

/// Modules by first/last visit dates of a left-most depth-first traversal, in first-visit order.
/// The top is always a module. A gate is not reported when a PDEP or SEQ acts on nodes both inside
/// and outside it, or when it lies under a SPARE (its failure rates depend on the activation).
std::vector<Module> detectModules(FaultTree const& tree);

/// Modules that have to be solved as Markov chains. Modules are visited by decreasing size; a
/// module is dropped when the part not covered by smaller remaining modules is static. Modules
/// nested inside another kept module are dropped as well, so the result is disjoint.
std::vector<Module> selectDynamicModules(FaultTree const& tree, std::span<Module const> modules);

/// Replaces each module by a basic event carrying the table, keeping the root's name.
/// Modules must be disjoint.
FaultTree replaceModules(FaultTree const& tree, std::span<Module const> modules, std::span<TabulatedDistribution const> tables);
FaultTree replaceModule(FaultTree const& tree, Module const& module, TabulatedDistribution const& table);

/// Markov chains of solved modules, keyed by the module's Galileo text. Safe for concurrent use.
class ModuleCache {
public:
    std::shared_ptr<Ctmc const> get(FaultTree const& module, CtmcOptions const& options);

    std::size_t size() const;
    std::size_t hits() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Ctmc const>> chains_;
    std::size_t hits_ = 0;
};

struct DftAnalysisOptions {
    std::size_t chunkSize = 1024;
    bool modularise = true;
    CtmcOptions ctmc;
    /// Variable order for the final static tree.
    std::function<VariableOrder(FaultTree const&)> ordering = dfsOrder;
};

struct DftAnalysisResult {
    TimeCurve curve;
    /// States of all Markov chains used, summed.
    std::size_t ctmcStates = 0;
    /// Names of the modules that were replaced by tabulated basic events.
    std::vector<std::string> substituted;
    /// The static tree that was finally analysed with a BDD (empty when the whole tree was a chain).
    FaultTree residual;
};

/// Unreliability of a static or dynamic tree at strictly increasing time points. Static trees go
/// straight to the BDD. Dynamic modules are solved as Markov chains and substituted; with
/// modularise = false the whole dynamic tree is one chain.
DftAnalysisResult analyzeDft(FaultTree const& tree, std::span<double const> times, DftAnalysisOptions const& options = {},
                             ModuleCache* cache = nullptr);

}  // namespace ftbdd
