#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "ftbdd/galileo.hpp"
#include "ftbdd/modularisation.hpp"
#include "ftbdd/sft_to_bdd.hpp"
#include "support/random_trees.hpp"

using namespace ftbdd;

namespace {

constexpr char const* kDft = R"(toplevel "T";
"T" or "G" "K" "S";
"G" and "A" "B";
"K" and "B" "H";
"H" pand "C" "D";
"S" wsp "E" "F";
"A" lambda=0.1; "B" lambda=0.2; "C" lambda=0.5; "D" lambda=0.4; "E" lambda=0.3; "F" lambda=0.3 dorm=0.5;
)";

std::set<std::string> roots(FaultTree const& t, std::vector<Module> const& modules) {
    std::set<std::string> names;
    for (auto const& m : modules) {
        names.insert(t.node(m.root).name);
    }
    return names;
}

std::vector<double> grid(std::size_t n, double horizon) {
    std::vector<double> times;
    for (std::size_t i = 1; i <= n; ++i) {
        times.push_back(horizon * static_cast<double>(i) / static_cast<double>(n));
    }
    return times;
}

}  // namespace

TEST_CASE("modules of the example tree") {
    auto t = parseGalileo(kDft).tree;
    auto modules = detectModules(t);
    auto names = roots(t, modules);
    CHECK(names.count("T"));
    CHECK(names.count("H"));
    CHECK(names.count("S"));
    CHECK_FALSE(names.count("G"));
    CHECK_FALSE(names.count("K"));
    for (auto const& m : modules) {
        if (t.node(m.root).name == "H") {
            CHECK(m.members == descendantsOf(t, m.root));
            CHECK(m.members.size() == 3);
        }
    }
    CHECK(modules.front().root == t.top());
}

TEST_CASE("dynamic module selection and replacement of the example tree") {
    auto t = parseGalileo(kDft).tree;
    auto modules = detectModules(t);
    auto selected = selectDynamicModules(t, modules);
    CHECK(roots(t, selected) == std::set<std::string>{"H", "S"});

    std::vector<double> times{1.0};
    std::vector<TabulatedDistribution> tables(selected.size(), TabulatedDistribution{{1.0}, {0.5}});
    auto replaced = replaceModules(t, selected, tables);
    CHECK(validate(replaced).ok());
    CHECK(isStatic(replaced));
    CHECK(replaced.size() == t.size() - 6 + 2);
    CHECK(replaced.node(replaced.top()).children.size() == 3);
    CHECK((replaced.node(replaced.id("H")).type == NodeType::BasicEvent));
    CHECK((replaced.node(replaced.id("S")).type == NodeType::BasicEvent));
    CHECK_FALSE(replaced.find("C"));
    CHECK_FALSE(replaced.find("F"));
}

TEST_CASE("every gate of a strict tree is a module") {
    auto t = parseGalileo(R"(toplevel "T"; "T" or "G" "H"; "G" and "A" "B"; "H" and "C" "D";
"A" lambda=1; "B" lambda=1; "C" lambda=1; "D" lambda=1;)")
                 .tree;
    CHECK(roots(t, detectModules(t)) == std::set<std::string>{"T", "G", "H"});
    CHECK(selectDynamicModules(t, detectModules(t)).empty());
}

TEST_CASE("dependencies and sequences couple their nodes") {
    auto t = parseGalileo(R"(toplevel "T"; "T" or "G" "H"; "G" pand "A" "B"; "H" and "C" "D";
"Dep" fdep "C" "A";
"A" lambda=1; "B" lambda=1; "C" lambda=1; "D" lambda=1;)")
                 .tree;
    auto names = roots(t, detectModules(t));
    CHECK_FALSE(names.count("G"));
    CHECK_FALSE(names.count("H"));
    CHECK(roots(t, selectDynamicModules(t, detectModules(t))) == std::set<std::string>{"T"});

    auto u = parseGalileo(R"(toplevel "T"; "T" or "G" "H"; "G" pand "A" "B"; "H" and "C" "D";
"Dep" fdep "A" "B";
"A" lambda=1; "B" lambda=1; "C" lambda=1; "D" lambda=1;)")
                 .tree;
    auto modules = detectModules(u);
    CHECK(roots(u, modules).count("G"));
    for (auto const& m : modules) {
        if (u.node(m.root).name == "G") {
            CHECK(std::binary_search(m.members.begin(), m.members.end(), u.id("Dep")));
        }
    }
}

TEST_CASE("gates below a spare are not modules") {
    auto t = parseGalileo(R"(toplevel "T"; "T" or "S" "X"; "S" wsp "A" "G"; "G" and "B" "C";
"A" lambda=1; "B" lambda=1 dorm=0.5; "C" lambda=1 dorm=0.5; "X" lambda=1;)")
                 .tree;
    auto names = roots(t, detectModules(t));
    CHECK(names.count("S"));
    CHECK_FALSE(names.count("G"));
}

TEST_CASE("a shared spare keeps both spares together") {
    auto t = parseGalileo(R"(toplevel "T"; "T" or "S1" "S2"; "S1" wsp "A" "C"; "S2" wsp "B" "C";
"A" lambda=1; "B" lambda=1; "C" lambda=1;)")
                 .tree;
    auto names = roots(t, detectModules(t));
    CHECK_FALSE(names.count("S1"));
    CHECK_FALSE(names.count("S2"));
}

TEST_CASE("a dynamic top takes the whole tree") {
    auto t = parseGalileo(R"(toplevel "T"; "T" pand "G" "H"; "G" pand "A" "B"; "H" and "C" "D";
"A" lambda=1; "B" lambda=1; "C" lambda=1; "D" lambda=1;)")
                 .tree;
    auto selected = selectDynamicModules(t, detectModules(t));
    REQUIRE(selected.size() == 1);
    CHECK(selected[0].root == t.top());
    auto times = grid(5, 3.0);
    auto result = analyzeDft(t, times);
    auto chain = buildCtmc(t);
    auto direct = transientFailureProbability(chain, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(std::abs(result.curve.values[i] - direct.values[i]) <= 1e-12);
    }
    auto replaced = replaceModules(t, selected, std::vector<TabulatedDistribution>{TabulatedDistribution{times, direct.values}});
    CHECK(replaced.size() == 1);
}

TEST_CASE("static trees take the plain BDD route") {
    auto t = parseGalileo(R"(toplevel "T"; "T" or "G" "C"; "G" and "A" "B"; "A" lambda=1; "B" lambda=2; "C" lambda=0.5;)").tree;
    auto times = grid(10, 4.0);
    auto result = analyzeDft(t, times);
    CHECK(result.ctmcStates == 0);
    for (std::size_t i = 0; i < times.size(); ++i) {
        double x = times[i];
        double expected = 1 - (1 - (1 - std::exp(-x)) * (1 - std::exp(-2 * x))) * std::exp(-0.5 * x);
        CHECK(std::abs(result.curve.values[i] - expected) <= 1e-12);
    }
}

TEST_CASE("the example tree agrees with the monolithic chain") {
    auto t = parseGalileo(kDft).tree;
    auto times = grid(10, 5.0);
    auto modular = analyzeDft(t, times);
    DftAnalysisOptions mono;
    mono.modularise = false;
    auto whole = analyzeDft(t, times, mono);
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(std::abs(modular.curve.values[i] - whole.curve.values[i]) <= 1e-8);
    }
    CHECK(modular.ctmcStates < whole.ctmcStates);
    CHECK(std::set<std::string>(modular.substituted.begin(), modular.substituted.end()) == std::set<std::string>{"H", "S"});
}

TEST_CASE("random dynamic trees agree with the monolithic chain") {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 25; ++i) {
        auto t = testing::randomDynamicTree(rng, 12);
        REQUIRE_MESSAGE(validate(t).ok(), validate(t).describe());
        auto times = grid(6, 3.0);
        auto modular = analyzeDft(t, times);
        DftAnalysisOptions mono;
        mono.modularise = false;
        auto whole = analyzeDft(t, times, mono);
        for (std::size_t k = 0; k < times.size(); ++k) {
            CHECK_MESSAGE(std::abs(modular.curve.values[k] - whole.curve.values[k]) <= 1e-8, serializeGalileo(t));
        }
    }
}

TEST_CASE("module chains are cached") {
    auto t = parseGalileo(kDft).tree;
    ModuleCache cache;
    auto times = grid(3, 1.0);
    auto first = analyzeDft(t, times, {}, &cache);
    CHECK(cache.size() == 2);
    CHECK(cache.hits() == 0);
    auto second = analyzeDft(t, times, {}, &cache);
    CHECK(cache.hits() == 2);
    CHECK(first.curve.values == second.curve.values);
}

TEST_CASE("replacement preserves the node count arithmetic") {
    auto t = parseGalileo(kDft).tree;
    auto selected = selectDynamicModules(t, detectModules(t));
    for (auto const& module : selected) {
        auto replaced = replaceModule(t, module, TabulatedDistribution{{1.0}, {0.1}});
        CHECK(replaced.size() == t.size() - module.members.size() + 1);
        CHECK(validate(replaced).ok());
    }
}

TEST_CASE("input checks") {
    auto t = parseGalileo(kDft).tree;
    std::vector<double> none;
    CHECK_THROWS_AS(analyzeDft(t, none), std::invalid_argument);
    std::vector<double> repeated{1.0, 1.0};
    CHECK_THROWS_AS(analyzeDft(t, repeated), std::invalid_argument);
}
