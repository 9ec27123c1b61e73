#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "ftbdd/galileo.hpp"
#include "ftbdd/variable_order.hpp"
#include "support/random_trees.hpp"

using namespace ftbdd;

namespace {

FaultTree sample() {
    return parseGalileo(R"(toplevel "T";
"T" and "G" "H";
"G" 2of3 "F" "C" "D";
"H" or "D" "E";
"F" or "A" "B";
"E" lambda=0.5; "D" lambda=0.4; "C" lambda=0.3; "B" lambda=0.2; "A" lambda=0.1;
)")
        .tree;
}

}  // namespace

TEST_CASE("depth-first order") {
    auto t = sample();
    CHECK(dfsOrder(t).names(t) == std::vector<std::string>{"A", "B", "C", "D", "E"});
}

TEST_CASE("top-down left-right order") {
    auto t = sample();
    CHECK(tdlrOrder(t).names(t) == std::vector<std::string>{"C", "D", "E", "A", "B"});
}

TEST_CASE("levels") {
    auto t = sample();
    auto order = dfsOrder(t);
    CHECK(order.levelOf(t.id("C")) == 2);
    CHECK(order.at(4) == t.id("E"));
    CHECK_THROWS_AS(order.levelOf(t.id("G")), std::out_of_range);
}

TEST_CASE("explicit orders") {
    auto t = sample();
    std::vector<std::string> names{"E", "D", "C", "B", "A"};
    CHECK(orderFromList(t, names).names(t) == names);
    std::vector<std::string> missing{"E", "D", "C", "B"};
    CHECK_THROWS_AS(orderFromList(t, missing), std::invalid_argument);
    std::vector<std::string> foreign{"E", "D", "C", "B", "A", "Z"};
    CHECK_THROWS_AS(orderFromList(t, foreign), std::invalid_argument);
    std::vector<std::string> twice{"E", "D", "C", "B", "B"};
    CHECK_THROWS_AS(orderFromList(t, twice), std::invalid_argument);
    std::vector<std::string> gate{"E", "D", "C", "B", "A", "G"};
    CHECK_THROWS_AS(orderFromList(t, gate), std::invalid_argument);
}

TEST_CASE("order files") {
    auto t = sample();
    auto path = std::filesystem::temp_directory_path() / "ftbdd_order.txt";
    {
        std::ofstream out(path);
        out << "\"B\"\nA\n\nC\nE\nD\n";
    }
    CHECK(orderFromFile(t, path.string()).names(t) == std::vector<std::string>{"B", "A", "C", "E", "D"});
    std::filesystem::remove(path);
    CHECK_THROWS(orderFromFile(t, path.string()));
}

TEST_CASE("single basic event") {
    FaultTree t;
    t.setTop(t.addBasicEvent("A", 1.0));
    CHECK(dfsOrder(t).size() == 1);
    CHECK(tdlrOrder(t).size() == 1);
}

TEST_CASE("both heuristics give permutations of the basic events") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        auto t = testing::randomStaticTree(rng, 3 + static_cast<std::size_t>(i % 10), 2 + static_cast<std::size_t>(i % 5));
        auto events = t.basicEvents();
        for (auto const& order : {dfsOrder(t), tdlrOrder(t)}) {
            auto sorted = order.events();
            std::sort(sorted.begin(), sorted.end());
            CHECK(sorted == events);
        }
    }
}

TEST_CASE("depth-first order lists events by first visit") {
    auto t = sample();
    // The first child's events all precede the second child's new events.
    auto order = dfsOrder(t);
    CHECK(order.levelOf(t.id("A")) < order.levelOf(t.id("E")));
    CHECK(order.levelOf(t.id("D")) < order.levelOf(t.id("E")));
}

TEST_CASE("deterministic") {
    std::mt19937_64 rng(5);
    auto t = testing::randomStaticTree(rng, 10, 6);
    CHECK(dfsOrder(t).events() == dfsOrder(t).events());
    CHECK(tdlrOrder(t).events() == tdlrOrder(t).events());
}
