#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "ftbdd/ctmc.hpp"
#include "ftbdd/errors.hpp"
#include "ftbdd/galileo.hpp"
#include "support/oracles.hpp"

using namespace ftbdd;

namespace {

double failureAt(FaultTree const& tree, double t) {
    auto chain = buildCtmc(tree);
    double const times[] = {t};
    return transientFailureProbability(chain, times).values[0];
}

FaultTree parse(char const* text) {
    return parseGalileo(text).tree;
}

}  // namespace

TEST_CASE("PAND of two unit rates") {
    auto t = parse(R"(toplevel "P"; "P" pand "A" "B"; "A" lambda=1; "B" lambda=1;)");
    double expected = (1 - std::exp(-2.0)) / 2 - std::exp(-1.0) * (1 - std::exp(-1.0));
    CHECK(std::abs(failureAt(t, 1.0) - expected) <= 1e-8);
    // Both orders, the fail-safe state and the failed state are kept apart.
    CHECK(buildCtmc(t).stateCount() == 5);
}

TEST_CASE("closed forms for single dynamic gates") {
    double const t = 1.3;
    SUBCASE("POR") {
        auto tree = parse(R"(toplevel "P"; "P" por "A" "B"; "A" lambda=0.7; "B" lambda=1.1;)");
        double expected = 0.7 / 1.8 * (1 - std::exp(-1.8 * t));
        CHECK(std::abs(failureAt(tree, t) - expected) <= 1e-9);
    }
    SUBCASE("cold spare is an Erlang delay") {
        auto tree = parse(R"(toplevel "S"; "S" csp "A" "B"; "A" lambda=1; "B" lambda=1 dorm=0;)");
        double expected = 1 - std::exp(-t) * (1 + t);
        CHECK(std::abs(failureAt(tree, t) - expected) <= 1e-9);
    }
    SUBCASE("hot spare is an AND") {
        auto tree = parse(R"(toplevel "S"; "S" hsp "A" "B"; "A" lambda=1; "B" lambda=2 dorm=1;)");
        double expected = (1 - std::exp(-t)) * (1 - std::exp(-2 * t));
        CHECK(std::abs(failureAt(tree, t) - expected) <= 1e-9);
    }
    SUBCASE("warm spare") {
        double const la = 1.0;
        double const lb = 0.8;
        double const mu = 0.25;
        auto tree = parse(R"(toplevel "S"; "S" wsp "A" "B"; "A" lambda=1; "B" lambda=0.8 dorm=0.25;)");
        // Integrate over the primary's failure time s with a fine midpoint rule.
        double expected = 0.0;
        int const n = 200000;
        for (int i = 0; i < n; ++i) {
            double s = (i + 0.5) * t / n;
            double spareDead = 1 - std::exp(-mu * lb * s);
            double spareLater = std::exp(-mu * lb * s) * (1 - std::exp(-lb * (t - s)));
            expected += la * std::exp(-la * s) * (spareDead + spareLater) * (t / n);
        }
        CHECK(std::abs(failureAt(tree, t) - expected) <= 1e-8);
    }
    SUBCASE("sequence enforcing order") {
        auto tree = parse(R"(toplevel "T"; "T" and "A" "B"; "Q" seq "A" "B"; "A" lambda=1; "B" lambda=3;)");
        double expected = 1 - (3 * std::exp(-t) - 1 * std::exp(-3 * t)) / (3 - 1);
        CHECK(std::abs(failureAt(tree, t) - expected) <= 1e-9);
    }
    SUBCASE("functional dependency") {
        auto tree = parse(R"(toplevel "T"; "T" and "A" "B"; "D" fdep "C" "A"; "A" lambda=1; "B" lambda=0.5; "C" lambda=2;)");
        double expected = (1 - std::exp(-3 * t)) * (1 - std::exp(-0.5 * t));
        CHECK(std::abs(failureAt(tree, t) - expected) <= 1e-9);
    }
    SUBCASE("probabilistic dependency") {
        auto tree = parse(R"(toplevel "T"; "T" and "A" "B"; "D" pdep=0.3 "C" "A"; "A" lambda=1; "B" lambda=0.5; "C" lambda=2;)");
        double pa = 1 - std::exp(-t) * (1 - 0.3 * (1 - std::exp(-2 * t)));
        double expected = pa * (1 - std::exp(-0.5 * t));
        CHECK(std::abs(failureAt(tree, t) - expected) <= 1e-9);
    }
    SUBCASE("static gates") {
        auto tree = parse(R"(toplevel "V"; "V" 2of3 "A" "B" "C"; "A" lambda=1; "B" lambda=1; "C" lambda=1;)");
        double p = 1 - std::exp(-t);
        double expected = 3 * p * p * (1 - p) + p * p * p;
        CHECK(std::abs(failureAt(tree, t) - expected) <= 1e-9);
    }
}

TEST_CASE("dynamic gates agree with simulation") {
    char const* fixtures[] = {
        R"(toplevel "P"; "P" pand "A" "B" "C"; "A" lambda=1; "B" lambda=1.5; "C" lambda=2;)",
        R"(toplevel "T"; "T" or "S1" "S2"; "S1" wsp "A" "C"; "S2" wsp "B" "C"; "A" lambda=1; "B" lambda=1.2; "C" lambda=0.6 dorm=0.3;)",
        R"(toplevel "T"; "T" and "S" "D"; "S" wsp "A" "G"; "G" and "B" "C"; "A" lambda=1; "B" lambda=2 dorm=0.5; "C" lambda=1 dorm=0; "D" lambda=0.4;)",
        R"(toplevel "T"; "T" or "P" "Q"; "P" por "A" "B"; "Q" pand "B" "C"; "Dep" pdep=0.5 "C" "A"; "A" lambda=0.5; "B" lambda=1; "C" lambda=1;)",
    };
    double const horizon = 1.5;
    std::size_t const samples = 200000;
    for (char const* text : fixtures) {
        auto tree = parse(text);
        double exact = failureAt(tree, horizon);
        testing::DftSimulator sim(tree);
        double estimate = sim.estimate(horizon, samples, 99);
        double sigma = std::sqrt(exact * (1 - exact) / static_cast<double>(samples));
        CHECK_MESSAGE(std::abs(estimate - exact) <= 4 * sigma + 1e-12, text);
    }
}

TEST_CASE("probability mass is conserved") {
    auto t = parse(R"(toplevel "T"; "T" or "S1" "P"; "S1" wsp "A" "B"; "P" pand "C" "D"; "F" pdep=0.4 "C" "A";
"A" lambda=1; "B" lambda=0.5 dorm=0.2; "C" lambda=2; "D" lambda=0.3;)");
    auto chain = buildCtmc(t);
    for (double time : {0.0, 0.3, 2.0, 20.0}) {
        auto pi = transientDistribution(chain, time);
        double sum = std::accumulate(pi.begin(), pi.end(), 0.0);
        CHECK(std::abs(sum - 1.0) <= 1e-9);
        for (double p : pi) {
            CHECK(p >= -1e-15);
        }
    }
}

TEST_CASE("curves are monotone and start at zero") {
    auto t = parse(R"(toplevel "T"; "T" or "S1" "P"; "S1" wsp "A" "B"; "P" pand "C" "D";
"A" lambda=1; "B" lambda=0.5 dorm=0.2; "C" lambda=2; "D" lambda=0.3;)");
    auto chain = buildCtmc(t);
    std::vector<double> times;
    for (int i = 0; i <= 50; ++i) {
        times.push_back(0.2 * i);
    }
    auto curve = transientFailureProbability(chain, times);
    CHECK(curve.values.front() == 0.0);
    for (std::size_t i = 1; i < curve.values.size(); ++i) {
        CHECK(curve.values[i] >= curve.values[i - 1] - 1e-12);
    }
}

TEST_CASE("failed states absorb") {
    auto t = parse(R"(toplevel "T"; "T" or "A" "B"; "A" lambda=1; "B" lambda=1;)");
    auto chain = buildCtmc(t);
    for (std::size_t s = 0; s < chain.stateCount(); ++s) {
        if (chain.failed[s]) {
            CHECK(chain.exitRate(s) == 0.0);
        }
    }
    CHECK(chain.stateCount() == 3);
}

TEST_CASE("cold spare children do not fail while dormant") {
    auto t = parse(R"(toplevel "S"; "S" csp "A" "B"; "A" lambda=1; "B" lambda=1 dorm=0;)");
    auto chain = buildCtmc(t);
    // Initial state: only the primary can fail.
    CHECK(chain.rowStart[1] - chain.rowStart[0] == 1);
    CHECK(chain.exitRate(0) == 1.0);
}

TEST_CASE("state cap and input checks") {
    auto t = parse(R"(toplevel "T"; "T" pand "A" "B" "C" "D"; "A" lambda=1; "B" lambda=1; "C" lambda=1; "D" lambda=1;)");
    CtmcOptions small;
    small.maxStates = 4;
    CHECK_THROWS_AS(buildCtmc(t, small), LimitExceeded);

    auto p = parse(R"(toplevel "T"; "T" pand "A" "B"; "A" prob=0.5; "B" lambda=1;)");
    CHECK_THROWS_AS(buildCtmc(p), AnalysisError);

    auto chain = buildCtmc(parse(R"(toplevel "T"; "T" and "A" "B"; "A" lambda=1; "B" lambda=1;)"));
    std::vector<double> backwards{1.0, 0.5};
    CHECK_THROWS_AS(transientFailureProbability(chain, backwards), std::invalid_argument);
}

TEST_CASE("Poisson weights") {
    for (double q : {0.0, 1e-6, 0.5, 3.0, 40.0, 900.0}) {
        auto w = poissonWeights(q, 1e-10);
        double sum = std::accumulate(w.weights.begin(), w.weights.end(), 0.0);
        CHECK(sum >= 1.0 - 1e-10);
        CHECK(sum <= 1.0 + 1e-12);
        if (q > 0) {
            std::size_t mode = static_cast<std::size_t>(q);
            CHECK(w.left <= mode);
            CHECK(w.left + w.weights.size() > mode);
            double exact = std::exp(-q + static_cast<double>(mode) * std::log(q) - std::lgamma(static_cast<double>(mode) + 1));
            CHECK(w.weights[mode - w.left] == doctest::Approx(exact).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(poissonWeights(-1.0), std::invalid_argument);
}

TEST_CASE("written chains list transitions and states") {
    auto t = parse(R"(toplevel "P"; "P" pand "A" "B"; "A" lambda=1; "B" lambda=2;)");
    CtmcOptions options;
    options.keepLabels = true;
    auto chain = buildCtmc(t, options);
    std::ostringstream out;
    writeCtmc(out, chain);
    auto text = out.str();
    CHECK(text.find("0 1 ") != std::string::npos);
    CHECK(text.find("failed") != std::string::npos);
    CHECK(text.find("state 0") != std::string::npos);
}
