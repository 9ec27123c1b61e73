#include "ftbdd/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <fstream>
#include <memory>
#include <json.hpp>
#include <set>
#include <stdexcept>

#include "ftbdd/ctmc.hpp"
#include "ftbdd/errors.hpp"
#include "ftbdd/galileo.hpp"
#include "ftbdd/modularisation.hpp"
#include "ftbdd/sft_analysis.hpp"
#include "ftbdd/sft_to_bdd.hpp"
#include "ftbdd/variable_order.hpp"

namespace ftbdd::cli {

namespace {

using nlohmann::ordered_json;

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

std::string formatDouble(double value) {
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, end);
}

std::string csvField(std::string const& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) {
        return text;
    }
    std::string quoted = "\"";
    for (char c : text) {
        quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
    }
    return quoted + "\"";
}

std::ofstream openOutput(std::string const& path) {
    std::ofstream file(path);
    if (!file) {
        throw std::invalid_argument("cannot write '" + path + "'");
    }
    return file;
}

/// Order for `tree` from the request. For trees produced by module substitution, names that
/// no longer exist are skipped and missing events follow in depth-first order.
class OrderingChoice {
public:
    OrderingChoice(std::string choice, GalileoModel const& model) : choice_(std::move(choice)) {
        if (choice_ == "input") {
            for (NodeId id : model.basicEventOrder) {
                names_.push_back(model.tree.node(id).name);
            }
        } else if (choice_ != "dfs" && choice_ != "tdlr") {
            std::ifstream file(choice_);
            if (!file) {
                throw std::invalid_argument("cannot read order file '" + choice_ + "'");
            }
            names_ = orderFromFile(model.tree, choice_).names(model.tree);
        }
    }

    VariableOrder operator()(FaultTree const& tree) const {
        if (choice_ == "dfs") {
            return dfsOrder(tree);
        }
        if (choice_ == "tdlr") {
            return tdlrOrder(tree);
        }
        std::vector<NodeId> events;
        std::set<NodeId> seen;
        for (auto const& name : names_) {
            auto id = tree.find(name);
            if (id && tree.node(*id).type == NodeType::BasicEvent && seen.insert(*id).second) {
                events.push_back(*id);
            }
        }
        auto const fallback = dfsOrder(tree);
        for (NodeId id : fallback.events()) {
            if (seen.insert(id).second) {
                events.push_back(id);
            }
        }
        return VariableOrder(tree, std::move(events));
    }

private:
    std::string choice_;
    std::vector<std::string> names_;
};

struct StaticModel {
    VariableOrder order;
    std::unique_ptr<BddManager> manager;
    Bdd top;
    std::vector<FailureDistribution> distributions;
};

StaticModel buildStatic(FaultTree const& tree, VariableOrder order, AnalysisRequest const& request) {
    StaticModel model{std::move(order), nullptr, Bdd{}, {}};
    model.manager = std::make_unique<BddManager>(model.order.names(tree));
    model.top = translate(tree, model.order, *model.manager, TranslationOptions{request.cacheGates});
    model.distributions = levelDistributions(tree, model.order);
    return model;
}

void dumpBdd(AnalysisRequest const& request, StaticModel const& model) {
    if (!request.dumpBdd.empty()) {
        auto file = openOutput(request.dumpBdd);
        model.manager->writeDot(file, model.top);
    }
}

void dumpChains(AnalysisRequest const& request, FaultTree const& tree) {
    if (request.dumpCtmc.empty()) {
        return;
    }
    auto file = openOutput(request.dumpCtmc);
    CtmcOptions options{request.maxStates, true};
    std::vector<NodeId> roots;
    if (request.modularise) {
        auto modules = detectModules(tree);
        for (auto const& module : selectDynamicModules(tree, modules)) {
            roots.push_back(module.root);
        }
    } else {
        roots.push_back(tree.top());
    }
    for (NodeId root : roots) {
        file << "# module " << tree.node(root).name << "\n";
        writeCtmc(file, buildCtmc(subTree(tree, root), options));
    }
}

void requireStatic(FaultTree const& tree, std::string const& metric) {
    if (!isStatic(tree)) {
        throw UsageError("metric '" + metric + "' needs a static fault tree; the model has dynamic gates");
    }
}

void requireChoice(std::string const& value, std::initializer_list<char const*> choices, std::string const& what) {
    for (char const* choice : choices) {
        if (value == choice) {
            return;
        }
    }
    throw UsageError("unknown " + what + " '" + value + "'");
}

TimeCurve dynamicCurve(AnalysisRequest const& request, GalileoModel const& model, std::span<double const> times, OrderingChoice const& ordering) {
    DftAnalysisOptions options;
    options.chunkSize = request.chunkSize;
    options.modularise = request.modularise;
    options.ctmc.maxStates = request.maxStates;
    options.ordering = ordering;
    auto result = analyzeDft(model.tree, times, options);
    if (!request.dumpBdd.empty() && result.residual.hasTop()) {
        dumpBdd(request, buildStatic(result.residual, ordering(result.residual), request));
    }
    dumpChains(request, model.tree);
    return std::move(result.curve);
}

TimeCurve curveFor(AnalysisRequest const& request, GalileoModel const& model, std::span<double const> times, OrderingChoice const& ordering) {
    if (!isStatic(model.tree)) {
        return dynamicCurve(request, model, times, ordering);
    }
    auto sft = buildStatic(model.tree, ordering(model.tree), request);
    dumpBdd(request, sft);
    return unreliabilityCurve(*sft.manager, sft.top, sft.distributions, times, request.chunkSize);
}

void writeCurve(std::ostream& out, TimeCurve const& curve) {
    out << "time,probability\n";
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
        out << formatDouble(curve.times[i]) << "," << formatDouble(curve.values[i]) << "\n";
    }
}

int analyze(AnalysisRequest const& request, std::ostream& out) {
    requireChoice(request.metric, {"mcs", "unreliability", "curve", "importance", "mttf"}, "metric");
    requireChoice(request.format, {"json", "csv"}, "format");
    requireChoice(request.method, {"limit", "substitution"}, "method");
    if (request.chunkSize == 0) {
        throw UsageError("chunk size must be positive");
    }
    if (!(request.time >= 0.0)) {
        throw UsageError("time must be nonnegative");
    }
    auto const measure = parseImportanceMeasure(request.measure);

    GalileoModel const model = parseGalileoFile(request.input);
    OrderingChoice const ordering(request.ordering, model);
    bool const csv = request.format == "csv";

    ordered_json doc;
    doc["metric"] = request.metric;
    doc["model"] = request.input;
    ordered_json parameters = {{"ordering", request.ordering}, {"chunk_size", request.chunkSize}};

    if (request.metric == "mcs") {
        requireStatic(model.tree, request.metric);
        auto sft = buildStatic(model.tree, ordering(model.tree), request);
        dumpBdd(request, sft);
        Bdd minimal = sft.manager->minsol(sft.top);
        auto solutions = sft.manager->enumerate_solutions(minimal, request.maxSolutions);
        ordered_json sets = ordered_json::array();
        for (auto const& solution : solutions) {
            if (request.maxOrder && solution.size() > *request.maxOrder) {
                continue;
            }
            std::vector<std::string> names;
            for (auto level : solution) {
                names.push_back(model.tree.node(sft.order.at(level)).name);
            }
            if (csv) {
                for (std::size_t i = 0; i < names.size(); ++i) {
                    out << (i ? "," : "") << csvField(names[i]);
                }
                out << "\n";
            }
            sets.push_back(names);
        }
        if (request.maxOrder) {
            parameters["max_order"] = *request.maxOrder;
        }
        doc["results"] = std::move(sets);
    } else if (request.metric == "unreliability") {
        double const times[] = {request.time};
        auto curve = curveFor(request, model, times, ordering);
        parameters["time"] = request.time;
        parameters["modularisation"] = request.modularise;
        if (csv) {
            writeCurve(out, curve);
        }
        doc["results"] = {{"time", request.time}, {"probability", curve.values.front()}};
    } else if (request.metric == "curve") {
        if (request.points == 0 || !(request.horizon >= 0.0) || (request.points > 1 && !(request.horizon > 0.0))) {
            throw UsageError("curve needs at least one point and a positive horizon");
        }
        auto times = uniformTimes(request.horizon, request.points);
        auto curve = curveFor(request, model, times, ordering);
        parameters["horizon"] = request.horizon;
        parameters["points"] = request.points;
        parameters["modularisation"] = request.modularise;
        if (csv) {
            writeCurve(out, curve);
        }
        doc["results"] = {{"times", curve.times}, {"probabilities", curve.values}};
    } else if (request.metric == "importance") {
        requireStatic(model.tree, request.metric);
        auto sft = buildStatic(model.tree, ordering(model.tree), request);
        dumpBdd(request, sft);
        auto probabilities = levelProbabilities(sft.distributions, request.time);
        ordered_json rows = ordered_json::array();
        if (csv) {
            out << "be,value\n";
        }
        for (NodeId id : model.basicEventOrder) {
            double value = importance(*sft.manager, sft.top, sft.order.levelOf(id), probabilities, measure);
            auto const& name = model.tree.node(id).name;
            if (csv) {
                out << csvField(name) << "," << formatDouble(value) << "\n";
            }
            rows.push_back({{"be", name}, {"value", value}});
        }
        parameters["measure"] = std::string(toString(measure));
        parameters["time"] = request.time;
        doc["results"] = std::move(rows);
    } else {
        requireStatic(model.tree, request.metric);
        auto sft = buildStatic(model.tree, ordering(model.tree), request);
        dumpBdd(request, sft);
        double value = 0.0;
        parameters["method"] = request.method;
        if (request.method == "limit") {
            MttfLimitOptions options;
            options.epsilon = request.epsilon;
            options.initialStep = request.initialStep;
            options.chunkSize = request.chunkSize;
            value = mttfLimit(*sft.manager, sft.top, sft.distributions, options);
            parameters["epsilon"] = request.epsilon;
            parameters["initial_step"] = request.initialStep;
        } else {
            value = mttfSubstitution(*sft.manager, sft.top, sft.distributions, request.samples, request.chunkSize);
            parameters["samples"] = request.samples;
        }
        if (csv) {
            out << "mttf\n" << formatDouble(value) << "\n";
        }
        doc["results"] = {{"mttf", value}};
    }

    if (!csv) {
        doc["parameters"] = std::move(parameters);
        ordered_json ordered;
        for (char const* key : {"metric", "model", "parameters", "results"}) {
            ordered[key] = std::move(doc[key]);
        }
        out << ordered.dump(2) << "\n";
    }
    return 0;
}

}  // namespace

int run(AnalysisRequest const& request, std::ostream& out, std::ostream& err) {
    try {
        return analyze(request, out);
    } catch (AnalysisError const& e) {
        err << "ftbdd: analysis failed: " << e.what() << "\n";
        return 2;
    } catch (ParseError const& e) {
        err << "ftbdd: " << request.input << ":" << e.what() << "\n";
        return 1;
    } catch (std::exception const& e) {
        err << "ftbdd: " << e.what() << "\n";
        return 1;
    }
}

int runCommandLine(std::vector<std::string> const& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fault tree analysis with binary decision diagrams and Markov chains", "ftbdd"};
    app.require_subcommand(1);
    AnalysisRequest request;
    std::size_t maxOrder = 0;

    auto* analyze = app.add_subcommand("analyze", "Analyse a Galileo model");
    analyze->add_option("metric", request.metric, "mcs | unreliability | curve | importance | mttf")->required();
    analyze->add_option("model", request.input, "Galileo file, or - for standard input")->required();
    analyze->add_option("--ordering", request.ordering, "dfs | tdlr | input | order file")->capture_default_str();
    analyze->add_option("--time", request.time, "Mission time")->capture_default_str();
    analyze->add_option("--horizon", request.horizon, "Curve horizon")->capture_default_str();
    analyze->add_option("--points", request.points, "Curve points")->capture_default_str();
    analyze->add_option("--measure", request.measure, "birnbaum | cif | vf | raw | rrw")->capture_default_str();
    analyze->add_option("--method", request.method, "MTTF method: limit | substitution")->capture_default_str();
    analyze->add_option("--epsilon", request.epsilon, "MTTF panel threshold")->capture_default_str();
    analyze->add_option("--initial-step", request.initialStep, "MTTF first panel width")->capture_default_str();
    analyze->add_option("--samples", request.samples, "MTTF substitution samples")->capture_default_str();
    analyze->add_option("--chunk-size", request.chunkSize, "Time points per BDD pass")->capture_default_str();
    analyze->add_flag("--no-modularisation", "Solve dynamic trees as a single Markov chain");
    analyze->add_option("--format", request.format, "json | csv")->capture_default_str();
    analyze->add_option("--dump-bdd", request.dumpBdd, "Write the BDD in dot format");
    analyze->add_option("--dump-ctmc", request.dumpCtmc, "Write the Markov chains");
    analyze->add_flag("--cache-gates", request.cacheGates, "Keep the BDD of every gate");
    auto* maxOrderOption = analyze->add_option("--max-order", maxOrder, "Largest cut set to report");
    analyze->add_option("--max-solutions", request.maxSolutions, "Cut set enumeration cap")->capture_default_str();
    analyze->add_option("--max-states", request.maxStates, "Markov chain state cap")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (CLI::CallForHelp const&) {
        out << app.help();
        return 0;
    } catch (CLI::CallForAllHelp const&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (CLI::ParseError const& e) {
        err << "ftbdd: " << e.what() << "\n";
        if (analyze->parsed()) {
            err << analyze->help();
        } else {
            err << app.help();
        }
        return 1;
    }
    request.modularise = analyze->count("--no-modularisation") == 0;
    if (maxOrderOption->count() > 0) {
        request.maxOrder = maxOrder;
    }
    return run(request, out, err);
}

}  // namespace ftbdd::cli
