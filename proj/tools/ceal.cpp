// Command-line front end: learn one configuration, sweep a grid, or compare two machines.

#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "ceal/dot.hpp"
#include "ceal/harness.hpp"

namespace {

using namespace ceal;

std::vector<std::uint64_t> seeds_from(const std::string& text) {
    // Same syntax as the grid config: "1..50" or a list.
    return parse_grid_config("targets = x.dot\nseeds = " + text).seeds;
}

void write_out(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write " + path);
    out << text;
}

struct Aligned {
    MealyMachine left, right;
    Alphabet outputs;
};

/// Re-expresses both machines over one output alphabet: a's names, then b's extras.
Aligned common_outputs(const MealyModel& a, const MealyModel& b) {
    if (a.inputs != b.inputs) throw std::invalid_argument("input alphabets differ");
    std::vector<std::string> names = a.outputs.names();
    std::map<std::string, Symbol> index;
    for (Symbol s = 0; s < names.size(); ++s) index[names[s]] = s;
    for (const auto& n : b.outputs.names()) {
        if (index.emplace(n, static_cast<Symbol>(names.size())).second) names.push_back(n);
    }
    const auto remap = [&](const MealyModel& m) {
        MealyMachine out(m.machine.num_states(), m.machine.num_inputs(), names.size(),
                         m.machine.initial());
        for (StateId q = 0; q < m.machine.num_states(); ++q) {
            for (Symbol x = 0; x < m.machine.num_inputs(); ++x) {
                out.set_transition(q, x, m.machine.next(q, x),
                                   index.at(m.outputs.name(m.machine.output(q, x))));
            }
        }
        return out;
    };
    return {remap(a), remap(b), Alphabet(names)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Learn Mealy machines from noisy systems"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "learn one configuration over a set of seeds");
    std::string target, framework = "CEAL", learner = "LSTAR_RS", repeats = "5:10",
                noise = "none", update = "most_recent", selection = "most_frequent",
                sampler = "randomized_wp", seeds = "1", format = "csv", output, runs_log;
    double noise_level = 0.0, mean_infix = 4.0, revision_ratio = 0.0;
    std::size_t max_len = 64;
    std::uint64_t k_survive = 200, max_queries = 200000;
    run->add_option("--target", target, "DOT file of the target machine")->required()->check(CLI::ExistingFile);
    run->add_option("--framework", framework, "MAT or CEAL")->capture_default_str();
    run->add_option("--learner", learner, "LSTAR_RS or KV")->capture_default_str();
    run->add_option("--repeats", repeats, "MAT voting min:max")->capture_default_str();
    run->add_option("--noise", noise, "none, input or output")->capture_default_str();
    run->add_option("--noise-level", noise_level, "per-symbol noise probability")->capture_default_str();
    run->add_option("--update", update, "most_recent or most_frequent")->capture_default_str();
    run->add_option("--selection", selection, "most_recent or most_frequent")->capture_default_str();
    run->add_option("--sampler", sampler, "randomized_wp or random_walk")->capture_default_str();
    run->add_option("--mean-infix", mean_infix)->capture_default_str();
    run->add_option("--max-len", max_len)->capture_default_str();
    run->add_option("--revision-ratio", revision_ratio)->capture_default_str();
    run->add_option("--k-survive", k_survive)->capture_default_str();
    run->add_option("--max-queries", max_queries)->capture_default_str();
    run->add_option("--seeds", seeds, "e.g. 1..50 or 3,7,9")->capture_default_str();
    run->add_option("--format", format, "csv or json")->capture_default_str();
    run->add_option("-o,--output", output, "report file (default stdout)");
    run->add_option("--runs-log", runs_log, "write one JSON line per run");

    // grid
    auto* grid = app.add_subcommand("grid", "sweep the cells of a grid config file");
    std::string grid_path;
    unsigned threads = 0;
    grid->add_option("config", grid_path, "grid config file")->required()->check(CLI::ExistingFile);
    grid->add_option("--format", format, "csv or json")->capture_default_str();
    grid->add_option("-o,--output", output, "report file (default stdout)");
    grid->add_option("--threads", threads, "override the config's thread count");

    // check
    auto* check = app.add_subcommand("check", "compare two DOT machines for equivalence");
    std::string left, right;
    check->add_option("left", left)->required()->check(CLI::ExistingFile);
    check->add_option("right", right)->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const MealyModel model = load_dot(target);
            ExperimentConfig cfg;
            cfg.experiment = std::filesystem::path(target).stem().string();
            cfg.framework = parse_framework(framework);
            cfg.learner = parse_learner_kind(learner);
            cfg.repeats = parse_repeat_policy(repeats);
            cfg.noise = NoiseModel{parse_noise_kind(noise), noise_level};
            cfg.update = parse_update_strategy(update);
            cfg.selection = parse_selection_strategy(selection);
            cfg.sampler = SamplerConfig{parse_sampler_method(sampler), mean_infix, max_len};
            cfg.revision_ratio = revision_ratio;
            cfg.k_survive = k_survive;
            cfg.max_queries = max_queries;
            cfg.validate();
            const ReportFormat fmt = parse_report_format(format);

            std::vector<RunResult> results;
            std::string log;
            for (std::uint64_t s : seeds_from(seeds)) {
                results.push_back(run_experiment(cfg, model.machine, s));
                log += "{\"seed\":" + std::to_string(s) + ",\"result\":" + to_json(results.back()) + "}\n";
            }
            if (!runs_log.empty()) write_out(log, runs_log);
            write_out(emit_report({aggregate(cfg, results)}, fmt), output);
            return 0;
        }
        if (*grid) {
            GridConfig g = load_grid_config(grid_path);
            if (threads > 0) g.threads = threads;
            const ReportFormat fmt = parse_report_format(format);
            const auto rows = run_grid(g);
            write_out(emit_report(rows, fmt), output);
            for (const auto& r : rows) {
                if (!r.error.empty()) std::cerr << "cell " << r.experiment << " failed: " << r.error << "\n";
            }
            return 0;
        }
        const MealyModel a = load_dot(left);
        const MealyModel b = load_dot(right);
        const Aligned m = common_outputs(a, b);
        if (auto cex = find_counterexample(m.left, m.right)) {
            std::cout << "different on " << to_string(cex->input, &a.inputs) << ": left "
                      << to_string(m.left.run(cex->input), &m.outputs) << ", right "
                      << to_string(m.right.run(cex->input), &m.outputs) << "\n";
            return 1;
        }
        std::cout << "equivalent\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
