#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ceal/eqtest.hpp"
#include "ceal/learner.hpp"
#include "ceal/mealy.hpp"
#include "ceal/obstree.hpp"
#include "ceal/reviser.hpp"
#include "ceal/sul.hpp"

namespace ceal {

enum class Framework { mat, ceal };

std::string to_string(Framework f);
Framework parse_framework(std::string_view text);

enum class Termination { stability, query_cap, collapse };

std::string to_string(Termination t);

struct ExperimentConfig {
    std::string experiment;  // report label, usually the target's file stem
    Framework framework = Framework::ceal;
    LearnerKind learner = LearnerKind::lstar_rs;
    RepeatPolicy repeats;
    NoiseModel noise;
    UpdateStrategy update = UpdateStrategy::most_recent;
    SelectionStrategy selection = SelectionStrategy::most_frequent;
    SamplerConfig sampler;
    double revision_ratio = 0.0;
    std::uint64_t k_survive = 200;
    std::uint64_t max_queries = 200000;

    void validate() const;
};

struct RunResult {
    bool success = false;
    std::uint64_t tests = 0;
    std::uint64_t symbols = 0;
    std::uint64_t eq_tests = 0;
    std::uint64_t eq_symbols = 0;
    double eq_fraction = 0.0;
    std::size_t hypothesis_states = 0;
    std::uint64_t prunes = 0;
    Termination terminated_by = Termination::stability;
    std::vector<std::string> fingerprints;  // hypotheses submitted to testing, in order
    std::string final_fingerprint;

    bool operator==(const RunResult&) const = default;
};

/// Optional instrumentation for a single run.
struct RunHooks {
    ReviserObserver* observer = nullptr;
    std::function<void()> on_restart;  // the learner is about to be restarted
    std::function<void(const Trace&)> on_counterexample;
    /// Replaces the simulated system; the target still judges success.
    std::function<std::unique_ptr<System>(std::uint64_t seed)> make_system;
};

RunResult run_ceal(const ExperimentConfig& cfg, const MealyMachine& target, std::uint64_t seed,
                   const RunHooks& hooks = {});
RunResult run_mat(const ExperimentConfig& cfg, const MealyMachine& target, std::uint64_t seed,
                  const RunHooks& hooks = {});
RunResult run_experiment(const ExperimentConfig& cfg, const MealyMachine& target,
                         std::uint64_t seed, const RunHooks& hooks = {});

std::string to_json(const RunResult& r);

struct GridConfig {
    std::vector<std::filesystem::path> targets;
    std::vector<Framework> frameworks{Framework::mat, Framework::ceal};
    std::vector<LearnerKind> learners{LearnerKind::lstar_rs};
    std::vector<RepeatPolicy> repeats{RepeatPolicy{}};
    std::vector<NoiseKind> noise_kinds{NoiseKind::output};
    std::vector<double> noise_levels{0.05};
    ExperimentConfig base;  // strategies, sampler and budgets shared by every cell
    std::vector<std::uint64_t> seeds;
    unsigned threads = 1;

    void validate() const;
};

/// Parses the flat `key = value` grid format. Relative target paths are
/// resolved against `base_dir`.
GridConfig parse_grid_config(std::string_view text, const std::filesystem::path& base_dir = {});
GridConfig load_grid_config(const std::filesystem::path& path);

struct ReportRow {
    std::string experiment;
    std::string framework;
    std::string algorithm;
    std::string repeats;
    std::string noise_kind;
    double noise_level = 0.0;
    double success_rate = 0.0;
    std::optional<double> test_count_mean;    // over successful runs
    std::optional<double> symbol_count_mean;  // over successful runs
    double eq_fraction_mean = 0.0;
    double prune_count_mean = 0.0;
    std::size_t runs = 0;
    std::string error;  // non-empty when the cell could not run

    bool operator==(const ReportRow&) const = default;
};

ReportRow aggregate(const ExperimentConfig& cfg, const std::vector<RunResult>& runs);

/// Runs every cell over every seed. Rows are grouped by experiment in target
/// order and sorted within a group by success rate, then test count.
std::vector<ReportRow> run_grid(const GridConfig& grid);

enum class ReportFormat { csv, json };

ReportFormat parse_report_format(std::string_view text);
std::string emit_report(const std::vector<ReportRow>& rows, ReportFormat format);
std::vector<ReportRow> parse_json_report(std::string_view text);

inline constexpr const char* kCsvHeader =
    "experiment,framework,algorithm,repeats,noise_kind,noise_level,success_rate,"
    "test_count_mean,symbol_count_mean,eq_fraction_mean,prune_count_mean,runs";

}  // namespace ceal
