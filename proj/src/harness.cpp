#include "ceal/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "ceal/dot.hpp"

namespace ceal {

std::string to_string(Framework f) { return f == Framework::mat ? "MAT" : "CEAL"; }

Framework parse_framework(std::string_view text) {
    if (text == "MAT" || text == "mat") return Framework::mat;
    if (text == "CEAL" || text == "ceal") return Framework::ceal;
    throw std::invalid_argument("unknown framework '" + std::string(text) + "'");
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::stability: return "stability";
        case Termination::query_cap: return "query_cap";
        case Termination::collapse: return "collapse";
    }
    return "stability";
}

void ExperimentConfig::validate() const {
    repeats.validate();
    noise.validate();
    sampler.validate();
    if (!(revision_ratio >= 0.0 && revision_ratio <= 1.0)) {
        throw std::invalid_argument("revision_ratio must lie in [0,1]");
    }
    if (k_survive == 0) throw std::invalid_argument("k_survive must be positive");
    if (max_queries == 0) throw std::invalid_argument("max_queries must be positive");
}

namespace {

std::unique_ptr<System> make_system(const ExperimentConfig& cfg, const MealyMachine& target,
                                    std::uint64_t seed, const RunHooks& hooks) {
    if (hooks.make_system) return hooks.make_system(seed);
    return std::make_unique<SimulatedSystem>(target, cfg.noise, derive_seed(seed, "noise"));
}

void finish(RunResult& r, const System& system, const MealyMachine* final_model,
            const MealyMachine& target) {
    const TestMeter& m = system.meter();
    r.tests = m.tests;
    r.symbols = m.symbols;
    r.eq_tests = m.eq_tests;
    r.eq_symbols = m.eq_symbols;
    r.eq_fraction = m.symbols == 0 ? 0.0 : static_cast<double>(m.eq_symbols) / m.symbols;
    if (final_model != nullptr) {
        r.hypothesis_states = minimize(*final_model).num_states();
        r.final_fingerprint = canonical_fingerprint(*final_model).hex();
        if (r.terminated_by != Termination::collapse) {
            r.success = !find_counterexample(*final_model, target).has_value();
        }
    }
}

}  // namespace

RunResult run_ceal(const ExperimentConfig& cfg, const MealyMachine& target, std::uint64_t seed,
                   const RunHooks& hooks) {
    cfg.validate();
    auto system = make_system(cfg, target, seed, hooks);
    system->set_test_limit(cfg.max_queries);
    Reviser reviser(ReviserConfig{cfg.update, cfg.revision_ratio, derive_seed(seed, "revision"),
                                  cfg.repeats},
                    *system,
                    std::make_unique<RandomTestGenerator>(cfg.sampler, derive_seed(seed, "sampler")));
    reviser.set_observer(hooks.observer);
    ReviserTeacher teacher(reviser);
    auto learner = make_learner(cfg.learner, teacher, system->num_inputs(), system->num_outputs());

    RunResult r;
    HypothesisLog log;
    std::optional<std::uint64_t> selected;
    std::uint64_t stable = 0;  // tests survived by the selected hypothesis

    const auto restart = [&] {
        ++r.prunes;
        if (hooks.on_restart) hooks.on_restart();
        learner->restart();
    };

    try {
        for (;;) {
            try {
                const MealyMachine h = learner->hypothesis();
                if (auto cex = reviser.check(h)) {
                    if (hooks.on_counterexample) hooks.on_counterexample(*cex);
                    learner->refine(*cex);
                    continue;
                }
                r.fingerprints.push_back(log.record(h).hex());
                const std::uint64_t pick = canonical_fingerprint(log.select(cfg.selection)).value;
                if (selected != pick) {
                    selected = pick;
                    stable = 0;
                }
                const TestOutcome out = reviser.test(h, cfg.k_survive - stable);
                stable += out.tests;
                if (std::holds_alternative<NoCounterexample>(out.verdict)) {
                    r.terminated_by = Termination::stability;
                    break;
                }
                if (std::holds_alternative<Prune>(out.verdict)) {
                    restart();
                    continue;
                }
                const Trace& cex = std::get<Trace>(out.verdict);
                if (hooks.on_counterexample) hooks.on_counterexample(cex);
                learner->refine(cex);
            } catch (const PruneSignal&) {
                restart();
            }
        }
    } catch (const QueryBudgetExhausted&) {
        r.terminated_by = Termination::query_cap;
    }

    finish(r, *system, log.empty() ? nullptr : &log.select(cfg.selection), target);
    return r;
}

namespace {

struct CacheCollapse {};

/// Majority-voting teacher with a cache of voted answers. A voted answer that
/// contradicts the cache collapses the run.
class VotingTeacher final : public MembershipOracle {
public:
    VotingTeacher(System& system, RepeatPolicy policy, std::size_t num_inputs)
        : system_(system), policy_(policy), cache_(num_inputs) {}

    Word query(const Word& input) override {
        if (auto stored = cache_.lookup(input)) return *stored;
        return vote(input, QueryPhase::membership);
    }

    Word vote(const Word& input, QueryPhase phase) {
        Word out = majority_query(system_, policy_, input, phase);
        if (cache_.update(Trace{input, out})) throw CacheCollapse{};
        return out;
    }

private:
    System& system_;
    RepeatPolicy policy_;
    MostRecentTree cache_;
};

}  // namespace

RunResult run_mat(const ExperimentConfig& cfg, const MealyMachine& target, std::uint64_t seed,
                  const RunHooks& hooks) {
    cfg.validate();
    auto system = make_system(cfg, target, seed, hooks);
    system->set_test_limit(cfg.max_queries);
    VotingTeacher teacher(*system, cfg.repeats, system->num_inputs());
    RandomTestGenerator generator(cfg.sampler, derive_seed(seed, "sampler"));
    auto learner = make_learner(cfg.learner, teacher, system->num_inputs(), system->num_outputs());

    RunResult r;
    std::optional<MealyMachine> last;
    try {
        for (bool done = false; !done;) {
            const MealyMachine h = learner->hypothesis();
            last = h;
            r.fingerprints.push_back(canonical_fingerprint(h).hex());
            generator.prepare(h);
            done = true;
            for (std::uint64_t i = 0; i < cfg.k_survive; ++i) {
                const Word w = generator.next();
                const Word out = teacher.vote(w, QueryPhase::equivalence);
                if (h.run(w) != out) {
                    const Trace cex{w, out};
                    if (hooks.on_counterexample) hooks.on_counterexample(cex);
                    learner->refine(cex);
                    done = false;
                    break;
                }
            }
        }
        r.terminated_by = Termination::stability;
    } catch (const QueryBudgetExhausted&) {
        r.terminated_by = Termination::query_cap;
    } catch (const CacheCollapse&) {
        r.terminated_by = Termination::collapse;
    }
    finish(r, *system, last ? &*last : nullptr, target);
    return r;
}

RunResult run_experiment(const ExperimentConfig& cfg, const MealyMachine& target,
                         std::uint64_t seed, const RunHooks& hooks) {
    return cfg.framework == Framework::mat ? run_mat(cfg, target, seed, hooks)
                                           : run_ceal(cfg, target, seed, hooks);
}

std::string to_json(const RunResult& r) {
    nlohmann::ordered_json j;
    j["success"] = r.success;
    j["tests"] = r.tests;
    j["symbols"] = r.symbols;
    j["eq_tests"] = r.eq_tests;
    j["eq_symbols"] = r.eq_symbols;
    j["eq_fraction"] = r.eq_fraction;
    j["hypothesis_states"] = r.hypothesis_states;
    j["prunes"] = r.prunes;
    j["terminated_by"] = to_string(r.terminated_by);
    j["final_fingerprint"] = r.final_fingerprint;
    j["fingerprints"] = r.fingerprints;
    return j.dump();
}

// ---------------------------------------------------------------------------
// Grid configuration

void GridConfig::validate() const {
    if (targets.empty()) throw std::invalid_argument("grid needs at least one target");
    if (frameworks.empty() || learners.empty() || repeats.empty() || noise_kinds.empty()) {
        throw std::invalid_argument("grid lists must not be empty");
    }
    if (noise_levels.empty()) throw std::invalid_argument("noise_levels must not be empty");
    if (seeds.empty()) throw std::invalid_argument("grid needs at least one seed");
    if (threads == 0) throw std::invalid_argument("threads must be positive");
    base.validate();
    for (const auto& p : repeats) p.validate();
    for (double level : noise_levels) NoiseModel{NoiseKind::output, level}.validate();
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = s.find(',', start);
        std::string item = trim(s.substr(start, comma - start));
        if (!item.empty()) out.push_back(std::move(item));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_number(const std::string& s, const std::string& key) {
    T value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::invalid_argument("bad value '" + s + "' for " + key);
    }
    return value;
}

double parse_double(const std::string& s, const std::string& key) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty()) throw std::invalid_argument("bad value '" + s + "' for " + key);
    return v;
}

std::vector<std::uint64_t> parse_seeds(std::string_view value) {
    std::vector<std::uint64_t> seeds;
    for (const auto& item : split_list(value)) {
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            seeds.push_back(parse_number<std::uint64_t>(item, "seeds"));
            continue;
        }
        const auto lo = parse_number<std::uint64_t>(trim(item.substr(0, dots)), "seeds");
        const auto hi = parse_number<std::uint64_t>(trim(item.substr(dots + 2)), "seeds");
        if (hi < lo) throw std::invalid_argument("empty seed range '" + item + "'");
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    }
    return seeds;
}

}  // namespace

GridConfig parse_grid_config(std::string_view text, const std::filesystem::path& base_dir) {
    GridConfig g;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        const auto where = "line " + std::to_string(lineno) + ": ";
        if (eq == std::string::npos) throw std::invalid_argument(where + "expected key = value");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        if (!seen.insert(key).second) throw std::invalid_argument(where + "duplicate key " + key);
        const auto items = split_list(value);
        try {
            if (key == "targets") {
                g.targets.clear();
                for (const auto& t : items) {
                    std::filesystem::path p(t);
                    g.targets.push_back(p.is_relative() && !base_dir.empty() ? base_dir / p : p);
                }
            } else if (key == "frameworks") {
                g.frameworks.clear();
                for (const auto& t : items) g.frameworks.push_back(parse_framework(t));
            } else if (key == "learners") {
                g.learners.clear();
                for (const auto& t : items) g.learners.push_back(parse_learner_kind(t));
            } else if (key == "repeats") {
                g.repeats.clear();
                for (const auto& t : items) g.repeats.push_back(parse_repeat_policy(t));
            } else if (key == "noise") {
                g.noise_kinds.clear();
                for (const auto& t : items) g.noise_kinds.push_back(parse_noise_kind(t));
            } else if (key == "noise_levels") {
                g.noise_levels.clear();
                for (const auto& t : items) g.noise_levels.push_back(parse_double(t, key));
            } else if (key == "update") {
                g.base.update = parse_update_strategy(value);
            } else if (key == "selection") {
                g.base.selection = parse_selection_strategy(value);
            } else if (key == "sampler") {
                g.base.sampler.method = parse_sampler_method(value);
            } else if (key == "mean_infix") {
                g.base.sampler.mean_infix = parse_double(value, key);
            } else if (key == "max_len") {
                g.base.sampler.max_len = parse_number<std::size_t>(value, key);
            } else if (key == "revision_ratio") {
                g.base.revision_ratio = parse_double(value, key);
            } else if (key == "k_survive") {
                g.base.k_survive = parse_number<std::uint64_t>(value, key);
            } else if (key == "max_queries") {
                g.base.max_queries = parse_number<std::uint64_t>(value, key);
            } else if (key == "seeds") {
                g.seeds = parse_seeds(value);
            } else if (key == "threads") {
                g.threads = parse_number<unsigned>(value, key);
            } else {
                throw std::invalid_argument("unknown key " + key);
            }
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(where + e.what());
        }
    }
    g.validate();
    return g;
}

GridConfig load_grid_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_grid_config(ss.str(), path.parent_path());
}

// ---------------------------------------------------------------------------
// Aggregation

ReportRow aggregate(const ExperimentConfig& cfg, const std::vector<RunResult>& runs) {
    ReportRow row;
    row.experiment = cfg.experiment;
    row.framework = to_string(cfg.framework);
    row.algorithm = to_string(cfg.learner);
    row.repeats = cfg.repeats.label();
    row.noise_kind = to_string(cfg.noise.kind);
    row.noise_level = cfg.noise.rate;
    row.runs = runs.size();
    if (runs.empty()) return row;

    std::size_t wins = 0;
    double tests = 0, symbols = 0, eq = 0, prunes = 0;
    for (const auto& r : runs) {
        eq += r.eq_fraction;
        prunes += static_cast<double>(r.prunes);
        if (!r.success) continue;
        ++wins;
        tests += static_cast<double>(r.tests);
        symbols += static_cast<double>(r.symbols);
    }
    const auto n = static_cast<double>(runs.size());
    row.success_rate = static_cast<double>(wins) / n;
    row.eq_fraction_mean = eq / n;
    row.prune_count_mean = prunes / n;
    if (wins > 0) {
        row.test_count_mean = tests / static_cast<double>(wins);
        row.symbol_count_mean = symbols / static_cast<double>(wins);
    }
    return row;
}

std::vector<ReportRow> run_grid(const GridConfig& grid) {
    grid.validate();

    struct Cell {
        ExperimentConfig cfg;
        std::size_t target;
    };
    std::vector<std::optional<MealyMachine>> targets;
    std::vector<std::string> load_errors;
    for (const auto& path : grid.targets) {
        try {
            targets.emplace_back(load_dot(path).machine);
            load_errors.emplace_back();
        } catch (const std::exception& e) {
            targets.emplace_back();
            load_errors.emplace_back(e.what());
        }
    }

    std::vector<Cell> cells;
    for (std::size_t t = 0; t < grid.targets.size(); ++t) {
        for (NoiseKind kind : grid.noise_kinds) {
            std::vector<double> levels = grid.noise_levels;
            if (kind == NoiseKind::none) levels.assign(1, 0.0);
            for (double level : levels) {
                for (Framework fw : grid.frameworks) {
                    for (LearnerKind lk : grid.learners) {
                        for (const auto& rep : grid.repeats) {
                            ExperimentConfig cfg = grid.base;
                            cfg.experiment = grid.targets[t].stem().string();
                            cfg.framework = fw;
                            cfg.learner = lk;
                            cfg.repeats = rep;
                            cfg.noise = NoiseModel{kind, level};
                            cells.push_back(Cell{cfg, t});
                        }
                    }
                }
            }
        }
    }

    // One job per (cell, seed); results land in fixed slots.
    const std::size_t per_cell = grid.seeds.size();
    std::vector<RunResult> results(cells.size() * per_cell);
    std::vector<std::string> job_errors(results.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t job; (job = next.fetch_add(1)) < results.size();) {
            const Cell& cell = cells[job / per_cell];
            if (!targets[cell.target]) continue;
            try {
                results[job] = run_experiment(cell.cfg, *targets[cell.target],
                                              grid.seeds[job % per_cell]);
            } catch (const std::exception& e) {
                job_errors[job] = e.what();
            }
        }
    };
    const unsigned n_threads = std::min<std::size_t>(grid.threads, std::max<std::size_t>(results.size(), 1));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::vector<ReportRow> rows;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const Cell& cell = cells[c];
        if (!targets[cell.target]) {
            ReportRow row = aggregate(cell.cfg, {});
            row.error = load_errors[cell.target];
            rows.push_back(std::move(row));
            continue;
        }
        std::string error;
        for (std::size_t s = 0; s < per_cell && error.empty(); ++s) error = job_errors[c * per_cell + s];
        if (!error.empty()) {
            ReportRow row = aggregate(cell.cfg, {});
            row.error = error;
            rows.push_back(std::move(row));
            continue;
        }
        const std::vector<RunResult> runs(results.begin() + static_cast<std::ptrdiff_t>(c * per_cell),
                                          results.begin() + static_cast<std::ptrdiff_t>((c + 1) * per_cell));
        rows.push_back(aggregate(cell.cfg, runs));
    }

    // Rows of one target are contiguous; order each group best-first.
    auto begin = rows.begin();
    while (begin != rows.end()) {
        auto end = std::find_if(begin, rows.end(),
                                [&](const ReportRow& r) { return r.experiment != begin->experiment; });
        std::stable_sort(begin, end, [](const ReportRow& a, const ReportRow& b) {
            if (a.success_rate != b.success_rate) return a.success_rate > b.success_rate;
            const double ta = a.test_count_mean.value_or(std::numeric_limits<double>::infinity());
            const double tb = b.test_count_mean.value_or(std::numeric_limits<double>::infinity());
            return ta < tb;
        });
        begin = end;
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Reports

ReportFormat parse_report_format(std::string_view text) {
    if (text == "csv") return ReportFormat::csv;
    if (text == "json") return ReportFormat::json;
    throw std::invalid_argument("unknown report format '" + std::string(text) + "'");
}

namespace {

std::string fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

nlohmann::ordered_json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::string emit_report(const std::vector<ReportRow>& rows, ReportFormat format) {
    if (format == ReportFormat::csv) {
        std::string out = std::string(kCsvHeader) + "\n";
        for (const auto& r : rows) {
            out += csv_field(r.experiment) + ',' + csv_field(r.framework) + ',' +
                   csv_field(r.algorithm) + ',' + csv_field(r.repeats) + ',' +
                   csv_field(r.noise_kind) + ',' + fixed2(r.noise_level) + ',' +
                   fixed2(r.success_rate) + ',' +
                   (r.test_count_mean ? fixed2(*r.test_count_mean) : "") + ',' +
                   (r.symbol_count_mean ? fixed2(*r.symbol_count_mean) : "") + ',' +
                   fixed2(r.eq_fraction_mean) + ',' + fixed2(r.prune_count_mean) + ',' +
                   std::to_string(r.runs) + '\n';
        }
        return out;
    }
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["experiment"] = r.experiment;
        j["framework"] = r.framework;
        j["algorithm"] = r.algorithm;
        j["repeats"] = r.repeats;
        j["noise_kind"] = r.noise_kind;
        j["noise_level"] = r.noise_level;
        j["success_rate"] = r.success_rate;
        j["test_count_mean"] = optional_json(r.test_count_mean);
        j["symbol_count_mean"] = optional_json(r.symbol_count_mean);
        j["eq_fraction_mean"] = r.eq_fraction_mean;
        j["prune_count_mean"] = r.prune_count_mean;
        j["runs"] = r.runs;
        if (!r.error.empty()) j["error"] = r.error;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

std::vector<ReportRow> parse_json_report(std::string_view text) {
    const auto arr = nlohmann::json::parse(text);
    if (!arr.is_array()) throw std::invalid_argument("report must be a JSON array");
    std::vector<ReportRow> rows;
    for (const auto& j : arr) {
        ReportRow r;
        r.experiment = j.at("experiment").get<std::string>();
        r.framework = j.at("framework").get<std::string>();
        r.algorithm = j.at("algorithm").get<std::string>();
        r.repeats = j.at("repeats").get<std::string>();
        r.noise_kind = j.at("noise_kind").get<std::string>();
        r.noise_level = j.at("noise_level").get<double>();
        r.success_rate = j.at("success_rate").get<double>();
        if (!j.at("test_count_mean").is_null()) r.test_count_mean = j["test_count_mean"].get<double>();
        if (!j.at("symbol_count_mean").is_null()) {
            r.symbol_count_mean = j["symbol_count_mean"].get<double>();
        }
        r.eq_fraction_mean = j.at("eq_fraction_mean").get<double>();
        r.prune_count_mean = j.at("prune_count_mean").get<double>();
        r.runs = j.at("runs").get<std::size_t>();
        if (j.contains("error")) r.error = j["error"].get<std::string>();
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace ceal
