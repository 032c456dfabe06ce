#include "ceal/reviser.hpp"

#include <algorithm>
#include <stdexcept>

namespace ceal {

std::string to_string(SelectionStrategy s) {
    return s == SelectionStrategy::most_recent ? "most_recent" : "most_frequent";
}

SelectionStrategy parse_selection_strategy(std::string_view text) {
    if (text == "most_recent") return SelectionStrategy::most_recent;
    if (text == "most_frequent") return SelectionStrategy::most_frequent;
    throw std::invalid_argument("unknown selection strategy '" + std::string(text) + "'");
}

Fingerprint HypothesisLog::record(const MealyMachine& h) {
    const Fingerprint fp = canonical_fingerprint(h);
    auto [it, fresh] = representatives_.try_emplace(fp.value, Entry{h, 0, representatives_.size()});
    ++it->second.count;
    latest_ = h;
    ++total_;
    return fp;
}

std::uint64_t HypothesisLog::count(const Fingerprint& fp) const {
    auto it = representatives_.find(fp.value);
    return it == representatives_.end() ? 0 : it->second.count;
}

const MealyMachine& HypothesisLog::latest() const {
    if (!latest_) throw std::logic_error("hypothesis log is empty");
    return *latest_;
}

const MealyMachine& HypothesisLog::select(SelectionStrategy strategy) const {
    if (!latest_) throw std::logic_error("hypothesis log is empty");
    if (strategy == SelectionStrategy::most_recent) return *latest_;
    const Entry* best = nullptr;
    for (const auto& [fp, entry] : representatives_) {
        if (best == nullptr || entry.count > best->count ||
            (entry.count == best->count && entry.first_seen > best->first_seen)) {
            best = &entry;
        }
    }
    return best->machine;
}

void ReviserConfig::validate() const {
    if (!(revision_ratio >= 0.0 && revision_ratio <= 1.0)) {
        throw std::invalid_argument("revision ratio must lie in [0,1]");
    }
    if (repeats) repeats->validate();
}

Reviser::Reviser(ReviserConfig cfg, System& system, std::unique_ptr<TestGenerator> generator)
    : cfg_(cfg),
      system_(system),
      generator_(std::move(generator)),
      tree_(make_tree(cfg.update, system.num_inputs())),
      coin_rng_(cfg.seed) {
    cfg_.validate();
}

QueryAnswer Reviser::apply(const Trace& trace) {
    const bool conflict = tree_->update(trace);
    if (observer_) observer_->on_update(trace, conflict);
    if (conflict) return Prune{};
    return trace.output;
}

QueryAnswer Reviser::run_and_apply(const Word& w, QueryPhase phase, Trace* executed) {
    Trace t = cfg_.repeats ? majority_trace(system_, *cfg_.repeats, w, phase) : system_.query(w, phase);
    if (observer_) observer_->on_system_trace(t);
    QueryAnswer a = apply(t);
    if (executed) *executed = std::move(t);
    return a;
}

QueryAnswer Reviser::read(const Word& input) {
    QueryAnswer answer;
    // Under input noise the system may execute a different word, so retry
    // until the tree covers the word that was asked.
    for (;;) {
        if (auto stored = tree_->lookup(input)) {
            answer = std::move(*stored);
            break;
        }
        answer = run_and_apply(input, QueryPhase::membership, nullptr);
        if (is_prune(answer)) break;
    }
    if (observer_) observer_->on_answer(input, answer);
    return answer;
}

std::optional<Trace> Reviser::check(const MealyMachine& h) const {
    return tree_->find_disagreement(h);
}

Word Reviser::next_test_word() {
    if (cfg_.revision_ratio > 0.0) {
        std::bernoulli_distribution revisit(cfg_.revision_ratio);
        if (revisit(coin_rng_)) {
            const auto stored = tree_->maximal_inputs();
            const StampedWord* oldest = nullptr;
            for (const auto& s : stored) {
                if (revisit_started_ && s.created <= revisit_cursor_) continue;
                if (s.input.empty()) continue;
                if (oldest == nullptr || s.created < oldest->created) oldest = &s;
            }
            if (oldest != nullptr) {
                revisit_cursor_ = oldest->created;
                revisit_started_ = true;
                return oldest->input;
            }
            revisit_started_ = false;  // every stored word revisited: start over
        }
    }
    return generator_->next();
}

TestOutcome Reviser::test(const MealyMachine& h, std::uint64_t budget) {
    if (check(h)) throw std::logic_error("test() requires a hypothesis consistent with the tree");
    const std::uint64_t fp = canonical_fingerprint(h).value;
    if (prepared_for_ != fp) {
        generator_->prepare(h);
        prepared_for_ = fp;
    }
    TestOutcome outcome{NoCounterexample{}, 0};
    while (outcome.tests < budget) {
        const Word w = next_test_word();
        Trace executed;
        const QueryAnswer a = run_and_apply(w, QueryPhase::equivalence, &executed);
        ++outcome.tests;
        if (is_prune(a)) {
            outcome.verdict = Prune{};
            return outcome;
        }
        // Judge against what the tree now answers, which is what the learner will see.
        // An outvoted response under Most Frequent may leave the word uncovered.
        const auto stored = tree_->lookup(executed.input);
        if (stored && h.run(executed.input) != *stored) {
            outcome.verdict = Trace{executed.input, *stored};
            return outcome;
        }
    }
    return outcome;
}

TestOutcome Reviser::eq(const MealyMachine& h, HypothesisLog& log, std::uint64_t budget) {
    if (auto cex = check(h)) return TestOutcome{std::move(*cex), 0};
    log.record(h);
    return test(h, budget);
}

Word ReviserTeacher::query(const Word& input) {
    QueryAnswer a = reviser_.read(input);
    if (is_prune(a)) throw PruneSignal();
    return std::get<Word>(std::move(a));
}

}  // namespace ceal
