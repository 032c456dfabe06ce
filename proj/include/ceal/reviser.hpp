#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "ceal/eqtest.hpp"
#include "ceal/learner.hpp"
#include "ceal/mealy.hpp"
#include "ceal/obstree.hpp"
#include "ceal/sul.hpp"

namespace ceal {

/// Tells the learner that its accumulated knowledge is stale.
struct Prune {
    bool operator==(const Prune&) const = default;
};

/// Test budget spent without a counterexample or conflict.
struct NoCounterexample {
    bool operator==(const NoCounterexample&) const = default;
};

using QueryAnswer = std::variant<Word, Prune>;
using EqVerdict = std::variant<Trace, Prune, NoCounterexample>;

inline bool is_prune(const QueryAnswer& a) { return std::holds_alternative<Prune>(a); }

struct TestOutcome {
    EqVerdict verdict;
    std::uint64_t tests = 0;  // system tests executed by this call
};

/// Instrumentation callbacks. Default implementations do nothing.
class ReviserObserver {
public:
    virtual ~ReviserObserver() = default;
    /// A system response (the voted one, when voting), before it reaches the tree.
    virtual void on_system_trace(const Trace&) {}
    /// The tree has integrated `trace`; `conflict` is what update returned.
    virtual void on_update(const Trace&, bool /*conflict*/) {}
    /// Answer handed out for a membership read of `input`.
    virtual void on_answer(const Word& /*input*/, const QueryAnswer&) {}
};

enum class SelectionStrategy { most_recent, most_frequent };

std::string to_string(SelectionStrategy s);
SelectionStrategy parse_selection_strategy(std::string_view text);

/// Hypotheses counted up to language equivalence. Stores one machine per
/// fingerprint, never the whole sequence.
class HypothesisLog {
public:
    /// Returns the fingerprint under which h was counted.
    Fingerprint record(const MealyMachine& h);

    std::size_t size() const noexcept { return total_; }
    bool empty() const noexcept { return total_ == 0; }
    std::size_t distinct() const noexcept { return representatives_.size(); }
    std::uint64_t count(const Fingerprint& fp) const;
    const MealyMachine& latest() const;

    /// Most recent: the latest hypothesis. Most frequent: the representative
    /// with the highest count, ties to the fingerprint first seen last.
    /// Throws std::logic_error on an empty log.
    const MealyMachine& select(SelectionStrategy strategy) const;

private:
    struct Entry {
        MealyMachine machine;
        std::uint64_t count = 0;
        std::size_t first_seen = 0;
    };

    std::map<std::uint64_t, Entry> representatives_;
    std::optional<MealyMachine> latest_;
    std::size_t total_ = 0;
};

inline const MealyMachine& select_final(const HypothesisLog& log, SelectionStrategy strategy) {
    return log.select(strategy);
}

struct ReviserConfig {
    UpdateStrategy update = UpdateStrategy::most_recent;
    double revision_ratio = 0.0;
    std::uint64_t seed = 0;  // drives the revision coin only
    /// Each system test is voted under this policy; the winning trace is what
    /// the tree integrates. Empty: one raw execution per test.
    std::optional<RepeatPolicy> repeats;

    void validate() const;
};

/// Sits between learner and system. Every system response goes through the
/// observation tree, and every answer is read back from it.
class Reviser {
public:
    Reviser(ReviserConfig cfg, System& system, std::unique_ptr<TestGenerator> generator);

    /// Integrates a system trace. Prune on conflict, else the trace's output.
    QueryAnswer apply(const Trace& trace);

    /// Membership query answered from the tree, reaching the system only on a miss.
    QueryAnswer read(const Word& input);

    /// A stored trace h disagrees with. Never touches the system.
    std::optional<Trace> check(const MealyMachine& h) const;

    /// Tests the system against h until a counterexample, a conflict, or
    /// `budget` agreeing tests. Requires check(h) to be empty.
    TestOutcome test(const MealyMachine& h, std::uint64_t budget);

    /// check, then (after logging h) test.
    TestOutcome eq(const MealyMachine& h, HypothesisLog& log, std::uint64_t budget);

    const ObservationTree& tree() const noexcept { return *tree_; }
    System& system() noexcept { return system_; }
    void set_observer(ReviserObserver* observer) noexcept { observer_ = observer; }

private:
    Word next_test_word();
    QueryAnswer run_and_apply(const Word& w, QueryPhase phase, Trace* executed);

    ReviserConfig cfg_;
    System& system_;
    std::unique_ptr<TestGenerator> generator_;
    std::unique_ptr<ObservationTree> tree_;
    ReviserObserver* observer_ = nullptr;
    std::mt19937_64 coin_rng_;
    std::optional<std::uint64_t> prepared_for_;
    std::uint64_t revisit_cursor_ = 0;
    bool revisit_started_ = false;
};

/// Membership oracle over a reviser. A Prune answer unwinds the learner as
/// PruneSignal.
class ReviserTeacher final : public MembershipOracle {
public:
    explicit ReviserTeacher(Reviser& reviser) : reviser_(reviser) {}
    Word query(const Word& input) override;

private:
    Reviser& reviser_;
};

}  // namespace ceal
