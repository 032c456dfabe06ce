#pragma once

#include <exception>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ceal/mealy.hpp"

namespace ceal {

/// Teacher-side membership interface. Implementations may unwind the learner
/// with PruneSignal instead of answering.
class MembershipOracle {
public:
    virtual ~MembershipOracle() = default;
    virtual Word query(const Word& input) = 0;
};

/// Thrown through a learner when its accumulated state must be discarded.
class PruneSignal : public std::exception {
public:
    const char* what() const noexcept override { return "prune"; }
};

/// A restartable MAT learner. All system knowledge arrives through the oracle.
class Learner {
public:
    virtual ~Learner() = default;

    /// Closes the internal structure (issuing membership queries as needed)
    /// and returns the current hypothesis.
    virtual MealyMachine hypothesis() = 0;

    /// Processes a counterexample to the last hypothesis. Throws
    /// std::invalid_argument if the oracle agrees with the hypothesis on it.
    virtual void refine(const Trace& counterexample) = 0;

    /// Forgets everything, as if freshly constructed.
    virtual void restart() = 0;

    virtual std::string name() const = 0;
};

enum class LearnerKind { lstar_rs, kv };

std::string to_string(LearnerKind k);
LearnerKind parse_learner_kind(std::string_view text);

std::unique_ptr<Learner> make_learner(LearnerKind kind, MembershipOracle& oracle,
                                      std::size_t num_inputs, std::size_t num_outputs);

/// Result of the Rivest–Schapire search over a counterexample w: the access
/// word of the state reached after w[0, i), the letter w[i], and the
/// separating suffix w[i+1, |w|).
struct CounterexampleSplit {
    Word access;
    Symbol letter;
    Word suffix;
};

/// Binary search for the breakpoint of a counterexample. `access_of` maps a
/// hypothesis state to its access word. Issues at most ceil(log2 |w|) + 1
/// membership queries.
CounterexampleSplit rivest_schapire_split(MembershipOracle& oracle, const MealyMachine& h,
                                          const std::vector<Word>& access_of, const Word& w);

/// L* over Mealy machines with Rivest–Schapire counterexample processing:
/// rows of the upper part stay pairwise distinct, so only closedness needs
/// restoring.
class LStarLearner final : public Learner {
public:
    LStarLearner(MembershipOracle& oracle, std::size_t num_inputs, std::size_t num_outputs);

    MealyMachine hypothesis() override;
    void refine(const Trace& counterexample) override;
    void restart() override;
    std::string name() const override { return "LSTAR_RS"; }

    const std::vector<Word>& access_words() const noexcept { return upper_; }
    const std::vector<Word>& suffixes() const noexcept { return suffixes_; }

private:
    using Row = std::vector<Word>;

    const Row& row(const Word& u);

    MembershipOracle& oracle_;
    std::size_t num_inputs_;
    std::size_t num_outputs_;
    std::vector<Word> upper_;     // S
    std::vector<Word> suffixes_;  // E
    std::map<Word, Row> rows_;
    std::optional<MealyMachine> current_;
};

/// Kearns–Vazirani over Mealy machines: a classification tree whose inner
/// nodes hold separating suffixes and whose edges are keyed by output words.
class KVLearner final : public Learner {
public:
    KVLearner(MembershipOracle& oracle, std::size_t num_inputs, std::size_t num_outputs);

    MealyMachine hypothesis() override;
    void refine(const Trace& counterexample) override;
    void restart() override;
    std::string name() const override { return "KV"; }

    std::size_t num_leaves() const noexcept { return leaf_access_.size(); }

private:
    struct Node {
        bool leaf = true;
        std::size_t state = 0;  // leaves
        Word separator;         // inner nodes
        std::map<Word, std::size_t> children;
    };

    std::size_t sift(const Word& u);
    Word answer_suffix(const Word& u, const Word& v);

    MembershipOracle& oracle_;
    std::size_t num_inputs_;
    std::size_t num_outputs_;
    std::vector<Node> nodes_;
    std::vector<Word> leaf_access_;  // by state
    std::vector<std::size_t> leaf_node_;
    std::optional<MealyMachine> current_;
};

}  // namespace ceal
