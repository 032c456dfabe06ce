#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ceal {

using Symbol = std::uint32_t;
using StateId = std::uint32_t;

/// A finite word over an interned alphabet.
using Word = std::vector<Symbol>;

/// Thrown when a symbol index or state id is outside the valid range.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Ordered set of symbol names with a dense index.
class Alphabet {
public:
    Alphabet() = default;
    explicit Alphabet(std::vector<std::string> names);

    std::size_t size() const noexcept { return names_.size(); }
    bool empty() const noexcept { return names_.empty(); }

    const std::string& name(Symbol s) const;
    std::optional<Symbol> find(std::string_view name) const;
    Symbol index(std::string_view name) const;

    const std::vector<std::string>& names() const noexcept { return names_; }

    bool operator==(const Alphabet& other) const { return names_ == other.names_; }

    /// Alphabet with names "0", "1", ... used for generated machines.
    static Alphabet numbered(std::size_t n, std::string_view prefix = "");

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, Symbol> index_;
};

/// An (input, output) pair of equal length.
struct Trace {
    Word input;
    Word output;

    bool operator==(const Trace&) const = default;
    auto operator<=>(const Trace&) const = default;
};

/// Prefix w[0, n) of a word.
Word prefix(const Word& w, std::size_t n);
/// Suffix of w starting at position `from`.
Word suffix(const Word& w, std::size_t from);
Word concat(const Word& a, const Word& b);

std::string to_string(const Word& w, const Alphabet* alphabet = nullptr);

/// Total deterministic Mealy machine with states 0..n-1.
///
/// Transition and output tables are stored row-major by state, so the entry for
/// (q, a) lives at q * num_inputs + a.
class MealyMachine {
public:
    MealyMachine() = default;
    MealyMachine(std::size_t num_states, std::size_t num_inputs, std::size_t num_outputs,
                 StateId initial = 0);

    std::size_t num_states() const noexcept { return num_states_; }
    std::size_t num_inputs() const noexcept { return num_inputs_; }
    std::size_t num_outputs() const noexcept { return num_outputs_; }
    StateId initial() const noexcept { return initial_; }

    StateId next(StateId q, Symbol a) const { return transitions_[slot(q, a)]; }
    Symbol output(StateId q, Symbol a) const { return outputs_[slot(q, a)]; }

    void set_transition(StateId q, Symbol a, StateId target, Symbol out);
    void set_initial(StateId q);

    /// delta*(q0, w)
    StateId reach(const Word& w) const { return reach_from(initial_, w); }
    StateId reach_from(StateId q, const Word& w) const;

    /// M*(w): one output per input symbol.
    Word run(const Word& w) const { return run_from(initial_, w); }
    Word run_from(StateId q, const Word& w) const;

    const std::vector<StateId>& transition_table() const noexcept { return transitions_; }
    const std::vector<Symbol>& output_table() const noexcept { return outputs_; }

    bool operator==(const MealyMachine&) const = default;

private:
    std::size_t slot(StateId q, Symbol a) const;

    std::size_t num_states_ = 0;
    std::size_t num_inputs_ = 0;
    std::size_t num_outputs_ = 0;
    StateId initial_ = 0;
    std::vector<StateId> transitions_;
    std::vector<Symbol> outputs_;
};

/// Shortest input word on which the two machines disagree, paired with m1's
/// output. std::nullopt iff the machines are language-equivalent.
std::optional<Trace> find_counterexample(const MealyMachine& m1, const MealyMachine& m2);

inline bool equivalent(const MealyMachine& m1, const MealyMachine& m2) {
    return !find_counterexample(m1, m2).has_value();
}

/// States reachable from the initial state, in breadth-first order following
/// input-symbol order.
std::vector<StateId> reachable_states(const MealyMachine& m);

/// Minimal language-equivalent machine, states numbered breadth-first from the
/// initial state (so the result is canonical up to language equivalence).
MealyMachine minimize(const MealyMachine& m);

/// 64-bit digest of the canonical minimal machine.
struct Fingerprint {
    std::uint64_t value = 0;

    bool operator==(const Fingerprint&) const = default;
    auto operator<=>(const Fingerprint&) const = default;

    std::string hex() const;
};

Fingerprint canonical_fingerprint(const MealyMachine& m);

/// Uniformly random total machine with every state reachable from state 0.
MealyMachine random_machine(std::size_t num_states, std::size_t num_inputs,
                            std::size_t num_outputs, std::uint64_t seed);

}  // namespace ceal

template <>
struct std::hash<ceal::Fingerprint> {
    std::size_t operator()(const ceal::Fingerprint& f) const noexcept {
        return static_cast<std::size_t>(f.value);
    }
};
