#pragma once

#include <random>
#include <string_view>
#include <vector>

#include "ceal/mealy.hpp"
#include "ceal/obstree.hpp"

namespace ceal::testing {

/// Letters map to symbols by position: 'a' -> 0, 'b' -> 1, ...
inline Word w(std::string_view letters) {
    Word out;
    for (char c : letters) out.push_back(static_cast<Symbol>(c - 'a'));
    return out;
}

inline Trace tr(std::string_view in, std::string_view out) { return Trace{w(in), w(out)}; }

/// Two states over input a: state 0 answers x (0), state 1 answers y (1).
inline MealyMachine toggle() {
    MealyMachine m(2, 1, 2);
    m.set_transition(0, 0, 1, 0);
    m.set_transition(1, 0, 0, 1);
    return m;
}

/// One state answering x (0) to a.
inline MealyMachine constant_x() {
    MealyMachine m(1, 1, 2);
    m.set_transition(0, 0, 0, 0);
    return m;
}

/// The three tests (aaa, aab), (aab, aaa), (ab, ab) over {a, b}.
inline std::vector<Trace> example_tests() {
    return {tr("aaa", "aab"), tr("aab", "aaa"), tr("ab", "ab")};
}

/// Every prefix of t, including (eps, eps).
TreeLanguage prefixes(const Trace& t);

/// Language of a Most Recent tree after the stream: prefixes of every trace
/// not conflicting with a later one, plus (eps, eps).
TreeLanguage most_recent_oracle(const std::vector<Trace>& stream);

/// Language of a Most Frequent tree after the stream. Each step follows the
/// extension carried by the most stream traces, ties going to the extension
/// that first appeared latest.
TreeLanguage most_frequent_oracle(const std::vector<Trace>& stream, std::size_t num_inputs);

/// Up to `max_traces` traces of length 0..max_len over binary alphabets.
std::vector<Trace> random_stream(std::mt19937_64& rng, std::size_t max_traces, std::size_t max_len);

}  // namespace ceal::testing
