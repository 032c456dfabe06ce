#include "ceal/mealy.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace ceal {

Alphabet::Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
    index_.reserve(names_.size());
    for (std::size_t i = 0; i < names_.size(); ++i) {
        auto [it, inserted] = index_.emplace(names_[i], static_cast<Symbol>(i));
        if (!inserted) {
            throw DomainError("duplicate symbol name '" + names_[i] + "'");
        }
    }
}

const std::string& Alphabet::name(Symbol s) const {
    if (s >= names_.size()) {
        throw DomainError("symbol index " + std::to_string(s) + " out of range");
    }
    return names_[s];
}

std::optional<Symbol> Alphabet::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Symbol Alphabet::index(std::string_view name) const {
    if (auto s = find(name)) return *s;
    throw DomainError("unknown symbol '" + std::string(name) + "'");
}

Alphabet Alphabet::numbered(std::size_t n, std::string_view prefix) {
    std::vector<std::string> names;
    names.reserve(n);
    for (std::size_t i = 0; i < n; ++i) names.push_back(std::string(prefix) + std::to_string(i));
    return Alphabet(std::move(names));
}

Word prefix(const Word& w, std::size_t n) {
    return Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(std::min(n, w.size())));
}

Word suffix(const Word& w, std::size_t from) {
    return Word(w.begin() + static_cast<std::ptrdiff_t>(std::min(from, w.size())), w.end());
}

Word concat(const Word& a, const Word& b) {
    Word out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

std::string to_string(const Word& w, const Alphabet* alphabet) {
    if (w.empty()) return "ε";
    std::ostringstream os;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (k != 0) os << ' ';
        if (alphabet != nullptr) {
            os << alphabet->name(w[k]);
        } else {
            os << w[k];
        }
    }
    return os.str();
}

MealyMachine::MealyMachine(std::size_t num_states, std::size_t num_inputs,
                           std::size_t num_outputs, StateId initial)
    : num_states_(num_states),
      num_inputs_(num_inputs),
      num_outputs_(num_outputs),
      initial_(initial),
      transitions_(num_states * num_inputs, 0),
      outputs_(num_states * num_inputs, 0) {
    if (num_states == 0) throw DomainError("a Mealy machine needs at least one state");
    if (num_inputs == 0 || num_outputs == 0) throw DomainError("alphabets must be non-empty");
    if (initial >= num_states) throw DomainError("initial state out of range");
}

std::size_t MealyMachine::slot(StateId q, Symbol a) const {
    if (q >= num_states_) throw DomainError("state " + std::to_string(q) + " out of range");
    if (a >= num_inputs_) throw DomainError("input symbol " + std::to_string(a) + " out of range");
    return static_cast<std::size_t>(q) * num_inputs_ + a;
}

void MealyMachine::set_transition(StateId q, Symbol a, StateId target, Symbol out) {
    if (target >= num_states_) throw DomainError("transition target out of range");
    if (out >= num_outputs_) throw DomainError("output symbol out of range");
    const auto k = slot(q, a);
    transitions_[k] = target;
    outputs_[k] = out;
}

void MealyMachine::set_initial(StateId q) {
    if (q >= num_states_) throw DomainError("initial state out of range");
    initial_ = q;
}

StateId MealyMachine::reach_from(StateId q, const Word& w) const {
    for (Symbol a : w) q = transitions_[slot(q, a)];
    return q;
}

Word MealyMachine::run_from(StateId q, const Word& w) const {
    Word out;
    out.reserve(w.size());
    for (Symbol a : w) {
        const auto k = slot(q, a);
        out.push_back(outputs_[k]);
        q = transitions_[k];
    }
    return out;
}

std::optional<Trace> find_counterexample(const MealyMachine& m1, const MealyMachine& m2) {
    if (m1.num_inputs() != m2.num_inputs() || m1.num_outputs() != m2.num_outputs()) {
        throw DomainError("find_counterexample: alphabet mismatch");
    }
    const std::size_t n2 = m2.num_states();
    const auto key = [n2](StateId p, StateId q) { return static_cast<std::size_t>(p) * n2 + q; };

    struct Visit {
        std::size_t parent;
        Symbol via;
    };
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<Visit> visited(m1.num_states() * n2, Visit{kNone, 0});
    std::vector<bool> seen(m1.num_states() * n2, false);

    std::deque<std::pair<StateId, StateId>> queue;
    queue.emplace_back(m1.initial(), m2.initial());
    seen[key(m1.initial(), m2.initial())] = true;

    const auto word_to = [&](std::size_t k) {
        Word w;
        while (visited[k].parent != kNone) {
            w.push_back(visited[k].via);
            k = visited[k].parent;
        }
        std::reverse(w.begin(), w.end());
        return w;
    };

    while (!queue.empty()) {
        auto [p, q] = queue.front();
        queue.pop_front();
        const auto here = key(p, q);
        for (Symbol a = 0; a < m1.num_inputs(); ++a) {
            if (m1.output(p, a) != m2.output(q, a)) {
                Word w = word_to(here);
                w.push_back(a);
                Word o = m1.run(w);
                return Trace{std::move(w), std::move(o)};
            }
            const auto p2 = m1.next(p, a);
            const auto q2 = m2.next(q, a);
            const auto there = key(p2, q2);
            if (!seen[there]) {
                seen[there] = true;
                visited[there] = Visit{here, a};
                queue.emplace_back(p2, q2);
            }
        }
    }
    return std::nullopt;
}

std::vector<StateId> reachable_states(const MealyMachine& m) {
    std::vector<bool> seen(m.num_states(), false);
    std::vector<StateId> order{m.initial()};
    seen[m.initial()] = true;
    for (std::size_t head = 0; head < order.size(); ++head) {
        for (Symbol a = 0; a < m.num_inputs(); ++a) {
            const auto t = m.next(order[head], a);
            if (!seen[t]) {
                seen[t] = true;
                order.push_back(t);
            }
        }
    }
    return order;
}

namespace {

// Hopcroft partition refinement on the reachable part of m. Returns the block
// index of every original state (unreachable states map to kNoBlock).
constexpr std::size_t kNoBlock = static_cast<std::size_t>(-1);

std::vector<std::size_t> hopcroft_blocks(const MealyMachine& m, const std::vector<StateId>& live) {
    const std::size_t k = m.num_inputs();
    std::vector<std::size_t> block_of(m.num_states(), kNoBlock);
    std::vector<std::vector<StateId>> blocks;

    // Seed with output rows.
    std::map<std::vector<Symbol>, std::size_t> by_row;
    for (StateId q : live) {
        std::vector<Symbol> row(k);
        for (Symbol a = 0; a < k; ++a) row[a] = m.output(q, a);
        auto [it, inserted] = by_row.emplace(std::move(row), blocks.size());
        if (inserted) blocks.emplace_back();
        blocks[it->second].push_back(q);
        block_of[q] = it->second;
    }

    // inverse[a][t] lists live predecessors of t under a.
    std::vector<std::vector<std::vector<StateId>>> inverse(
        k, std::vector<std::vector<StateId>>(m.num_states()));
    for (StateId q : live) {
        for (Symbol a = 0; a < k; ++a) inverse[a][m.next(q, a)].push_back(q);
    }

    std::deque<std::pair<std::size_t, Symbol>> work;
    std::vector<std::vector<bool>> queued;
    const auto enqueue = [&](std::size_t b, Symbol a) {
        if (!queued[b][a]) {
            queued[b][a] = true;
            work.emplace_back(b, a);
        }
    };
    queued.assign(blocks.size(), std::vector<bool>(k, false));
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        for (Symbol a = 0; a < k; ++a) enqueue(b, a);
    }

    std::vector<bool> marked(m.num_states(), false);
    while (!work.empty()) {
        auto [splitter, a] = work.front();
        work.pop_front();
        queued[splitter][a] = false;

        std::vector<StateId> preds;
        for (StateId t : blocks[splitter]) {
            for (StateId q : inverse[a][t]) {
                if (!marked[q]) {
                    marked[q] = true;
                    preds.push_back(q);
                }
            }
        }
        std::vector<std::size_t> touched;
        for (StateId q : preds) {
            const auto b = block_of[q];
            if (std::find(touched.begin(), touched.end(), b) == touched.end()) touched.push_back(b);
        }
        for (std::size_t b : touched) {
            std::vector<StateId> in, out;
            for (StateId q : blocks[b]) (marked[q] ? in : out).push_back(q);
            if (out.empty()) continue;
            // Keep the larger half in place; the smaller half becomes a new block.
            if (in.size() > out.size()) std::swap(in, out);
            const std::size_t fresh = blocks.size();
            blocks[b] = std::move(out);
            blocks.push_back(std::move(in));
            queued.emplace_back(k, false);
            for (StateId q : blocks[fresh]) block_of[q] = fresh;
            for (Symbol c = 0; c < k; ++c) {
                if (queued[b][c]) {
                    enqueue(fresh, c);
                } else {
                    enqueue(blocks[fresh].size() <= blocks[b].size() ? fresh : b, c);
                }
            }
        }
        for (StateId q : preds) marked[q] = false;
    }
    return block_of;
}

}  // namespace

MealyMachine minimize(const MealyMachine& m) {
    const auto live = reachable_states(m);
    const auto block_of = hopcroft_blocks(m, live);

    // Number blocks breadth-first from the initial block.
    std::vector<std::size_t> renumber(m.num_states(), kNoBlock);
    std::vector<StateId> representative;
    std::deque<StateId> queue{m.initial()};
    renumber[block_of[m.initial()]] = 0;
    representative.push_back(m.initial());
    for (std::size_t head = 0; head < representative.size(); ++head) {
        const StateId q = representative[head];
        for (Symbol a = 0; a < m.num_inputs(); ++a) {
            const auto b = block_of[m.next(q, a)];
            if (renumber[b] == kNoBlock) {
                renumber[b] = representative.size();
                representative.push_back(m.next(q, a));
            }
        }
    }

    MealyMachine out(representative.size(), m.num_inputs(), m.num_outputs(), 0);
    for (std::size_t s = 0; s < representative.size(); ++s) {
        const StateId q = representative[s];
        for (Symbol a = 0; a < m.num_inputs(); ++a) {
            out.set_transition(static_cast<StateId>(s), a,
                               static_cast<StateId>(renumber[block_of[m.next(q, a)]]),
                               m.output(q, a));
        }
    }
    return out;
}

std::string Fingerprint::hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[(value >> (4 * (15 - i))) & 0xF];
    }
    return s;
}

Fingerprint canonical_fingerprint(const MealyMachine& m) {
    const MealyMachine c = minimize(m);
    // FNV-1a over the canonical tables.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xFF;
            h *= 0x100000001b3ULL;
        }
    };
    mix(c.num_states());
    mix(c.num_inputs());
    mix(c.num_outputs());
    for (auto t : c.transition_table()) mix(t);
    for (auto o : c.output_table()) mix(o);
    return Fingerprint{h};
}

MealyMachine random_machine(std::size_t num_states, std::size_t num_inputs,
                            std::size_t num_outputs, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<StateId> pick_state(0, static_cast<StateId>(num_states - 1));
    std::uniform_int_distribution<Symbol> pick_output(0, static_cast<Symbol>(num_outputs - 1));
    MealyMachine m(num_states, num_inputs, num_outputs, 0);
    for (;;) {
        for (StateId q = 0; q < num_states; ++q) {
            for (Symbol a = 0; a < num_inputs; ++a) {
                const StateId t = pick_state(rng);
                m.set_transition(q, a, t, pick_output(rng));
            }
        }
        if (reachable_states(m).size() == num_states) return m;
    }
}

}  // namespace ceal
