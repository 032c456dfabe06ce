#include <stdexcept>

#include "ceal/learner.hpp"

namespace ceal {

std::string to_string(LearnerKind k) { return k == LearnerKind::lstar_rs ? "LSTAR_RS" : "KV"; }

LearnerKind parse_learner_kind(std::string_view text) {
    if (text == "LSTAR_RS" || text == "lstar_rs" || text == "RS") return LearnerKind::lstar_rs;
    if (text == "KV" || text == "kv") return LearnerKind::kv;
    throw std::invalid_argument("unknown learner '" + std::string(text) + "'");
}

std::unique_ptr<Learner> make_learner(LearnerKind kind, MembershipOracle& oracle,
                                      std::size_t num_inputs, std::size_t num_outputs) {
    if (kind == LearnerKind::lstar_rs) {
        return std::make_unique<LStarLearner>(oracle, num_inputs, num_outputs);
    }
    return std::make_unique<KVLearner>(oracle, num_inputs, num_outputs);
}

namespace {

Word last(const Word& w, std::size_t n) { return suffix(w, w.size() - n); }

}  // namespace

CounterexampleSplit rivest_schapire_split(MembershipOracle& oracle, const MealyMachine& h,
                                          const std::vector<Word>& access_of, const Word& w) {
    if (w.empty() || h.run(w) == oracle.query(w)) {
        throw std::invalid_argument("not a counterexample for the current hypothesis");
    }
    // agrees(i): the oracle's answer to access(q_i) . w[i..] ends like the
    // hypothesis' run of w[i..] from q_i. agrees(0) is false, agrees(|w|) true.
    const auto agrees = [&](std::size_t i) {
        const StateId q = h.reach(prefix(w, i));
        const Word rest = suffix(w, i);
        const Word answer = oracle.query(concat(access_of[q], rest));
        return last(answer, rest.size()) == h.run_from(q, rest);
    };
    std::size_t lo = 0;
    std::size_t hi = w.size();
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (agrees(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    CounterexampleSplit split{access_of[h.reach(prefix(w, lo))], w[lo], suffix(w, hi)};
    if (split.suffix.empty()) {
        throw std::logic_error("oracle answers are not prefix-consistent");
    }
    return split;
}

// ---------------------------------------------------------------------------
// L*

LStarLearner::LStarLearner(MembershipOracle& oracle, std::size_t num_inputs,
                           std::size_t num_outputs)
    : oracle_(oracle), num_inputs_(num_inputs), num_outputs_(num_outputs) {
    restart();
}

void LStarLearner::restart() {
    upper_.assign(1, Word{});
    suffixes_.clear();
    for (Symbol a = 0; a < num_inputs_; ++a) suffixes_.push_back(Word{a});
    rows_.clear();
    current_.reset();
}

const LStarLearner::Row& LStarLearner::row(const Word& u) {
    Row& r = rows_[u];
    while (r.size() < suffixes_.size()) {
        const Word& e = suffixes_[r.size()];
        const Word answer = oracle_.query(concat(u, e));
        r.push_back(last(answer, e.size()));
    }
    return r;
}

MealyMachine LStarLearner::hypothesis() {
    if (current_) return *current_;

    std::map<Row, StateId> state_of;
    for (bool closed = false; !closed;) {
        closed = true;
        state_of.clear();
        for (std::size_t s = 0; s < upper_.size(); ++s) {
            state_of.emplace(row(upper_[s]), static_cast<StateId>(s));
        }
        for (std::size_t s = 0; s < upper_.size() && closed; ++s) {
            for (Symbol a = 0; a < num_inputs_; ++a) {
                Word ext = upper_[s];
                ext.push_back(a);
                if (!state_of.contains(row(ext))) {
                    upper_.push_back(std::move(ext));
                    closed = false;
                    break;
                }
            }
        }
    }
    if (state_of.size() != upper_.size()) {
        throw std::logic_error("L* upper rows are not pairwise distinct");
    }

    MealyMachine h(upper_.size(), num_inputs_, num_outputs_, 0);
    for (std::size_t s = 0; s < upper_.size(); ++s) {
        const Row& r = row(upper_[s]);
        for (Symbol a = 0; a < num_inputs_; ++a) {
            Word ext = upper_[s];
            ext.push_back(a);
            // Suffix column a holds the single-letter output.
            h.set_transition(static_cast<StateId>(s), a, state_of.at(row(ext)), r[a].front());
        }
    }
    current_ = h;
    return h;
}

void LStarLearner::refine(const Trace& counterexample) {
    const MealyMachine h = hypothesis();
    const CounterexampleSplit split =
        rivest_schapire_split(oracle_, h, upper_, counterexample.input);
    for (const auto& e : suffixes_) {
        if (e == split.suffix) throw std::logic_error("separating suffix already in the table");
    }
    suffixes_.push_back(split.suffix);
    current_.reset();
}

// ---------------------------------------------------------------------------
// Kearns–Vazirani

KVLearner::KVLearner(MembershipOracle& oracle, std::size_t num_inputs, std::size_t num_outputs)
    : oracle_(oracle), num_inputs_(num_inputs), num_outputs_(num_outputs) {
    restart();
}

void KVLearner::restart() {
    nodes_.assign(1, Node{});
    nodes_[0].state = 0;
    leaf_access_.assign(1, Word{});
    leaf_node_.assign(1, 0);
    current_.reset();
}

Word KVLearner::answer_suffix(const Word& u, const Word& v) {
    return last(oracle_.query(concat(u, v)), v.size());
}

std::size_t KVLearner::sift(const Word& u) {
    std::size_t n = 0;
    while (!nodes_[n].leaf) {
        const Word key = answer_suffix(u, nodes_[n].separator);
        auto it = nodes_[n].children.find(key);
        if (it == nodes_[n].children.end()) {
            // u is separated from every known state: it becomes a new one.
            const std::size_t fresh = nodes_.size();
            Node leaf;
            leaf.state = leaf_access_.size();
            nodes_.push_back(std::move(leaf));
            nodes_[n].children.emplace(key, fresh);
            leaf_access_.push_back(u);
            leaf_node_.push_back(fresh);
            return nodes_[fresh].state;
        }
        n = it->second;
    }
    return nodes_[n].state;
}

MealyMachine KVLearner::hypothesis() {
    if (current_) return *current_;

    std::vector<std::vector<std::pair<StateId, Symbol>>> rows;
    for (std::size_t q = 0; q < leaf_access_.size(); ++q) {
        std::vector<std::pair<StateId, Symbol>> row;
        for (Symbol a = 0; a < num_inputs_; ++a) {
            Word ext = leaf_access_[q];
            ext.push_back(a);
            const Symbol out = oracle_.query(ext).back();
            const auto target = static_cast<StateId>(sift(ext));
            row.emplace_back(target, out);
        }
        rows.push_back(std::move(row));
    }

    MealyMachine h(leaf_access_.size(), num_inputs_, num_outputs_, 0);
    for (std::size_t q = 0; q < rows.size(); ++q) {
        for (Symbol a = 0; a < num_inputs_; ++a) {
            h.set_transition(static_cast<StateId>(q), a, rows[q][a].first, rows[q][a].second);
        }
    }
    current_ = h;
    return h;
}

void KVLearner::refine(const Trace& counterexample) {
    const MealyMachine h = hypothesis();
    const CounterexampleSplit split =
        rivest_schapire_split(oracle_, h, leaf_access_, counterexample.input);

    Word fresh_access = split.access;
    fresh_access.push_back(split.letter);
    const StateId old_state = h.reach(fresh_access);
    const Word& old_access = leaf_access_[old_state];

    const Word old_key = answer_suffix(old_access, split.suffix);
    const Word new_key = answer_suffix(fresh_access, split.suffix);
    if (old_key == new_key) throw std::logic_error("suffix does not separate the split states");

    // Turn the old leaf into an inner node with two leaf children.
    const std::size_t inner = leaf_node_[old_state];
    const std::size_t keep = nodes_.size();
    const std::size_t added = keep + 1;
    Node kept;
    kept.state = old_state;
    Node fresh;
    fresh.state = leaf_access_.size();
    nodes_.push_back(std::move(kept));
    nodes_.push_back(std::move(fresh));

    Node& node = nodes_[inner];
    node.leaf = false;
    node.separator = split.suffix;
    node.children.emplace(old_key, keep);
    node.children.emplace(new_key, added);
    leaf_node_[old_state] = keep;
    leaf_node_.push_back(added);
    leaf_access_.push_back(std::move(fresh_access));
    current_.reset();
}

}  // namespace ceal
