#include "ceal/obstree.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace ceal {

bool conflicts(const Trace& a, const Trace& b) {
    const std::size_t n = std::min(a.input.size(), b.input.size());
    for (std::size_t j = 0; j < n; ++j) {
        if (a.input[j] != b.input[j]) return false;
        if (a.output[j] != b.output[j]) return true;
    }
    return false;
}

std::string to_string(UpdateStrategy s) {
    return s == UpdateStrategy::most_recent ? "most_recent" : "most_frequent";
}

UpdateStrategy parse_update_strategy(std::string_view text) {
    if (text == "most_recent") return UpdateStrategy::most_recent;
    if (text == "most_frequent") return UpdateStrategy::most_frequent;
    throw std::invalid_argument("unknown update strategy '" + std::string(text) + "'");
}

std::unique_ptr<ObservationTree> make_tree(UpdateStrategy strategy, std::size_t num_inputs) {
    if (strategy == UpdateStrategy::most_recent) return std::make_unique<MostRecentTree>(num_inputs);
    return std::make_unique<MostFrequentTree>(num_inputs);
}

namespace {

void check_trace(const Trace& t, std::size_t k) {
    if (t.input.size() != t.output.size()) {
        throw std::invalid_argument("trace input and output lengths differ");
    }
    for (Symbol a : t.input) {
        if (a >= k) throw DomainError("input symbol out of range");
    }
}

std::string symbol_name(Symbol s, const Alphabet* alphabet) {
    return alphabet != nullptr ? alphabet->name(s) : std::to_string(s);
}

}  // namespace

// ---------------------------------------------------------------------------
// Most Recent

MostRecentTree::MostRecentTree(std::size_t num_inputs) : k_(num_inputs) {
    if (k_ == 0) throw DomainError("observation tree needs a non-empty input alphabet");
    allocate();
}

NodeId MostRecentTree::allocate() {
    NodeId n;
    if (!free_.empty()) {
        n = free_.back();
        free_.pop_back();
        created_[n] = clock_++;
    } else {
        n = static_cast<NodeId>(created_.size());
        created_.push_back(clock_++);
        child_.resize(child_.size() + k_, kNoNode);
        output_.resize(output_.size() + k_, 0);
    }
    ++live_;
    return n;
}

void MostRecentTree::discard_subtree(NodeId root) {
    std::vector<NodeId> stack{root};
    while (!stack.empty()) {
        const NodeId n = stack.back();
        stack.pop_back();
        for (Symbol a = 0; a < k_; ++a) {
            auto& c = child_[slot(n, a)];
            if (c != kNoNode) stack.push_back(c);
            c = kNoNode;
        }
        free_.push_back(n);
        --live_;
    }
}

std::optional<Word> MostRecentTree::lookup(const Word& in) const {
    NodeId state = 0;
    Word out;
    out.reserve(in.size());
    for (Symbol a : in) {
        if (a >= k_) throw DomainError("input symbol out of range");
        const NodeId next = child_[slot(state, a)];
        if (next == kNoNode) return std::nullopt;
        out.push_back(output_[slot(state, a)]);
        state = next;
    }
    return out;
}

bool MostRecentTree::update(const Trace& trace) {
    check_trace(trace, k_);
    NodeId state = 0;
    bool conflicted = false;
    for (std::size_t j = 0; j < trace.input.size(); ++j) {
        const Symbol a = trace.input[j];
        const Symbol b = trace.output[j];
        const NodeId next = child_[slot(state, a)];
        if (next != kNoNode && output_[slot(state, a)] == b) {
            state = next;
            continue;
        }
        if (next != kNoNode) {
            discard_subtree(next);
            conflicted = true;
        }
        const NodeId fresh = allocate();
        child_[slot(state, a)] = fresh;
        output_[slot(state, a)] = b;
        state = fresh;
    }
    return conflicted;
}

TreeLanguage MostRecentTree::language() const {
    TreeLanguage lang;
    struct Frame {
        NodeId node;
        Trace trace;
    };
    std::vector<Frame> stack{{0, {}}};
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        for (Symbol a = 0; a < k_; ++a) {
            const NodeId c = child_[slot(f.node, a)];
            if (c == kNoNode) continue;
            Trace t = f.trace;
            t.input.push_back(a);
            t.output.push_back(output_[slot(f.node, a)]);
            stack.push_back({c, t});
        }
        lang.insert(std::move(f.trace));
    }
    return lang;
}

std::vector<StampedWord> MostRecentTree::maximal_inputs() const {
    std::vector<StampedWord> leaves;
    std::vector<std::pair<NodeId, Word>> stack{{0, {}}};
    while (!stack.empty()) {
        auto [n, w] = std::move(stack.back());
        stack.pop_back();
        bool leaf = true;
        for (Symbol a = 0; a < k_; ++a) {
            const NodeId c = child_[slot(n, a)];
            if (c == kNoNode) continue;
            leaf = false;
            Word next = w;
            next.push_back(a);
            stack.emplace_back(c, std::move(next));
        }
        if (leaf && n != 0) leaves.push_back({created_[n], std::move(w)});
    }
    return leaves;
}

std::optional<Trace> MostRecentTree::find_disagreement(const MealyMachine& h) const {
    if (h.num_inputs() != k_) throw DomainError("hypothesis input alphabet mismatch");
    struct Visit {
        NodeId node;
        StateId state;
        std::size_t parent;
        Symbol via;
    };
    std::vector<Visit> order{{0, h.initial(), 0, 0}};
    const auto rebuild = [&](std::size_t idx, Symbol a, Symbol b) {
        Trace t;
        t.input.push_back(a);
        t.output.push_back(b);
        while (idx != 0) {
            const Visit& v = order[idx];
            t.input.push_back(v.via);
            t.output.push_back(output_[slot(order[v.parent].node, v.via)]);
            idx = v.parent;
        }
        std::reverse(t.input.begin(), t.input.end());
        std::reverse(t.output.begin(), t.output.end());
        return t;
    };
    for (std::size_t head = 0; head < order.size(); ++head) {
        const Visit v = order[head];
        for (Symbol a = 0; a < k_; ++a) {
            const NodeId c = child_[slot(v.node, a)];
            if (c == kNoNode) continue;
            const Symbol b = output_[slot(v.node, a)];
            if (h.output(v.state, a) != b) return rebuild(head, a, b);
            order.push_back({c, h.next(v.state, a), head, a});
        }
    }
    return std::nullopt;
}

std::string MostRecentTree::to_dot(const Alphabet* inputs, const Alphabet* outputs) const {
    std::ostringstream os;
    os << "digraph tree {\n";
    std::vector<NodeId> stack{0};
    while (!stack.empty()) {
        const NodeId n = stack.back();
        stack.pop_back();
        os << "\tn" << n << " [label=\"\"];\n";
        for (Symbol a = 0; a < k_; ++a) {
            const NodeId c = child_[slot(n, a)];
            if (c == kNoNode) continue;
            os << "\tn" << n << " -> n" << c << " [label=\"" << symbol_name(a, inputs) << " / "
               << symbol_name(output_[slot(n, a)], outputs) << "\"];\n";
            stack.push_back(c);
        }
    }
    os << "}\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Most Frequent

MostFrequentTree::MostFrequentTree(std::size_t num_inputs) : k_(num_inputs) {
    if (k_ == 0) throw DomainError("observation tree needs a non-empty input alphabet");
    entries_.resize(k_);
    output_of_.push_back(0);
    weight_.push_back(1);
}

NodeId MostFrequentTree::add_node(NodeId parent, Symbol a, Symbol out) {
    const auto n = static_cast<NodeId>(weight_.size());
    weight_.push_back(1);
    output_of_.push_back(out);
    entries_.resize(entries_.size() + k_);
    entries_[static_cast<std::size_t>(parent) * k_ + a].push_back(n);
    return n;
}

std::optional<MostFrequentTree::Step> MostFrequentTree::next_state(NodeId node, Symbol a) const {
    const auto& list = successors(node, a);
    std::optional<Step> best;
    std::uint64_t max = 0;
    // Newest first with a strict comparison, so ties resolve to the newest entry.
    for (auto it = list.rbegin(); it != list.rend(); ++it) {
        if (weight_[*it] > max) {
            max = weight_[*it];
            best = Step{*it, output_of_[*it]};
        }
    }
    return best;
}

std::optional<Word> MostFrequentTree::lookup(const Word& in) const {
    NodeId state = 0;
    Word out;
    out.reserve(in.size());
    for (Symbol a : in) {
        if (a >= k_) throw DomainError("input symbol out of range");
        const auto next = next_state(state, a);
        if (!next) return std::nullopt;
        out.push_back(next->output);
        state = next->node;
    }
    return out;
}

bool MostFrequentTree::update(const Trace& trace) {
    check_trace(trace, k_);
    NodeId state = 0;
    bool conflicted = false;
    bool main_branch = true;
    for (std::size_t j = 0; j < trace.input.size(); ++j) {
        const Symbol a = trace.input[j];
        const Symbol b = trace.output[j];
        const auto before = main_branch ? next_state(state, a) : std::nullopt;

        NodeId q = kNoNode;
        for (NodeId c : successors(state, a)) {
            if (output_of_[c] == b) {
                q = c;
                break;
            }
        }
        if (q != kNoNode) {
            ++weight_[q];
        } else {
            q = add_node(state, a, b);
        }

        if (main_branch && before) {
            if (next_state(state, a) != before) conflicted = true;
            if (before->node != q) main_branch = false;
        }
        state = q;
    }
    return conflicted;
}

TreeLanguage MostFrequentTree::language() const {
    TreeLanguage lang;
    std::vector<std::pair<NodeId, Trace>> stack{{0, {}}};
    while (!stack.empty()) {
        auto [n, t] = std::move(stack.back());
        stack.pop_back();
        for (Symbol a = 0; a < k_; ++a) {
            const auto next = next_state(n, a);
            if (!next) continue;
            Trace u = t;
            u.input.push_back(a);
            u.output.push_back(next->output);
            stack.emplace_back(next->node, std::move(u));
        }
        lang.insert(std::move(t));
    }
    return lang;
}

std::vector<StampedWord> MostFrequentTree::maximal_inputs() const {
    std::vector<StampedWord> leaves;
    std::vector<std::pair<NodeId, Word>> stack{{0, {}}};
    while (!stack.empty()) {
        auto [n, w] = std::move(stack.back());
        stack.pop_back();
        bool leaf = true;
        for (Symbol a = 0; a < k_; ++a) {
            const auto next = next_state(n, a);
            if (!next) continue;
            leaf = false;
            Word u = w;
            u.push_back(a);
            stack.emplace_back(next->node, std::move(u));
        }
        // Node ids are allocated in creation order.
        if (leaf && n != 0) leaves.push_back({n, std::move(w)});
    }
    return leaves;
}

std::optional<Trace> MostFrequentTree::find_disagreement(const MealyMachine& h) const {
    if (h.num_inputs() != k_) throw DomainError("hypothesis input alphabet mismatch");
    struct Visit {
        NodeId node;
        StateId state;
        std::size_t parent;
        Symbol via;
    };
    std::vector<Visit> order{{0, h.initial(), 0, 0}};
    for (std::size_t head = 0; head < order.size(); ++head) {
        const Visit v = order[head];
        for (Symbol a = 0; a < k_; ++a) {
            const auto next = next_state(v.node, a);
            if (!next) continue;
            if (h.output(v.state, a) != next->output) {
                Trace t{{a}, {next->output}};
                for (std::size_t idx = head; idx != 0; idx = order[idx].parent) {
                    t.input.push_back(order[idx].via);
                    t.output.push_back(output_of_[order[idx].node]);
                }
                std::reverse(t.input.begin(), t.input.end());
                std::reverse(t.output.begin(), t.output.end());
                return t;
            }
            order.push_back({next->node, h.next(v.state, a), head, a});
        }
    }
    return std::nullopt;
}

std::string MostFrequentTree::to_dot(const Alphabet* inputs, const Alphabet* outputs) const {
    std::ostringstream os;
    os << "digraph tree {\n";
    for (NodeId n = 0; n < weight_.size(); ++n) {
        os << "\tn" << n << " [label=\"" << weight_[n] << "\"];\n";
    }
    for (NodeId n = 0; n < weight_.size(); ++n) {
        for (Symbol a = 0; a < k_; ++a) {
            for (NodeId c : successors(n, a)) {
                os << "\tn" << n << " -> n" << c << " [label=\"" << symbol_name(a, inputs) << " / "
                   << symbol_name(output_of_[c], outputs) << "\"];\n";
            }
        }
    }
    os << "}\n";
    return os.str();
}

}  // namespace ceal
