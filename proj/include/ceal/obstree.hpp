#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ceal/mealy.hpp"

namespace ceal {

/// Prefix-closed, functional set of traces answered by a tree's lookup.
using TreeLanguage = std::set<Trace>;

/// True iff some common input prefix of a and b carries different outputs.
bool conflicts(const Trace& a, const Trace& b);

enum class UpdateStrategy { most_recent, most_frequent };

std::string to_string(UpdateStrategy s);
UpdateStrategy parse_update_strategy(std::string_view text);

/// A maximal trace of the language together with the creation stamp of its
/// last node. Stamps come from a per-tree monotone counter.
struct StampedWord {
    std::uint64_t created;
    Word input;
};

/// Common interface of the two observation trees.
///
/// `update` is the only mutating operation. It returns true exactly when the
/// new trace removed something from the language (a conflict).
class ObservationTree {
public:
    virtual ~ObservationTree() = default;

    virtual UpdateStrategy strategy() const noexcept = 0;
    virtual std::size_t num_inputs() const noexcept = 0;

    virtual std::optional<Word> lookup(const Word& in) const = 0;
    virtual bool update(const Trace& trace) = 0;

    virtual TreeLanguage language() const = 0;
    virtual std::vector<StampedWord> maximal_inputs() const = 0;

    /// A shortest trace of the language on which h disagrees, if any.
    virtual std::optional<Trace> find_disagreement(const MealyMachine& h) const = 0;

    virtual std::size_t node_count() const noexcept = 0;

    /// Debug rendering; not a stable format.
    virtual std::string to_dot(const Alphabet* inputs = nullptr,
                               const Alphabet* outputs = nullptr) const = 0;
};

std::unique_ptr<ObservationTree> make_tree(UpdateStrategy strategy, std::size_t num_inputs);

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

/// Tree-shaped partial Mealy machine. Conflicting subtrees are discarded and
/// replaced by the newest observation.
class MostRecentTree final : public ObservationTree {
public:
    explicit MostRecentTree(std::size_t num_inputs);

    UpdateStrategy strategy() const noexcept override { return UpdateStrategy::most_recent; }
    std::size_t num_inputs() const noexcept override { return k_; }

    std::optional<Word> lookup(const Word& in) const override;
    bool update(const Trace& trace) override;
    TreeLanguage language() const override;
    std::vector<StampedWord> maximal_inputs() const override;
    std::optional<Trace> find_disagreement(const MealyMachine& h) const override;
    std::size_t node_count() const noexcept override { return live_; }
    std::string to_dot(const Alphabet* inputs, const Alphabet* outputs) const override;

private:
    NodeId allocate();
    void discard_subtree(NodeId root);
    std::size_t slot(NodeId n, Symbol a) const { return static_cast<std::size_t>(n) * k_ + a; }

    std::size_t k_;
    std::vector<NodeId> child_;
    std::vector<Symbol> output_;
    std::vector<std::uint64_t> created_;
    std::vector<NodeId> free_;
    std::uint64_t clock_ = 0;
    std::size_t live_ = 0;
};

/// Weighted non-deterministic tree: every observation is kept, and lookup
/// follows the heaviest successor, ties going to the most recently created.
class MostFrequentTree final : public ObservationTree {
public:
    explicit MostFrequentTree(std::size_t num_inputs);

    struct Step {
        NodeId node;
        Symbol output;
        bool operator==(const Step&) const = default;
    };

    UpdateStrategy strategy() const noexcept override { return UpdateStrategy::most_frequent; }
    std::size_t num_inputs() const noexcept override { return k_; }

    /// Heaviest successor of `node` under `a`; std::nullopt when there is none.
    std::optional<Step> next_state(NodeId node, Symbol a) const;

    std::optional<Word> lookup(const Word& in) const override;
    bool update(const Trace& trace) override;
    TreeLanguage language() const override;
    std::vector<StampedWord> maximal_inputs() const override;
    std::optional<Trace> find_disagreement(const MealyMachine& h) const override;
    std::size_t node_count() const noexcept override { return weight_.size(); }
    std::string to_dot(const Alphabet* inputs, const Alphabet* outputs) const override;

    NodeId root() const noexcept { return 0; }
    std::uint64_t weight(NodeId n) const { return weight_.at(n); }
    /// Output on the edge into n.
    Symbol edge_output(NodeId n) const { return output_of_.at(n); }
    /// Successors of (node, a), oldest first.
    const std::vector<NodeId>& successors(NodeId node, Symbol a) const {
        return entries_.at(static_cast<std::size_t>(node) * k_ + a);
    }

private:
    NodeId add_node(NodeId parent, Symbol a, Symbol out);

    std::size_t k_;
    std::vector<std::vector<NodeId>> entries_;  // per (node, input), oldest first
    std::vector<Symbol> output_of_;             // output on the edge into a node
    std::vector<std::uint64_t> weight_;
};

}  // namespace ceal
