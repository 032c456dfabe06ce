#include "ceal/eqtest.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>

namespace ceal {

std::string to_string(SamplerMethod m) {
    return m == SamplerMethod::random_walk ? "random_walk" : "randomized_wp";
}

SamplerMethod parse_sampler_method(std::string_view text) {
    if (text == "random_walk") return SamplerMethod::random_walk;
    if (text == "randomized_wp") return SamplerMethod::randomized_wp;
    throw std::invalid_argument("unknown sampler '" + std::string(text) + "'");
}

void SamplerConfig::validate() const {
    if (!(mean_infix >= 0.0)) throw std::invalid_argument("mean_infix must be >= 0");
    if (max_len < 1) throw std::invalid_argument("max_len must be >= 1");
}

std::vector<Word> access_sequences(const MealyMachine& h) {
    std::vector<std::optional<Word>> access(h.num_states());
    access[h.initial()] = Word{};
    std::vector<StateId> queue{h.initial()};
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const StateId q = queue[head];
        for (Symbol a = 0; a < h.num_inputs(); ++a) {
            const StateId t = h.next(q, a);
            if (access[t]) continue;
            Word w = *access[q];
            w.push_back(a);
            access[t] = std::move(w);
            queue.push_back(t);
        }
    }
    std::vector<Word> out;
    out.reserve(access.size());
    for (StateId q = 0; q < access.size(); ++q) {
        if (!access[q]) throw DomainError("state " + std::to_string(q) + " is unreachable");
        out.push_back(std::move(*access[q]));
    }
    return out;
}

std::vector<Word> characterization_set(const MealyMachine& h) {
    // Splitting tree: inner nodes carry a separating word, leaves a block.
    struct Node {
        Word separator;
        std::vector<StateId> block;
        std::size_t parent = 0;
        std::size_t depth = 0;
        bool leaf = true;
    };
    std::vector<Node> tree;
    tree.push_back(Node{{}, {}, 0, 0, true});
    std::vector<std::size_t> leaf_of(h.num_states(), 0);
    for (StateId q = 0; q < h.num_states(); ++q) tree[0].block.push_back(q);

    const auto lca = [&](std::size_t x, std::size_t y) {
        while (tree[x].depth > tree[y].depth) x = tree[x].parent;
        while (tree[y].depth > tree[x].depth) y = tree[y].parent;
        while (x != y) {
            x = tree[x].parent;
            y = tree[y].parent;
        }
        return x;
    };

    const auto split = [&](std::size_t node, const Word& w) {
        std::map<Word, std::vector<StateId>> groups;
        for (StateId q : tree[node].block) groups[h.run_from(q, w)].push_back(q);
        if (groups.size() < 2) return false;
        tree[node].leaf = false;
        tree[node].separator = w;
        const std::size_t depth = tree[node].depth + 1;
        for (auto& [out, states] : groups) {
            const std::size_t child = tree.size();
            for (StateId q : states) leaf_of[q] = child;
            tree.push_back(Node{{}, std::move(states), node, depth, true});
        }
        tree[node].block.clear();
        return true;
    };

    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t n = 0; n < tree.size(); ++n) {
            if (!tree[n].leaf || tree[n].block.size() < 2) continue;
            const auto& block = tree[n].block;
            // A letter whose output already differs inside the block.
            for (Symbol a = 0; a < h.num_inputs() && !changed; ++a) {
                const Symbol first = h.output(block.front(), a);
                for (StateId q : block) {
                    if (h.output(q, a) != first) {
                        changed = split(n, Word{a});
                        break;
                    }
                }
            }
            if (changed) break;
            // A letter leading into different leaves: prepend it to their separator.
            for (Symbol a = 0; a < h.num_inputs() && !changed; ++a) {
                const std::size_t first = leaf_of[h.next(block.front(), a)];
                for (StateId q : block) {
                    const std::size_t other = leaf_of[h.next(q, a)];
                    if (other != first) {
                        Word w{a};
                        const Word& rest = tree[lca(first, other)].separator;
                        w.insert(w.end(), rest.begin(), rest.end());
                        changed = split(n, w);
                        break;
                    }
                }
            }
            if (changed) break;
        }
    }

    std::set<Word> words;
    for (const auto& node : tree) {
        if (!node.leaf) words.insert(node.separator);
    }
    if (words.empty()) words.insert(Word{0});
    return {words.begin(), words.end()};
}

WordSampler::WordSampler(const MealyMachine& h, SamplerConfig cfg)
    : cfg_(cfg), num_inputs_(h.num_inputs()) {
    cfg_.validate();
    if (cfg_.method == SamplerMethod::randomized_wp) {
        const MealyMachine m = minimize(h);
        access_ = access_sequences(m);
        separators_ = characterization_set(m);
    }
}

Word WordSampler::random_infix(std::mt19937_64& rng) const {
    std::geometric_distribution<std::size_t> length(1.0 / (1.0 + cfg_.mean_infix));
    std::uniform_int_distribution<Symbol> letter(0, static_cast<Symbol>(num_inputs_ - 1));
    const std::size_t n = std::min(length(rng), cfg_.max_len);
    Word w(n);
    for (auto& a : w) a = letter(rng);
    return w;
}

Word WordSampler::sample(std::mt19937_64& rng) const {
    if (cfg_.method == SamplerMethod::random_walk) {
        Word w = random_infix(rng);
        if (w.empty()) {
            std::uniform_int_distribution<Symbol> letter(0, static_cast<Symbol>(num_inputs_ - 1));
            w.push_back(letter(rng));
        }
        return w;
    }
    std::uniform_int_distribution<std::size_t> state(0, access_.size() - 1);
    std::uniform_int_distribution<std::size_t> sep(0, separators_.size() - 1);
    Word w = access_[state(rng)];
    const Word infix = random_infix(rng);
    w.insert(w.end(), infix.begin(), infix.end());
    const Word& tail = separators_[sep(rng)];
    w.insert(w.end(), tail.begin(), tail.end());
    if (w.size() > cfg_.max_len) w.resize(cfg_.max_len);
    return w;
}

Word sample_word(const MealyMachine& h, const SamplerConfig& cfg, std::mt19937_64& rng) {
    return WordSampler(h, cfg).sample(rng);
}

RandomTestGenerator::RandomTestGenerator(SamplerConfig cfg, std::uint64_t seed)
    : cfg_(cfg), rng_(seed) {
    cfg_.validate();
}

void RandomTestGenerator::prepare(const MealyMachine& hypothesis) {
    sampler_.emplace(hypothesis, cfg_);
}

Word RandomTestGenerator::next() {
    if (!sampler_) throw std::logic_error("test generator used before prepare()");
    return sampler_->sample(rng_);
}

}  // namespace ceal
