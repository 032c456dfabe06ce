#include <map>

#include "support.hpp"

namespace ceal::testing {

TreeLanguage prefixes(const Trace& t) {
    TreeLanguage out;
    for (std::size_t n = 0; n <= t.input.size(); ++n) {
        out.insert(Trace{prefix(t.input, n), prefix(t.output, n)});
    }
    return out;
}

TreeLanguage most_recent_oracle(const std::vector<Trace>& stream) {
    TreeLanguage lang{Trace{}};
    for (std::size_t k = 0; k < stream.size(); ++k) {
        bool overridden = false;
        for (std::size_t l = k + 1; l < stream.size() && !overridden; ++l) {
            overridden = conflicts(stream[k], stream[l]);
        }
        if (!overridden) lang.merge(prefixes(stream[k]));
    }
    return lang;
}

TreeLanguage most_frequent_oracle(const std::vector<Trace>& stream, std::size_t num_inputs) {
    // count[p]: traces having p as a prefix; born[p]: first trace containing p.
    std::map<Trace, std::size_t> count;
    std::map<Trace, std::size_t> born;
    for (std::size_t k = 0; k < stream.size(); ++k) {
        for (const auto& p : prefixes(stream[k])) {
            ++count[p];
            born.try_emplace(p, k);
        }
    }
    TreeLanguage lang{Trace{}};
    std::vector<Trace> frontier{Trace{}};
    while (!frontier.empty()) {
        const Trace p = frontier.back();
        frontier.pop_back();
        for (Symbol a = 0; a < num_inputs; ++a) {
            const Trace* best = nullptr;
            for (const auto& [q, c] : count) {
                if (q.input.size() != p.input.size() + 1) continue;
                if (prefix(q.input, p.input.size()) != p.input || q.input.back() != a) continue;
                if (prefix(q.output, p.output.size()) != p.output) continue;
                if (best == nullptr || c > count.at(*best) ||
                    (c == count.at(*best) && born.at(q) > born.at(*best))) {
                    best = &q;
                }
            }
            if (best != nullptr) {
                lang.insert(*best);
                frontier.push_back(*best);
            }
        }
    }
    return lang;
}

std::vector<Trace> random_stream(std::mt19937_64& rng, std::size_t max_traces, std::size_t max_len) {
    std::uniform_int_distribution<std::size_t> n_traces(1, max_traces);
    std::uniform_int_distribution<std::size_t> length(0, max_len);
    std::uniform_int_distribution<Symbol> bit(0, 1);
    std::vector<Trace> stream(n_traces(rng));
    for (auto& t : stream) {
        const std::size_t n = length(rng);
        for (std::size_t j = 0; j < n; ++j) {
            t.input.push_back(bit(rng));
            t.output.push_back(bit(rng));
        }
    }
    return stream;
}

}  // namespace ceal::testing
