#include "ceal/sul.hpp"

#include <charconv>
#include <map>

namespace ceal {

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    // splitmix64 finalizer
    std::uint64_t z = seed ^ h;
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string to_string(NoiseKind k) {
    switch (k) {
        case NoiseKind::none: return "none";
        case NoiseKind::input: return "input";
        case NoiseKind::output: return "output";
    }
    return "none";
}

NoiseKind parse_noise_kind(std::string_view text) {
    if (text == "none") return NoiseKind::none;
    if (text == "input") return NoiseKind::input;
    if (text == "output") return NoiseKind::output;
    throw std::invalid_argument("unknown noise kind '" + std::string(text) + "'");
}

void NoiseModel::validate() const {
    if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("noise rate must lie in [0,1]");
}

Trace System::query(const Word& w, QueryPhase phase) {
    if (limit_ && meter_.tests >= *limit_) throw QueryBudgetExhausted();
    Trace t = execute(w);
    ++meter_.tests;
    meter_.symbols += t.input.size();
    if (phase == QueryPhase::membership) {
        ++meter_.mq_tests;
        meter_.mq_symbols += t.input.size();
    } else {
        ++meter_.eq_tests;
        meter_.eq_symbols += t.input.size();
    }
    return t;
}

SimulatedSystem::SimulatedSystem(MealyMachine target, NoiseModel noise, std::uint64_t seed)
    : target_(std::move(target)), noise_(noise), rng_(seed) {
    noise_.validate();
}

Trace SimulatedSystem::execute(const Word& w) {
    if (noise_.kind == NoiseKind::none || noise_.rate == 0.0) return Trace{w, target_.run(w)};

    std::bernoulli_distribution flip(noise_.rate);
    if (noise_.kind == NoiseKind::input) {
        std::uniform_int_distribution<Symbol> any(0, static_cast<Symbol>(target_.num_inputs() - 1));
        Word perturbed = w;
        for (auto& a : perturbed) {
            if (flip(rng_)) a = any(rng_);
        }
        Word out = target_.run(perturbed);
        return Trace{std::move(perturbed), std::move(out)};
    }
    std::uniform_int_distribution<Symbol> any(0, static_cast<Symbol>(target_.num_outputs() - 1));
    Word out = target_.run(w);
    for (auto& b : out) {
        if (flip(rng_)) b = any(rng_);
    }
    return Trace{w, std::move(out)};
}

void RepeatPolicy::validate() const {
    if (min_repeats == 0 || min_repeats > max_repeats) {
        throw std::invalid_argument("repeat policy needs 1 <= min_repeats <= max_repeats");
    }
    if (!(threshold > 0.5 && threshold <= 1.0)) {
        throw std::invalid_argument("agreement threshold must lie in (0.5, 1]");
    }
}

std::string RepeatPolicy::label() const {
    return "(" + std::to_string(min_repeats) + "," + std::to_string(max_repeats) + ")";
}

RepeatPolicy parse_repeat_policy(std::string_view text) {
    std::string s;
    for (char c : text) {
        if (c != '(' && c != ')' && c != ' ') s.push_back(c);
    }
    const auto sep = s.find_first_of(":,");
    if (sep == std::string::npos) throw std::invalid_argument("repeats must look like min:max");
    RepeatPolicy p;
    const auto parse = [](std::string_view v, std::uint32_t& out) {
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc{} || ptr != v.data() + v.size()) {
            throw std::invalid_argument("bad repeat count '" + std::string(v) + "'");
        }
    };
    parse(std::string_view(s).substr(0, sep), p.min_repeats);
    parse(std::string_view(s).substr(sep + 1), p.max_repeats);
    p.validate();
    return p;
}

namespace {

template <typename Key, typename Extract>
Key vote(System& system, const RepeatPolicy& policy, const Word& w, QueryPhase phase,
         Extract extract) {
    policy.validate();
    std::map<Key, std::uint32_t> votes;
    std::uint32_t total = 0;
    while (total < policy.max_repeats) {
        ++votes[extract(system.query(w, phase))];
        ++total;
        if (total < policy.min_repeats) continue;
        for (const auto& [key, count] : votes) {
            if (static_cast<double>(count) >= policy.threshold * total - 1e-9) return key;
        }
    }
    // std::map iterates in lexicographic order, so the first maximum wins ties.
    const Key* best = nullptr;
    std::uint32_t best_count = 0;
    for (const auto& [key, count] : votes) {
        if (count > best_count) {
            best = &key;
            best_count = count;
        }
    }
    return *best;
}

}  // namespace

Word majority_query(System& system, const RepeatPolicy& policy, const Word& w, QueryPhase phase) {
    return vote<Word>(system, policy, w, phase, [](Trace t) { return std::move(t.output); });
}

Trace majority_trace(System& system, const RepeatPolicy& policy, const Word& w, QueryPhase phase) {
    return vote<Trace>(system, policy, w, phase, [](Trace t) { return t; });
}

}  // namespace ceal
