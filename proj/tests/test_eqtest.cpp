#include <doctest.h>

#include <map>
#include <random>

#include "ceal/eqtest.hpp"
#include "support.hpp"

using namespace ceal;
using ceal::testing::w;

namespace {

MealyMachine minimal_random(std::size_t n, std::uint64_t seed) {
    return minimize(random_machine(n, 2 + seed % 2, 2 + (seed / 2) % 2, seed));
}

}  // namespace

TEST_CASE("toggle access words and separators") {
    const MealyMachine t = testing::toggle();
    CHECK(access_sequences(t) == std::vector<Word>{w(""), w("a")});
    CHECK(characterization_set(t) == std::vector<Word>{w("a")});
    CHECK(characterization_set(testing::constant_x()) == std::vector<Word>{w("a")});
}

TEST_CASE("access words reach their states and are shortest") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const MealyMachine m = random_machine(1 + seed % 8, 2 + seed % 2, 2, seed);
        const auto access = access_sequences(m);
        REQUIRE(access.size() == m.num_states());
        // Breadth-first distances, computed independently.
        std::vector<std::size_t> dist(m.num_states(), SIZE_MAX);
        dist[m.initial()] = 0;
        for (std::size_t round = 0; round < m.num_states(); ++round) {
            for (StateId q = 0; q < m.num_states(); ++q) {
                if (dist[q] == SIZE_MAX) continue;
                for (Symbol a = 0; a < m.num_inputs(); ++a) {
                    dist[m.next(q, a)] = std::min(dist[m.next(q, a)], dist[q] + 1);
                }
            }
        }
        for (StateId q = 0; q < m.num_states(); ++q) {
            CHECK(m.reach(access[q]) == q);
            CHECK(access[q].size() == dist[q]);
        }
    }
}

TEST_CASE("unreachable states are rejected") {
    MealyMachine m(2, 1, 1);
    m.set_transition(0, 0, 0, 0);
    m.set_transition(1, 0, 0, 0);
    CHECK_THROWS_AS(access_sequences(m), DomainError);
}

TEST_CASE("characterization set separates every pair of states") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const MealyMachine m = minimal_random(2 + seed % 9, seed);
        const auto words = characterization_set(m);
        CHECK(words.size() <= std::max<std::size_t>(1, m.num_states() - 1));
        for (StateId p = 0; p < m.num_states(); ++p) {
            for (StateId q = p + 1; q < m.num_states(); ++q) {
                bool separated = false;
                for (const auto& v : words) separated |= m.run_from(p, v) != m.run_from(q, v);
                CHECK(separated);
            }
        }
    }
}

TEST_CASE("zero infix on toggle gives a or aa evenly") {
    WordSampler s(testing::toggle(), SamplerConfig{SamplerMethod::randomized_wp, 0.0, 64});
    std::mt19937_64 rng(11);
    std::map<Word, int> seen;
    for (int k = 0; k < 4000; ++k) ++seen[s.sample(rng)];
    CHECK(seen.size() == 2);
    CHECK(std::abs(seen[w("a")] / 4000.0 - 0.5) <= 0.05);
    CHECK(std::abs(seen[w("aa")] / 4000.0 - 0.5) <= 0.05);
}

TEST_CASE("max_len caps sampled words") {
    std::mt19937_64 rng(3);
    const MealyMachine m = minimal_random(6, 5);
    for (auto method : {SamplerMethod::randomized_wp, SamplerMethod::random_walk}) {
        WordSampler s(m, SamplerConfig{method, 10.0, 1});
        for (int k = 0; k < 200; ++k) CHECK(s.sample(rng).size() == 1);
    }
}

TEST_CASE("infix lengths follow the configured mean") {
    // One state: access is empty and the only separator has length one.
    WordSampler s(testing::constant_x(), SamplerConfig{SamplerMethod::randomized_wp, 4.0, 1000});
    std::mt19937_64 rng(5);
    double total = 0;
    const int n = 20000;
    for (int k = 0; k < n; ++k) total += static_cast<double>(s.sample(rng).size()) - 1;
    CHECK(std::abs(total / n - 4.0) <= 0.4);
}

TEST_CASE("generators are deterministic and must be prepared") {
    const MealyMachine m = minimal_random(5, 7);
    RandomTestGenerator a(SamplerConfig{}, 99), b(SamplerConfig{}, 99);
    CHECK_THROWS_AS(a.next(), std::logic_error);
    a.prepare(m);
    b.prepare(m);
    for (int k = 0; k < 100; ++k) CHECK(a.next() == b.next());
}

TEST_CASE("sampled words find single-output mutations") {
    int found = 0, cases = 0;
    for (std::uint64_t seed = 0; cases < 20; ++seed) {
        const MealyMachine h = minimize(random_machine(6, 2, 2, 1000 + seed));
        if (h.num_states() != 6) continue;
        MealyMachine target = h;
        std::mt19937_64 pick(seed);
        const StateId q = static_cast<StateId>(pick() % 6);
        const Symbol a = static_cast<Symbol>(pick() % 2);
        target.set_transition(q, a, h.next(q, a), 1 - h.output(q, a));
        ++cases;
        WordSampler s(h, SamplerConfig{});
        std::mt19937_64 rng(seed);
        for (int k = 0; k < 500; ++k) {
            const Word v = s.sample(rng);
            if (h.run(v) != target.run(v)) {
                ++found;
                break;
            }
        }
    }
    CHECK(found >= 19);
}

TEST_CASE("sampler names and validation") {
    CHECK(parse_sampler_method("random_walk") == SamplerMethod::random_walk);
    CHECK(to_string(SamplerMethod::randomized_wp) == "randomized_wp");
    CHECK_THROWS(parse_sampler_method("wp"));
    CHECK_THROWS((SamplerConfig{SamplerMethod::random_walk, -1.0, 4}.validate()));
    CHECK_THROWS((SamplerConfig{SamplerMethod::random_walk, 1.0, 0}.validate()));
}
