#include <doctest.h>

#include "ceal/sul.hpp"
#include "stubs.hpp"
#include "support.hpp"

using namespace ceal;
using ceal::testing::w;

TEST_CASE("noise-free system is the target") {
    const MealyMachine m = random_machine(5, 3, 3, 8);
    SimulatedSystem sys(m, NoiseModel{}, 1);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Word in(seed % 9);
        for (std::size_t j = 0; j < in.size(); ++j) in[j] = (seed + j) % 3;
        const Trace t = sys.query(in, QueryPhase::membership);
        CHECK(t.input == in);
        CHECK(t.output == m.run(in));
    }
}

TEST_CASE("full-rate output noise over a one-letter output alphabet changes nothing") {
    MealyMachine m(1, 2, 1);
    m.set_transition(0, 0, 0, 0);
    m.set_transition(0, 1, 0, 0);
    SimulatedSystem sys(m, NoiseModel{NoiseKind::output, 1.0}, 3);
    CHECK(sys.query(w("abab"), QueryPhase::membership).output == Word(4, 0));
}

TEST_CASE("noise preserves lengths and input noise reports the executed word") {
    const MealyMachine m = random_machine(4, 3, 3, 2);
    for (auto kind : {NoiseKind::input, NoiseKind::output}) {
        SimulatedSystem sys(m, NoiseModel{kind, 0.3}, 5);
        bool changed = false;
        for (int k = 0; k < 200; ++k) {
            const Word in = w("abcabcab");
            const Trace t = sys.query(in, QueryPhase::equivalence);
            CHECK(t.input.size() == in.size());
            CHECK(t.output.size() == in.size());
            if (kind == NoiseKind::input) {
                CHECK(t.output == m.run(t.input));
                changed |= t.input != in;
            } else {
                CHECK(t.input == in);
            }
        }
        if (kind == NoiseKind::input) CHECK(changed);
    }
}

TEST_CASE("output flip rate matches the inclusive uniform draw") {
    MealyMachine m(1, 1, 4);
    m.set_transition(0, 0, 0, 2);
    SimulatedSystem sys(m, NoiseModel{NoiseKind::output, 0.1}, 2024);
    int flips = 0;
    for (int k = 0; k < 10000; ++k) flips += sys.query(Word{0}, QueryPhase::membership).output[0] != 2;
    CHECK(std::abs(flips / 10000.0 - 0.075) <= 0.01);
}

TEST_CASE("meter arithmetic") {
    const MealyMachine m = random_machine(3, 2, 2, 1);
    SimulatedSystem sys(m, NoiseModel{NoiseKind::input, 0.2}, 9);
    sys.query(w("abab"), QueryPhase::membership);
    sys.query(w("ab"), QueryPhase::equivalence);
    sys.query({}, QueryPhase::equivalence);
    const TestMeter& t = sys.meter();
    CHECK(t.tests == 3);
    CHECK(t.symbols == 6);
    CHECK(t.mq_symbols == 4);
    CHECK(t.eq_symbols == 2);
    CHECK(t.symbols == t.mq_symbols + t.eq_symbols);
    CHECK(t.mq_tests == 1);
    CHECK(t.eq_tests == 2);
}

TEST_CASE("test limit raises budget exhaustion") {
    SimulatedSystem sys(testing::toggle(), NoiseModel{}, 1);
    sys.set_test_limit(2);
    sys.query(w("a"), QueryPhase::membership);
    sys.query(w("a"), QueryPhase::membership);
    CHECK_THROWS_AS(sys.query(w("a"), QueryPhase::membership), QueryBudgetExhausted);
    CHECK(sys.meter().tests == 2);
}

TEST_CASE("same seed, same traces") {
    const MealyMachine m = random_machine(5, 3, 3, 4);
    SimulatedSystem a(m, NoiseModel{NoiseKind::output, 0.2}, 77);
    SimulatedSystem b(m, NoiseModel{NoiseKind::output, 0.2}, 77);
    for (int k = 0; k < 100; ++k) {
        CHECK(a.query(w("abcab"), QueryPhase::membership) == b.query(w("abcab"), QueryPhase::membership));
    }
}

TEST_CASE("majority voting") {
    const RepeatPolicy p{5, 10, 0.8};

    SimulatedSystem clean(testing::toggle(), NoiseModel{}, 1);
    CHECK(majority_query(clean, p, w("aa"), QueryPhase::membership) == w("ab"));
    CHECK(clean.meter().tests == 5);

    testing::ScriptedSystem four_of_five(testing::toggle(), {w("a"), w("a"), w("a"), w("a"), w("b")});
    CHECK(majority_query(four_of_five, p, w("a"), QueryPhase::membership) == w("a"));
    CHECK(four_of_five.meter().tests == 5);

    testing::ScriptedSystem alternating(testing::toggle());
    for (int k = 0; k < 10; ++k) alternating.push(k % 2 ? w("a") : w("b"));
    CHECK(majority_query(alternating, p, w("a"), QueryPhase::membership) == w("a"));
    CHECK(alternating.meter().tests == 10);

}

TEST_CASE("trace voting counts whole traces") {
    testing::ScriptedSystem s(testing::toggle(), {w("b"), w("a"), w("a"), w("a"), w("a")});
    const Trace t = majority_trace(s, RepeatPolicy{5, 10, 0.8}, w("a"), QueryPhase::equivalence);
    CHECK(t == Trace{w("a"), w("a")});
    CHECK(s.meter().eq_tests == 5);
}

TEST_CASE("repeat policies") {
    CHECK(parse_repeat_policy("5:10").max_repeats == 10);
    CHECK(parse_repeat_policy("(10,20)").min_repeats == 10);
    CHECK(parse_repeat_policy("20:30").label() == "(20,30)");
    CHECK_THROWS(parse_repeat_policy("10:5"));
    CHECK_THROWS(parse_repeat_policy("0:1"));
    CHECK_THROWS(parse_repeat_policy("five"));
    CHECK_THROWS((RepeatPolicy{5, 10, 0.5}.validate()));
    CHECK_THROWS((NoiseModel{NoiseKind::output, 1.5}.validate()));
    CHECK(parse_noise_kind("input") == NoiseKind::input);
    CHECK_THROWS(parse_noise_kind("loud"));
}

TEST_CASE("derived seeds differ by label") {
    CHECK(derive_seed(1, "noise") != derive_seed(1, "sampler"));
    CHECK(derive_seed(1, "noise") != derive_seed(2, "noise"));
    CHECK(derive_seed(1, "noise") == derive_seed(1, "noise"));
}
