#include <doctest.h>

#include <deque>

#include "ceal/reviser.hpp"
#include "stubs.hpp"
#include "support.hpp"

using namespace ceal;
using ceal::testing::tr;
using ceal::testing::w;

namespace {

/// Hands out a fixed cycle of words.
class FixedGenerator final : public TestGenerator {
public:
    explicit FixedGenerator(std::vector<Word> words) : words_(std::move(words)) {}
    void prepare(const MealyMachine&) override { ++prepared; }
    Word next() override { return words_[next_++ % words_.size()]; }
    int prepared = 0;

private:
    std::vector<Word> words_;
    std::size_t next_ = 0;
};

std::unique_ptr<TestGenerator> fixed(std::vector<Word> words) {
    return std::make_unique<FixedGenerator>(std::move(words));
}

struct Recorder final : ReviserObserver {
    void on_system_trace(const Trace& t) override { executed.push_back(t.input); }
    std::vector<Word> executed;
};

/// Two inputs, outputs x/y: b flips the state, a reports it.
MealyMachine flipper() {
    MealyMachine m(2, 2, 2);
    m.set_transition(0, 0, 0, 0);
    m.set_transition(0, 1, 1, 0);
    m.set_transition(1, 0, 1, 1);
    m.set_transition(1, 1, 0, 1);
    return m;
}

}  // namespace

TEST_CASE("apply integrates traces and reports conflicts") {
    SimulatedSystem sys(flipper(), NoiseModel{}, 1);
    Reviser r(ReviserConfig{}, sys, fixed({w("a")}));
    CHECK(r.apply(tr("ab", "ab")) == QueryAnswer{w("ab")});
    CHECK(r.apply(tr("a", "a")) == QueryAnswer{w("a")});
    CHECK(is_prune(r.apply(tr("ab", "aa"))));
    CHECK(r.tree().lookup(w("ab")) == w("aa"));
    CHECK(sys.meter().tests == 0);
}

TEST_CASE("reads hit the system only on a miss") {
    SimulatedSystem sys(flipper(), NoiseModel{}, 1);
    Reviser r(ReviserConfig{}, sys, fixed({w("a")}));
    CHECK(r.read(w("bab")) == QueryAnswer{flipper().run(w("bab"))});
    CHECK(sys.meter().tests == 1);
    CHECK(r.read(w("ba")) == QueryAnswer{flipper().run(w("ba"))});
    CHECK(r.read(w("")) == QueryAnswer{w("")});
    CHECK(sys.meter().tests == 1);
    CHECK(sys.meter().mq_tests == 1);
}

TEST_CASE("reads retry when the system executes another word") {
    struct Swapping final : System {
        std::size_t num_inputs() const override { return 2; }
        std::size_t num_outputs() const override { return 2; }
        Trace execute(const Word& in) override {
            Word run = in;
            if (calls++ == 0) run[0] = 1 - run[0];
            return Trace{run, flipper().run(run)};
        }
        int calls = 0;
    } sys;
    Reviser r(ReviserConfig{}, sys, fixed({w("a")}));
    CHECK(r.read(w("ab")) == QueryAnswer{flipper().run(w("ab"))});
    CHECK(sys.meter().tests == 2);
    CHECK(r.tree().lookup(w("bb")).has_value());
}

TEST_CASE("check compares hypotheses with stored traces only") {
    SimulatedSystem sys(testing::toggle(), NoiseModel{}, 1);
    Reviser r(ReviserConfig{}, sys, fixed({w("a")}));
    CHECK_FALSE(r.check(testing::constant_x()));
    r.read(w("aa"));
    const auto bad = r.check(testing::constant_x());
    REQUIRE(bad);
    CHECK(testing::constant_x().run(bad->input) != bad->output);
    CHECK(r.tree().lookup(bad->input) == bad->output);
    CHECK_FALSE(r.check(testing::toggle()));
    CHECK(sys.meter().tests == 1);
}

TEST_CASE("a correct hypothesis survives exactly the budget") {
    SimulatedSystem sys(testing::toggle(), NoiseModel{}, 1);
    Reviser r(ReviserConfig{}, sys, std::make_unique<RandomTestGenerator>(SamplerConfig{}, 3));
    const TestOutcome out = r.test(testing::toggle(), 50);
    CHECK(std::holds_alternative<NoCounterexample>(out.verdict));
    CHECK(out.tests == 50);
    CHECK(sys.meter().eq_tests == 50);
}

TEST_CASE("a wrong hypothesis yields the stored trace as counterexample") {
    SimulatedSystem sys(testing::toggle(), NoiseModel{}, 1);
    Reviser r(ReviserConfig{}, sys, fixed({w("a"), w("aa")}));
    const TestOutcome out = r.test(testing::constant_x(), 50);
    REQUIRE(std::holds_alternative<Trace>(out.verdict));
    CHECK(std::get<Trace>(out.verdict) == tr("aa", "ab"));
    CHECK(out.tests == 2);
    CHECK_THROWS_AS(r.test(testing::constant_x(), 5), std::logic_error);
}

TEST_CASE("a conflicting test response is a prune") {
    testing::ScriptedSystem sys(testing::toggle());
    Reviser r(ReviserConfig{}, sys, fixed({w("aa")}));
    r.read(w("aa"));
    sys.push(w("aa"));
    const TestOutcome out = r.test(testing::toggle(), 10);
    CHECK(std::holds_alternative<Prune>(out.verdict));
    CHECK(out.tests == 1);
    CHECK(r.tree().lookup(w("aa")) == w("aa"));
}

TEST_CASE("most frequent trees absorb a single deviating response") {
    testing::ScriptedSystem sys(testing::toggle());
    Reviser r(ReviserConfig{UpdateStrategy::most_frequent}, sys, fixed({w("aa")}));
    r.read(w("aa"));
    r.read(w("aaa"));
    sys.push(w("aa"));
    const TestOutcome out = r.test(testing::toggle(), 3);
    CHECK(std::holds_alternative<NoCounterexample>(out.verdict));
    CHECK(r.tree().lookup(w("aa")) == w("ab"));
}

TEST_CASE("an outvoted test response is not judged") {
    testing::ScriptedSystem sys(flipper());
    Reviser r(ReviserConfig{UpdateStrategy::most_frequent}, sys, fixed({w("ab")}));
    r.apply(tr("a", "a"));
    r.apply(tr("a", "a"));
    sys.push(w("bb"));
    const TestOutcome out = r.test(flipper(), 1);
    CHECK(std::holds_alternative<NoCounterexample>(out.verdict));
    CHECK_FALSE(r.tree().lookup(w("ab")));
}

TEST_CASE("eq logs only hypotheses consistent with the tree") {
    SimulatedSystem sys(testing::toggle(), NoiseModel{}, 1);
    Reviser r(ReviserConfig{}, sys, fixed({w("aa")}));
    HypothesisLog log;
    r.read(w("aa"));
    const TestOutcome rejected = r.eq(testing::constant_x(), log, 10);
    CHECK(std::holds_alternative<Trace>(rejected.verdict));
    CHECK(rejected.tests == 0);
    CHECK(log.empty());
    const TestOutcome accepted = r.eq(testing::toggle(), log, 10);
    CHECK(std::holds_alternative<NoCounterexample>(accepted.verdict));
    CHECK(log.size() == 1);
}

TEST_CASE("the generator is prepared once per distinct hypothesis") {
    SimulatedSystem sys(testing::toggle(), NoiseModel{}, 1);
    auto gen = std::make_unique<FixedGenerator>(std::vector<Word>{w("a")});
    FixedGenerator* g = gen.get();
    Reviser r(ReviserConfig{}, sys, std::move(gen));
    r.test(testing::toggle(), 2);
    r.test(testing::toggle(), 2);
    CHECK(g->prepared == 1);
}

TEST_CASE("revision revisits stored words oldest first") {
    SimulatedSystem sys(flipper(), NoiseModel{}, 1);
    Reviser r(ReviserConfig{UpdateStrategy::most_recent, 1.0}, sys, fixed({w("bb")}));
    Recorder rec;
    r.read(w("ab"));
    r.read(w("ba"));
    r.set_observer(&rec);
    r.test(flipper(), 3);
    CHECK(rec.executed == std::vector<Word>{w("ab"), w("ba"), w("bb")});
}

TEST_CASE("random testing finds a mutated output") {
    const MealyMachine target = minimize(random_machine(4, 2, 2, 17));
    REQUIRE(target.num_states() == 4);
    MealyMachine h = target;
    h.set_transition(3, 1, target.next(3, 1), 1 - target.output(3, 1));
    int found = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        SimulatedSystem sys(target, NoiseModel{}, seed);
        Reviser r(ReviserConfig{}, sys, std::make_unique<RandomTestGenerator>(SamplerConfig{}, seed));
        found += std::holds_alternative<Trace>(r.test(h, 200).verdict);
    }
    CHECK(found >= 99);
}

TEST_CASE("final selection") {
    const MealyMachine h1 = testing::toggle(), h2 = testing::constant_x();
    HypothesisLog log;
    CHECK_THROWS_AS(select_final(log, SelectionStrategy::most_frequent), std::logic_error);
    CHECK_THROWS_AS(select_final(log, SelectionStrategy::most_recent), std::logic_error);
    log.record(h1);
    log.record(h2);
    CHECK(equivalent(select_final(log, SelectionStrategy::most_frequent), h2));
    log.record(h1);
    log.record(h1);
    log.record(h2);
    CHECK(equivalent(select_final(log, SelectionStrategy::most_frequent), h1));
    CHECK(equivalent(select_final(log, SelectionStrategy::most_recent), h2));
    CHECK(log.size() == 5);
    CHECK(log.distinct() == 2);
    CHECK(log.count(canonical_fingerprint(h1)) == 3);
}

TEST_CASE("teacher turns prunes into signals") {
    testing::ScriptedSystem sys(testing::toggle());
    Reviser r(ReviserConfig{}, sys, fixed({w("a")}));
    ReviserTeacher teacher(r);
    CHECK(teacher.query(w("aa")) == w("ab"));
    r.apply(tr("aa", "aa"));
    CHECK(teacher.query(w("aa")) == w("aa"));
    sys.push(w("bbb"));
    CHECK_THROWS_AS(teacher.query(w("aaa")), PruneSignal);
}

TEST_CASE("selection names") {
    CHECK(parse_selection_strategy("most_recent") == SelectionStrategy::most_recent);
    CHECK(to_string(SelectionStrategy::most_frequent) == "most_frequent");
    CHECK_THROWS(parse_selection_strategy("best"));
    CHECK_THROWS((ReviserConfig{UpdateStrategy::most_recent, 1.5}.validate()));
}
