#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ceal/mealy.hpp"

namespace ceal {

/// Independent stream seed for a named consumer (noise, sampler, ...).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

enum class NoiseKind { none, input, output };

std::string to_string(NoiseKind k);
NoiseKind parse_noise_kind(std::string_view text);

/// Per-symbol uniform replacement noise. A replaced symbol is drawn from the
/// whole alphabet, so it may coincide with the original one.
struct NoiseModel {
    NoiseKind kind = NoiseKind::none;
    double rate = 0.0;

    void validate() const;
};

enum class QueryPhase { membership, equivalence };

/// Unit-interaction accounting. symbols == mq_symbols + eq_symbols.
struct TestMeter {
    std::uint64_t tests = 0;
    std::uint64_t symbols = 0;
    std::uint64_t mq_symbols = 0;
    std::uint64_t eq_symbols = 0;
    std::uint64_t mq_tests = 0;
    std::uint64_t eq_tests = 0;

    bool operator==(const TestMeter&) const = default;
};

/// Raised when a system call would exceed the configured test limit.
class QueryBudgetExhausted : public std::runtime_error {
public:
    QueryBudgetExhausted() : std::runtime_error("system test budget exhausted") {}
};

/// The system under learning as seen by whoever tests it: a word goes in, the
/// (possibly perturbed) input actually executed and its output come back.
class System {
public:
    virtual ~System() = default;

    /// Executes one test, charging it to the meter.
    Trace query(const Word& w, QueryPhase phase);

    const TestMeter& meter() const noexcept { return meter_; }
    void set_test_limit(std::optional<std::uint64_t> limit) { limit_ = limit; }

    virtual std::size_t num_inputs() const = 0;
    virtual std::size_t num_outputs() const = 0;

protected:
    virtual Trace execute(const Word& w) = 0;

private:
    TestMeter meter_;
    std::optional<std::uint64_t> limit_;
};

/// A target Mealy machine behind a noisy channel.
class SimulatedSystem final : public System {
public:
    SimulatedSystem(MealyMachine target, NoiseModel noise, std::uint64_t seed);

    std::size_t num_inputs() const override { return target_.num_inputs(); }
    std::size_t num_outputs() const override { return target_.num_outputs(); }
    const MealyMachine& target() const noexcept { return target_; }

protected:
    Trace execute(const Word& w) override;

private:
    MealyMachine target_;
    NoiseModel noise_;
    std::mt19937_64 rng_;
};

/// Majority-voting parameters of the MAT baseline.
struct RepeatPolicy {
    std::uint32_t min_repeats = 5;
    std::uint32_t max_repeats = 10;
    double threshold = 0.8;

    void validate() const;
    std::string label() const;  // "(5,10)"
};

RepeatPolicy parse_repeat_policy(std::string_view text);

/// Repeats w at least min_repeats times; returns the first output word holding
/// at least `threshold` of the votes so far, or the plurality word (ties to the
/// lexicographically least) once max_repeats is reached.
Word majority_query(System& system, const RepeatPolicy& policy, const Word& w, QueryPhase phase);

/// Same policy, voting on whole traces (executed input and output).
Trace majority_trace(System& system, const RepeatPolicy& policy, const Word& w, QueryPhase phase);

}  // namespace ceal
