#pragma once

#include <deque>
#include <functional>
#include <random>

#include "ceal/sul.hpp"

namespace ceal::testing {

/// Answers with queued output words, falling back to the target machine.
class ScriptedSystem final : public System {
public:
    ScriptedSystem(MealyMachine target, std::deque<Word> script = {})
        : target_(std::move(target)), script_(std::move(script)) {}

    void push(Word out) { script_.push_back(std::move(out)); }

    std::size_t num_inputs() const override { return target_.num_inputs(); }
    std::size_t num_outputs() const override { return target_.num_outputs(); }

protected:
    Trace execute(const Word& w) override {
        if (script_.empty()) return Trace{w, target_.run(w)};
        Word out = std::move(script_.front());
        script_.pop_front();
        return Trace{w, std::move(out)};
    }

private:
    MealyMachine target_;
    std::deque<Word> script_;
};

/// Flips one output symbol of a response with the given probability.
class FlakySystem final : public System {
public:
    FlakySystem(MealyMachine target, double rate, std::uint64_t seed)
        : target_(std::move(target)), rate_(rate), rng_(seed) {}

    std::size_t num_inputs() const override { return target_.num_inputs(); }
    std::size_t num_outputs() const override { return target_.num_outputs(); }
    std::uint64_t executions() const noexcept { return executions_; }

protected:
    Trace execute(const Word& w) override {
        ++executions_;
        Word out = target_.run(w);
        if (!out.empty() && std::bernoulli_distribution(rate_)(rng_)) {
            std::uniform_int_distribution<std::size_t> pos(0, out.size() - 1);
            std::uniform_int_distribution<Symbol> shift(1, static_cast<Symbol>(target_.num_outputs() - 1));
            auto& b = out[pos(rng_)];
            b = static_cast<Symbol>((b + shift(rng_)) % target_.num_outputs());
        }
        return Trace{w, std::move(out)};
    }

private:
    MealyMachine target_;
    double rate_;
    std::mt19937_64 rng_;
    std::uint64_t executions_ = 0;
};

}  // namespace ceal::testing
