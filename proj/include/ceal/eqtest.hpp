#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ceal/mealy.hpp"

namespace ceal {

enum class SamplerMethod { random_walk, randomized_wp };

std::string to_string(SamplerMethod m);
SamplerMethod parse_sampler_method(std::string_view text);

struct SamplerConfig {
    SamplerMethod method = SamplerMethod::randomized_wp;
    double mean_infix = 4.0;  // geometric, support {0, 1, ...}
    std::size_t max_len = 64;

    void validate() const;
};

/// Shortest access word of every state (breadth-first, ties by input order),
/// indexed by state id.
std::vector<Word> access_sequences(const MealyMachine& h);

/// Input words that separate every pair of distinct states of h. Built from a
/// splitting tree: each split contributes one separating word.
std::vector<Word> characterization_set(const MealyMachine& h);

/// Test-word distribution prepared for one hypothesis.
class WordSampler {
public:
    WordSampler(const MealyMachine& h, SamplerConfig cfg);

    Word sample(std::mt19937_64& rng) const;

    const std::vector<Word>& access() const noexcept { return access_; }
    const std::vector<Word>& separators() const noexcept { return separators_; }

private:
    Word random_infix(std::mt19937_64& rng) const;

    SamplerConfig cfg_;
    std::size_t num_inputs_;
    std::vector<Word> access_;
    std::vector<Word> separators_;
};

Word sample_word(const MealyMachine& h, const SamplerConfig& cfg, std::mt19937_64& rng);

/// Source of equivalence-test words, re-targeted whenever the hypothesis changes.
class TestGenerator {
public:
    virtual ~TestGenerator() = default;
    virtual void prepare(const MealyMachine& hypothesis) = 0;
    virtual Word next() = 0;
};

class RandomTestGenerator final : public TestGenerator {
public:
    RandomTestGenerator(SamplerConfig cfg, std::uint64_t seed);

    void prepare(const MealyMachine& hypothesis) override;
    Word next() override;

private:
    SamplerConfig cfg_;
    std::mt19937_64 rng_;
    std::optional<WordSampler> sampler_;
};

}  // namespace ceal
