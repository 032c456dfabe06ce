#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ceal/mealy.hpp"

namespace ceal {

/// A Mealy machine together with the names it was read with.
struct MealyModel {
    MealyMachine machine;
    Alphabet inputs;
    Alphabet outputs;
    std::vector<std::string> state_names;
};

class DotParseError : public std::runtime_error {
public:
    DotParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Reads a Mealy machine from a Graphviz digraph whose edges carry
/// "input/output" labels.
///
/// The initial state is, in order of preference: the target of the single
/// unlabeled edge leaving a node named `__start*`; the node with attribute
/// `initial=true`; the first declared node. Alphabets are the sorted distinct
/// label halves.
MealyModel parse_dot(std::string_view text);

MealyModel load_dot(const std::filesystem::path& path);

std::string write_dot(const MealyMachine& m, const Alphabet& inputs, const Alphabet& outputs,
                      std::span<const std::string> state_names = {});

inline std::string write_dot(const MealyModel& model) {
    return write_dot(model.machine, model.inputs, model.outputs, model.state_names);
}

}  // namespace ceal
