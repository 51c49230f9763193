#pragma once

#include "spec.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace satdesign::cli {

struct Flags {
    bool pretty = false;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> kappa;
};

struct Outcome {
    json report;
    std::string text;   // human rendering for --pretty
    int exit_code = 0;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitFailed = 2;

Outcome run_classify(const ProblemSpec& spec, const Flags& flags);
Outcome run_solve(const ProblemSpec& spec, const Flags& flags);
Outcome run_verify(const ProblemSpec& spec, const Flags& flags);
Outcome run_oracle(const ProblemSpec& spec, const Flags& flags);
Outcome run_epsilon_c(const ProblemSpec& spec, const Flags& flags);
/// Without a model in `spec`, times the two standard grid-comparison settings.
Outcome run_bench(const std::optional<ProblemSpec>& spec, const Flags& flags);
Outcome run_reproduce_table(int id, const Flags& flags);

/// Dispatches on `mode`; `spec.mode`, when present, must agree with it.
Outcome run(Mode mode, const std::optional<ProblemSpec>& spec, std::optional<int> table, const Flags& flags);

/// Report and exit code for an exception escaping a command.
Outcome error_outcome(const std::exception& e);

} // namespace satdesign::cli
