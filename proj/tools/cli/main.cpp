#include "commands.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>

using namespace satdesign::cli;

namespace {

void configure_logging() {
    auto logger = spdlog::stderr_color_mt("satdesign");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("SATDESIGN_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

int emit(const Outcome& outcome, const std::optional<std::string>& out, bool pretty) {
    const std::string text = outcome.report.dump(2) + "\n";
    if (out) {
        std::ofstream file(*out);
        if (!file) {
            std::cerr << "error: cannot write '" << *out << "'\n";
            return kExitInput;
        }
        file << text;
    }
    if (pretty) {
        (outcome.exit_code == kExitOk || outcome.report.value("kind", "") != "error" ? std::cout : std::cerr) << outcome.text;
    } else if (!out) {
        std::cout << text;
    }
    if (outcome.report.value("kind", "") == "error" && !pretty) std::cerr << outcome.text;
    return outcome.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    configure_logging();

    CLI::App app{"Saturated locally optimal designs: solve, verify and cross-check"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::string> spec_path;
    std::optional<std::string> out;
    bool pretty = false;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> kappa;
    app.add_option("--spec", spec_path, "problem spec file")->check(CLI::ExistingFile);
    app.add_option("--out", out, "write the JSON report to this file");
    app.add_flag("--pretty", pretty, "print an aligned text table");
    app.add_option("--seed", seed, "multistart seed");
    app.add_option("--kappa", kappa, "grid size for oracle and bench")->check(CLI::PositiveNumber);

    Mode mode = Mode::solve;
    std::optional<int> table;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"classify", "complete class and Chebyshev check"},
        {"solve", "Newton solve over the complete class"},
        {"verify", "equivalence-theorem certificate for a given design"},
        {"oracle", "closed form, weight exchange or moment-matching reduction"},
        {"epsilon-c", "c-optimal limit through the epsilon sequence"},
        {"bench", "Newton against weight exchange on grids"},
        {"reproduce-table", "recompute a reference set and compare"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->callback([&mode, name = name] { mode = *mode_from_string(name); });
        if (name == "reproduce-table") sub->add_option("id", table, "reference set 1..6")->check(CLI::Range(1, 6));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    Outcome outcome;
    try {
        std::optional<ProblemSpec> spec;
        if (spec_path) spec = load_spec(*spec_path);
        Flags flags{pretty, seed, kappa};
        outcome = run(mode, spec, table, flags);
    } catch (const std::exception& e) {
        outcome = error_outcome(e);
    }
    return emit(outcome, out, pretty);
}
