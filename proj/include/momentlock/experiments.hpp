#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "momentlock/grid.hpp"
#include "momentlock/maxent.hpp"

namespace momentlock {

enum class ExperimentKind { discretize, convergence, chebyshev, portfolio, pinsker_check };

/// One CLI invocation. Flag names mirror the symbols the experiments sweep
/// (--M, --L, --kappa); unset fields keep these defaults.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::discretize;
    std::string density = "uniform";        // uniform[:c,d] | beta:a,b | std_normal
    RuleKind rule = RuleKind::trapezoid;
    std::vector<int> orders = {2};          // L values
    std::vector<int> m_values = {4};        // M values
    std::vector<std::string> test_functions = {"exp_x"};
    double interval_lo = 0.0;               // chebyshev fit interval
    double interval_hi = 1.0;
    std::string output_path;                // empty: per-subcommand default name
    SolverConfig solver;

    // portfolio parameters
    double gamma = 3.0;
    double mu = 0.07;
    double sigma = 0.2;
    double r = 0.01;
    double reference_theta = 0.0;           // 0: take the deepest sweep cell

    // pinsker-check parameters
    int pinsker_pairs = 1000;
    std::uint64_t seed = 1;
};

/// Runs the experiment, writes its output file, and returns the process exit
/// status: 0 success, 2 config error, 3 infeasible moments, 4 solver failure,
/// 5 oracle failure. Typed error names go to stderr.
int run(const ExperimentConfig& config);

/// Built-in test integrands of the error studies: exp_x, x_9_2, inv_1px,
/// sin_pi_x, log_1px. Throws ConfigError for unknown names.
std::function<double(double)> test_function(const std::string& name);

/// Parses density specs of the form "uniform", "uniform:c,d", "beta:a,b",
/// "std_normal". Throws ConfigError on anything else.
Density parse_density(const std::string& spec);

RuleKind parse_rule(const std::string& name);

/// Exit code for a library error, per the CLI contract above.
int exit_code_for(const Error& e);

}  // namespace momentlock
