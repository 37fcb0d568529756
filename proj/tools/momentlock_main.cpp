#include <CLI11.hpp>
#include <string>
#include <vector>

#include "momentlock/experiments.hpp"

namespace {

using momentlock::ExperimentConfig;
using momentlock::ExperimentKind;

// "1,4,9", "1..12", or a single integer.
std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const int lo = std::stoi(text.substr(0, dots));
        const int hi = std::stoi(text.substr(dots + 2));
        if (hi < lo) throw momentlock::ConfigError("empty range '" + text + "'");
        for (int v = lo; v <= hi; ++v) out.push_back(v);
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    if (out.empty()) throw momentlock::ConfigError("empty list '" + text + "'");
    return out;
}

std::vector<std::string> parse_name_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

void add_solver_flags(CLI::App* cmd, ExperimentConfig& cfg) {
    cmd->add_option("--kappa", cfg.solver.kappa, "Newton regularizer");
    cmd->add_option("--stop-tol", cfg.solver.stop_tol, "step-norm stop tolerance");
    cmd->add_option("--max-iters", cfg.solver.max_iters, "Newton iteration cap");
    cmd->add_flag("--no-scaling", [&cfg](std::int64_t) { cfg.solver.scaling = false; },
                  "disable internal moment whitening");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"maximum-entropy discretization of continuous distributions"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string m_spec = "4";
    std::string l_spec = "2";
    std::string g_spec = "exp_x";
    std::string rule_name = "trapezoid";
    std::string interval_spec = "0,1";

    auto* discretize =
        app.add_subcommand("discretize", "solve one grid and emit JSON");
    discretize->add_option("--density", cfg.density, "uniform[:c,d] | beta:a,b | std_normal");
    discretize->add_option("--rule", rule_name, "trapezoid | simpson");
    discretize->add_option("--M", m_spec, "grid index M (I_M = 2M+1)");
    discretize->add_option("--L", l_spec, "matched polynomial moment order");
    discretize->add_option("--out", cfg.output_path, "output path");
    add_solver_flags(discretize, cfg);

    auto* convergence =
        app.add_subcommand("convergence", "error-vs-M sweep, CSV plus fitted slopes");
    convergence->add_option("--density", cfg.density);
    convergence->add_option("--rule", rule_name);
    convergence->add_option("--g", g_spec, "test function name");
    convergence->add_option("--L", l_spec, "comma list of orders");
    convergence->add_option("--M", m_spec, "range a..b or comma list");
    convergence->add_option("--out", cfg.output_path);
    add_solver_flags(convergence, cfg);

    auto* chebyshev =
        app.add_subcommand("chebyshev", "Chebyshev interpolation sup-residuals");
    chebyshev->add_option("--g", g_spec, "comma list of test functions");
    chebyshev->add_option("--L", l_spec, "comma list of degrees");
    chebyshev->add_option("--interval", interval_spec, "c,d fit interval");
    chebyshev->add_option("--out", cfg.output_path);

    auto* portfolio =
        app.add_subcommand("portfolio", "CRRA optimal portfolio sweep (Table-2 CSV)");
    portfolio->add_option("--gamma", cfg.gamma, "relative risk aversion");
    portfolio->add_option("--mu", cfg.mu, "log-return mean");
    portfolio->add_option("--sigma", cfg.sigma, "volatility");
    portfolio->add_option("--r", cfg.r, "log risk-free rate");
    portfolio->add_option("--M", m_spec, "comma list of M");
    portfolio->add_option("--L", l_spec, "comma list of orders (0 = initial rule)");
    portfolio->add_option("--rule", rule_name);
    portfolio->add_option("--reference", cfg.reference_theta,
                          "reference theta for the error column");
    portfolio->add_option("--out", cfg.output_path);
    add_solver_flags(portfolio, cfg);

    auto* pinsker = app.add_subcommand("pinsker-check",
                                       "random-pair check of Pinsker's inequality");
    pinsker->add_option("--n", cfg.pinsker_pairs, "number of random pairs");
    pinsker->add_option("--seed", cfg.seed, "RNG seed");
    pinsker->add_option("--out", cfg.output_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // config errors exit 2; --help exits 0
    }

    try {
        if (discretize->parsed()) cfg.kind = ExperimentKind::discretize;
        if (convergence->parsed()) cfg.kind = ExperimentKind::convergence;
        if (chebyshev->parsed()) cfg.kind = ExperimentKind::chebyshev;
        if (portfolio->parsed()) cfg.kind = ExperimentKind::portfolio;
        if (pinsker->parsed()) cfg.kind = ExperimentKind::pinsker_check;
        cfg.rule = momentlock::parse_rule(rule_name);
        cfg.m_values = parse_int_list(m_spec);
        cfg.orders = parse_int_list(l_spec);
        cfg.test_functions = parse_name_list(g_spec);
        const auto interval = parse_name_list(interval_spec);
        if (interval.size() == 2) {
            cfg.interval_lo = std::stod(interval[0]);
            cfg.interval_hi = std::stod(interval[1]);
        } else if (chebyshev->parsed()) {
            throw momentlock::ConfigError("--interval needs the form c,d");
        }
    } catch (const momentlock::Error& e) {
        std::cerr << e.what() << '\n';
        return momentlock::exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "ConfigError: " << e.what() << '\n';
        return 2;
    }
    return momentlock::run(cfg);
}
