#include "momentlock/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "momentlock/density.hpp"
#include "momentlock/diagnostics.hpp"
#include "momentlock/portfolio.hpp"

namespace momentlock {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string f4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

unsigned thread_cap() {
    if (const char* env = std::getenv("MOMENTLOCK_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Static interleaved partition; cells write only their own slot, assembly
// stays in index order.
void parallel_cells(std::size_t count, const std::function<void(std::size_t)>& work) {
    const unsigned threads =
        std::min<std::size_t>(thread_cap(), count ? count : 1);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) work(i);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < count; i += threads) work(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file " + path);
    out << body;
}

std::string default_output(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::discretize: return "discretize.json";
        case ExperimentKind::convergence: return "convergence.csv";
        case ExperimentKind::chebyshev: return "chebyshev.csv";
        case ExperimentKind::portfolio: return "portfolio.csv";
        case ExperimentKind::pinsker_check: return "pinsker.csv";
    }
    return "out.dat";
}

// ---------------------------------------------------------------------------

void run_discretize(const ExperimentConfig& cfg, const std::string& out_path) {
    if (cfg.m_values.size() != 1 || cfg.orders.size() != 1)
        throw ConfigError("discretize takes a single --M and a single --L");
    const Density d = parse_density(cfg.density);
    const DiscreteSet set = uniform_grid(d.support_lo(), d.support_hi(), cfg.m_values[0]);
    const QuadratureRule rule = cfg.rule == RuleKind::simpson ? simpson_weights(set)
                                                              : trapezoid_weights(set);
    const InitialDiscretization q = initial_discretization(d, set, rule);
    const MomentDefiningFunction t = MomentDefiningFunction::polynomial(cfg.orders[0]);
    const MomentTargets targets = targets_from_density(d, t);
    const MaxEntSolution sol = solve_dual(q, t, targets, cfg.solver);

    nlohmann::ordered_json j;
    j["points"] = set.coords();
    j["q"] = std::vector<double>(q.probs().begin(), q.probs().end());
    j["p"] = sol.probs;
    j["lambda"] = sol.dual.lambda;
    j["kl"] = sol.kl;
    j["residual"] = sol.moment_residual;
    j["iterations"] = sol.dual.iterations;
    write_file(out_path, j.dump(2) + "\n");
}

void run_convergence(const ExperimentConfig& cfg, const std::string& out_path) {
    if (cfg.test_functions.size() != 1)
        throw ConfigError("convergence takes a single --g");
    const Density d = parse_density(cfg.density);
    const auto g = test_function(cfg.test_functions[0]);

    std::vector<ConvergenceStudy> studies(cfg.orders.size());
    parallel_cells(cfg.orders.size(), [&](std::size_t i) {
        studies[i] = convergence_study(d, g, cfg.rule, cfg.orders[i], cfg.m_values,
                                       cfg.solver);
    });

    std::ostringstream csv;
    csv << "L,M,I_M,e_q,e_p,kl,pinsker_bound,moment_residual\n";
    for (std::size_t i = 0; i < cfg.orders.size(); ++i) {
        for (const ConvergenceRow& row : studies[i].rows) {
            csv << cfg.orders[i] << ',' << row.m << ',' << row.points << ','
                << g17(row.e_q) << ',' << g17(row.e_p) << ',' << g17(row.kl) << ','
                << g17(row.pinsker_bound) << ',' << g17(row.moment_residual) << '\n';
        }
    }
    for (std::size_t i = 0; i < cfg.orders.size(); ++i)
        csv << "# slope,L=" << cfg.orders[i] << ",slope_q=" << g17(studies[i].slope_q)
            << ",slope_p=" << g17(studies[i].slope_p) << '\n';
    write_file(out_path, csv.str());
}

void run_chebyshev(const ExperimentConfig& cfg, const std::string& out_path) {
    struct Cell {
        std::string name;
        int degree;
        double residual;
    };
    std::vector<Cell> cells;
    for (const std::string& name : cfg.test_functions)
        for (int degree : cfg.orders) cells.push_back({name, degree, 0.0});

    parallel_cells(cells.size(), [&](std::size_t i) {
        const auto g = test_function(cells[i].name);
        cells[i].residual =
            chebyshev_fit(g, cfg.interval_lo, cfg.interval_hi, cells[i].degree)
                .sup_residual;
    });

    std::ostringstream csv;
    csv << "g,degree,sup_residual,log10_sup_residual\n";
    for (const Cell& c : cells)
        csv << c.name << ',' << c.degree << ',' << g17(c.residual) << ','
            << g17(std::log10(c.residual)) << '\n';
    write_file(out_path, csv.str());
}

void run_portfolio(const ExperimentConfig& cfg, const std::string& out_path) {
    struct Cell {
        int m, order;
        double theta = 0.0;
        bool failed = false;
    };
    std::vector<Cell> cells;
    for (int m : cfg.m_values)
        for (int order : cfg.orders) cells.push_back({m, order});

    parallel_cells(cells.size(), [&](std::size_t i) {
        PortfolioProblem p;
        p.gamma = cfg.gamma;
        p.mu = cfg.mu;
        p.sigma = cfg.sigma;
        p.r = cfg.r;
        p.m = cells[i].m;
        p.order = cells[i].order;
        p.rule = cfg.rule;
        p.solver = cfg.solver;
        try {
            cells[i].theta = solve_portfolio(p).theta;
        } catch (const TooFewPoints&) {
            cells[i].failed = true;
        } catch (const DivergedInfeasible&) {
            cells[i].failed = true;
        }
    });

    double reference = cfg.reference_theta;
    if (reference == 0.0) {
        // Table 2 convention: deepest successful cell is the converged value.
        for (const Cell& c : cells)
            if (!c.failed) reference = std::round(c.theta * 1e4) / 1e4;
    }

    std::ostringstream csv;
    csv << "M,I_M,L,theta,rel_error_percent\n";
    for (const Cell& c : cells) {
        csv << c.m << ',' << 2 * c.m + 1 << ',' << c.order << ',';
        if (c.failed) {
            csv << "-,-\n";
        } else {
            const double rounded = std::round(c.theta * 1e4) / 1e4;
            csv << f4(c.theta) << ',' << g17((rounded - reference) / reference * 100.0)
                << '\n';
        }
    }
    write_file(out_path, csv.str());
}

void run_pinsker_check(const ExperimentConfig& cfg, const std::string& out_path) {
    if (cfg.pinsker_pairs < 1) throw ConfigError("pinsker-check needs --n >= 1");
    std::mt19937_64 rng(cfg.seed);
    const auto uniform01 = [&rng] {
        return static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };

    std::ostringstream csv;
    csv << "i,l1,kl,pinsker_bound,slack\n";
    double min_slack = std::numeric_limits<double>::infinity();
    for (int i = 0; i < cfg.pinsker_pairs; ++i) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng() % 11);
        std::vector<double> p(n), q(n);
        for (auto* v : {&p, &q}) {
            double total = 0.0;
            for (double& x : *v) {
                x = -std::log1p(-uniform01());  // Exp(1) draws -> Dirichlet(1)
                total += x;
            }
            for (double& x : *v) x /= total;
        }
        double l1 = 0.0;
        for (std::size_t k = 0; k < n; ++k) l1 += std::abs(p[k] - q[k]);
        const double kl = kl_divergence(p, q);
        const double bound = std::sqrt(2.0 * kl);
        const double slack = bound - l1;
        min_slack = std::min(min_slack, slack);
        csv << i << ',' << g17(l1) << ',' << g17(kl) << ',' << g17(bound) << ','
            << g17(slack) << '\n';
    }
    csv << "# min_slack=" << g17(min_slack) << '\n';
    write_file(out_path, csv.str());
    if (min_slack < 0.0)
        throw DomainViolation("Pinsker inequality violated; see " + out_path);
}

}  // namespace

std::function<double(double)> test_function(const std::string& name) {
    if (name == "exp_x") return [](double x) { return std::exp(x); };
    if (name == "x_9_2") return [](double x) { return std::pow(x, 4.5); };
    if (name == "inv_1px") return [](double x) { return 1.0 / (1.0 + x); };
    if (name == "sin_pi_x") return [](double x) { return std::sin(std::numbers::pi * x); };
    if (name == "log_1px") return [](double x) { return std::log1p(x); };
    throw ConfigError("unknown test function '" + name + "'");
}

Density parse_density(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    std::vector<double> params;
    if (colon != std::string::npos) {
        std::stringstream ss(spec.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                params.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw ConfigError("bad density parameter '" + item + "'");
            }
        }
    }
    if (head == "uniform") {
        if (params.empty()) return Density::uniform(0.0, 1.0);
        if (params.size() == 2) return Density::uniform(params[0], params[1]);
        throw ConfigError("uniform takes 0 or 2 parameters");
    }
    if (head == "beta") {
        if (params.size() != 2) throw ConfigError("beta takes 2 parameters, e.g. beta:1,3");
        return Density::beta(params[0], params[1]);
    }
    if (head == "std_normal") {
        if (!params.empty()) throw ConfigError("std_normal takes no parameters");
        return Density::std_normal();
    }
    throw ConfigError("unknown density '" + spec + "'");
}

RuleKind parse_rule(const std::string& name) {
    if (name == "trapezoid") return RuleKind::trapezoid;
    if (name == "simpson") return RuleKind::simpson;
    throw ConfigError("unknown rule '" + name + "' (trapezoid|simpson)");
}

int exit_code_for(const Error& e) {
    const std::string& k = e.kind();
    if (k == "ConfigError" || k == "InvalidParams" || k == "Unsupported" ||
        k == "NonUniformGrid" || k == "EvenPointCount" || k == "NegativeWeight")
        return 2;
    if (k == "TooFewPoints" || k == "DivergedInfeasible" ||
        k == "DegenerateDiscretization")
        return 3;
    if (k == "NoConvergence") return 5;
    return 4;
}

int run(const ExperimentConfig& config) {
    const std::string out_path =
        config.output_path.empty() ? default_output(config.kind) : config.output_path;
    try {
        switch (config.kind) {
            case ExperimentKind::discretize: run_discretize(config, out_path); break;
            case ExperimentKind::convergence: run_convergence(config, out_path); break;
            case ExperimentKind::chebyshev: run_chebyshev(config, out_path); break;
            case ExperimentKind::portfolio: run_portfolio(config, out_path); break;
            case ExperimentKind::pinsker_check: run_pinsker_check(config, out_path); break;
        }
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return exit_code_for(e);
    }
    std::cout << "wrote " << out_path << '\n';
    return 0;
}

}  // namespace momentlock
