#pragma once

/**
 * @file
 * Command-line front end: argument/config-file parsing and command dispatch.
 *
 * Exit codes: 0 success, 1 input or I/O error, 2 infeasible configuration.
 */

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "io.hpp"
#include "sampling.hpp"
#include "solver.hpp"
#include "steering.hpp"
#include "table1.hpp"

namespace steerseq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitInfeasible = 2;

inline constexpr double kOracleTolerance = 1e-10;

enum class Command { bounds, eval, ranges, maxalices, minpurity, region2x2, check3x2, verify, table1 };
enum class Format { csv, json };

inline const std::vector<std::pair<std::string, Command>> &command_names() {
    static const std::vector<std::pair<std::string, Command>> names{
        {"bounds", Command::bounds},       {"eval", Command::eval},
        {"ranges", Command::ranges},       {"maxalices", Command::maxalices},
        {"minpurity", Command::minpurity}, {"region2x2", Command::region2x2},
        {"check3x2", Command::check3x2},   {"verify", Command::verify},
        {"table1", Command::table1}};
    return names;
}

struct RunConfig {
    Command command = Command::bounds;
    std::optional<int> n_settings;
    double mu = 1.0;
    std::vector<double> alice;
    std::vector<double> bob;
    int n_alices = 1;
    int n_bobs = 1;
    std::optional<double> grid_step;
    std::string output_path;
    std::optional<Format> format;
    bool all = false;
    bool verify = false;
    bool first_bob_only = false;
    int samples = 1000;
    std::uint64_t seed = 20211;
};

/// Bad user input; `field` names the flag or config key at fault.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string field, const std::string &message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    [[nodiscard]] const std::string &field() const { return field_; }

  private:
    std::string field_;
};

namespace detail {

inline Format parse_format(const std::string &text, const std::string &field) {
    if (text == "csv") {
        return Format::csv;
    }
    if (text == "json") {
        return Format::json;
    }
    throw ConfigError(field, "expected 'csv' or 'json', got '" + text + "'");
}

template <class T> T json_field(const json &j, const char *key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception &e) {
        throw ConfigError(key, std::string("invalid value in config file (") + e.what() + ")");
    }
}

/// Applies keys of a JSON config object on top of cfg.
inline void apply_config_file(RunConfig &cfg, const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("--config", "cannot open '" + path + "'");
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error &e) {
        throw ConfigError("--config", std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw ConfigError("--config", "top level must be a JSON object");
    }
    static const std::vector<std::string> known{"n",    "mu",        "alice",  "bob",
                                                "alices", "bobs",    "grid_step", "output",
                                                "format", "samples", "seed"};
    for (const auto &item : j.items()) {
        if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
            throw ConfigError(item.key(), "unknown config key");
        }
    }
    if (j.contains("n")) cfg.n_settings = json_field<int>(j, "n");
    if (j.contains("mu")) cfg.mu = json_field<double>(j, "mu");
    if (j.contains("alice")) cfg.alice = json_field<std::vector<double>>(j, "alice");
    if (j.contains("bob")) cfg.bob = json_field<std::vector<double>>(j, "bob");
    if (j.contains("alices")) cfg.n_alices = json_field<int>(j, "alices");
    if (j.contains("bobs")) cfg.n_bobs = json_field<int>(j, "bobs");
    if (j.contains("grid_step")) cfg.grid_step = json_field<double>(j, "grid_step");
    if (j.contains("output")) cfg.output_path = json_field<std::string>(j, "output");
    if (j.contains("format")) cfg.format = parse_format(json_field<std::string>(j, "format"), "format");
    if (j.contains("samples")) cfg.samples = json_field<int>(j, "samples");
    if (j.contains("seed")) cfg.seed = json_field<std::uint64_t>(j, "seed");
}

inline void require_n(const RunConfig &cfg) {
    if (!cfg.n_settings) {
        throw ConfigError("--n", "required for this command");
    }
    if (!is_supported_setting_count(*cfg.n_settings)) {
        throw ConfigError("--n", "unsupported number of settings " + std::to_string(*cfg.n_settings) +
                                     " (expected 2, 3, 4, 6, 10 or 16)");
    }
}

inline void require_sharpness_list(const std::vector<double> &values, const char *field) {
    if (values.empty()) {
        throw ConfigError(field, "at least one sharpness value is required");
    }
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!(values[k] >= 0.0 && values[k] <= 1.0)) {
            throw ConfigError(std::string(field) + "[" + std::to_string(k + 1) + "]",
                              "sharpness " + std::to_string(values[k]) + " outside [0, 1]");
        }
    }
}

} // namespace detail

/// Checks the fields the chosen command uses; throws ConfigError on the first bad one.
inline void validate(const RunConfig &cfg) {
    if (!(cfg.mu >= 0.0 && cfg.mu <= 1.0)) {
        throw ConfigError("--mu", "value " + std::to_string(cfg.mu) + " outside [0, 1]");
    }
    if (cfg.grid_step && !(*cfg.grid_step > 0.0 && *cfg.grid_step <= 0.5)) {
        throw ConfigError("--grid-step", "value " + std::to_string(*cfg.grid_step) +
                                             " outside (0, 0.5]");
    }
    switch (cfg.command) {
    case Command::eval:
        detail::require_n(cfg);
        detail::require_sharpness_list(cfg.alice, "--alice");
        detail::require_sharpness_list(cfg.bob, "--bob");
        break;
    case Command::ranges:
    case Command::minpurity:
        detail::require_n(cfg);
        if (cfg.n_alices < 1) {
            throw ConfigError("--alices", "must be >= 1");
        }
        if (cfg.command == Command::minpurity && (cfg.n_bobs < 1 || cfg.n_bobs > 2)) {
            throw ConfigError("--bobs", "must be 1 or 2");
        }
        break;
    case Command::maxalices:
        if (!cfg.all) {
            detail::require_n(cfg);
        } else if (cfg.n_settings) {
            detail::require_n(cfg);
        }
        break;
    case Command::region2x2:
    case Command::check3x2:
        detail::require_n(cfg);
        break;
    case Command::verify:
        if (cfg.samples < 1) {
            throw ConfigError("--samples", "must be >= 1");
        }
        break;
    case Command::bounds:
    case Command::table1:
        break;
    }
}

/**
 * Parses argv into a RunConfig. A --config JSON file is applied first and
 * explicit flags override it. Returns nullopt after printing help.
 */
inline std::optional<RunConfig> parse_command_line(int argc, const char *const *argv,
                                                   std::ostream &out = std::cout) {
    CLI::App app{"Sequential unsharp-measurement steering on two-qubit Werner states", "steerseq"};
    app.require_subcommand(1);

    struct Flags {
        int n = 0;
        double mu = 1.0;
        std::vector<double> alice;
        std::vector<double> bob;
        int alices = 1;
        int bobs = 1;
        double grid_step = 0.0;
        std::string output;
        std::string format;
        std::string config;
        int samples = 1000;
        std::uint64_t seed = 0;
        bool all = false;
        bool verify = false;
        bool first_bob_only = false;
    } flags;

    struct Registered {
        CLI::App *sub;
        Command command;
    };
    std::vector<Registered> subs;
    std::vector<CLI::Option *> opts;
    auto track = [&](CLI::Option *o) { opts.push_back(o); return o; };

    const std::vector<std::pair<Command, std::string>> help{
        {Command::bounds, "print the classical bounds C_N"},
        {Command::eval, "evaluate every (A_i, B_p) steering parameter of a scenario"},
        {Command::ranges, "sharpness ranges for m Alices and one Bob"},
        {Command::maxalices, "maximum number of Alices steering one Bob"},
        {Command::minpurity, "minimum initial Werner weight for a configuration"},
        {Command::region2x2, "scan the (lambda1, eta1) plane for 2 Alices and 2 Bobs"},
        {Command::check3x2, "grid check for 3 Alices sharing with 2 Bobs"},
        {Command::verify, "compare closed forms against the density-matrix oracle"},
        {Command::table1, "recompute the published sharpness table with deviations"}};

    for (const auto &[name, command] : command_names()) {
        std::string description;
        for (const auto &[c, text] : help) {
            if (c == command) description = text;
        }
        CLI::App *sub = app.add_subcommand(name, description);
        track(sub->add_option("--output,-o", flags.output, "output file path"));
        track(sub->add_option("--format", flags.format, "csv or json (default from extension)"));
        track(sub->add_option("--config", flags.config, "JSON config file; flags override it"));
        switch (command) {
        case Command::eval:
            track(sub->add_option("--n", flags.n, "number of settings"));
            track(sub->add_option("--mu", flags.mu, "initial Werner weight"));
            track(sub->add_option("--alice", flags.alice, "Alice sharpness list")->delimiter(','));
            track(sub->add_option("--bob", flags.bob, "Bob sharpness list")->delimiter(','));
            track(sub->add_flag("--verify", flags.verify, "recompute every value with the oracle"));
            break;
        case Command::ranges:
            track(sub->add_option("--n", flags.n, "number of settings"));
            track(sub->add_option("--mu", flags.mu, "initial Werner weight"));
            track(sub->add_option("--alices", flags.alices, "number of Alices"));
            break;
        case Command::maxalices:
            track(sub->add_option("--n", flags.n, "number of settings"));
            track(sub->add_option("--mu", flags.mu, "initial Werner weight"));
            track(sub->add_flag("--all", flags.all, "every supported setting count"));
            break;
        case Command::minpurity:
            track(sub->add_option("--n", flags.n, "number of settings"));
            track(sub->add_option("--alices", flags.alices, "number of Alices"));
            track(sub->add_option("--bobs", flags.bobs, "number of Bobs (1 or 2)"));
            break;
        case Command::region2x2:
        case Command::check3x2:
            track(sub->add_option("--n", flags.n, "number of settings"));
            track(sub->add_option("--mu", flags.mu, "initial Werner weight"));
            track(sub->add_option("--grid-step", flags.grid_step, "grid spacing"));
            if (command == Command::check3x2) {
                track(sub->add_flag("--first-bob-only", flags.first_bob_only,
                                    "monitor only the pairs with B_1"));
            }
            break;
        case Command::verify:
            track(sub->add_option("--samples", flags.samples, "random scenarios"));
            track(sub->add_option("--seed", flags.seed, "RNG seed"));
            break;
        case Command::bounds:
        case Command::table1:
            break;
        }
        subs.push_back({sub, command});
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return std::nullopt;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return std::nullopt;
    } catch (const CLI::ParseError &e) {
        throw ConfigError("arguments", e.what());
    }

    RunConfig cfg;
    CLI::App *active = nullptr;
    for (const auto &r : subs) {
        if (r.sub->parsed()) {
            cfg.command = r.command;
            active = r.sub;
        }
    }
    auto given = [&](const char *name) {
        const CLI::Option *o = active->get_option_no_throw(name);
        return o != nullptr && o->count() > 0;
    };
    if (given("--config")) {
        detail::apply_config_file(cfg, flags.config);
    }
    if (given("--n")) cfg.n_settings = flags.n;
    if (given("--mu")) cfg.mu = flags.mu;
    if (given("--alice")) cfg.alice = flags.alice;
    if (given("--bob")) cfg.bob = flags.bob;
    if (given("--alices")) cfg.n_alices = flags.alices;
    if (given("--bobs")) cfg.n_bobs = flags.bobs;
    if (given("--grid-step")) cfg.grid_step = flags.grid_step;
    if (given("--output")) cfg.output_path = flags.output;
    if (given("--format")) cfg.format = detail::parse_format(flags.format, "--format");
    if (given("--samples")) cfg.samples = flags.samples;
    if (given("--seed")) cfg.seed = flags.seed;
    if (given("--all")) cfg.all = flags.all;
    if (given("--verify")) cfg.verify = flags.verify;
    if (given("--first-bob-only")) cfg.first_bob_only = flags.first_bob_only;
    validate(cfg);
    return cfg;
}

namespace detail {

inline Format output_format(const RunConfig &cfg) {
    if (cfg.format) {
        return *cfg.format;
    }
    const auto &p = cfg.output_path;
    return p.size() >= 4 && p.compare(p.size() - 4, 4, ".csv") == 0 ? Format::csv : Format::json;
}

/// Renders either form of a result; csv_writer receives the stream.
template <class CsvWriter>
std::string render(const RunConfig &cfg, json j, CsvWriter &&csv_writer) {
    if (output_format(cfg) == Format::json) {
        quantize(j);
        return j.dump(2) + "\n";
    }
    std::ostringstream os;
    csv_writer(os);
    return os.str();
}

inline void write_output(const RunConfig &cfg, const std::string &text) {
    if (cfg.output_path.empty()) {
        return;
    }
    std::ofstream out(cfg.output_path, std::ios::binary | std::ios::trunc);
    out << text;
    out.close();
    if (!out) {
        throw std::ios_base::failure("cannot write '" + cfg.output_path + "'");
    }
}

inline std::string format_range(const std::optional<ValueRange> &r) {
    return r ? "[" + fixed6(r->lo) + ", " + fixed6(r->hi) + "]" : "empty";
}

} // namespace detail

/// Executes a validated configuration. Diagnostics go to err, the summary to out.
inline int run(const RunConfig &cfg, std::ostream &out = std::cout, std::ostream &err = std::cerr) {
    try {
        validate(cfg);
        switch (cfg.command) {
        case Command::bounds: {
            json j = json::object();
            for (const auto &[n, c] : classical_bound_table()) {
                out << "N=" << n << "  C_N=" << fixed6(c) << '\n';
                j[std::to_string(n)] = c;
            }
            detail::write_output(cfg, detail::render(cfg, json{{"bounds", j}}, [](std::ostream &os) {
                os << "n,bound\n";
                for (const auto &[n, c] : classical_bound_table()) {
                    os << n << ',' << fixed6(c) << '\n';
                }
            }));
            return kExitOk;
        }
        case Command::eval: {
            const Scenario s{cfg.mu, *cfg.n_settings, cfg.alice, cfg.bob};
            const SteeringReport report = evaluate(s, cfg.verify);
            out << "N=" << report.n_settings << " mu=" << fixed6(report.mu)
                << " C_N=" << fixed6(report.bound) << '\n';
            for (std::size_t i = 0; i < report.values.size(); ++i) {
                for (std::size_t p = 0; p < report.values[i].size(); ++p) {
                    out << "S^{" << i + 1 << ',' << p + 1 << "} = " << fixed6(report.values[i][p])
                        << (report.violated[i][p] ? "  violated" : "  not violated") << '\n';
                }
            }
            out << report.violation_count() << " violation(s)\n";
            if (report.oracle_max_deviation) {
                out << "oracle max deviation: " << *report.oracle_max_deviation << '\n';
            }
            detail::write_output(cfg, detail::render(cfg, to_json_value(report),
                                                     [&](std::ostream &os) { write_csv(os, report); }));
            return kExitOk;
        }
        case Command::ranges: {
            const auto ranges = sharpness_ranges(*cfg.n_settings, cfg.n_alices, cfg.mu);
            if (!ranges) {
                err << "infeasible: " << cfg.n_alices << " Alice(s) cannot share steering at N="
                    << *cfg.n_settings << ", mu=" << cfg.mu << '\n';
                return kExitInfeasible;
            }
            for (const auto &iv : *ranges) {
                out << iv.observer << " in [" << fixed6(iv.lo) << ", " << fixed6(iv.hi) << "]\n";
            }
            detail::write_output(cfg, detail::render(cfg, json{{"n", *cfg.n_settings},
                                                               {"n_alices", cfg.n_alices},
                                                               {"mu", cfg.mu},
                                                               {"intervals", to_json_value(*ranges)}},
                                                     [&](std::ostream &os) { write_csv(os, *ranges); }));
            return kExitOk;
        }
        case Command::maxalices: {
            std::vector<int> ns;
            if (cfg.all && !cfg.n_settings) {
                ns.assign(kSupportedSettings.begin(), kSupportedSettings.end());
            } else {
                ns.push_back(*cfg.n_settings);
            }
            json map = json::object();
            std::ostringstream csv;
            csv << "n,max_alices\n";
            for (int n : ns) {
                const int m = max_alices(n, cfg.mu);
                out << "N=" << n << "  max Alices=" << m << '\n';
                map[std::to_string(n)] = m;
                csv << n << ',' << m << '\n';
            }
            detail::write_output(cfg, detail::render(cfg, json{{"mu", cfg.mu}, {"max_alices", map}},
                                                     [&](std::ostream &os) { os << csv.str(); }));
            return kExitOk;
        }
        case Command::minpurity: {
            const auto mu = min_purity(*cfg.n_settings, cfg.n_alices, cfg.n_bobs);
            if (!mu) {
                err << "infeasible: " << cfg.n_alices << " Alice(s) and " << cfg.n_bobs
                    << " Bob(s) cannot share steering at N=" << *cfg.n_settings << '\n';
                return kExitInfeasible;
            }
            out << "mu_min=" << fixed6(*mu) << '\n';
            detail::write_output(
                cfg, detail::render(cfg,
                                    json{{"n", *cfg.n_settings},
                                         {"n_alices", cfg.n_alices},
                                         {"n_bobs", cfg.n_bobs},
                                         {"mu_min", *mu}},
                                    [&](std::ostream &os) {
                                        os << "n,n_alices,n_bobs,mu_min\n"
                                           << *cfg.n_settings << ',' << cfg.n_alices << ','
                                           << cfg.n_bobs << ',' << fixed6(*mu) << '\n';
                                    }));
            return kExitOk;
        }
        case Command::region2x2: {
            const RegionScan scan =
                region_scan_2x2(*cfg.n_settings, cfg.mu, cfg.grid_step.value_or(kDefaultRegionStep));
            out << "cells in region: " << scan.cells().size() << '\n'
                << "lambda1 (= eta1) extent: " << detail::format_range(scan.lambda_extent) << '\n'
                << "diagonal extent: " << detail::format_range(scan.diagonal_extent) << '\n';
            detail::write_output(cfg, detail::render(cfg, to_json_value(scan),
                                                     [&](std::ostream &os) { write_csv(os, scan); }));
            return kExitOk;
        }
        case Command::check3x2: {
            const double step = cfg.grid_step.value_or(kDefaultOverlapStep);
            const auto monitored =
                cfg.first_bob_only ? MonitoredPairs::first_bob_only : MonitoredPairs::all;
            const bool overlap = check_3x2_overlap(*cfg.n_settings, cfg.mu, step, monitored);
            const char *label = cfg.first_bob_only ? "first_bob_only" : "all";
            out << "3 Alices x " << (cfg.first_bob_only ? 1 : 2) << " Bob(s) overlap: "
                << (overlap ? "yes" : "no") << '\n';
            detail::write_output(
                cfg, detail::render(cfg,
                                    json{{"n", *cfg.n_settings},
                                         {"mu", cfg.mu},
                                         {"grid_step", step},
                                         {"monitored", label},
                                         {"overlap", overlap}},
                                    [&](std::ostream &os) {
                                        os << "n,mu,grid_step,monitored,overlap\n"
                                           << *cfg.n_settings << ',' << fixed6(cfg.mu) << ','
                                           << fixed6(step) << ',' << label << ','
                                           << (overlap ? 1 : 0) << '\n';
                                    }));
            return kExitOk;
        }
        case Command::verify: {
            std::mt19937_64 rng(cfg.seed);
            const double worst = oracle_sweep_max_deviation(rng, cfg.samples);
            const bool passed = worst <= kOracleTolerance;
            out << "scenarios: " << cfg.samples << "  max |closed - oracle| = " << worst
                << (passed ? "  (ok)" : "  (exceeds 1e-10)") << '\n';
            detail::write_output(
                cfg, detail::render(cfg,
                                    json{{"samples", cfg.samples},
                                         {"seed", cfg.seed},
                                         {"max_deviation", worst},
                                         {"tolerance", kOracleTolerance},
                                         {"passed", passed}},
                                    [&](std::ostream &os) {
                                        char buf[64];
                                        std::snprintf(buf, sizeof buf, "%.3e", worst);
                                        os << "samples,seed,max_deviation,passed\n"
                                           << cfg.samples << ',' << cfg.seed << ',' << buf << ','
                                           << (passed ? 1 : 0) << '\n';
                                    }));
            if (!passed) {
                err << "oracle deviation above tolerance\n";
                return kExitInputError;
            }
            return kExitOk;
        }
        case Command::table1: {
            const auto rows = reproduce_table1();
            for (const auto &row : rows) {
                out << "N=" << row.n << " N_A=" << row.reference->n_alices
                    << "  mu_min=" << fixed6(row.mu_min)
                    << "  max |dev|=" << fixed6(row.max_deviation()) << " (" << row.worst().column
                    << ")\n";
            }
            detail::write_output(cfg, detail::render(cfg, json{{"rows", to_json_value(rows)}},
                                                     [&](std::ostream &os) { write_csv(os, rows); }));
            return kExitOk;
        }
        }
    } catch (const ConfigError &e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const std::ios_base::failure &e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const DomainError &e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
    return kExitOk;
}

/// argv entry point used by the steerseq executable.
inline int main_entry(int argc, const char *const *argv, std::ostream &out = std::cout,
                      std::ostream &err = std::cerr) {
    try {
        const auto cfg = parse_command_line(argc, argv, out);
        if (!cfg) {
            return kExitOk;
        }
        return run(*cfg, out, err);
    } catch (const ConfigError &e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

} // namespace steerseq::cli
