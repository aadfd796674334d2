#pragma once

// Command-line front end: predict, simulate, validate, compare-doctors and
// delta-sweep. parse_command_line() builds a RunConfig; run() executes it and
// returns the process exit status (0 ok, 1 failed checks, 2 bad input).

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qmax/errors.hpp"
#include "qmax/experiment.hpp"
#include "qmax/model.hpp"
#include "qmax/parallel.hpp"
#include "qmax/queue_spec.hpp"
#include "qmax/report.hpp"
#include "qmax/sim.hpp"
#include "qmax/verification.hpp"

namespace qmax::cli {

enum class Command { Predict, Simulate, Validate, CompareDoctors, DeltaSweep };
enum class ModelId { Geo1LasDa, Geo2LasDa, Geo1Eas, Mm1, Mm2, Mmc };
enum class Format { Json, Csv, Text };

inline constexpr int exit_ok = 0;
inline constexpr int exit_check_failed = 1;
inline constexpr int exit_bad_input = 2;

struct RunConfig {
    Command command = Command::Predict;
    std::optional<ModelId> model;
    std::optional<double> p, r, lambda, mu;
    std::optional<int> c;
    std::optional<double> horizon;  // n (slots) or x (time)
    std::uint64_t reps = 1000;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    std::string output;  // empty: stdout
    Format format = Format::Text;
    std::string grid = "default";
    std::vector<double> deltas{1e-2, 1e-3, 1e-4};
    std::string trace;  // per-path CSV for simulate, replication 0
    bool test_mode = false;
};

/// Thrown for malformed or inconsistent command-line input.
class usage_error : public std::invalid_argument {
public:
    explicit usage_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Decimal, scientific ("1e6") or simple fraction ("1/3").
inline double parse_real(std::string_view text)
{
    auto parse_plain = [&](std::string_view part) {
        double value = 0.0;
        const char* first = part.data();
        const char* last = part.data() + part.size();
        if (!part.empty() && *first == '+')
            ++first;
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr != last || part.empty())
            throw usage_error(fmt::format("not a number: '{}'", text));
        return value;
    };
    const auto slash = text.find('/');
    if (slash == std::string_view::npos)
        return parse_plain(text);
    const double num = parse_plain(text.substr(0, slash));
    const double den = parse_plain(text.substr(slash + 1));
    if (den == 0.0)
        throw usage_error(fmt::format("zero denominator in '{}'", text));
    return num / den;
}

inline std::uint64_t parse_count(std::string_view text)
{
    const double v = parse_real(text);
    if (!(v >= 0.0) || v != std::floor(v) || v > 9.0e18)
        throw usage_error(fmt::format("expected a nonnegative integer, got '{}'", text));
    return static_cast<std::uint64_t>(v);
}

inline std::optional<ModelId> parse_model(std::string_view name)
{
    if (name == "geo1-lasda") return ModelId::Geo1LasDa;
    if (name == "geo2-lasda") return ModelId::Geo2LasDa;
    if (name == "geo1-eas") return ModelId::Geo1Eas;
    if (name == "mm1") return ModelId::Mm1;
    if (name == "mm2") return ModelId::Mm2;
    if (name == "mmc") return ModelId::Mmc;
    return std::nullopt;
}

inline const char* model_id_name(ModelId id)
{
    switch (id) {
    case ModelId::Geo1LasDa: return "geo1-lasda";
    case ModelId::Geo2LasDa: return "geo2-lasda";
    case ModelId::Geo1Eas: return "geo1-eas";
    case ModelId::Mm1: return "mm1";
    case ModelId::Mm2: return "mm2";
    case ModelId::Mmc: return "mmc";
    }
    return "?";
}

inline bool is_discrete(ModelId id)
{
    return id == ModelId::Geo1LasDa || id == ModelId::Geo2LasDa || id == ModelId::Geo1Eas;
}

/// Parses argv. Throws usage_error on any malformed input; CLI11's own
/// help/version requests surface as CLI::CallForHelp and friends.
inline RunConfig parse_command_line(int argc, const char* const* argv)
{
    CLI::App app{"Extreme line lengths of Geo/Geo/c and M/M/c queues", "qmax"};
    app.require_subcommand(1);
    RunConfig cfg;
    if (const char* env = std::getenv("QMAX_JOBS"); env != nullptr)
        cfg.jobs = default_jobs();

    std::string model, p, r, lambda, mu, horizon, reps, seed, format = "text", deltas;
    int c = 0;
    unsigned jobs = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--format", format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
        sub->add_option("--output,-o", cfg.output, "write to this file instead of stdout");
    };
    auto add_model = [&](CLI::App* sub) {
        sub->add_option("--model,-m", model, "geo1-lasda, geo2-lasda, geo1-eas, mm1, mm2 or mmc");
        sub->add_option("--p", p, "arrival probability per slot (decimal or fraction)");
        sub->add_option("--r", r, "departure probability per server and slot");
        sub->add_option("--lambda", lambda, "arrival rate");
        sub->add_option("--mu", mu, "service rate per server");
        sub->add_option("--c", c, "server count (mmc)");
        sub->add_option("--n,--x", horizon, "horizon: slots (discrete) or time (continuous)");
    };

    auto* predict = app.add_subcommand("predict", "closed-form maxima and mean length");
    add_model(predict);
    add_common(predict);

    auto* simulate = app.add_subcommand("simulate", "replicate a reference program");
    add_model(simulate);
    add_common(simulate);
    simulate->add_option("--reps", reps, "replications");
    simulate->add_option("--seed", seed, "base seed");
    simulate->add_option("--jobs,-j", jobs, "worker threads (default QMAX_JOBS or 1)");
    simulate->add_option("--trace", cfg.trace, "CSV dump of replication 0's path (discrete models)");
    simulate->add_flag("--test-mode", cfg.test_mode, "admit p = 0 and r in {0, 1}");

    auto* validate_cmd = app.add_subcommand("validate", "oracle versus closed-form grid");
    add_common(validate_cmd);
    validate_cmd->add_option("--grid", cfg.grid, "default or published")->check(CLI::IsMember({"default", "published"}));

    auto* doctors = app.add_subcommand("compare-doctors", "one fast doctor against two slow ones");
    add_common(doctors);
    doctors->add_option("--n,--x", horizon, "evaluation horizon");

    auto* sweep = app.add_subcommand("delta-sweep", "slot-length sweep towards M/M/1 or M/M/2");
    add_model(sweep);
    add_common(sweep);
    sweep->add_option("--deltas", deltas, "comma-separated slot lengths");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        throw;
    } catch (const CLI::CallForAllHelp&) {
        throw;
    } catch (const CLI::ParseError& e) {
        throw usage_error(e.what());
    }

    if (predict->parsed()) cfg.command = Command::Predict;
    if (simulate->parsed()) cfg.command = Command::Simulate;
    if (validate_cmd->parsed()) cfg.command = Command::Validate;
    if (doctors->parsed()) cfg.command = Command::CompareDoctors;
    if (sweep->parsed()) cfg.command = Command::DeltaSweep;

    if (!model.empty()) {
        cfg.model = parse_model(model);
        if (!cfg.model)
            throw usage_error(fmt::format("unknown model '{}'", model));
    }
    if (!p.empty()) cfg.p = parse_real(p);
    if (!r.empty()) cfg.r = parse_real(r);
    if (!lambda.empty()) cfg.lambda = parse_real(lambda);
    if (!mu.empty()) cfg.mu = parse_real(mu);
    if (c != 0) cfg.c = c;
    if (!horizon.empty()) cfg.horizon = parse_real(horizon);
    if (!reps.empty()) cfg.reps = parse_count(reps);
    if (!seed.empty()) cfg.seed = parse_count(seed);
    if (jobs != 0) cfg.jobs = jobs;
    cfg.format = format == "json" ? Format::Json : format == "csv" ? Format::Csv : Format::Text;
    if (!deltas.empty()) {
        cfg.deltas.clear();
        std::stringstream ss(deltas);
        std::string item;
        while (std::getline(ss, item, ','))
            cfg.deltas.push_back(parse_real(item));
    }
    return cfg;
}

namespace detail {

inline DiscreteQueueSpec discrete_spec(const RunConfig& cfg)
{
    if (cfg.lambda || cfg.mu || cfg.c)
        throw usage_error("discrete models take --p and --r, not --lambda/--mu/--c");
    if (!cfg.p || !cfg.r)
        throw usage_error("discrete models require --p and --r");
    DiscreteQueueSpec spec{*cfg.p, *cfg.r, 1, Discipline::LasDa};
    if (*cfg.model == ModelId::Geo2LasDa)
        spec.servers = 2;
    if (*cfg.model == ModelId::Geo1Eas)
        spec.discipline = Discipline::Eas;
    validate(spec, cfg.test_mode ? Validation::TestMode : Validation::Strict);
    return spec;
}

inline ContinuousQueueSpec continuous_spec(const RunConfig& cfg)
{
    if (cfg.p || cfg.r)
        throw usage_error("continuous models take --lambda and --mu, not --p/--r");
    if (!cfg.lambda || !cfg.mu)
        throw usage_error("continuous models require --lambda and --mu");
    ContinuousQueueSpec spec{*cfg.lambda, *cfg.mu, 1};
    if (*cfg.model == ModelId::Mm2)
        spec.c = 2;
    if (*cfg.model == ModelId::Mmc) {
        if (!cfg.c)
            throw usage_error("mmc requires --c");
        spec.c = *cfg.c;
    } else if (cfg.c && *cfg.c != spec.c) {
        throw usage_error(fmt::format("{} fixes c = {}", model_id_name(*cfg.model), spec.c));
    }
    validate(spec);
    return spec;
}

inline ModelId require_model(const RunConfig& cfg)
{
    if (!cfg.model)
        throw usage_error("--model is required");
    return *cfg.model;
}

inline std::uint64_t slot_horizon(double n)
{
    if (!(n >= 1.0) || n != std::floor(n))
        throw usage_error(fmt::format("discrete horizon must be a positive integer, got {}", n));
    return static_cast<std::uint64_t>(n);
}

struct Emitted {
    json payload;
    std::string text;
    std::string csv;
    bool ok = true;
};

inline Emitted predict(const RunConfig& cfg)
{
    const ModelId id = require_model(cfg);
    const double n = cfg.horizon.value_or(1e6);
    Emitted out;
    std::ostringstream text, csv;
    csv << "key,value\n";
    auto kv = [&](const std::string& key, double v) {
        text << fmt::format("  {:<24}{:>18}\n", key, fmt10(v));
        csv << fmt::format("{},{}\n", key, v);
    };

    out.payload["command"] = "predict";
    out.payload["model"] = model_id_name(id);
    text << fmt::format("{} prediction\n", model_id_name(id));
    if (is_discrete(id)) {
        if (cfg.test_mode)
            throw usage_error("--test-mode applies to simulate only");
        const DiscreteQueueSpec spec = discrete_spec(cfg);
        const StationaryProfile prof = stationary_profile(spec);
        const ExtremeAsymptotics asym = extreme_asymptotics(spec);
        out.payload["parameters"] = to_json(spec);
        out.payload["horizon"] = n;
        out.payload["stationary"] = to_json(prof);
        kv("p", spec.p);
        kv("r", spec.r);
        for (std::size_t j = 0; j < prof.head.size(); ++j)
            kv(fmt::format("pi_{}", j), prof.head[j]);
        if (spec.servers == 2) {
            const HittingProfile hit = hitting_profile(spec);
            out.payload["hitting"] = to_json(hit);
            kv("nu0", hit.nu0);
            kv("nu1", hit.nu1);
            kv("nu_minus1", hit.nu_minus1);
        }
        out.payload["clump_mean"] = clump_mean(spec);
        kv("E(C)", clump_mean(spec));
        out.payload["asymptotics"] = to_json(asym);
        kv("omega", asym.omega);
        kv("A", asym.a);
        kv("slope", asym.slope);
        kv("intercept", asym.intercept);
        kv("horizon", n);
        out.payload["expected_max"] = expected_max(asym, n);
        out.payload["mean_queue_length"] = mean_queue_length(spec);
        kv("expected_max", expected_max(asym, n));
        kv("mean_queue_length", mean_queue_length(spec));
        if (spec.discipline == Discipline::Eas) {
            const double lazy = eas_lazy_walk_expected_max(spec.p, spec.r, n);
            out.payload["reference_only"] = {{"lazy_walk_expected_max", lazy},
                                             {"note", "REFERENCE-ONLY: lazy-walk formula, not for prediction"}};
            kv("lazy_walk_E_max [REF]", lazy);
        }
        const bool normalized = std::abs(prof.total_mass() - 1.0) < normalization_tolerance;
        const bool root = std::abs(decay_residual(spec, asym.omega)) < root_residual_tolerance;
        out.payload["checks"] = {{"normalization", normalized}, {"root_residual", root}};
        out.ok = normalized && root;
    } else {
        const ContinuousQueueSpec spec = continuous_spec(cfg);
        const ExtremeAsymptotics asym = continuous_asymptotics(spec);
        out.payload["parameters"] = to_json(spec);
        out.payload["horizon"] = n;
        out.payload["asymptotics"] = to_json(asym);
        kv("lambda", spec.lambda);
        kv("mu", spec.mu);
        kv("omega", asym.omega);
        kv("A", asym.a);
        kv("slope", asym.slope);
        kv("intercept", asym.intercept);
        kv("horizon", n);
        out.payload["expected_max"] = expected_max(asym, n);
        out.payload["mean_queue_length"] = mean_queue_length(spec);
        kv("expected_max", expected_max(asym, n));
        kv("mean_queue_length", mean_queue_length(spec));
    }
    out.text = text.str();
    out.csv = csv.str();
    return out;
}

inline Emitted simulate(const RunConfig& cfg)
{
    const ModelId id = require_model(cfg);
    const ReplicationOptions opts{cfg.jobs, cfg.test_mode ? Validation::TestMode : Validation::Strict};
    Emitted out;
    std::ostringstream text, csv;
    out.payload["command"] = "simulate";
    out.payload["model"] = model_id_name(id);

    if (is_discrete(id)) {
        const DiscreteQueueSpec spec = discrete_spec(cfg);
        const std::uint64_t n = slot_horizon(cfg.horizon.value_or(1e6));
        const EmpiricalMaxSummary summary = replicate_max(spec, n, cfg.reps, cfg.seed, opts);
        out.payload["parameters"] = to_json(spec);
        out.payload["summary"] = to_json(summary);
        text << fmt::format("{} simulation\n", model_id_name(id));
        write_text(text, summary);
        bool analytic = true;
        try {
            validate(spec);
        } catch (const parameter_error&) {
            analytic = false;  // degenerate test-mode parameters have no prediction
        }
        if (analytic) {
            const ExtremeAsymptotics asym = extreme_asymptotics(spec);
            const ComparisonReport cmp = compare_prediction(summary, asym);
            out.payload["prediction"] = to_json(asym);
            out.payload["comparison"] = to_json(cmp);
            text << "comparison with prediction\n";
            write_text(text, cmp);
            const auto rows = cdf_table(summary, asym);
            write_text(text, rows);
            write_csv(csv, rows);
        } else {
            csv << "level,empirical\n";
            for (const auto& [level, freq] : summary.cdf)
                csv << fmt::format("{},{}\n", level, freq);
        }
        if (!cfg.trace.empty()) {
            std::ofstream trace(cfg.trace);
            if (!trace)
                throw usage_error(fmt::format("cannot open trace file '{}'", cfg.trace));
            sim_geo(spec, n, cfg.seed, opts.mode, CsvTrace(trace));
        }
    } else {
        const ContinuousQueueSpec spec = continuous_spec(cfg);
        const double x = cfg.horizon.value_or(1e6);
        require_positive_horizon(x);
        const MmcReplication rep = replicate_mmc(spec, x, cfg.reps, cfg.seed, opts);
        out.payload["parameters"] = to_json(spec);
        out.payload["max_sys"] = to_json(rep.sys);
        out.payload["max_que"] = to_json(rep.que);
        out.payload["identity_fraction"] = rep.identity_fraction;
        text << fmt::format("M/M/{} simulation\nmax L_sys\n", spec.c);
        write_text(text, rep.sys);
        text << "max L_que\n";
        write_text(text, rep.que);
        text << fmt::format("  fraction with max L_sys = c + max L_que: {}\n", fmt10(rep.identity_fraction));
        if (spec.c <= 2) {
            const ExtremeAsymptotics asym = continuous_asymptotics(spec);
            const ComparisonReport cmp = compare_prediction(rep.sys, asym);
            out.payload["prediction"] = to_json(asym);
            out.payload["comparison"] = to_json(cmp);
            text << "max L_sys against the continuous prediction\n";
            write_text(text, cmp);
            const auto rows = cdf_table(rep.sys, asym);
            write_text(text, rows);
            write_csv(csv, rows);
        } else {
            csv << "level,empirical\n";
            for (const auto& [level, freq] : rep.sys.cdf)
                csv << fmt::format("{},{}\n", level, freq);
        }
    }
    out.text = text.str();
    out.csv = csv.str();
    return out;
}

inline Emitted validate_grid(const RunConfig& cfg)
{
    std::vector<DiscreteQueueSpec> grid;
    if (cfg.grid == "published")
        grid = {{1.0 / 3.0, 0.5, 1, Discipline::LasDa},
                {1.0 / 3.0, 0.25, 2, Discipline::LasDa},
                {1.0 / 3.0, 0.5, 1, Discipline::Eas}};
    else
        grid = default_grid();
    const VerificationReport rep = verify_grid(grid);
    Emitted out;
    out.payload["command"] = "validate";
    out.payload["grid"] = cfg.grid;
    out.payload["report"] = to_json(rep);
    std::ostringstream text, csv;
    write_text(text, rep);
    write_csv(csv, rep);
    out.text = text.str();
    out.csv = csv.str();
    out.ok = rep.passed();
    return out;
}

inline Emitted compare_doctors(const RunConfig& cfg)
{
    const DoctorTable table = doctor_scenario(cfg.horizon.value_or(1e6));
    Emitted out;
    out.payload["command"] = "compare-doctors";
    out.payload["table"] = to_json(table);
    std::ostringstream text, csv;
    write_text(text, table);
    write_csv(csv, table);
    out.text = text.str();
    out.csv = csv.str();
    out.ok = table.passed();
    return out;
}

inline Emitted sweep(const RunConfig& cfg)
{
    const ModelId id = require_model(cfg);
    if (id != ModelId::Mm1 && id != ModelId::Mm2)
        throw usage_error("delta-sweep takes --model mm1 or mm2");
    RunConfig filled = cfg;
    if (!filled.lambda)
        filled.lambda = 1.0 / 3.0;
    if (!filled.mu)
        filled.mu = id == ModelId::Mm1 ? 0.5 : 0.25;
    const ContinuousQueueSpec spec = continuous_spec(filled);
    const DeltaSweep result = delta_sweep(spec, cfg.deltas);
    Emitted out;
    out.payload["command"] = "delta-sweep";
    out.payload["sweep"] = to_json(result);
    std::ostringstream text, csv;
    write_text(text, result);
    write_csv(csv, result);
    out.text = text.str();
    out.csv = csv.str();
    out.ok = result.passed();
    return out;
}

} // namespace detail

/// Executes cfg and writes the artifact to cfg.output or `out`.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    detail::Emitted result;
    try {
        switch (cfg.command) {
        case Command::Predict: result = detail::predict(cfg); break;
        case Command::Simulate: result = detail::simulate(cfg); break;
        case Command::Validate: result = detail::validate_grid(cfg); break;
        case Command::CompareDoctors: result = detail::compare_doctors(cfg); break;
        case Command::DeltaSweep: result = detail::sweep(cfg); break;
        }
    } catch (const usage_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_bad_input;
    } catch (const parameter_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_bad_input;
    } catch (const unsupported_model& e) {
        err << "error: unsupported model: " << e.what() << '\n';
        return exit_bad_input;
    }

    std::string body;
    switch (cfg.format) {
    case Format::Json: body = result.payload.dump(2) + "\n"; break;
    case Format::Csv: body = result.csv; break;
    case Format::Text: body = result.text; break;
    }
    if (cfg.output.empty()) {
        out << body;
    } else {
        std::ofstream file(cfg.output, std::ios::binary);
        if (!file) {
            err << "error: cannot open output file '" << cfg.output << "'\n";
            return exit_bad_input;
        }
        file << body;
    }
    return result.ok ? exit_ok : exit_check_failed;
}

/// parse + run, mapping usage errors and help requests to exit codes.
inline int main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    RunConfig cfg;
    try {
        cfg = parse_command_line(argc, argv);
    } catch (const CLI::Error& e) {
        out << e.what() << '\n';
        return e.get_exit_code();
    } catch (const usage_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_bad_input;
    }
    return run(cfg, out, err);
}

} // namespace qmax::cli
