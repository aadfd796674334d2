#pragma once

// JSON, CSV and aligned-text renderings of model and experiment results.
// JSON field names match the struct members; doubles are written with
// shortest round-trip precision, text with 10 significant digits.

#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "qmax/experiment.hpp"
#include "qmax/model.hpp"
#include "qmax/oracle.hpp"
#include "qmax/queue_spec.hpp"
#include "qmax/verification.hpp"

namespace qmax {

using json = nlohmann::ordered_json;

inline std::string fmt10(double v) { return fmt::format("{:.10g}", v); }

inline json to_json(const DiscreteQueueSpec& spec)
{
    return {{"p", spec.p}, {"r", spec.r}, {"servers", spec.servers}, {"discipline", to_string(spec.discipline)}};
}

inline json to_json(const ContinuousQueueSpec& spec)
{
    return {{"lambda", spec.lambda}, {"mu", spec.mu}, {"c", spec.c}};
}

inline json to_json(const StationaryProfile& prof) { return {{"head", prof.head}, {"omega", prof.omega}}; }

inline json to_json(const HittingProfile& hit)
{
    return {{"nu0", hit.nu0}, {"nu1", hit.nu1}, {"nu_minus1", hit.nu_minus1}, {"theta", hit.theta}, {"ec", hit.ec}};
}

inline json to_json(const ExtremeAsymptotics& asym)
{
    return {{"omega", asym.omega}, {"a", asym.a}, {"slope", asym.slope}, {"intercept", asym.intercept}};
}

inline json to_json(const EmpiricalMaxSummary& s)
{
    json cdf = json::array();
    for (const auto& [level, freq] : s.cdf)
        cdf.push_back({{"level", level}, {"frequency", freq}});
    return {{"n", s.n},       {"reps", s.reps}, {"mean", s.mean}, {"variance", s.variance},
            {"stderr", s.std_error()}, {"cdf", cdf}, {"seed", s.seed}};
}

inline json to_json(const ComparisonReport& c)
{
    return {{"predicted_mean", c.predicted_mean},
            {"empirical_mean", c.empirical_mean},
            {"stderr", c.std_error},
            {"z_score", c.z_score},
            {"sup_cdf_distance", c.sup_cdf_distance},
            {"sup_level", c.sup_level},
            {"sigma_band", c.sigma_band},
            {"cdf_tolerance", c.cdf_tolerance},
            {"mean_within_band", c.mean_within_band},
            {"cdf_within_tolerance", c.cdf_within_tolerance}};
}

inline json to_json(const DoctorTable& t)
{
    json rows = json::array();
    for (const auto& r : t.rows)
        rows.push_back({{"label", r.label},
                        {"slope", r.slope},
                        {"intercept", r.intercept},
                        {"expected_max", r.expected_max},
                        {"mean_length", r.mean_length}});
    return {{"horizon", t.horizon},
            {"rows", rows},
            {"discrete_fast_wins", t.discrete_fast_wins},
            {"continuous_fast_wins", t.continuous_fast_wins}};
}

inline json to_json(const DeltaSweep& sweep)
{
    json rows = json::array();
    for (const auto& r : sweep.rows)
        rows.push_back({{"delta", r.delta},
                        {"p", r.p},
                        {"r", r.r},
                        {"clump_rate", r.clump_rate},
                        {"clump_rate_target", r.clump_rate_target},
                        {"clump_rate_rel_error", r.clump_rate_rel_error},
                        {"tail_coeff_per_time", r.tail_coeff_per_time},
                        {"tail_coeff_per_time_target", r.tail_coeff_per_time_target},
                        {"tail_coeff_per_time_rel_error", r.tail_coeff_per_time_rel_error},
                        {"tail_coeff_level_matched", r.tail_coeff_level_matched},
                        {"tail_coeff_target", r.tail_coeff_target},
                        {"tail_coeff_rel_error", r.tail_coeff_rel_error},
                        {"mean_length", r.mean_length},
                        {"mean_length_target", r.mean_length_target},
                        {"mean_length_rel_error", r.mean_length_rel_error}});
    return {{"spec", to_json(sweep.spec)},
            {"rows", rows},
            {"clump_rate_monotone", sweep.clump_rate_monotone},
            {"tail_coeff_monotone", sweep.tail_coeff_monotone},
            {"mean_length_monotone", sweep.mean_length_monotone}};
}

inline json to_json(const VerificationReport& rep)
{
    json checks = json::array();
    for (const auto& c : rep.checks)
        checks.push_back({{"model", c.model},
                          {"p", c.p},
                          {"r", c.r},
                          {"quantity", c.quantity},
                          {"closed_form", c.closed_form},
                          {"oracle", c.oracle},
                          {"abs_error", c.abs_error},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass}});
    return {{"checks", checks}, {"failures", rep.failures()}, {"passed", rep.passed()}};
}

// --- CSV -------------------------------------------------------------------

inline void write_csv(std::ostream& out, const std::vector<CdfRow>& rows)
{
    out << "level,empirical,predicted\n";
    for (const auto& r : rows)
        out << fmt::format("{},{},{}\n", r.level, r.empirical, r.predicted);
}

inline void write_csv(std::ostream& out, const DeltaSweep& sweep)
{
    out << "delta,p,r,clump_rate,clump_rate_target,clump_rate_rel_error,tail_coeff_per_time,"
           "tail_coeff_per_time_target,tail_coeff_per_time_rel_error,tail_coeff_level_matched,"
           "tail_coeff_target,tail_coeff_rel_error,mean_length,mean_length_target,mean_length_rel_error\n";
    for (const auto& r : sweep.rows)
        out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.delta, r.p, r.r, r.clump_rate,
                           r.clump_rate_target, r.clump_rate_rel_error, r.tail_coeff_per_time,
                           r.tail_coeff_per_time_target, r.tail_coeff_per_time_rel_error,
                           r.tail_coeff_level_matched, r.tail_coeff_target, r.tail_coeff_rel_error, r.mean_length,
                           r.mean_length_target, r.mean_length_rel_error);
}

inline void write_csv(std::ostream& out, const DoctorTable& t)
{
    out << "label,slope,intercept,expected_max,mean_length\n";
    for (const auto& r : t.rows)
        out << fmt::format("\"{}\",{},{},{},{}\n", r.label, r.slope, r.intercept, r.expected_max, r.mean_length);
}

inline void write_csv(std::ostream& out, const VerificationReport& rep)
{
    out << "model,p,r,quantity,closed_form,oracle,abs_error,tolerance,pass\n";
    for (const auto& c : rep.checks)
        out << fmt::format("{},{},{},\"{}\",{},{},{},{},{}\n", c.model, c.p, c.r, c.quantity, c.closed_form,
                           c.oracle, c.abs_error, c.tolerance, c.pass ? "pass" : "FAIL");
}

// --- text ------------------------------------------------------------------

inline void write_text(std::ostream& out, const ExtremeAsymptotics& asym)
{
    out << fmt::format("  {:<12}{:>18}\n", "omega", fmt10(asym.omega));
    out << fmt::format("  {:<12}{:>18}\n", "A", fmt10(asym.a));
    out << fmt::format("  {:<12}{:>18}\n", "slope", fmt10(asym.slope));
    out << fmt::format("  {:<12}{:>18}\n", "intercept", fmt10(asym.intercept));
}

inline void write_text(std::ostream& out, const EmpiricalMaxSummary& s)
{
    out << fmt::format("  {:<12}{:>18}\n", "n", fmt10(s.n));
    out << fmt::format("  {:<12}{:>18}\n", "reps", s.reps);
    out << fmt::format("  {:<12}{:>18}\n", "seed", s.seed);
    out << fmt::format("  {:<12}{:>18}\n", "mean", fmt10(s.mean));
    out << fmt::format("  {:<12}{:>18}\n", "variance", fmt10(s.variance));
    out << fmt::format("  {:<12}{:>18}\n", "stderr", fmt10(s.std_error()));
}

inline void write_text(std::ostream& out, const ComparisonReport& c)
{
    out << fmt::format("  {:<18}{:>18}\n", "predicted mean", fmt10(c.predicted_mean));
    out << fmt::format("  {:<18}{:>18}\n", "empirical mean", fmt10(c.empirical_mean));
    out << fmt::format("  {:<18}{:>18}\n", "stderr", fmt10(c.std_error));
    out << fmt::format("  {:<18}{:>18}\n", "z score", fmt10(c.z_score));
    out << fmt::format("  {:<18}{:>18}  (level {})\n", "sup cdf distance", fmt10(c.sup_cdf_distance), c.sup_level);
    out << fmt::format("  mean within {}-sigma band: {}\n", c.sigma_band, c.mean_within_band ? "yes" : "no");
    out << fmt::format("  cdf distance < {}: {}\n", c.cdf_tolerance, c.cdf_within_tolerance ? "yes" : "no");
}

inline void write_text(std::ostream& out, const std::vector<CdfRow>& rows)
{
    out << fmt::format("  {:>6}  {:>14}  {:>14}\n", "level", "empirical", "predicted");
    for (const auto& r : rows)
        out << fmt::format("  {:>6}  {:>14}  {:>14}\n", r.level, fmt10(r.empirical), fmt10(r.predicted));
}

inline void write_text(std::ostream& out, const DoctorTable& t)
{
    out << fmt::format("{:<34}{:>16}{:>16}{:>16}{:>16}\n", "queue", "slope", "intercept",
                       fmt::format("E(M) @ {:g}", t.horizon), "mean length");
    for (const auto& r : t.rows)
        out << fmt::format("{:<34}{:>16}{:>16}{:>16}{:>16}\n", r.label, fmt10(r.slope), fmt10(r.intercept),
                           fmt10(r.expected_max), fmt10(r.mean_length));
    out << fmt::format("one fast doctor wins (discrete):   {}\n", t.discrete_fast_wins ? "yes" : "no");
    out << fmt::format("one fast doctor wins (continuous): {}\n", t.continuous_fast_wins ? "yes" : "no");
}

inline void write_text(std::ostream& out, const DeltaSweep& sweep)
{
    out << fmt::format("M/M/{} lambda={} mu={}\n", sweep.spec.c, fmt10(sweep.spec.lambda), fmt10(sweep.spec.mu));
    out << fmt::format("{:>10}{:>18}{:>14}{:>18}{:>14}{:>18}{:>14}\n", "delta", "1/(E(C) delta)", "rel err",
                       "w A / delta", "rel err", "A / delta", "rel err");
    for (const auto& r : sweep.rows)
        out << fmt::format("{:>10}{:>18}{:>14}{:>18}{:>14}{:>18}{:>14}\n", fmt::format("{:g}", r.delta),
                           fmt10(r.clump_rate), fmt::format("{:.3e}", r.clump_rate_rel_error),
                           fmt10(r.tail_coeff_level_matched), fmt::format("{:.3e}", r.tail_coeff_rel_error),
                           fmt10(r.tail_coeff_per_time), fmt::format("{:.3e}", r.tail_coeff_per_time_rel_error));
    if (!sweep.rows.empty()) {
        const auto& r = sweep.rows.front();
        out << fmt::format("targets: 1/(E(C) delta) -> {}, w A / delta -> {}, A / delta -> {}\n",
                           fmt10(r.clump_rate_target), fmt10(r.tail_coeff_target), fmt10(r.tail_coeff_per_time_target));
    }
    out << fmt::format("monotone error decay: clump rate {}, tail coefficient {}, mean length {}\n",
                       sweep.clump_rate_monotone ? "yes" : "no", sweep.tail_coeff_monotone ? "yes" : "no",
                       sweep.mean_length_monotone ? "yes" : "no");
}

inline void write_text(std::ostream& out, const VerificationReport& rep)
{
    out << fmt::format("{:<11}{:>12}{:>12}  {:<42}{:>18}{:>18}{:>11}{:>9}  {}\n", "model", "p", "r", "quantity",
                       "closed form", "oracle", "abs err", "tol", "result");
    for (const auto& c : rep.checks)
        out << fmt::format("{:<11}{:>12}{:>12}  {:<42}{:>18}{:>18}{:>11}{:>9}  {}\n", c.model, fmt::format("{:.6g}", c.p),
                           fmt::format("{:.6g}", c.r), c.quantity, fmt10(c.closed_form), fmt10(c.oracle),
                           fmt::format("{:.2e}", c.abs_error), fmt::format("{:.0e}", c.tolerance),
                           c.pass ? "pass" : "FAIL");
    out << fmt::format("{} checks, {} failed\n", rep.checks.size(), rep.failures());
}

} // namespace qmax
