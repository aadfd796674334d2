#pragma once

// Replication harness and the comparisons built on it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "qmax/errors.hpp"
#include "qmax/model.hpp"
#include "qmax/parallel.hpp"
#include "qmax/queue_spec.hpp"
#include "qmax/random.hpp"
#include "qmax/sim.hpp"

namespace qmax {

struct ReplicationOptions {
    unsigned jobs = 1;
    Validation mode = Validation::Strict;
};

struct EmpiricalMaxSummary {
    double n = 0.0;  // slots, or time for continuous models
    std::uint64_t reps = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased sample variance
    std::map<std::int64_t, double> cdf;  // level -> fraction of runs with max <= level
    std::uint64_t seed = 0;

    double std_error() const { return std::sqrt(variance / static_cast<double>(reps)); }

    double cdf_at(std::int64_t level) const
    {
        if (cdf.empty() || level < cdf.begin()->first)
            return 0.0;
        auto it = cdf.upper_bound(level);
        return std::prev(it)->second;
    }
};

/// Moments use exact integer sums so the result is independent of the
/// order in which replications finished.
inline EmpiricalMaxSummary summarize_maxima(std::span<const std::int64_t> maxima, double n, std::uint64_t seed)
{
    if (maxima.size() < 2)
        throw parameter_error("at least two replications are required");
    EmpiricalMaxSummary out;
    out.n = n;
    out.reps = maxima.size();
    out.seed = seed;

    const std::int64_t top = *std::max_element(maxima.begin(), maxima.end());
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(top) + 1, 0);
    std::int64_t sum = 0;
    long double sum_sq = 0.0L;
    for (const std::int64_t m : maxima) {
        if (m < 0)
            throw parameter_error("maxima must be nonnegative");
        ++counts[static_cast<std::size_t>(m)];
        sum += m;
        sum_sq += static_cast<long double>(m) * static_cast<long double>(m);
    }
    const auto reps = static_cast<long double>(out.reps);
    const long double mean = static_cast<long double>(sum) / reps;
    out.mean = static_cast<double>(mean);
    out.variance = static_cast<double>((sum_sq - reps * mean * mean) / (reps - 1.0L));

    std::uint64_t running = 0;
    for (std::size_t level = 0; level < counts.size(); ++level) {
        running += counts[level];
        if (running > 0)
            out.cdf[static_cast<std::int64_t>(level)] = static_cast<double>(running) / static_cast<double>(out.reps);
    }
    return out;
}

/// Runs replication i on stream (seed, i).
inline EmpiricalMaxSummary replicate_max(const DiscreteQueueSpec& spec, std::uint64_t n, std::uint64_t reps,
                                         std::uint64_t seed, const ReplicationOptions& opts = {})
{
    validate(spec, opts.mode);
    if (n < 1)
        throw parameter_error("horizon n must be >= 1");
    if (reps < 2)
        throw parameter_error("reps must be >= 2");
    std::vector<std::int64_t> maxima(reps);
    parallel_for(reps, opts.jobs, [&](std::uint64_t i) {
        Xoshiro256 rng = make_stream(seed, i);
        const MaxRecord rec =
            spec.discipline == Discipline::Eas ? eas_path(spec, n, rng) : lasda_path(spec, n, rng);
        maxima[i] = rec.max_level;
    });
    return summarize_maxima(maxima, static_cast<double>(n), seed);
}

struct MmcReplication {
    EmpiricalMaxSummary sys;
    EmpiricalMaxSummary que;
    double identity_fraction = 0.0;  // runs with max_sys == c + max_que
};

inline MmcReplication replicate_mmc(const ContinuousQueueSpec& spec, double x, std::uint64_t reps,
                                    std::uint64_t seed, const ReplicationOptions& opts = {})
{
    validate(spec);
    require_positive_horizon(x);
    if (reps < 2)
        throw parameter_error("reps must be >= 2");
    std::vector<MmcRun> runs(reps);
    parallel_for(reps, opts.jobs, [&](std::uint64_t i) {
        Xoshiro256 rng = make_stream(seed, i);
        runs[i] = mmc_path(spec, x, rng);
    });
    std::vector<std::int64_t> sys(reps), que(reps);
    std::uint64_t identity = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        sys[i] = runs[i].max_sys;
        que[i] = runs[i].max_que;
        if (runs[i].max_sys == spec.c + runs[i].max_que)
            ++identity;
    }
    return {summarize_maxima(sys, x, seed), summarize_maxima(que, x, seed),
            static_cast<double>(identity) / static_cast<double>(reps)};
}

inline constexpr double default_cdf_tolerance = 0.02;
inline constexpr double default_sigma_band = 3.0;

struct ComparisonReport {
    double predicted_mean = 0.0;
    double empirical_mean = 0.0;
    double std_error = 0.0;
    double z_score = 0.0;
    double sup_cdf_distance = 0.0;
    std::int64_t sup_level = 0;
    double cdf_tolerance = default_cdf_tolerance;
    double sigma_band = default_sigma_band;
    bool mean_within_band = false;
    bool cdf_within_tolerance = false;

    bool passed() const { return mean_within_band && cdf_within_tolerance; }
};

namespace detail {

/// Highest level at which either CDF is still visibly below 1.
inline std::int64_t comparison_ceiling(const EmpiricalMaxSummary& summary, const ExtremeAsymptotics& asym)
{
    std::int64_t top = summary.cdf.empty() ? 0 : summary.cdf.rbegin()->first;
    std::int64_t level = top;
    while (max_cdf(asym, summary.n, static_cast<double>(level)) < 1.0 - 1e-15 && level < top + 10000)
        ++level;
    return level;
}

} // namespace detail

/// Mean test: |empirical - predicted| <= band * stderr. CDF test: sup over
/// integer levels m >= 0 of |F_emp(m) - P{M <= m}|, with P{M <= m} =
/// exp(-pi_{m+1} n / E(C)) = exp(-a n w^m).
inline ComparisonReport compare_prediction(const EmpiricalMaxSummary& summary, const ExtremeAsymptotics& asym,
                                           double cdf_tolerance = default_cdf_tolerance,
                                           double sigma_band = default_sigma_band)
{
    ComparisonReport out;
    out.cdf_tolerance = cdf_tolerance;
    out.sigma_band = sigma_band;
    out.predicted_mean = expected_max(asym, summary.n);
    out.empirical_mean = summary.mean;
    out.std_error = summary.reps > 1 ? summary.std_error() : 0.0;
    const double diff = out.empirical_mean - out.predicted_mean;
    out.z_score = out.std_error > 0.0 ? diff / out.std_error
                                      : (diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff));
    out.mean_within_band = std::abs(diff) <= sigma_band * out.std_error;

    const std::int64_t ceiling = detail::comparison_ceiling(summary, asym);
    for (std::int64_t m = 0; m <= ceiling; ++m) {
        const double gap = std::abs(summary.cdf_at(m) - max_cdf(asym, summary.n, static_cast<double>(m)));
        if (gap > out.sup_cdf_distance) {
            out.sup_cdf_distance = gap;
            out.sup_level = m;
        }
    }
    out.cdf_within_tolerance = out.sup_cdf_distance < cdf_tolerance;
    return out;
}

struct CdfRow {
    std::int64_t level = 0;
    double empirical = 0.0;
    double predicted = 0.0;
};

inline std::vector<CdfRow> cdf_table(const EmpiricalMaxSummary& summary, const ExtremeAsymptotics& asym)
{
    std::vector<CdfRow> rows;
    const std::int64_t ceiling = detail::comparison_ceiling(summary, asym);
    for (std::int64_t m = 0; m <= ceiling; ++m)
        rows.push_back({m, summary.cdf_at(m), max_cdf(asym, summary.n, static_cast<double>(m))});
    return rows;
}

// ---------------------------------------------------------------------------
// One fast doctor against two slow ones.

struct DoctorRow {
    std::string label;
    double slope = 0.0;
    double intercept = 0.0;
    double expected_max = 0.0;
    double mean_length = 0.0;
};

struct DoctorTable {
    double horizon = 0.0;
    std::vector<DoctorRow> rows;  // discrete fast, discrete slow, continuous fast, continuous slow
    bool discrete_fast_wins = false;
    bool continuous_fast_wins = false;

    bool passed() const { return discrete_fast_wins && continuous_fast_wins; }
};

/// Arrival 1/3; one doctor at rate 1/2 or two at 1/4, in discrete and
/// continuous time. "Wins" means a strictly smaller expected maximum at the
/// horizon and a strictly smaller mean length.
inline DoctorTable doctor_scenario(double horizon = 1e6)
{
    const DiscreteQueueSpec geo_fast{1.0 / 3.0, 0.5, 1, Discipline::LasDa};
    const DiscreteQueueSpec geo_slow{1.0 / 3.0, 0.25, 2, Discipline::LasDa};
    const ContinuousQueueSpec mm_fast{1.0 / 3.0, 0.5, 1};
    const ContinuousQueueSpec mm_slow{1.0 / 3.0, 0.25, 2};

    auto row = [horizon](std::string label, const ExtremeAsymptotics& asym, double mean) {
        return DoctorRow{std::move(label), asym.slope, asym.intercept, expected_max(asym, horizon), mean};
    };
    DoctorTable out;
    out.horizon = horizon;
    out.rows.push_back(row("Geo/Geo/1 fast (p=1/3, r=1/2)", extreme_asymptotics(geo_fast), mean_queue_length(geo_fast)));
    out.rows.push_back(row("Geo/Geo/2 slow (p=1/3, r=1/4)", extreme_asymptotics(geo_slow), mean_queue_length(geo_slow)));
    out.rows.push_back(row("M/M/1 fast (lambda=1/3, mu=1/2)", continuous_asymptotics(mm_fast), mean_queue_length(mm_fast)));
    out.rows.push_back(row("M/M/2 slow (lambda=1/3, mu=1/4)", continuous_asymptotics(mm_slow), mean_queue_length(mm_slow)));

    auto wins = [](const DoctorRow& fast, const DoctorRow& slow) {
        return fast.expected_max < slow.expected_max && fast.mean_length < slow.mean_length;
    };
    out.discrete_fast_wins = wins(out.rows[0], out.rows[1]);
    out.continuous_fast_wins = wins(out.rows[2], out.rows[3]);
    return out;
}

// ---------------------------------------------------------------------------
// Slot-length sweep towards the continuous-time limit.

struct DeltaRow {
    double delta = 0.0;
    double p = 0.0;
    double r = 0.0;
    double clump_rate = 0.0;  // 1 / (E(C) delta)
    double clump_rate_target = 0.0;
    double clump_rate_rel_error = 0.0;
    double tail_coeff_per_time = 0.0;  // a_discrete / delta
    double tail_coeff_per_time_target = 0.0;
    double tail_coeff_per_time_rel_error = 0.0;
    double tail_coeff_level_matched = 0.0;  // w a_discrete / delta
    double tail_coeff_target = 0.0;         // continuous a
    double tail_coeff_rel_error = 0.0;
    double mean_length = 0.0;
    double mean_length_target = 0.0;
    double mean_length_rel_error = 0.0;
};

struct DeltaSweep {
    ContinuousQueueSpec spec;
    std::vector<DeltaRow> rows;
    bool clump_rate_monotone = false;
    bool tail_coeff_monotone = false;
    bool mean_length_monotone = false;

    bool passed() const { return clump_rate_monotone && tail_coeff_monotone && mean_length_monotone; }
};

/// Slack for exact-in-exact-arithmetic columns such as (r - p)/delta.
inline constexpr double monotone_slack = 1e-12;

/// Discrete tail law in slots: P{M <= m} = exp(-a_d (x/delta) w_d^m). Per
/// unit time the coefficient is a_d / delta, which tends to a_c / w_c. The
/// continuous law places its level one step lower (it matches maxima of
/// the number of other patients seen at arrival epochs), so w_d a_d / delta
/// is the quantity that tends to a_c itself.
inline DeltaSweep delta_sweep(const ContinuousQueueSpec& spec, std::span<const double> deltas)
{
    validate(spec);
    if (spec.c > 2)
        throw unsupported_model("delta sweep is available for c = 1 or 2 only");
    const ExtremeAsymptotics cont = continuous_asymptotics(spec);
    const double rate_target = spec.c * spec.mu - spec.lambda;
    const double mean_target = mean_queue_length(spec);

    DeltaSweep out;
    out.spec = spec;
    for (const double delta : deltas) {
        const DiscreteQueueSpec disc = discretize(spec, delta);
        const ExtremeAsymptotics asym = extreme_asymptotics(disc);
        DeltaRow row;
        row.delta = delta;
        row.p = disc.p;
        row.r = disc.r;
        row.clump_rate = 1.0 / (clump_mean(disc) * delta);
        row.clump_rate_target = rate_target;
        row.clump_rate_rel_error = std::abs(row.clump_rate - rate_target) / rate_target;
        row.tail_coeff_per_time = asym.a / delta;
        row.tail_coeff_per_time_target = cont.a / cont.omega;
        row.tail_coeff_per_time_rel_error =
            std::abs(row.tail_coeff_per_time - row.tail_coeff_per_time_target) / row.tail_coeff_per_time_target;
        row.tail_coeff_level_matched = asym.omega * asym.a / delta;
        row.tail_coeff_target = cont.a;
        row.tail_coeff_rel_error = std::abs(row.tail_coeff_level_matched - cont.a) / cont.a;
        row.mean_length = mean_queue_length(disc);
        row.mean_length_target = mean_target;
        row.mean_length_rel_error = std::abs(row.mean_length - mean_target) / mean_target;
        out.rows.push_back(row);
    }

    auto monotone = [&](double DeltaRow::*column) {
        std::vector<const DeltaRow*> sorted;
        for (const auto& r : out.rows)
            sorted.push_back(&r);
        std::stable_sort(sorted.begin(), sorted.end(), [](auto a, auto b) { return a->delta > b->delta; });
        for (std::size_t i = 1; i < sorted.size(); ++i)
            if (sorted[i]->*column > sorted[i - 1]->*column + monotone_slack)
                return false;
        return true;
    };
    out.clump_rate_monotone = monotone(&DeltaRow::clump_rate_rel_error);
    out.tail_coeff_monotone = monotone(&DeltaRow::tail_coeff_rel_error);
    out.mean_length_monotone = monotone(&DeltaRow::mean_length_rel_error);
    return out;
}

} // namespace qmax
