#pragma once

// Seeded replays of the four reference programs: Geo/Geo/1 and Geo/Geo/2
// with LAS-DA, Geo/Geo/1 with EAS, and the M/M/c patient-assignment program.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <ostream>
#include <queue>
#include <random>
#include <span>
#include <vector>

#include <fmt/format.h>

#include "qmax/errors.hpp"
#include "qmax/queue_spec.hpp"
#include "qmax/random.hpp"

namespace qmax {

struct MaxRecord {
    std::int64_t max_level = 0;
    std::int64_t final_level = 0;
    std::uint64_t steps = 0;
};

struct MmcRun {
    std::int64_t max_sys = 0;
    std::int64_t max_que = 0;
    std::int64_t k = 0;  // number of arrivals in [0, x]
};

/// Observer that ignores the path.
struct NoTrace {
    void operator()(std::uint64_t, std::int64_t) const {}
};

/// Writes "step,u" rows.
class CsvTrace {
public:
    explicit CsvTrace(std::ostream& out) : out_(&out) { *out_ << "step,u\n"; }
    void operator()(std::uint64_t step, std::int64_t u) const { *out_ << step << ',' << u << '\n'; }

private:
    std::ostream* out_;
};

// One-slot updates. x is the arrival indicator, y / y1 / y2 departure
// indicators, all in {0, 1}.

inline std::int64_t lasda_step(std::int64_t u, int x, int y1, int y2, int servers)
{
    if (u == 0)
        return x;
    if (u == 1 || servers == 1)
        return std::max<std::int64_t>(0, u + x - y1);
    return std::max<std::int64_t>(0, u + x - y1 - y2);
}

inline std::int64_t eas_step(std::int64_t u, int x, int y) { return std::max<std::int64_t>(0, u + x - y); }

/// Draw order per slot is x, then y (one server) or y1, y2 (two servers),
/// one uniform each, whatever the current state.
template <class Rng, class Observer = NoTrace>
MaxRecord lasda_path(const DiscreteQueueSpec& spec, std::uint64_t n, Rng& rng, Observer&& observe = {})
{
    if (spec.discipline != Discipline::LasDa)
        throw parameter_error("lasda_path requires a LAS-DA spec");
    const double p = spec.p, r = spec.r;
    std::int64_t u = 0, m = 0;
    if (spec.servers == 1) {
        for (std::uint64_t t = 1; t <= n; ++t) {
            const int x = rng.bernoulli(p);
            const int y = rng.bernoulli(r);
            u = lasda_step(u, x, y, 0, 1);
            m = std::max(m, u);
            observe(t, u);
        }
    } else {
        for (std::uint64_t t = 1; t <= n; ++t) {
            const int x = rng.bernoulli(p);
            const int y1 = rng.bernoulli(r);
            const int y2 = rng.bernoulli(r);
            u = lasda_step(u, x, y1, y2, 2);
            m = std::max(m, u);
            observe(t, u);
        }
    }
    return {m, u, n};
}

template <class Rng, class Observer = NoTrace>
MaxRecord eas_path(const DiscreteQueueSpec& spec, std::uint64_t n, Rng& rng, Observer&& observe = {})
{
    if (spec.discipline != Discipline::Eas || spec.servers != 1)
        throw parameter_error("eas_path requires a one-server EAS spec");
    const double p = spec.p, r = spec.r;
    std::int64_t u = 0, m = 0;
    for (std::uint64_t t = 1; t <= n; ++t) {
        const int x = rng.bernoulli(p);
        const int y = rng.bernoulli(r);
        u = eas_step(u, x, y);
        m = std::max(m, u);
        observe(t, u);
    }
    return {m, u, n};
}

namespace detail {

inline void require_horizon(std::uint64_t n)
{
    if (n < 1)
        throw parameter_error("horizon n must be >= 1");
}

} // namespace detail

/// Dispatches on discipline; stream (seed, 0).
template <class Observer = NoTrace>
MaxRecord sim_geo(const DiscreteQueueSpec& spec, std::uint64_t n, std::uint64_t seed,
                  Validation mode = Validation::Strict, Observer&& observe = {})
{
    validate(spec, mode);
    detail::require_horizon(n);
    Xoshiro256 rng = make_stream(seed, 0);
    if (spec.discipline == Discipline::Eas)
        return eas_path(spec, n, rng, observe);
    return lasda_path(spec, n, rng, observe);
}

inline MaxRecord sim_geo_lasda(const DiscreteQueueSpec& spec, std::uint64_t n, std::uint64_t seed,
                               Validation mode = Validation::Strict)
{
    if (spec.discipline != Discipline::LasDa)
        throw parameter_error("sim_geo_lasda requires a LAS-DA spec");
    return sim_geo(spec, n, seed, mode);
}

inline MaxRecord sim_geo_eas(double p, double r, std::uint64_t n, std::uint64_t seed,
                             Validation mode = Validation::Strict)
{
    return sim_geo(DiscreteQueueSpec{p, r, 1, Discipline::Eas}, n, seed, mode);
}

struct Patient {
    double arrival = 0.0;
    double start = 0.0;
    double service = 0.0;

    double departure() const { return start + service; }
};

/// Patients of one M/M/c run over [0, x]: K ~ Poisson(x lambda), sorted
/// Uniform(0, x) arrival times, Exponential(mu) treatments, each patient
/// taken by the earliest-free doctor (lowest index on ties).
template <class Rng>
std::vector<Patient> mmc_patients(const ContinuousQueueSpec& spec, double x, Rng& rng)
{
    std::poisson_distribution<std::int64_t> count(x * spec.lambda);
    const std::int64_t k = count(rng);
    std::vector<Patient> patients(static_cast<std::size_t>(k));
    std::vector<double> arrivals(patients.size());
    for (auto& t : arrivals)
        t = rng.uniform() * x;
    std::sort(arrivals.begin(), arrivals.end());
    for (std::size_t i = 0; i < patients.size(); ++i) {
        patients[i].arrival = arrivals[i];
        patients[i].service = rng.exponential(spec.mu);
    }
    std::vector<double> free_at(static_cast<std::size_t>(spec.c), 0.0);
    for (auto& pt : patients) {
        auto doctor = std::min_element(free_at.begin(), free_at.end());
        pt.start = std::max(pt.arrival, *doctor);
        *doctor = pt.departure();
    }
    return patients;
}

/// Maxima over arrival epochs of L_sys (earlier arrivals still present) and
/// L_que (earlier arrivals not yet in treatment). Comparisons are strict, so
/// the arriving patient and simultaneous arrivals never count.
inline MmcRun arrival_epoch_maxima(std::span<const Patient> patients)
{
    using MinHeap = std::priority_queue<double, std::vector<double>, std::greater<>>;
    MinHeap departures, starts;
    MmcRun run;
    run.k = static_cast<std::int64_t>(patients.size());
    std::size_t i = 0;
    while (i < patients.size()) {
        const double t = patients[i].arrival;
        while (!departures.empty() && departures.top() <= t)
            departures.pop();
        while (!starts.empty() && starts.top() <= t)
            starts.pop();
        std::size_t j = i;
        while (j < patients.size() && patients[j].arrival == t)
            ++j;
        run.max_sys = std::max(run.max_sys, static_cast<std::int64_t>(departures.size()));
        run.max_que = std::max(run.max_que, static_cast<std::int64_t>(starts.size()));
        for (; i < j; ++i) {
            departures.push(patients[i].departure());
            starts.push(patients[i].start);
        }
    }
    return run;
}

template <class Rng>
MmcRun mmc_path(const ContinuousQueueSpec& spec, double x, Rng& rng)
{
    const auto patients = mmc_patients(spec, x, rng);
    return arrival_epoch_maxima(patients);
}

inline void require_positive_horizon(double x)
{
    if (!(x > 0.0))
        throw parameter_error(fmt::format("horizon x must be > 0, got {}", x));
}

inline MmcRun sim_mmc(const ContinuousQueueSpec& spec, double x, std::uint64_t seed)
{
    validate(spec);
    require_positive_horizon(x);
    Xoshiro256 rng = make_stream(seed, 0);
    return mmc_path(spec, x, rng);
}

/// Average of u over slots 1..n.
inline double sim_time_average(const DiscreteQueueSpec& spec, std::uint64_t n, std::uint64_t seed)
{
    validate(spec);
    detail::require_horizon(n);
    long double area = 0.0L;
    auto accumulate = [&area](std::uint64_t, std::int64_t u) { area += static_cast<long double>(u); };
    Xoshiro256 rng = make_stream(seed, 0);
    if (spec.discipline == Discipline::Eas)
        eas_path(spec, n, rng, accumulate);
    else
        lasda_path(spec, n, rng, accumulate);
    return static_cast<double>(area / static_cast<long double>(n));
}

/// Time average over [0, x] of the number of patients in the system.
inline double sim_time_average(const ContinuousQueueSpec& spec, double x, std::uint64_t seed)
{
    validate(spec);
    require_positive_horizon(x);
    Xoshiro256 rng = make_stream(seed, 0);
    const auto patients = mmc_patients(spec, x, rng);
    long double area = 0.0L;
    for (const auto& pt : patients)
        area += std::min(pt.departure(), x) - pt.arrival;
    return static_cast<double>(area / x);
}

} // namespace qmax
