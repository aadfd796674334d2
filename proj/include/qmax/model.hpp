#pragma once

// Closed-form stationary and extreme-value results for Geo/Geo/1, Geo/Geo/2
// (LAS-DA), Geo/Geo/1 (EAS), M/M/1 and M/M/2 queues.
//
// The maximum M_n of the queue-length chain over n slots follows
//   P{M_n < k} ~ exp(-pi_k n / E(C))
// where E(C) is the mean sojourn at level k within one clump of visits.
// Every model here reduces that to
//   P{M_n <= log_{1/w}(n) + h} ~ exp(-A w^h)
// with a model-specific tail coefficient A and decay ratio w.

#include <cmath>
#include <vector>

#include "qmax/errors.hpp"
#include "qmax/queue_spec.hpp"

namespace qmax {

inline constexpr double euler_gamma = 0.5772156649015329;

/// Head probabilities pi_0..pi_t plus geometric tail pi_j = w^(j-t) pi_t
/// for j > t, where t = tail_start().
struct StationaryProfile {
    std::vector<double> head;
    double omega = 0.0;

    std::size_t tail_start() const { return head.size() - 1; }

    double probability(std::size_t j) const
    {
        const std::size_t t = tail_start();
        if (j <= t)
            return head[j];
        return head[t] * std::pow(omega, static_cast<double>(j - t));
    }

    /// Total mass using the closed geometric tail sum.
    double total_mass() const
    {
        double sum = 0.0;
        for (std::size_t j = 0; j < tail_start(); ++j)
            sum += head[j];
        return sum + head.back() / (1.0 - omega);
    }
};

/// Hitting probabilities of the two-server increment walk.
/// nu0 is the return probability to 0, nu1 the probability of reaching 0
/// from -1, nu_minus1 the probability of hitting 0 from +1.
struct HittingProfile {
    double nu0 = 0.0;
    double nu1 = 0.0;
    double nu_minus1 = 0.0;
    double theta = 0.0;
    double ec = 0.0;  // mean clump sojourn E(C) = 1/(1 - nu0)
};

/// P{M <= log_{1/w}(n) + h} ~ exp(-a w^h);  E(M) ~ slope ln n + intercept.
struct ExtremeAsymptotics {
    double omega = 0.0;
    double a = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
};

inline ExtremeAsymptotics make_asymptotics(double omega, double a)
{
    const double inv_log = 1.0 / std::log(1.0 / omega);
    return {omega, a, inv_log, (euler_gamma + std::log(a)) * inv_log + 0.5};
}

namespace detail {

inline double theta(double q, double r, double s) { return std::sqrt(r * r + 4.0 * q * s); }

inline void require_two_servers(const DiscreteQueueSpec& spec)
{
    if (spec.servers != 2 || spec.discipline != Discipline::LasDa)
        throw unsupported_model("hitting profile is defined for the two-server LAS-DA queue only");
}

} // namespace detail

/// (q w + p)(r w + s)^c - w; zero at the decay ratio.
inline double decay_residual(const DiscreteQueueSpec& spec, double omega)
{
    const double lin = spec.r * omega + spec.s();
    return (spec.q() * omega + spec.p) * std::pow(lin, spec.servers) - omega;
}

/// p s^2 - (2 q s + r) r z - q r^2 z^2, the quadratic factor of the
/// generating-function denominator whose smallest root equals w.
inline double z3_residual(const DiscreteQueueSpec& spec, double z)
{
    const double p = spec.p, q = spec.q(), r = spec.r, s = spec.s();
    return p * s * s - (2.0 * q * s + r) * r * z - q * r * r * z * z;
}

/// Smallest root of the quadratic factor, evaluated as printed:
/// (-2 q s - r + theta) / (2 q r).
inline double z3_root(const DiscreteQueueSpec& spec)
{
    const double q = spec.q(), r = spec.r, s = spec.s();
    return (-2.0 * q * s - r + detail::theta(q, r, s)) / (2.0 * q * r);
}

inline double decay_ratio(const DiscreteQueueSpec& spec)
{
    validate(spec);
    const double p = spec.p, q = spec.q(), r = spec.r, s = spec.s();
    if (spec.servers == 1)
        return p * s / (q * r);

    // theta - r - 2qs = 4pqs^2 / (theta + r + 2qs) removes the cancellation
    // in the printed numerator for small w.
    const double th = detail::theta(q, r, s);
    double omega = 2.0 * p * s * s / (r * (th + r + 2.0 * q * s));
    const double lin = r * omega + s;
    const double deriv = q * lin * lin + 2.0 * r * (q * omega + p) * lin - 1.0;
    omega -= decay_residual(spec, omega) / deriv;
    return omega;
}

inline StationaryProfile stationary_profile(const DiscreteQueueSpec& spec)
{
    const double omega = decay_ratio(spec);
    const double p = spec.p, q = spec.q(), r = spec.r, s = spec.s();

    if (spec.discipline == Discipline::Eas)
        return {{1.0 - omega}, omega};

    if (spec.servers == 1)
        return {{(r - p) / r, p * (1.0 - omega) / r}, omega};

    const double pi2 = p * p * s * (1.0 - omega) /
                       (p * p * s + r * (r + p * q * s + q * (p + q * r) * (s + r * omega)) * (1.0 - omega));
    const double pi1 = r / (p * s) * (r + 2.0 * q * s + q * r * omega) * pi2;
    const double pi0 = q * r * r / (p * p * s) * (1.0 + q * s + q * r * omega) * pi2;
    return {{pi0, pi1, pi2}, omega};
}

/// Literal closed forms for the two-server walk, as printed. Kept for
/// cross-checking the rearranged expressions used by hitting_profile().
struct PrintedHittingForms {
    double nu0, nu_minus1, nu1;
};

inline PrintedHittingForms printed_hitting_forms(const DiscreteQueueSpec& spec)
{
    detail::require_two_servers(spec);
    validate(spec);
    const double p = spec.p, q = spec.q(), r = spec.r, s = spec.s();
    const double th = detail::theta(q, r, s);
    return {(6.0 * q - 4.0 * q * r + r * r - 2.0 * q * th - r * th) / (2.0 * q),
            (2.0 * q * s + r - th) * (q * r - th) / (2.0 * p * q * s * s),
            (-r - 2.0 * q * s + th) / (2.0 * q * r)};
}

inline HittingProfile hitting_profile(const DiscreteQueueSpec& spec)
{
    detail::require_two_servers(spec);
    validate(spec);
    const double p = spec.p, q = spec.q(), r = spec.r, s = spec.s();
    const double th = detail::theta(q, r, s);

    // 1 - nu0 = theta (2q + r - theta) / (2q) and 2q + r - theta =
    // 4q(2r - p) / (2q + r + theta); this form keeps (1 - nu0)/delta accurate
    // as the slot length shrinks.
    const double escape = 2.0 * th * (2.0 * r - p) / (2.0 * q + r + th);
    HittingProfile out;
    out.theta = th;
    out.nu0 = 1.0 - escape;
    out.nu_minus1 = 2.0 * (th - q * r) / (th + r + 2.0 * q * s);
    out.nu1 = decay_ratio(spec);
    out.ec = 1.0 / escape;
    return out;
}

/// Mean sojourn at a high level per clump, E(C).
inline double clump_mean(const DiscreteQueueSpec& spec)
{
    validate(spec);
    if (spec.servers == 1)
        return 1.0 / (spec.r - spec.p);
    return hitting_profile(spec).ec;
}

inline ExtremeAsymptotics extreme_asymptotics(const DiscreteQueueSpec& spec)
{
    const double omega = decay_ratio(spec);
    const double p = spec.p, q = spec.q(), r = spec.r, s = spec.s();
    double a = 0.0;
    if (spec.discipline == Discipline::Eas) {
        a = p * s * (r - p) * (r - p) / (q * q * r * r);
    } else if (spec.servers == 1) {
        a = p * (r - p) * (r - p) / (q * r * r);
    } else {
        const double pi2 = stationary_profile(spec).head[2];
        a = pi2 / (hitting_profile(spec).ec * omega);
    }
    return make_asymptotics(omega, a);
}

inline ExtremeAsymptotics continuous_asymptotics(const ContinuousQueueSpec& spec)
{
    validate(spec);
    const double lambda = spec.lambda, mu = spec.mu;
    if (spec.c == 1) {
        const double omega = lambda / mu;
        return make_asymptotics(omega, (mu - lambda) * (mu - lambda) / mu * omega * omega);
    }
    if (spec.c == 2) {
        const double omega = lambda / (2.0 * mu);
        const double gap = 2.0 * mu - lambda;
        return make_asymptotics(omega, 2.0 * gap * gap / (2.0 * mu + lambda) * omega * omega);
    }
    throw unsupported_model("analytic maxima are available for c = 1 or 2 only");
}

/// exp(-a w^h) for a real level offset h.
inline double tail_law(const ExtremeAsymptotics& asym, double h)
{
    return std::exp(-asym.a * std::pow(asym.omega, h));
}

/// P{M_n <= k}, i.e. the tail law at h = k - log_{1/w}(n), which equals
/// exp(-a n w^k). Evaluated in log space so large n and k do not overflow.
inline double max_cdf(const ExtremeAsymptotics& asym, double n, double k)
{
    return std::exp(-std::exp(std::log(asym.a) + std::log(n) + k * std::log(asym.omega)));
}

inline double expected_max(const ExtremeAsymptotics& asym, double n)
{
    return asym.slope * std::log(n) + asym.intercept;
}

inline double mean_queue_length(const DiscreteQueueSpec& spec)
{
    const StationaryProfile prof = stationary_profile(spec);
    const double omega = prof.omega;
    if (spec.discipline == Discipline::Eas)
        return omega / (1.0 - omega);
    if (spec.servers == 1)
        return prof.head[1] / ((1.0 - omega) * (1.0 - omega));
    return prof.head[1] + (2.0 - omega) / ((1.0 - omega) * (1.0 - omega)) * prof.head[2];
}

inline double mean_queue_length(const ContinuousQueueSpec& spec)
{
    validate(spec);
    const double lambda = spec.lambda, mu = spec.mu;
    if (spec.c == 1)
        return lambda / (mu - lambda);
    if (spec.c == 2)
        return 4.0 * lambda * mu / ((2.0 * mu - lambda) * (2.0 * mu + lambda));
    throw unsupported_model("mean length formulas are available for c = 1 or 2 only");
}

/// Geo/Geo/c approximation of an M/M/c queue with slot length delta.
inline DiscreteQueueSpec discretize(const ContinuousQueueSpec& spec, double delta)
{
    validate(spec);
    if (spec.c > 2)
        throw unsupported_model("discretization is available for c = 1 or 2 only");
    if (!(delta > 0.0))
        throw parameter_error("delta must be > 0");
    DiscreteQueueSpec out{spec.lambda * delta, spec.mu * delta, spec.c, Discipline::LasDa};
    try {
        validate(out);
    } catch (const parameter_error& e) {
        throw parameter_error(std::string("delta too large: ") + e.what());
    }
    return out;
}

/// Expected EAS maximum from the lazy-random-walk argument with up step ps
/// and down step qr. Reference only: it carries a spurious ln(ps + qr) / ln(qr/ps)
/// offset relative to extreme_asymptotics() and should not be used for prediction.
inline double eas_lazy_walk_expected_max(double p, double r, double n)
{
    const DiscreteQueueSpec spec{p, r, 1, Discipline::Eas};
    validate(spec);
    const double up = p * spec.s();
    const double down = spec.q() * r;
    const double log_ratio = std::log(down / up);
    return std::log((up + down) * n) / log_ratio +
           (euler_gamma + std::log(up * (down - up) * (down - up) / (down * down))) / log_ratio + 0.5;
}

} // namespace qmax
