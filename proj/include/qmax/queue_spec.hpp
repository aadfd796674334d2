#pragma once

#include <cmath>
#include <string>

#include <fmt/format.h>

#include "qmax/errors.hpp"

namespace qmax {

/// Arrival discipline of a discrete-time queue.
///  - LasDa: late arrival, delayed access. An arrival to an empty queue waits
///    one slot before it can be served.
///  - Eas: early arrival. Every slot applies u <- max(0, u + x - y).
enum class Discipline { LasDa, Eas };

/// Strict mode is what every analytic routine requires. TestMode additionally
/// admits the degenerate endpoints p = 0 and r in {0, 1} for simulators.
enum class Validation { Strict, TestMode };

inline const char* to_string(Discipline d) { return d == Discipline::LasDa ? "LAS-DA" : "EAS"; }

struct DiscreteQueueSpec {
    double p = 0.0;  // arrival probability per slot
    double r = 0.0;  // per-server departure probability per slot
    int servers = 1;
    Discipline discipline = Discipline::LasDa;

    double q() const { return 1.0 - p; }
    double s() const { return 1.0 - r; }
};

struct ContinuousQueueSpec {
    double lambda = 0.0;
    double mu = 0.0;
    int c = 1;

    double rho() const { return lambda / (c * mu); }
};

inline void validate(const DiscreteQueueSpec& spec, Validation mode = Validation::Strict)
{
    const bool test_mode = mode == Validation::TestMode;
    if (spec.servers != 1 && spec.servers != 2)
        throw unsupported_model(fmt::format("servers must be 1 or 2, got {}", spec.servers));
    if (spec.discipline == Discipline::Eas && spec.servers != 1)
        throw unsupported_model("EAS is only defined for a single server");
    if (!std::isfinite(spec.p) || !std::isfinite(spec.r))
        throw parameter_error("p and r must be finite");
    if (test_mode) {
        if (spec.p < 0.0 || spec.p >= 1.0)
            throw parameter_error(fmt::format("p out of range: 0 <= p < 1 required, got {}", spec.p));
        if (spec.r < 0.0 || spec.r > 1.0)
            throw parameter_error(fmt::format("r out of range: 0 <= r <= 1 required, got {}", spec.r));
        return;
    }
    if (!(spec.p > 0.0 && spec.p < 1.0))
        throw parameter_error(fmt::format("p out of range: 0 < p < 1 required, got {}", spec.p));
    if (!(spec.r > 0.0 && spec.r < 1.0))
        throw parameter_error(fmt::format("r out of range: 0 < r < 1 required, got {}", spec.r));
    if (!(spec.p < spec.servers * spec.r))
        throw parameter_error(fmt::format("stability violated: p < {}*r required, got p={} r={}",
                                          spec.servers, spec.p, spec.r));
}

inline void validate(const ContinuousQueueSpec& spec)
{
    if (spec.c < 1)
        throw parameter_error(fmt::format("c must be >= 1, got {}", spec.c));
    if (!(spec.lambda > 0.0) || !std::isfinite(spec.lambda))
        throw parameter_error(fmt::format("lambda must be > 0, got {}", spec.lambda));
    if (!(spec.mu > 0.0) || !std::isfinite(spec.mu))
        throw parameter_error(fmt::format("mu must be > 0, got {}", spec.mu));
    if (!(spec.lambda < spec.c * spec.mu))
        throw parameter_error(fmt::format("stability violated: lambda < c*mu required, got lambda={} mu={} c={}",
                                          spec.lambda, spec.mu, spec.c));
}

} // namespace qmax
