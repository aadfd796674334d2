#pragma once

// Oracle-versus-closed-form grid: each row names a closed form, the
// independent value it was checked against, and the tolerance applied.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qmax/model.hpp"
#include "qmax/oracle.hpp"
#include "qmax/queue_spec.hpp"

namespace qmax {

struct VerificationCheck {
    std::string model;
    double p = 0.0;
    double r = 0.0;
    std::string quantity;
    double closed_form = 0.0;
    double oracle = 0.0;
    double abs_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct VerificationReport {
    std::vector<VerificationCheck> checks;

    bool passed() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
    }
    std::size_t failures() const
    {
        return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.pass; }));
    }
};

inline constexpr std::size_t default_truncation_k = 120;
inline constexpr std::size_t default_truncation_j = 200;
inline constexpr double stationary_tolerance = 1e-10;
inline constexpr double hitting_tolerance = 1e-8;
inline constexpr double root_residual_tolerance = 1e-12;
inline constexpr double z3_residual_tolerance = 1e-10;
inline constexpr double normalization_tolerance = 1e-12;
inline constexpr double increment_sum_tolerance = 1e-14;

inline std::string model_name(const DiscreteQueueSpec& spec)
{
    if (spec.discipline == Discipline::Eas)
        return "geo1-eas";
    return spec.servers == 1 ? "geo1-lasda" : "geo2-lasda";
}

/// Twenty stable (p, r) pairs per model with decay ratio in [0.1, 0.75], so
/// that w^120 stays below 1e-13.
inline std::vector<DiscreteQueueSpec> default_grid(int servers, Discipline discipline)
{
    // p stays below 1 for two servers only while r <= 1/2 at w = 0.75
    const std::vector<double> rs = servers == 1 ? std::vector{0.15, 0.3, 0.45, 0.6, 0.8}
                                                : std::vector{0.1, 0.2, 0.3, 0.4, 0.5};
    const double omegas[] = {0.1, 0.3, 0.55, 0.75};
    std::vector<DiscreteQueueSpec> grid;
    for (const double r : rs) {
        for (const double w : omegas) {
            const double s = 1.0 - r;
            double p = 0.0;
            if (servers == 1) {
                // w = ps / (qr)  =>  p = w r / (s + w r)
                p = w * r / (s + w * r);
            } else {
                // w = (qw + p)(rw + s)^2  =>  p = (w - w lin^2) / (lin^2 (1 - w)), lin = rw + s
                const double lin2 = (r * w + s) * (r * w + s);
                p = w * (1.0 - lin2) / (lin2 * (1.0 - w));
            }
            grid.push_back({p, r, servers, discipline});
        }
    }
    return grid;
}

inline std::vector<DiscreteQueueSpec> default_grid()
{
    std::vector<DiscreteQueueSpec> all;
    for (const auto& [servers, disc] :
         {std::pair{1, Discipline::LasDa}, std::pair{2, Discipline::LasDa}, std::pair{1, Discipline::Eas}}) {
        const auto part = default_grid(servers, disc);
        all.insert(all.end(), part.begin(), part.end());
    }
    return all;
}

inline void verify_spec(const DiscreteQueueSpec& spec, VerificationReport& report,
                        std::size_t K = default_truncation_k, std::size_t J = default_truncation_j)
{
    const std::string name = model_name(spec);
    auto add = [&](std::string quantity, double closed, double oracle, double tol) {
        const double err = std::abs(closed - oracle);
        report.checks.push_back({name, spec.p, spec.r, std::move(quantity), closed, oracle, err, tol, err < tol});
    };

    const StationaryProfile profile = stationary_profile(spec);
    const double omega = profile.omega;
    add("root residual |(qw+p)(rw+s)^c - w|", decay_residual(spec, omega), 0.0, root_residual_tolerance);
    add("normalization sum(pi)", profile.total_mass(), 1.0, normalization_tolerance);

    try {
        const TruncatedStationary solved = truncated_stationary(spec, K);
        double worst = 0.0;
        std::size_t worst_j = 0;
        for (std::size_t j = 0; j < solved.pi.size(); ++j) {
            const double err = std::abs(solved.pi[j] - profile.probability(j));
            if (err > worst) {
                worst = err;
                worst_j = j;
            }
        }
        add("pi_" + std::to_string(worst_j) + " (worst entry over 0..K)", profile.probability(worst_j),
            solved.pi[worst_j], stationary_tolerance);
        for (std::size_t j = 0; j < profile.head.size(); ++j)
            add("pi_" + std::to_string(j), profile.head[j], solved.pi[j], stationary_tolerance);
    } catch (const tolerance_not_met& e) {
        report.checks.push_back({name, spec.p, spec.r, std::string("stationary truncation: ") + e.what(), 0, 0, 0, 0, false});
    }

    if (spec.servers != 2)
        return;

    const HittingProfile hit = hitting_profile(spec);
    const PrintedHittingForms printed = printed_hitting_forms(spec);
    add("z3 quadratic-factor residual", z3_residual(spec, z3_root(spec)), 0.0, z3_residual_tolerance);
    add("nu1 = omega (closed forms)", printed.nu1, omega, root_residual_tolerance);
    add("nu0 printed vs rearranged", printed.nu0, hit.nu0, root_residual_tolerance);
    add("nu_-1 printed vs rearranged", printed.nu_minus1, hit.nu_minus1, root_residual_tolerance);

    const auto law = increment_law(spec);
    add("increment law sum", law[0] + law[1] + law[2] + law[3], 1.0, increment_sum_tolerance);
    {
        const double drift = increment_drift(spec);
        report.checks.push_back({name, spec.p, spec.r, "increment drift < 0", drift, 0.0, std::abs(drift), 0.0, drift < 0.0});
    }

    try {
        const HittingEstimate solved = hitting_system(spec, J);
        add("nu0", hit.nu0, solved.nu0, hitting_tolerance);
        add("nu1", hit.nu1, solved.nu1, hitting_tolerance);
        add("nu_-1", hit.nu_minus1, solved.nu_minus1, hitting_tolerance);
    } catch (const tolerance_not_met& e) {
        report.checks.push_back({name, spec.p, spec.r, std::string("hitting truncation: ") + e.what(), 0, 0, 0, 0, false});
    }
}

inline VerificationReport verify_grid(const std::vector<DiscreteQueueSpec>& grid, std::size_t K = default_truncation_k,
                                      std::size_t J = default_truncation_j)
{
    VerificationReport report;
    for (const auto& spec : grid)
        verify_spec(spec, report, K, J);
    return report;
}

} // namespace qmax
