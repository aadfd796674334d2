#pragma once

// Brute-force numerical counterparts of the closed forms in model.hpp:
// stationary vectors of truncated transition matrices and the truncated
// linear system of the two-server hitting recursions.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <fmt/format.h>

#include "qmax/errors.hpp"
#include "qmax/queue_spec.hpp"
#include "qmax/random.hpp"

namespace qmax {

inline constexpr double truncation_shift_tolerance = 1e-9;

/// Transition matrix on states {0..K}; mass that would leave the range is
/// folded into state K.
struct TruncatedChain {
    std::size_t size = 0;
    Eigen::MatrixXd rows;
};

/// Step law of the two-server walk for u >= 2, indexed by increment + 2:
/// {-2: qr^2, -1: pr^2 + 2qrs, 0: 2prs + qs^2, +1: ps^2}.
inline std::array<double, 4> increment_law(const DiscreteQueueSpec& spec)
{
    const double p = spec.p, q = spec.q(), r = spec.r, s = spec.s();
    return {q * r * r, p * r * r + 2.0 * q * r * s, 2.0 * p * r * s + q * s * s, p * s * s};
}

/// Mean increment of the two-server walk; negative iff p < 2r.
inline double increment_drift(const DiscreteQueueSpec& spec)
{
    const auto law = increment_law(spec);
    return law[3] - law[1] - 2.0 * law[0];
}

inline TruncatedChain truncated_chain(const DiscreteQueueSpec& spec, std::size_t K)
{
    validate(spec);
    const double p = spec.p, q = spec.q(), r = spec.r, s = spec.s();
    const std::size_t n = K + 1;
    TruncatedChain chain{n, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))};
    auto add = [&](std::size_t from, std::ptrdiff_t to, double prob) {
        const auto target = static_cast<std::size_t>(std::min<std::ptrdiff_t>(to, static_cast<std::ptrdiff_t>(K)));
        chain.rows(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(target)) += prob;
    };

    if (spec.discipline == Discipline::Eas) {
        add(0, 0, p * r + q);
        add(0, 1, p * s);
    } else {
        add(0, 0, q);
        add(0, 1, p);
    }
    const std::size_t first_regular = spec.servers == 2 ? 2 : 1;
    if (spec.servers == 2) {
        add(1, 0, q * r);
        add(1, 1, p * r + q * s);
        add(1, 2, p * s);
    }
    for (std::size_t i = first_regular; i <= K; ++i) {
        const auto here = static_cast<std::ptrdiff_t>(i);
        if (spec.servers == 1) {
            add(i, here - 1, q * r);
            add(i, here, p * r + q * s);
            add(i, here + 1, p * s);
        } else {
            const auto law = increment_law(spec);
            for (int step = -2; step <= 1; ++step)
                add(i, here + step, law[static_cast<std::size_t>(step + 2)]);
        }
    }
    return chain;
}

struct TruncatedStationary {
    std::vector<double> pi;
    double truncation_shift = 0.0;  // max |pi_K - pi_2K| over shared states
};

namespace detail {

inline std::vector<double> solve_stationary(const TruncatedChain& chain)
{
    const auto n = static_cast<Eigen::Index>(chain.size);
    Eigen::MatrixXd system = chain.rows.transpose() - Eigen::MatrixXd::Identity(n, n);
    system.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    const Eigen::VectorXd pi = system.partialPivLu().solve(rhs);
    return {pi.data(), pi.data() + n};
}

} // namespace detail

/// Solves pi P = pi, sum(pi) = 1 on {0..K} and repeats on {0..2K} to measure
/// truncation sensitivity.
inline TruncatedStationary truncated_stationary(const DiscreteQueueSpec& spec, std::size_t K)
{
    if (K < 10)
        throw parameter_error(fmt::format("truncation K must be >= 10, got {}", K));
    TruncatedStationary out;
    out.pi = detail::solve_stationary(truncated_chain(spec, K));
    const auto wide = detail::solve_stationary(truncated_chain(spec, 2 * K));
    for (std::size_t j = 0; j < out.pi.size(); ++j)
        out.truncation_shift = std::max(out.truncation_shift, std::abs(out.pi[j] - wide[j]));
    if (out.truncation_shift > truncation_shift_tolerance)
        throw tolerance_not_met(
            fmt::format("stationary solve moved by {:.3g} between K={} and K={}", out.truncation_shift, K, 2 * K));
    return out;
}

/// Linear system for h(x) = P{walk from x ever hits 0}, x in [-J, J] \ {0},
/// so that nu_j = h(-j). h(0) = 1 inside the recursion.
struct NuSystem {
    std::size_t range = 0;
    std::array<double, 4> coefficients{};  // increment_law order
};

inline NuSystem nu_system(const DiscreteQueueSpec& spec, std::size_t J)
{
    if (spec.servers != 2 || spec.discipline != Discipline::LasDa)
        throw unsupported_model("the hitting recursion is defined for the two-server LAS-DA queue only");
    validate(spec);
    return {J, increment_law(spec)};
}

struct HittingEstimate {
    double nu0 = 0.0;
    double nu1 = 0.0;
    double nu_minus1 = 0.0;
    double truncation_shift = 0.0;
};

namespace detail {

inline HittingEstimate solve_hitting(const NuSystem& sys)
{
    const auto J = static_cast<std::ptrdiff_t>(sys.range);
    // x in [-J, -1] -> x + J, x in [1, J] -> x + J - 1
    auto index = [J](std::ptrdiff_t x) { return static_cast<Eigen::Index>(x < 0 ? x + J : x + J - 1); };
    const Eigen::Index n = 2 * J;

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(5 * n));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (std::ptrdiff_t x = -J; x <= J; ++x) {
        if (x == 0)
            continue;
        const Eigen::Index row = index(x);
        // far below the origin the upward climb has probability ~ w^J
        if (x == -J) {
            entries.emplace_back(row, row, 1.0);
            continue;
        }
        // far above; the error this boundary introduces decays like w^J
        if (x == J) {
            entries.emplace_back(row, row, 1.0);
            rhs(row) = 1.0;
            continue;
        }
        entries.emplace_back(row, row, 1.0);
        for (int step = -2; step <= 1; ++step) {
            const std::ptrdiff_t y = x + step;
            const double coeff = sys.coefficients[static_cast<std::size_t>(step + 2)];
            if (y == 0)
                rhs(row) += coeff;
            else if (y >= -J)
                entries.emplace_back(row, index(y), -coeff);
        }
    }
    Eigen::SparseMatrix<double> matrix(n, n);
    matrix.setFromTriplets(entries.begin(), entries.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(matrix);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("hitting system factorization failed");
    const Eigen::VectorXd h = lu.solve(rhs);

    const auto& a = sys.coefficients;
    HittingEstimate out;
    out.nu_minus1 = h(index(1));
    out.nu1 = h(index(-1));
    out.nu0 = a[3] * out.nu_minus1 + a[2] + a[1] * out.nu1 + a[0] * h(index(-2));
    return out;
}

} // namespace detail

/// Solves the truncated hitting system at J and 2J.
inline HittingEstimate hitting_system(const DiscreteQueueSpec& spec, std::size_t J)
{
    if (J < 50)
        throw parameter_error(fmt::format("truncation J must be >= 50, got {}", J));
    HittingEstimate out = detail::solve_hitting(nu_system(spec, J));
    const HittingEstimate wide = detail::solve_hitting(nu_system(spec, 2 * J));
    out.truncation_shift = std::max({std::abs(out.nu0 - wide.nu0), std::abs(out.nu1 - wide.nu1),
                                     std::abs(out.nu_minus1 - wide.nu_minus1)});
    if (out.truncation_shift > truncation_shift_tolerance)
        throw tolerance_not_met(
            fmt::format("hitting system moved by {:.3g} between J={} and J={}", out.truncation_shift, J, 2 * J));
    return out;
}

/// P{max over arrival epochs in [0, x] of L_sys <= m} for M/M/c from empty.
/// L_sys at an arrival is N(t-), so the event is {max N over [0, x] <= m + 1}:
/// survival of the birth-death chain killed on reaching m + 2. The generator
/// is symmetrized and diagonalized, so any c works.
inline double mmc_max_sys_cdf_exact(const ContinuousQueueSpec& spec, double x, std::int64_t m)
{
    validate(spec);
    if (!(x > 0.0))
        throw parameter_error("horizon x must be > 0");
    if (m < 0)
        return 0.0;
    const auto k = static_cast<Eigen::Index>(m + 2);  // live states 0..m+1
    Eigen::MatrixXd sym = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd root_pi(k);  // sqrt of the unnormalized stationary weights
    root_pi(0) = 1.0;
    for (Eigen::Index i = 0; i < k; ++i) {
        const double down = static_cast<double>(std::min<Eigen::Index>(i, spec.c)) * spec.mu;
        sym(i, i) = -(spec.lambda + down);
        if (i + 1 < k) {
            const double up_next = static_cast<double>(std::min<Eigen::Index>(i + 1, spec.c)) * spec.mu;
            sym(i, i + 1) = sym(i + 1, i) = std::sqrt(spec.lambda * up_next);
            root_pi(i + 1) = root_pi(i) * std::sqrt(spec.lambda / up_next);
        }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    const Eigen::VectorXd weights = eig.eigenvectors().transpose() * root_pi;
    double survival = 0.0;
    for (Eigen::Index j = 0; j < k; ++j)
        survival += eig.eigenvectors()(0, j) * std::exp(eig.eigenvalues()(j) * x) * weights(j);
    return std::clamp(survival, 0.0, 1.0);
}

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Fraction of walks from 0 that are back at 0 within `horizon` steps.
inline McEstimate return_prob_mc(const DiscreteQueueSpec& spec, std::uint64_t reps, std::uint64_t horizon,
                                 std::uint64_t seed)
{
    auto law = increment_law(spec);
    if (spec.servers != 2 || spec.discipline != Discipline::LasDa)
        throw unsupported_model("return probability is defined for the two-server LAS-DA queue only");
    validate(spec);
    const double total = law[0] + law[1] + law[2] + law[3];
    for (auto& w : law)
        w /= total;
    const double c0 = law[0], c1 = c0 + law[1], c2 = c1 + law[2];

    std::uint64_t returned = 0;
    for (std::uint64_t rep = 0; rep < reps; ++rep) {
        Xoshiro256 rng = make_stream(seed, rep);
        std::int64_t x = 0;
        for (std::uint64_t t = 0; t < horizon; ++t) {
            const double u = rng.uniform();
            x += u < c0 ? -2 : u < c1 ? -1 : u < c2 ? 0 : 1;
            if (x == 0) {
                ++returned;
                break;
            }
        }
    }
    const double est = static_cast<double>(returned) / static_cast<double>(reps);
    return {est, std::sqrt(est * (1.0 - est) / static_cast<double>(reps))};
}

} // namespace qmax
