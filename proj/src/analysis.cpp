#include "carol/analysis.hpp"

#include "carol/chain.hpp"
#include "carol/objective.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace carol {

namespace {

constexpr std::uint64_t kReplicaStreamBase = 2;  // 0 = proposal, 1 = accept

std::string bound_variant_name(BoundVariant variant) {
    return variant == BoundVariant::TheoremStatement ? "theorem-statement"
                                                     : "coupling-derivation";
}

void validate_pool_size(std::size_t n) {
    if (n == 0) throw InputError("candidate pool must not be empty");
    if (n > kMaxCurvaturePool) {
        throw InputError("pool too large to enumerate (max " +
                         std::to_string(kMaxCurvaturePool) + " candidates)");
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Curvature
// ---------------------------------------------------------------------------

Scalar curvature_from_table(const std::vector<Scalar>& f, int n, Scalar beta) {
    if (n < 1 || static_cast<std::size_t>(n) > kMaxCurvaturePool) {
        throw InputError("curvature supports 1..12 candidates");
    }
    if (f.size() != (std::size_t(1) << n)) {
        throw InputError("objective table size must be 2^n");
    }
    if (!(beta >= 0) || !std::isfinite(beta)) {
        throw InputError("curvature beta must be finite and >= 0");
    }
    if (beta == 0) return 0.0;

    const std::uint32_t full = (std::uint32_t(1) << n) - 1;
    const auto gain = [&](int i, std::uint32_t mask) {
        const std::uint32_t bit = std::uint32_t(1) << i;
        return f[mask | bit] - f[mask];
    };

    Scalar worst = 0;
    for (std::uint32_t s = 0; s <= full; ++s) {
        for (int j = 0; j < n; ++j) {
            const std::uint32_t jbit = std::uint32_t(1) << j;
            if (s & jbit) continue;  // j must be absent from 𝒮
            Scalar sum = 0;
            for (int i = 0; i < n; ++i) {
                const Scalar diff = gain(i, s) - gain(i, s | jbit);
                sum += std::tanh(Scalar(0.5) * beta * std::abs(diff));
            }
            worst = std::max(worst, sum);
        }
    }
    return worst;
}

Scalar curvature(const Context& ctx, const CandidatePool& pool, Scalar beta) {
    validate_pool_size(pool.size());
    if (!(beta >= 0) || !std::isfinite(beta)) {
        throw InputError("curvature beta must be finite and >= 0");
    }
    if (beta == 0) return 0.0;  // tanh(0) summed
    const std::vector<Scalar> f = mutual_info_over_subsets(ctx, pool.candidates, beta);
    return curvature_from_table(f, static_cast<int>(pool.size()), beta);
}

// ---------------------------------------------------------------------------
// Theoretical bound
// ---------------------------------------------------------------------------

MixingReport mixing_bound(Scalar gamma_bar, Scalar q_min, Scalar q_max, int n, Scalar epsilon,
                          BoundVariant variant) {
    if (!(gamma_bar >= 0) || !std::isfinite(gamma_bar)) {
        throw InputError("gamma_bar must be finite and >= 0");
    }
    if (!(q_min > 0 && q_min <= q_max && q_max <= 1)) {
        throw InputError("require 0 < q_min <= q_max <= 1");
    }
    if (n < 1) throw InputError("pool size must be >= 1");
    if (!(epsilon > 0 && epsilon < 1)) throw InputError("epsilon must lie in (0,1)");

    MixingReport report;
    report.gamma_bar = gamma_bar;
    report.q_min = q_min;
    report.q_max = q_max;
    report.n = n;
    report.epsilon = epsilon;
    report.bound_variant = bound_variant_name(variant);
    report.notes.push_back(
        "statement form carries a leading n; the coupling derivation omits it -- "
        "variant selects which is evaluated");

    const Scalar denominator = q_min - q_max * gamma_bar;
    report.denominator_positive = denominator > 0;
    if (report.denominator_positive) {
        Scalar numerator = std::log(static_cast<Scalar>(n)) + std::log(Scalar(1) / epsilon);
        if (variant == BoundVariant::TheoremStatement) {
            numerator *= static_cast<Scalar>(n);
        }
        report.tau_theorem = numerator / denominator;
    } else {
        report.notes.push_back(
            "positivity condition fails (q_min <= q_max*gamma_bar); bound is vacuous");
    }
    return report;
}

MixingReport robust_mixing_bound(const RobustBoundInput& input, Scalar q_min, Scalar q_max,
                                 int n, Scalar epsilon, BoundVariant variant) {
    if (!std::isfinite(input.gamma_star) || input.gamma_star < 0) {
        throw InputError("gamma_star must be finite and >= 0");
    }
    if (!std::isfinite(input.beta) || input.beta < 0) {
        throw InputError("beta must be finite and >= 0");
    }
    if (input.m < 1) throw InputError("candidate count m must be >= 1");
    if (!(input.eta_gamma >= 0) || !std::isfinite(input.eta_gamma)) {
        throw InputError("eta_gamma must be finite and >= 0");
    }
    const Scalar gamma_hat =
        input.gamma_star + 2 * input.beta * static_cast<Scalar>(input.m) * input.eta_gamma;
    MixingReport report = mixing_bound(gamma_hat, q_min, q_max, n, epsilon, variant);
    if (input.eta_gamma > 0) {
        std::ostringstream note;
        note << "robust curvature gamma_hat = gamma_star + 2*beta*m*eta = " << gamma_hat;
        report.notes.push_back(note.str());
    }
    return report;
}

// ---------------------------------------------------------------------------
// Stationary enumeration
// ---------------------------------------------------------------------------

std::vector<Scalar> subset_objective_table(const Context& ctx, const CandidatePool& pool,
                                           Scalar beta) {
    validate_pool_size(pool.size());
    if (!(beta >= 0) || !std::isfinite(beta)) {
        throw InputError("beta must be finite and >= 0");
    }
    if (beta == 0) {
        // exp(0·F) is constant, and the Gibbs marginal at β=0 is 1/2 for
        // every site — the dynamics never consult F.
        return std::vector<Scalar>(std::size_t(1) << pool.size(), Scalar(0));
    }
    return mutual_info_over_subsets(ctx, pool.candidates, beta);
}

std::vector<Scalar> enumerate_stationary(const Context& ctx, const CandidatePool& pool,
                                         Scalar beta) {
    const std::vector<Scalar> f = subset_objective_table(ctx, pool, beta);
    const std::size_t size = f.size();
    Scalar max_bf = beta * f[0];
    for (Scalar v : f) max_bf = std::max(max_bf, beta * v);

    std::vector<Scalar> p(size);
    Scalar total = 0;
    for (std::size_t s = 0; s < size; ++s) {
        p[s] = std::exp(beta * f[s] - max_bf);
        total += p[s];
    }
    for (Scalar& v : p) v /= total;
    return p;
}

// ---------------------------------------------------------------------------
// Empirical mixing
// ---------------------------------------------------------------------------

std::vector<int> checkpoint_schedule(int max_steps) {
    if (max_steps < 1) throw InputError("max_steps must be >= 1");
    std::vector<int> steps;
    for (long long s = 1; s < max_steps; s *= 2) {
        steps.push_back(static_cast<int>(s));
    }
    steps.push_back(max_steps);
    return steps;
}

Scalar tv_distance(const std::vector<Scalar>& p, const std::vector<Scalar>& q) {
    if (p.size() != q.size()) throw InputError("TV distance requires equal supports");
    Scalar sum = 0;
    for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
    return Scalar(0.5) * sum;
}

MixingReport empirical_mixing(const Context& ctx, const CandidatePool& pool, Scalar beta,
                              Scalar epsilon, int max_steps, int replicas, std::uint64_t seed,
                              BoundVariant variant) {
    validate_pool_size(pool.size());
    if (replicas < 1000) throw InputError("replicas must be >= 1000 for TV estimation");
    if (max_steps < 1) throw InputError("max_steps must be >= 1");

    const int n = static_cast<int>(pool.size());
    const std::size_t num_states = std::size_t(1) << n;
    const std::vector<Scalar> f = subset_objective_table(ctx, pool, beta);
    const std::vector<Scalar> pi = enumerate_stationary(ctx, pool, beta);

    const QExtremes qe = q_extremes(pool);
    MixingReport report =
        mixing_bound(curvature(ctx, pool, beta), qe.q_min, qe.q_max, n, epsilon, variant);

    // Precompute acceptance probabilities per (state, site). The add/remove
    // marginal ΔF = F(S∪{i}) − F(S∖{i}) ignores the site's current bit, so
    // one table row serves both bit values.
    std::vector<Scalar> p_add(num_states * static_cast<std::size_t>(n));
    for (std::size_t s = 0; s < num_states; ++s) {
        for (int i = 0; i < n; ++i) {
            const std::uint32_t bit = std::uint32_t(1) << i;
            const Scalar delta = f[s | bit] - f[s & ~bit];
            p_add[s * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)] =
                gibbs_accept_probability(delta, beta);
        }
    }

    // Start states: exhaustive when small, otherwise a seeded random subset.
    std::vector<std::uint32_t> starts;
    if (n <= 8) {
        starts.resize(num_states);
        for (std::size_t s = 0; s < num_states; ++s) starts[s] = static_cast<std::uint32_t>(s);
    } else {
        constexpr int kRandomStarts = 32;
        Rng start_rng(seed, 1);
        for (int i = 0; i < kRandomStarts; ++i) {
            starts.push_back(static_cast<std::uint32_t>(start_rng.uniform_index(num_states)));
        }
    }

    const std::vector<int> checkpoints = checkpoint_schedule(max_steps);
    std::vector<Scalar> worst_tv(checkpoints.size(), 0);

    std::vector<double> counts(checkpoints.size() * num_states);
    std::vector<Scalar> freq(num_states);
    const std::uint64_t replicas_u = static_cast<std::uint64_t>(replicas);

    for (std::size_t start_idx = 0; start_idx < starts.size(); ++start_idx) {
        std::fill(counts.begin(), counts.end(), 0.0);
        for (int r = 0; r < replicas; ++r) {
            Rng rng(seed, kReplicaStreamBase + static_cast<std::uint64_t>(start_idx) * replicas_u +
                              static_cast<std::uint64_t>(r));
            std::uint32_t state = starts[start_idx];
            std::size_t next_ck = 0;
            for (int step = 1; step <= max_steps; ++step) {
                const std::size_t site = rng.uniform_index(static_cast<std::size_t>(n));
                const std::uint32_t bit = std::uint32_t(1) << site;
                if (rng.uniform01() <= p_add[state * static_cast<std::size_t>(n) + site]) {
                    state |= bit;
                } else {
                    state &= ~bit;
                }
                if (next_ck < checkpoints.size() && step == checkpoints[next_ck]) {
                    counts[next_ck * num_states + state] += 1.0;
                    ++next_ck;
                }
            }
        }
        for (std::size_t c = 0; c < checkpoints.size(); ++c) {
            for (std::size_t s = 0; s < num_states; ++s) {
                freq[s] = static_cast<Scalar>(counts[c * num_states + s]) /
                          static_cast<Scalar>(replicas);
            }
            worst_tv[c] = std::max(worst_tv[c], tv_distance(freq, pi));
        }
    }

    report.tv_curve.reserve(checkpoints.size());
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        report.tv_curve.emplace_back(checkpoints[c], worst_tv[c]);
        if (!report.empirical_tmix && worst_tv[c] <= epsilon) {
            report.empirical_tmix = checkpoints[c];
        }
    }
    if (!report.empirical_tmix) {
        report.notes.push_back("chain did not reach the TV target within max_steps");
    }
    return report;
}

}  // namespace carol
