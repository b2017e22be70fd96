// Mixing-time machinery for the subset Gibbs chain: the curvature constant
// γ̄, the theoretical mixing bound τ(ε) with its positivity condition, the
// robust bound under uniform MI perturbation, exact stationary enumeration
// p(S) ∝ exp(βF(S)), and empirical mixing via multi-start replica
// simulation.

#pragma once

#include "carol/context.hpp"
#include "carol/proposal.hpp"
#include "carol/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace carol {

// Largest pool for which curvature / stationary enumeration is attempted.
inline constexpr std::size_t kMaxCurvaturePool = 12;

// Which written form of the mixing bound to evaluate. The theorem statement
// carries a leading n; the coupling derivation ends without it. The
// statement form is the default (more conservative).
enum class BoundVariant {
    TheoremStatement,    // τ = n·(ln n + ln 1/ε) / (q_min − q_max·γ̄)
    CouplingDerivation,  // τ =    (ln n + ln 1/ε) / (q_min − q_max·γ̄)
};

struct MixingReport {
    Scalar gamma_bar = 0;  // curvature constant γ̄ (≥ 0)
    Scalar q_min = 0;      // smallest proposal probability
    Scalar q_max = 0;      // largest proposal probability
    int n = 0;             // pool size
    Scalar epsilon = 0;    // TV target
    bool denominator_positive = false;       // q_min − q_max·γ̄ > 0
    std::optional<Scalar> tau_theorem;       // present iff denominator_positive
    std::string bound_variant;               // "theorem-statement" | "coupling-derivation"
    std::optional<int> empirical_tmix;       // first checkpoint with TV ≤ ε
    std::vector<std::pair<int, Scalar>> tv_curve;  // (step, worst-start TV)
    std::vector<std::string> notes;          // metadata, incl. the n-factor discrepancy
};

// Inputs for the perturbed-curvature bound γ̂ = γ* + 2βmη_Γ.
struct RobustBoundInput {
    Scalar gamma_star;  // curvature measured on the nominal Γ
    Scalar beta;
    int m;              // candidate count (≥ 1)
    Scalar eta_gamma;   // uniform MI perturbation bound (≥ 0)
};

// Curvature constant: max over subset states 𝒮 of the pool and absent
// candidates j of Σ_i tanh((β/2)·|ΔF(i|𝒮) − ΔF(i|𝒮∪j)|). β=0 → exactly 0.
Scalar curvature(const Context& ctx, const CandidatePool& pool, Scalar beta);

// Same computation driven by a precomputed objective table f (size 2^n);
// exposed for oracle-style cross-checks.
Scalar curvature_from_table(const std::vector<Scalar>& f, int n, Scalar beta);

// Theoretical bound. Emits τ iff the positivity condition q_min − q_max·γ̄ > 0
// holds; always records the statement-vs-derivation n-factor note.
MixingReport mixing_bound(Scalar gamma_bar, Scalar q_min, Scalar q_max, int n, Scalar epsilon,
                          BoundVariant variant = BoundVariant::TheoremStatement);

// mixing_bound with γ̄ := gamma_star + 2·beta·m·eta_gamma. At eta_gamma = 0
// the result is bit-identical to mixing_bound(gamma_star, …).
MixingReport robust_mixing_bound(const RobustBoundInput& input, Scalar q_min, Scalar q_max,
                                 int n, Scalar epsilon,
                                 BoundVariant variant = BoundVariant::TheoremStatement);

// Exact stationary distribution over the 2^n pool subsets: p(S) ∝ exp(βF(S))
// with F = mutual information and F(∅) := 0. Index = subset bitmask.
std::vector<Scalar> enumerate_stationary(const Context& ctx, const CandidatePool& pool,
                                         Scalar beta);

// Objective table for the subset dynamics: f[mask] = I(S_mask; Γ), f[0] = 0.
// β=0 yields an all-zero table (the dynamics never consult F at β=0).
std::vector<Scalar> subset_objective_table(const Context& ctx, const CandidatePool& pool,
                                           Scalar beta);

// Simulates the remove-enabled Gibbs chain from worst-case starts (all 2^n
// when n ≤ 8, else 32 seeded random starts), estimating TV distance to the
// exact stationary distribution at geometric checkpoints. empirical_tmix is
// the first checkpoint whose worst-start TV ≤ epsilon; absent when the chain
// has not converged within max_steps (curve still attached). Fills the
// theoretical fields as well so one report carries both parts.
MixingReport empirical_mixing(const Context& ctx, const CandidatePool& pool, Scalar beta,
                              Scalar epsilon, int max_steps, int replicas,
                              std::uint64_t seed = 0,
                              BoundVariant variant = BoundVariant::TheoremStatement);

// Distinct states a replica's trajectory is sampled at: 1, 2, 4, … capped at
// and always including max_steps.
std::vector<int> checkpoint_schedule(int max_steps);

// Total-variation distance between two distributions over the same support.
Scalar tv_distance(const std::vector<Scalar>& p, const std::vector<Scalar>& q);

}  // namespace carol
