#include "carol/chain.hpp"

#include "carol/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace carol {

namespace {

constexpr std::uint64_t kAcceptStream = 1;  // proposal owns stream 0

void validate_config(const ChainConfig& cfg) {
    if (!(cfg.beta > 0) || !std::isfinite(cfg.beta)) {
        throw InputError("chain beta must be finite and > 0");
    }
    if (cfg.t_max < 0) throw InputError("t_max must be >= 0");
    if (!(cfg.epsilon > 0 && cfg.epsilon < 1)) throw InputError("epsilon must lie in (0,1)");
    if (cfg.tau_override && *cfg.tau_override < 1) {
        throw InputError("tau_override must be >= 1 when set");
    }
}

// Derives the iteration budget τ and its provenance. Pool-backed proposals
// get the theoretical mixing bound when it is available and non-vacuous;
// everything else falls back to t_max.
std::pair<int, std::string> derive_tau(const Context& ctx, const ProposalSource& proposal,
                                       const ChainConfig& cfg,
                                       std::vector<std::string>& warnings) {
    if (cfg.tau_override) return {*cfg.tau_override, "override"};
    const CandidatePool* pool = proposal.pool();
    if (pool == nullptr) return {cfg.t_max, "t_max"};
    if (pool->size() > kMaxCurvaturePool) {
        warnings.push_back("pool too large for the curvature bound; tau falls back to t_max");
        return {cfg.t_max, "t_max"};
    }
    const Scalar gamma = curvature(ctx, *pool, cfg.beta);
    const QExtremes qe = q_extremes(*pool);
    const MixingReport report =
        mixing_bound(gamma, qe.q_min, qe.q_max, static_cast<int>(pool->size()), cfg.epsilon,
                     BoundVariant::TheoremStatement);
    if (!report.denominator_positive || !report.tau_theorem) {
        warnings.push_back(
            "mixing-bound denominator is not positive (curvature too large); "
            "tau falls back to t_max");
        return {cfg.t_max, "t_max"};
    }
    int tau = static_cast<int>(std::ceil(*report.tau_theorem));
    if (tau > cfg.t_max) {
        warnings.push_back("theoretical step budget exceeds t_max; truncating");
    }
    return {tau, "theorem"};
}

}  // namespace

ChainResult run_chain(const std::string& query, const Context& ctx, ProposalSource& proposal,
                      const ChainConfig& cfg) {
    validate_config(cfg);
    if (ctx.axioms.empty()) throw InputError("context must not be empty");

    ChainResult result;
    result.state.query = query;

    auto [tau, tau_source] = derive_tau(ctx, proposal, cfg, result.warnings);
    result.tau_source = tau_source;
    const int horizon = std::min(cfg.t_max, tau);
    result.tau_used = horizon;

    Rng accept_rng(cfg.seed, kAcceptStream);
    const ProposalView view{result.state.query, result.state.accepted, result.state.revisions};

    for (int t = 1; t <= horizon; ++t) {
        SemanticUnit candidate;
        try {
            candidate = proposal.propose(view);
        } catch (const ProviderError& e) {
            throw ChainAbortError(
                "proposal failed at step " + std::to_string(t) + ": " + e.what(), e.status_code,
                std::move(result.state), std::move(result.trace));
        } catch (const Error& e) {
            throw ChainAbortError(
                "proposal failed at step " + std::to_string(t) + ": " + e.what(), 0,
                std::move(result.state), std::move(result.trace));
        }

        StepRecord rec;
        rec.step = t;
        rec.candidate = candidate;
        rec.delta_f = marginal_gain(ctx, result.state.accepted, candidate, cfg.beta);
        rec.p_add = gibbs_accept_probability(rec.delta_f, cfg.beta);
        rec.z = accept_rng.uniform01();
        rec.accepted = (rec.z <= rec.p_add);
        if (rec.accepted) {
            SemanticUnit kept = candidate;
            kept.origin = UnitOrigin::Accepted;
            result.state.accepted.push_back(std::move(kept));
        } else {
            result.state.revisions.push_back(cfg.revision_directive);
            rec.revision_applied = cfg.revision_directive;
        }
        result.state.step = t;
        result.trace.push_back(std::move(rec));
    }

    result.final_eval = mutual_info(ctx, result.state.accepted, cfg.beta);
    return result;
}

// ---------------------------------------------------------------------------
// SubsetGibbsSampler
// ---------------------------------------------------------------------------

SubsetGibbsSampler::SubsetGibbsSampler(const Scalar* f_table, int n, Scalar beta,
                                       std::uint32_t start, std::uint64_t seed,
                                       std::uint64_t stream)
    : f_(f_table), n_(n), beta_(beta), state_(start), rng_(seed, stream) {
    if (f_table == nullptr) throw InputError("objective table must not be null");
    if (n < 1 || n > 20) throw InputError("subset sampler supports 1..20 candidates");
    if (!(beta >= 0) || !std::isfinite(beta)) {
        throw InputError("sampler beta must be finite and >= 0");
    }
    if (start >= (std::uint32_t(1) << n)) throw InputError("start state out of range");
}

std::uint32_t SubsetGibbsSampler::step() {
    const std::size_t site = rng_.uniform_index(static_cast<std::size_t>(n_));
    const std::uint32_t bit = std::uint32_t(1) << site;
    // Add/remove marginal: ΔF = F(S∪{i}) − F(S∖{i}), independent of the
    // site's current bit.
    const Scalar delta = f_[state_ | bit] - f_[state_ & ~bit];
    const Scalar p_add = gibbs_accept_probability(delta, beta_);
    if (rng_.uniform01() <= p_add) {
        state_ |= bit;
    } else {
        state_ &= ~bit;
    }
    return state_;
}

// ---------------------------------------------------------------------------
// String-submodularity audit
// ---------------------------------------------------------------------------

std::vector<SubmodularityViolation> check_string_submodularity(const Context& ctx,
                                                               const CandidatePool& pool,
                                                               Scalar beta) {
    constexpr std::size_t kMaxPool = 8;
    constexpr Scalar kTol = 1e-12;
    const std::size_t n = pool.size();
    if (n == 0) throw InputError("candidate pool must not be empty");
    if (n > kMaxPool) {
        throw InputError("submodularity audit supports at most 8 candidates");
    }

    const std::vector<Scalar> f = mutual_info_over_subsets(ctx, pool.candidates, beta);
    const std::uint32_t full = (std::uint32_t(1) << n) - 1;

    std::vector<SubmodularityViolation> violations;
    for (std::uint32_t super = 0; super <= full; ++super) {
        // Walk all strict submasks of `super` (and the empty set).
        std::uint32_t base = super;
        while (true) {
            base = (base - 1) & super;
            for (std::size_t s = 0; s < n; ++s) {
                const std::uint32_t bit = std::uint32_t(1) << s;
                if (super & bit) continue;
                const Scalar gain_base = f[base | bit] - f[base];
                const Scalar gain_super = f[super | bit] - f[super];
                const Scalar slack = gain_base - gain_super;
                if (slack < -kTol) {
                    violations.push_back(SubmodularityViolation{base, super, static_cast<int>(s),
                                                                gain_base, gain_super, slack});
                }
            }
            if (base == 0) break;
        }
    }
    return violations;
}

}  // namespace carol
