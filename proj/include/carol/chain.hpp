// The accept–reject chain: assemble ℓ-grams from a proposal source, score
// each candidate by its marginal surrogate-MI gain, accept with the Gibbs
// probability exp(βΔF)/(1+exp(βΔF)), and rewire via a revision directive on
// rejection. Also hosts the remove-enabled subset Gibbs sampler used by the
// stationarity analysis and the string-submodularity audit.

#pragma once

#include "carol/context.hpp"
#include "carol/objective.hpp"
#include "carol/proposal.hpp"
#include "carol/rng.hpp"
#include "carol/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace carol {

// Accept probability for a candidate with marginal gain delta_f at inverse
// temperature beta. Overflow-safe logistic; total on finite inputs.
inline Scalar gibbs_accept_probability(Scalar delta_f, Scalar beta) {
    const Scalar x = beta * delta_f;
    if (x >= 0) {
        return Scalar(1) / (Scalar(1) + std::exp(-x));
    }
    const Scalar e = std::exp(x);
    return e / (Scalar(1) + e);
}

struct ChainConfig {
    Scalar beta = 1.0;            // inverse temperature in p(S) ∝ exp(βF(S))
    int t_max = 64;               // iteration cap (0 allowed: no-op chain)
    Scalar epsilon = 0.05;        // TV target used when deriving τ
    std::optional<int> tau_override;  // skip τ derivation when set (> 0)
    std::uint64_t seed = 0;
    // Directive appended to the prompt state when a candidate is rejected.
    std::string revision_directive = "Revise the previous statement as it is not contrasted.";
};

// Mutable state threaded through the chain.
struct ChainState {
    std::string query;
    std::vector<SemanticUnit> accepted;  // acceptance order preserved
    std::vector<std::string> revisions;  // directives issued on rejections
    int step = 0;                        // completed iterations
};

// One iteration of the chain, sufficient to replay the decision.
struct StepRecord {
    int step;                 // 1-based iteration index
    SemanticUnit candidate;   // as proposed (origin "proposed")
    Scalar delta_f;           // marginal MI gain of the candidate
    Scalar p_add;             // logistic acceptance probability
    Scalar z;                 // uniform draw in [0,1)
    bool accepted;
    std::optional<std::string> revision_applied;  // set iff rejected
};

struct ChainResult {
    ChainState state;               // final state (accepted units, revisions)
    std::vector<StepRecord> trace;  // one record per iteration
    ObjectiveEval final_eval;       // objective at the final accepted set
    int tau_used = 0;               // effective iteration budget
    std::string tau_source;         // "override" | "theorem" | "t_max"
    std::vector<std::string> warnings;

    // The response 𝕊: accepted units in order (state minus the query).
    const std::vector<SemanticUnit>& response() const { return state.accepted; }
};

// Thrown when the proposal source fails mid-chain; carries the work done so
// far so callers can persist a partial trace.
class ChainAbortError : public ProviderError {
public:
    ChainAbortError(const std::string& what, int status, ChainState state,
                    std::vector<StepRecord> trace)
        : ProviderError(what, status), state_(std::move(state)), trace_(std::move(trace)) {}

    const ChainState& state() const { return state_; }
    const std::vector<StepRecord>& partial_trace() const { return trace_; }

private:
    ChainState state_;
    std::vector<StepRecord> trace_;
};

// Runs the chain for t = 1..min(t_max, τ): propose, score, accept/reject,
// rewire. τ comes from tau_override when set, else from the mixing-time
// bound when the proposal exposes a pool (falling back to t_max with a
// warning when the bound is unavailable or vacuous), else t_max.
ChainResult run_chain(const std::string& query, const Context& ctx, ProposalSource& proposal,
                      const ChainConfig& cfg);

// ---------------------------------------------------------------------------
// Remove-enabled subset Gibbs dynamics
// ---------------------------------------------------------------------------

// Single-site Gibbs sampler over subsets of n candidates, driven by a
// precomputed objective table f of size 2^n (f[mask] = F of that subset).
// Each step picks a site uniformly and sets its bit with probability
// logistic(β·(F(S∪{i}) − F(S∖{i}))) — the add/remove marginal, independent
// of the site's current bit. Stationary distribution: p(S) ∝ exp(βF(S)).
class SubsetGibbsSampler {
public:
    SubsetGibbsSampler(const Scalar* f_table, int n, Scalar beta, std::uint32_t start,
                       std::uint64_t seed, std::uint64_t stream);

    // Advances one step; returns the new state mask.
    std::uint32_t step();

    std::uint32_t state() const { return state_; }

private:
    const Scalar* f_;
    int n_;
    Scalar beta_;
    std::uint32_t state_;
    Rng rng_;
};

// ---------------------------------------------------------------------------
// String-submodularity audit
// ---------------------------------------------------------------------------

// A quadruple (base ⪯ super, candidate) violating the diminishing-returns
// inequality gain(candidate | base) ≥ gain(candidate | super).
struct SubmodularityViolation {
    std::uint32_t base_mask;
    std::uint32_t super_mask;
    int candidate;      // pool index of s
    Scalar gain_base;   // ΔF(s | base)
    Scalar gain_super;  // ΔF(s | super)
    Scalar slack;       // gain_base − gain_super (negative ⇒ violation)
};

// Exhaustively checks gain(s|A) ≥ gain(s|B) for all A ⊆ B ⊆ pool, s ∉ B,
// under F = mutual information. The objective is permutation-invariant, so
// subset pairs cover every prefix pair of every pool ordering. |pool| ≤ 8.
std::vector<SubmodularityViolation> check_string_submodularity(const Context& ctx,
                                                               const CandidatePool& pool,
                                                               Scalar beta);

}  // namespace carol
