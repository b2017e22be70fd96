// The semantic-entropy objective.
//
// With the trusted context Γ clustered around the response units 𝕊:
//
//   SE(Γ)      = ln |Γ|                    (uniform prior over axioms)
//   SE(Γ | 𝕊)  = H(m)                      (entropy of cluster masses)
//   I(𝕊; Γ)    = SE(Γ) - SE(Γ | 𝕊)         (surrogate mutual information)
//
// where cluster c's mass is the soft-assignment weight its hard-assigned
// axioms place on it, renormalized across clusters:
//
//   m_c ∝ Σ_{x : assigned(x) = c} p(x | S^c)
//
// Exactly duplicated medoids (bitwise-equal embeddings) are collapsed to
// their first occurrence before assignment and report mass 0, so appending a
// duplicate never moves the objective — the marginal gain of a repeated unit
// is exactly 0, not merely small.

#pragma once

#include "carol/types.hpp"

#include <vector>

namespace carol {

struct ObjectiveEval {
    Scalar se_prior;        // SE(Γ) = ln |Γ|
    Scalar se_posterior;    // SE(Γ | 𝕊)
    Scalar mutual_info;     // se_prior - se_posterior, exactly
    Vector cluster_masses;  // per-medoid normalized mass (0 at duplicates)
    Scalar beta;
};

// ln |Γ|. Throws InputError on an empty context.
Scalar semantic_entropy_prior(const Context& ctx);

// Entropy of the normalized cluster masses under hard assignment with soft
// weights at temperature beta (beta > 0). An empty medoid list is the
// uninformed limit and returns the prior, so I(∅; Γ) = 0 by construction.
Scalar semantic_entropy_posterior(const Context& ctx, const std::vector<SemanticUnit>& medoids,
                                  Scalar beta);

// Full evaluation; mutual_info == se_prior - se_posterior identically.
ObjectiveEval mutual_info(const Context& ctx, const std::vector<SemanticUnit>& medoids,
                          Scalar beta);

// One-step objective change of appending `candidate` to `state`:
//
//   ΔF = SE(Γ | state) - SE(Γ | state ⊕ candidate)
//
// with SE(Γ | ∅) := ln |Γ|. Positive when the candidate sharpens the
// clustering; exactly 0 when the candidate duplicates a unit already in the
// state.
Scalar marginal_gain(const Context& ctx, const std::vector<SemanticUnit>& state,
                     const SemanticUnit& candidate, Scalar beta);

// Objective value F(S) = I(S; Γ) for every subset S of `pool`, indexed by
// bitmask (bit i set = pool[i] included). F(∅) = 0 at index 0. Requires
// |pool| <= 20 to bound the table size.
std::vector<Scalar> mutual_info_over_subsets(const Context& ctx,
                                             const std::vector<SemanticUnit>& pool, Scalar beta);

// Mean Shannon entropy of per-position next-token distributions (each must
// be a valid probability vector; the list must be nonempty).
Scalar token_entropy(const std::vector<Vector>& distributions);

// Normalized semantic-entropy detection score in [0, 1]:
//
//   SE(Γ | units) / ln(max(κ, 2))
//
// with κ the number of distinct response units. A single-unit response
// scores 0 and a uniform split over κ >= 2 clusters scores 1.
Scalar hallucination_score(const Context& ctx, const std::vector<SemanticUnit>& units,
                           Scalar beta);

}  // namespace carol
