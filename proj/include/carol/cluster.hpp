// Exemplar clustering of the trusted context around generated statements,
// the facility-location set function driving greedy medoid selection, and
// partition-agreement scores (ARI / NMI) for comparing clusterings.

#pragma once

#include "carol/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace carol {

// A clustering of Γ around a medoid list. `assignment` maps axiom id to the
// index of its nearest medoid (entailment_distance, ties to the lowest
// index). `soft` maps axiom id to its distribution over the κ medoids when a
// temperature was supplied; with the shared distance convention the hard
// assignment is always the argmax of the soft row.
struct Clustering {
    std::vector<SemanticUnit> medoids;
    std::map<std::string, int> assignment;
    std::map<std::string, Vector> soft;
    std::optional<Scalar> beta;
};

// Hard nearest-medoid assignment of every axiom. Preconditions: at least one
// medoid, embeddings of matching dimension and nonzero norm. Deterministic:
// identical inputs always produce identical assignments.
Clustering exemplar_cluster(const Context& ctx, const std::vector<SemanticUnit>& medoids);

// Soft assignment p(x | S^i) = softmax_i(-beta * entailment_distance(S^i, x)),
// one probability vector per axiom id. beta must be finite and > 0; small
// beta flattens toward uniform, large beta approaches the hard one-hot.
std::map<std::string, Vector> soft_assignment(const Context& ctx,
                                              const std::vector<SemanticUnit>& medoids,
                                              Scalar beta);

// Hard + soft in one Clustering (what the `cluster` subcommand emits).
Clustering cluster_full(const Context& ctx, const std::vector<SemanticUnit>& medoids, Scalar beta);

// Facility-location coverage value of a medoid set:
//
//   f(S) = (1/|Γ|) Σ_x [ d(x, e0) - min_{s in S ∪ {e0}} d(x, s) ]
//
// where e0 is a phantom exemplar at fixed distance `phantom_distance` from
// every axiom. The phantom sits strictly above the entailment_distance
// ceiling of 2, which makes f normalized (f(∅) = 0, exactly), monotone, and
// submodular.
inline constexpr Scalar kPhantomDistance = 2.5;
Scalar facility_location_value(const Context& ctx, const std::vector<SemanticUnit>& selected,
                               Scalar phantom_distance = kPhantomDistance);

// Greedy maximization of facility_location_value over `candidates`: k rounds,
// each adding the unselected candidate with the largest marginal gain (ties
// to the lowest candidate index). Indices are reported in pick order;
// greedy_medoids returns the corresponding units.
std::vector<std::size_t> greedy_medoid_indices(const Context& ctx,
                                               const std::vector<SemanticUnit>& candidates,
                                               std::size_t k,
                                               Scalar phantom_distance = kPhantomDistance);
std::vector<SemanticUnit> greedy_medoids(const Context& ctx,
                                         const std::vector<SemanticUnit>& candidates,
                                         std::size_t k,
                                         Scalar phantom_distance = kPhantomDistance);

// Agreement between two hard partitions of the same element set.
//   ari: adjusted Rand index (1 = identical, 0 ≈ chance, negative = worse
//        than chance).
//   nmi: mutual information normalized by the arithmetic mean of the label
//        entropies; two single-cluster partitions agree perfectly (1.0), a
//        single-cluster partition against a split one scores 0.0.
struct PartitionAgreement {
    Scalar ari;
    Scalar nmi;
};
PartitionAgreement partition_agreement(const std::map<std::string, int>& a,
                                       const std::map<std::string, int>& b);

}  // namespace carol
