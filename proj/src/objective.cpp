#include "carol/objective.hpp"

#include "carol/cluster.hpp"
#include "carol/semantics.hpp"

#include <cmath>
#include <vector>

namespace carol {

namespace {

// Indices of the first occurrence of each distinct embedding (bitwise
// comparison), plus for every original index the slot it collapsed into.
struct Dedup {
    std::vector<std::size_t> keep;      // original indices of distinct medoids
    std::vector<std::size_t> slot_of;   // original index -> position in keep
};

Dedup dedup_medoids(const std::vector<SemanticUnit>& medoids) {
    Dedup d;
    d.slot_of.resize(medoids.size());
    for (std::size_t i = 0; i < medoids.size(); ++i) {
        bool found = false;
        for (std::size_t k = 0; k < d.keep.size(); ++k) {
            const Vector& a = medoids[d.keep[k]].embedding;
            const Vector& b = medoids[i].embedding;
            if (a.size() == b.size() && a == b) {
                d.slot_of[i] = k;
                found = true;
                break;
            }
        }
        if (!found) {
            d.slot_of[i] = d.keep.size();
            d.keep.push_back(i);
        }
    }
    return d;
}

// Normalized cluster-mass vector over the ORIGINAL medoid indices (zeros at
// duplicate positions).
Vector cluster_masses(const Context& ctx, const std::vector<SemanticUnit>& medoids, Scalar beta) {
    const Dedup d = dedup_medoids(medoids);
    std::vector<SemanticUnit> distinct;
    distinct.reserve(d.keep.size());
    for (std::size_t i : d.keep) distinct.push_back(medoids[i]);

    const Clustering hard = exemplar_cluster(ctx, distinct);
    const std::map<std::string, Vector> soft = soft_assignment(ctx, distinct, beta);

    Vector mass = Vector::Zero(static_cast<Eigen::Index>(medoids.size()));
    for (const Axiom& ax : ctx.axioms) {
        const int c = hard.assignment.at(ax.id);
        mass(static_cast<Eigen::Index>(d.keep[static_cast<std::size_t>(c)])) += soft.at(ax.id)(c);
    }
    const Scalar total = mass.sum();
    if (total <= 0) throw DegenerateInputError("cluster masses sum to zero");
    return mass / total;
}

}  // namespace

Scalar semantic_entropy_prior(const Context& ctx) {
    if (ctx.axioms.empty()) throw InputError("semantic_entropy_prior: empty context");
    return std::log(static_cast<Scalar>(ctx.size()));
}

Scalar semantic_entropy_posterior(const Context& ctx, const std::vector<SemanticUnit>& medoids,
                                  Scalar beta) {
    if (medoids.empty()) return semantic_entropy_prior(ctx);
    if (!(beta > 0)) throw InputError("semantic_entropy_posterior: beta must be > 0");
    return shannon_entropy(cluster_masses(ctx, medoids, beta));
}

ObjectiveEval mutual_info(const Context& ctx, const std::vector<SemanticUnit>& medoids,
                          Scalar beta) {
    ObjectiveEval eval{};
    eval.beta = beta;
    eval.se_prior = semantic_entropy_prior(ctx);
    if (medoids.empty()) {
        eval.se_posterior = eval.se_prior;
        eval.cluster_masses = Vector();
    } else {
        if (!(beta > 0)) throw InputError("mutual_info: beta must be > 0");
        eval.cluster_masses = cluster_masses(ctx, medoids, beta);
        eval.se_posterior = shannon_entropy(eval.cluster_masses);
    }
    eval.mutual_info = eval.se_prior - eval.se_posterior;
    return eval;
}

Scalar marginal_gain(const Context& ctx, const std::vector<SemanticUnit>& state,
                     const SemanticUnit& candidate, Scalar beta) {
    // A candidate that exactly duplicates a state unit collapses to it, so
    // both entropies are computed from identical inputs: return 0 without
    // touching floating point.
    for (const SemanticUnit& s : state) {
        if (s.embedding.size() == candidate.embedding.size() &&
            s.embedding == candidate.embedding) {
            return 0.0;
        }
    }
    const Scalar before = semantic_entropy_posterior(ctx, state, beta);
    std::vector<SemanticUnit> extended = state;
    extended.push_back(candidate);
    return before - semantic_entropy_posterior(ctx, extended, beta);
}

std::vector<Scalar> mutual_info_over_subsets(const Context& ctx,
                                             const std::vector<SemanticUnit>& pool, Scalar beta) {
    if (pool.empty()) throw InputError("mutual_info_over_subsets: empty pool");
    if (pool.size() > 20) {
        throw InputError("mutual_info_over_subsets: pool too large (max 20 units)");
    }
    const std::size_t n = pool.size();
    std::vector<Scalar> f(std::size_t{1} << n);
    f[0] = 0.0;
    std::vector<SemanticUnit> subset;
    for (std::size_t mask = 1; mask < f.size(); ++mask) {
        subset.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (std::size_t{1} << i)) subset.push_back(pool[i]);
        }
        f[mask] = mutual_info(ctx, subset, beta).mutual_info;
    }
    return f;
}

Scalar token_entropy(const std::vector<Vector>& distributions) {
    if (distributions.empty()) throw InputError("token_entropy: no distributions");
    Scalar total = 0;
    for (const Vector& p : distributions) total += shannon_entropy(p);
    return total / static_cast<Scalar>(distributions.size());
}

Scalar hallucination_score(const Context& ctx, const std::vector<SemanticUnit>& units,
                           Scalar beta) {
    if (units.empty()) throw InputError("hallucination_score: no response units");
    const std::size_t distinct = dedup_medoids(units).keep.size();
    const Scalar se = semantic_entropy_posterior(ctx, units, beta);
    return se / std::log(static_cast<Scalar>(std::max<std::size_t>(distinct, 2)));
}

}  // namespace carol
