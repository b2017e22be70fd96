#include "carol/cluster.hpp"

#include "carol/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace carol {

namespace {

// Distance matrix D(i, j) = entailment_distance(medoid j, axiom i), rows in
// context order. Validates dimensions and nonzero norms as a side effect.
Matrix distance_matrix(const Context& ctx, const std::vector<SemanticUnit>& medoids) {
    if (ctx.axioms.empty()) throw InputError("clustering: empty context");
    if (medoids.empty()) throw InputError("clustering: no medoids given");
    Matrix d(static_cast<Eigen::Index>(ctx.size()), static_cast<Eigen::Index>(medoids.size()));
    for (std::size_t i = 0; i < ctx.size(); ++i) {
        for (std::size_t j = 0; j < medoids.size(); ++j) {
            d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                entailment_distance(medoids[j].embedding, ctx.axioms[i].embedding);
        }
    }
    return d;
}

int argmin_row(const Matrix& d, Eigen::Index row) {
    int best = 0;
    for (Eigen::Index j = 1; j < d.cols(); ++j) {
        if (d(row, j) < d(row, best)) best = static_cast<int>(j);
        // ties keep the lower index
    }
    return best;
}

Scalar comb2(Scalar n) { return n * (n - 1) / 2; }

}  // namespace

Clustering exemplar_cluster(const Context& ctx, const std::vector<SemanticUnit>& medoids) {
    const Matrix d = distance_matrix(ctx, medoids);
    Clustering out;
    out.medoids = medoids;
    for (std::size_t i = 0; i < ctx.size(); ++i) {
        out.assignment[ctx.axioms[i].id] = argmin_row(d, static_cast<Eigen::Index>(i));
    }
    return out;
}

std::map<std::string, Vector> soft_assignment(const Context& ctx,
                                              const std::vector<SemanticUnit>& medoids,
                                              Scalar beta) {
    if (!(beta > 0) || !std::isfinite(beta)) {
        throw InputError("soft_assignment: beta must be finite and > 0");
    }
    const Matrix d = distance_matrix(ctx, medoids);
    std::map<std::string, Vector> soft;
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        soft[ctx.axioms[static_cast<std::size_t>(i)].id] =
            softmax((-beta * d.row(i)).transpose());
    }
    return soft;
}

Clustering cluster_full(const Context& ctx, const std::vector<SemanticUnit>& medoids, Scalar beta) {
    Clustering out = exemplar_cluster(ctx, medoids);
    out.soft = soft_assignment(ctx, medoids, beta);
    out.beta = beta;
    return out;
}

Scalar facility_location_value(const Context& ctx, const std::vector<SemanticUnit>& selected,
                               Scalar phantom_distance) {
    if (ctx.axioms.empty()) throw InputError("facility_location_value: empty context");
    if (!(phantom_distance > kMaxEntailmentDistance)) {
        throw InputError("facility_location_value: phantom distance must exceed 2");
    }
    if (selected.empty()) return 0.0;  // min over {e0} alone: every term is 0

    Scalar total = 0;
    for (const Axiom& ax : ctx.axioms) {
        Scalar nearest = phantom_distance;
        for (const SemanticUnit& s : selected) {
            nearest = std::min(nearest, entailment_distance(s.embedding, ax.embedding));
        }
        total += phantom_distance - nearest;
    }
    return total / static_cast<Scalar>(ctx.size());
}

std::vector<std::size_t> greedy_medoid_indices(const Context& ctx,
                                               const std::vector<SemanticUnit>& candidates,
                                               std::size_t k, Scalar phantom_distance) {
    if (candidates.empty()) throw InputError("greedy_medoids: no candidates");
    if (k == 0 || k > candidates.size()) {
        throw InputError("greedy_medoids: k must be in [1, #candidates]");
    }
    if (!(phantom_distance > kMaxEntailmentDistance)) {
        throw InputError("greedy_medoids: phantom distance must exceed 2");
    }

    const Matrix d = distance_matrix(ctx, candidates);
    const auto n = static_cast<Eigen::Index>(ctx.size());

    // nearest[i] = distance from axiom i to its closest selected unit, with
    // the phantom exemplar as the initial cover.
    Vector nearest = Vector::Constant(n, phantom_distance);
    std::vector<bool> taken(candidates.size(), false);
    std::vector<std::size_t> picks;
    picks.reserve(k);

    for (std::size_t round = 0; round < k; ++round) {
        std::size_t best = candidates.size();
        Scalar best_gain = -1;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (taken[c]) continue;
            Scalar gain = 0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const Scalar di = d(i, static_cast<Eigen::Index>(c));
                if (di < nearest(i)) gain += nearest(i) - di;
            }
            gain /= static_cast<Scalar>(n);
            if (gain > best_gain) {  // strict: ties keep the lower index
                best_gain = gain;
                best = c;
            }
        }
        taken[best] = true;
        picks.push_back(best);
        for (Eigen::Index i = 0; i < n; ++i) {
            nearest(i) = std::min(nearest(i), d(i, static_cast<Eigen::Index>(best)));
        }
    }
    return picks;
}

std::vector<SemanticUnit> greedy_medoids(const Context& ctx,
                                         const std::vector<SemanticUnit>& candidates,
                                         std::size_t k, Scalar phantom_distance) {
    std::vector<SemanticUnit> out;
    out.reserve(k);
    for (std::size_t i : greedy_medoid_indices(ctx, candidates, k, phantom_distance)) {
        out.push_back(candidates[i]);
    }
    return out;
}

PartitionAgreement partition_agreement(const std::map<std::string, int>& a,
                                       const std::map<std::string, int>& b) {
    if (a.empty()) throw InputError("partition_agreement: empty partitions");
    if (a.size() != b.size()) throw InputError("partition_agreement: element sets differ in size");
    for (const auto& [key, unused] : a) {
        (void)unused;
        if (b.find(key) == b.end()) {
            throw InputError("partition_agreement: element missing from second partition: " + key);
        }
    }

    // Contingency table over (label_a, label_b) pairs.
    std::map<int, Scalar> count_a, count_b;
    std::map<std::pair<int, int>, Scalar> joint;
    for (const auto& [key, la] : a) {
        const int lb = b.at(key);
        count_a[la] += 1;
        count_b[lb] += 1;
        joint[{la, lb}] += 1;
    }
    const Scalar n = static_cast<Scalar>(a.size());

    // --- Adjusted Rand index -------------------------------------------------
    Scalar sum_joint = 0, sum_a = 0, sum_b = 0;
    for (const auto& [k2, v] : joint) {
        (void)k2;
        sum_joint += comb2(v);
    }
    for (const auto& [k2, v] : count_a) {
        (void)k2;
        sum_a += comb2(v);
    }
    for (const auto& [k2, v] : count_b) {
        (void)k2;
        sum_b += comb2(v);
    }
    PartitionAgreement out{};
    if (n < 2) {
        out.ari = 1.0;  // one element: the partitions are trivially identical
    } else {
        const Scalar expected = sum_a * sum_b / comb2(n);
        const Scalar maximum = (sum_a + sum_b) / 2;
        const Scalar denom = maximum - expected;
        // denom only vanishes when both partitions are all-singletons or both
        // are a single cluster, i.e. they are identical.
        out.ari = (std::abs(denom) < 1e-15) ? 1.0 : (sum_joint - expected) / denom;
    }

    // --- Normalized mutual information ---------------------------------------
    auto label_entropy = [n](const std::map<int, Scalar>& counts) {
        Scalar h = 0;
        for (const auto& [k2, v] : counts) {
            (void)k2;
            const Scalar p = v / n;
            if (p > 0) h -= p * std::log(p);
        }
        return h;
    };
    const Scalar ha = label_entropy(count_a);
    const Scalar hb = label_entropy(count_b);
    if (ha == 0 && hb == 0) {
        out.nmi = 1.0;  // both single-cluster over the same elements
    } else {
        Scalar mi = 0;
        for (const auto& [labels, v] : joint) {
            const Scalar pij = v / n;
            const Scalar pa = count_a.at(labels.first) / n;
            const Scalar pb = count_b.at(labels.second) / n;
            if (pij > 0) mi += pij * std::log(pij / (pa * pb));
        }
        out.nmi = std::clamp(mi / ((ha + hb) / 2), 0.0, 1.0);
    }
    return out;
}

}  // namespace carol
