// Scalar semantic primitives: entailment score, entailment distance, stable
// softmax, and Shannon entropy (natural log throughout).
//
// Everything here is a free function template over Eigen expressions, so
// callers can pass vectors, blocks, or unevaluated expressions without
// materialising temporaries.

#pragma once

#include "carol/types.hpp"

#include <cmath>
#include <string>

namespace carol {

// ============================================================================
// ENTAILMENT
// ============================================================================

// Directional agreement of statement embedding `a` with reference `b`:
//
//     entailment_score(a, b) = <a, b> / ||b||
//
// The score is asymmetric (it is the length of the projection of `a` onto
// the direction of `b`) and unbounded in general; for unit-norm inputs it
// coincides with cosine similarity.
template <typename DerivedA, typename DerivedB>
Scalar entailment_score(const Eigen::MatrixBase<DerivedA>& a,
                        const Eigen::MatrixBase<DerivedB>& b) {
    if (a.size() != b.size()) {
        throw InputError("entailment_score: dimension mismatch (" +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
    if (a.size() == 0) throw InputError("entailment_score: empty vectors");
    const Scalar nb = b.norm();
    if (nb == Scalar(0)) {
        throw DegenerateInputError("entailment_score: reference embedding has zero norm");
    }
    return a.dot(b) / nb;
}

// Symmetric dissimilarity used for all nearest-medoid decisions:
//
//     entailment_distance(a, b) = 1 - <a, b> / (||a|| ||b||)
//
// clamped to [0, 2] so floating-point noise can never push it outside the
// cosine range. Smaller distance = stronger mutual agreement; "nearest"
// always means smallest entailment_distance.
template <typename DerivedA, typename DerivedB>
Scalar entailment_distance(const Eigen::MatrixBase<DerivedA>& a,
                           const Eigen::MatrixBase<DerivedB>& b) {
    if (a.size() != b.size()) {
        throw InputError("entailment_distance: dimension mismatch (" +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
    if (a.size() == 0) throw InputError("entailment_distance: empty vectors");
    const Scalar na = a.norm();
    const Scalar nb = b.norm();
    if (na == Scalar(0) || nb == Scalar(0)) {
        throw DegenerateInputError("entailment_distance: zero-norm embedding");
    }
    const Scalar cosine = a.dot(b) / (na * nb);
    const Scalar d = Scalar(1) - cosine;
    if (d < Scalar(0)) return Scalar(0);
    if (d > Scalar(2)) return Scalar(2);
    return d;
}

// Largest value entailment_distance can attain; phantom-exemplar distances
// must sit strictly above this ceiling.
inline constexpr Scalar kMaxEntailmentDistance = 2.0;

// ============================================================================
// SOFTMAX / ENTROPY
// ============================================================================

// Numerically stable softmax: subtracts the maximum before exponentiating,
// so arbitrarily large logits cannot overflow. Output sums to 1 up to
// rounding and every entry is strictly positive for finite input.
template <typename Derived>
Vector softmax(const Eigen::MatrixBase<Derived>& logits) {
    if (logits.size() == 0) throw InputError("softmax: empty input");
    Vector x = logits.template cast<Scalar>();
    if (!x.allFinite()) throw InputError("softmax: non-finite logit");
    const Scalar m = x.maxCoeff();
    Vector e = (x.array() - m).exp();
    return e / e.sum();
}

// Shannon entropy of a probability vector, in nats, with the 0·ln 0 = 0
// convention. Entries must be nonnegative and sum to 1 within 1e-9.
template <typename Derived>
Scalar shannon_entropy(const Eigen::MatrixBase<Derived>& p) {
    if (p.size() == 0) throw InputError("shannon_entropy: empty distribution");
    Scalar sum = 0;
    Scalar h = 0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const Scalar pi = p(i);
        if (!(pi >= Scalar(0))) {  // also rejects NaN
            throw InputError("shannon_entropy: negative or non-finite mass at index " +
                             std::to_string(i));
        }
        sum += pi;
        if (pi > Scalar(0)) h -= pi * std::log(pi);
    }
    if (std::abs(sum - Scalar(1)) > Scalar(1e-9)) {
        throw InputError("shannon_entropy: mass sums to " + std::to_string(sum) +
                         ", not 1 within 1e-9");
    }
    return h;
}

// Perplexity of a distribution: exp of its Shannon entropy.
template <typename Derived>
Scalar perplexity(const Eigen::MatrixBase<Derived>& p) {
    return std::exp(shannon_entropy(p));
}

}  // namespace carol
