// Detection harness: confusion-matrix metrics, ROC/AUC threshold sweep, the
// synthetic labeled corpus generator (grounded vs confabulated answer shapes
// with word noise and simulated next-token distributions), and the frozen
// fixture sentence banks used across tests.

#pragma once

#include "carol/context.hpp"
#include "carol/embed.hpp"
#include "carol/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace carol {

// Extended classification metrics. Rates that are 0/0 are absent, not 0.
struct DetectionMetrics {
    long long tp = 0;
    long long tn = 0;
    long long fp = 0;
    long long fn = 0;
    Scalar accuracy = 0;
    std::optional<Scalar> precision;
    std::optional<Scalar> recall;       // = TPR, sensitivity
    std::optional<Scalar> specificity;  // = TNR
    std::optional<Scalar> f1;
    std::optional<Scalar> fpr;
    std::optional<Scalar> auc;                // filled by threshold-sweep evaluation
    std::optional<Scalar> chosen_threshold;   // threshold behind the counts, when swept
};

// Exact counts and derived rates for boolean labels/predictions
// (true = hallucinated = positive class).
DetectionMetrics confusion_metrics(const std::vector<bool>& labels,
                                   const std::vector<bool>& predictions);

struct RocPoint {
    Scalar threshold;  // predict positive when score >= threshold
    Scalar fpr;
    Scalar tpr;
};

struct RocResult {
    std::vector<RocPoint> points;  // sorted by descending threshold
    Scalar auc = 0;
};

// Standard ROC construction: thresholds are all unique scores plus ±∞;
// AUC by trapezoidal integration. Requires at least one positive and one
// negative label.
RocResult roc_auc(const std::vector<bool>& labels, const std::vector<Scalar>& scores);

// Full sweep evaluation: AUC plus counts/rates at the accuracy-maximizing
// threshold (ties broken toward the higher threshold).
DetectionMetrics evaluate_scores(const std::vector<bool>& labels,
                                 const std::vector<Scalar>& scores);

// One labeled response: unit texts, ground truth, and (for mock corpora)
// simulated next-token distributions feeding the token-entropy baseline.
struct CorpusItem {
    std::vector<std::string> units;
    bool hallucinated = false;
    std::vector<Vector> token_dists;
};

struct SyntheticParams {
    int per_class = 50;        // items per label
    int units_per_item = 3;
    Scalar word_noise = 0.12;  // per-word perturbation probability
                               // (half replacement, half filler insertion)
    int token_positions = 6;   // simulated distributions per item
    int token_vocab = 8;
    std::uint64_t seed = 7;
};

// Labeled corpus built from the two agreement regimes. Grounded items mirror
// the shape of a supported answer: one core claim drawn from the trusted
// paraphrase bank plus generic framing sentences, so the context concentrates
// on a single cluster. Hallucinated items mirror a confabulated answer:
// several distinct fabricated claims, each lexically close to a different
// slice of the context, so the context splits evenly across clusters. Word
// noise adds intra-class variation; simulated token-entropy profiles overlap
// across classes to feed the baseline detector.
std::vector<CorpusItem> synthetic_corpus(const SyntheticParams& params);

// Per-method results of running both detectors over a labeled corpus.
struct DetectionOutcome {
    DetectionMetrics semantic;                 // hallucination_score detector
    std::optional<DetectionMetrics> token;     // token-entropy baseline, if dists present
    std::vector<Scalar> semantic_scores;       // per item, corpus order
    std::vector<Scalar> token_scores;          // empty when baseline unavailable
    std::vector<bool> labels;
};

// Scores every item (semantic always; token baseline iff every item carries
// token distributions) and evaluates both with the threshold sweep.
DetectionOutcome detect_corpus(const Context& ctx, const std::vector<CorpusItem>& corpus,
                               const Embedder& embedder, Scalar beta);

// ---------------------------------------------------------------------------
// Frozen fixture sentences (trusted context and the three agreement regimes)
// ---------------------------------------------------------------------------

const std::vector<std::string>& fixture_axioms();         // Γ, 10 statements
const std::vector<std::string>& fixture_dense_units();    // dense agreement
const std::vector<std::string>& fixture_partial_units();  // mixed support
const std::vector<std::string>& fixture_sparse_units();   // sparse disagreement

// Sentence banks used by the synthetic generator: grounded core claims,
// fabricated claims, and context-free framing sentences.
const std::vector<std::string>& dense_sentence_bank();
const std::vector<std::string>& sparse_sentence_bank();
const std::vector<std::string>& framing_sentence_bank();

}  // namespace carol
