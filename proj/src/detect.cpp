#include "carol/detect.hpp"

#include "carol/objective.hpp"
#include "carol/rng.hpp"
#include "carol/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace carol {

// ---------------------------------------------------------------------------
// Confusion metrics
// ---------------------------------------------------------------------------

DetectionMetrics confusion_metrics(const std::vector<bool>& labels,
                                   const std::vector<bool>& predictions) {
    if (labels.size() != predictions.size()) {
        throw InputError("labels and predictions must have equal length");
    }
    if (labels.empty()) throw InputError("labels must not be empty");

    DetectionMetrics m;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] && predictions[i]) ++m.tp;
        else if (labels[i] && !predictions[i]) ++m.fn;
        else if (!labels[i] && predictions[i]) ++m.fp;
        else ++m.tn;
    }
    const Scalar total = static_cast<Scalar>(m.tp + m.tn + m.fp + m.fn);
    m.accuracy = static_cast<Scalar>(m.tp + m.tn) / total;
    if (m.tp + m.fp > 0) m.precision = static_cast<Scalar>(m.tp) / static_cast<Scalar>(m.tp + m.fp);
    if (m.tp + m.fn > 0) m.recall = static_cast<Scalar>(m.tp) / static_cast<Scalar>(m.tp + m.fn);
    if (m.tn + m.fp > 0) {
        m.specificity = static_cast<Scalar>(m.tn) / static_cast<Scalar>(m.tn + m.fp);
        m.fpr = static_cast<Scalar>(m.fp) / static_cast<Scalar>(m.tn + m.fp);
    }
    if (m.precision && m.recall && (*m.precision + *m.recall) > 0) {
        m.f1 = 2 * (*m.precision) * (*m.recall) / (*m.precision + *m.recall);
    }
    return m;
}

// ---------------------------------------------------------------------------
// ROC / AUC
// ---------------------------------------------------------------------------

RocResult roc_auc(const std::vector<bool>& labels, const std::vector<Scalar>& scores) {
    if (labels.size() != scores.size()) {
        throw InputError("labels and scores must have equal length");
    }
    if (labels.empty()) throw InputError("labels must not be empty");
    long long pos = 0;
    long long neg = 0;
    for (bool label : labels) (label ? ++pos : ++neg);
    if (pos == 0 || neg == 0) {
        throw InputError("ROC requires at least one positive and one negative label");
    }
    for (Scalar s : scores) {
        if (!std::isfinite(s)) throw InputError("scores must be finite");
    }

    // Thresholds: +inf (predict nothing), every unique score descending,
    // then -inf (predict everything).
    std::set<Scalar, std::greater<Scalar>> uniq(scores.begin(), scores.end());
    std::vector<Scalar> thresholds;
    thresholds.push_back(std::numeric_limits<Scalar>::infinity());
    thresholds.insert(thresholds.end(), uniq.begin(), uniq.end());
    thresholds.push_back(-std::numeric_limits<Scalar>::infinity());

    RocResult result;
    result.points.reserve(thresholds.size());
    for (Scalar t : thresholds) {
        long long tp = 0;
        long long fp = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (scores[i] >= t) (labels[i] ? ++tp : ++fp);
        }
        result.points.push_back(RocPoint{t, static_cast<Scalar>(fp) / static_cast<Scalar>(neg),
                                         static_cast<Scalar>(tp) / static_cast<Scalar>(pos)});
    }

    // Points run from (0,0) to (1,1) with non-decreasing fpr/tpr; trapezoid
    // integration matches the rank statistic with half credit for ties.
    Scalar auc = 0;
    for (std::size_t i = 1; i < result.points.size(); ++i) {
        const RocPoint& a = result.points[i - 1];
        const RocPoint& b = result.points[i];
        auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2;
    }
    result.auc = auc;
    return result;
}

DetectionMetrics evaluate_scores(const std::vector<bool>& labels,
                                 const std::vector<Scalar>& scores) {
    const RocResult roc = roc_auc(labels, scores);

    Scalar best_threshold = roc.points.front().threshold;
    Scalar best_accuracy = -1;
    for (const RocPoint& point : roc.points) {
        std::vector<bool> predictions(scores.size());
        for (std::size_t i = 0; i < scores.size(); ++i) {
            predictions[i] = scores[i] >= point.threshold;
        }
        long long correct = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == predictions[i]) ++correct;
        }
        const Scalar accuracy = static_cast<Scalar>(correct) / static_cast<Scalar>(labels.size());
        if (accuracy > best_accuracy) {  // ties keep the earlier (higher) threshold
            best_accuracy = accuracy;
            best_threshold = point.threshold;
        }
    }

    std::vector<bool> predictions(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        predictions[i] = scores[i] >= best_threshold;
    }
    DetectionMetrics metrics = confusion_metrics(labels, predictions);
    metrics.auc = roc.auc;
    metrics.chosen_threshold = best_threshold;
    return metrics;
}

// ---------------------------------------------------------------------------
// Synthetic corpus
// ---------------------------------------------------------------------------

namespace {

// Filler vocabulary injected by word noise; deliberately off-topic.
const std::vector<std::string>& noise_words() {
    static const std::vector<std::string> words = {
        "quartz", "meadow", "lantern", "copper", "violet", "harbor",
        "timber", "anchor", "maple",  "cobalt", "summit", "willow",
    };
    return words;
}

// Per-word perturbation: with probability noise/2 the word is replaced by a
// filler, with probability noise/2 a filler is inserted after it. Insertions
// dilute lexical overlap without destroying it; replacements can remove it.
std::string apply_word_noise(const std::string& sentence, Scalar noise, Rng& rng) {
    std::istringstream in(sentence);
    std::string word;
    std::string out;
    bool first = true;
    while (in >> word) {
        if (!first) out += ' ';
        first = false;
        const Scalar u = rng.uniform01();
        if (u < noise / 2) {
            out += noise_words()[rng.uniform_index(noise_words().size())];
        } else if (u < noise) {
            out += word;
            out += ' ';
            out += noise_words()[rng.uniform_index(noise_words().size())];
        } else {
            out += word;
        }
    }
    return out;
}

// Simulated next-token distribution: softmax of sharpness-scaled uniform
// logits over the vocabulary. Sharper logits mean lower entropy.
Vector token_distribution(int vocab, Scalar sharpness, Rng& rng) {
    Vector logits(vocab);
    for (int i = 0; i < vocab; ++i) logits(i) = sharpness * rng.uniform01();
    return softmax(logits);
}

// Draws k bank indices without replacement, starting a fresh pass whenever
// the bank is exhausted (so k may exceed the bank size).
std::vector<std::size_t> draw_indices(std::size_t bank_size, std::size_t k, Rng& rng) {
    std::vector<std::size_t> out;
    out.reserve(k);
    std::vector<std::size_t> pool;
    while (out.size() < k) {
        if (pool.empty()) {
            pool.resize(bank_size);
            std::iota(pool.begin(), pool.end(), std::size_t{0});
        }
        const std::size_t j = rng.uniform_index(pool.size());
        out.push_back(pool[j]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
    }
    return out;
}

}  // namespace

std::vector<CorpusItem> synthetic_corpus(const SyntheticParams& params) {
    if (params.per_class < 1) throw InputError("per_class must be >= 1");
    if (params.units_per_item < 1) throw InputError("units_per_item must be >= 1");
    if (!(params.word_noise >= 0 && params.word_noise < 1)) {
        throw InputError("word_noise must lie in [0,1)");
    }
    if (params.token_positions < 1) throw InputError("token_positions must be >= 1");
    if (params.token_vocab < 2) throw InputError("token_vocab must be >= 2");

    Rng rng(params.seed, 0);
    std::vector<CorpusItem> corpus;
    corpus.reserve(static_cast<std::size_t>(2 * params.per_class));

    for (int label = 0; label <= 1; ++label) {
        const bool hallucinated = (label == 1);
        for (int k = 0; k < params.per_class; ++k) {
            CorpusItem item;
            item.hallucinated = hallucinated;
            if (hallucinated) {
                // Confabulated shape: distinct fabricated claims, each close
                // to a different slice of the trusted context.
                const std::vector<std::string>& bank = sparse_sentence_bank();
                for (std::size_t idx : draw_indices(
                         bank.size(), static_cast<std::size_t>(params.units_per_item), rng)) {
                    item.units.push_back(apply_word_noise(bank[idx], params.word_noise, rng));
                }
            } else {
                // Grounded shape: one supported core claim, padded with
                // context-free framing sentences.
                const std::vector<std::string>& core = dense_sentence_bank();
                const std::vector<std::string>& frame = framing_sentence_bank();
                item.units.push_back(apply_word_noise(
                    core[rng.uniform_index(core.size())], params.word_noise, rng));
                if (params.units_per_item > 1) {
                    for (std::size_t idx : draw_indices(
                             frame.size(), static_cast<std::size_t>(params.units_per_item - 1),
                             rng)) {
                        item.units.push_back(
                            apply_word_noise(frame[idx], params.word_noise, rng));
                    }
                }
            }
            // Token-entropy profiles overlap heavily across classes:
            // hallucinated items are flatter on average but far from
            // separably so, mirroring how weak a token-level signal is.
            for (int p = 0; p < params.token_positions; ++p) {
                const Scalar sharpness = hallucinated
                                             ? Scalar(1.5) + Scalar(4.0) * rng.uniform01()
                                             : Scalar(2.0) + Scalar(4.0) * rng.uniform01();
                item.token_dists.push_back(
                    token_distribution(params.token_vocab, sharpness, rng));
            }
            corpus.push_back(std::move(item));
        }
    }
    return corpus;
}

DetectionOutcome detect_corpus(const Context& ctx, const std::vector<CorpusItem>& corpus,
                               const Embedder& embedder, Scalar beta) {
    if (corpus.empty()) throw InputError("corpus must not be empty");

    DetectionOutcome outcome;
    outcome.labels.reserve(corpus.size());
    outcome.semantic_scores.reserve(corpus.size());
    bool token_available = true;

    for (const CorpusItem& item : corpus) {
        if (item.units.empty()) throw InputError("corpus item has no units");
        outcome.labels.push_back(item.hallucinated);
        std::vector<SemanticUnit> units;
        units.reserve(item.units.size());
        for (const std::string& text : item.units) {
            units.push_back(SemanticUnit{text, embedder.embed_text(text), UnitOrigin::Fixture});
        }
        outcome.semantic_scores.push_back(hallucination_score(ctx, units, beta));
        if (item.token_dists.empty()) token_available = false;
    }

    outcome.semantic = evaluate_scores(outcome.labels, outcome.semantic_scores);

    if (token_available) {
        outcome.token_scores.reserve(corpus.size());
        for (const CorpusItem& item : corpus) {
            outcome.token_scores.push_back(token_entropy(item.token_dists));
        }
        outcome.token = evaluate_scores(outcome.labels, outcome.token_scores);
    }
    return outcome;
}

// ---------------------------------------------------------------------------
// Fixture sentences
// ---------------------------------------------------------------------------

const std::vector<std::string>& fixture_axioms() {
    static const std::vector<std::string> axioms = {
        "Paris is the capital of France",
        "France's capital city is Paris",
        "The French government is seated in Paris",
        "Paris is the political center of France",
        "France is a country in Western Europe",
        "France belongs to the European Union",
        "Paris is known for the Eiffel Tower",
        "The Louvre Museum is located in Paris",
        "The Seine River flows through Paris",
        "Paris is famous for museums, monuments, and architecture",
    };
    return axioms;
}

const std::vector<std::string>& fixture_dense_units() {
    static const std::vector<std::string> units = {
        "Paris is the capital of France",
        "The French government is based in Paris",
        "Paris contains the Eiffel Tower and the Louvre",
    };
    return units;
}

const std::vector<std::string>& fixture_partial_units() {
    static const std::vector<std::string> units = {
        "Paris is the capital of France",
        "France is located in Europe",
        "Madrid is the capital of France",
    };
    return units;
}

const std::vector<std::string>& fixture_sparse_units() {
    static const std::vector<std::string> units = {
        "Berlin is the capital of France",
        "The Eiffel Tower is located in Rome",
        "France is a country in South America",
    };
    return units;
}

const std::vector<std::string>& dense_sentence_bank() {
    static const std::vector<std::string> bank = {
        "Paris is the capital of France",
        "The French government is based in Paris",
        "Paris contains the Eiffel Tower and the Louvre",
        "France's capital city is Paris",
        "The Seine River flows through Paris",
        "Paris is known for the Eiffel Tower",
        "France is a country in Western Europe",
        "The Louvre Museum is located in Paris",
    };
    return bank;
}

const std::vector<std::string>& sparse_sentence_bank() {
    static const std::vector<std::string> bank = {
        "Berlin is the capital of France",
        "The Eiffel Tower is located in Rome",
        "France is a country in South America",
        "Madrid lies on the Seine River",
        "The Louvre Museum is located in Berlin",
        "France borders Brazil to the north",
        "The French government is seated in Lisbon",
        "Paris is a small village in Portugal",
    };
    return bank;
}

// Framing sentences are kept lexically disjoint from the trusted statements
// (no shared function words), so they absorb essentially no context support
// and the grounded item's core claim stays the dominant cluster.
const std::vector<std::string>& framing_sentence_bank() {
    static const std::vector<std::string> bank = {
        "Sources verified against archival records",
        "Citation check passed without discrepancies",
        "Reference audit complete",
        "Supporting quotations attached below",
        "Verification status confirmed",
        "Cross checked against primary sources",
        "Consistency review passed",
        "Archival lookup succeeded",
    };
    return bank;
}

}  // namespace carol
