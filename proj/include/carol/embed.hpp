// Text embedding providers.
//
// Two interchangeable backends produce the dense vectors everything else
// consumes:
//
//   * builtin-hash — a deterministic hashed bag of character n-grams. The
//     text is lowercased (ASCII), whitespace runs are collapsed to single
//     spaces, character n-grams with lengths in [ngram_min, ngram_max] are
//     hashed into `dimension` buckets with 64-bit FNV-1a (fixed seed XORed
//     into the offset basis), bucket hits are counted, and the count vector
//     is L2-normalized. No network, no model weights, bit-identical across
//     platforms.
//
//   * http — an external embeddings endpoint speaking the common JSON shape
//     POST {"model": ..., "input": [...]} -> {"data": [{"embedding": [...]},
//     ...]} with optional bearer auth.
//
// A configuration fingerprint string is stored alongside persisted contexts
// so that mixing embeddings from different configurations is detectable.

#pragma once

#include "carol/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace carol {

enum class EmbedderKind { BuiltinHash, Http };

// Seed folded into the FNV-1a offset basis (the 64-bit golden-ratio
// constant). Changing it changes every builtin embedding, so it is part of
// the fingerprint.
inline constexpr std::uint64_t kEmbedHashSeed = 0x9e3779b97f4a7c15ULL;

struct EmbedderConfig {
    EmbedderKind kind = EmbedderKind::BuiltinHash;

    // builtin-hash parameters
    int dimension = 256;   // hash buckets (builtin only; http reports its own)
    int ngram_min = 3;     // inclusive n-gram length range over the
    int ngram_max = 6;     //   normalized character stream
    bool normalize = true; // L2-normalize outputs
    std::uint64_t hash_seed = kEmbedHashSeed;

    // http parameters
    std::string endpoint;   // e.g. "http://localhost:8080/v1/embeddings"
    std::string model;
    std::string auth_token; // sent as a bearer token when nonempty
    int timeout_sec = 30;
};

class Embedder {
public:
    explicit Embedder(EmbedderConfig config);

    // Embeds one text. The text must be nonempty after whitespace trimming.
    Vector embed_text(const std::string& text) const;

    // Embeds a batch in order; for the http backend this is a single POST.
    // Throws InputError naming the offending index if any text is blank.
    std::vector<Vector> embed_batch(const std::vector<std::string>& texts) const;

    // Stable, human-readable encoding of every parameter that affects the
    // produced vectors. Two embedders agree on all inputs iff their
    // fingerprints match.
    std::string fingerprint() const;

    const EmbedderConfig& config() const { return config_; }

private:
    EmbedderConfig config_;
};

// Text normalization used by the builtin backend (exposed for tests):
// ASCII-lowercase, collapse whitespace runs to a single space, trim.
std::string normalize_for_hashing(const std::string& text);

// Seeded 64-bit FNV-1a over a byte range (exposed for tests).
std::uint64_t fnv1a64(const char* data, std::size_t len, std::uint64_t seed);

}  // namespace carol
