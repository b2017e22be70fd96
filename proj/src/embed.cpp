#include "carol/embed.hpp"

#include "carol/httpx.hpp"

#include <json.hpp>

#include <cctype>
#include <sstream>

namespace carol {

namespace {

using nlohmann::json;

bool is_blank(const std::string& s) {
    for (unsigned char c : s) {
        if (!std::isspace(c)) return false;
    }
    return true;
}

std::string truncate_for_diagnostic(const std::string& s, std::size_t limit = 200) {
    if (s.size() <= limit) return s;
    return s.substr(0, limit) + "...";
}

}  // namespace

std::string normalize_for_hashing(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

std::uint64_t fnv1a64(const char* data, std::size_t len, std::uint64_t seed) {
    constexpr std::uint64_t kOffsetBasis = 0xcbf29ce484222325ULL;
    constexpr std::uint64_t kPrime = 0x00000100000001b3ULL;
    std::uint64_t h = kOffsetBasis ^ seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= kPrime;
    }
    return h;
}

Embedder::Embedder(EmbedderConfig config) : config_(std::move(config)) {
    if (config_.kind == EmbedderKind::BuiltinHash) {
        if (config_.dimension < 1) {
            throw ConfigError("embed.dimension must be >= 1");
        }
        if (config_.ngram_min < 1 || config_.ngram_max < config_.ngram_min) {
            throw ConfigError("embed.ngram range must satisfy 1 <= min <= max");
        }
    } else {
        if (config_.endpoint.empty()) {
            throw ConfigError("embed.endpoint required for the http embedder");
        }
        if (config_.model.empty()) {
            throw ConfigError("embed.model required for the http embedder");
        }
    }
}

std::string Embedder::fingerprint() const {
    std::ostringstream os;
    if (config_.kind == EmbedderKind::BuiltinHash) {
        os << "builtin-hash/d=" << config_.dimension
           << "/ngram=" << config_.ngram_min << "-" << config_.ngram_max
           << "/norm=" << (config_.normalize ? 1 : 0)
           << "/fnv1a64-seed=0x" << std::hex << config_.hash_seed;
    } else {
        os << "http/" << config_.endpoint << "/" << config_.model
           << "/norm=" << (config_.normalize ? 1 : 0);
    }
    return os.str();
}

Vector Embedder::embed_text(const std::string& text) const {
    if (config_.kind == EmbedderKind::Http) {
        return embed_batch({text}).front();
    }
    const std::string norm = normalize_for_hashing(text);
    if (norm.empty()) {
        throw InputError("embed_text: text is empty after whitespace trimming");
    }

    Vector v = Vector::Zero(config_.dimension);
    const std::size_t len = norm.size();
    const std::size_t lo = static_cast<std::size_t>(config_.ngram_min);
    const std::size_t hi = static_cast<std::size_t>(config_.ngram_max);
    if (len < lo) {
        // Shorter than the smallest n-gram: hash the whole text once so that
        // every nonempty input still yields a nonzero vector.
        const std::uint64_t h = fnv1a64(norm.data(), len, config_.hash_seed);
        v(static_cast<Eigen::Index>(h % static_cast<std::uint64_t>(config_.dimension))) += 1.0;
    } else {
        for (std::size_t n = lo; n <= hi && n <= len; ++n) {
            for (std::size_t i = 0; i + n <= len; ++i) {
                const std::uint64_t h = fnv1a64(norm.data() + i, n, config_.hash_seed);
                v(static_cast<Eigen::Index>(h % static_cast<std::uint64_t>(config_.dimension))) += 1.0;
            }
        }
    }

    if (config_.normalize) {
        const Scalar nrm = v.norm();
        if (nrm > 0) v /= nrm;
    }
    return v;
}

std::vector<Vector> Embedder::embed_batch(const std::vector<std::string>& texts) const {
    if (texts.empty()) throw InputError("embed_batch: empty batch");
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (is_blank(texts[i])) {
            throw InputError("embed_batch: text at index " + std::to_string(i) + " is blank");
        }
    }

    if (config_.kind == EmbedderKind::BuiltinHash) {
        std::vector<Vector> out;
        out.reserve(texts.size());
        for (const auto& t : texts) out.push_back(embed_text(t));
        return out;
    }

    json request = {{"model", config_.model}, {"input", texts}};
    const HttpResponse res =
        http_post_json(config_.endpoint, request.dump(), config_.auth_token, config_.timeout_sec);
    if (res.status < 200 || res.status >= 300) {
        throw ProviderError("embeddings endpoint returned status " + std::to_string(res.status) +
                                ": " + truncate_for_diagnostic(res.body),
                            res.status);
    }

    json body;
    try {
        body = json::parse(res.body);
    } catch (const json::exception& e) {
        throw ProviderError(std::string("embeddings response is not JSON: ") + e.what(),
                            res.status);
    }
    if (!body.contains("data") || !body["data"].is_array() ||
        body["data"].size() != texts.size()) {
        throw ProviderError("embeddings response shape mismatch: expected data[" +
                                std::to_string(texts.size()) + "]",
                            res.status);
    }

    std::vector<Vector> out;
    out.reserve(texts.size());
    Eigen::Index dim = -1;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        const json& item = body["data"][i];
        if (!item.contains("embedding") || !item["embedding"].is_array() ||
            item["embedding"].empty()) {
            throw ProviderError("embeddings response missing embedding at index " +
                                    std::to_string(i),
                                res.status);
        }
        const auto& arr = item["embedding"];
        Vector v(static_cast<Eigen::Index>(arr.size()));
        for (std::size_t j = 0; j < arr.size(); ++j) {
            if (!arr[j].is_number()) {
                throw ProviderError("embeddings response has a non-numeric coordinate at index " +
                                        std::to_string(i),
                                    res.status);
            }
            v(static_cast<Eigen::Index>(j)) = arr[j].get<double>();
        }
        if (dim < 0) {
            dim = v.size();
        } else if (v.size() != dim) {
            throw ProviderError("embeddings response has inconsistent dimensions (" +
                                    std::to_string(dim) + " vs " + std::to_string(v.size()) + ")",
                                res.status);
        }
        if (config_.normalize) {
            const Scalar nrm = v.norm();
            if (nrm > 0) v /= nrm;
        }
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace carol
