#include "carol/proposal.hpp"

#include "carol/httpx.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <utility>

namespace carol {

namespace {

// Validates and normalizes weights in place.
void normalize_weights(std::vector<Scalar>& weights, std::size_t n) {
    if (weights.empty()) {
        weights.assign(n, Scalar(1) / static_cast<Scalar>(n));
        return;
    }
    if (weights.size() != n) {
        throw InputError("pool weights length does not match candidate count");
    }
    Scalar total = 0;
    for (Scalar w : weights) {
        if (!(w > 0) || !std::isfinite(w)) {
            throw InputError("pool weights must be finite and strictly positive");
        }
        total += w;
    }
    for (Scalar& w : weights) w /= total;
}

}  // namespace

CandidatePool make_pool(const std::vector<std::string>& texts, const Embedder& embedder,
                        std::vector<Scalar> weights) {
    if (texts.empty()) throw InputError("candidate pool must not be empty");
    CandidatePool pool;
    pool.candidates.reserve(texts.size());
    const std::vector<Vector> embs = embedder.embed_batch(texts);
    for (std::size_t i = 0; i < texts.size(); ++i) {
        pool.candidates.push_back(SemanticUnit{texts[i], embs[i], UnitOrigin::Fixture});
    }
    pool.weights = std::move(weights);
    normalize_weights(pool.weights, pool.candidates.size());
    return pool;
}

CandidatePool load_pool(const std::string& path, const Embedder& embedder) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open pool file: " + path);
    std::vector<std::string> texts;
    std::vector<Scalar> weights;
    std::string line;
    int line_no = 0;
    bool any_weight = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw ParseError("pool line is not a JSON object", line_no);
        }
        if (!j.contains("text") || !j["text"].is_string() ||
            j["text"].get<std::string>().empty()) {
            throw ParseError("pool line missing non-empty \"text\"", line_no);
        }
        texts.push_back(j["text"].get<std::string>());
        if (j.contains("weight")) {
            if (!j["weight"].is_number()) {
                throw ParseError("pool \"weight\" must be numeric", line_no);
            }
            const Scalar w = j["weight"].get<Scalar>();
            if (!(w > 0)) throw ParseError("pool \"weight\" must be > 0", line_no);
            weights.push_back(w);
            any_weight = true;
        } else {
            weights.push_back(Scalar(1));
        }
    }
    if (texts.empty()) throw ParseError("pool file contains no candidates", line_no);
    if (!any_weight) weights.clear();  // uniform
    return make_pool(texts, embedder, std::move(weights));
}

QExtremes q_extremes(const CandidatePool& pool) {
    if (pool.candidates.empty()) throw InputError("candidate pool must not be empty");
    Scalar lo = pool.weights.front();
    Scalar hi = pool.weights.front();
    for (Scalar w : pool.weights) {
        lo = std::min(lo, w);
        hi = std::max(hi, w);
    }
    return QExtremes{lo, hi};
}

// ---------------------------------------------------------------------------
// MockProposal
// ---------------------------------------------------------------------------

MockProposal::MockProposal(CandidatePool pool, std::uint64_t seed, std::uint64_t stream)
    : pool_(std::move(pool)), rng_(seed, stream) {
    if (pool_.candidates.empty()) throw InputError("candidate pool must not be empty");
}

SemanticUnit MockProposal::propose(const ProposalView& /*view*/) {
    // Inverse-CDF walk over the normalized weights.
    const Scalar u = rng_.uniform01();
    Scalar acc = 0;
    std::size_t pick = pool_.candidates.size() - 1;
    for (std::size_t i = 0; i < pool_.candidates.size(); ++i) {
        acc += pool_.weights[i];
        if (u < acc) {
            pick = i;
            break;
        }
    }
    SemanticUnit unit = pool_.candidates[pick];
    unit.origin = UnitOrigin::Proposed;
    return unit;
}

// ---------------------------------------------------------------------------
// HttpProposal
// ---------------------------------------------------------------------------

HttpProposal::HttpProposal(HttpProposalConfig config, const Embedder& embedder)
    : config_(std::move(config)), embedder_(embedder) {
    if (config_.endpoint.empty()) throw ConfigError("proposal endpoint must not be empty");
    if (config_.model.empty()) throw ConfigError("proposal model must not be empty");
    if (config_.max_unit_tokens < 1) throw ConfigError("max_unit_tokens must be >= 1");
}

std::string HttpProposal::build_request_body(const ProposalView& view) const {
    nlohmann::json body;
    body["model"] = config_.model;
    body["max_tokens"] = config_.max_unit_tokens * 4;  // generous char->token slack

    std::string system = config_.system_preamble;
    if (!config_.grounding.empty()) {
        system += "\nTrusted context:";
        for (const std::string& g : config_.grounding) system += "\n- " + g;
    }
    // Revision directives accumulate in the system message so the provider
    // treats them as standing instructions, not dialogue to answer.
    for (const std::string& r : view.revisions) system += "\n" + r;

    std::string user = view.query;
    if (!view.accepted.empty()) {
        user += "\nStatements so far:";
        for (const SemanticUnit& unit : view.accepted) user += "\n- " + unit.text;
        user += "\nNext statement:";
    }

    body["messages"] = nlohmann::json::array(
        {{{"role", "system"}, {"content", system}}, {{"role", "user"}, {"content", user}}});
    return body.dump();
}

SemanticUnit HttpProposal::propose(const ProposalView& view) {
    const HttpResponse resp = http_post_json(config_.endpoint, build_request_body(view),
                                             config_.auth_token, config_.timeout_sec);
    if (resp.status != 200) {
        throw ProviderError("chat endpoint returned HTTP " + std::to_string(resp.status) +
                                ": " + resp.body.substr(0, 200),
                            resp.status);
    }
    nlohmann::json j = nlohmann::json::parse(resp.body, nullptr, false);
    if (j.is_discarded()) throw ProviderError("chat reply is not valid JSON", resp.status);
    if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) {
        throw ProviderError("chat reply has no choices", resp.status);
    }
    const nlohmann::json& msg = j["choices"][0];
    if (!msg.contains("message") || !msg["message"].contains("content") ||
        !msg["message"]["content"].is_string()) {
        throw ProviderError("chat reply missing message content", resp.status);
    }
    const std::string text =
        truncate_to_tokens(msg["message"]["content"].get<std::string>(), config_.max_unit_tokens);
    if (text.empty()) {
        throw DegenerateInputError("chat provider returned an empty statement");
    }
    return SemanticUnit{text, embedder_.embed_text(text), UnitOrigin::Proposed};
}

std::string truncate_to_tokens(const std::string& text, int max_tokens) {
    if (max_tokens < 1) throw InputError("max_tokens must be >= 1");
    std::istringstream in(text);
    std::string token;
    std::string out;
    int count = 0;
    while (count < max_tokens && (in >> token)) {
        if (count > 0) out += ' ';
        out += token;
        ++count;
    }
    return out;
}

}  // namespace carol
