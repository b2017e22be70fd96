// Candidate proposal sources for the accept/reject chain.
//
// MockProposal samples units from a fixed weighted pool with the seeded
// counter-based generator — fully offline and bit-reproducible. HttpProposal
// asks a chat-completions endpoint
//   POST {"model": ..., "messages": [...], "max_tokens": ...}
//     -> {"choices": [{"message": {"content": ...}}]}
// for the next statement, truncates it to the configured ℓ-gram budget, and
// embeds it. Revision directives issued on rejection ride in the system
// message of the next request (chain-of-thought rewiring).

#pragma once

#include "carol/embed.hpp"
#include "carol/rng.hpp"
#include "carol/types.hpp"

#include <string>
#include <vector>

namespace carol {

// A weighted candidate pool — the contracted lattice of feasible statements
// made explicit. Weights are strictly positive and normalized on
// construction.
struct CandidatePool {
    std::vector<SemanticUnit> candidates;
    std::vector<Scalar> weights;  // same length as candidates, sums to 1

    std::size_t size() const { return candidates.size(); }
};

// Builds a pool from raw texts (uniform weights unless given) using the
// supplied embedder.
CandidatePool make_pool(const std::vector<std::string>& texts, const Embedder& embedder,
                        std::vector<Scalar> weights = {});

// Reads a JSONL pool file: one {"text": ..., "weight": <optional, >0>} per
// line. Missing weights default to 1 before normalization.
CandidatePool load_pool(const std::string& path, const Embedder& embedder);

// Smallest and largest normalized proposal probability of a pool.
struct QExtremes {
    Scalar q_min;
    Scalar q_max;
};
QExtremes q_extremes(const CandidatePool& pool);

// What a proposal source may condition on: the user query, everything
// accepted so far, and any revision directives issued on rejections.
struct ProposalView {
    const std::string& query;
    const std::vector<SemanticUnit>& accepted;
    const std::vector<std::string>& revisions;
};

class ProposalSource {
public:
    virtual ~ProposalSource() = default;

    // Emits the next candidate (origin tag "proposed").
    virtual SemanticUnit propose(const ProposalView& view) = 0;

    // Non-null for pool-backed sources; lets the chain derive proposal
    // probability extremes and a theoretical step budget. Remote sources
    // return nullptr (their q extremes are unobservable).
    virtual const CandidatePool* pool() const { return nullptr; }
};

class MockProposal final : public ProposalSource {
public:
    MockProposal(CandidatePool pool, std::uint64_t seed, std::uint64_t stream = 0);
    SemanticUnit propose(const ProposalView& view) override;
    const CandidatePool* pool() const override { return &pool_; }

private:
    CandidatePool pool_;
    Rng rng_;
};

struct HttpProposalConfig {
    std::string endpoint;  // e.g. "http://localhost:8080/v1/chat/completions"
    std::string model;
    std::string auth_token;
    int max_unit_tokens = 24;  // ℓ-gram budget (whitespace tokens)
    int timeout_sec = 60;
    // System-message preamble; revision directives are appended after it.
    std::string system_preamble =
        "You answer by emitting one statement at a time. Reply with exactly one "
        "declarative statement, grounded in the trusted context. No preamble, no numbering.";
    // Axiom texts offered to the provider as grounding.
    std::vector<std::string> grounding;
};

class HttpProposal final : public ProposalSource {
public:
    HttpProposal(HttpProposalConfig config, const Embedder& embedder);

    // Throws ProviderError on transport/shape failures and
    // DegenerateInputError when the reply is empty after truncation.
    SemanticUnit propose(const ProposalView& view) override;

    // Exposed for tests: the exact request body sent for a given view.
    std::string build_request_body(const ProposalView& view) const;

private:
    HttpProposalConfig config_;
    const Embedder& embedder_;
};

// First `max_tokens` whitespace-separated tokens of `text`, re-joined with
// single spaces.
std::string truncate_to_tokens(const std::string& text, int max_tokens);

}  // namespace carol
