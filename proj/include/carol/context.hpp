// Trusted-context handling: building the grounding set Γ from raw statements,
// nearest-axiom retrieval, and JSONL persistence.
//
// File format (one JSON object per line):
//   line 1    {"embedder_fingerprint": "<string>"}
//   line 2+   {"id": "ax-0001", "text": "...", "embedding": [ ... ]}
// Embedding coordinates are written with full round-trip precision, so
// save -> load reproduces every vector bit-for-bit.

#pragma once

#include "carol/embed.hpp"
#include "carol/types.hpp"

#include <string>
#include <vector>

namespace carol {

// Embeds each statement and assigns sequential ids ("ax-0001", ...). Order
// is preserved. Throws InputError when the list is empty, when every
// statement is blank, or (via the embedder) when an individual statement is
// blank.
Context build_context(const std::vector<std::string>& statements, const Embedder& embedder);

// The k axioms nearest to `query` under entailment_distance, keeping their
// original order. Ties break toward the lower axiom index; k >= |Γ| returns
// the context unchanged.
Context retrieve_topk(const Context& ctx, const Vector& query, std::size_t k);

void save_context(const Context& ctx, const std::string& path);

Context load_context(const std::string& path);

// Like load_context, additionally comparing the stored fingerprint against
// the one expected by the active embedder configuration.
struct ContextLoadResult {
    Context context;
    bool fingerprint_warning = false;  // stored fingerprint != expected
};
ContextLoadResult load_context_checked(const std::string& path,
                                       const std::string& expected_fingerprint);

}  // namespace carol
