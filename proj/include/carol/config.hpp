// Run configuration: one TOML-style file with a section per module, merged
// over defaults, then environment overrides (CAROL_EMBED_* / CAROL_LLM_*).
// Invalid entries are reported with their key paths; every effective value
// (defaults included) is echoed to JSON for provenance.

#pragma once

#include "carol/chain.hpp"
#include "carol/detect.hpp"
#include "carol/embed.hpp"
#include "carol/proposal.hpp"
#include "carol/types.hpp"

#include <nlohmann/json.hpp>
#include <string>

namespace carol {

// Analysis knobs consumed by the `analyze` subcommand.
struct AnalysisConfig {
    Scalar epsilon = 0.05;
    int max_steps = 512;
    int replicas = 2000;
    std::string variant = "theorem-statement";  // or "coupling-derivation"
};

struct RunConfig {
    EmbedderConfig embed;           // [embed]
    std::string proposal_mode = "mock";  // [proposal] mode = mock | http
    HttpProposalConfig proposal;    // [proposal] http settings
    ChainConfig chain;              // [chain]
    AnalysisConfig analysis;        // [analysis]
    SyntheticParams detect;         // [detect] synthetic-corpus knobs
    Scalar detect_beta = 1.0;       // [detect] beta

    // Parser bookkeeping: whether embed.normalize was given explicitly.
    // External embedders default to raw vectors (normalization changes the
    // asymmetric entailment score), so a kind switch without an explicit
    // normalize entry turns normalization off.
    bool embed_normalize_explicit = false;

    // Full echo of the effective configuration, defaults included.
    nlohmann::json to_json() const;
};

// All defaults; equivalent to loading an empty file.
RunConfig default_config();

// Parses the TOML-subset file over defaults. Unknown sections/keys, type
// mismatches, and out-of-range values raise ConfigError naming the key path.
RunConfig load_config(const std::string& path);

// Applies CAROL_EMBED_ENDPOINT/MODEL/TOKEN and CAROL_LLM_ENDPOINT/MODEL/TOKEN
// when set; an embed endpoint from the environment switches the embedder to
// http, an LLM endpoint switches the proposal mode.
void apply_env_overrides(RunConfig& config);

// Range/consistency validation with key-path diagnostics.
void validate_config(const RunConfig& config);

}  // namespace carol
