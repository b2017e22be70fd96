#include "carol/config.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>

namespace carol {

namespace {

std::string trim(const std::string& s) {
    const std::size_t first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const std::size_t last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

// A parsed raw value plus its origin for diagnostics.
struct RawValue {
    std::string text;     // unquoted content
    bool was_quoted;
    int line_no;
};

[[noreturn]] void bad_key(const std::string& path, const RawValue& v, const std::string& why) {
    throw ConfigError("config key '" + path + "' " + why + " (line " +
                      std::to_string(v.line_no) + ", value '" + v.text + "')");
}

Scalar parse_real(const std::string& path, const RawValue& v) {
    try {
        std::size_t pos = 0;
        const Scalar x = std::stod(v.text, &pos);
        if (pos != v.text.size()) bad_key(path, v, "is not a number");
        return x;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        bad_key(path, v, "is not a number");
    }
}

long long parse_int(const std::string& path, const RawValue& v) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v.text, &pos);
        if (pos != v.text.size()) bad_key(path, v, "is not an integer");
        return x;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        bad_key(path, v, "is not an integer");
    }
}

bool parse_bool(const std::string& path, const RawValue& v) {
    if (v.text == "true") return true;
    if (v.text == "false") return false;
    bad_key(path, v, "is not a boolean (expected true/false)");
}

std::uint64_t parse_u64(const std::string& path, const RawValue& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v.text, &pos);
        if (pos != v.text.size()) bad_key(path, v, "is not an unsigned integer");
        return x;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        bad_key(path, v, "is not an unsigned integer");
    }
}

// Applies one key in one section; throws on unknown paths.
void apply_key(RunConfig& cfg, const std::string& section, const std::string& key,
               const RawValue& v) {
    const std::string path = section + "." + key;
    if (section == "embed") {
        if (key == "kind") {
            if (v.text == "builtin") cfg.embed.kind = EmbedderKind::BuiltinHash;
            else if (v.text == "http") cfg.embed.kind = EmbedderKind::Http;
            else bad_key(path, v, "must be 'builtin' or 'http'");
        } else if (key == "dimension") cfg.embed.dimension = static_cast<int>(parse_int(path, v));
        else if (key == "ngram_min") cfg.embed.ngram_min = static_cast<int>(parse_int(path, v));
        else if (key == "ngram_max") cfg.embed.ngram_max = static_cast<int>(parse_int(path, v));
        else if (key == "normalize") {
            cfg.embed.normalize = parse_bool(path, v);
            cfg.embed_normalize_explicit = true;
        }
        else if (key == "endpoint") cfg.embed.endpoint = v.text;
        else if (key == "model") cfg.embed.model = v.text;
        else if (key == "token") cfg.embed.auth_token = v.text;
        else if (key == "timeout_sec") cfg.embed.timeout_sec = static_cast<int>(parse_int(path, v));
        else bad_key(path, v, "is not a recognized key");
    } else if (section == "proposal") {
        if (key == "mode") {
            if (v.text != "mock" && v.text != "http") bad_key(path, v, "must be 'mock' or 'http'");
            cfg.proposal_mode = v.text;
        } else if (key == "endpoint") cfg.proposal.endpoint = v.text;
        else if (key == "model") cfg.proposal.model = v.text;
        else if (key == "token") cfg.proposal.auth_token = v.text;
        else if (key == "max_unit_tokens")
            cfg.proposal.max_unit_tokens = static_cast<int>(parse_int(path, v));
        else if (key == "timeout_sec")
            cfg.proposal.timeout_sec = static_cast<int>(parse_int(path, v));
        else bad_key(path, v, "is not a recognized key");
    } else if (section == "chain") {
        if (key == "beta") cfg.chain.beta = parse_real(path, v);
        else if (key == "t_max") cfg.chain.t_max = static_cast<int>(parse_int(path, v));
        else if (key == "epsilon") cfg.chain.epsilon = parse_real(path, v);
        else if (key == "tau_override")
            cfg.chain.tau_override = static_cast<int>(parse_int(path, v));
        else if (key == "seed") cfg.chain.seed = parse_u64(path, v);
        else if (key == "revision_directive") cfg.chain.revision_directive = v.text;
        else bad_key(path, v, "is not a recognized key");
    } else if (section == "analysis") {
        if (key == "epsilon") cfg.analysis.epsilon = parse_real(path, v);
        else if (key == "max_steps") cfg.analysis.max_steps = static_cast<int>(parse_int(path, v));
        else if (key == "replicas") cfg.analysis.replicas = static_cast<int>(parse_int(path, v));
        else if (key == "variant") {
            if (v.text != "theorem-statement" && v.text != "coupling-derivation") {
                bad_key(path, v, "must be 'theorem-statement' or 'coupling-derivation'");
            }
            cfg.analysis.variant = v.text;
        } else bad_key(path, v, "is not a recognized key");
    } else if (section == "detect") {
        if (key == "per_class") cfg.detect.per_class = static_cast<int>(parse_int(path, v));
        else if (key == "units_per_item")
            cfg.detect.units_per_item = static_cast<int>(parse_int(path, v));
        else if (key == "word_noise") cfg.detect.word_noise = parse_real(path, v);
        else if (key == "token_positions")
            cfg.detect.token_positions = static_cast<int>(parse_int(path, v));
        else if (key == "token_vocab")
            cfg.detect.token_vocab = static_cast<int>(parse_int(path, v));
        else if (key == "seed") cfg.detect.seed = parse_u64(path, v);
        else if (key == "beta") cfg.detect_beta = parse_real(path, v);
        else bad_key(path, v, "is not a recognized key");
    } else {
        throw ConfigError("config section '[" + section + "]' is not recognized (line " +
                          std::to_string(v.line_no) + ")");
    }
}

std::optional<std::string> env_value(const char* name) {
    const char* raw = std::getenv(name);
    if (raw == nullptr || *raw == '\0') return std::nullopt;
    return std::string(raw);
}

}  // namespace

RunConfig default_config() { return RunConfig{}; }

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);

    RunConfig cfg = default_config();
    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // Strip comments: a '#' outside quotes starts one.
        bool in_quotes = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_quotes = !in_quotes;
            else if (line[i] == '#' && !in_quotes) {
                line.resize(i);
                break;
            }
        }
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;

        if (stripped.front() == '[') {
            if (stripped.back() != ']' || stripped.size() < 3) {
                throw ConfigError("malformed section header (line " + std::to_string(line_no) +
                                  ")");
            }
            section = trim(stripped.substr(1, stripped.size() - 2));
            continue;
        }

        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected 'key = value' (line " + std::to_string(line_no) + ")");
        }
        const std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("empty key (line " + std::to_string(line_no) + ")");
        }
        if (section.empty()) {
            throw ConfigError("key '" + key + "' appears before any [section] (line " +
                              std::to_string(line_no) + ")");
        }

        RawValue raw;
        raw.line_no = line_no;
        raw.was_quoted = value.size() >= 2 && value.front() == '"' && value.back() == '"';
        raw.text = raw.was_quoted ? value.substr(1, value.size() - 2) : value;
        if (raw.text.empty() && !raw.was_quoted) {
            throw ConfigError("key '" + section + "." + key + "' has no value (line " +
                              std::to_string(line_no) + ")");
        }
        apply_key(cfg, section, key, raw);
    }
    if (cfg.embed.kind == EmbedderKind::Http && !cfg.embed_normalize_explicit) {
        cfg.embed.normalize = false;  // external vectors are raw by default
    }
    validate_config(cfg);
    return cfg;
}

void apply_env_overrides(RunConfig& config) {
    if (auto v = env_value("CAROL_EMBED_ENDPOINT")) {
        config.embed.endpoint = *v;
        if (config.embed.kind != EmbedderKind::Http && !config.embed_normalize_explicit) {
            config.embed.normalize = false;  // external vectors are raw by default
        }
        config.embed.kind = EmbedderKind::Http;
    }
    if (auto v = env_value("CAROL_EMBED_MODEL")) config.embed.model = *v;
    if (auto v = env_value("CAROL_EMBED_TOKEN")) config.embed.auth_token = *v;
    if (auto v = env_value("CAROL_LLM_ENDPOINT")) {
        config.proposal.endpoint = *v;
        config.proposal_mode = "http";
    }
    if (auto v = env_value("CAROL_LLM_MODEL")) config.proposal.model = *v;
    if (auto v = env_value("CAROL_LLM_TOKEN")) config.proposal.auth_token = *v;
}

void validate_config(const RunConfig& config) {
    if (config.embed.dimension < 8) throw ConfigError("embed.dimension must be >= 8");
    if (config.embed.ngram_min < 1) throw ConfigError("embed.ngram_min must be >= 1");
    if (config.embed.ngram_max < config.embed.ngram_min) {
        throw ConfigError("embed.ngram_max must be >= embed.ngram_min");
    }
    if (config.embed.timeout_sec < 1) throw ConfigError("embed.timeout_sec must be >= 1");
    if (config.embed.kind == EmbedderKind::Http && config.embed.endpoint.empty()) {
        throw ConfigError("embed.endpoint is required when embed.kind = http");
    }
    if (config.proposal_mode == "http" && config.proposal.endpoint.empty()) {
        throw ConfigError("proposal.endpoint is required when proposal.mode = http");
    }
    if (config.proposal.max_unit_tokens < 1) {
        throw ConfigError("proposal.max_unit_tokens must be >= 1");
    }
    if (config.proposal.timeout_sec < 1) throw ConfigError("proposal.timeout_sec must be >= 1");
    if (!(config.chain.beta > 0) || !std::isfinite(config.chain.beta)) {
        throw ConfigError("chain.beta must be finite and > 0");
    }
    if (config.chain.t_max < 0) throw ConfigError("chain.t_max must be >= 0");
    if (!(config.chain.epsilon > 0 && config.chain.epsilon < 1)) {
        throw ConfigError("chain.epsilon must lie in (0,1)");
    }
    if (config.chain.tau_override && *config.chain.tau_override < 1) {
        throw ConfigError("chain.tau_override must be >= 1 when set");
    }
    if (!(config.analysis.epsilon > 0 && config.analysis.epsilon < 1)) {
        throw ConfigError("analysis.epsilon must lie in (0,1)");
    }
    if (config.analysis.max_steps < 1) throw ConfigError("analysis.max_steps must be >= 1");
    if (config.analysis.replicas < 1000) throw ConfigError("analysis.replicas must be >= 1000");
    if (config.detect.per_class < 1) throw ConfigError("detect.per_class must be >= 1");
    if (config.detect.units_per_item < 1) throw ConfigError("detect.units_per_item must be >= 1");
    if (!(config.detect.word_noise >= 0 && config.detect.word_noise < 1)) {
        throw ConfigError("detect.word_noise must lie in [0,1)");
    }
    if (config.detect.token_positions < 1) throw ConfigError("detect.token_positions must be >= 1");
    if (config.detect.token_vocab < 2) throw ConfigError("detect.token_vocab must be >= 2");
    if (!(config.detect_beta > 0) || !std::isfinite(config.detect_beta)) {
        throw ConfigError("detect.beta must be finite and > 0");
    }
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["embed"] = {
        {"kind", embed.kind == EmbedderKind::BuiltinHash ? "builtin" : "http"},
        {"dimension", embed.dimension},
        {"ngram_min", embed.ngram_min},
        {"ngram_max", embed.ngram_max},
        {"normalize", embed.normalize},
        {"endpoint", embed.endpoint},
        {"model", embed.model},
        {"timeout_sec", embed.timeout_sec},
    };
    j["proposal"] = {
        {"mode", proposal_mode},
        {"endpoint", proposal.endpoint},
        {"model", proposal.model},
        {"max_unit_tokens", proposal.max_unit_tokens},
        {"timeout_sec", proposal.timeout_sec},
    };
    j["chain"] = {
        {"beta", chain.beta},
        {"t_max", chain.t_max},
        {"epsilon", chain.epsilon},
        {"seed", chain.seed},
        {"revision_directive", chain.revision_directive},
    };
    if (chain.tau_override) j["chain"]["tau_override"] = *chain.tau_override;
    j["analysis"] = {
        {"epsilon", analysis.epsilon},
        {"max_steps", analysis.max_steps},
        {"replicas", analysis.replicas},
        {"variant", analysis.variant},
    };
    j["detect"] = {
        {"per_class", detect.per_class},
        {"units_per_item", detect.units_per_item},
        {"word_noise", detect.word_noise},
        {"token_positions", detect.token_positions},
        {"token_vocab", detect.token_vocab},
        {"seed", detect.seed},
        {"beta", detect_beta},
    };
    return j;
}

}  // namespace carol
