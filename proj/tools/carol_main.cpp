// carol: command-line surface over the library. Subcommands: context
// build|show, cluster, detect, mitigate, analyze. Outputs are deterministic
// for fixed (config, seed, inputs) in mock mode. Exit codes: 2 config/input,
// 3 provider, 4 I/O, 1 anything else.

#include "carol/analysis.hpp"
#include "carol/chain.hpp"
#include "carol/cluster.hpp"
#include "carol/config.hpp"
#include "carol/context.hpp"
#include "carol/detect.hpp"
#include "carol/embed.hpp"
#include "carol/objective.hpp"
#include "carol/proposal.hpp"
#include "carol/types.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace {

using carol::Scalar;
namespace fs = std::filesystem;

struct CliOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string context_path;
    std::string pool_path;
    std::string out_dir = ".";
    std::string input_path;   // context build
    std::string query = "Tell me about the trusted context.";
    std::optional<int> k;     // cluster: greedy medoid count
};

carol::RunConfig effective_config(const CliOptions& opt) {
    carol::RunConfig cfg =
        opt.config_path.empty() ? carol::default_config() : carol::load_config(opt.config_path);
    carol::apply_env_overrides(cfg);
    if (opt.seed) {
        cfg.chain.seed = *opt.seed;
        cfg.detect.seed = *opt.seed;
    }
    carol::validate_config(cfg);
    return cfg;
}

carol::Context require_context(const CliOptions& opt, const carol::Embedder& embedder) {
    if (opt.context_path.empty()) throw carol::ConfigError("--context is required");
    carol::ContextLoadResult loaded =
        carol::load_context_checked(opt.context_path, embedder.fingerprint());
    if (loaded.fingerprint_warning) {
        std::cerr << "warning: context was embedded with '" << loaded.context.embedder_fingerprint
                  << "' but the active embedder is '" << embedder.fingerprint() << "'\n";
    }
    return std::move(loaded.context);
}

carol::CandidatePool require_pool(const CliOptions& opt, const carol::Embedder& embedder) {
    if (opt.pool_path.empty()) throw carol::ConfigError("--pool is required");
    return carol::load_pool(opt.pool_path, embedder);
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw carol::IoError("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw carol::IoError("write failed: " + path.string());
}

nlohmann::json eval_to_json(const carol::ObjectiveEval& eval) {
    nlohmann::json j;
    j["se_prior"] = eval.se_prior;
    j["se_posterior"] = eval.se_posterior;
    j["mutual_info"] = eval.mutual_info;
    j["beta"] = eval.beta;
    j["cluster_masses"] = std::vector<Scalar>(
        eval.cluster_masses.data(), eval.cluster_masses.data() + eval.cluster_masses.size());
    return j;
}

nlohmann::json step_to_json(const carol::StepRecord& rec) {
    nlohmann::json j;
    j["step"] = rec.step;
    j["candidate"] = {{"text", rec.candidate.text},
                      {"origin", carol::to_string(rec.candidate.origin)}};
    j["delta_f"] = rec.delta_f;
    j["p_add"] = rec.p_add;
    j["z"] = rec.z;
    j["accepted"] = rec.accepted;
    if (rec.revision_applied) j["revision_applied"] = *rec.revision_applied;
    return j;
}

std::string trace_to_jsonl(const std::vector<carol::StepRecord>& trace) {
    std::string out;
    for (const carol::StepRecord& rec : trace) {
        out += step_to_json(rec).dump();
        out += '\n';
    }
    return out;
}

nlohmann::json mixing_report_to_json(const carol::MixingReport& report) {
    nlohmann::json j;
    j["gamma_bar"] = report.gamma_bar;
    j["q_min"] = report.q_min;
    j["q_max"] = report.q_max;
    j["n"] = report.n;
    j["epsilon"] = report.epsilon;
    j["denominator_positive"] = report.denominator_positive;
    if (report.tau_theorem) j["tau_theorem"] = *report.tau_theorem;
    j["bound_variant"] = report.bound_variant;
    if (report.empirical_tmix) j["empirical_tmix"] = *report.empirical_tmix;
    j["tv_curve"] = nlohmann::json::array();
    for (const auto& [step, tv] : report.tv_curve) {
        j["tv_curve"].push_back({step, tv});
    }
    j["notes"] = report.notes;
    return j;
}

carol::BoundVariant variant_from_string(const std::string& name) {
    return name == "coupling-derivation" ? carol::BoundVariant::CouplingDerivation
                                         : carol::BoundVariant::TheoremStatement;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_context_build(const CliOptions& opt) {
    const carol::RunConfig cfg = effective_config(opt);
    if (opt.input_path.empty()) throw carol::ConfigError("--input is required");

    std::ifstream in(opt.input_path);
    if (!in) throw carol::IoError("cannot open input file: " + opt.input_path);
    std::vector<std::string> statements;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r\n") != std::string::npos) statements.push_back(line);
    }

    const carol::Embedder embedder(cfg.embed);
    const carol::Context ctx = carol::build_context(statements, embedder);
    const fs::path out_path = fs::path(opt.out_dir) / "context.jsonl";
    fs::create_directories(opt.out_dir);
    carol::save_context(ctx, out_path.string());
    std::cout << "wrote " << ctx.size() << " axioms to " << out_path.string() << "\n";
    return 0;
}

int cmd_context_show(const CliOptions& opt) {
    const carol::RunConfig cfg = effective_config(opt);
    const carol::Embedder embedder(cfg.embed);
    const carol::Context ctx = require_context(opt, embedder);
    std::cout << "embedder: " << ctx.embedder_fingerprint << "\n";
    std::cout << "axioms: " << ctx.size() << "\n";
    for (const carol::Axiom& ax : ctx.axioms) {
        std::cout << ax.id << "  " << ax.text << "\n";
    }
    return 0;
}

int cmd_cluster(const CliOptions& opt) {
    const carol::RunConfig cfg = effective_config(opt);
    const carol::Embedder embedder(cfg.embed);
    const carol::Context ctx = require_context(opt, embedder);
    const carol::CandidatePool pool = require_pool(opt, embedder);

    std::vector<carol::SemanticUnit> medoids;
    if (opt.k) {
        medoids = carol::greedy_medoids(ctx, pool.candidates, *opt.k);
    } else {
        medoids = pool.candidates;
    }

    const carol::Clustering clustering = carol::cluster_full(ctx, medoids, cfg.chain.beta);
    nlohmann::json j;
    j["medoids"] = nlohmann::json::array();
    for (const carol::SemanticUnit& unit : medoids) j["medoids"].push_back(unit.text);
    j["assignment"] = clustering.assignment;
    j["soft"] = nlohmann::json::object();
    for (const auto& [id, probs] : clustering.soft) {
        j["soft"][id] = std::vector<Scalar>(probs.data(), probs.data() + probs.size());
    }
    j["beta"] = cfg.chain.beta;
    j["facility_location"] = carol::facility_location_value(ctx, medoids);

    fs::create_directories(opt.out_dir);
    const fs::path out_path = fs::path(opt.out_dir) / "clustering.json";
    write_text_file(out_path, j.dump(2) + "\n");
    std::cout << "wrote " << out_path.string() << "\n";
    return 0;
}

nlohmann::json metrics_to_json(const carol::DetectionMetrics& m) {
    nlohmann::json j;
    j["counts"] = {{"tp", m.tp}, {"tn", m.tn}, {"fp", m.fp}, {"fn", m.fn}};
    j["accuracy"] = m.accuracy;
    if (m.precision) j["precision"] = *m.precision;
    if (m.recall) j["recall"] = *m.recall;
    if (m.specificity) j["specificity"] = *m.specificity;
    if (m.f1) j["f1"] = *m.f1;
    if (m.fpr) j["fpr"] = *m.fpr;
    if (m.auc) j["auc"] = *m.auc;
    if (m.chosen_threshold) j["chosen_threshold"] = *m.chosen_threshold;
    return j;
}

int cmd_detect(const CliOptions& opt) {
    const carol::RunConfig cfg = effective_config(opt);
    const carol::Embedder embedder(cfg.embed);

    carol::Context ctx;
    if (!opt.context_path.empty()) {
        ctx = require_context(opt, embedder);
    } else {
        ctx = carol::build_context(carol::fixture_axioms(), embedder);
    }

    const std::vector<carol::CorpusItem> corpus = carol::synthetic_corpus(cfg.detect);
    const carol::DetectionOutcome outcome =
        carol::detect_corpus(ctx, corpus, embedder, cfg.detect_beta);

    nlohmann::json j;
    j["items"] = corpus.size();
    j["semantic"] = metrics_to_json(outcome.semantic);
    if (outcome.token) j["token"] = metrics_to_json(*outcome.token);
    j["config"] = cfg.to_json();

    fs::create_directories(opt.out_dir);
    write_text_file(fs::path(opt.out_dir) / "detection_report.json", j.dump(2) + "\n");

    std::string csv = "index,label,semantic_score,token_score\n";
    for (std::size_t i = 0; i < outcome.labels.size(); ++i) {
        csv += std::to_string(i) + "," + (outcome.labels[i] ? "1" : "0") + "," +
               std::to_string(outcome.semantic_scores[i]) + "," +
               (outcome.token_scores.empty() ? "" : std::to_string(outcome.token_scores[i])) +
               "\n";
    }
    write_text_file(fs::path(opt.out_dir) / "detection_scores.csv", csv);

    std::cout << "semantic auc: " << *outcome.semantic.auc;
    if (outcome.token) std::cout << "  token auc: " << *outcome.token->auc;
    std::cout << "\n";
    return 0;
}

int cmd_mitigate(const CliOptions& opt) {
    const carol::RunConfig cfg = effective_config(opt);
    const carol::Embedder embedder(cfg.embed);
    const carol::Context ctx = require_context(opt, embedder);

    std::unique_ptr<carol::ProposalSource> proposal;
    if (cfg.proposal_mode == "http") {
        carol::HttpProposalConfig pc = cfg.proposal;
        for (const carol::Axiom& ax : ctx.axioms) pc.grounding.push_back(ax.text);
        proposal = std::make_unique<carol::HttpProposal>(pc, embedder);
    } else {
        proposal = std::make_unique<carol::MockProposal>(require_pool(opt, embedder),
                                                         cfg.chain.seed, /*stream=*/0);
    }

    fs::create_directories(opt.out_dir);
    const fs::path trace_path = fs::path(opt.out_dir) / "trace.jsonl";
    const fs::path response_path = fs::path(opt.out_dir) / "response.txt";
    const fs::path report_path = fs::path(opt.out_dir) / "report.json";

    carol::ChainResult result;
    try {
        result = carol::run_chain(opt.query, ctx, *proposal, cfg.chain);
    } catch (const carol::ChainAbortError& abort) {
        // Persist what the chain completed before the provider failed.
        write_text_file(trace_path, trace_to_jsonl(abort.partial_trace()));
        nlohmann::json j;
        j["error"] = abort.what();
        j["completed_steps"] = abort.state().step;
        write_text_file(report_path, j.dump(2) + "\n");
        throw;
    }

    std::string response_text;
    for (const carol::SemanticUnit& unit : result.response()) {
        response_text += unit.text;
        response_text += '\n';
    }
    write_text_file(response_path, response_text);
    write_text_file(trace_path, trace_to_jsonl(result.trace));

    nlohmann::json j;
    j["query"] = opt.query;
    j["response"] = nlohmann::json::array();
    for (const carol::SemanticUnit& unit : result.response()) j["response"].push_back(unit.text);
    j["final_eval"] = eval_to_json(result.final_eval);
    j["hallucination_score"] =
        carol::hallucination_score(ctx, result.response(), cfg.chain.beta);
    j["tau_used"] = result.tau_used;
    j["tau_source"] = result.tau_source;
    j["warnings"] = result.warnings;
    j["config"] = cfg.to_json();
    write_text_file(report_path, j.dump(2) + "\n");

    std::cout << "accepted " << result.response().size() << " of " << result.trace.size()
              << " candidates; I = " << result.final_eval.mutual_info << "\n";
    return 0;
}

int cmd_analyze(const CliOptions& opt) {
    const carol::RunConfig cfg = effective_config(opt);
    const carol::Embedder embedder(cfg.embed);
    const carol::Context ctx = require_context(opt, embedder);
    const carol::CandidatePool pool = require_pool(opt, embedder);

    const carol::BoundVariant variant = variant_from_string(cfg.analysis.variant);
    const carol::MixingReport report = carol::empirical_mixing(
        ctx, pool, cfg.chain.beta, cfg.analysis.epsilon, cfg.analysis.max_steps,
        cfg.analysis.replicas, cfg.chain.seed, variant);

    fs::create_directories(opt.out_dir);
    nlohmann::json j = mixing_report_to_json(report);
    j["config"] = cfg.to_json();

    const std::vector<Scalar> stationary =
        carol::enumerate_stationary(ctx, pool, cfg.chain.beta);
    j["stationary"] = stationary;

    if (pool.size() <= 8) {
        const std::vector<carol::SubmodularityViolation> violations =
            carol::check_string_submodularity(ctx, pool, cfg.chain.beta);
        nlohmann::json v = nlohmann::json::array();
        for (const carol::SubmodularityViolation& violation : violations) {
            v.push_back({{"base_mask", violation.base_mask},
                         {"super_mask", violation.super_mask},
                         {"candidate", violation.candidate},
                         {"gain_base", violation.gain_base},
                         {"gain_super", violation.gain_super},
                         {"slack", violation.slack}});
        }
        j["submodularity_violations"] = v;
    }

    write_text_file(fs::path(opt.out_dir) / "mixing_report.json", j.dump(2) + "\n");

    std::string csv = "step,tv\n";
    for (const auto& [step, tv] : report.tv_curve) {
        csv += std::to_string(step) + "," + std::to_string(tv) + "\n";
    }
    write_text_file(fs::path(opt.out_dir) / "tv_curve.csv", csv);

    std::cout << "gamma_bar = " << report.gamma_bar
              << ", denominator_positive = " << (report.denominator_positive ? "true" : "false");
    if (report.tau_theorem) std::cout << ", tau = " << *report.tau_theorem;
    if (report.empirical_tmix) std::cout << ", empirical_tmix = " << *report.empirical_tmix;
    std::cout << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entailment-clustered context pipeline: detect and mitigate "
                 "hallucinated statements against a trusted context."};
    app.require_subcommand(1);
    app.fallthrough();

    CliOptions opt;
    app.add_option("--config", opt.config_path, "TOML-style config file");
    app.add_option("--seed", opt.seed, "Override chain/detect seed");
    app.add_option("--context", opt.context_path, "Context JSONL path");
    app.add_option("--pool", opt.pool_path, "Candidate pool JSONL path");
    app.add_option("--out-dir", opt.out_dir, "Output directory (default .)");

    CLI::App* context_cmd = app.add_subcommand("context", "Build or inspect a trusted context");
    CLI::App* context_build = context_cmd->add_subcommand("build", "Embed statements into a context file");
    context_build->add_option("--input", opt.input_path, "Plain text, one statement per line");
    CLI::App* context_show = context_cmd->add_subcommand("show", "Print a context file");
    context_cmd->require_subcommand(1);

    CLI::App* cluster_cmd = app.add_subcommand("cluster", "Cluster the context around pool units");
    cluster_cmd->add_option("--k", opt.k, "Select k greedy medoids first");

    CLI::App* detect_cmd = app.add_subcommand("detect", "Run the synthetic detection harness");
    CLI::App* mitigate_cmd = app.add_subcommand("mitigate", "Run the accept/reject chain");
    mitigate_cmd->add_option("--query", opt.query, "User query");
    CLI::App* analyze_cmd = app.add_subcommand("analyze", "Curvature, bounds, and mixing");

    CLI11_PARSE(app, argc, argv);

    try {
        if (context_build->parsed()) return cmd_context_build(opt);
        if (context_show->parsed()) return cmd_context_show(opt);
        if (cluster_cmd->parsed()) return cmd_cluster(opt);
        if (detect_cmd->parsed()) return cmd_detect(opt);
        if (mitigate_cmd->parsed()) return cmd_mitigate(opt);
        if (analyze_cmd->parsed()) return cmd_analyze(opt);
    } catch (const carol::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const carol::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const carol::ProviderError& e) {
        std::cerr << "provider error: " << e.what() << "\n";
        return 3;
    } catch (const carol::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
