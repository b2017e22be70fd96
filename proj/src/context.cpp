#include "carol/context.hpp"

#include "carol/semantics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

namespace carol {

namespace {

using nlohmann::json;

bool is_blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

std::string make_axiom_id(std::size_t index) {
    std::ostringstream os;
    os << "ax-" << std::setw(4) << std::setfill('0') << (index + 1);
    return os.str();
}

}  // namespace

Context build_context(const std::vector<std::string>& statements, const Embedder& embedder) {
    if (statements.empty()) {
        throw InputError("build_context: no statements given");
    }
    if (std::all_of(statements.begin(), statements.end(),
                    [](const std::string& s) { return is_blank(s); })) {
        throw InputError("build_context: every statement is blank");
    }

    const std::vector<Vector> embeddings = embedder.embed_batch(statements);
    Context ctx;
    ctx.embedder_fingerprint = embedder.fingerprint();
    ctx.axioms.reserve(statements.size());
    for (std::size_t i = 0; i < statements.size(); ++i) {
        ctx.axioms.push_back({make_axiom_id(i), statements[i], embeddings[i]});
    }
    return ctx;
}

Context retrieve_topk(const Context& ctx, const Vector& query, std::size_t k) {
    if (ctx.axioms.empty()) throw InputError("retrieve_topk: empty context");
    if (k == 0) throw InputError("retrieve_topk: k must be >= 1");
    if (k >= ctx.size()) return ctx;

    std::vector<std::size_t> order(ctx.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<Scalar> dist(ctx.size());
    for (std::size_t i = 0; i < ctx.size(); ++i) {
        dist[i] = entailment_distance(query, ctx.axioms[i].embedding);
    }
    // Stable ordering: distance first, original index as the tie-break.
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (dist[a] != dist[b]) return dist[a] < dist[b];
        return a < b;
    });
    order.resize(k);
    std::sort(order.begin(), order.end());  // keep original axiom order

    Context out;
    out.embedder_fingerprint = ctx.embedder_fingerprint;
    out.axioms.reserve(k);
    for (std::size_t i : order) out.axioms.push_back(ctx.axioms[i]);
    return out;
}

void save_context(const Context& ctx, const std::string& path) {
    std::ofstream file(path);
    if (!file) throw IoError("cannot open for writing: " + path);

    file << json{{"embedder_fingerprint", ctx.embedder_fingerprint}}.dump() << "\n";
    for (const Axiom& ax : ctx.axioms) {
        json line = {{"id", ax.id}, {"text", ax.text}, {"embedding", json::array()}};
        for (Eigen::Index i = 0; i < ax.embedding.size(); ++i) {
            line["embedding"].push_back(ax.embedding(i));
        }
        file << line.dump() << "\n";
    }
    if (!file) throw IoError("write failed: " + path);
}

Context load_context(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open for reading: " + path);

    Context ctx;
    std::string line;
    std::size_t line_no = 0;
    std::set<std::string> seen_ids;
    Eigen::Index dim = -1;
    while (std::getline(file, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(std::string("context record is not JSON: ") + e.what(), line_no);
        }
        if (line_no == 1 && record.contains("embedder_fingerprint")) {
            if (!record["embedder_fingerprint"].is_string()) {
                throw ParseError("embedder_fingerprint must be a string", line_no);
            }
            ctx.embedder_fingerprint = record["embedder_fingerprint"].get<std::string>();
            continue;
        }
        if (!record.contains("id") || !record["id"].is_string() || !record.contains("text") ||
            !record["text"].is_string() || !record.contains("embedding") ||
            !record["embedding"].is_array()) {
            throw ParseError("context record needs string id, string text, array embedding",
                             line_no);
        }
        Axiom ax;
        ax.id = record["id"].get<std::string>();
        ax.text = record["text"].get<std::string>();
        if (ax.text.empty() || is_blank(ax.text)) {
            throw ParseError("axiom text is blank", line_no);
        }
        if (!seen_ids.insert(ax.id).second) {
            throw ParseError("duplicate axiom id: " + ax.id, line_no);
        }
        const auto& arr = record["embedding"];
        if (arr.empty()) throw ParseError("empty embedding", line_no);
        ax.embedding.resize(static_cast<Eigen::Index>(arr.size()));
        for (std::size_t i = 0; i < arr.size(); ++i) {
            if (!arr[i].is_number()) throw ParseError("non-numeric embedding coordinate", line_no);
            ax.embedding(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
        }
        if (dim < 0) {
            dim = ax.embedding.size();
        } else if (ax.embedding.size() != dim) {
            throw ParseError("embedding dimension differs from earlier records", line_no);
        }
        ctx.axioms.push_back(std::move(ax));
    }
    if (ctx.axioms.empty()) {
        throw ParseError("context file holds no axiom records", line_no == 0 ? 1 : line_no);
    }
    return ctx;
}

ContextLoadResult load_context_checked(const std::string& path,
                                       const std::string& expected_fingerprint) {
    ContextLoadResult result;
    result.context = load_context(path);
    result.fingerprint_warning =
        !result.context.embedder_fingerprint.empty() &&
        result.context.embedder_fingerprint != expected_fingerprint;
    return result;
}

}  // namespace carol
