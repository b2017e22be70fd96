// Core dense types, domain records, and the error hierarchy shared by every
// module. The math surface is Eigen-only: vectors and matrices are aliases of
// Eigen dense types on a single Scalar alias, and downstream free functions
// accept Eigen expressions wherever practical.

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace carol {

// ============================================================================
// DENSE TYPES
// ============================================================================

using Scalar = double;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// ============================================================================
// DOMAIN RECORDS
// ============================================================================

// Lifecycle tag of a semantic unit: "fixture" = built directly from caller
// or fixture text (pool entries, scored responses), "proposed" = emitted by
// a proposal source this step, "accepted" = appended to a chain's response.
enum class UnitOrigin { Proposed, Accepted, Fixture };

inline const char* to_string(UnitOrigin o) {
    switch (o) {
        case UnitOrigin::Proposed: return "proposed";
        case UnitOrigin::Accepted: return "accepted";
        default: return "fixture";
    }
}

inline UnitOrigin unit_origin_from_string(const std::string& s) {
    if (s == "proposed") return UnitOrigin::Proposed;
    if (s == "accepted") return UnitOrigin::Accepted;
    return UnitOrigin::Fixture;
}

// One candidate or accepted response statement: raw text plus its embedding.
struct SemanticUnit {
    std::string text;
    Vector embedding;
    UnitOrigin origin = UnitOrigin::Fixture;
};

// One trusted statement x in the grounding set Γ.
struct Axiom {
    std::string id;    // stable identifier, e.g. "ax-0001"
    std::string text;
    Vector embedding;
};

// The trusted grounding set Γ together with the fingerprint of the embedder
// configuration that produced the stored embeddings. Loading a context whose
// fingerprint differs from the active configuration is legal but flagged.
struct Context {
    std::vector<Axiom> axioms;
    std::string embedder_fingerprint;

    std::size_t size() const { return axioms.size(); }
};

// ============================================================================
// ERRORS
// ============================================================================
//
// Each class maps to one CLI exit code: config/input = 2, provider = 3,
// I/O and parse = 4.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller handed us something malformed (bad dimension, empty text, invalid
// probability vector, out-of-range parameter).
struct InputError : Error {
    using Error::Error;
};

// Input is well-formed but mathematically degenerate (zero-norm embedding
// where a direction is required).
struct DegenerateInputError : InputError {
    using InputError::InputError;
};

// Bad or contradictory configuration (file or flags).
struct ConfigError : Error {
    using Error::Error;
};

// An external provider failed: unreachable endpoint, non-2xx status, or a
// response that does not match the documented shape.
struct ProviderError : Error {
    explicit ProviderError(const std::string& what, int status = 0)
        : Error(what), status_code(status) {}
    int status_code;  // HTTP status, 0 when the transport itself failed
};

// Filesystem-level failure (cannot open / read / write).
struct IoError : Error {
    using Error::Error;
};

// A file opened fine but its contents are malformed; carries the 1-based
// line number at which parsing failed.
struct ParseError : IoError {
    ParseError(const std::string& what, std::size_t line_no)
        : IoError(what + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
    std::size_t line;
};

}  // namespace carol
