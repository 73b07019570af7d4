#pragma once

// JSON configuration and report serialization.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isospec/lattice.hpp"
#include "isospec/llmult.hpp"
#include "isospec/obstruction.hpp"

namespace isospec {

using Json = nlohmann::ordered_json;

struct EnumerationConfig {
    std::int64_t height_bound = 60;
    std::int64_t trace_bound = 30;
    int margin_factor = 3;
    unsigned threads = 0;
};

struct ObstructionConfig {
    int radius = 3;
    int precision = 3;
};

struct RunConfig {
    Rat a{-1}, b{3};
    /// Optional Z-basis of the starting order, rows in the standard basis
    /// 1, i, j, ij.  Defaults to Z<1, i, j, ij>; always maximalized.
    std::optional<std::array<QuatElement, 4>> order;
    std::optional<std::int64_t> v0;
    std::vector<LocalLevel> locals;
    std::vector<LocalConjugator> conjugator;
    EnumerationConfig enumeration;
    ObstructionConfig obstruction;
    std::optional<std::string> cache_dir;
    std::string output = "json";
    /// Verdict the configuration is expected to produce.  Without it only
    /// NonIsometric counts as success, except for the identity conjugator.
    std::optional<Verdict> expect_verdict;
};

/// Accepts an integer, or a string "p/q" or "p".
Rat parse_rational(const Json& j);
Json rational_json(const Rat& r);

RunConfig parse_run_config(const Json& j);
RunConfig load_run_config(const std::filesystem::path& path);
Json to_json(const RunConfig& c);

/// Everything that determines the lattice slices (algebra, order, level,
/// conjugator), as a canonical string.
std::string lattice_key(const RunConfig& c);

QuaternionAlgebra make_algebra(const RunConfig& c);
/// Maximal order containing the configured order.
Order make_order(const RunConfig& c);
GlobalLevel make_level(const RunConfig& c, const Order& maximal);
Conjugator make_conjugator(const RunConfig& c);

// Reports ------------------------------------------------------------------

Json algebra_json(const QuaternionAlgebra& D);
Json order_json(const Order& o);
Json coords_json(const Coords& c);
/// Lengths printed with 10 significant digits.
Json spectrum_json(const TraceSpectrum& s);
Json comparison_json(const SpectrumComparison& c);
Json torsion_json(const TorsionReport& t);
Json h3_json(const H3Report& r);
Json bound_json(const NormClassBound& b);
Json certificate_json(const Certificate& c);
Json sweep_json(const SweepReport& r);

DihedralDatum parse_datum(const Json& j);
KDatum parse_kdatum(const Json& j);
Json identity_json(const IdentityReport& r);

/// Compact human-readable rendering of a report object.
std::string render_text(const Json& report, int indent = 0);

}  // namespace isospec
