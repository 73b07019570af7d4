#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "isospec/levels.hpp"

namespace isospec {

using Coords = std::array<std::int64_t, 4>;

/// All gamma = sum c_t e_t with |c_t| <= B and nrd(gamma) = 1, sorted
/// lexicographically.  Three coordinates are scanned and the fourth solved
/// from the quadratic it satisfies; the scan is split across `threads`
/// workers (0 = hardware concurrency).
std::vector<Coords> solve_norm_one(const Order& order, std::int64_t height_bound, unsigned threads = 0);

/// Same enumeration, keeping only coordinates accepted by `keep`.  `keep`
/// is called concurrently and must be thread-safe.
std::vector<Coords> solve_norm_one_filtered(const Order& order, std::int64_t height_bound,
                                            const std::function<bool(const Coords&)>& keep, unsigned threads = 0);

struct LatticeSlice {
    std::int64_t height_bound = 0;
    bool conjugated = false;
    std::vector<Coords> elements;  // order-basis coordinates, sorted
};

LatticeSlice enumerate_lattice(const GlobalLevel& level, const Conjugator& x, std::int64_t height_bound,
                               unsigned threads = 0);

enum class TraceKind { Elliptic, Parabolic, Hyperbolic };  // t < 2, t = 2, t > 2
std::string to_string(TraceKind kind);

/// Length of the closed geodesic of an element with |trd| = t > 2.
double geodesic_length(std::int64_t t);

struct SpectrumValue {
    std::int64_t t = 0;
    TraceKind kind = TraceKind::Elliptic;
    Coords witness{};
};

struct TraceSpectrum {
    std::int64_t trace_bound = 0;
    std::int64_t height_bound = 0;
    std::vector<SpectrumValue> values;  // ascending in t

    bool contains(std::int64_t t) const;
    std::vector<std::int64_t> traces() const;
};

TraceSpectrum trace_spectrum(const Order& order, const LatticeSlice& slice, std::int64_t trace_bound);

/// One side of a comparison: the lattice it came from and its spectrum.
struct SpectrumSide {
    const GlobalLevel* level = nullptr;
    Conjugator conjugator;
    TraceSpectrum spectrum;
};

struct SpectrumViolation {
    std::int64_t t = 0;
    char present_in = 'A';  // the side that realizes t
    Coords witness{};
    std::int64_t searched_bound = 0;  // height searched on the other side
};

struct SpectrumComparison {
    bool agree = true;
    int margin_factor = 3;
    std::vector<SpectrumViolation> violations;
    /// Values missing at the original height but found after re-search.
    std::vector<std::int64_t> recovered;
};

/// Trace-set agreement.  A value seen on one side only triggers a re-search
/// of the other side at margin_factor times its height bound.
SpectrumComparison compare_spectra(const SpectrumSide& a, const SpectrumSide& b, int margin_factor,
                                   unsigned threads = 0);

struct TorsionReport {
    bool criterion_pass = false;
    std::optional<std::int64_t> criterion_place;  // prime p >= 5 with K_p inside Gamma(p)
    bool scan_clean = true;                       // no gamma != +-1 with |trd| < 2
    std::optional<Coords> elliptic_witness;
    bool contains_minus_one = false;
    std::string detail;
};

TorsionReport torsion_free_check(const GlobalLevel& level, const Order& order, const LatticeSlice& slice);

// ---------------------------------------------------------------------------
// Slice cache: a header line carrying the configuration hash and the height,
// then one element per line as four integers.

std::uint64_t fnv1a64(const std::string& text);
void save_slice(const std::filesystem::path& path, std::uint64_t config_hash, const LatticeSlice& slice);
/// Nullopt when the file is missing, malformed or was written for another configuration.
std::optional<LatticeSlice> load_slice(const std::filesystem::path& path, std::uint64_t config_hash);

}  // namespace isospec
