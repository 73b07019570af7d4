#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isospec/levels.hpp"

namespace isospec {

using RatMat2 = std::array<Rat, 4>;  // row-major

/// A subgroup of Q_p^x / squares, stored as a sorted list of canonical classes.
struct ClassSubgroup {
    Place place;
    std::vector<SquareClass> classes;

    bool contains(const SquareClass& c) const;
    int dimension() const;  // log2 of the order
    /// Smallest subgroup containing `classes`.
    static ClassSubgroup generated_by(Place place, const std::vector<SquareClass>& gens);
};

struct NormalizerWitness {
    SquareClass square_class;
    RatMat2 matrix;  // primitive integral normalizer in adapted split coordinates
};

/// Square classes of det over the normalizer of K_p in PGL_2(Q_p).
struct NormClassBound {
    std::int64_t p = 0;
    ClassSubgroup certified_lower;
    ClassSubgroup assumed_upper;
    int radius = 0;
    bool exact = false;
    std::vector<NormalizerWitness> witnesses;
    /// Human-readable account of how each class was settled.
    std::vector<std::string> notes;
};

/// Topological generators of the split catalog group K_p inside SL_2(Z_p),
/// as integer matrices congruent to group elements modulo p^work.
std::vector<std::array<Integer, 4>> split_level_generators(const LocalLevel& level, int work);

/// Exact test that n K_p n^{-1} = K_p, with n an invertible rational matrix.
bool normalizes(const LocalLevel& level, const RatMat2& n);

/// Certified classes come from verified normalizers.  Exclusions use the
/// fixed-point subtree of K_p in the Bruhat-Tits tree (searched to radius R):
/// a normalizer fixes its center, so a vertex center forbids odd valuations,
/// and unit classes are settled by exhaustive search modulo p^precision.
NormClassBound normalizer_norm_classes(const LocalLevel& level, int radius, int precision);

/// F2 quotient Q = (sum_{p in S} V_p / U_p) / <loc_S(r) : r in relations>.
struct ObstructionGroup {
    std::vector<std::int64_t> support;    // S, ascending
    std::vector<NormClassBound> bounds;   // aligned with support
    std::vector<Rat> relations;           // global rationals whose classes are killed
    int ambient_dimension = 0;            // sum of local ranks
    int rank = 0;
    /// Coordinates of ambient positions; offsets[i] is the first bit of support[i].
    std::vector<int> offsets;

    /// Ambient F2 vector of a family of local classes (one per support prime).
    std::uint64_t embed(const std::vector<SquareClass>& local) const;
    /// Image in Q, as coordinates on the quotient basis (size = rank).
    std::vector<int> reduce(std::uint64_t ambient) const;
    bool is_zero(std::uint64_t ambient) const;

    std::vector<std::uint64_t> kernel_basis;  // reduced echelon basis of the killed subspace
    std::vector<int> free_positions;          // ambient positions spanning Q
};

/// Builds Q from explicit relation rationals.
ObstructionGroup build_obstruction_group(std::vector<NormClassBound> bounds, std::vector<Rat> relations);

/// Relations for a level: -1, every prime in S and every finite ramified prime.
ObstructionGroup obstruction_group(const GlobalLevel& level, std::vector<NormClassBound> bounds);

enum class Verdict { NonIsometric, Inconclusive };
std::string to_string(Verdict v);

struct Certificate {
    Conjugator x;
    std::uint64_t ambient_class = 0;
    std::vector<int> class_vector;
    std::vector<SquareClass> local_classes;  // aligned with the support
    Verdict verdict = Verdict::Inconclusive;
    std::vector<std::string> assumptions;
    ObstructionGroup group;
};

/// Non-isometry certificate for the pair (Gamma_K, Gamma_{K^x}).
Certificate certify(const GlobalLevel& level, const Conjugator& x, const ObstructionGroup& group);

/// Convenience: bounds at every leveled split prime, group and certificate.
Certificate certify(const GlobalLevel& level, const Conjugator& x, int radius, int precision);

}  // namespace isospec
