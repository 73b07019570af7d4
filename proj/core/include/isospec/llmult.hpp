#pragma once

// Combinatorics of dihedral L-packets for SL_1(D): local pairings, the
// Labesse-Langlands multiplicity formula and the multiplicity-matching
// identity sum m(Pi) dim(Pi^K) = sum m(Pi) dim(Pi^{K^x}).

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "isospec/error.hpp"

namespace isospec {

enum class ComponentGroupKind { Trivial, Z2, Z2xZ2 };

struct ComponentGroup {
    ComponentGroupKind kind = ComponentGroupKind::Trivial;

    int order() const;
    /// Elements as bit vectors over F2: 0 is the identity, 1 is epsilon in Z2.
    std::vector<unsigned> elements() const;
};

enum class PairingMode {
    Nondegenerate,  // two members, <1, pi> = 1 and <eps, pi> = sign
    Exceptional,    // one member, <1, pi> = 2 and <s, pi> = 0 for s != 1
    Singleton,      // one member, pairing identically 1
};

std::string to_string(PairingMode mode);
PairingMode parse_pairing_mode(const std::string& name);

struct LocalPlaceDatum {
    int place = 0;
    bool split_for_D = true;
    bool ratio_quadratic = false;  // theta^sigma / theta quadratic at w
    bool ratio_trivial = false;
    PairingMode mode = PairingMode::Nondegenerate;

    ComponentGroup component_group() const;
    int packet_size() const { return mode == PairingMode::Nondegenerate ? 2 : 1; }
};

enum class GlobalType { APrime, ADoublePrime, B };

std::string to_string(GlobalType type);
GlobalType parse_global_type(const std::string& name);

/// Type from the global ratio flag and the local data; checks admissibility.
GlobalType classify_type(bool global_ratio_quadratic, const std::vector<LocalPlaceDatum>& places);

struct DihedralDatum {
    GlobalType type = GlobalType::ADoublePrime;
    int d = 1;
    std::vector<LocalPlaceDatum> places;  // unlisted places are Singleton
    int v0 = 0;

    const LocalPlaceDatum& at(int place) const;
    std::vector<int> nondegenerate_places() const;
    int exceptional_count() const;
    /// Throws ConfigError naming the offending place or rule.
    void validate() const;
};

/// Sign (+1 or -1) at every Nondegenerate place.
using PacketChoice = std::map<int, int>;

/// All choices, in lexicographic order of the sign vector (+ before -).
std::vector<PacketChoice> all_choices(const DihedralDatum& datum);

/// Multiplicity of the automorphic representation with local members `choice`.
/// Throws ArithmeticError("inconsistent datum ...") when the formula is not integral.
std::int64_t multiplicity(const DihedralDatum& datum, const PacketChoice& choice);

/// Negates the signs at `flips`, which must be Nondegenerate places.
PacketChoice conjugate_choice(const DihedralDatum& datum, const PacketChoice& choice, const std::vector<int>& flips);

/// Pi -> Pi' for type a'': conjugate away from v0; at v0 keep the sign when
/// |flips \ {v0}| is even and switch it when odd.
PacketChoice pi_prime(const DihedralDatum& datum, const PacketChoice& choice, const std::vector<int>& flips);

/// dim of K-fixed vectors per place and member: index 0 is the + member, 1 the - member.
/// Single-member places use index 0.  Places missing from the map have dim 1.
struct KDatum {
    std::map<int, std::array<int, 2>> dims;
    int dim(int place, int member) const;
};

struct IdentityReport {
    std::int64_t lhs = 0;  // sum m(Pi) dim(Pi^K)
    std::int64_t rhs = 0;  // sum m(Pi) dim(Pi^{K^x})
    bool equal = false;
    bool witness_ok = false;  // m(Pi') = m(Pi) and dim(Pi'^K) = dim(Pi^{K^x}) for every Pi
    std::vector<std::pair<PacketChoice, PacketChoice>> witness;
};

IdentityReport verify_identity(const DihedralDatum& datum, const KDatum& k, const std::vector<int>& flips);

struct SweepOptions {
    int max_places = 5;
    std::vector<int> d_values{1, 2, 4};
    std::vector<int> dim_values{0, 1, 2};
    unsigned threads = 0;  // 0 = hardware concurrency
};

struct SweepReport {
    std::uint64_t shapes = 0;       // admissible (type, local data) shapes
    std::uint64_t data = 0;         // shapes times d values
    std::uint64_t identities = 0;   // verify_identity evaluations
    std::uint64_t violations = 0;
    std::uint64_t witness_failures = 0;
    std::uint64_t negative_multiplicities = 0;
    std::uint64_t injectivity_failures = 0;
    std::array<std::uint64_t, 3> by_type{};  // a', a'', b
    std::vector<std::string> first_violations;  // at most a few, for diagnosis
};

/// Every admissible datum with 2..max_places places (v0 first, non-split;
/// an even number of non-split places), every flip set and every dim
/// assignment respecting equal dims at v0.
SweepReport sweep(const SweepOptions& options);

}  // namespace isospec
