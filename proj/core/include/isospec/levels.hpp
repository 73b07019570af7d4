#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "isospec/orders.hpp"

namespace isospec {

enum class LevelKind {
    Hyperspecial,
    PrincipalCongruence,
    HeckeCongruence,
    SymmetricCongruence,
    RamifiedFull,
    RamifiedUnitFiltration,
};

std::string to_string(LevelKind kind);
LevelKind parse_level_kind(const std::string& name);
bool is_ramified_kind(LevelKind kind);

/// K_p from the catalog.  `k` is the congruence exponent (the filtration
/// index n for RamifiedUnitFiltration) and is 0 for the parameterless kinds.
struct LocalLevel {
    std::int64_t p = 0;
    LevelKind kind = LevelKind::Hyperspecial;
    int k = 0;

    std::string to_string() const;
    /// Working precision for membership: k + 2.
    int default_precision() const { return k + 2; }
    /// Smallest M with Gamma(p^M) inside K_p (split kinds only).
    int depth() const;

    friend bool operator==(const LocalLevel&, const LocalLevel&) = default;
};

using IntMat2 = std::array<std::int64_t, 4>;  // row-major {a, b, c, d}

IntMat2 mat_mul_mod(const IntMat2& x, const IntMat2& y, std::int64_t m);

/// The split catalog condition on an integral matrix known modulo p^precision.
/// Throws PrecisionError when the condition needs more digits than provided.
bool satisfies_split_level(const LocalLevel& level, const IntMat2& g, int precision);

/// Element x_p of the similitude group at a single prime.  At split primes a
/// rational matrix in the coordinates of the adapted splitting; at ramified
/// primes an element of D.
struct LocalConjugator {
    std::int64_t p = 0;
    std::variant<std::array<Rat, 4>, QuatElement> value;

    bool is_matrix() const { return std::holds_alternative<std::array<Rat, 4>>(value); }
    const std::array<Rat, 4>& matrix() const { return std::get<std::array<Rat, 4>>(value); }
    const QuatElement& element() const { return std::get<QuatElement>(value); }
};

/// Finitely supported x in the finite-adelic similitude group; identity elsewhere.
class Conjugator {
public:
    Conjugator() = default;
    explicit Conjugator(std::vector<LocalConjugator> components);

    const std::map<std::int64_t, LocalConjugator>& components() const { return components_; }
    const LocalConjugator* at(std::int64_t p) const;
    bool is_identity() const { return components_.empty(); }
    /// Inverse componentwise.
    Conjugator inverse(const QuaternionAlgebra& algebra) const;
    /// Reduced norm (determinant) of the component at p, 1 off the support.
    Rat local_norm(std::int64_t p, const QuaternionAlgebra& algebra) const;

private:
    std::map<std::int64_t, LocalConjugator> components_;
};

/// Images of the order basis in M_2(Z/p^precision) under the adapted splitting.
struct SplitTable {
    std::int64_t p = 0;
    int precision = 0;
    std::int64_t modulus = 1;
    std::array<IntMat2, 4> basis_images;

    IntMat2 image(std::span<const std::int64_t, 4> coords) const;
};

/// K = prod_p K_p over a maximal order.  Unlisted split primes are
/// Hyperspecial and unlisted ramified primes RamifiedFull.
class GlobalLevel {
public:
    GlobalLevel(Order order, std::optional<std::int64_t> v0, std::vector<LocalLevel> locals);

    const Order& order() const { return order_; }
    const QuaternionAlgebra& algebra() const { return order_.algebra(); }
    std::optional<std::int64_t> v0() const { return v0_; }
    const std::map<std::int64_t, LocalLevel>& locals() const { return locals_; }
    LocalLevel local(std::int64_t p) const;
    /// Split primes carrying a level other than Hyperspecial.
    std::vector<std::int64_t> leveled_split_primes() const;

    /// Thread-safe cached split table at p.
    const SplitTable& split_table(std::int64_t p, int precision) const;

private:
    Order order_;
    std::optional<std::int64_t> v0_;
    std::map<std::int64_t, LocalLevel> locals_;
    mutable std::mutex cache_mutex_;
    mutable std::map<std::pair<std::int64_t, int>, std::unique_ptr<SplitTable>> tables_;
};

struct H3Report {
    bool pass = false;
    std::int64_t v0 = 0;
    LocalLevel level;
    bool product_form = true;  // every cataloged level is a product of local groups
    QuatElement uniformizer;
    int normality_checks = 0;
    std::string detail;
};

/// H3: K_{v0} is RamifiedFull or a unit filtration, and conjugation by a
/// uniformizer and by unit representatives preserves sampled generators.
H3Report check_h3(const GlobalLevel& level);

/// Order element Pi with v_p(nrd Pi) = 1 of smallest coefficient height.
QuatElement local_uniformizer(const Order& order, std::int64_t p);

bool member(const GlobalLevel& level, const QuatElement& gamma, std::int64_t p);
/// gamma in x K x^{-1} at p, i.e. x_p^{-1} gamma x_p in K_p.
bool conjugated_member(const GlobalLevel& level, const Conjugator& x, const QuatElement& gamma, std::int64_t p);

/// Membership in Gamma_K (or Gamma_{K^x}) for elements of the order given by
/// integer coordinates.  Tables are built once, so a tester can be shared
/// across enumeration threads.
class MembershipTester {
public:
    MembershipTester(const GlobalLevel& level, const Conjugator& x = {});

    /// Places where membership is not automatic for norm-one order elements.
    const std::vector<std::int64_t>& places() const { return places_; }
    bool operator()(std::span<const std::int64_t, 4> coords) const;
    bool at(std::int64_t p, std::span<const std::int64_t, 4> coords) const;

private:
    struct SplitCheck {
        LocalLevel level;
        const SplitTable* table = nullptr;
        bool conjugated = false;
        IntMat2 x{1, 0, 0, 1};    // primitive integral scaling of x_p
        IntMat2 adj{1, 0, 0, 1};  // adjugate of x
        int det_val = 0;          // v_p(det x)
        std::int64_t det_unit_inv = 1;
        int precision = 0;        // precision of the conjugated result
    };
    struct RamifiedCheck {
        LocalLevel level;
        std::optional<QuatElement> x, x_inv;
    };

    bool check_split(const SplitCheck& c, std::span<const std::int64_t, 4> coords) const;
    bool check_ramified(const RamifiedCheck& c, std::span<const std::int64_t, 4> coords) const;

    const GlobalLevel* level_;
    std::vector<std::int64_t> places_;
    std::map<std::int64_t, SplitCheck> split_;
    std::map<std::int64_t, RamifiedCheck> ramified_;
};

}  // namespace isospec
