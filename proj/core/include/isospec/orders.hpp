#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "isospec/quaternion.hpp"

namespace isospec {

/// A Z-order in D given by a Z-basis (coordinates relative to 1, i, j, ij).
/// Construct through verify_order(); the basis is kept in lower-triangular
/// Hermite form so that two equal orders serialise identically.
class Order {
public:
    const QuaternionAlgebra& algebra() const { return algebra_; }
    std::span<const QuatElement, 4> basis() const { return basis_; }
    const std::array<std::array<Integer, 4>, 4>& gram() const { return gram_; }
    const Integer& reduced_discriminant() const { return disc_; }

    /// Coordinates of x in the order basis (rational in general).
    std::array<Rat, 4> coordinates(const QuatElement& x) const;
    QuatElement element(std::span<const std::int64_t, 4> coords) const;
    bool contains(const QuatElement& x) const;
    /// Integer coefficients of the norm form nrd(sum c_t e_t):
    /// diag[t] = nrd(e_t), cross[s][t] = trd(e_s conj(e_t)) for s < t.
    std::array<std::array<std::int64_t, 4>, 4> norm_form() const;

    friend bool operator==(const Order& x, const Order& y) {
        return x.algebra_ == y.algebra_ && x.basis_ == y.basis_;
    }

private:
    friend Order verify_order(const QuaternionAlgebra&, std::span<const QuatElement> basis);
    Order(QuaternionAlgebra algebra, std::array<QuatElement, 4> basis);

    QuaternionAlgebra algebra_;
    std::array<QuatElement, 4> basis_;
    std::array<std::array<Integer, 4>, 4> gram_;
    Integer disc_;
};

/// Checks integrality of every basis element, that 1 lies in the lattice and
/// that the lattice is closed under multiplication.  Throws ArithmeticError
/// naming the first failure, e.g. "not integral: nrd(i/2) = 1/4".
Order verify_order(const QuaternionAlgebra& algebra, std::span<const QuatElement> basis);

Order standard_order(const QuaternionAlgebra& algebra);  // Z<1, i, j, ij>

/// Lower-triangular Hermite form of a rational lattice spanned by `gens`
/// (rows).  Throws if the span is not of full rank 4.
std::array<QuatElement, 4> hermite_basis(std::span<const QuatElement> gens);

/// Index [big : small] of lattices given by bases, small contained in big.
Integer lattice_index(const Order& big, const Order& small);

/// Largest prime accepted by maximalize().
inline constexpr std::int64_t kMaxMaximalizePrime = 50;

/// A maximal order containing O.  Enlarges one prime at a time by searching
/// superlattices O + Z v/p over v in O/pO, lexicographically smallest first.
Order maximalize(const Order& order);

}  // namespace isospec
