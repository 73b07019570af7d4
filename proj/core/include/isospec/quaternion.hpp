#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "isospec/localarith.hpp"
#include "isospec/padic.hpp"

namespace isospec {

/// x0 + x1 i + x2 j + x3 ij
struct QuatElement {
    std::array<Rat, 4> x{Rat(0), Rat(0), Rat(0), Rat(0)};

    static QuatElement scalar(const Rat& r) { return {{r, Rat(0), Rat(0), Rat(0)}}; }
    static QuatElement basis(int k);

    friend QuatElement operator+(const QuatElement& u, const QuatElement& v);
    friend QuatElement operator-(const QuatElement& u, const QuatElement& v);
    friend QuatElement operator*(const Rat& s, const QuatElement& v);
    friend bool operator==(const QuatElement&, const QuatElement&) = default;

    bool is_zero() const;
    std::string to_string() const;
};

struct RamificationData {
    std::vector<Place> ramified_places;  // sorted, oo first when present
    Integer reduced_discriminant = 1;    // product of finite ramified primes

    bool is_division() const { return !ramified_places.empty(); }
    bool is_ramified(Place v) const;
    std::vector<std::int64_t> finite_primes() const;
};

struct HypothesisReport {
    bool h1 = false;
    std::optional<std::int64_t> v0;  // smallest ramified finite prime
    bool h2 = false;
};

struct Mat2Real {
    std::array<double, 4> e{};  // row-major
    friend Mat2Real operator*(const Mat2Real& x, const Mat2Real& y);
    friend Mat2Real operator+(const Mat2Real& x, const Mat2Real& y);
    friend Mat2Real operator*(double s, const Mat2Real& x);
    double det() const { return e[0] * e[3] - e[1] * e[2]; }
    double trace() const { return e[0] + e[3]; }
};

/// Images of 1, i, j, ij in M_2(R).
struct SplitMapReal {
    std::array<Mat2Real, 4> images;
    Mat2Real operator()(const QuatElement& x) const;
};

/// Images of a configured Z-basis in M_2(Q_p), known modulo p^precision.
struct SplitMapPadic {
    std::int64_t p = 0;
    int precision = 0;
    std::array<Mat2Padic, 4> basis_images;  // images of the configured basis
    std::array<Mat2Padic, 4> standard_images;  // images of 1, i, j, ij
    bool adapted_order_flag = false;

    /// Image of an element given by coordinates in the configured basis.
    Mat2Padic image_of_coords(std::span<const Rat, 4> coords) const;
    /// Image of an element given in the standard basis 1, i, j, ij.
    Mat2Padic operator()(const QuatElement& x) const;
};

/// The algebra (a, b | Q): i^2 = a, j^2 = b, ij = -ji.  Generators are
/// normalised to squarefree integers on construction; the square factors are
/// kept so that reports can show the user's original input.
class QuaternionAlgebra {
public:
    QuaternionAlgebra(const Rat& a, const Rat& b);

    const Integer& a() const { return a_; }
    const Integer& b() const { return b_; }
    /// input a = a() * a_scale()^2, likewise for b
    const Rat& a_scale() const { return a_scale_; }
    const Rat& b_scale() const { return b_scale_; }

    QuatElement mul(const QuatElement& u, const QuatElement& v) const;
    QuatElement conj(const QuatElement& u) const;
    Rat trd(const QuatElement& u) const;
    Rat nrd(const QuatElement& u) const;
    QuatElement inverse(const QuatElement& u) const;

    RamificationData ramification() const;
    HypothesisReport check_h1_h2() const;

    /// Explicit splitting over R.  Throws if D is definite.
    SplitMapReal split_real() const;
    /// Splitting over Q_p at an unramified prime, adapted so that the given
    /// Z-basis maps to integral matrices when that basis spans a p-maximal order.
    SplitMapPadic split_padic(std::int64_t p, int precision, std::span<const QuatElement, 4> order_basis) const;
    SplitMapPadic split_padic(std::int64_t p, int precision) const;

    friend bool operator==(const QuaternionAlgebra& x, const QuaternionAlgebra& y) {
        return x.a_ == y.a_ && x.b_ == y.b_;
    }

private:
    Integer a_, b_;
    Rat a_scale_, b_scale_;
};

/// Coordinates of x in the given Q-basis (4x4 rational solve).  Throws if the
/// basis is singular.
std::array<Rat, 4> coordinates_in_basis(std::span<const QuatElement, 4> basis, const QuatElement& x);

}  // namespace isospec
