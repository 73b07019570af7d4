#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "isospec/localarith.hpp"

namespace isospec {

/// A p-adic number known to finite relative precision: p^valuation * unit,
/// with `unit` a p-adic unit known modulo p^precision.
///
/// The designated zero carries no unit; its `valuation` is the absolute
/// precision to which it is known to vanish.
///
/// Precision rules (relative precision r, absolute precision = valuation + r):
///   * multiplication and division: r = min(r1, r2); exact on units, no loss.
///   * addition: absolute precision = min of operands; cancellation lowers r.
///   * division by a zero approximation throws PrecisionError.
class PadicApprox {
public:
    /// An unknown value (zero known to absolute precision 0).
    PadicApprox() = default;
    static PadicApprox from_rational(const Rat& x, std::int64_t p, int precision);
    /// The class of `residue` modulo p^abs_precision.
    static PadicApprox from_residue(std::int64_t residue, std::int64_t p, int abs_precision);
    static PadicApprox zero(std::int64_t p, int abs_precision);

    std::int64_t prime() const { return p_; }
    bool is_zero() const { return zero_; }
    int valuation() const { return valuation_; }
    std::int64_t unit() const { return unit_; }
    int precision() const { return zero_ ? 0 : precision_; }
    int absolute_precision() const { return zero_ ? valuation_ : valuation_ + precision_; }

    /// Residue modulo p^m.  Requires valuation >= 0 and m <= absolute precision.
    std::int64_t residue(int m) const;
    /// True when x agrees with this value to the known precision.
    bool agrees_with(const Rat& x) const;

    PadicApprox operator-() const;
    friend PadicApprox operator+(const PadicApprox& x, const PadicApprox& y);
    friend PadicApprox operator-(const PadicApprox& x, const PadicApprox& y) { return x + (-y); }
    friend PadicApprox operator*(const PadicApprox& x, const PadicApprox& y);
    friend PadicApprox operator/(const PadicApprox& x, const PadicApprox& y);

    std::string to_string() const;

private:
    PadicApprox(std::int64_t p, int v, std::int64_t u, int prec, bool zero)
        : p_(p), valuation_(v), unit_(u), precision_(prec), zero_(zero) {}
    static PadicApprox normalized(std::int64_t p, int v, std::int64_t raw, int prec);

    std::int64_t p_ = 2;
    int valuation_ = 0;
    std::int64_t unit_ = 1;
    int precision_ = 0;
    bool zero_ = true;
};

/// 2x2 matrix over Q_p at bounded precision, row-major {a, b, c, d}.
struct Mat2Padic {
    std::array<PadicApprox, 4> e;

    static Mat2Padic identity(std::int64_t p, int precision);
    static Mat2Padic from_residues(const std::array<std::int64_t, 4>& m, std::int64_t p, int precision);

    std::int64_t prime() const { return e[0].prime(); }
    PadicApprox trace() const { return e[0] + e[3]; }
    PadicApprox det() const { return e[0] * e[3] - e[1] * e[2]; }
    /// Minimum absolute precision over the entries.
    int absolute_precision() const;
    /// Entry residues modulo p^m (requires integral entries known to p^m).
    std::array<std::int64_t, 4> residues(int m) const;
    bool is_integral() const;
    Mat2Padic inverse() const;

    friend Mat2Padic operator*(const Mat2Padic& x, const Mat2Padic& y);
    friend Mat2Padic operator+(const Mat2Padic& x, const Mat2Padic& y);
    friend Mat2Padic operator*(const PadicApprox& s, const Mat2Padic& x);
};

}  // namespace isospec
