#include "isospec/padic.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace isospec {

namespace {

void check_precision(std::int64_t p, int prec) {
    if (prec > max_precision(p))
        throw UnsupportedError("precision " + std::to_string(prec) + " exceeds 64-bit range at p = " + std::to_string(p));
}

}  // namespace

PadicApprox PadicApprox::normalized(std::int64_t p, int v, std::int64_t raw, int prec) {
    // raw is known modulo p^prec and represents p^v * raw
    if (prec <= 0) return PadicApprox(p, v, 0, 0, true);
    std::int64_t pk = ipow(p, prec);
    raw = mod(raw, pk);
    if (raw == 0) return PadicApprox(p, v + prec, 0, 0, true);
    while (raw % p == 0) {
        raw /= p;
        ++v;
        --prec;
    }
    return PadicApprox(p, v, mod(raw, ipow(p, prec)), prec, false);
}

PadicApprox PadicApprox::from_rational(const Rat& x, std::int64_t p, int precision) {
    if (precision < 1) throw PrecisionError("relative precision must be positive");
    check_precision(p, precision);
    if (x == 0) return zero(p, precision);
    const int v = isospec::valuation(x, p);
    Integer pv = 1;
    for (int i = 0; i < std::abs(v); ++i) pv *= p;
    const Rat u = v >= 0 ? Rat(x / Rat(pv)) : Rat(x * Rat(pv));
    return PadicApprox(p, v, rat_mod(u, p, precision), precision, false);
}

PadicApprox PadicApprox::from_residue(std::int64_t residue, std::int64_t p, int abs_precision) {
    check_precision(p, abs_precision);
    return normalized(p, 0, residue, abs_precision);
}

PadicApprox PadicApprox::zero(std::int64_t p, int abs_precision) { return PadicApprox(p, abs_precision, 0, 0, true); }

std::int64_t PadicApprox::residue(int m) const {
    if (m > absolute_precision())
        throw PrecisionError("need " + std::to_string(m) + " digits, have " + std::to_string(absolute_precision()));
    if (zero_) return 0;
    if (valuation_ < 0) throw ArithmeticError("value is not integral");
    if (valuation_ >= m) return 0;
    const std::int64_t pm = ipow(p_, m);
    return mulmod(ipow(p_, valuation_), unit_, pm);
}

bool PadicApprox::agrees_with(const Rat& x) const {
    const int abs_prec = absolute_precision();
    if (x == 0) return zero_;
    const int vx = isospec::valuation(x, p_);
    if (zero_) return vx >= abs_prec;
    if (vx != valuation_) return false;
    auto other = from_rational(x, p_, precision_);
    return other.unit_ == unit_;
}

PadicApprox PadicApprox::operator-() const {
    if (zero_) return *this;
    return PadicApprox(p_, valuation_, mod(-unit_, ipow(p_, precision_)), precision_, false);
}

PadicApprox operator+(const PadicApprox& x, const PadicApprox& y) {
    if (x.p_ != y.p_) throw ArithmeticError("p-adic operands at different primes");
    const int abs_prec = std::min(x.absolute_precision(), y.absolute_precision());
    if (x.zero_ && y.zero_) return PadicApprox::zero(x.p_, abs_prec);
    int v = abs_prec;
    if (!x.zero_) v = std::min(v, x.valuation_);
    if (!y.zero_) v = std::min(v, y.valuation_);
    const int prec = abs_prec - v;
    if (prec <= 0) return PadicApprox::zero(x.p_, abs_prec);
    const std::int64_t pk = ipow(x.p_, prec);
    auto shifted = [&](const PadicApprox& z) -> std::int64_t {
        if (z.zero_ || z.valuation_ - v >= prec) return 0;
        return mulmod(ipow(z.p_, z.valuation_ - v), z.unit_, pk);
    };
    return PadicApprox::normalized(x.p_, v, mod(shifted(x) + shifted(y), pk), prec);
}

PadicApprox operator*(const PadicApprox& x, const PadicApprox& y) {
    if (x.p_ != y.p_) throw ArithmeticError("p-adic operands at different primes");
    // O(p^a) * p^v u = O(p^(a+v)); zero stores its absolute precision in valuation_
    if (x.zero_ || y.zero_) return PadicApprox::zero(x.p_, x.valuation_ + y.valuation_);
    const int prec = std::min(x.precision_, y.precision_);
    const std::int64_t pk = ipow(x.p_, prec);
    return PadicApprox(x.p_, x.valuation_ + y.valuation_, mulmod(x.unit_, y.unit_, pk), prec, false);
}

PadicApprox operator/(const PadicApprox& x, const PadicApprox& y) {
    if (x.p_ != y.p_) throw ArithmeticError("p-adic operands at different primes");
    if (y.zero_) throw PrecisionError("division by a value indistinguishable from zero");
    if (x.zero_) return PadicApprox::zero(x.p_, x.valuation_ - y.valuation_);
    const int prec = std::min(x.precision_, y.precision_);
    const std::int64_t pk = ipow(x.p_, prec);
    return PadicApprox(x.p_, x.valuation_ - y.valuation_, mulmod(x.unit_, invmod(y.unit_, pk), pk), prec, false);
}

std::string PadicApprox::to_string() const {
    std::ostringstream os;
    if (zero_) os << "O(" << p_ << "^" << valuation_ << ")";
    else os << p_ << "^" << valuation_ << "*" << unit_ << " + O(" << p_ << "^" << absolute_precision() << ")";
    return os.str();
}

// ---------------------------------------------------------------------------

Mat2Padic Mat2Padic::identity(std::int64_t p, int precision) {
    auto one = PadicApprox::from_residue(1, p, precision);
    auto zero = PadicApprox::zero(p, precision);
    return {{one, zero, zero, one}};
}

Mat2Padic Mat2Padic::from_residues(const std::array<std::int64_t, 4>& m, std::int64_t p, int precision) {
    return {{PadicApprox::from_residue(m[0], p, precision), PadicApprox::from_residue(m[1], p, precision),
             PadicApprox::from_residue(m[2], p, precision), PadicApprox::from_residue(m[3], p, precision)}};
}

int Mat2Padic::absolute_precision() const {
    int r = e[0].absolute_precision();
    for (const auto& x : e) r = std::min(r, x.absolute_precision());
    return r;
}

std::array<std::int64_t, 4> Mat2Padic::residues(int m) const {
    return {e[0].residue(m), e[1].residue(m), e[2].residue(m), e[3].residue(m)};
}

bool Mat2Padic::is_integral() const {
    return std::all_of(e.begin(), e.end(), [](const PadicApprox& x) { return x.valuation() >= 0; });
}

Mat2Padic Mat2Padic::inverse() const {
    const PadicApprox d = det();
    return {{e[3] / d, -e[1] / d, -e[2] / d, e[0] / d}};
}

Mat2Padic operator*(const Mat2Padic& x, const Mat2Padic& y) {
    return {{x.e[0] * y.e[0] + x.e[1] * y.e[2], x.e[0] * y.e[1] + x.e[1] * y.e[3],
             x.e[2] * y.e[0] + x.e[3] * y.e[2], x.e[2] * y.e[1] + x.e[3] * y.e[3]}};
}

Mat2Padic operator+(const Mat2Padic& x, const Mat2Padic& y) {
    return {{x.e[0] + y.e[0], x.e[1] + y.e[1], x.e[2] + y.e[2], x.e[3] + y.e[3]}};
}

Mat2Padic operator*(const PadicApprox& s, const Mat2Padic& x) { return {{s * x.e[0], s * x.e[1], s * x.e[2], s * x.e[3]}}; }

}  // namespace isospec
