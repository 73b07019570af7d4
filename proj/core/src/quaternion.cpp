#include "isospec/quaternion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace isospec {

QuatElement QuatElement::basis(int k) {
    QuatElement e;
    e.x[static_cast<std::size_t>(k)] = 1;
    return e;
}

QuatElement operator+(const QuatElement& u, const QuatElement& v) {
    QuatElement r;
    for (std::size_t k = 0; k < 4; ++k) r.x[k] = u.x[k] + v.x[k];
    return r;
}

QuatElement operator-(const QuatElement& u, const QuatElement& v) {
    QuatElement r;
    for (std::size_t k = 0; k < 4; ++k) r.x[k] = u.x[k] - v.x[k];
    return r;
}

QuatElement operator*(const Rat& s, const QuatElement& v) {
    QuatElement r;
    for (std::size_t k = 0; k < 4; ++k) r.x[k] = s * v.x[k];
    return r;
}

bool QuatElement::is_zero() const {
    return std::all_of(x.begin(), x.end(), [](const Rat& c) { return c == 0; });
}

std::string QuatElement::to_string() const {
    std::ostringstream os;
    os << "(" << x[0].get_str() << ", " << x[1].get_str() << ", " << x[2].get_str() << ", " << x[3].get_str() << ")";
    return os.str();
}

bool RamificationData::is_ramified(Place v) const {
    return std::find(ramified_places.begin(), ramified_places.end(), v) != ramified_places.end();
}

std::vector<std::int64_t> RamificationData::finite_primes() const {
    std::vector<std::int64_t> out;
    for (auto v : ramified_places)
        if (!v.is_infinite()) out.push_back(v.p());
    return out;
}

// ---------------------------------------------------------------------------

Mat2Real operator*(const Mat2Real& x, const Mat2Real& y) {
    return {{x.e[0] * y.e[0] + x.e[1] * y.e[2], x.e[0] * y.e[1] + x.e[1] * y.e[3], x.e[2] * y.e[0] + x.e[3] * y.e[2],
             x.e[2] * y.e[1] + x.e[3] * y.e[3]}};
}

Mat2Real operator+(const Mat2Real& x, const Mat2Real& y) {
    return {{x.e[0] + y.e[0], x.e[1] + y.e[1], x.e[2] + y.e[2], x.e[3] + y.e[3]}};
}

Mat2Real operator*(double s, const Mat2Real& x) { return {{s * x.e[0], s * x.e[1], s * x.e[2], s * x.e[3]}}; }

Mat2Real SplitMapReal::operator()(const QuatElement& x) const {
    Mat2Real r{};
    for (std::size_t k = 0; k < 4; ++k) r = r + x.x[k].get_d() * images[k];
    return r;
}

Mat2Padic SplitMapPadic::image_of_coords(std::span<const Rat, 4> coords) const {
    Mat2Padic r{{PadicApprox::zero(p, precision), PadicApprox::zero(p, precision), PadicApprox::zero(p, precision),
                 PadicApprox::zero(p, precision)}};
    for (std::size_t t = 0; t < 4; ++t) {
        if (coords[t] == 0) continue;
        r = r + PadicApprox::from_rational(coords[t], p, precision) * basis_images[t];
    }
    return r;
}

Mat2Padic SplitMapPadic::operator()(const QuatElement& x) const {
    Mat2Padic r{{PadicApprox::zero(p, precision), PadicApprox::zero(p, precision), PadicApprox::zero(p, precision),
                 PadicApprox::zero(p, precision)}};
    for (std::size_t t = 0; t < 4; ++t) {
        if (x.x[t] == 0) continue;
        r = r + PadicApprox::from_rational(x.x[t], p, precision) * standard_images[t];
    }
    return r;
}

// ---------------------------------------------------------------------------

namespace {

std::pair<Integer, Rat> normalize_generator(const Rat& g) {
    if (g == 0) throw ArithmeticError("quaternion algebra generator must be nonzero");
    const Integer nd = g.get_num() * g.get_den();
    const Integer sf = squarefree_part(nd);
    // nd = sf * m^2, g = nd / den^2 = sf * (m/den)^2
    Integer m2 = nd / sf;
    Integer m;
    mpz_sqrt(m.get_mpz_t(), m2.get_mpz_t());
    Rat scale(m, g.get_den());
    scale.canonicalize();
    return {sf, scale};
}

}  // namespace

QuaternionAlgebra::QuaternionAlgebra(const Rat& a, const Rat& b) {
    std::tie(a_, a_scale_) = normalize_generator(a);
    std::tie(b_, b_scale_) = normalize_generator(b);
}

QuatElement QuaternionAlgebra::mul(const QuatElement& u, const QuatElement& v) const {
    const Rat a(a_), b(b_), ab(a_ * b_);
    const auto& x = u.x;
    const auto& y = v.x;
    return {{x[0] * y[0] + a * x[1] * y[1] + b * x[2] * y[2] - ab * x[3] * y[3],
             x[0] * y[1] + x[1] * y[0] - b * x[2] * y[3] + b * x[3] * y[2],
             x[0] * y[2] + x[2] * y[0] + a * x[1] * y[3] - a * x[3] * y[1],
             x[0] * y[3] + x[3] * y[0] + x[1] * y[2] - x[2] * y[1]}};
}

QuatElement QuaternionAlgebra::conj(const QuatElement& u) const { return {{u.x[0], -u.x[1], -u.x[2], -u.x[3]}}; }

Rat QuaternionAlgebra::trd(const QuatElement& u) const { return 2 * u.x[0]; }

Rat QuaternionAlgebra::nrd(const QuatElement& u) const {
    const Rat a(a_), b(b_), ab(a_ * b_);
    return u.x[0] * u.x[0] - a * u.x[1] * u.x[1] - b * u.x[2] * u.x[2] + ab * u.x[3] * u.x[3];
}

QuatElement QuaternionAlgebra::inverse(const QuatElement& u) const {
    const Rat n = nrd(u);
    if (n == 0) throw ArithmeticError("element of reduced norm zero is not invertible");
    return Rat(1 / n) * conj(u);
}

RamificationData QuaternionAlgebra::ramification() const {
    RamificationData r;
    for (auto v : candidate_places(Rat(a_), Rat(b_))) {
        if (hilbert_symbol(Rat(a_), Rat(b_), v) == -1) {
            r.ramified_places.push_back(v);
            if (!v.is_infinite()) r.reduced_discriminant *= v.p();
        }
    }
    std::sort(r.ramified_places.begin(), r.ramified_places.end());
    return r;
}

HypothesisReport QuaternionAlgebra::check_h1_h2() const {
    const auto ram = ramification();
    HypothesisReport rep;
    const auto finite = ram.finite_primes();
    rep.h1 = !finite.empty();
    if (rep.h1) rep.v0 = finite.front();
    rep.h2 = !ram.is_ramified(Place::infinity());
    return rep;
}

SplitMapReal QuaternionAlgebra::split_real() const {
    if (sgn(a_) < 0 && sgn(b_) < 0) throw ArithmeticError("not indefinite: D is ramified at the real place");
    SplitMapReal m;
    m.images[0] = {{1, 0, 0, 1}};
    if (sgn(b_) > 0) {
        const double r = std::sqrt(b_.get_d());
        m.images[1] = {{0, 1, a_.get_d(), 0}};
        m.images[2] = {{r, 0, 0, -r}};
    } else {
        const double r = std::sqrt(a_.get_d());
        m.images[1] = {{r, 0, 0, -r}};
        m.images[2] = {{0, 1, b_.get_d(), 0}};
    }
    m.images[3] = m.images[1] * m.images[2];
    return m;
}

std::array<Rat, 4> coordinates_in_basis(std::span<const QuatElement, 4> basis, const QuatElement& x) {
    // Solve sum_t c_t basis[t] = x; augmented matrix with columns = basis vectors.
    std::array<std::array<Rat, 5>, 4> m;
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t t = 0; t < 4; ++t) m[r][t] = basis[t].x[r];
        m[r][4] = x.x[r];
    }
    for (std::size_t col = 0; col < 4; ++col) {
        std::size_t piv = col;
        while (piv < 4 && m[piv][col] == 0) ++piv;
        if (piv == 4) throw ArithmeticError("basis is singular");
        std::swap(m[piv], m[col]);
        for (std::size_t r = 0; r < 4; ++r) {
            if (r == col || m[r][col] == 0) continue;
            const Rat f = m[r][col] / m[col][col];
            for (std::size_t t = col; t < 5; ++t) m[r][t] -= f * m[col][t];
        }
    }
    std::array<Rat, 4> c;
    for (std::size_t r = 0; r < 4; ++r) c[r] = m[r][4] / m[r][r];
    return c;
}

namespace {

// p-adic square root of a rational that is a nonzero square in Q_p.
PadicApprox padic_sqrt(const Rat& c, std::int64_t p, int precision) {
    const int v = valuation(c, p);
    if (v % 2 != 0) throw ArithmeticError("not a p-adic square");
    Integer pv = 1;
    for (int i = 0; i < std::abs(v); ++i) pv *= p;
    const Rat w = v >= 0 ? Rat(c / Rat(pv)) : Rat(c * Rat(pv));
    // For p = 2 the Newton step loses nothing because we lift bit by bit to `precision + 1`.
    const int work = p == 2 ? precision + 1 : precision;
    std::int64_t r = sqrt_mod_prime_power(rat_mod(w, p, work), p, work);
    auto unit = PadicApprox::from_residue(r, p, precision);
    Integer half = 1;
    for (int i = 0; i < std::abs(v) / 2; ++i) half *= p;
    return PadicApprox::from_rational(v >= 0 ? Rat(half) : Rat(1 / Rat(half)), p, precision) * unit;
}

struct PureQuat {
    Integer y1, y2, y3;
};

}  // namespace

SplitMapPadic QuaternionAlgebra::split_padic(std::int64_t p, int precision) const {
    const std::array<QuatElement, 4> std_basis{QuatElement::basis(0), QuatElement::basis(1), QuatElement::basis(2),
                                                QuatElement::basis(3)};
    return split_padic(p, precision, std_basis);
}

SplitMapPadic QuaternionAlgebra::split_padic(std::int64_t p, int precision,
                                             std::span<const QuatElement, 4> order_basis) const {
    if (!is_prime(p)) throw ArithmeticError("split_padic needs a prime, got " + std::to_string(p));
    if (precision < 1) throw PrecisionError("precision must be at least 1");
    if (hilbert_symbol(Rat(a_), Rat(b_), Place::prime(p)) == -1)
        throw ArithmeticError("D is ramified at " + std::to_string(p) + "; no splitting into M_2(Q_p)");

    const Integer ab = a_ * b_;
    auto pure_square = [&](const PureQuat& q) -> Integer { return a_ * q.y1 * q.y1 + b_ * q.y2 * q.y2 - ab * q.y3 * q.y3; };

    // Candidates: i, j, ij first, then a sweep by max-norm.
    std::vector<PureQuat> candidates{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int radius = 1; radius <= 12; ++radius)
        for (int y1 = -radius; y1 <= radius; ++y1)
            for (int y2 = -radius; y2 <= radius; ++y2)
                for (int y3 = -radius; y3 <= radius; ++y3)
                    if (std::max({std::abs(y1), std::abs(y2), std::abs(y3)}) == radius)
                        candidates.push_back({y1, y2, y3});

    // A pure quaternion u whose square is a nonzero p-adic square; prefer a p-unit square.
    std::optional<PureQuat> u, fallback;
    for (const auto& q : candidates) {
        const Integer c = pure_square(q);
        if (c == 0 || !square_class(Rat(c), Place::prime(p)).is_trivial()) continue;
        if (!mpz_divisible_ui_p(c.get_mpz_t(), static_cast<unsigned long>(p))) {
            u = q;
            break;
        }
        if (!fallback) fallback = q;
    }
    if (!u) u = fallback;
    if (!u) throw ArithmeticError("no split direction found at " + std::to_string(p));

    // v pure, anticommuting with u, with v^2 != 0
    std::optional<PureQuat> v;
    for (const auto& q : candidates) {
        const Integer ortho = a_ * u->y1 * q.y1 + b_ * u->y2 * q.y2 - ab * u->y3 * q.y3;
        if (ortho == 0 && pure_square(q) != 0) {
            v = q;
            break;
        }
    }
    if (!v) throw ArithmeticError("no anticommuting partner found at " + std::to_string(p));

    const QuatElement ue{{Rat(0), Rat(u->y1), Rat(u->y2), Rat(u->y3)}};
    const QuatElement ve{{Rat(0), Rat(v->y1), Rat(v->y2), Rat(v->y3)}};
    const std::array<QuatElement, 4> adapted{QuatElement::scalar(1), ue, ve, mul(ue, ve)};
    const Rat c = pure_square(*u);
    const Rat e = pure_square(*v);

    for (int extra = 4; extra <= 64; extra *= 2) {
        const int work = precision + extra;
        if (work > max_precision(p)) break;
        const PadicApprox s = padic_sqrt(c, p, work);
        const PadicApprox one = PadicApprox::from_residue(1, p, work);
        const PadicApprox zero = PadicApprox::zero(p, work);
        const PadicApprox ep = PadicApprox::from_rational(e, p, work);
        const std::array<Mat2Padic, 4> adapted_images{
            Mat2Padic{{one, zero, zero, one}}, Mat2Padic{{s, zero, zero, -s}}, Mat2Padic{{zero, one, ep, zero}},
            Mat2Padic{{zero, s, -(s * ep), zero}}};

        auto image = [&](const QuatElement& x) {
            const auto coords = coordinates_in_basis(adapted, x);
            Mat2Padic r{{zero, zero, zero, zero}};
            for (std::size_t t = 0; t < 4; ++t)
                if (coords[t] != 0) r = r + PadicApprox::from_rational(coords[t], p, work) * adapted_images[t];
            return r;
        };

        std::array<Mat2Padic, 4> std_images{image(QuatElement::basis(0)), image(QuatElement::basis(1)),
                                            image(QuatElement::basis(2)), image(QuatElement::basis(3))};
        std::array<Mat2Padic, 4> ord_images{image(order_basis[0]), image(order_basis[1]), image(order_basis[2]),
                                            image(order_basis[3])};

        // Conjugate so that the order stabilises the standard lattice: L = O * e1.
        std::vector<std::array<PadicApprox, 2>> cols;
        for (const auto& m : ord_images) cols.push_back({m.e[0], m.e[2]});
        auto min_val = [](const PadicApprox& z) { return z.is_zero() ? 1 << 20 : z.valuation(); };
        std::size_t best = 0;
        int best_row = 0, best_v = 1 << 20;
        for (std::size_t t = 0; t < cols.size(); ++t)
            for (int r = 0; r < 2; ++r)
                if (min_val(cols[t][static_cast<std::size_t>(r)]) < best_v) {
                    best_v = min_val(cols[t][static_cast<std::size_t>(r)]);
                    best = t;
                    best_row = r;
                }
        const auto f1 = cols[best];
        const auto br = static_cast<std::size_t>(best_row), other = 1 - br;
        std::optional<std::array<PadicApprox, 2>> f2;
        int f2_v = 1 << 20;
        for (std::size_t t = 0; t < cols.size(); ++t) {
            if (t == best) continue;
            const PadicApprox ratio = cols[t][br] / f1[br];
            const PadicApprox w = cols[t][other] - ratio * f1[other];
            if (min_val(w) < f2_v) {
                f2_v = min_val(w);
                std::array<PadicApprox, 2> vec{zero, zero};
                vec[br] = cols[t][br] - ratio * f1[br];
                vec[other] = w;
                f2 = vec;
            }
        }
        if (!f2 || f2_v >= (1 << 20)) continue;
        const Mat2Padic basis_change{{f1[0], (*f2)[0], f1[1], (*f2)[1]}};
        const Mat2Padic inv = basis_change.inverse();

        SplitMapPadic out;
        out.p = p;
        out.precision = precision;
        bool ok = true;
        for (std::size_t t = 0; t < 4; ++t) {
            out.standard_images[t] = inv * std_images[t] * basis_change;
            out.basis_images[t] = inv * ord_images[t] * basis_change;
            if (out.standard_images[t].absolute_precision() < precision ||
                out.basis_images[t].absolute_precision() < precision)
                ok = false;
        }
        if (!ok) continue;
        out.adapted_order_flag = std::all_of(out.basis_images.begin(), out.basis_images.end(),
                                             [](const Mat2Padic& m) { return m.is_integral(); });
        if (!out.adapted_order_flag)
            throw ArithmeticError("order not adapted at precision " + std::to_string(precision));
        return out;
    }
    throw PrecisionError("split_padic could not reach precision " + std::to_string(precision) + " at " +
                         std::to_string(p));
}

}  // namespace isospec
