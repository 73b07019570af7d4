#include "isospec/levels.hpp"

#include <algorithm>

namespace isospec {

namespace {

constexpr std::array<std::pair<LevelKind, const char*>, 6> kKindNames{{
    {LevelKind::Hyperspecial, "Hyperspecial"},
    {LevelKind::PrincipalCongruence, "PrincipalCongruence"},
    {LevelKind::HeckeCongruence, "HeckeCongruence"},
    {LevelKind::SymmetricCongruence, "SymmetricCongruence"},
    {LevelKind::RamifiedFull, "RamifiedFull"},
    {LevelKind::RamifiedUnitFiltration, "RamifiedUnitFiltration"},
}};

bool has_parameter(LevelKind kind) {
    return kind != LevelKind::Hyperspecial && kind != LevelKind::RamifiedFull;
}

bool p_integral(const Rat& r, std::int64_t p) {
    return !mpz_divisible_ui_p(r.get_den().get_mpz_t(), static_cast<unsigned long>(p));
}

std::int64_t to_mod(const Integer& z, std::int64_t m) {
    Integer r;
    mpz_fdiv_r(r.get_mpz_t(), z.get_mpz_t(), Integer(static_cast<long>(m)).get_mpz_t());
    return r.get_si();
}

// v_p(nrd(g - 1)) >= n, with g = 1 counted as infinitely deep.
bool in_unit_filtration(const QuaternionAlgebra& D, const QuatElement& g, std::int64_t p, int n) {
    const QuatElement d = g - QuatElement::scalar(1);
    if (d.is_zero()) return true;
    return valuation(D.nrd(d), p) >= n;
}

}  // namespace

std::string to_string(LevelKind kind) {
    for (auto [k, name] : kKindNames)
        if (k == kind) return name;
    return "?";
}

LevelKind parse_level_kind(const std::string& name) {
    for (auto [k, n] : kKindNames)
        if (name == n) return k;
    throw ConfigError("unknown level kind '" + name + "'");
}

bool is_ramified_kind(LevelKind kind) {
    return kind == LevelKind::RamifiedFull || kind == LevelKind::RamifiedUnitFiltration;
}

std::string LocalLevel::to_string() const {
    std::string s = isospec::to_string(kind);
    if (has_parameter(kind)) s += "(" + std::to_string(k) + ")";
    return s + " at " + std::to_string(p);
}

int LocalLevel::depth() const {
    switch (kind) {
        case LevelKind::PrincipalCongruence:
        case LevelKind::HeckeCongruence: return k;
        case LevelKind::SymmetricCongruence: return k + 1;
        default: return 0;
    }
}

IntMat2 mat_mul_mod(const IntMat2& x, const IntMat2& y, std::int64_t m) {
    return {mod(mulmod(x[0], y[0], m) + mulmod(x[1], y[2], m), m), mod(mulmod(x[0], y[1], m) + mulmod(x[1], y[3], m), m),
            mod(mulmod(x[2], y[0], m) + mulmod(x[3], y[2], m), m), mod(mulmod(x[2], y[1], m) + mulmod(x[3], y[3], m), m)};
}

bool satisfies_split_level(const LocalLevel& level, const IntMat2& g, int precision) {
    const std::int64_t p = level.p;
    const int need = std::max(1, level.depth());
    if (precision < need)
        throw PrecisionError(level.to_string() + " needs precision " + std::to_string(need) + ", have " +
                             std::to_string(precision));
    const std::int64_t pk = ipow(p, level.k);
    auto zero_mod = [](std::int64_t v, std::int64_t m) { return mod(v, m) == 0; };
    switch (level.kind) {
        case LevelKind::Hyperspecial: {
            const std::int64_t det = mod(mulmod(g[0], g[3], p) - mulmod(g[1], g[2], p), p);
            return det != 0;
        }
        case LevelKind::PrincipalCongruence:
            return zero_mod(g[0] - 1, pk) && zero_mod(g[1], pk) && zero_mod(g[2], pk) && zero_mod(g[3] - 1, pk);
        case LevelKind::HeckeCongruence: return zero_mod(g[2], pk);
        case LevelKind::SymmetricCongruence:
            return zero_mod(g[0] - 1, pk) && zero_mod(g[3] - 1, pk) && zero_mod(g[1], pk) && zero_mod(g[2], pk) &&
                   zero_mod(g[1] - g[2], pk * p);
        default: throw ArithmeticError(level.to_string() + " is not a split level");
    }
}

// ---------------------------------------------------------------------------

Conjugator::Conjugator(std::vector<LocalConjugator> components) {
    for (auto& c : components) {
        if (!is_prime(c.p)) throw ConfigError("conjugator place " + std::to_string(c.p) + " is not a prime");
        if (components_.count(c.p)) throw ConfigError("conjugator lists " + std::to_string(c.p) + " twice");
        if (c.is_matrix()) {
            const auto& m = c.matrix();
            if (m[0] * m[3] - m[1] * m[2] == 0)
                throw ConfigError("conjugator at " + std::to_string(c.p) + " has zero determinant");
        } else if (c.element().is_zero()) {
            throw ConfigError("conjugator at " + std::to_string(c.p) + " is zero");
        }
        const std::int64_t p = c.p;
        components_.emplace(p, std::move(c));
    }
}

const LocalConjugator* Conjugator::at(std::int64_t p) const {
    auto it = components_.find(p);
    return it == components_.end() ? nullptr : &it->second;
}

Conjugator Conjugator::inverse(const QuaternionAlgebra& algebra) const {
    std::vector<LocalConjugator> out;
    for (const auto& [p, c] : components_) {
        if (c.is_matrix()) {
            const auto& m = c.matrix();
            const Rat det = m[0] * m[3] - m[1] * m[2];
            out.push_back({p, std::array<Rat, 4>{m[3] / det, -m[1] / det, -m[2] / det, m[0] / det}});
        } else {
            out.push_back({p, algebra.inverse(c.element())});
        }
    }
    return Conjugator(std::move(out));
}

Rat Conjugator::local_norm(std::int64_t p, const QuaternionAlgebra& algebra) const {
    const auto* c = at(p);
    if (!c) return 1;
    if (c->is_matrix()) {
        const auto& m = c->matrix();
        return m[0] * m[3] - m[1] * m[2];
    }
    return algebra.nrd(c->element());
}

// ---------------------------------------------------------------------------

IntMat2 SplitTable::image(std::span<const std::int64_t, 4> coords) const {
    IntMat2 r{0, 0, 0, 0};
    for (std::size_t t = 0; t < 4; ++t) {
        if (coords[t] == 0) continue;
        const std::int64_t c = mod(coords[t], modulus);
        for (std::size_t e = 0; e < 4; ++e) r[e] = mod(r[e] + mulmod(c, basis_images[t][e], modulus), modulus);
    }
    return r;
}

GlobalLevel::GlobalLevel(Order order, std::optional<std::int64_t> v0, std::vector<LocalLevel> locals)
    : order_(std::move(order)), v0_(v0) {
    const auto ram = order_.algebra().ramification();
    if (order_.reduced_discriminant() != ram.reduced_discriminant)
        throw ConfigError("level structures need a maximal order (reduced discriminant " +
                          order_.reduced_discriminant().get_str() + ", expected " +
                          ram.reduced_discriminant.get_str() + ")");
    for (const auto& l : locals) {
        if (!is_prime(l.p)) throw ConfigError("level place " + std::to_string(l.p) + " is not a prime");
        const bool ramified = ram.is_ramified(Place::prime(l.p));
        if (is_ramified_kind(l.kind) != ramified)
            throw ConfigError(l.to_string() + ": " + (ramified ? "ramified" : "split") + " prime needs a " +
                              (ramified ? "ramified" : "split") + " level kind");
        if (has_parameter(l.kind) && l.k < 1) throw ConfigError(l.to_string() + ": exponent must be at least 1");
        if (locals_.count(l.p)) throw ConfigError("level lists prime " + std::to_string(l.p) + " twice");
        LocalLevel norm = l;
        if (!has_parameter(l.kind)) norm.k = 0;
        locals_.emplace(l.p, norm);
    }
    if (v0_ && !ram.is_ramified(Place::prime(*v0_)))
        throw ConfigError("v0 = " + std::to_string(*v0_) + " is not a ramified prime of D");
}

LocalLevel GlobalLevel::local(std::int64_t p) const {
    auto it = locals_.find(p);
    if (it != locals_.end()) return it->second;
    const bool ramified = algebra().ramification().is_ramified(Place::prime(p));
    return {p, ramified ? LevelKind::RamifiedFull : LevelKind::Hyperspecial, 0};
}

std::vector<std::int64_t> GlobalLevel::leveled_split_primes() const {
    std::vector<std::int64_t> out;
    for (const auto& [p, l] : locals_)
        if (!is_ramified_kind(l.kind) && l.kind != LevelKind::Hyperspecial) out.push_back(p);
    return out;
}

const SplitTable& GlobalLevel::split_table(std::int64_t p, int precision) const {
    std::lock_guard lock(cache_mutex_);
    auto& slot = tables_[{p, precision}];
    if (!slot) {
        const auto map = algebra().split_padic(p, precision, order_.basis());
        auto t = std::make_unique<SplitTable>();
        t->p = p;
        t->precision = precision;
        t->modulus = ipow(p, precision);
        for (std::size_t k = 0; k < 4; ++k) {
            const auto r = map.basis_images[k].residues(precision);
            t->basis_images[k] = {r[0], r[1], r[2], r[3]};
        }
        slot = std::move(t);
    }
    return *slot;
}

// ---------------------------------------------------------------------------

QuatElement local_uniformizer(const Order& order, std::int64_t p) {
    const auto& D = order.algebra();
    for (std::int64_t r = 1; r <= 4; ++r) {
        std::array<std::int64_t, 4> c{};
        for (c[0] = -r; c[0] <= r; ++c[0])
            for (c[1] = -r; c[1] <= r; ++c[1])
                for (c[2] = -r; c[2] <= r; ++c[2])
                    for (c[3] = -r; c[3] <= r; ++c[3]) {
                        const QuatElement x = order.element(c);
                        const Rat n = D.nrd(x);
                        if (n != 0 && valuation(n, p) == 1) return x;
                    }
    }
    throw ArithmeticError("no uniformizer of small height at " + std::to_string(p));
}

H3Report check_h3(const GlobalLevel& level) {
    if (!level.v0()) throw ConfigError("H3 needs a designated v0");
    const std::int64_t v0 = *level.v0();
    const auto& D = level.algebra();
    const auto& O = level.order();
    if (!D.ramification().is_ramified(Place::prime(v0)))
        throw ConfigError("v0 = " + std::to_string(v0) + " is split for D; H3 needs a ramified place");

    H3Report rep;
    rep.v0 = v0;
    rep.level = level.local(v0);
    if (!is_ramified_kind(rep.level.kind)) {
        rep.detail = "K_v0 is " + rep.level.to_string() + ", not a normal subgroup from the ramified catalog";
        return rep;
    }
    rep.uniformizer = local_uniformizer(O, v0);
    const int n = rep.level.kind == LevelKind::RamifiedUnitFiltration ? rep.level.k : 0;

    auto in_order_at_v0 = [&](const QuatElement& x) {
        const auto c = O.coordinates(x);
        return std::all_of(c.begin(), c.end(), [&](const Rat& r) { return p_integral(r, v0); });
    };
    auto in_k = [&](const QuatElement& g) {
        if (!in_order_at_v0(g)) return false;
        if (valuation(D.nrd(g), v0) != 0) return false;
        return n == 0 || in_unit_filtration(D, g, v0, n);
    };

    // Sampled generators of K_v0 and of the unit group O_v0^x.
    std::vector<QuatElement> gens, units{rep.uniformizer};
    std::array<std::int64_t, 4> c{};
    for (c[0] = -2; c[0] <= 2; ++c[0])
        for (c[1] = -2; c[1] <= 2; ++c[1])
            for (c[2] = -2; c[2] <= 2; ++c[2])
                for (c[3] = -2; c[3] <= 2; ++c[3]) {
                    const QuatElement g = O.element(c);
                    const Rat nr = D.nrd(g);
                    if (nr == 0 || valuation(nr, v0) != 0) continue;
                    if (gens.size() < 24 && in_k(g) && g != QuatElement::scalar(1)) gens.push_back(g);
                    const bool small = std::all_of(c.begin(), c.end(), [](std::int64_t v) { return v >= -1 && v <= 1; });
                    if (small && units.size() < 12) units.push_back(g);
                }
    for (const auto& x : units) {
        const QuatElement xi = D.inverse(x);
        for (const auto& g : gens) {
            ++rep.normality_checks;
            if (!in_k(D.mul(D.mul(xi, g), x))) {
                rep.detail = "conjugation by " + x.to_string() + " moves " + g.to_string() + " out of K_v0";
                return rep;
            }
        }
    }
    rep.pass = true;
    rep.detail = rep.level.to_string() + " is normalized by the uniformizer and " + std::to_string(units.size() - 1) +
                 " unit representatives (" + std::to_string(rep.normality_checks) + " conjugations)";
    return rep;
}

// ---------------------------------------------------------------------------

MembershipTester::MembershipTester(const GlobalLevel& level, const Conjugator& x) : level_(&level) {
    const auto& D = level.algebra();
    const auto ram = D.ramification();
    std::vector<std::int64_t> primes;
    for (const auto& [p, l] : level.locals()) primes.push_back(p);
    for (const auto& [p, c] : x.components()) primes.push_back(p);
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());

    for (auto p : primes) {
        const LocalLevel l = level.local(p);
        const LocalConjugator* xc = x.at(p);
        if (ram.is_ramified(Place::prime(p))) {
            if (xc && xc->is_matrix())
                throw ConfigError("conjugator at ramified prime " + std::to_string(p) + " must be an element of D");
            if (!xc && l.kind == LevelKind::RamifiedFull) continue;
            RamifiedCheck rc{l, std::nullopt, std::nullopt};
            if (xc) {
                rc.x = xc->element();
                rc.x_inv = D.inverse(xc->element());
            }
            ramified_.emplace(p, rc);
            places_.push_back(p);
            continue;
        }
        if (xc && !xc->is_matrix())
            throw ConfigError("conjugator at split prime " + std::to_string(p) + " must be a 2x2 matrix");
        if (!xc && l.kind == LevelKind::Hyperspecial) continue;

        SplitCheck sc;
        sc.level = l;
        const int base = l.default_precision();
        if (xc) {
            // Scale x to a primitive integral matrix; conjugation ignores scalars.
            Integer den = 1, content = 0;
            for (const auto& e : xc->matrix()) den = lcm(den, Integer(e.get_den()));
            std::array<Integer, 4> m;
            for (std::size_t k = 0; k < 4; ++k) {
                m[k] = xc->matrix()[k].get_num() * (den / xc->matrix()[k].get_den());
                content = gcd(content, m[k]);
            }
            for (auto& e : m) e /= content;
            const Integer det = m[0] * m[3] - m[1] * m[2];
            sc.det_val = valuation(det, p);
            sc.precision = base;
            const int work = base + 2 * sc.det_val;
            if (work > max_precision(p) - 4)
                throw PrecisionError("conjugator at " + std::to_string(p) + " needs precision " + std::to_string(work));
            sc.table = &level.split_table(p, work);
            const std::int64_t M = sc.table->modulus;
            sc.x = {to_mod(m[0], M), to_mod(m[1], M), to_mod(m[2], M), to_mod(m[3], M)};
            sc.adj = {to_mod(m[3], M), to_mod(-m[1], M), to_mod(-m[2], M), to_mod(m[0], M)};
            Integer unit = det;
            for (int i = 0; i < sc.det_val; ++i) unit /= p;
            sc.det_unit_inv = invmod(to_mod(unit, M), M);
            sc.conjugated = true;
        } else {
            sc.precision = base;
            sc.table = &level.split_table(p, base);
        }
        split_.emplace(p, sc);
        places_.push_back(p);
    }
}

bool MembershipTester::check_split(const SplitCheck& c, std::span<const std::int64_t, 4> coords) const {
    IntMat2 g = c.table->image(coords);
    if (c.conjugated) {
        const std::int64_t M = c.table->modulus;
        IntMat2 y = mat_mul_mod(mat_mul_mod(c.adj, g, M), c.x, M);
        const std::int64_t pv = ipow(c.level.p, c.det_val);
        for (auto& e : y) {
            if (e % pv != 0) return false;  // x^{-1} gamma x is not integral
            e = mulmod(e / pv, c.det_unit_inv, M);
        }
        g = y;
    }
    const std::int64_t out = ipow(c.level.p, c.precision);
    for (auto& e : g) e = mod(e, out);
    return satisfies_split_level(c.level, g, c.precision);
}

bool MembershipTester::check_ramified(const RamifiedCheck& c, std::span<const std::int64_t, 4> coords) const {
    const auto& D = level_->algebra();
    QuatElement g = level_->order().element(coords);
    if (c.x) g = D.mul(D.mul(*c.x_inv, g), *c.x);
    const std::int64_t p = c.level.p;
    const Rat n = D.nrd(g);
    if (n == 0 || valuation(n, p) < 0) return false;
    if (c.level.kind == LevelKind::RamifiedFull) return true;
    return valuation(n, p) == 0 && in_unit_filtration(D, g, p, c.level.k);
}

bool MembershipTester::at(std::int64_t p, std::span<const std::int64_t, 4> coords) const {
    if (auto it = split_.find(p); it != split_.end()) return check_split(it->second, coords);
    if (auto it = ramified_.find(p); it != ramified_.end()) return check_ramified(it->second, coords);
    return true;
}

bool MembershipTester::operator()(std::span<const std::int64_t, 4> coords) const {
    for (auto p : places_)
        if (!at(p, coords)) return false;
    return true;
}

namespace {

// Coordinates of gamma, reduced to integers congruent modulo a large power of
// p; exact for ramified checks only when the coordinates are integral.
std::array<std::int64_t, 4> local_coords(const GlobalLevel& level, const QuatElement& gamma, std::int64_t p) {
    if (level.algebra().nrd(gamma) != 1) throw ArithmeticError("membership needs nrd(gamma) = 1");
    const auto c = level.order().coordinates(gamma);
    std::array<std::int64_t, 4> out{};
    bool integral = true;
    for (std::size_t t = 0; t < 4; ++t) {
        if (!p_integral(c[t], p))
            throw ArithmeticError("element " + gamma.to_string() + " is not in the order at " + std::to_string(p));
        if (c[t].get_den() != 1) integral = false;
    }
    const int prec = max_precision(p) - 1;
    for (std::size_t t = 0; t < 4; ++t) {
        if (integral && c[t].get_num().fits_slong_p()) out[t] = c[t].get_num().get_si();
        else out[t] = rat_mod(c[t], p, prec);
    }
    return out;
}

bool gamma_is_integral(const GlobalLevel& level, const QuatElement& gamma) {
    const auto c = level.order().coordinates(gamma);
    return std::all_of(c.begin(), c.end(), [](const Rat& r) { return r.get_den() == 1; });
}

bool ramified_direct(const GlobalLevel& level, const QuatElement& g, std::int64_t p) {
    const auto& D = level.algebra();
    const LocalLevel l = level.local(p);
    const Rat n = D.nrd(g);
    if (n == 0 || valuation(n, p) < 0) return false;
    if (l.kind == LevelKind::RamifiedFull) return true;
    return valuation(n, p) == 0 && in_unit_filtration(D, g, p, l.k);
}

}  // namespace

bool member(const GlobalLevel& level, const QuatElement& gamma, std::int64_t p) {
    return conjugated_member(level, Conjugator{}, gamma, p);
}

bool conjugated_member(const GlobalLevel& level, const Conjugator& x, const QuatElement& gamma, std::int64_t p) {
    const auto coords = local_coords(level, gamma, p);
    const auto& D = level.algebra();
    if (D.ramification().is_ramified(Place::prime(p)) && !gamma_is_integral(level, gamma)) {
        QuatElement g = gamma;
        if (const auto* xc = x.at(p)) g = D.mul(D.mul(D.inverse(xc->element()), g), xc->element());
        return ramified_direct(level, g, p);
    }
    std::vector<LocalConjugator> only;
    if (const auto* xc = x.at(p)) only.push_back(*xc);
    const MembershipTester tester(level, Conjugator(std::move(only)));
    return tester.at(p, coords);
}

}  // namespace isospec
