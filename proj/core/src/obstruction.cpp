#include "isospec/obstruction.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace isospec {

namespace {

constexpr std::uint64_t kExhaustiveBudget = 4'000'000;

Integer zpow(std::int64_t p, int e) {
    Integer r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(e));
    return r;
}

Integer zmod(const Integer& a, const Integer& m) {
    Integer r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

Integer zinv(const Integer& a, const Integer& m) {
    Integer r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0) throw ArithmeticError("not invertible");
    return r;
}

RatMat2 rmul(const RatMat2& x, const RatMat2& y) {
    return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
            x[2] * y[1] + x[3] * y[3]};
}

Rat rdet(const RatMat2& x) { return x[0] * x[3] - x[1] * x[2]; }

RatMat2 rinv(const RatMat2& x) {
    const Rat d = rdet(x);
    if (d == 0) throw ArithmeticError("singular matrix");
    return {x[3] / d, -x[1] / d, -x[2] / d, x[0] / d};
}

RatMat2 rmat(long a, long b, long c, long d) { return {Rat(a), Rat(b), Rat(c), Rat(d)}; }

// Primitive integral representative of the homothety class of x.
RatMat2 primitive(const RatMat2& x) {
    Integer den = 1, content = 0;
    for (const auto& e : x) den = lcm(den, Integer(e.get_den()));
    std::array<Integer, 4> m;
    for (std::size_t k = 0; k < 4; ++k) {
        m[k] = x[k].get_num() * (den / x[k].get_den());
        content = gcd(content, m[k]);
    }
    RatMat2 out;
    for (std::size_t k = 0; k < 4; ++k) out[k] = Rat(m[k] / content);
    return out;
}

bool p_integral(const Rat& r, std::int64_t p) {
    return !mpz_divisible_ui_p(r.get_den().get_mpz_t(), static_cast<unsigned long>(p));
}

std::int64_t least_primitive_root_mod_p2(std::int64_t p) {
    const std::int64_t m = p * p, phi = p * (p - 1);
    std::vector<std::int64_t> qs = prime_divisors(Integer(static_cast<long>(phi)));
    for (std::int64_t g = 2; g < m; ++g) {
        if (g % p == 0) continue;
        bool ok = true;
        for (auto q : qs)
            if (powmod(g, phi / q, m) == 1) ok = false;
        if (ok) return g;
    }
    throw ArithmeticError("no primitive root modulo p^2");
}

int level_depth(const LocalLevel& l) { return std::max(1, l.depth()); }

// ---------------------------------------------------------------------------
// Fixed points in the Bruhat-Tits tree.  A vertex at distance d from the
// standard vertex is the lattice Z_p (x, y) + p^d Z_p^2, stored with either
// x = 1 or (p | x and y = 1).

struct TreeVertex {
    int d = 0;
    Integer x = 1, y = 0;
    int parent = -1;
};

RatMat2 vertex_basis(const TreeVertex& v, std::int64_t p) {
    if (v.d == 0) return rmat(1, 0, 0, 1);
    const Rat pd(zpow(p, v.d));
    if (v.x == 1) return {Rat(1), Rat(0), Rat(v.y), pd};
    return {Rat(v.x), pd, Rat(1), Rat(0)};
}

bool fixes(const std::array<Integer, 4>& g, const TreeVertex& v, std::int64_t p) {
    if (v.d == 0) return true;
    const Integer m = zpow(p, v.d);
    const Integer gx = g[0] * v.x + g[1] * v.y, gy = g[2] * v.x + g[3] * v.y;
    if (v.x == 1) return zmod(gy - gx * v.y, m) == 0;  // lambda = gx
    return zmod(gx - gy * v.x, m) == 0;                 // lambda = gy
}

struct FixedTree {
    std::vector<TreeVertex> vertices;
    bool reached_boundary = false;
    // Center: a vertex, or an edge (child, parent) when the diameter is odd.
    int center = 0;
    std::optional<int> center_edge_other;
    std::string describe(std::int64_t p) const;
};

std::string vertex_name(const TreeVertex& v) {
    if (v.d == 0) return "v0";
    return "[" + v.x.get_str() + ":" + v.y.get_str() + "]@" + std::to_string(v.d);
}

std::string FixedTree::describe(std::int64_t) const {
    std::string s = std::to_string(vertices.size()) + " fixed vertices, center ";
    if (center_edge_other)
        s += "edge {" + vertex_name(vertices[static_cast<std::size_t>(center)]) + ", " +
             vertex_name(vertices[static_cast<std::size_t>(*center_edge_other)]) + "}";
    else
        s += "vertex " + vertex_name(vertices[static_cast<std::size_t>(center)]);
    return s;
}

FixedTree fixed_tree(const std::vector<std::array<Integer, 4>>& gens, std::int64_t p, int radius) {
    FixedTree t;
    t.vertices.push_back({});
    for (std::size_t i = 0; i < t.vertices.size(); ++i) {
        const TreeVertex v = t.vertices[i];
        if (v.d == radius) {
            t.reached_boundary = true;
            continue;
        }
        std::vector<TreeVertex> children;
        const Integer pd = zpow(p, v.d);
        if (v.d == 0) {
            for (std::int64_t s = 0; s < p; ++s) children.push_back({1, 1, Integer(static_cast<long>(s)), 0});
            children.push_back({1, 0, 1, 0});
        } else if (v.x == 1) {
            for (std::int64_t s = 0; s < p; ++s) children.push_back({v.d + 1, 1, v.y + pd * s, static_cast<int>(i)});
        } else {
            for (std::int64_t s = 0; s < p; ++s) children.push_back({v.d + 1, v.x + pd * s, 1, static_cast<int>(i)});
        }
        for (auto& c : children) {
            c.parent = static_cast<int>(i);
            if (std::all_of(gens.begin(), gens.end(), [&](const auto& g) { return fixes(g, c, p); }))
                t.vertices.push_back(c);
        }
    }
    // Tree center via two breadth-first sweeps.
    const std::size_t n = t.vertices.size();
    std::vector<std::vector<int>> adj(n);
    for (std::size_t i = 1; i < n; ++i) {
        const int par = t.vertices[i].parent;
        adj[i].push_back(par);
        adj[static_cast<std::size_t>(par)].push_back(static_cast<int>(i));
    }
    auto bfs = [&](int start, std::vector<int>& prev) {
        std::vector<int> dist(n, -1);
        prev.assign(n, -1);
        std::deque<int> q{start};
        dist[static_cast<std::size_t>(start)] = 0;
        int far = start;
        while (!q.empty()) {
            const int u = q.front();
            q.pop_front();
            if (dist[static_cast<std::size_t>(u)] > dist[static_cast<std::size_t>(far)]) far = u;
            for (int w : adj[static_cast<std::size_t>(u)])
                if (dist[static_cast<std::size_t>(w)] < 0) {
                    dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
                    prev[static_cast<std::size_t>(w)] = u;
                    q.push_back(w);
                }
        }
        return far;
    };
    std::vector<int> prev;
    const int a = bfs(0, prev);
    const int b = bfs(a, prev);
    std::vector<int> path{b};
    while (path.back() != a) path.push_back(prev[static_cast<std::size_t>(path.back())]);
    const std::size_t len = path.size() - 1;
    if (len % 2 == 0) {
        t.center = path[len / 2];
    } else {
        int u = path[len / 2], w = path[len / 2 + 1];
        // keep the endpoint nearer the standard vertex first
        if (t.vertices[static_cast<std::size_t>(u)].d > t.vertices[static_cast<std::size_t>(w)].d) std::swap(u, w);
        t.center = u;
        t.center_edge_other = w;
    }
    return t;
}

// ---------------------------------------------------------------------------
// Exhaustive search for normalizers n = X m Y with m in SL_2(Z/p^P) diag(w, 1).
// Y g Y^{-1} must be integral for every generator g; X is integral.

struct SearchResult {
    bool complete = false;
    std::optional<RatMat2> found;
    std::uint64_t examined = 0;
};

SearchResult exhaustive_search(const LocalLevel& level, const std::vector<std::array<Integer, 4>>& gens,
                               const RatMat2& X, const RatMat2& Y, std::int64_t w, int P) {
    SearchResult res;
    const std::int64_t p = level.p;
    const int M = level_depth(level);
    const Rat detX = rdet(X);
    const int e = valuation(detX, p);
    if (P < M + e || P > max_precision(p) - 1) return res;
    const std::int64_t pP = ipow(p, P);
    const std::uint64_t count = static_cast<std::uint64_t>(pP) * static_cast<std::uint64_t>(pP) *
                                static_cast<std::uint64_t>(pP) / static_cast<std::uint64_t>(p) /
                                static_cast<std::uint64_t>(p) * static_cast<std::uint64_t>(p * p - 1);
    if (static_cast<double>(pP) * static_cast<double>(pP) * static_cast<double>(pP) > 4.0e18 ||
        count > kExhaustiveBudget)
        return res;

    // Generators moved by Y, reduced modulo p^P.
    const RatMat2 Yi = rinv(Y);
    std::vector<IntMat2> g2;
    for (const auto& g : gens) {
        const RatMat2 gr{Rat(g[0]), Rat(g[1]), Rat(g[2]), Rat(g[3])};
        const RatMat2 h = rmul(rmul(Y, gr), Yi);
        IntMat2 r{};
        for (std::size_t k = 0; k < 4; ++k) {
            if (!p_integral(h[k], p)) return res;
            r[k] = rat_mod(h[k], p, P);
        }
        g2.push_back(r);
    }
    IntMat2 Xi{}, Xadj{};
    for (std::size_t k = 0; k < 4; ++k) {
        if (X[k].get_den() != 1) return res;
        Xi[k] = rat_mod(X[k], p, P);
    }
    Xadj = {Xi[3], mod(-Xi[1], pP), mod(-Xi[2], pP), Xi[0]};
    Integer unit = detX.get_num();
    for (int i = 0; i < e; ++i) unit /= p;
    const std::int64_t pe = ipow(p, e), pM = ipow(p, M);
    const std::int64_t unit_inv = invmod(rat_mod(Rat(unit), p, P), pP);
    const std::int64_t w_inv = invmod(mod(w, pP), pP);

    auto check = [&](const IntMat2& m) {
        const IntMat2 madj{m[3], mod(-m[1], pP), mod(-m[2], pP), m[0]};
        for (const auto& g : g2) {
            IntMat2 h = mat_mul_mod(mat_mul_mod(m, g, pP), madj, pP);
            for (auto& v : h) v = mulmod(v, w_inv, pP);
            IntMat2 z = mat_mul_mod(mat_mul_mod(Xi, h, pP), Xadj, pP);
            for (auto& v : z) {
                if (v % pe != 0) return false;
                v = mod(mulmod(v / pe, unit_inv, pP), pM);
            }
            if (!satisfies_split_level(level, z, M)) return false;
        }
        return true;
    };

    for (std::int64_t a = 0; a < pP; ++a)
        for (std::int64_t c = 0; c < pP; ++c) {
            if (a % p == 0 && c % p == 0) continue;
            for (std::int64_t t = 0; t < pP; ++t) {
                std::int64_t b, d;
                if (a % p != 0) {
                    b = t;
                    d = mulmod(mod(1 + mulmod(b, c, pP), pP), invmod(a, pP), pP);
                } else {
                    d = t;
                    b = mulmod(mod(mulmod(a, d, pP) - 1, pP), invmod(c, pP), pP);
                }
                ++res.examined;
                const IntMat2 m{mulmod(a, mod(w, pP), pP), b, mulmod(c, mod(w, pP), pP), d};
                if (check(m)) {
                    const RatMat2 mr{Rat(m[0]), Rat(m[1]), Rat(m[2]), Rat(m[3])};
                    res.found = primitive(rmul(rmul(X, mr), Y));
                    res.complete = true;
                    return res;
                }
            }
        }
    res.complete = true;
    return res;
}

std::string mat_str(const RatMat2& m) {
    return "[[" + m[0].get_str() + "," + m[1].get_str() + "],[" + m[2].get_str() + "," + m[3].get_str() + "]]";
}

}  // namespace

// ---------------------------------------------------------------------------

bool ClassSubgroup::contains(const SquareClass& c) const {
    return std::find(classes.begin(), classes.end(), c) != classes.end();
}

int ClassSubgroup::dimension() const {
    int d = 0;
    while ((std::size_t{1} << d) < classes.size()) ++d;
    return d;
}

ClassSubgroup ClassSubgroup::generated_by(Place place, const std::vector<SquareClass>& gens) {
    std::set<std::uint32_t> bits{0};
    for (const auto& g : gens) {
        std::set<std::uint32_t> next = bits;
        for (auto b : bits) next.insert(b ^ g.bits());
        bits = next;
    }
    ClassSubgroup out{place, {}};
    for (auto b : bits) out.classes.push_back(SquareClass::from_bits(place, b));
    return out;
}

std::vector<std::array<Integer, 4>> split_level_generators(const LocalLevel& level, int work) {
    const std::int64_t p = level.p;
    if (p == 2) throw UnsupportedError("normalizer search at p = 2 is not supported");
    const Integer W = zpow(p, work);
    std::vector<std::array<Integer, 4>> gens;
    auto gamma = [&](int j) {
        const Integer q = zpow(p, j);
        gens.push_back({1, q, 0, 1});
        gens.push_back({1, 0, q, 1});
        gens.push_back({1 + q, q, -q, 1 - q});
    };
    auto torus = [&](const Integer& a) { gens.push_back({a, 0, 0, zinv(a, W)}); };
    switch (level.kind) {
        case LevelKind::Hyperspecial:
            gens.push_back({1, 1, 0, 1});
            gens.push_back({1, 0, 1, 1});
            break;
        case LevelKind::PrincipalCongruence: gamma(level.k); break;
        case LevelKind::HeckeCongruence:
            gamma(level.k);
            gens.push_back({1, 1, 0, 1});
            torus(Integer(static_cast<long>(least_primitive_root_mod_p2(p))));
            break;
        case LevelKind::SymmetricCongruence: {
            gamma(level.k + 1);
            const Integer q = zpow(p, level.k);
            gens.push_back({1, q, q, 1 + q * q});
            torus(1 + q);
            break;
        }
        default: throw ArithmeticError(level.to_string() + " is not a split level");
    }
    for (auto& g : gens)
        for (auto& e : g) e = zmod(e, W);
    return gens;
}

bool normalizes(const LocalLevel& level, const RatMat2& n_in) {
    const std::int64_t p = level.p;
    const RatMat2 n = primitive(n_in);
    const int v = valuation(rdet(n), p);
    const int M = level_depth(level);
    const auto gens = split_level_generators(level, M + v + 4);
    const RatMat2 ni = rinv(n);
    for (const auto& g : gens) {
        const RatMat2 gr{Rat(g[0]), Rat(g[1]), Rat(g[2]), Rat(g[3])};
        for (const auto& y : {rmul(rmul(n, gr), ni), rmul(rmul(ni, gr), n)}) {
            IntMat2 r{};
            for (std::size_t k = 0; k < 4; ++k) {
                if (!p_integral(y[k], p)) return false;
                r[k] = rat_mod(y[k], p, M);
            }
            if (!satisfies_split_level(level, r, M)) return false;
        }
    }
    return true;
}

NormClassBound normalizer_norm_classes(const LocalLevel& level, int radius, int precision) {
    const std::int64_t p = level.p;
    if (is_ramified_kind(level.kind)) throw ConfigError(level.to_string() + ": normalizer bounds are for split primes");
    if (p == 2) throw UnsupportedError("normalizer search at p = 2 is not supported");
    if (radius < 1) throw ConfigError("normalizer radius must be at least 1");
    const int M = level_depth(level);
    if (precision < M)
        throw PrecisionError(level.to_string() + " needs precision at least " + std::to_string(M) + " (got " +
                             std::to_string(precision) + ")");

    const Place place = Place::prime(p);
    NormClassBound out;
    out.p = p;
    out.radius = radius;
    const auto gens = split_level_generators(level, M + 2 * radius + 6);
    const FixedTree tree = fixed_tree(gens, p, radius);
    out.notes.push_back(tree.describe(p) + (tree.reached_boundary ? " (fixed set reaches the search radius)" : ""));

    const auto& c1 = tree.vertices[static_cast<std::size_t>(tree.center)];
    const RatMat2 B = vertex_basis(c1, p);
    const RatMat2 Bi = rinv(B);
    std::optional<RatMat2> flip;
    if (tree.center_edge_other) {
        // F swaps the two center vertices: conjugate [[0,1],[p,0]] into place.
        const auto& c2 = tree.vertices[static_cast<std::size_t>(*tree.center_edge_other)];
        const RatMat2 H = rmul(Bi, vertex_basis(c2, p));
        Rat x = H[0], y = H[2];
        if (!p_integral(x, p) || !p_integral(y, p) || (valuation(x == 0 ? Rat(p) : x, p) > 0 && valuation(y == 0 ? Rat(p) : y, p) > 0)) {
            x = H[1];
            y = H[3];
        }
        RatMat2 h;
        if (x != 0 && valuation(x, p) == 0) h = {x, Rat(0), y, Rat(1)};
        else h = {x, Rat(1), y, Rat(0)};
        const RatMat2 F0 = rmat(0, 1, static_cast<long>(p), 0);
        flip = primitive(rmul(rmul(B, rmul(rmul(h, F0), rinv(h))), Bi));
    }

    // Structured candidates: torus, Weyl-type and similitude elements, raw and moved to the center.
    const std::int64_t u = least_nonresidue(p);
    std::vector<RatMat2> units{rmat(u, 0, 0, 1), rmat(0, 1, u, 0), rmat(0, 1, 1, 0), rmat(-1, 0, 0, 1)};
    for (long a = 0; a < p && units.size() < 8; ++a)
        for (long b = 1; b < p && units.size() < 8; ++b)
            if (legendre(Integer(a * a + b * b), p) == -1) {
                units.push_back(rmat(a, -b, b, a));
                units.push_back(rmat(a, b, b, -a));
            }
    std::vector<RatMat2> candidates;
    for (const auto& m : units) {
        candidates.push_back(m);
        if (c1.d > 0) candidates.push_back(rmul(rmul(B, m), Bi));
    }
    if (flip) {
        const std::size_t n = candidates.size();
        candidates.push_back(*flip);
        for (std::size_t i = 0; i < n; ++i) candidates.push_back(rmul(*flip, candidates[i]));
    } else if (tree.reached_boundary) {
        for (long j = 1; j <= 2 * radius + 1; j += 2) {
            const long pj = static_cast<long>(ipow(p, j));
            candidates.push_back(rmat(0, 1, pj, 0));
            candidates.push_back(rmat(pj, 0, 0, 1));
            candidates.push_back(rmat(0, 1, pj * u, 0));
            candidates.push_back(rmat(pj * u, 0, 0, 1));
        }
    }

    std::vector<SquareClass> found{SquareClass::from_bits(place, 0)};
    out.witnesses.push_back({found.front(), rmat(1, 0, 0, 1)});
    auto record = [&](const RatMat2& n, const std::string& how) {
        const RatMat2 prim = primitive(n);
        const SquareClass c = square_class(rdet(prim), place);
        if (ClassSubgroup::generated_by(place, found).contains(c)) return;
        found.push_back(c);
        out.witnesses.push_back({c, prim});
        out.notes.push_back("class " + std::to_string(c.rep) + " realized by " + mat_str(prim) + " (" + how + ")");
    };
    for (const auto& n : candidates) {
        const SquareClass c = square_class(rdet(primitive(n)), place);
        if (ClassSubgroup::generated_by(place, found).contains(c)) continue;
        if (normalizes(level, n)) record(n, "structured candidate");
    }

    bool exact = true;
    for (const auto& c : square_class_group(place)) {
        if (ClassSubgroup::generated_by(place, found).contains(c)) continue;
        const bool odd = (c.bits() & 2u) != 0;
        const std::int64_t unit_rep = SquareClass::from_bits(place, c.bits() & 1u).rep;
        if (tree.reached_boundary) {
            exact = false;
            out.notes.push_back("class " + std::to_string(c.rep) + " not found; not excluded (center unknown)");
            continue;
        }
        if (odd && !flip) {
            out.notes.push_back("class " + std::to_string(c.rep) +
                                " excluded: normalizers fix the center vertex, so det has even valuation");
            continue;
        }
        SearchResult r;
        if (odd) {
            // n = F m with m fixing the center edge; det F = -p up to squares.
            const SquareClass rest = c * square_class(rdet(*flip), place);
            r = exhaustive_search(level, gens, rmul(*flip, B), Bi, SquareClass::from_bits(place, rest.bits() & 1u).rep,
                                  precision);
        } else {
            r = exhaustive_search(level, gens, B, Bi, unit_rep, precision);
        }
        if (r.found && normalizes(level, *r.found)) {
            record(*r.found, "exhaustive search");
        } else if (r.complete && !r.found) {
            out.notes.push_back("class " + std::to_string(c.rep) + " excluded by exhaustive search mod " +
                                std::to_string(p) + "^" + std::to_string(precision) + " (" +
                                std::to_string(r.examined) + " candidates)");
        } else {
            exact = false;
            out.notes.push_back("class " + std::to_string(c.rep) + " not found; exhaustive search out of reach at precision " +
                                std::to_string(precision));
        }
    }
    out.certified_lower = ClassSubgroup::generated_by(place, found);
    out.assumed_upper = out.certified_lower;
    out.exact = exact;
    return out;
}

// ---------------------------------------------------------------------------

std::uint64_t ObstructionGroup::embed(const std::vector<SquareClass>& local) const {
    if (local.size() != support.size()) throw ArithmeticError("class family does not match the support");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < support.size(); ++i)
        v |= static_cast<std::uint64_t>(local[i].bits()) << offsets[i];
    return v;
}

namespace {

std::uint64_t reduce_by(std::uint64_t v, const std::vector<std::uint64_t>& basis) {
    for (auto b : basis) {
        const int pivot = 63 - __builtin_clzll(b);
        if ((v >> pivot) & 1u) v ^= b;
    }
    return v;
}

}  // namespace

std::vector<int> ObstructionGroup::reduce(std::uint64_t ambient) const {
    const std::uint64_t r = reduce_by(ambient, kernel_basis);
    std::vector<int> out;
    for (int pos : free_positions) out.push_back(static_cast<int>((r >> pos) & 1u));
    return out;
}

bool ObstructionGroup::is_zero(std::uint64_t ambient) const { return reduce_by(ambient, kernel_basis) == 0; }

ObstructionGroup build_obstruction_group(std::vector<NormClassBound> bounds, std::vector<Rat> relations) {
    std::sort(bounds.begin(), bounds.end(), [](const auto& a, const auto& b) { return a.p < b.p; });
    ObstructionGroup g;
    g.relations = std::move(relations);
    int offset = 0;
    for (const auto& b : bounds) {
        g.support.push_back(b.p);
        g.offsets.push_back(offset);
        offset += square_class_rank(Place::prime(b.p));
    }
    if (offset > 64) throw UnsupportedError("obstruction support too large");
    g.ambient_dimension = offset;
    g.bounds = std::move(bounds);

    std::vector<std::uint64_t> spanning;
    for (std::size_t i = 0; i < g.bounds.size(); ++i)
        for (const auto& c : g.bounds[i].assumed_upper.classes)
            spanning.push_back(static_cast<std::uint64_t>(c.bits()) << g.offsets[i]);
    for (const auto& r : g.relations) {
        std::vector<SquareClass> loc;
        for (auto p : g.support) loc.push_back(square_class(r, Place::prime(p)));
        spanning.push_back(g.embed(loc));
    }
    // Reduced echelon form, pivots on the highest set bit.
    std::vector<std::uint64_t> basis;
    for (auto v : spanning) {
        v = reduce_by(v, basis);
        if (v == 0) continue;
        const int pivot = 63 - __builtin_clzll(v);
        for (auto& b : basis)
            if ((b >> pivot) & 1u) b ^= v;
        basis.push_back(v);
        std::sort(basis.begin(), basis.end(), std::greater<>());
    }
    g.kernel_basis = basis;
    std::set<int> pivots;
    for (auto b : basis) pivots.insert(63 - __builtin_clzll(b));
    for (int pos = 0; pos < g.ambient_dimension; ++pos)
        if (!pivots.count(pos)) g.free_positions.push_back(pos);
    g.rank = static_cast<int>(g.free_positions.size());
    return g;
}

ObstructionGroup obstruction_group(const GlobalLevel& level, std::vector<NormClassBound> bounds) {
    const auto split = level.leveled_split_primes();
    std::vector<std::int64_t> have;
    for (const auto& b : bounds) have.push_back(b.p);
    std::sort(have.begin(), have.end());
    if (have != split) throw ConfigError("normalizer bounds must cover exactly the leveled split primes");
    std::vector<Rat> rel{Rat(-1)};
    std::set<std::int64_t> primes(split.begin(), split.end());
    for (auto q : level.algebra().ramification().finite_primes()) primes.insert(q);
    for (auto q : primes) rel.push_back(Rat(q));
    return build_obstruction_group(std::move(bounds), std::move(rel));
}

std::string to_string(Verdict v) { return v == Verdict::NonIsometric ? "NonIsometric" : "Inconclusive"; }

Certificate certify(const GlobalLevel& level, const Conjugator& x, const ObstructionGroup& group) {
    const auto& D = level.algebra();
    const auto ram = D.ramification();
    for (const auto& [p, c] : x.components()) {
        const bool in_support = std::find(group.support.begin(), group.support.end(), p) != group.support.end();
        if (!in_support && !ram.is_ramified(Place::prime(p)))
            throw ConfigError("conjugator is supported at " + std::to_string(p) +
                              ", a split prime without normalizer bounds");
    }
    Certificate cert;
    cert.x = x;
    cert.group = group;
    for (auto p : group.support) cert.local_classes.push_back(square_class(x.local_norm(p, D), Place::prime(p)));
    cert.ambient_class = group.embed(cert.local_classes);
    cert.class_vector = group.reduce(cert.ambient_class);
    const bool nonzero = !group.is_zero(cert.ambient_class);
    cert.verdict = nonzero ? Verdict::NonIsometric : Verdict::Inconclusive;
    for (const auto& b : group.bounds)
        if (!b.exact)
            cert.assumptions.push_back("normalizer classes at " + std::to_string(b.p) + " complete within radius " +
                                       std::to_string(b.radius));
    return cert;
}

Certificate certify(const GlobalLevel& level, const Conjugator& x, int radius, int precision) {
    std::vector<NormClassBound> bounds;
    for (auto p : level.leveled_split_primes()) bounds.push_back(normalizer_norm_classes(level.local(p), radius, precision));
    return certify(level, x, obstruction_group(level, std::move(bounds)));
}

}  // namespace isospec
