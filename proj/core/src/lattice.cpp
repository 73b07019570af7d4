#include "isospec/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

namespace isospec {

namespace {

using i128 = __int128;

// floor(sqrt(n)) for n >= 0, exact.
i128 isqrt(i128 n) {
    if (n < 2) return n;
    i128 x = static_cast<i128>(std::sqrt(static_cast<long double>(n)));
    while (x * x > n) --x;
    while ((x + 1) * (x + 1) <= n) ++x;
    return x;
}

unsigned resolve_threads(unsigned threads) {
    if (threads != 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace

std::vector<Coords> solve_norm_one_filtered(const Order& order, std::int64_t B,
                                            const std::function<bool(const Coords&)>& keep, unsigned threads) {
    if (B < 0) throw ConfigError("height bound must be nonnegative");
    const auto q = order.norm_form();
    std::size_t r = 4;
    for (std::size_t t = 0; t < 4; ++t)
        if (q[t][t] != 0) {
            r = t;
            break;
        }
    if (r == 4) throw ArithmeticError("norm form has no nonzero diagonal coefficient");
    std::array<std::size_t, 3> free{};
    for (std::size_t t = 0, k = 0; t < 4; ++t)
        if (t != r) free[k++] = t;
    auto coef = [&](std::size_t s, std::size_t t) -> std::int64_t { return s < t ? q[s][t] : q[t][s]; };

    const std::int64_t width = 2 * B + 1;
    const unsigned nthreads = std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(width));
    std::vector<std::vector<Coords>> parts(nthreads);

    auto worker = [&](unsigned id) {
        auto& out = parts[id];
        Coords c{};
        for (std::int64_t u = -B + static_cast<std::int64_t>(id); u <= B; u += nthreads) {
            c[free[0]] = u;
            for (std::int64_t v = -B; v <= B; ++v) {
                c[free[1]] = v;
                for (std::int64_t w = -B; w <= B; ++w) {
                    c[free[2]] = w;
                    // q_rr x^2 + L x + C = 1 in the pivot coordinate x
                    i128 L = 0, C = 0;
                    for (std::size_t s = 0; s < 3; ++s) {
                        const i128 cs = c[free[s]];
                        L += static_cast<i128>(coef(r, free[s])) * cs;
                        C += static_cast<i128>(q[free[s]][free[s]]) * cs * cs;
                        for (std::size_t t = s + 1; t < 3; ++t)
                            C += static_cast<i128>(coef(free[s], free[t])) * cs * c[free[t]];
                    }
                    const i128 A = q[r][r];
                    const i128 disc = L * L - 4 * A * (C - 1);
                    if (disc < 0) continue;
                    const i128 s = isqrt(disc);
                    if (s * s != disc) continue;
                    for (i128 num : {-L + s, -L - s}) {
                        if (num % (2 * A) != 0) continue;
                        const i128 x = num / (2 * A);
                        if (x < -B || x > B) continue;
                        c[r] = static_cast<std::int64_t>(x);
                        if (keep(c)) out.push_back(c);
                        if (s == 0) break;
                    }
                }
            }
        }
    };

    if (nthreads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned id = 0; id < nthreads; ++id) pool.emplace_back(worker, id);
        for (auto& t : pool) t.join();
    }
    std::vector<Coords> all;
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
}

std::vector<Coords> solve_norm_one(const Order& order, std::int64_t B, unsigned threads) {
    return solve_norm_one_filtered(order, B, [](const Coords&) { return true; }, threads);
}

LatticeSlice enumerate_lattice(const GlobalLevel& level, const Conjugator& x, std::int64_t B, unsigned threads) {
    const MembershipTester tester(level, x);
    LatticeSlice slice;
    slice.height_bound = B;
    slice.conjugated = !x.is_identity();
    slice.elements = solve_norm_one_filtered(
        level.order(), B, [&](const Coords& c) { return tester(std::span<const std::int64_t, 4>(c)); }, threads);
    return slice;
}

std::string to_string(TraceKind kind) {
    switch (kind) {
        case TraceKind::Elliptic: return "elliptic";
        case TraceKind::Parabolic: return "parabolic";
        default: return "hyperbolic";
    }
}

double geodesic_length(std::int64_t t) {
    if (t <= 2) return 0.0;
    return 2.0 * std::acosh(static_cast<double>(t) / 2.0);
}

bool TraceSpectrum::contains(std::int64_t t) const {
    return std::any_of(values.begin(), values.end(), [t](const SpectrumValue& v) { return v.t == t; });
}

std::vector<std::int64_t> TraceSpectrum::traces() const {
    std::vector<std::int64_t> out;
    for (const auto& v : values) out.push_back(v.t);
    return out;
}

TraceSpectrum trace_spectrum(const Order& order, const LatticeSlice& slice, std::int64_t T) {
    const auto& D = order.algebra();
    std::array<std::int64_t, 4> tr{};
    for (std::size_t k = 0; k < 4; ++k) tr[k] = D.trd(order.basis()[k]).get_num().get_si();
    std::map<std::int64_t, Coords> best;  // t -> lexicographically smallest witness
    for (const auto& c : slice.elements) {
        std::int64_t t = 0;
        for (std::size_t k = 0; k < 4; ++k) t += tr[k] * c[k];
        t = std::abs(t);
        if (t > T) continue;
        auto it = best.find(t);
        if (it == best.end() || c < it->second) best[t] = c;
    }
    TraceSpectrum s;
    s.trace_bound = T;
    s.height_bound = slice.height_bound;
    for (const auto& [t, w] : best)
        s.values.push_back({t, t < 2 ? TraceKind::Elliptic : (t == 2 ? TraceKind::Parabolic : TraceKind::Hyperbolic), w});
    return s;
}

SpectrumComparison compare_spectra(const SpectrumSide& a, const SpectrumSide& b, int m, unsigned threads) {
    if (a.spectrum.trace_bound != b.spectrum.trace_bound)
        throw ConfigError("spectra were computed with different trace bounds");
    if (m < 1) throw ConfigError("margin factor must be at least 1");
    SpectrumComparison rep;
    rep.margin_factor = m;
    auto one_way = [&](const SpectrumSide& have, const SpectrumSide& other, char name) {
        std::optional<TraceSpectrum> wider;
        for (const auto& v : have.spectrum.values) {
            if (other.spectrum.contains(v.t)) continue;
            const std::int64_t bound = m * other.spectrum.height_bound;
            if (!wider) {
                const auto slice = enumerate_lattice(*other.level, other.conjugator, bound, threads);
                wider = trace_spectrum(other.level->order(), slice, other.spectrum.trace_bound);
            }
            if (wider->contains(v.t)) {
                rep.recovered.push_back(v.t);
            } else {
                rep.violations.push_back({v.t, name, v.witness, bound});
            }
        }
    };
    one_way(a, b, 'A');
    one_way(b, a, 'B');
    std::sort(rep.recovered.begin(), rep.recovered.end());
    rep.agree = rep.violations.empty();
    return rep;
}

TorsionReport torsion_free_check(const GlobalLevel& level, const Order& order, const LatticeSlice& slice) {
    TorsionReport rep;
    for (const auto& [p, l] : level.locals()) {
        const bool in_gamma_p = l.kind == LevelKind::PrincipalCongruence || l.kind == LevelKind::SymmetricCongruence;
        if (p >= 5 && in_gamma_p) {
            rep.criterion_pass = true;
            rep.criterion_place = p;
            break;
        }
    }
    const auto& D = order.algebra();
    for (const auto& c : slice.elements) {
        const QuatElement g = order.element(c);
        if (g == QuatElement::scalar(-1)) rep.contains_minus_one = true;
        if (g == QuatElement::scalar(1) || g == QuatElement::scalar(-1)) continue;
        if (abs(D.trd(g)) < 2) {
            rep.scan_clean = false;
            if (!rep.elliptic_witness) rep.elliptic_witness = c;
        }
    }
    if (rep.criterion_pass)
        rep.detail = "K_" + std::to_string(*rep.criterion_place) + " lies in the principal congruence subgroup mod " +
                     std::to_string(*rep.criterion_place) + "; torsion is excluded";
    else
        rep.detail = "no split prime p >= 5 with K_p inside Gamma(p); criterion inconclusive";
    return rep;
}

// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

}  // namespace

void save_slice(const std::filesystem::path& path, std::uint64_t config_hash, const LatticeSlice& slice) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw Error("cannot write slice cache " + tmp);
        out << "# isospec-slice v1 hash=" << hex64(config_hash) << " height=" << slice.height_bound
            << " conjugated=" << (slice.conjugated ? 1 : 0) << " count=" << slice.elements.size() << "\n";
        for (const auto& c : slice.elements) out << c[0] << ' ' << c[1] << ' ' << c[2] << ' ' << c[3] << '\n';
    }
    std::filesystem::rename(tmp, path);
}

std::optional<LatticeSlice> load_slice(const std::filesystem::path& path, std::uint64_t config_hash) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::string header;
    if (!std::getline(in, header)) return std::nullopt;
    std::istringstream hs(header);
    std::string hash_field, height_field, conj_field, count_field, magic, version;
    hs >> magic >> magic >> version >> hash_field >> height_field >> conj_field >> count_field;
    if (magic != "isospec-slice" || version != "v1" || hash_field != "hash=" + hex64(config_hash)) return std::nullopt;
    LatticeSlice s;
    try {
        s.height_bound = std::stoll(height_field.substr(height_field.find('=') + 1));
        s.conjugated = conj_field.substr(conj_field.find('=') + 1) == "1";
        const auto count = std::stoull(count_field.substr(count_field.find('=') + 1));
        Coords c{};
        while (in >> c[0] >> c[1] >> c[2] >> c[3]) s.elements.push_back(c);
        if (s.elements.size() != count) return std::nullopt;
    } catch (const std::exception&) {
        return std::nullopt;
    }
    return s;
}

}  // namespace isospec
