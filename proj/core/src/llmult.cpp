#include "isospec/llmult.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace isospec {

int ComponentGroup::order() const {
    switch (kind) {
        case ComponentGroupKind::Trivial: return 1;
        case ComponentGroupKind::Z2: return 2;
        default: return 4;
    }
}

std::vector<unsigned> ComponentGroup::elements() const {
    std::vector<unsigned> out;
    for (int s = 0; s < order(); ++s) out.push_back(static_cast<unsigned>(s));
    return out;
}

std::string to_string(PairingMode mode) {
    switch (mode) {
        case PairingMode::Nondegenerate: return "Nondegenerate";
        case PairingMode::Exceptional: return "Exceptional";
        default: return "Singleton";
    }
}

PairingMode parse_pairing_mode(const std::string& name) {
    for (auto m : {PairingMode::Nondegenerate, PairingMode::Exceptional, PairingMode::Singleton})
        if (to_string(m) == name) return m;
    throw ConfigError("unknown pairing mode '" + name + "'");
}

ComponentGroup LocalPlaceDatum::component_group() const {
    if (ratio_trivial) return {ComponentGroupKind::Trivial};
    // Split places with a quadratic ratio carry a Z2 x Z2; the pairing is only
    // modeled through its Nondegenerate sign.
    if (ratio_quadratic) return {ComponentGroupKind::Z2xZ2};
    return {ComponentGroupKind::Z2};
}

std::string to_string(GlobalType type) {
    switch (type) {
        case GlobalType::APrime: return "a'";
        case GlobalType::ADoublePrime: return "a''";
        default: return "b";
    }
}

GlobalType parse_global_type(const std::string& name) {
    for (auto t : {GlobalType::APrime, GlobalType::ADoublePrime, GlobalType::B})
        if (to_string(t) == name) return t;
    throw ConfigError("unknown global type '" + name + "'");
}

GlobalType classify_type(bool global_ratio_quadratic, const std::vector<LocalPlaceDatum>& places) {
    std::set<int> seen;
    bool nonsplit_quadratic = false;
    for (const auto& v : places) {
        const std::string where = "place " + std::to_string(v.place) + ": ";
        if (!seen.insert(v.place).second) throw ConfigError(where + "listed twice");
        if (v.ratio_trivial && v.ratio_quadratic) throw ConfigError(where + "ratio cannot be both trivial and quadratic");
        if (!v.split_for_D && v.ratio_trivial)
            throw ConfigError(where + "D does not split, so the local ratio must be nontrivial");
        if (v.mode == PairingMode::Exceptional && (v.split_for_D || !v.ratio_quadratic))
            throw ConfigError(where + "Exceptional pairing needs a non-split place with quadratic ratio");
        if (!v.split_for_D && v.ratio_quadratic && v.mode != PairingMode::Exceptional)
            throw ConfigError(where + "non-split place with quadratic ratio has an Exceptional pairing");
        if (v.ratio_trivial && v.mode != PairingMode::Singleton)
            throw ConfigError(where + "trivial ratio gives a singleton packet");
        if (global_ratio_quadratic && !v.ratio_quadratic && !v.ratio_trivial)
            throw ConfigError(where + "a quadratic global ratio restricts to a quadratic or trivial local ratio");
        if (!v.split_for_D && v.ratio_quadratic) nonsplit_quadratic = true;
    }
    if (global_ratio_quadratic) return GlobalType::B;
    return nonsplit_quadratic ? GlobalType::APrime : GlobalType::ADoublePrime;
}

const LocalPlaceDatum& DihedralDatum::at(int place) const {
    for (const auto& v : places)
        if (v.place == place) return v;
    throw ConfigError("place " + std::to_string(place) + " is not listed");
}

std::vector<int> DihedralDatum::nondegenerate_places() const {
    std::vector<int> out;
    for (const auto& v : places)
        if (v.mode == PairingMode::Nondegenerate) out.push_back(v.place);
    std::sort(out.begin(), out.end());
    return out;
}

int DihedralDatum::exceptional_count() const {
    return static_cast<int>(
        std::count_if(places.begin(), places.end(), [](const auto& v) { return v.mode == PairingMode::Exceptional; }));
}

void DihedralDatum::validate() const {
    if (d < 1) throw ConfigError("d must be positive");
    const GlobalType t = classify_type(type == GlobalType::B, places);
    if (t != type) throw ConfigError("local data give type " + to_string(t) + ", not " + to_string(type));
    const auto& w = at(v0);
    if (w.split_for_D) throw ConfigError("v0 must be a place where D does not split");
    if (type == GlobalType::ADoublePrime && w.mode != PairingMode::Nondegenerate)
        throw ConfigError("type a'' needs a Nondegenerate pairing at v0");
}

std::vector<PacketChoice> all_choices(const DihedralDatum& datum) {
    const auto nd = datum.nondegenerate_places();
    std::vector<PacketChoice> out;
    for (unsigned s = 0; s < (1u << nd.size()); ++s) {
        PacketChoice c;
        for (std::size_t i = 0; i < nd.size(); ++i) c[nd[i]] = ((s >> (nd.size() - 1 - i)) & 1u) ? -1 : 1;
        out.push_back(c);
    }
    return out;
}

namespace {

void check_choice(const DihedralDatum& datum, const PacketChoice& choice) {
    const auto nd = datum.nondegenerate_places();
    if (choice.size() != nd.size()) throw ConfigError("packet choice must give a sign at every Nondegenerate place");
    for (int p : nd) {
        auto it = choice.find(p);
        if (it == choice.end() || (it->second != 1 && it->second != -1))
            throw ConfigError("packet choice needs sign +1 or -1 at place " + std::to_string(p));
    }
}

std::int64_t exact_div(std::int64_t num, std::int64_t den, const DihedralDatum& datum) {
    if (num % den != 0)
        throw ArithmeticError("inconsistent datum: type " + to_string(datum.type) + " with d = " +
                              std::to_string(datum.d) + " and " + std::to_string(datum.exceptional_count()) +
                              " Exceptional places has non-integral multiplicity");
    return num / den;
}

// Compact form used by verify_identity and the sweep: Nondegenerate places
// are bits of a mask (bit 0 is v0 for type a''), set bit = minus member.
struct Compact {
    GlobalType type;
    std::int64_t d;
    int exceptional;
    int k;
    unsigned v0_bit;  // 0 when v0 is not Nondegenerate
};

std::int64_t compact_multiplicity(const Compact& c, unsigned s, const DihedralDatum* datum) {
    const std::int64_t e = std::int64_t{1} << c.exceptional;
    switch (c.type) {
        case GlobalType::APrime: return datum ? exact_div(c.d * e, 2, *datum) : c.d * e / 2;
        case GlobalType::B: return datum ? exact_div(c.d * e, 4, *datum) : c.d * e / 4;
        default: {
            const std::int64_t sum = 1 + ((std::popcount(s) % 2 == 0) ? 1 : -1);
            return datum ? exact_div(c.d * sum, 2, *datum) : c.d * sum / 2;
        }
    }
}

unsigned compact_pi_prime(const Compact& c, unsigned s, unsigned flips) {
    if (c.type != GlobalType::ADoublePrime) return s ^ flips;
    const unsigned away = flips & ~c.v0_bit;
    unsigned t = s ^ away;
    if (std::popcount(away) % 2 == 1) t ^= c.v0_bit;
    return t;
}

struct Tally {
    std::int64_t lhs = 0, rhs = 0;
    bool witness_ok = true;
};

// dims[i][0/1] for Nondegenerate place i; `single` is the product over one-member places.
Tally compact_identity(const Compact& c, const std::array<std::array<int, 2>, 8>& dims, std::int64_t single,
                       unsigned flips, const std::int64_t* mult) {
    Tally t;
    const unsigned n = 1u << c.k;
    auto dimK = [&](unsigned s) {
        std::int64_t v = single;
        for (int i = 0; i < c.k; ++i) v *= dims[static_cast<std::size_t>(i)][(s >> i) & 1u];
        return v;
    };
    for (unsigned s = 0; s < n; ++s) {
        const std::int64_t m = mult[s];
        const std::int64_t dk = dimK(s), dkx = dimK(s ^ flips);
        t.lhs += m * dk;
        t.rhs += m * dkx;
        const unsigned sp = compact_pi_prime(c, s, flips);
        if (mult[sp] != m || dimK(sp) != dkx) t.witness_ok = false;
    }
    return t;
}

}  // namespace

std::int64_t multiplicity(const DihedralDatum& datum, const PacketChoice& choice) {
    datum.validate();
    check_choice(datum, choice);
    const std::int64_t e = std::int64_t{1} << datum.exceptional_count();
    switch (datum.type) {
        case GlobalType::APrime: return exact_div(datum.d * e, 2, datum);
        case GlobalType::B: return exact_div(datum.d * e, 4, datum);
        default: {
            int prod = 1;
            for (const auto& [p, s] : choice) prod *= s;
            return exact_div(datum.d * (1 + prod), 2, datum);
        }
    }
}

PacketChoice conjugate_choice(const DihedralDatum& datum, const PacketChoice& choice, const std::vector<int>& flips) {
    check_choice(datum, choice);
    PacketChoice out = choice;
    std::set<int> seen;
    for (int p : flips) {
        if (!seen.insert(p).second) throw ConfigError("flip set lists place " + std::to_string(p) + " twice");
        auto it = out.find(p);
        if (it == out.end())
            throw ConfigError("cannot flip place " + std::to_string(p) + ": it is not a Nondegenerate place");
        it->second = -it->second;
    }
    return out;
}

PacketChoice pi_prime(const DihedralDatum& datum, const PacketChoice& choice, const std::vector<int>& flips) {
    datum.validate();
    if (datum.type != GlobalType::ADoublePrime)
        throw ConfigError("pi_prime applies to type a'' only; types a' and b use plain conjugation");
    PacketChoice out = conjugate_choice(datum, choice, flips);
    const int away = static_cast<int>(std::count_if(flips.begin(), flips.end(), [&](int p) { return p != datum.v0; }));
    out[datum.v0] = choice.at(datum.v0) * (away % 2 == 0 ? 1 : -1);
    return out;
}

int KDatum::dim(int place, int member) const {
    auto it = dims.find(place);
    return it == dims.end() ? 1 : it->second[static_cast<std::size_t>(member)];
}

IdentityReport verify_identity(const DihedralDatum& datum, const KDatum& k, const std::vector<int>& flips) {
    datum.validate();
    const auto nd = datum.nondegenerate_places();
    if (nd.size() > 8) throw UnsupportedError("at most 8 Nondegenerate places");
    for (const auto& [p, dv] : k.dims) {
        (void)datum.at(p);
        if (dv[0] < 0 || dv[1] < 0) throw ConfigError("dims must be nonnegative");
    }
    if (datum.at(datum.v0).mode == PairingMode::Nondegenerate && k.dim(datum.v0, 0) != k.dim(datum.v0, 1))
        throw ConfigError("the two members at v0 are conjugate, so their dims must agree");

    // v0 first so that bit 0 is v0.
    std::vector<int> order = nd;
    auto it = std::find(order.begin(), order.end(), datum.v0);
    const bool v0_nondegenerate = it != order.end();
    if (v0_nondegenerate) std::rotate(order.begin(), it, it + 1);
    Compact c{datum.type, datum.d, datum.exceptional_count(), static_cast<int>(order.size()),
              v0_nondegenerate ? 1u : 0u};
    std::array<std::array<int, 2>, 8> dims{};
    for (std::size_t i = 0; i < order.size(); ++i) dims[i] = {k.dim(order[i], 0), k.dim(order[i], 1)};
    std::int64_t single = 1;
    for (const auto& v : datum.places)
        if (v.mode != PairingMode::Nondegenerate) single *= k.dim(v.place, 0);

    auto to_mask = [&](const PacketChoice& ch) {
        unsigned s = 0;
        for (std::size_t i = 0; i < order.size(); ++i)
            if (ch.at(order[i]) < 0) s |= 1u << i;
        return s;
    };
    (void)conjugate_choice(datum, all_choices(datum).front(), flips);  // validates the flips
    PacketChoice flip_marks;
    for (int p : nd) flip_marks[p] = 1;
    for (int p : flips) flip_marks[p] = -1;
    const unsigned fmask = to_mask(flip_marks);

    std::vector<std::int64_t> mult(1u << c.k);
    for (unsigned s = 0; s < mult.size(); ++s) mult[s] = compact_multiplicity(c, s, &datum);
    const Tally t = compact_identity(c, dims, single, fmask, mult.data());

    IdentityReport rep;
    rep.lhs = t.lhs;
    rep.rhs = t.rhs;
    rep.equal = t.lhs == t.rhs;
    rep.witness_ok = t.witness_ok;
    for (const auto& ch : all_choices(datum))
        rep.witness.emplace_back(ch, datum.type == GlobalType::ADoublePrime ? pi_prime(datum, ch, flips)
                                                                            : conjugate_choice(datum, ch, flips));
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

// Local shapes for places other than v0.
const std::array<LocalPlaceDatum, 5> kLocalShapes{{
    {0, true, false, false, PairingMode::Nondegenerate},
    {0, true, true, false, PairingMode::Nondegenerate},
    {0, true, false, true, PairingMode::Singleton},
    {0, false, false, false, PairingMode::Nondegenerate},
    {0, false, true, false, PairingMode::Exceptional},
}};

void multisets(int size, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == size) {
        out.push_back(cur);
        return;
    }
    for (int t = start; t < static_cast<int>(kLocalShapes.size()); ++t) {
        cur.push_back(t);
        multisets(size, t, cur, out);
        cur.pop_back();
    }
}

std::string describe(const DihedralDatum& d, unsigned flips) {
    std::ostringstream os;
    os << "type " << to_string(d.type) << " d=" << d.d << " places:";
    for (const auto& v : d.places) os << " " << v.place << (v.split_for_D ? "s" : "n") << ":" << to_string(v.mode);
    os << " flips=" << flips;
    return os.str();
}

}  // namespace

SweepReport sweep(const SweepOptions& options) {
    if (options.max_places < 2 || options.max_places > 8) throw ConfigError("max_places must be in [2, 8]");
    if (options.d_values.empty() || options.dim_values.empty()) throw ConfigError("empty sweep ranges");
    for (int d : options.d_values)
        if (d < 1) throw ConfigError("d values must be positive");

    std::vector<DihedralDatum> shapes;
    for (int n = 2; n <= options.max_places; ++n) {
        std::vector<std::vector<int>> rest;
        std::vector<int> cur;
        multisets(n - 1, 0, cur, rest);
        for (int v0_shape : {3, 4})
            for (const auto& r : rest) {
                std::vector<LocalPlaceDatum> places{kLocalShapes[static_cast<std::size_t>(v0_shape)]};
                for (int t : r) places.push_back(kLocalShapes[static_cast<std::size_t>(t)]);
                int nonsplit = 0;
                for (std::size_t i = 0; i < places.size(); ++i) {
                    places[i].place = static_cast<int>(i);
                    nonsplit += !places[i].split_for_D;
                }
                // D ramifies at an even number of places and is split at infinity.
                if (nonsplit % 2 != 0) continue;
                for (bool global : {false, true}) {
                    DihedralDatum datum;
                    try {
                        datum.type = classify_type(global, places);
                    } catch (const ConfigError&) {
                        continue;
                    }
                    datum.places = places;
                    datum.v0 = 0;
                    shapes.push_back(datum);
                }
            }
    }

    SweepReport rep;
    rep.shapes = shapes.size();
    std::mutex mu;
    std::atomic<std::size_t> next{0};
    const auto& dv = options.dim_values;
    const std::size_t nd = dv.size();

    auto worker = [&] {
        SweepReport local;
        for (std::size_t idx = next++; idx < shapes.size(); idx = next++) {
            for (int d : options.d_values) {
                DihedralDatum datum = shapes[idx];
                datum.d = d;
                datum.validate();
                const auto ndp = datum.nondegenerate_places();
                Compact c{datum.type, d, datum.exceptional_count(), static_cast<int>(ndp.size()),
                          datum.places[0].mode == PairingMode::Nondegenerate ? 1u : 0u};
                const int singles = static_cast<int>(datum.places.size()) - c.k;
                std::vector<std::int64_t> mult(1u << c.k);
                bool integral = true;
                for (unsigned s = 0; s < mult.size(); ++s) {
                    try {
                        mult[s] = compact_multiplicity(c, s, &datum);
                    } catch (const ArithmeticError&) {
                        integral = false;
                    }
                    if (mult[s] < 0) ++local.negative_multiplicities;
                }
                if (!integral) {
                    ++local.violations;
                    if (local.first_violations.size() < 5)
                        local.first_violations.push_back("non-integral multiplicity: " + describe(datum, 0));
                    continue;
                }
                ++local.data;
                ++local.by_type[static_cast<std::size_t>(datum.type)];

                // Mixed-radix counter over dims: v0 (equal pair if Nondegenerate),
                // other Nondegenerate places (pairs), then one-member places.
                std::vector<std::size_t> radix;
                for (int i = 0; i < c.k; ++i) radix.push_back((i == 0 && c.v0_bit) ? nd : nd * nd);
                for (int i = 0; i < singles; ++i) radix.push_back(nd);

                for (unsigned flips = 0; flips < (1u << c.k); ++flips) {
                    std::set<unsigned> image;
                    for (unsigned s = 0; s < mult.size(); ++s) image.insert(compact_pi_prime(c, s, flips));
                    if (image.size() != mult.size()) ++local.injectivity_failures;

                    std::vector<std::size_t> digit(radix.size(), 0);
                    for (;;) {
                        std::array<std::array<int, 2>, 8> dims{};
                        for (int i = 0; i < c.k; ++i) {
                            const std::size_t g = digit[static_cast<std::size_t>(i)];
                            if (i == 0 && c.v0_bit) dims[0] = {dv[g], dv[g]};
                            else dims[static_cast<std::size_t>(i)] = {dv[g / nd], dv[g % nd]};
                        }
                        std::int64_t single = 1;
                        for (int i = 0; i < singles; ++i) single *= dv[digit[static_cast<std::size_t>(c.k + i)]];
                        const Tally t = compact_identity(c, dims, single, flips, mult.data());
                        ++local.identities;
                        if (t.lhs != t.rhs) {
                            ++local.violations;
                            if (local.first_violations.size() < 5) local.first_violations.push_back(describe(datum, flips));
                        }
                        if (!t.witness_ok) ++local.witness_failures;
                        std::size_t pos = 0;
                        while (pos < digit.size() && ++digit[pos] == radix[pos]) digit[pos++] = 0;
                        if (pos == digit.size()) break;
                    }
                }
            }
        }
        std::lock_guard lock(mu);
        rep.data += local.data;
        rep.identities += local.identities;
        rep.violations += local.violations;
        rep.witness_failures += local.witness_failures;
        rep.negative_multiplicities += local.negative_multiplicities;
        rep.injectivity_failures += local.injectivity_failures;
        for (std::size_t i = 0; i < 3; ++i) rep.by_type[i] += local.by_type[i];
        for (auto& s : local.first_violations)
            if (rep.first_violations.size() < 5) rep.first_violations.push_back(s);
    };

    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, shapes.size())));
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return rep;
}

}  // namespace isospec
