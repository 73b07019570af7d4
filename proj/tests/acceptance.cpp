// Acceptance suite: one PASS/FAIL line per criterion.
//
// Exit status is 0 when the set of failing criteria equals the documented
// expected-failure set (AC4 and AC5, see README), and 1 otherwise, including
// when an expected failure unexpectedly passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "isospec/pipeline.hpp"

using namespace isospec;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
    std::vector<std::string> info;  // extra lines printed below the verdict
};

struct Criterion {
    std::string id;
    std::string title;
    double limit_seconds;
    std::function<Outcome()> run;
};

QuatElement q(long x0, long x1, long x2, long x3) { return {{Rat(x0), Rat(x1), Rat(x2), Rat(x3)}}; }

std::string join(const std::vector<std::int64_t>& v) {
    std::string s = "{";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + "}";
}

RunConfig acceptance_config() {
    return parse_run_config(Json::parse(R"({
      "algebra": {"a": -1, "b": 3},
      "v0": 2,
      "locals": [
        {"p": 2, "kind": "RamifiedFull"},
        {"p": 3, "kind": "RamifiedFull"},
        {"p": 5, "kind": "SymmetricCongruence", "k": 1}
      ],
      "conjugator": [{"p": 5, "matrix": [[2, 0], [0, 1]]}],
      "enumeration": {"height_bound": 60, "trace_bound": 30, "margin_factor": 3}
    })"));
}

// Independent reference: every coordinate vector in the box, norm from the
// standard-basis formula x0^2 - a x1^2 - b x2^2 + ab x3^2.
std::vector<Coords> naive_norm_one(const Order& o, std::int64_t B) {
    const Rat a(o.algebra().a()), b(o.algebra().b());
    std::vector<Coords> out;
    for (std::int64_t c0 = -B; c0 <= B; ++c0)
        for (std::int64_t c1 = -B; c1 <= B; ++c1)
            for (std::int64_t c2 = -B; c2 <= B; ++c2)
                for (std::int64_t c3 = -B; c3 <= B; ++c3) {
                    const Coords c{c0, c1, c2, c3};
                    std::array<Rat, 4> x{};
                    for (std::size_t t = 0; t < 4; ++t)
                        for (std::size_t s = 0; s < 4; ++s) x[s] += Rat(c[t]) * o.basis()[t].x[s];
                    if (x[0] * x[0] - a * x[1] * x[1] - b * x[2] * x[2] + a * b * x[3] * x[3] == 1) out.push_back(c);
                }
    return out;
}

Outcome ac1_product_formula() {
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<long> num(-100000, 100000), den(1, 1000);
    auto nonzero = [&] {
        long n = 0;
        while (n == 0) n = num(rng);
        return Rat(n, den(rng));
    };
    int good = 0, places = 0;
    for (int t = 0; t < 1000; ++t) {
        Rat a = nonzero(), b = nonzero();
        a.canonicalize();
        b.canonicalize();
        int product = 1;
        for (const auto& v : candidate_places(a, b)) {
            product *= hilbert_symbol(a, b, v);
            ++places;
        }
        good += product == 1;
    }
    return {good == 1000, std::to_string(good) + "/1000 products equal +1 over " + std::to_string(places) + " local symbols"};
}

Outcome ac2_ramification() {
    const QuaternionAlgebra D(Rat(-1), Rat(3));
    const auto ram = D.ramification();
    const Order start = standard_order(D);
    const Order max = maximalize(start);
    bool contains = true;
    for (const auto& e : start.basis()) contains = contains && max.contains(e);
    const Integer index = lattice_index(max, start);
    std::string places;
    for (const auto& v : ram.ramified_places) places += (places.empty() ? "" : ",") + v.to_string();
    const bool ok = places == "2,3" && max.reduced_discriminant() == 6 && contains && index == 2;
    return {ok, "Ram = {" + places + "}, disc(maximal) = " + max.reduced_discriminant().get_str() +
                    ", input contained: " + (contains ? "yes" : "no") + ", index " + index.get_str()};
}

Outcome ac3_splitting() {
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<long> d(-40, 40);
    auto random_element = [&] { return q(d(rng), d(rng), d(rng), d(rng)); };

    // Real splitting of (-1, 3), relative tolerance 1e-9.
    const QuaternionAlgebra D(Rat(-1), Rat(3));
    const auto real = D.split_real();
    double worst = 0;
    auto rel = [](double x, double y) { return std::abs(x - y) / std::max(1.0, std::abs(y)); };
    for (int t = 0; t < 200; ++t) {
        const auto x = random_element(), y = random_element();
        const Mat2Real mx = real(x), my = real(y), mxy = real(D.mul(x, y)), prod = mx * my;
        for (std::size_t s = 0; s < 4; ++s) worst = std::max(worst, rel(prod.e[s], mxy.e[s]));
        worst = std::max(worst, rel(mx.det(), D.nrd(x).get_d()));
        worst = std::max(worst, rel(mx.trace(), D.trd(x).get_d()));
    }

    // p-adic splittings, exact modulo p^k on integer residue matrices.
    int padic_failures = 0;
    const std::vector<std::array<long, 3>> cases{{-1, 3, 5}, {-1, 3, 7}, {-2, 5, 3}, {-2, 5, 11}};
    for (const auto& [a, b, p] : cases) {
        const QuaternionAlgebra A{Rat(a), Rat(b)};
        const int k = 4;
        const std::int64_t pk = ipow(p, k);
        const auto split = A.split_padic(p, k);
        for (int t = 0; t < 50; ++t) {
            const auto x = random_element(), y = random_element();
            const auto mx = split(x).residues(k), my = split(y).residues(k), mxy = split(A.mul(x, y)).residues(k);
            const std::array<std::int64_t, 4> prod{
                mod(mulmod(mx[0], my[0], pk) + mulmod(mx[1], my[2], pk), pk),
                mod(mulmod(mx[0], my[1], pk) + mulmod(mx[1], my[3], pk), pk),
                mod(mulmod(mx[2], my[0], pk) + mulmod(mx[3], my[2], pk), pk),
                mod(mulmod(mx[2], my[1], pk) + mulmod(mx[3], my[3], pk), pk)};
            const std::int64_t det = mod(mulmod(mx[0], mx[3], pk) - mulmod(mx[1], mx[2], pk), pk);
            padic_failures += prod != mxy || det != rat_mod(A.nrd(x), p, k) ||
                              mod(mx[0] + mx[3], pk) != rat_mod(A.trd(x), p, k);
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "real: 200 pairs, worst relative error %.2e; p-adic: 200 pairs mod p^4, %d failures",
                  worst, padic_failures);
    return {worst <= 1e-9 && padic_failures == 0, buf};
}

Outcome ac4_isospectral() {
    const RunConfig c = acceptance_config();
    const Order order = make_order(c);
    const GlobalLevel level = make_level(c, order);
    const Conjugator x = make_conjugator(c);
    Outcome out;

    // The enumerator is first checked against the naive box filtered by membership.
    const std::int64_t small = 8;
    std::vector<Coords> naive_k, naive_kx;
    for (const auto& cd : naive_norm_one(order, small)) {
        const QuatElement g = order.element(cd);
        bool in_k = true, in_kx = true;
        for (const auto& [p, _] : level.locals()) {
            in_k = in_k && member(level, g, p);
            in_kx = in_kx && conjugated_member(level, x, g, p);
        }
        if (in_k) naive_k.push_back(cd);
        if (in_kx) naive_kx.push_back(cd);
    }
    const bool oracle_ok = enumerate_lattice(level, {}, small).elements == naive_k &&
                           enumerate_lattice(level, x, small).elements == naive_kx;

    const auto& e = c.enumeration;
    const SpectrumSide a{&level, {}, trace_spectrum(order, enumerate_lattice(level, {}, e.height_bound), e.trace_bound)};
    const SpectrumSide b{&level, x, trace_spectrum(order, enumerate_lattice(level, x, e.height_bound), e.trace_bound)};
    const auto cmp = compare_spectra(a, b, e.margin_factor);
    const auto ta = a.spectrum.traces(), tb = b.spectrum.traces();
    const bool enough = ta.size() >= 5 && tb.size() >= 5;
    out.pass = oracle_ok && cmp.agree && cmp.violations.empty() && enough;
    out.detail = "B=" + std::to_string(e.height_bound) + ", T=" + std::to_string(e.trace_bound) + ": K " + join(ta) +
                 ", K^x " + join(tb) + ", agree " + (cmp.agree ? "yes" : "no") + ", " +
                 std::to_string(cmp.violations.size()) + " violations; naive oracle at B=8 " +
                 (oracle_ok ? "matches" : "DIFFERS") + (enough ? "" : "; fewer than 5 distinct traces");
    if (!enough)
        out.info.push_back(
            "every element is 1 mod 5 with b = c mod 25, forcing trd = 2 mod 25, so |trd| <= 30 allows only "
            "{2,23,27}; five values cannot exist at T=30");

    // The same comparison where five values do exist.
    const std::int64_t B2 = 250, T2 = 80;
    const SpectrumSide a2{&level, {}, trace_spectrum(order, enumerate_lattice(level, {}, B2), T2)};
    const SpectrumSide b2{&level, x, trace_spectrum(order, enumerate_lattice(level, x, B2), T2)};
    const auto cmp2 = compare_spectra(a2, b2, e.margin_factor);
    out.info.push_back("extended B=" + std::to_string(B2) + ", T=" + std::to_string(T2) + ": K " +
                       join(a2.spectrum.traces()) + ", K^x " + join(b2.spectrum.traces()) + ", agree " +
                       (cmp2.agree ? "yes" : "no") + ", " + std::to_string(cmp2.violations.size()) + " violations");
    return out;
}

Outcome ac5_certificate() {
    const RunConfig c = acceptance_config();
    const Order order = make_order(c);
    const GlobalLevel level = make_level(c, order);
    const Certificate cert = certify(level, make_conjugator(c), c.obstruction.radius, c.obstruction.precision);
    const auto& bound = cert.group.bounds.at(0);

    RunConfig control = c;
    control.locals.back() = LocalLevel{5, LevelKind::HeckeCongruence, 2};
    control.conjugator = {LocalConjugator{5, std::array<Rat, 4>{Rat(1), Rat(0), Rat(0), Rat(5)}}};
    const GlobalLevel control_level = make_level(control, order);
    const Certificate neg = certify(control_level, make_conjugator(control), 3, 3);
    const bool control_ok = neg.group.rank == 0 && neg.verdict == Verdict::Inconclusive;

    std::ostringstream d;
    d << "Q rank " << cert.group.rank << " (expected 1), nrd(x) class " << cert.local_classes.at(0).rep
      << " at 5, local normalizer classes";
    for (const auto& w : bound.witnesses) d << " " << w.square_class.rep;
    d << (bound.exact ? " (exact)" : " (bounded)") << ", verdict " << to_string(cert.verdict)
      << "; control HeckeCongruence(2), x=diag(1,5): rank " << neg.group.rank << ", " << to_string(neg.verdict)
      << (control_ok ? " (ok)" : " (WRONG)");
    Outcome out{cert.group.rank == 1 && cert.verdict == Verdict::NonIsometric && control_ok, d.str(), {}};
    if (!out.pass) {
        out.info.push_back(
            "the normalizer of SymmetricCongruence(1) at 5 contains [[1,-1],[1,1]] of determinant 2, so "
            "nrd(x) = 2 is already a normalizer class locally and the obstruction vanishes for any relations");
        ObstructionGroup naive = build_obstruction_group(cert.group.bounds, {Rat(-1), Rat(5)});
        const Certificate forced = certify(level, make_conjugator(c), naive);
        out.info.push_back("with relations {-1, 5} only: rank " + std::to_string(naive.rank) + ", verdict " +
                           to_string(forced.verdict));
    }
    return out;
}

LocalPlaceDatum place(int p, bool split, bool quadratic, bool trivial, PairingMode mode) {
    return {p, split, quadratic, trivial, mode};
}

Outcome ac6_identity_sweep() {
    SweepOptions o;
    o.max_places = 5;
    const SweepReport r = sweep(o);
    const bool ok = r.violations == 0 && r.witness_failures == 0 && r.negative_multiplicities == 0 &&
                    r.injectivity_failures == 0 && r.by_type[0] && r.by_type[1] && r.by_type[2];
    std::ostringstream d;
    d << r.shapes << " shapes, " << r.data << " data (a' " << r.by_type[0] << ", a'' " << r.by_type[1] << ", b "
      << r.by_type[2] << "), " << r.identities << " identities, " << r.violations << " violations, "
      << r.negative_multiplicities << " negative multiplicities";
    return {ok, d.str(), {}};
}

Outcome ac7_spot_values() {
    using M = PairingMode;
    int checked = 0, wrong = 0;

    DihedralDatum a2{GlobalType::ADoublePrime, 1,
                     {place(0, false, false, false, M::Nondegenerate), place(1, false, false, false, M::Nondegenerate),
                      place(2, true, false, false, M::Nondegenerate)},
                     0};
    for (const auto& choice : all_choices(a2)) {
        int product = 1;
        for (const auto& [p, s] : choice) product *= s;
        ++checked;
        wrong += multiplicity(a2, choice) != (product == 1 ? 1 : 0);
    }

    DihedralDatum a1{GlobalType::APrime, 2,
                     {place(0, false, true, false, M::Exceptional), place(1, false, false, false, M::Nondegenerate)}, 0};
    for (const auto& choice : all_choices(a1)) ++checked, wrong += multiplicity(a1, choice) != 2;

    DihedralDatum b{GlobalType::B, 1,
                    {place(0, false, true, false, M::Exceptional), place(1, false, true, false, M::Exceptional),
                     place(2, true, false, true, M::Singleton)},
                    0};
    for (const auto& choice : all_choices(b)) ++checked, wrong += multiplicity(b, choice) != 1;

    const bool types_ok = classify_type(false, a2.places) == GlobalType::ADoublePrime &&
                          classify_type(false, a1.places) == GlobalType::APrime &&
                          classify_type(true, b.places) == GlobalType::B;
    return {wrong == 0 && types_ok,
            std::to_string(checked) + " spot values, " + std::to_string(wrong) + " wrong; types " +
                (types_ok ? "consistent" : "INCONSISTENT")};
}

Outcome ac8_torsion() {
    const RunConfig c = acceptance_config();
    const Order order = make_order(c);
    const GlobalLevel level = make_level(c, order);
    const auto slice = enumerate_lattice(level, {}, c.enumeration.height_bound);
    const TorsionReport t = torsion_free_check(level, order, slice);

    // Without congruence conditions the slice contains i.
    RunConfig bare = c;
    bare.locals.pop_back();
    bare.conjugator.clear();
    const GlobalLevel bare_level = make_level(bare, order);
    const auto bare_slice = enumerate_lattice(bare_level, {}, 4);
    const TorsionReport tb = torsion_free_check(bare_level, order, bare_slice);
    const QuatElement i = q(0, 1, 0, 0);
    const auto coords = coordinates_in_basis(order.basis(), i);
    const Coords ic{coords[0].get_num().get_si(), coords[1].get_num().get_si(), coords[2].get_num().get_si(),
                    coords[3].get_num().get_si()};
    const bool has_i =
        std::find(bare_slice.elements.begin(), bare_slice.elements.end(), ic) != bare_slice.elements.end();
    const bool i_elliptic = order.algebra().trd(i) == 0 && order.algebra().nrd(i) == 1;

    const bool ok = t.criterion_pass && t.criterion_place == 5 && t.scan_clean && !t.elliptic_witness && has_i &&
                    i_elliptic && !tb.criterion_pass && !tb.scan_clean;
    return {ok, "acceptance slice (" + std::to_string(slice.elements.size()) + " elements): criterion at 5 " +
                    (t.criterion_pass ? "pass" : "fail") + ", scan " + (t.scan_clean ? "clean" : "NOT clean") +
                    "; maximal-order slice contains i: " + (has_i ? "yes" : "no") + ", scan " +
                    (tb.scan_clean ? "clean" : "finds elliptic elements")};
}

Outcome ac9_oracle() {
    const QuaternionAlgebra d1(Rat(-1), Rat(3)), d2(Rat(-1), Rat(-1)), d3(Rat(-2), Rat(5));
    const std::vector<std::pair<std::string, Order>> orders{
        {"(-1,3) Z<1,i,j,ij>", standard_order(d1)},   {"(-1,3) maximal", maximalize(standard_order(d1))},
        {"(-1,-1) Z<1,i,j,ij>", standard_order(d2)},  {"(-1,-1) maximal", maximalize(standard_order(d2))},
        {"(-2,5) Z<1,i,j,ij>", standard_order(d3)},   {"(-2,5) maximal", maximalize(standard_order(d3))}};
    int comparisons = 0, mismatches = 0;
    for (const auto& [name, o] : orders)
        for (std::int64_t B : {1, 2, 4, 8}) {
            ++comparisons;
            mismatches += solve_norm_one(o, B) != naive_norm_one(o, B);
        }
    return {mismatches == 0, std::to_string(comparisons) + " (order, B) pairs with B <= 8 on 6 orders, " +
                                 std::to_string(mismatches) + " mismatches"};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"AC1", "Hilbert product formula", 10, ac1_product_formula},
        {"AC2", "ramification and maximal order of (-1,3)", 1, ac2_ramification},
        {"AC3", "splitting homomorphisms", 5, ac3_splitting},
        {"AC4", "isospectrality at desk scale", 600, ac4_isospectral},
        {"AC5", "non-isometry certificate", 60, ac5_certificate},
        {"AC6", "exhaustive multiplicity identity", 120, ac6_identity_sweep},
        {"AC7", "multiplicity spot values", 1, ac7_spot_values},
        {"AC8", "torsion-freeness", 60, ac8_torsion},
        {"AC9", "norm-one solver vs naive oracle", 60, ac9_oracle},
    };
    const std::set<std::string> expected_failures{"AC4", "AC5"};

    std::set<std::string> failed;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what(), {}};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = s <= c.limit_seconds;
        const bool pass = o.pass && in_time;
        if (!pass) failed.insert(c.id);
        std::printf("%s %s  %s: %s [%.2f s, limit %.0f s%s]\n", c.id.c_str(), pass ? "PASS" : "FAIL", c.title.c_str(),
                    o.detail.c_str(), s, c.limit_seconds, in_time ? "" : ", EXCEEDED");
        for (const auto& line : o.info) std::printf("      note: %s\n", line.c_str());
        std::fflush(stdout);
    }

    std::string expected, actual;
    for (const auto& id : expected_failures) expected += " " + id;
    for (const auto& id : failed) actual += " " + id;
    const bool as_documented = failed == expected_failures;
    std::printf("failing:%s; expected failures:%s; %s\n", actual.empty() ? " none" : actual.c_str(), expected.c_str(),
                as_documented ? "matches" : "DOES NOT MATCH");
    return as_documented ? 0 : 1;
}
