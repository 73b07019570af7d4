#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "isospec/lattice.hpp"

using namespace isospec;

namespace {

// Quadruple loop with the norm evaluated from standard coordinates.
std::vector<Coords> naive_norm_one(const Order& o, std::int64_t B) {
    const auto& D = o.algebra();
    const Rat a(D.a()), b(D.b());
    std::vector<Coords> out;
    for (std::int64_t c0 = -B; c0 <= B; ++c0)
        for (std::int64_t c1 = -B; c1 <= B; ++c1)
            for (std::int64_t c2 = -B; c2 <= B; ++c2)
                for (std::int64_t c3 = -B; c3 <= B; ++c3) {
                    std::array<Rat, 4> x{};
                    const Coords c{c0, c1, c2, c3};
                    for (std::size_t t = 0; t < 4; ++t)
                        for (std::size_t s = 0; s < 4; ++s) x[s] += Rat(c[t]) * o.basis()[t].x[s];
                    const Rat n = x[0] * x[0] - a * x[1] * x[1] - b * x[2] * x[2] + a * b * x[3] * x[3];
                    if (n == 1) out.push_back(c);
                }
    return out;
}

const Order& acceptance_order() {
    static const Order O = maximalize(standard_order(QuaternionAlgebra(Rat(-1), Rat(3))));
    return O;
}

}  // namespace

TEST_CASE("solve_norm_one matches the naive oracle") {
    const QuaternionAlgebra d1(Rat(-1), Rat(3)), d2(Rat(-2), Rat(5)), d3(Rat(-1), Rat(-1));
    struct Case {
        Order order;
        std::int64_t B;
    };
    const std::vector<Case> cases{{standard_order(d1), 8},  {acceptance_order(), 8}, {standard_order(d2), 8},
                                  {maximalize(standard_order(d2)), 6}, {maximalize(standard_order(d3)), 8}};
    for (const auto& c : cases) {
        CAPTURE(c.order.basis()[3].to_string());
        const auto want = naive_norm_one(c.order, c.B);
        CHECK(solve_norm_one(c.order, c.B, 1) == want);
        CHECK(solve_norm_one(c.order, c.B, 3) == want);
    }
}

TEST_CASE("solve_norm_one examples") {
    const QuaternionAlgebra D(Rat(-1), Rat(3));
    const auto O = standard_order(D);
    const auto s = solve_norm_one(O, 2);
    for (const Coords& c : {Coords{1, 0, 0, 0}, Coords{-1, 0, 0, 0}, Coords{2, 0, 1, 0}, Coords{2, 0, -1, 0}})
        CHECK(std::binary_search(s.begin(), s.end(), c));
    for (const auto& c : s) CHECK(D.nrd(O.element(c)) == 1);
    CHECK(solve_norm_one(O, 0) == std::vector<Coords>{});
    CHECK(solve_norm_one(O, 1) ==
          std::vector<Coords>{{-1, 0, 0, 0}, {0, -1, 0, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}});
    CHECK_THROWS_AS(solve_norm_one(O, -1), ConfigError);
}

TEST_CASE("enumerate_lattice") {
    const Order& O = acceptance_order();
    const GlobalLevel L(O, 2, {{5, LevelKind::SymmetricCongruence, 1}});
    const auto all = solve_norm_one(O, 12);
    const auto slice = enumerate_lattice(L, {}, 12);
    CHECK(!slice.conjugated);
    CHECK(slice.elements.size() < all.size());
    CHECK(std::includes(all.begin(), all.end(), slice.elements.begin(), slice.elements.end()));
    const MembershipTester t(L);
    for (const auto& c : slice.elements) {
        CHECK(t(std::span<const std::int64_t, 4>(c)));
        const Coords neg{-c[0], -c[1], -c[2], -c[3]};
        CHECK(O.algebra().nrd(O.element(neg)) == 1);
    }
    CHECK(std::binary_search(slice.elements.begin(), slice.elements.end(), Coords{1, 0, 0, 0}));
    CHECK(!std::binary_search(slice.elements.begin(), slice.elements.end(), Coords{-1, 0, 0, 0}));

    // Homotheties and normalizers of K_5 leave the lattice unchanged.
    const Conjugator scalar({{5, std::array<Rat, 4>{Rat(5), Rat(0), Rat(0), Rat(5)}}});
    const Conjugator similitude({{5, std::array<Rat, 4>{Rat(1), Rat(-1), Rat(1), Rat(1)}}});
    CHECK(enumerate_lattice(L, scalar, 12).elements == slice.elements);
    const auto sim = enumerate_lattice(L, similitude, 12);
    CHECK(sim.conjugated);
    CHECK(sim.elements == slice.elements);

    // A non-normalizing conjugator changes the slice.
    const Conjugator x({{5, std::array<Rat, 4>{Rat(2), Rat(0), Rat(0), Rat(1)}}});
    CHECK(enumerate_lattice(L, x, 20).elements != enumerate_lattice(L, {}, 20).elements);
}

TEST_CASE("trace spectra") {
    const Order& O = acceptance_order();
    const GlobalLevel hyp(O, 2, {});
    const auto slice = enumerate_lattice(hyp, {}, 2);
    const auto spectrum = trace_spectrum(O, slice, 10);
    CHECK(spectrum.contains(2));
    CHECK(spectrum.contains(4));
    CHECK(spectrum.contains(0));
    for (const auto& v : spectrum.values) {
        CHECK(v.t <= 10);
        const QuatElement w = O.element(v.witness);
        CHECK(O.algebra().nrd(w) == 1);
        CHECK(abs(O.algebra().trd(w)) == v.t);
    }
    const auto four = std::find_if(spectrum.values.begin(), spectrum.values.end(), [](const auto& v) { return v.t == 4; });
    CHECK(four->kind == TraceKind::Hyperbolic);
    CHECK(spectrum.values.front().kind == TraceKind::Elliptic);
    CHECK(geodesic_length(4) == doctest::Approx(2.0 * std::log(2.0 + std::sqrt(3.0))).epsilon(1e-12));
    CHECK(geodesic_length(4) == doctest::Approx(2.6339157938).epsilon(1e-10));
    CHECK(trace_spectrum(O, LatticeSlice{}, 10).values.empty());
}

TEST_CASE("compare_spectra") {
    const Order& O = acceptance_order();
    const GlobalLevel K(O, 2, {{5, LevelKind::SymmetricCongruence, 1}});
    const auto s = enumerate_lattice(K, {}, 20);
    const SpectrumSide a{&K, {}, trace_spectrum(O, s, 30)};
    const auto same = compare_spectra(a, a, 3);
    CHECK(same.agree);
    CHECK(same.violations.empty());

    const GlobalLevel g5(O, 2, {{5, LevelKind::PrincipalCongruence, 1}});
    const GlobalLevel g7(O, 2, {{7, LevelKind::PrincipalCongruence, 1}});
    const SpectrumSide s5{&g5, {}, trace_spectrum(O, enumerate_lattice(g5, {}, 10), 40)};
    const SpectrumSide s7{&g7, {}, trace_spectrum(O, enumerate_lattice(g7, {}, 10), 40)};
    const auto mismatch = compare_spectra(s5, s7, 2);
    CHECK(s5.spectrum.traces() == std::vector<std::int64_t>{2, 23});
    CHECK(s7.spectrum.traces() == std::vector<std::int64_t>{2});
    CHECK(!mismatch.agree);
    REQUIRE(!mismatch.violations.empty());
    // trd = 2 mod 5 on Gamma(5) and 2 mod 7 on Gamma(7)
    for (const auto& v : mismatch.violations) {
        if (v.present_in == 'A') CHECK((v.t % 5 == 2 || v.t % 5 == 3));
        if (v.present_in == 'B') CHECK((v.t % 7 == 2 || v.t % 7 == 5));
        CHECK(v.searched_bound == 20);
    }
    const SpectrumSide other{&g5, {}, trace_spectrum(O, enumerate_lattice(g5, {}, 10), 45)};
    CHECK_THROWS_AS(compare_spectra(s5, other, 3), ConfigError);
}

TEST_CASE("torsion") {
    const Order& O = acceptance_order();
    const GlobalLevel K(O, 2, {{5, LevelKind::SymmetricCongruence, 1}});
    const auto rep = torsion_free_check(K, O, enumerate_lattice(K, {}, 10));
    CHECK(rep.criterion_pass);
    CHECK(rep.criterion_place == 5);
    CHECK(rep.scan_clean);
    CHECK(!rep.contains_minus_one);

    const GlobalLevel hyp(O, 2, {});
    const auto r2 = torsion_free_check(hyp, O, enumerate_lattice(hyp, {}, 2));
    CHECK(!r2.criterion_pass);
    CHECK(!r2.scan_clean);
    CHECK(r2.contains_minus_one);
    REQUIRE(r2.elliptic_witness);
    CHECK(abs(O.algebra().trd(O.element(*r2.elliptic_witness))) < 2);
}

TEST_CASE("slice cache round trip") {
    const Order& O = acceptance_order();
    const GlobalLevel K(O, 2, {{5, LevelKind::SymmetricCongruence, 1}});
    const auto s = enumerate_lattice(K, {}, 8);
    const auto dir = std::filesystem::temp_directory_path() / "isospec_cache_test";
    std::filesystem::remove_all(dir);
    const auto path = dir / "slice.txt";
    const std::uint64_t h = fnv1a64("config");
    save_slice(path, h, s);
    const auto back = load_slice(path, h);
    REQUIRE(back);
    CHECK(back->elements == s.elements);
    CHECK(back->height_bound == 8);
    CHECK(!back->conjugated);
    CHECK(!load_slice(path, fnv1a64("other")));
    CHECK(!load_slice(dir / "missing.txt", h));
    {
        std::ofstream out(path, std::ios::app);
        out << "1 2 3 4\n";
    }
    CHECK(!load_slice(path, h));
    std::filesystem::remove_all(dir);
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}
