#include <doctest.h>

#include <random>

#include "isospec/padic.hpp"

using namespace isospec;

namespace {

Rat random_rat(std::mt19937_64& rng, long bound) {
    std::uniform_int_distribution<long> num(-bound, bound), den(1, bound);
    Rat r(Integer(num(rng)), Integer(den(rng)));
    r.canonicalize();
    return r;
}

}  // namespace

TEST_CASE("from_rational and residues") {
    auto x = PadicApprox::from_rational(Rat(50), 5, 3);
    CHECK(x.valuation() == 2);
    CHECK(x.unit() == 2);
    CHECK(x.absolute_precision() == 5);
    CHECK(x.residue(3) == 50);
    auto h = PadicApprox::from_rational(Rat(1, 2), 5, 2);
    CHECK(h.residue(2) == 13);
    CHECK(PadicApprox::from_rational(Rat(1, 5), 5, 2).valuation() == -1);
    CHECK_THROWS_AS(PadicApprox::from_rational(Rat(1, 5), 5, 2).residue(1), ArithmeticError);
    CHECK_THROWS_AS(x.residue(6), PrecisionError);
}

TEST_CASE("arithmetic agrees with exact rationals") {
    std::mt19937_64 rng(3);
    for (std::int64_t p : {2, 3, 5, 7}) {
        for (int trial = 0; trial < 300; ++trial) {
            const Rat x = random_rat(rng, 60), y = random_rat(rng, 60);
            if (x == 0 || y == 0) continue;
            const int k = 6;
            const auto px = PadicApprox::from_rational(x, p, k), py = PadicApprox::from_rational(y, p, k);
            CHECK((px * py).agrees_with(x * y));
            CHECK((px / py).agrees_with(x / y));
            CHECK((px / py).precision() == k);
            const auto s = px + py;
            CHECK(s.agrees_with(x + y));
            CHECK(s.absolute_precision() == std::min(px.absolute_precision(), py.absolute_precision()));
            CHECK((px - px).is_zero());
        }
    }
}

TEST_CASE("cancellation lowers relative precision") {
    auto x = PadicApprox::from_rational(Rat(1), 5, 4);
    auto y = PadicApprox::from_rational(Rat(26), 5, 4);
    auto d = y - x;
    CHECK(d.valuation() == 2);
    CHECK(d.precision() == 2);
    CHECK(d.agrees_with(Rat(25)));
    CHECK_THROWS_AS(x / (x - x), PrecisionError);
}

TEST_CASE("2x2 matrices") {
    const auto m = Mat2Padic::from_residues({2, 3, 5, 7}, 5, 4);
    CHECK(m.det().agrees_with(Rat(-1)));
    CHECK(m.trace().agrees_with(Rat(9)));
    const auto prod = m * m.inverse();
    CHECK(prod.residues(4) == std::array<std::int64_t, 4>{1, 0, 0, 1});
    CHECK(m.is_integral());
    CHECK(Mat2Padic::identity(7, 3).residues(3) == std::array<std::int64_t, 4>{1, 0, 0, 1});
}
