#include <doctest.h>

#include "parsec/matrix.hpp"
#include "parsec/rng.hpp"
#include "parsec/scalar.hpp"
#include "parsec/smith.hpp"

using namespace parsec;

static IntPoly ipoly(std::initializer_list<long> cs) {
    IntPoly p;
    for (long c : cs) p.emplace_back(c);
    return p;
}

TEST_CASE("cyclotomic polynomials") {
    CHECK(cyclotomic_poly(1) == ipoly({-1, 1}));
    // oracle for N=4: divide x^4 - 1 by Phi_1 * Phi_2 explicitly
    IntPoly x4m1 = ipoly({-1, 0, 0, 0, 1});
    IntPoly phi12 = poly_mul_int(ipoly({-1, 1}), ipoly({1, 1}));
    CHECK(cyclotomic_poly(4) == poly_div_exact_int(x4m1, phi12));
    CHECK(cyclotomic_poly(4) == ipoly({1, 0, 1}));
    // oracle for N=6: divide x^6 - 1 by Phi_1 Phi_2 Phi_3
    IntPoly x6m1 = ipoly({-1, 0, 0, 0, 0, 0, 1});
    IntPoly den = poly_mul_int(phi12, ipoly({1, 1, 1}));
    CHECK(cyclotomic_poly(6) == poly_div_exact_int(x6m1, den));
    CHECK(cyclotomic_poly(6) == ipoly({1, -1, 1}));

    // product over divisors reconstructs x^N - 1
    for (unsigned n = 1; n <= 24; ++n) {
        IntPoly prod{Int(1)};
        for (unsigned d = 1; d <= n; ++d)
            if (n % d == 0) prod = poly_mul_int(prod, cyclotomic_poly(d));
        IntPoly xnm1(n + 1, Int(0));
        xnm1[0] = -1;
        xnm1[n] = 1;
        CHECK(prod == xnm1);
    }
}

TEST_CASE("root embedding") {
    CHECK(Cyclo::root(4, 0) == Cyclo::one());
    CHECK(Cyclo::root(4, 2) == Cyclo::from_rational(rat(-1)));
    CHECK(Cyclo::root(6, 3) == Cyclo::from_rational(rat(-1)));

    // embed is a group homomorphism
    for (unsigned n : {2u, 3u, 4u, 6u, 8u, 12u})
        for (unsigned a = 0; a < n; ++a)
            for (unsigned b = 0; b < n; ++b)
                CHECK(Cyclo::root(n, a) * Cyclo::root(n, b) == Cyclo::root(n, (a + b) % n));
    CHECK(Cyclo::root(12, 0) == Cyclo::one());

    // Phi_N(zeta_N) = 0 for all N <= 24
    for (unsigned n = 1; n <= 24; ++n) {
        const auto& phi = cyclotomic_poly(n);
        Cyclo z = Cyclo::root(n, 1), acc = Cyclo::zero(), pw = Cyclo::one();
        for (size_t i = 0; i < phi.size(); ++i) {
            acc = acc + Rational(phi[i]) * pw;
            pw = pw * z;
        }
        CHECK(acc.is_zero());
    }
}

TEST_CASE("cyclotomic field arithmetic") {
    Cyclo i4 = Cyclo::root(4, 1);
    CHECK(i4 * i4 == Cyclo::from_rational(rat(-1)));
    CHECK(i4.inverse() == Cyclo::root(4, 3));
    Cyclo a = Cyclo::from_rational(rat(3, 2)) + i4;
    CHECK(a * a.inverse() == Cyclo::one());
    // mixed moduli embed into the lcm
    Cyclo z3 = Cyclo::root(3, 1), z4 = Cyclo::root(4, 1);
    Cyclo prod = z3 * z4;
    CHECK(prod.modulus() == 12);
    CHECK(prod == Cyclo::root(12, 7));
}

TEST_CASE("kernel and rank") {
    CMat zero2(2, 2);
    CHECK(kernel_basis(zero2).size() == 2);
    CHECK(kernel_basis(CMat::identity(3)).empty());

    // [[1, z4], [-z4, 1]] over Q(zeta_4): hand row-reduction gives a
    // one-dimensional kernel spanned by (-z4, 1)
    Cyclo z4 = Cyclo::root(4, 1);
    CMat m(2, 2);
    m(0, 0) = Cyclo::one();
    m(0, 1) = z4;
    m(1, 0) = Cyclo::zero() - z4;
    m(1, 1) = Cyclo::one();
    auto kb = kernel_basis(m);
    REQUIRE(kb.size() == 1);
    CHECK(kb[0][0] == Cyclo::zero() - z4);
    CHECK(kb[0][1] == Cyclo::one());
    CHECK(rank(m) == 1);

    // rank + nullity = number of columns on random matrices
    Rng rng(7);
    for (int t = 0; t < 100; ++t) {
        size_t r = 1 + rng.uniform(5), c = 1 + rng.uniform(5);
        CMat a(r, c);
        for (size_t i = 0; i < r; ++i)
            for (size_t j = 0; j < c; ++j)
                a(i, j) = Cyclo::from_rational(rat(rng.range(-3, 3))) +
                          Cyclo::root(4, rng.range(0, 3)) * Cyclo::from_rational(rat(rng.range(0, 1)));
        CMat copy = a;
        CHECK(rank(copy) + kernel_basis(a).size() == c);
    }
}

TEST_CASE("linear solving and inverse") {
    Cyclo z = Cyclo::root(8, 1);
    CMat a(2, 2);
    a(0, 0) = Cyclo::one();
    a(0, 1) = z;
    a(1, 0) = z;
    a(1, 1) = Cyclo::from_rational(rat(2));
    auto ai = inverse(a);
    CHECK((a * ai).is_identity());
    CHECK((ai * a).is_identity());

    auto sol = solve_linear(a, {Cyclo::one(), Cyclo::zero()});
    REQUIRE(sol.has_value());
    CHECK(a.apply(*sol)[0] == Cyclo::one());
    CHECK(a.apply(*sol)[1] == Cyclo::zero());
}

static bool exhaustive_solvable(const IntMatrix& a, const std::vector<Int>& b, int n) {
    size_t cols = a.cols;
    std::vector<Int> x(cols, Int(0));
    while (true) {
        bool ok = true;
        for (size_t i = 0; i < a.rows && ok; ++i) {
            Int acc(0);
            for (size_t j = 0; j < cols; ++j) acc += a(i, j) * x[j];
            ok = mod_norm(acc - b[i], n) == 0;
        }
        if (ok) return true;
        size_t i = 0;
        while (i < cols) {
            if (++x[i] < n) break;
            x[i] = 0;
            ++i;
        }
        if (i >= cols) return false;
    }
}

TEST_CASE("smith normal form and modular solving") {
    // A = I, b arbitrary -> x = b
    IntMatrix id3(3, 3);
    for (int i = 0; i < 3; ++i) id3(i, i) = 1;
    auto s = solve_mod_n(id3, {Int(2), Int(5), Int(1)}, 7);
    REQUIRE(s.has_value());
    CHECK((*s)[0] == 2);
    CHECK((*s)[1] == 5);
    CHECK((*s)[2] == 1);

    IntMatrix a1(1, 1);
    a1(0, 0) = 2;
    CHECK(!solve_mod_n(a1, {Int(1)}, 4).has_value());  // 2x = 1 mod 4 unsolvable
    auto s2 = solve_mod_n(a1, {Int(2)}, 4);
    REQUIRE(s2.has_value());
    CHECK((*s2)[0] == 1);  // minimal representative of {1, 3}

    // randomized cross-check against exhaustive search, <= 6 unknowns
    Rng rng(11);
    for (int t = 0; t < 200; ++t) {
        size_t rows = 1 + rng.uniform(4), cols = 1 + rng.uniform(6);
        int n = 2 + static_cast<int>(rng.uniform(11));
        IntMatrix a(rows, cols);
        std::vector<Int> b(rows);
        for (size_t i = 0; i < rows; ++i) {
            b[i] = Int(rng.range(0, n - 1));
            for (size_t j = 0; j < cols; ++j) a(i, j) = Int(rng.range(-4, 4));
        }
        auto got = solve_mod_n(a, b, n);
        CHECK(got.has_value() == exhaustive_solvable(a, b, n));
        if (got) {
            for (size_t i = 0; i < rows; ++i) {
                Int acc(0);
                for (size_t j = 0; j < cols; ++j) acc += a(i, j) * (*got)[j];
                CHECK(mod_norm(acc - b[i], n) == 0);
            }
        }
    }
}

TEST_CASE("modular nullspace generates solutions") {
    Rng rng(13);
    for (int t = 0; t < 50; ++t) {
        size_t rows = 1 + rng.uniform(3), cols = 1 + rng.uniform(4);
        int n = 2 + static_cast<int>(rng.uniform(10));
        IntMatrix a(rows, cols);
        for (size_t i = 0; i < rows; ++i)
            for (size_t j = 0; j < cols; ++j) a(i, j) = Int(rng.range(-3, 3));
        for (const auto& g : nullspace_mod_n(a, n)) {
            for (size_t i = 0; i < rows; ++i) {
                Int acc(0);
                for (size_t j = 0; j < cols; ++j) acc += a(i, j) * g[j];
                CHECK(mod_norm(acc, n) == 0);
            }
        }
    }
}
