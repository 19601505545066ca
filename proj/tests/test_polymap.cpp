#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "polyfun/polymap.hpp"
#include "polyfun/tuples.hpp"

using namespace polyfun;

namespace {

PolyTerm term(int l, Complex c, std::vector<int> e) {
    PolyTerm t;
    t.component = l;
    t.coeff = c;
    t.exponents = std::move(e);
    return t;
}

// delta = (z1, z2) on C^2
PolyMap coordinate_pair() {
    return PolyMap(2, 2, {term(0, 1.0, {1, 0}), term(1, 1.0, {0, 1})});
}

}  // namespace

TEST_CASE("PolyMap validation") {
    CHECK_THROWS_AS(PolyMap(1, 1, {term(0, 1.0, {0})}), validation_error);  // constant
    CHECK_THROWS_AS(PolyMap(1, 2, {term(0, 1.0, {1})}), validation_error);  // missing comp
    CHECK_THROWS_AS(PolyMap(1, 1, {term(0, 1.0, {-1})}), validation_error);
    CHECK_THROWS_AS(PolyMap(2, 1, {term(0, 1.0, {1})}), validation_error);  // exp length
}

TEST_CASE("eval_point pinned examples") {
    const PolyMap coords = coordinate_pair();
    const auto v1 = coords.eval_point({Complex(0.3, 0.0), Complex(0.0, 0.4)});
    CHECK(std::abs(v1[0] - Complex(0.3, 0.0)) <= 1e-15);
    CHECK(std::abs(v1[1] - Complex(0.0, 0.4)) <= 1e-15);

    const PolyMap prod(2, 1, {term(0, 1.0, {1, 1})});
    CHECK(std::abs(prod.eval_point({2.0, 3.0})[0] - Complex(6.0, 0.0)) <= 1e-15);

    const PolyMap mix(2, 2, {term(0, 2.0, {1, 1}), term(1, 1.0, {2, 0})});
    const auto v3 = mix.eval_point({0.5, 0.5});
    CHECK(std::abs(v3[0] - Complex(0.5, 0.0)) <= 1e-15);
    CHECK(std::abs(v3[1] - Complex(0.25, 0.0)) <= 1e-15);
}

TEST_CASE("eval_tuple pinned examples") {
    SeededRng rng(3);
    const PolyMap z1(1, 1, {term(0, 1.0, {1})});
    CommutingTuple t{{testgen::rand_matrix(rng, 3, 3)}};
    CHECK((eval_tuple(z1, t)[0] - t.t[0]).max_abs() <= 1e-15);

    // diagonal pair: product acts entrywise on the diagonal
    const PolyMap prod(2, 1, {term(0, 1.0, {1, 1})});
    CMatrix d1(2, 2), d2(2, 2);
    d1(0, 0) = 0.2; d1(1, 1) = 0.5;
    d2(0, 0) = 0.7; d2(1, 1) = Complex(0.0, 0.3);
    const CMatrix got = eval_tuple(prod, CommutingTuple{{d1, d2}})[0];
    CHECK(std::abs(got(0, 0) - Complex(0.14, 0.0)) <= 1e-15);
    CHECK(std::abs(got(1, 1) - Complex(0.0, 0.15)) <= 1e-15);

    // Jordan block squared
    const PolyMap sq(1, 1, {term(0, 1.0, {2})});
    CMatrix j(2, 2);
    j(0, 0) = j(1, 1) = 0.5;
    j(0, 1) = 1.0;
    const CMatrix j2 = eval_tuple(sq, CommutingTuple{{j}})[0];
    CHECK(std::abs(j2(0, 0) - Complex(0.25, 0.0)) <= 1e-15);
    CHECK(std::abs(j2(0, 1) - Complex(1.0, 0.0)) <= 1e-15);
    CHECK(std::abs(j2(1, 0)) <= 1e-15);
    CHECK(std::abs(j2(1, 1) - Complex(0.25, 0.0)) <= 1e-15);
}

TEST_CASE("eval_tuple rejects non-commuting input") {
    CMatrix a(2, 2), b(2, 2);
    a(0, 1) = 1.0;
    b(1, 0) = 1.0;
    const PolyMap prod(2, 1, {term(0, 1.0, {1, 1})});
    CHECK_THROWS_AS(eval_tuple(prod, CommutingTuple{{a, b}}), validation_error);
}

TEST_CASE("eval_tuple is an algebra homomorphism on commuting tuples") {
    SeededRng rng(17);
    for (int trial = 0; trial < 15; ++trial) {
        const int d = 1 + static_cast<int>(rng.next_u64() % 3);
        const int n = 2 + static_cast<int>(rng.next_u64() % 4);
        // simultaneously diagonalizable tuple: guaranteed commuting
        const CMatrix k = testgen::rand_unitary(rng, n) + 0.3 * testgen::rand_matrix(rng, n, n);
        const CMatrix kinv = inverse(k);
        CommutingTuple t;
        for (int r = 0; r < d; ++r) {
            CMatrix diag(n, n);
            for (int i = 0; i < n; ++i) diag(i, i) = testgen::rand_complex(rng, 1.0);
            t.t.push_back(k * diag * kinv);
        }
        const PolyMap p = testgen::rand_polymap(rng, d, 1);
        const PolyMap q = testgen::rand_polymap(rng, d, 1);

        // product polynomial p*q as a PolyMap
        std::vector<PolyTerm> prod_terms;
        for (const PolyTerm& tp : p.terms())
            for (const PolyTerm& tq : q.terms()) {
                PolyTerm tt;
                tt.component = 0;
                tt.coeff = tp.coeff * tq.coeff;
                tt.exponents.resize(d);
                for (int r = 0; r < d; ++r)
                    tt.exponents[r] = tp.exponents[r] + tq.exponents[r];
                prod_terms.push_back(tt);
            }
        const PolyMap pq(d, 1, prod_terms);

        const CMatrix pt = eval_tuple(p, t, 1e-8)[0];
        const CMatrix qt = eval_tuple(q, t, 1e-8)[0];
        const CMatrix pqt = eval_tuple(pq, t, 1e-8)[0];
        const double scale = std::max(1.0, op_norm(pt) * op_norm(qt));
        CHECK(op_norm(pqt - pt * qt) <= 1e-9 * scale);

        // sums
        std::vector<PolyTerm> sum_terms = p.terms();
        for (PolyTerm tq : q.terms()) sum_terms.push_back(tq);
        const PolyMap psum(d, 1, sum_terms);
        CHECK(op_norm(eval_tuple(psum, t, 1e-8)[0] - (pt + qt)) <= 1e-9 * scale);
    }
}

TEST_CASE("eval_tuple matches the eigenvalue route on generic tuples") {
    SeededRng rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        const int d = 1 + static_cast<int>(rng.next_u64() % 3);
        const int n = 2 + static_cast<int>(rng.next_u64() % 5);
        std::vector<std::vector<Complex>> lambda(n, std::vector<Complex>(d));
        for (auto& p : lambda)
            for (Complex& z : p) z = testgen::rand_complex(rng, 0.9);
        const CMatrix k =
            testgen::rand_unitary(rng, n) + 0.2 * testgen::rand_matrix(rng, n, n);
        const GenericTuple t = make_generic(lambda, k);
        const PolyMap delta = testgen::rand_polymap(rng, d, 2);

        const auto via_matrices = eval_tuple(delta, t.as_commuting(), 1e-8);
        for (int l = 0; l < 2; ++l) {
            std::vector<Complex> vals(n);
            for (int j = 0; j < n; ++j) vals[j] = delta.eval_component(l, lambda[j]);
            const CMatrix via_eigen = eigen_calculus(t, vals);
            const double scale = std::max(1.0, op_norm(via_eigen));
            CHECK(op_norm(via_matrices[l] - via_eigen) <= 1e-9 * scale);
        }
    }
}

TEST_CASE("classify_point") {
    const PolyMap z1(1, 1, {term(0, 1.0, {1})});
    const PointClass inside = classify_point(z1, {Complex(0.0, 0.0)}, 1e-3);
    CHECK(inside.region == Region::Interior);
    CHECK(inside.value == 0.0);

    CHECK(classify_point(z1, {Complex(1.0, 0.0)}, 1e-3).region == Region::Boundary);

    const PolyMap mix(2, 2, {term(0, 2.0, {1, 1}), term(1, 1.0, {2, 0})});
    const PointClass out = classify_point(mix, {0.9, 0.7}, 1e-3);
    CHECK(out.region == Region::Exterior);
    CHECK(out.value == doctest::Approx(1.26).epsilon(1e-12));
}

TEST_CASE("sample_gdel containment, determinism, separation") {
    const PolyMap z1(1, 1, {term(0, 1.0, {1})});
    const Box box = testgen::unit_box(1);
    const FiniteSample s = sample_gdel(z1, box, 5, 42, 0.01);
    REQUIRE(s.size() == 5);
    for (const auto& p : s.points) CHECK(std::abs(p[0]) < 0.99);

    const FiniteSample again = sample_gdel(z1, box, 5, 42, 0.01);
    for (int i = 0; i < 5; ++i) CHECK(s.points[i][0] == again.points[i][0]);

    const PolyMap twice(1, 1, {term(0, 2.0, {1})});
    const FiniteSample scaled = sample_gdel(twice, box, 25, 7, 0.01);
    for (const auto& p : scaled.points) CHECK(std::abs(p[0]) < 0.495);

    for (int i = 0; i < scaled.size(); ++i)
        for (int j = i + 1; j < scaled.size(); ++j)
            CHECK(std::abs(scaled.points[i][0] - scaled.points[j][0]) > 1e-6);
}

TEST_CASE("sample_gdel reports hopeless acceptance") {
    // G_delta misses the box entirely.
    const PolyMap far(1, 1, {term(0, 1.0, {1}), term(0, 100.0, {2})});
    Box b;
    b.center = {Complex(50.0, 0.0)};
    b.radius = {0.5};
    CHECK_THROWS_AS(sample_gdel(far, b, 3, 1, 0.01), numeric_error);
}

TEST_CASE("augment on the disc: eps = 1 at safety 1") {
    const PolyMap z1(1, 1, {term(0, 1.0, {1})});
    const Box box = testgen::unit_box(1, 2.0);
    const Augmentation a = augment(z1, box, 21, 1.0);
    CHECK(a.coordinate_bound == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.epsilon == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(a.gamma.components() == 2);
    // second component is 1.0 * z
    const auto v = a.gamma.eval_point({Complex(0.25, 0.5)});
    CHECK(std::abs(v[1] - Complex(0.25, 0.5)) <= 1e-12);
}

TEST_CASE("augment on the product fixture: R = 2") {
    const PolyMap delta(2, 3,
                        {term(0, 1.0, {1, 1}), term(1, 0.5, {1, 0}), term(2, 0.5, {0, 1})});
    const Box box = testgen::unit_box(2, 2.5);
    const double s = 0.9;
    const Augmentation a = augment(delta, box, 21, s);
    CHECK(a.coordinate_bound == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(a.epsilon == doctest::Approx(s / 2.0).epsilon(1e-12));
    CHECK(a.gamma.components() == 5);

    // every sampled point of G_delta keeps |eps z^r| <= s
    const FiniteSample pts = sample_gdel(delta, box, 50, 3, 0.0);
    for (const auto& p : pts.points)
        for (const Complex& z : p) CHECK(a.epsilon * std::abs(z) <= s + 1e-12);
}

TEST_CASE("augment rejects a box that truncates K_delta") {
    const PolyMap z1(1, 1, {term(0, 1.0, {1})});
    const Box tight = testgen::unit_box(1, 1.0);  // K_delta touches the boundary
    CHECK_THROWS_AS(augment(z1, tight, 21, 0.9), numeric_error);
}
