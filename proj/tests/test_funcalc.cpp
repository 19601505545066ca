#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "polyfun/funcalc.hpp"

using namespace polyfun;

namespace {

PolyTerm term(int l, Complex c, std::vector<int> e) {
    PolyTerm t;
    t.component = l;
    t.coeff = c;
    t.exponents = std::move(e);
    return t;
}

Realization shift_realization() {
    Realization r;
    r.a = 0.0;
    r.block_dims = {1};
    r.beta = {Complex(1.0, 0.0)};
    r.gamma = {Complex(1.0, 0.0)};
    r.d = CMatrix(1, 1);
    return r;
}

// A realization freshly certified from interpolation data on G_delta.
struct Setup {
    PolyMap delta;
    Realization r;
    double scale;
};

Setup certified_setup(SeededRng& rng, int d, int m, int n) {
    const PolyMap delta = testgen::rand_polymap(rng, d, m);
    const PickInstance inst = testgen::rand_certifiable_instance(rng, delta, n);
    const CertifiedRealization cr = realize_interpolant(inst);
    return {delta, cr.realization, cr.scale};
}

GenericTuple rand_member_tuple(SeededRng& rng, const PolyMap& delta, int n) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        std::vector<std::vector<Complex>> lambda;
        int guard = 0;
        while (static_cast<int>(lambda.size()) < n && guard < 20000) {
            ++guard;
            std::vector<Complex> p(delta.dim());
            for (Complex& z : p) z = testgen::rand_complex(rng, 1.0);
            const PointClass pc = classify_point(delta, p, 0.0);
            if (pc.value < 0.9) lambda.push_back(std::move(p));
        }
        if (static_cast<int>(lambda.size()) < n) continue;
        const CMatrix k =
            testgen::rand_unitary(rng, n) + 0.15 * testgen::rand_matrix(rng, n, n);
        GenericTuple t;
        try {
            t = make_generic(lambda, k);
        } catch (const std::exception&) {
            continue;
        }
        if (in_fdel(delta, t, 1e-10).member) return t;
    }
    throw std::runtime_error("rand_member_tuple: no member found");
}

}  // namespace

TEST_CASE("build_sp structure") {
    SeededRng rng(3);
    const CMatrix s = testgen::rand_matrix(rng, 3, 3);

    // m = 1 with identity projection: S ⊗ I_n
    const CMatrix sp = build_sp({s}, {4});
    CHECK((sp - kron(s, CMatrix::identity(4))).max_abs() <= 1e-15);

    // scalars: diagonal blocks z_l I_{n_l}
    CMatrix z1(1, 1), z2(1, 1);
    z1(0, 0) = Complex(0.3, 0.1);
    z2(0, 0) = Complex(-0.2, 0.4);
    const CMatrix zp = build_sp({z1, z2}, {2, 3});
    for (int mu = 0; mu < 5; ++mu)
        CHECK(std::abs(zp(mu, mu) - (mu < 2 ? z1(0, 0) : z2(0, 0))) <= 1e-15);

    // ‖S_P‖ <= max_l ‖S^l‖
    for (int trial = 0; trial < 10; ++trial) {
        const CMatrix a = testgen::rand_matrix(rng, 2, 2);
        const CMatrix b = testgen::rand_matrix(rng, 2, 2);
        const CMatrix ab = build_sp({a, b}, {2, 1});
        CHECK(op_norm(ab) <= std::max(op_norm(a), op_norm(b)) + 1e-10);
    }
}

TEST_CASE("fc_precondition pinned cases") {
    CMatrix half(1, 1);
    half(0, 0) = 0.5;
    const PrecondReport ok = fc_precondition({half});
    CHECK(ok.ok);
    CHECK(ok.radii[0].estimate == doctest::Approx(0.5).epsilon(1e-6));

    // Jordan block with radius 0.99 but norm > 1
    CMatrix j(3, 3);
    for (int i = 0; i < 3; ++i) j(i, i) = 0.99;
    j(0, 1) = j(1, 2) = 1.0;
    CHECK(op_norm(j) > 1.0);
    CHECK(fc_precondition({j}).ok);

    CMatrix big(1, 1);
    big(0, 0) = 1.01;
    CHECK_FALSE(fc_precondition({big}).ok);
}

TEST_CASE("fc_eval pinned cases") {
    SeededRng rng(7);
    const Realization shift = shift_realization();

    // D = 0: the series terminates and f(T) = T
    const CMatrix t = 0.7 * testgen::rand_matrix(rng, 3, 3);
    CHECK(op_norm(fc_eval(shift, {t}) - t) <= 1e-12);
    CalcOptions neumann;
    neumann.method = CalcMethod::Neumann;
    CHECK(op_norm(fc_eval(shift, {t}, neumann) - t) <= 1e-12);

    // S = 0: value a I
    Setup su = certified_setup(rng, 2, 2, 3);
    const CMatrix zero(4, 4);
    const CMatrix at_zero = fc_eval(su.r, {zero, zero});
    CHECK((at_zero - su.r.a * CMatrix::identity(4)).max_abs() <= 1e-12);
}

TEST_CASE("fc_eval: direct and Neumann agree") {
    SeededRng rng(11);
    for (int trial = 0; trial < 6; ++trial) {
        Setup su = certified_setup(rng, 2, 2, 3);
        const GenericTuple t = rand_member_tuple(rng, su.delta, 4);
        const std::vector<CMatrix> s = eval_tuple(su.delta, t.as_commuting(), 1e-9);
        if (!fc_precondition(s).ok) continue;
        const CMatrix direct = fc_eval(su.r, s);
        CalcOptions nm;
        nm.method = CalcMethod::Neumann;
        const CMatrix series = fc_eval(su.r, s, nm);
        const double scale = std::max(1.0, op_norm(direct));
        CHECK(op_norm(direct - series) <= 1e-8 * scale);
    }
}

TEST_CASE("fc_agreement: resolvent formula equals the eigenvalue route") {
    SeededRng rng(13);

    // diagonal tuples reduce to the scalar formula
    Setup su = certified_setup(rng, 1, 2, 3);
    std::vector<std::vector<Complex>> lambda;
    for (int j = 0; j < 3; ++j) {
        std::vector<Complex> p(1);
        int guard = 0;
        do {
            p[0] = testgen::rand_complex(rng, 1.0);
        } while (classify_point(su.delta, p, 0.0).value >= 0.9 && ++guard < 1000);
        lambda.push_back(p);
    }
    const GenericTuple diag = make_generic(lambda, CMatrix::identity(3));
    CHECK(fc_agreement(su.r, diag, su.delta) <= 1e-10);

    // two-point tuples at a fixed angle
    Setup su2 = certified_setup(rng, 2, 2, 3);
    for (int trial = 0; trial < 5; ++trial) {
        const GenericTuple t = rand_member_tuple(rng, su2.delta, 2);
        CHECK(fc_agreement(su2.r, t, su2.delta) <= 1e-8);
        CHECK(fc_agreement(su2.r, t, su2.delta, CalcMethod::Neumann) <= 1e-8);
    }

    // larger generic members
    for (int trial = 0; trial < 5; ++trial) {
        const GenericTuple t = rand_member_tuple(rng, su2.delta, 5);
        CHECK(fc_agreement(su2.r, t, su2.delta) <= 1e-7);
    }
}

TEST_CASE("coupled spectral radius stays below one when the precondition holds") {
    SeededRng rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        Setup su = certified_setup(rng, 2, 2, 3);
        const GenericTuple t = rand_member_tuple(rng, su.delta, 3);
        const std::vector<CMatrix> s = eval_tuple(su.delta, t.as_commuting(), 1e-9);
        if (!fc_precondition(s).ok) continue;
        if (su.r.state_dim() == 0) continue;
        const CMatrix sp = build_sp(s, su.r.block_dims);
        const CMatrix coupled = kron(CMatrix::identity(3), su.r.d) * sp;
        CHECK(certify_radius_below(coupled, 1.0).certified);
    }
}

TEST_CASE("rota_renorm pinned cases") {
    // scalar 0.9: nothing to fix
    CMatrix s(1, 1);
    s(0, 0) = 0.9;
    const RenormResult scalar = rota_renorm({s});
    CHECK(scalar.renormed_norms[0] == doctest::Approx(0.9).epsilon(1e-9));
    CHECK(scalar.degree == 1);

    // nilpotent with norm 2: degree 2 suffices
    CMatrix nil(2, 2);
    nil(0, 1) = 2.0;
    const RenormResult nr = rota_renorm({nil});
    CHECK(nr.degree == 2);
    CHECK(nr.renormed_norms[0] < 1.0);
    CHECK((nr.a * nr.a_inv - CMatrix::identity(2)).max_abs() <= 1e-10);

    // the renormed matrix is literally A^{-1} S A with norm < 1
    const CMatrix renormed = nr.a_inv * nil * nr.a;
    CHECK(op_norm(renormed) < 1.0);
}

TEST_CASE("rota_renorm on commuting strict-radius tuples") {
    SeededRng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const int k = 3 + static_cast<int>(rng.next_u64() % 3);
        const auto s = testgen::rand_commuting_triangular(rng, k, 2, 0.9, 3.0);
        const RenormResult r = rota_renorm(s);
        for (double nn : r.renormed_norms) CHECK(nn < 1.0);
        CHECK(r.condition >= 1.0);
        for (size_t l = 0; l < s.size(); ++l)
            CHECK(op_norm(r.a_inv * s[l] * r.a) == doctest::Approx(r.renormed_norms[l]));
    }
}

TEST_CASE("rota_renorm rejects spectrum outside the disc") {
    CMatrix big(1, 1);
    big(0, 0) = 1.2;
    CHECK_THROWS_AS(rota_renorm({big}), numeric_error);
}
