#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "polyfun/realization.hpp"
#include "polyfun/tuples.hpp"

using namespace polyfun;

namespace {

// Scaled instance + certificate via the production construction.
struct Certified {
    PickInstance scaled;
    AglerCertificate cert;
    double scale;
};

Certified certify(const PickInstance& inst) {
    const CertifiedRealization cr = realize_interpolant(inst);
    return {inst.scaled(cr.scale), cr.certificate, cr.scale};
}

PickInstance one_point(Complex w, Complex v) {
    PickInstance inst;
    inst.e.points = {{Complex(0.1, 0.0)}};
    inst.e.delta_vals = {{w}};
    inst.fvals = {v};
    return inst;
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

}  // namespace

TEST_CASE("one-point Moebius realization") {
    // A_1 = (1-|v|^2)/(1-|w|^2) realizes a Moebius map sending w to v.
    const Complex w(0.55, 0.1), v(0.3, -0.4);
    PickInstance inst = one_point(w, v);
    AglerCertificate cert;
    cert.a.push_back(CMatrix(1, 1));
    cert.a[0](0, 0) = (1.0 - std::norm(v)) / (1.0 - std::norm(w));

    const Realization r = lurking_isometry(inst, cert);
    CHECK(isometry_residual(r) <= 1e-9);
    CHECK(std::abs(transfer_eval_scalar(r, {w}) - v) <= 1e-9);

    // |F| <= 1 on a disc grid
    SeededRng rng(2);
    for (int g = 0; g < 400; ++g) {
        const Complex z = testgen::rand_complex(rng, 0.999);
        CHECK(std::abs(transfer_eval_scalar(r, {z})) <= 1.0 + 1e-9);
    }
}

TEST_CASE("zero data yield the zero function on E") {
    PickInstance inst;
    inst.e.points = {{Complex(0.0, 0.0)}, {Complex(0.4, 0.2)}};
    inst.e.delta_vals = {{Complex(0.0, 0.0)}, {Complex(0.4, 0.2)}};
    inst.fvals = {0.0, 0.0};
    const DeltaNormResult n = delta_norm(inst, 1e-6);
    const Realization r = lurking_isometry(inst, n.certificate);
    for (int i = 0; i < inst.size(); ++i)
        CHECK(std::abs(transfer_eval_scalar(r, inst.e.delta_vals[i])) <= 1e-8);
}

TEST_CASE("two-point extremal data realize on the boundary") {
    // Schwarz-Pick data of norm exactly 1
    PickInstance inst;
    inst.e.points = {{Complex(0.0, 0.0)}, {Complex(0.5, 0.0)}};
    inst.e.delta_vals = {{Complex(0.0, 0.0)}, {Complex(0.5, 0.0)}};
    inst.fvals = {Complex(0.0, 0.0), Complex(0.5, 0.0)};
    const Certified c = certify(inst);
    const Realization r = lurking_isometry(c.scaled, c.cert);
    CHECK(isometry_residual(r) <= 1e-9);
    for (int i = 0; i < inst.size(); ++i)
        CHECK(std::abs(transfer_eval_scalar(r, inst.e.delta_vals[i]) -
                       c.scaled.fvals[i]) <= 1e-7);
}

TEST_CASE("lurking isometry on random certified instances") {
    SeededRng rng(19);
    for (int trial = 0; trial < 10; ++trial) {
        const int d = 1 + static_cast<int>(rng.next_u64() % 3);
        const int m = 1 + static_cast<int>(rng.next_u64() % 3);
        const int n = 2 + static_cast<int>(rng.next_u64() % 5);
        const PolyMap delta = testgen::rand_polymap(rng, d, m);
        const PickInstance inst = testgen::rand_certifiable_instance(rng, delta, n);
        const Certified c = certify(inst);

        const Realization r = lurking_isometry(c.scaled, c.cert);
        CHECK(isometry_residual(r) <= 1e-9);
        for (int i = 0; i < inst.size(); ++i)
            CHECK(std::abs(transfer_eval_scalar(r, c.scaled.e.delta_vals[i]) -
                           c.scaled.fvals[i]) <= 1e-7);

        // Gram identity held before construction: re-derive it from the blocks
        const CMatrix v = r.colligation();
        CHECK((v.adjoint() * v - CMatrix::identity(v.rows())).max_abs() <= 1e-9);
    }
}

TEST_CASE("lurking isometry rejects a foreign certificate") {
    SeededRng rng(77);
    const PolyMap delta = testgen::rand_polymap(rng, 2, 2);
    const PickInstance inst = testgen::rand_certifiable_instance(rng, delta, 3);
    const Certified c = certify(inst);
    PickInstance corrupted = c.scaled;
    corrupted.fvals[0] += Complex(0.3, 0.0);  // certificate no longer matches
    CHECK_THROWS_AS(lurking_isometry(corrupted, c.cert), numeric_error);
}

TEST_CASE("transfer_eval_scalar pinned cases") {
    const Realization shift = shift_realization();
    CHECK(std::abs(transfer_eval_scalar(shift, {Complex(0.0, 0.0)})) <= 1e-15);  // a = 0
    const Complex z(0.3, 0.4);
    CHECK(std::abs(transfer_eval_scalar(shift, {z}) - z) <= 1e-15);

    // the colligation of the shift is the 2x2 flip, a unitary
    CHECK(isometry_residual(shift) <= 1e-15);
}

TEST_CASE("transfer_eval_tuple agrees with scalar evaluation") {
    SeededRng rng(29);
    const PolyMap delta = testgen::rand_polymap(rng, 2, 2);
    const PickInstance inst = testgen::rand_certifiable_instance(rng, delta, 4);
    const Certified c = certify(inst);
    const Realization r = lurking_isometry(c.scaled, c.cert);

    // k = 1 tuples reduce to scalars
    for (int i = 0; i < inst.size(); ++i) {
        std::vector<CMatrix> s;
        for (int l = 0; l < 2; ++l) {
            CMatrix sl(1, 1);
            sl(0, 0) = c.scaled.e.delta_vals[i][l];
            s.push_back(sl);
        }
        const CMatrix got = transfer_eval_tuple(r, s);
        CHECK(std::abs(got(0, 0) - transfer_eval_scalar(r, c.scaled.e.delta_vals[i])) <=
              1e-12);
    }

    // diagonal tuples give diagonal values
    std::vector<Complex> z1(3), z2(3);
    for (int j = 0; j < 3; ++j) {
        z1[j] = testgen::rand_complex(rng, 0.9);
        z2[j] = testgen::rand_complex(rng, 0.9);
    }
    CMatrix d1(3, 3), d2(3, 3);
    for (int j = 0; j < 3; ++j) {
        d1(j, j) = z1[j];
        d2(j, j) = z2[j];
    }
    const CMatrix diag = transfer_eval_tuple(r, {d1, d2});
    for (int j = 0; j < 3; ++j) {
        const Complex want = transfer_eval_scalar(r, {z1[j], z2[j]});
        CHECK(std::abs(diag(j, j) - want) <= 1e-10);
        for (int i = 0; i < 3; ++i)
            if (i != j) CHECK(std::abs(diag(i, j)) <= 1e-10);
    }
}

TEST_CASE("transfer_eval_tuple is contractive on strict contraction tuples") {
    SeededRng rng(31);
    const PolyMap delta = testgen::rand_polymap(rng, 2, 3);
    const PickInstance inst = testgen::rand_certifiable_instance(rng, delta, 4);
    const Certified c = certify(inst);
    const Realization r = lurking_isometry(c.scaled, c.cert);

    for (int trial = 0; trial < 10; ++trial) {
        // commuting strict contractions from a joint eigenbasis
        const int k = 2 + static_cast<int>(rng.next_u64() % 3);
        const CMatrix kk = testgen::rand_unitary(rng, k) + 0.2 * testgen::rand_matrix(rng, k, k);
        const CMatrix kinv = inverse(kk);
        std::vector<CMatrix> s;
        for (int l = 0; l < 3; ++l) {
            CMatrix diag(k, k);
            for (int j = 0; j < k; ++j) diag(j, j) = testgen::rand_complex(rng, 0.75);
            CMatrix sl = kk * diag * kinv;
            // rescale into the strict ball when the similarity inflates norms
            const double nn = op_norm(sl);
            if (nn >= 0.98) sl = (0.95 / nn) * sl;
            s.push_back(sl);
        }
        CHECK(op_norm(transfer_eval_tuple(r, s)) <= 1.0 + 1e-8);
    }
}

TEST_CASE("verify_realization reports and detects corruption") {
    SeededRng rng(41);
    const PolyMap delta = testgen::rand_polymap(rng, 1, 2);
    const PickInstance inst = testgen::rand_certifiable_instance(rng, delta, 3);
    const Certified c = certify(inst);
    const Realization r = lurking_isometry(c.scaled, c.cert);

    const RealizationReport rep = verify_realization(r, c.scaled, 10000, 5);
    CHECK(rep.max_interp_error <= 1e-7);
    CHECK(rep.isometry_residual <= 1e-9);
    CHECK(rep.polydisc_sup_estimate <= 1.0 + 1e-6);

    Realization bad = r;
    if (bad.state_dim() > 0) {
        bad.d(0, 0) += 1e-3;
        const RealizationReport brep = verify_realization(bad, c.scaled, 100, 5);
        CHECK(brep.isometry_residual >= 1e-4);
        CHECK(brep.isometry_residual <= 1e-2);
    }
}
