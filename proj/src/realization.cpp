#include "polyfun/realization.hpp"

#include <algorithm>
#include <cmath>

namespace polyfun {

CMatrix Realization::colligation() const {
    const int n = state_dim();
    CMatrix v(1 + n, 1 + n);
    v(0, 0) = a;
    for (int k = 0; k < n; ++k) {
        v(0, 1 + k) = std::conj(beta[k]);
        v(1 + k, 0) = gamma[k];
        for (int j = 0; j < n; ++j) v(1 + k, 1 + j) = d(k, j);
    }
    return v;
}

void Realization::validate() const {
    int total = 0;
    for (int b : block_dims) {
        if (b < 0) throw validation_error("Realization: negative block dimension");
        total += b;
    }
    if (block_dims.empty()) throw validation_error("Realization: no blocks");
    if (total != d.rows() || d.rows() != d.cols())
        throw validation_error("Realization: block dimensions do not partition the state");
    if (static_cast<int>(beta.size()) != total || static_cast<int>(gamma.size()) != total)
        throw validation_error("Realization: beta/gamma length != state dimension");
}

double isometry_residual(const Realization& r) {
    const CMatrix v = r.colligation();
    return (v.adjoint() * v - CMatrix::identity(v.rows())).max_abs();
}

namespace {

// Diagonal of Z = sum_l z_l P^l in the graded order.
std::vector<Complex> graded_diagonal(const std::vector<int>& block_dims,
                                     const std::vector<Complex>& z) {
    std::vector<Complex> diag;
    for (size_t l = 0; l < block_dims.size(); ++l)
        diag.insert(diag.end(), block_dims[l], z[l]);
    return diag;
}

struct OrthoBasis {
    CMatrix q;               // columns orthonormal
    std::vector<int> pivots; // source columns, in acceptance order
    CMatrix rinv;            // q = x[:, pivots] * rinv
};

// Modified Gram-Schmidt with column pivoting and a rank threshold relative
// to the largest source column.
OrthoBasis pivoted_mgs(const CMatrix& x, double threshold) {
    const int rows = x.rows(), cols = x.cols();
    std::vector<std::vector<Complex>> work(cols, std::vector<Complex>(rows));
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) work[j][i] = x(i, j);

    auto col_norm = [&](const std::vector<Complex>& v) {
        double s = 0.0;
        for (const Complex& z : v) s += std::norm(z);
        return std::sqrt(s);
    };

    double max_norm = 0.0;
    for (int j = 0; j < cols; ++j) max_norm = std::max(max_norm, col_norm(work[j]));
    const double cut = threshold * std::max(max_norm, 1e-300);

    OrthoBasis basis;
    std::vector<std::vector<Complex>> qs;
    std::vector<bool> used(cols, false);
    // Coefficients of each accepted q in terms of the pivot columns of x.
    std::vector<std::vector<Complex>> coeff;

    while (true) {
        int pick = -1;
        double best = cut;
        for (int j = 0; j < cols; ++j) {
            if (used[j]) continue;
            const double nn = col_norm(work[j]);
            if (nn > best) { best = nn; pick = j; }
        }
        if (pick < 0) break;
        used[pick] = true;

        // Residual of the picked column is already orthogonal to previous qs;
        // the expansion tracks x[pick] = sum_k r_k q_k + best * q_new.
        std::vector<Complex> r_coeffs(qs.size());
        std::vector<Complex> v(rows);
        for (int i = 0; i < rows; ++i) v[i] = x(i, pick);
        for (size_t k = 0; k < qs.size(); ++k) {
            Complex proj = 0.0;
            for (int i = 0; i < rows; ++i) proj += std::conj(qs[k][i]) * v[i];
            r_coeffs[k] = proj;
            for (int i = 0; i < rows; ++i) v[i] -= proj * qs[k][i];
        }
        // Second orthogonalization pass for stability.
        for (size_t k = 0; k < qs.size(); ++k) {
            Complex proj = 0.0;
            for (int i = 0; i < rows; ++i) proj += std::conj(qs[k][i]) * v[i];
            r_coeffs[k] += proj;
            for (int i = 0; i < rows; ++i) v[i] -= proj * qs[k][i];
        }
        const double vn = col_norm(v);
        if (vn <= cut) { continue; }
        for (Complex& z : v) z /= vn;
        qs.push_back(v);
        basis.pivots.push_back(pick);

        // q_new = (x[pick] - sum r_k q_k)/vn; expand q_k recursively in pivots.
        std::vector<Complex> c(qs.size(), 0.0);
        c.back() = 1.0 / vn;
        for (size_t k = 0; k + 1 < qs.size(); ++k) {
            const Complex w = -r_coeffs[k] / vn;
            for (size_t p = 0; p <= k; ++p) c[p] += w * coeff[k][p];
        }
        c.resize(qs.size());
        coeff.push_back(c);

        // Deflate the remaining working columns.
        for (int j = 0; j < cols; ++j) {
            if (used[j]) continue;
            Complex proj = 0.0;
            for (int i = 0; i < rows; ++i) proj += std::conj(qs.back()[i]) * work[j][i];
            for (int i = 0; i < rows; ++i) work[j][i] -= proj * qs.back()[i];
        }
    }

    const int rank = static_cast<int>(qs.size());
    basis.q = CMatrix(rows, rank);
    for (int k = 0; k < rank; ++k)
        for (int i = 0; i < rows; ++i) basis.q(i, k) = qs[k][i];
    basis.rinv = CMatrix(rank, rank);
    for (int k = 0; k < rank; ++k)
        for (int p = 0; p < rank; ++p)
            basis.rinv(p, k) = p < static_cast<int>(coeff[k].size()) ? coeff[k][p] : Complex(0.0);
    return basis;
}

// Extends orthonormal columns q to a full unitary by orthogonalizing the
// canonical frame in index order.
CMatrix complete_unitary(const CMatrix& q) {
    const int n = q.rows();
    std::vector<std::vector<Complex>> cols;
    for (int k = 0; k < q.cols(); ++k) {
        std::vector<Complex> v(n);
        for (int i = 0; i < n; ++i) v[i] = q(i, k);
        cols.push_back(std::move(v));
    }
    for (int j = 0; j < n && static_cast<int>(cols.size()) < n; ++j) {
        std::vector<Complex> v(n, 0.0);
        v[j] = 1.0;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& c : cols) {
                Complex proj = 0.0;
                for (int i = 0; i < n; ++i) proj += std::conj(c[i]) * v[i];
                for (int i = 0; i < n; ++i) v[i] -= proj * c[i];
            }
        double nn = 0.0;
        for (const Complex& z : v) nn += std::norm(z);
        nn = std::sqrt(nn);
        if (nn < 1e-8) continue;
        for (Complex& z : v) z /= nn;
        cols.push_back(std::move(v));
    }
    if (static_cast<int>(cols.size()) != n)
        throw numeric_error("complete_unitary: failed to complete the basis");
    CMatrix u(n, n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) u(i, k) = cols[k][i];
    return u;
}

// Rounds a nearly-isometric column set to exact orthonormality.
CMatrix polar_orthonormalize(const CMatrix& p) {
    if (p.cols() == 0) return p;
    const CMatrix gram = p.adjoint() * p;
    const HermEigResult e = herm_eig(gram, 1e-4);
    const int s = gram.rows();
    CMatrix half(s, s);
    for (int k = 0; k < s; ++k) {
        const double w = e.eigenvalues[k];
        if (w <= 1e-24) throw numeric_error("polar_orthonormalize: rank collapse");
        const double f = 1.0 / std::sqrt(w);
        for (int i = 0; i < s; ++i) {
            const Complex ui = f * e.basis(i, k);
            for (int j = 0; j < s; ++j) half(i, j) += ui * std::conj(e.basis(j, k));
        }
    }
    return p * half;
}

}  // namespace

Realization lurking_isometry(const PickInstance& scaled_inst, const AglerCertificate& cert) {
    scaled_inst.validate();
    const int n_pts = scaled_inst.size();
    const int m = scaled_inst.components();
    if (static_cast<int>(cert.a.size()) != m)
        throw validation_error("lurking_isometry: certificate block count != m");

    const double res = certificate_residual(scaled_inst, 1.0, cert.a);
    if (res > 1e-6)
        throw numeric_error("lurking_isometry: certificate residual " + sci(res) +
                            " too large at c = 1");

    // Gram vectors per block; conjugated so that <u_i, u_j> = A[i,j]. The
    // rank cutoff sits just above floating noise: truncated eigenvalue mass
    // perturbs the Gram identity directly, so it must stay below the
    // interpolation budget.
    std::vector<std::vector<std::vector<Complex>>> u(m);
    std::vector<int> block_dims(m);
    int n_state = 0;
    for (int l = 0; l < m; ++l) {
        double trace = 0.0;
        for (int i = 0; i < n_pts; ++i) trace += cert.a[l](i, i).real();
        auto vecs = gram_factor(cert.a[l], 1e-12 * std::max(trace, 1.0));
        for (auto& v : vecs)
            for (Complex& z : v) z = std::conj(z);
        block_dims[l] = vecs.empty() ? 0 : static_cast<int>(vecs.front().size());
        n_state += block_dims[l];
        u[l] = std::move(vecs);
    }

    // x_i = (1, (delta_l u_l)_l), y_i = (f_i, (u_l)_l) in C^(1+n).
    CMatrix x(1 + n_state, n_pts), y(1 + n_state, n_pts);
    for (int i = 0; i < n_pts; ++i) {
        x(0, i) = 1.0;
        y(0, i) = scaled_inst.fvals[i];
        int row = 1;
        for (int l = 0; l < m; ++l) {
            const Complex dv = scaled_inst.e.delta_vals[i][l];
            for (int r = 0; r < block_dims[l]; ++r) {
                x(row, i) = dv * u[l][i][r];
                y(row, i) = u[l][i][r];
                ++row;
            }
        }
    }

    const CMatrix gram_gap = x.adjoint() * x - y.adjoint() * y;
    if (gram_gap.max_abs() > 1e-7)
        throw numeric_error("lurking_isometry: Gram mismatch " +
                            sci(gram_gap.max_abs()) +
                            "; certificate does not match the data");

    const OrthoBasis bx = pivoted_mgs(x, 1e-10);

    // Images of the orthonormal basis under the lurking isometry.
    CMatrix y_piv(1 + n_state, static_cast<int>(bx.pivots.size()));
    for (size_t k = 0; k < bx.pivots.size(); ++k)
        for (int i = 0; i < 1 + n_state; ++i) y_piv(i, static_cast<int>(k)) = y(i, bx.pivots[k]);
    CMatrix p = polar_orthonormalize(y_piv * bx.rinv);

    const CMatrix qfull = complete_unitary(bx.q);
    const CMatrix pfull = complete_unitary(p);
    const CMatrix v = pfull * qfull.adjoint();

    Realization r;
    r.block_dims = block_dims;
    r.a = v(0, 0);
    r.beta.resize(n_state);
    r.gamma.resize(n_state);
    r.d = CMatrix(n_state, n_state);
    for (int k = 0; k < n_state; ++k) {
        r.beta[k] = std::conj(v(0, 1 + k));
        r.gamma[k] = v(1 + k, 0);
        for (int j = 0; j < n_state; ++j) r.d(k, j) = v(1 + k, 1 + j);
    }

    const double iso = isometry_residual(r);
    if (iso > 1e-9)
        throw numeric_error("lurking_isometry: completion is not unitary, residual " +
                            sci(iso));
    double interp = 0.0;
    for (int i = 0; i < n_pts; ++i) {
        const Complex fi = transfer_eval_scalar(r, scaled_inst.e.delta_vals[i]);
        interp = std::max(interp, std::abs(fi - scaled_inst.fvals[i]));
    }
    if (interp > 1e-7)
        throw numeric_error("lurking_isometry: interpolation error " +
                            sci(interp) + " exceeds 1e-7");
    return r;
}

Complex transfer_eval_scalar(const Realization& r, const std::vector<Complex>& z) {
    r.validate();
    if (static_cast<int>(z.size()) != r.components())
        throw validation_error("transfer_eval_scalar: wrong number of coordinates");
    for (const Complex& w : z)
        if (std::abs(w) > 1.0 + 1e-12)
            throw validation_error("transfer_eval_scalar: point outside the closed polydisc");
    const int n = r.state_dim();
    if (n == 0) return r.a;

    const std::vector<Complex> zdiag = graded_diagonal(r.block_dims, z);
    CMatrix lhs = CMatrix::identity(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) lhs(i, j) -= r.d(i, j) * zdiag[j];
    CMatrix rhs(n, 1);
    for (int i = 0; i < n; ++i) rhs(i, 0) = r.gamma[i];
    CMatrix w;
    try {
        w = solve(lhs, rhs);
    } catch (const numeric_error&) {
        throw numeric_error("transfer_eval_scalar: I - D Z singular at a boundary point");
    }
    Complex acc = r.a;
    for (int i = 0; i < n; ++i) acc += std::conj(r.beta[i]) * zdiag[i] * w(i, 0);
    return acc;
}

CMatrix transfer_eval_tuple(const Realization& r, const std::vector<CMatrix>& s) {
    r.validate();
    const int m = r.components();
    if (static_cast<int>(s.size()) != m)
        throw validation_error("transfer_eval_tuple: wrong tuple length");
    const int k = s.empty() ? 0 : s.front().rows();
    for (const CMatrix& sl : s) {
        if (sl.rows() != k || sl.cols() != k)
            throw validation_error("transfer_eval_tuple: blocks must be square, equal size");
        if (op_norm(sl) > 1.0 + 1e-9)
            throw validation_error("transfer_eval_tuple: component is not a contraction");
    }
    check_commuting(CommutingTuple{s}, 1e-9);

    const int n = r.state_dim();
    if (n == 0) {
        CMatrix out = r.a * CMatrix::identity(k);
        return out;
    }

    // S_P = sum_l S^l ⊗ P^l on C^k ⊗ C^n, index (h, mu) -> h*n + mu.
    const int kn = k * n;
    std::vector<int> block_of(n);
    {
        int pos = 0;
        for (int l = 0; l < m; ++l)
            for (int b = 0; b < r.block_dims[l]; ++b) block_of[pos++] = l;
    }
    CMatrix sp(kn, kn);
    for (int h = 0; h < k; ++h)
        for (int hp = 0; hp < k; ++hp)
            for (int mu = 0; mu < n; ++mu)
                sp(h * n + mu, hp * n + mu) = s[block_of[mu]](h, hp);

    // (I ⊗ D) S_P collapses to D(mu,nu) S^{block(nu)}(h,hp).
    CMatrix coupling(kn, kn);
    for (int h = 0; h < k; ++h)
        for (int hp = 0; hp < k; ++hp)
            for (int mu = 0; mu < n; ++mu)
                for (int nu = 0; nu < n; ++nu) {
                    const Complex v = r.d(mu, nu) * s[block_of[nu]](h, hp);
                    if (v != Complex(0.0)) coupling(h * n + mu, hp * n + nu) = v;
                }

    // Resolvent precondition: certify the radius when the cheap norm bound
    // fails, then fall back to the solver's own singularity detection.
    double max_norm = 0.0;
    for (const CMatrix& sl : s) max_norm = std::max(max_norm, op_norm(sl));
    if (max_norm >= 1.0 - 1e-12) {
        const RadiusCertificate rc = certify_radius_below(coupling, 1.0 - 1e-12, 10);
        if (!rc.certified && rc.estimate > 1.0 + 1e-9)
            throw numeric_error("transfer_eval_tuple: coupled spectrum reaches the boundary");
    }

    CMatrix lhs = CMatrix::identity(kn) - coupling;
    CMatrix rgamma(kn, k);
    for (int h = 0; h < k; ++h)
        for (int mu = 0; mu < n; ++mu) rgamma(h * n + mu, h) = r.gamma[mu];
    CMatrix w;
    try {
        w = solve(lhs, rgamma);
    } catch (const numeric_error&) {
        throw numeric_error("transfer_eval_tuple: resolvent not invertible (boundary spectrum)");
    }
    const CMatrix spw = sp * w;
    CMatrix out = r.a * CMatrix::identity(k);
    for (int h = 0; h < k; ++h)
        for (int hp = 0; hp < k; ++hp) {
            Complex acc = 0.0;
            for (int mu = 0; mu < n; ++mu) acc += std::conj(r.beta[mu]) * spw(h * n + mu, hp);
            out(h, hp) += acc;
        }
    return out;
}

CertifiedRealization realize_interpolant(const PickInstance& inst, double norm_tol,
                                         double relax, const ConeOptions& opts) {
    const DeltaNormResult dn = delta_norm(inst, norm_tol, opts);
    CertifiedRealization out;
    out.norm_lower = dn.lower;
    out.scale = (dn.upper > 0.0 ? dn.upper : 1.0) * (1.0 + relax);

    // Deep-polish the certificate at the relaxed scale; the open slack makes
    // the refinement converge in a handful of iterations. The budget stays
    // proportional to the caller's so large instances cannot stall here.
    ConeOptions fine = opts;
    fine.feas_tol = 1e-11;
    fine.max_iter = std::max(4 * opts.max_iter, 20000);
    fine.warm_start = &dn.certificate.a;
    const FeasibilityOutcome fo = cone_membership(inst, out.scale, fine);
    if (fo.status == FeasibilityOutcome::Status::Feasible) {
        out.certificate = *fo.certificate;
    } else {
        out.certificate = dn.certificate;  // fall back to the bisection cert
        out.scale = dn.upper > 0.0 ? dn.upper : 1.0;
    }
    out.realization = lurking_isometry(inst.scaled(out.scale), out.certificate);
    return out;
}

RealizationReport verify_realization(const Realization& r, const PickInstance& scaled_inst,
                                     int grid_points, std::uint64_t seed) {
    RealizationReport rep;
    rep.isometry_residual = isometry_residual(r);
    for (int i = 0; i < scaled_inst.size(); ++i) {
        const Complex fi = transfer_eval_scalar(r, scaled_inst.e.delta_vals[i]);
        rep.max_interp_error =
            std::max(rep.max_interp_error, std::abs(fi - scaled_inst.fvals[i]));
    }
    SeededRng rng(seed);
    const int m = r.components();
    for (int g = 0; g < grid_points; ++g) {
        std::vector<Complex> z(m);
        for (int l = 0; l < m; ++l) {
            // uniform on a disc of radius 0.999
            const double rad = 0.999 * std::sqrt(rng.uniform());
            const double ang = rng.uniform(0.0, 6.283185307179586);
            z[l] = Complex(rad * std::cos(ang), rad * std::sin(ang));
        }
        rep.polydisc_sup_estimate =
            std::max(rep.polydisc_sup_estimate, std::abs(transfer_eval_scalar(r, z)));
    }
    return rep;
}

}  // namespace polyfun
