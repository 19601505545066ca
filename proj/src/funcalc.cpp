#include "polyfun/funcalc.hpp"

#include <algorithm>
#include <cmath>

namespace polyfun {

CMatrix build_sp(const std::vector<CMatrix>& s, const std::vector<int>& block_dims) {
    if (s.size() != block_dims.size())
        throw validation_error("build_sp: tuple length != block count");
    if (s.empty()) throw validation_error("build_sp: empty tuple");
    const int k = s.front().rows();
    for (const CMatrix& sl : s)
        if (sl.rows() != k || sl.cols() != k)
            throw validation_error("build_sp: blocks must be square, equal size");
    int n = 0;
    for (int b : block_dims) {
        if (b < 0) throw validation_error("build_sp: negative block dimension");
        n += b;
    }
    std::vector<int> block_of(n);
    int pos = 0;
    for (size_t l = 0; l < block_dims.size(); ++l)
        for (int b = 0; b < block_dims[l]; ++b) block_of[pos++] = static_cast<int>(l);

    CMatrix sp(k * n, k * n);
    for (int h = 0; h < k; ++h)
        for (int hp = 0; hp < k; ++hp)
            for (int mu = 0; mu < n; ++mu)
                sp(h * n + mu, hp * n + mu) = s[block_of[mu]](h, hp);
    return sp;
}

PrecondReport fc_precondition(const std::vector<CMatrix>& s) {
    if (s.empty()) throw validation_error("fc_precondition: empty tuple");
    PrecondReport rep;
    rep.ok = true;
    for (const CMatrix& sl : s) {
        rep.radii.push_back(spectral_radius(sl));
        const RadiusCertificate rc = certify_radius_below(sl, 1.0);
        if (!rc.certified) rep.ok = false;
        // Tighten the reported bracket with anything the certificate learned.
        RadiusBracket& b = rep.radii.back();
        b.upper = std::min(b.upper, rc.upper);
        b.estimate = std::min(b.estimate, b.upper);
        b.lower = std::min(b.lower, b.estimate);
    }
    return rep;
}

CMatrix fc_eval(const Realization& r, const std::vector<CMatrix>& s,
                const CalcOptions& opts) {
    r.validate();
    if (static_cast<int>(s.size()) != r.components())
        throw validation_error("fc_eval: tuple length != realization components");
    check_commuting(CommutingTuple{s}, 1e-9);

    const int k = s.front().rows();
    const int n = r.state_dim();
    if (n == 0) return r.a * CMatrix::identity(k);

    const CMatrix sp = build_sp(s, r.block_dims);
    const int kn = k * n;

    std::vector<int> block_of(n);
    {
        int pos = 0;
        for (int l = 0; l < r.components(); ++l)
            for (int b = 0; b < r.block_dims[l]; ++b) block_of[pos++] = l;
    }
    CMatrix coupling(kn, kn);
    for (int h = 0; h < k; ++h)
        for (int hp = 0; hp < k; ++hp)
            for (int mu = 0; mu < n; ++mu)
                for (int nu = 0; nu < n; ++nu) {
                    const Complex v = r.d(mu, nu) * s[block_of[nu]](h, hp);
                    if (v != Complex(0.0)) coupling(h * n + mu, hp * n + nu) = v;
                }

    CMatrix rgamma(kn, k);
    for (int h = 0; h < k; ++h)
        for (int mu = 0; mu < n; ++mu) rgamma(h * n + mu, h) = r.gamma[mu];

    auto project_beta = [&](const CMatrix& w) {
        CMatrix out(k, k);
        for (int h = 0; h < k; ++h)
            for (int hp = 0; hp < k; ++hp) {
                Complex acc = 0.0;
                for (int mu = 0; mu < n; ++mu) acc += std::conj(r.beta[mu]) * w(h * n + mu, hp);
                out(h, hp) = acc;
            }
        return out;
    };

    if (opts.method == CalcMethod::Direct) {
        CMatrix lhs = CMatrix::identity(kn) - coupling;
        CMatrix w;
        try {
            w = solve(lhs, rgamma);
        } catch (const numeric_error&) {
            throw numeric_error("fc_eval: resolvent singular; spectral precondition violated");
        }
        return r.a * CMatrix::identity(k) + project_beta(sp * w);
    }

    // Neumann: a I + sum_j R_beta^* S_P ((I ⊗ D) S_P)^j R_gamma.
    const RadiusBracket rho = spectral_radius(coupling);
    const double gap = std::max(1.0 - rho.estimate, 1e-6);
    CMatrix v = rgamma;  // coupling^j R_gamma
    CMatrix acc = r.a * CMatrix::identity(k);
    for (int j = 0; j < opts.max_terms; ++j) {
        const CMatrix term = project_beta(sp * v);
        acc = acc + term;
        if (term.max_abs() < opts.tol * gap) return acc;
        v = coupling * v;
    }
    throw numeric_error("fc_eval: Neumann series did not converge within the term cap; "
                        "use the direct method");
}

namespace {

// Next multi-index with entries < n, odometer order; false when exhausted.
bool next_index(std::vector<int>& e, int n) {
    for (size_t k = 0; k < e.size(); ++k) {
        if (++e[k] < n) return true;
        e[k] = 0;
    }
    return false;
}

}  // namespace

RenormResult rota_renorm(const std::vector<CMatrix>& s, int degree_cap) {
    if (s.empty()) throw validation_error("rota_renorm: empty tuple");
    check_commuting(CommutingTuple{s}, 1e-9);
    const int m = static_cast<int>(s.size());
    const int k = s.front().rows();

    const PrecondReport pre = fc_precondition(s);
    if (!pre.ok) {
        std::string radii;
        for (const RadiusBracket& b : pre.radii)
            radii += " [" + sci(b.lower) + ", " + sci(b.upper) + "]";
        throw numeric_error("rota_renorm: spectral radius not certified below 1;" + radii);
    }

    // Smallest N with every ‖(S^l)^N‖ < 1, powers grown incrementally.
    std::vector<CMatrix> pw = s;
    int degree = 1;
    auto all_contractive = [&]() {
        for (const CMatrix& p : pw)
            if (!(op_norm(p) < 1.0)) return false;
        return true;
    };
    while (!all_contractive()) {
        if (degree >= degree_cap)
            throw numeric_error("rota_renorm: power norms stay >= 1 up to the degree cap");
        for (int l = 0; l < m; ++l) pw[l] = pw[l] * s[l];
        ++degree;
        if (m * std::pow(static_cast<double>(degree), m) > 4e6)
            throw numeric_error("rota_renorm: monomial family too large (memory guard)");
    }
    const int n_deg = degree;

    // Monomial powers per variable up to degree N-1.
    std::vector<std::vector<CMatrix>> powers(m);
    for (int l = 0; l < m; ++l) {
        powers[l].push_back(CMatrix::identity(k));
        for (int e = 1; e < n_deg; ++e) powers[l].push_back(powers[l].back() * s[l]);
    }

    // Graded-lex enumeration of exponents in [0, N-1]^m.
    std::vector<std::vector<int>> exponents;
    {
        std::vector<int> e(m, 0);
        do {
            exponents.push_back(e);
        } while (next_index(e, n_deg));
        std::sort(exponents.begin(), exponents.end(),
                  [](const std::vector<int>& a, const std::vector<int>& b) {
                      int ta = 0, tb = 0;
                      for (int v : a) ta += v;
                      for (int v : b) tb += v;
                      if (ta != tb) return ta < tb;
                      return a < b;
                  });
    }

    const double scale = 1.0 / std::pow(static_cast<double>(n_deg), 2 * m);
    CMatrix gram(k, k);
    for (const std::vector<int>& e : exponents) {
        CMatrix p = powers[0][e[0]];
        for (int l = 1; l < m; ++l) p = p * powers[l][e[l]];
        gram = gram + p.adjoint() * p;
    }
    gram = scale * gram;

    const HermEigResult eig = herm_eig(gram, 1e-8);
    const double wmin = eig.eigenvalues.front(), wmax = eig.eigenvalues.back();
    if (wmin <= 0.0) throw numeric_error("rota_renorm: Gram matrix not positive definite");

    RenormResult out;
    out.degree = n_deg;
    out.condition = std::sqrt(wmax / wmin);
    out.a = CMatrix(k, k);
    out.a_inv = CMatrix(k, k);
    for (int c = 0; c < k; ++c) {
        const double f = 1.0 / std::sqrt(eig.eigenvalues[c]);
        const double g = std::sqrt(eig.eigenvalues[c]);
        for (int i = 0; i < k; ++i) {
            const Complex ui = eig.basis(i, c);
            for (int j = 0; j < k; ++j) {
                const Complex uj = std::conj(eig.basis(j, c));
                out.a(i, j) += f * ui * uj;      // Gram^{-1/2}
                out.a_inv(i, j) += g * ui * uj;  // Gram^{+1/2}
            }
        }
    }

    out.renormed_norms.resize(m);
    for (int l = 0; l < m; ++l) {
        out.renormed_norms[l] = op_norm(out.a_inv * s[l] * out.a);
        if (!(out.renormed_norms[l] < 1.0))
            throw numeric_error("rota_renorm: renormed norm " +
                                sci(out.renormed_norms[l]) + " not below 1");
    }
    return out;
}

double fc_agreement(const Realization& r, const GenericTuple& t, const PolyMap& delta,
                    CalcMethod method) {
    if (delta.components() != r.components())
        throw validation_error("fc_agreement: delta components != realization components");
    for (const auto& p : t.lambda) {
        const PointClass pc = classify_point(delta, p, 0.0);
        if (!(pc.value < 1.0))
            throw validation_error("fc_agreement: tuple spectrum leaves G_delta");
    }
    const std::vector<CMatrix> s = eval_tuple(delta, t.as_commuting(), 1e-9);
    const PrecondReport pre = fc_precondition(s);
    if (!pre.ok) throw numeric_error("fc_agreement: spectral precondition failed");

    CalcOptions opts;
    opts.method = method;
    const CMatrix lhs = fc_eval(r, s, opts);

    std::vector<Complex> fvals(t.order());
    for (int j = 0; j < t.order(); ++j) {
        const std::vector<Complex> dv = delta.eval_point(t.lambda[j]);
        fvals[j] = transfer_eval_scalar(r, dv);
    }
    const CMatrix rhs = eigen_calculus(t, fvals);
    const double denom = std::max(op_norm(rhs), 1e-12);
    return op_norm(lhs - rhs) / denom;
}

}  // namespace polyfun
