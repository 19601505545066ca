#include "polyfun/pickcone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

// The active-set path of delta_norm extends subset realizations into
// full-sample certificates, so it reaches one level up.
#include "polyfun/realization.hpp"

namespace polyfun {

void PickInstance::validate() const {
    const int n = size();
    if (n == 0) throw validation_error("PickInstance: empty sample");
    if (static_cast<int>(fvals.size()) != n)
        throw validation_error("PickInstance: fvals size != sample size");
    if (e.delta_vals.size() != e.points.size())
        throw validation_error("PickInstance: sample missing delta values");
    const int m = components();
    if (m == 0) throw validation_error("PickInstance: no delta components");
    for (const auto& row : e.delta_vals) {
        if (static_cast<int>(row.size()) != m)
            throw validation_error("PickInstance: ragged delta values");
        for (const Complex& v : row)
            if (!(std::abs(v) < 1.0))
                throw validation_error("PickInstance: delta value outside the open disc");
    }
    for (const Complex& f : fvals)
        if (!std::isfinite(f.real()) || !std::isfinite(f.imag()))
            throw validation_error("PickInstance: non-finite target value");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double dist = 0.0;
            for (size_t r = 0; r < e.points[i].size(); ++r)
                dist = std::max(dist, std::abs(e.points[i][r] - e.points[j][r]));
            if (dist <= 1e-12) throw validation_error("PickInstance: repeated points");
        }
}

PickInstance PickInstance::scaled(double c) const {
    if (!(c > 0.0)) throw validation_error("PickInstance::scaled: scale must be positive");
    PickInstance out = *this;
    for (Complex& f : out.fvals) f /= c;
    return out;
}

double pseudometric(Complex a1, Complex a2) {
    const Complex den = 1.0 - std::conj(a1) * a2;
    const double dabs = std::abs(den);
    if (dabs == 0.0) return std::numeric_limits<double>::infinity();
    return std::abs(a2 - a1) / dabs;
}

namespace {

// Kernel coefficients g_l[i,j] = 1 - conj(delta_l(lambda_j)) delta_l(lambda_i).
std::vector<CMatrix> kernel_coeffs(const PickInstance& inst) {
    const int n = inst.size(), m = inst.components();
    std::vector<CMatrix> g(m, CMatrix(n, n));
    for (int l = 0; l < m; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                g[l](i, j) = 1.0 - std::conj(inst.e.delta_vals[j][l]) * inst.e.delta_vals[i][l];
    return g;
}

CMatrix target_kernel(const PickInstance& inst, double c) {
    const int n = inst.size();
    CMatrix b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            b(i, j) = 1.0 - std::conj(inst.fvals[j] / c) * (inst.fvals[i] / c);
    return b;
}

CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

CMatrix psd_project(const CMatrix& a) {
    const CMatrix h = hermitian_part(a);
    if (h.max_abs() == 0.0) return h;
    const HermEigResult e = herm_eig(h, 1e-6);
    const int n = h.rows();
    CMatrix out(n, n);
    for (int k = 0; k < n; ++k) {
        const double w = e.eigenvalues[k];
        if (w <= 0.0) continue;
        for (int i = 0; i < n; ++i) {
            const Complex ui = w * e.basis(i, k);
            for (int j = 0; j < n; ++j) out(i, j) += ui * std::conj(e.basis(j, k));
        }
    }
    return out;
}

}  // namespace

double certificate_residual(const PickInstance& inst, double c,
                            const std::vector<CMatrix>& a) {
    const std::vector<CMatrix> g = kernel_coeffs(inst);
    const CMatrix b = target_kernel(inst, c);
    const int n = inst.size(), m = inst.components();
    if (static_cast<int>(a.size()) != m)
        throw validation_error("certificate_residual: wrong block count");
    double res = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Complex s = 0.0;
            for (int l = 0; l < m; ++l) s += g[l](i, j) * a[l](i, j);
            res = std::max(res, std::abs(b(i, j) - s));
        }
    return res;
}

FeasibilityOutcome cone_membership(const PickInstance& inst, double c,
                                   const ConeOptions& opts) {
    inst.validate();
    if (!(c > 0.0)) throw validation_error("cone_membership: scale must be positive");
    const int n = inst.size(), m = inst.components();
    const std::vector<CMatrix> g = kernel_coeffs(inst);
    const CMatrix b = target_kernel(inst, c);

    std::vector<double> gnorm2(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int l = 0; l < m; ++l) s += std::norm(g[l](i, j));
            gnorm2[static_cast<size_t>(i) * n + j] = s;
        }

    auto affine_project = [&](std::vector<CMatrix>& y) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Complex r = -b(i, j);
                for (int l = 0; l < m; ++l) r += g[l](i, j) * y[l](i, j);
                const Complex step = r / gnorm2[static_cast<size_t>(i) * n + j];
                for (int l = 0; l < m; ++l) y[l](i, j) -= std::conj(g[l](i, j)) * step;
            }
    };
    auto affine_residual = [&](const std::vector<CMatrix>& y) {
        double res = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Complex r = -b(i, j);
                for (int l = 0; l < m; ++l) r += g[l](i, j) * y[l](i, j);
                res = std::max(res, std::abs(r));
            }
        return res;
    };

    // Douglas-Rachford splitting between the affine decomposition set and the
    // product PSD cone. The PSD-side shadow iterate is the certificate
    // candidate; its affine residual is the convergence measure. Warm starts
    // (a certificate from a nearby scale) make continuation probes cheap.
    // Cold starts use the Szego split b ∘ recip(g_l)/m, which satisfies the
    // affine constraints exactly and is often already PSD on easy scales.
    std::vector<CMatrix> state(m, CMatrix(n, n));
    bool warmed = false;
    if (opts.warm_start && static_cast<int>(opts.warm_start->size()) == m) {
        bool ok = true;
        for (const CMatrix& w : *opts.warm_start)
            if (w.rows() != n || w.cols() != n) ok = false;
        if (ok) {
            state = *opts.warm_start;
            warmed = true;
        }
    }
    if (!warmed)
        for (int l = 0; l < m; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    state[l](i, j) = b(i, j) / (static_cast<double>(m) * g[l](i, j));

    // One Douglas-Rachford step from `st`; returns the residual of the PSD
    // shadow iterate and leaves it in pb.
    std::vector<CMatrix> pa(m), pb(m);
    auto dr_residual = [&](const std::vector<CMatrix>& st) {
        pa = st;
        affine_project(pa);
        for (int l = 0; l < m; ++l) pb[l] = psd_project(2.0 * pa[l] - st[l]);
        return affine_residual(pb);
    };

    FeasibilityOutcome out;
    double best_res = std::numeric_limits<double>::infinity();
    double checkpoint_best = best_res;
    int misses = 0;
    int next_stop_check = 5 * opts.stall_window;
    std::vector<CMatrix> snapshot = state;
    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        const double res = dr_residual(state);
        best_res = std::min(best_res, res);
        if (res <= opts.feas_tol) {
            AglerCertificate cert;
            cert.a.reserve(m);
            for (int l = 0; l < m; ++l) cert.a.push_back(psd_project(pb[l]));
            cert.residual = certificate_residual(inst, c, cert.a);
            if (cert.residual <= 2.0 * opts.feas_tol) {
                out.status = FeasibilityOutcome::Status::Feasible;
                out.certificate = std::move(cert);
                out.residual = out.certificate->residual;
                out.iterations = iter + 1;
                return out;
            }
        }
        for (int l = 0; l < m; ++l) state[l] = state[l] + pb[l] - pa[l];

        // Near-critical feasible instances march down a long straight tube
        // with a frozen residual. Extrapolating along the recent displacement
        // compresses the march exponentially; candidates are adopted when
        // they do not worsen the residual.
        if ((iter + 1) % opts.stall_window == 0) {
            std::vector<CMatrix> direction(m);
            for (int l = 0; l < m; ++l) direction[l] = state[l] - snapshot[l];
            for (double mult : {524288.0, 65536.0, 8192.0, 1024.0, 128.0, 16.0}) {
                std::vector<CMatrix> cand(m);
                const Complex scale(mult / opts.stall_window, 0.0);
                for (int l = 0; l < m; ++l) cand[l] = state[l] + scale * direction[l];
                if (dr_residual(cand) <= res * (1.0 + 1e-12)) {
                    state = std::move(cand);
                    break;
                }
            }
            snapshot = state;
        }

        // With jumps in play a feasible run keeps dropping its best residual
        // between doubling checkpoints (a landing march cuts it sharply);
        // an infeasible one levels off at its gap. Two checkpoints in a row
        // without a decisive drop mean the scale is infeasible to working
        // resolution.
        if (iter + 1 >= next_stop_check) {
            if (best_res > checkpoint_best * 0.7 && best_res > opts.feas_tol) {
                if (++misses >= 2) break;
            } else {
                misses = 0;
            }
            checkpoint_best = best_res;
            next_stop_check *= 2;
        }
    }
    out.status = FeasibilityOutcome::Status::Undetermined;
    out.residual = best_res;
    out.iterations = iter;
    return out;
}

double two_point_norm(const std::vector<Complex>& delta_row1,
                      const std::vector<Complex>& delta_row2, Complex f1, Complex f2) {
    if (delta_row1.size() != delta_row2.size() || delta_row1.empty())
        throw validation_error("two_point_norm: bad delta rows");
    double cap = 0.0;
    for (size_t l = 0; l < delta_row1.size(); ++l) {
        if (!(std::abs(delta_row1[l]) < 1.0) || !(std::abs(delta_row2[l]) < 1.0))
            throw validation_error("two_point_norm: delta value outside the open disc");
        cap = std::max(cap, pseudometric(delta_row1[l], delta_row2[l]));
    }

    const double c0 = std::max(std::abs(f1), std::abs(f2));
    if (std::abs(f1 - f2) == 0.0) return c0;
    if (cap == 0.0) return std::numeric_limits<double>::infinity();

    const auto feasible = [&](double c) {
        return pseudometric(f1 / c, f2 / c) <= cap;
    };
    if (feasible(c0)) return c0;

    double lo = c0, hi = c0;
    for (int k = 0; k < 200 && !feasible(hi); ++k) hi *= 2.0;
    if (!feasible(hi)) return std::numeric_limits<double>::infinity();
    while (hi - lo > 1e-13 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

namespace {

// The direct bisection engine; the public entry point routes large instances
// through an active-set reduction first.
DeltaNormResult delta_norm_direct(const PickInstance& inst, double tol,
                                  const ConeOptions& opts);

}  // namespace

namespace {

DeltaNormResult delta_norm_direct(const PickInstance& inst, double tol,
                                  const ConeOptions& opts) {
    const int n = inst.size();

    double lower = 0.0;
    for (const Complex& f : inst.fvals) lower = std::max(lower, std::abs(f));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double tp = two_point_norm(inst.e.delta_vals[i], inst.e.delta_vals[j],
                                             inst.fvals[i], inst.fvals[j]);
            if (std::isinf(tp))
                throw numeric_error(
                    "delta_norm: delta not injective on E; the norm is infinite");
            lower = std::max(lower, tp);
        }

    DeltaNormResult result;
    result.lower = lower;

    ConeOptions probe_opts = opts;
    std::vector<CMatrix> warm;

    auto probe = [&](double c) -> FeasibilityOutcome {
        probe_opts.warm_start = warm.empty() ? nullptr : &warm;
        FeasibilityOutcome o = cone_membership(inst, c, probe_opts);
        ++result.probes;
        result.total_iterations += o.iterations;
        if (o.status == FeasibilityOutcome::Status::Feasible) warm = o.certificate->a;
        return o;
    };

    if (lower == 0.0) {  // f vanishes on E
        FeasibilityOutcome o = probe(1.0);
        if (o.status != FeasibilityOutcome::Status::Feasible)
            throw numeric_error("delta_norm: solver undetermined on the zero function");
        result.upper = 0.0;
        result.certificate = *o.certificate;
        return result;
    }

    // Boundary data are feasible in the closed cone; accept c = lower if the
    // solver converges there.
    {
        FeasibilityOutcome o = probe(lower);
        if (o.status == FeasibilityOutcome::Status::Feasible) {
            result.upper = lower;
            result.certificate = *o.certificate;
            return result;
        }
    }

    double upper = 2.0 * lower;
    FeasibilityOutcome at_upper = probe(upper);
    int doublings = 0;
    while (at_upper.status != FeasibilityOutcome::Status::Feasible) {
        if (++doublings > 40)
            throw numeric_error("delta_norm: no feasible scale found up to 2^40 * lower; "
                                "final residual " + sci(at_upper.residual));
        upper *= 2.0;
        at_upper = probe(upper);
    }
    AglerCertificate cert = *at_upper.certificate;

    // Bisection narrows the bracket; lo tracks scales the solver gave up on,
    // which is heuristic, so the returned lower stays the rigorous seed.
    double lo = lower;
    while (upper > lo * (1.0 + tol)) {
        const double mid = std::sqrt(lo * upper);
        FeasibilityOutcome o = probe(mid);
        if (o.status == FeasibilityOutcome::Status::Feasible) {
            upper = mid;
            cert = *o.certificate;
        } else {
            lo = mid;
        }
    }

    // Polish: walk the feasibility frontier downward with warm starts,
    // growing the step on success and shrinking on refusal, until the solver
    // refuses at the finest step. This erases the hysteresis the bisection
    // path leaves behind on hard (tangential) instances. Coarse tolerances
    // have nothing to gain from it.
    if (tol >= 5e-3) {
        result.upper = upper;
        result.certificate = std::move(cert);
        return result;
    }
    double step = 8.0 * tol;
    int streak = 0;
    for (int budget = 80; budget > 0; --budget) {
        const double next = std::max(lower, upper / (1.0 + step));
        if (next >= upper * (1.0 - 1e-13)) break;
        FeasibilityOutcome o = probe(next);
        if (o.status == FeasibilityOutcome::Status::Feasible) {
            upper = next;
            cert = *o.certificate;
            if (++streak >= 2) {
                step *= 4.0;
                streak = 0;
            }
        } else {
            streak = 0;
            if (step > tol * (1.0 + 1e-9)) {
                step = std::max(tol, step / 8.0);
                continue;
            }
            // Refusal at the finest step. A residual well above tolerance is
            // a clear gap; a small one may be a feasible probe that ran out
            // of budget, so confirm once with a larger one.
            if (o.residual > 100.0 * opts.feas_tol) break;
            ConeOptions wide = probe_opts;
            wide.max_iter = 8 * opts.max_iter;
            wide.stall_window = 8 * opts.stall_window;
            wide.warm_start = warm.empty() ? nullptr : &warm;
            FeasibilityOutcome o2 = cone_membership(inst, next, wide);
            ++result.probes;
            result.total_iterations += o2.iterations;
            if (o2.status != FeasibilityOutcome::Status::Feasible) break;
            warm = o2.certificate->a;
            upper = next;
            cert = *o2.certificate;
        }
    }

    result.upper = upper;
    result.certificate = std::move(cert);
    return result;
}

PickInstance restrict_instance(const PickInstance& inst, const std::vector<int>& idx) {
    PickInstance sub;
    for (int i : idx) {
        sub.e.points.push_back(inst.e.points[i]);
        sub.e.delta_vals.push_back(inst.e.delta_vals[i]);
        sub.fvals.push_back(inst.fvals[i]);
    }
    return sub;
}

}  // namespace

DeltaNormResult delta_norm(const PickInstance& inst, double tol, const ConeOptions& opts) {
    inst.validate();
    if (!(tol > 0.0)) throw validation_error("delta_norm: tol must be positive");
    const int n = inst.size();
    if (n <= 14) return delta_norm_direct(inst, tol, opts);

    // Active-set reduction. Extremal interpolation problems are pinned by a
    // few points: solve tight on a growing subset, extend its realization to
    // a warm-start certificate for the whole sample, and close with a single
    // warm full-size solve. Falls back to the direct engine if the subset
    // interpolant never captures the rest of the data.
    const double sub_tol = std::min(tol, 1e-4);

    bool have_seed = false;
    int seed_i = 0, seed_j = 1;
    double worst_pair = -1.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double tp = two_point_norm(inst.e.delta_vals[i], inst.e.delta_vals[j],
                                             inst.fvals[i], inst.fvals[j]);
            if (std::isinf(tp))
                throw numeric_error(
                    "delta_norm: delta not injective on E; the norm is infinite");
            if (tp > worst_pair) {
                worst_pair = tp;
                seed_i = i;
                seed_j = j;
                have_seed = true;
            }
        }
    if (!have_seed || worst_pair == 0.0) return delta_norm_direct(inst, tol, opts);

    std::vector<bool> active(n, false);
    active[seed_i] = active[seed_j] = true;

    DeltaNormResult result;
    ConeOptions sub_opts = opts;
    sub_opts.max_iter = std::max(opts.max_iter, 30000);
    sub_opts.stall_window = 200;

    for (int round = 0; round < n; ++round) {
        std::vector<int> idx;
        for (int i = 0; i < n; ++i)
            if (active[i]) idx.push_back(i);
        if (static_cast<int>(idx.size()) > n / 2) break;  // reduction not paying off

        const PickInstance sub = restrict_instance(inst, idx);
        CertifiedRealization cr;
        try {
            cr = realize_interpolant(sub, sub_tol, 1e-6, sub_opts);
        } catch (const numeric_error&) {
            break;  // subset machinery failed: use the direct engine
        }
        result.probes += 1;

        // Mismatch of the subset interpolant on the full sample.
        double worst = 0.0;
        int worst_at = -1;
        std::vector<Complex> fhat(n);
        for (int i = 0; i < n; ++i) {
            fhat[i] = cr.scale * transfer_eval_scalar(cr.realization, inst.e.delta_vals[i]);
            const double err = std::abs(fhat[i] - inst.fvals[i]);
            if (err > worst) {
                worst = err;
                worst_at = i;
            }
        }

        if (worst <= 20.0 * opts.feas_tol * cr.scale) {
            // Extend the subset certificate: state vectors of the transfer
            // function at every sample point reproduce its Agler kernel.
            const Realization& r = cr.realization;
            const int n_state = r.state_dim();
            std::vector<CMatrix> warm(r.components(), CMatrix(n, n));
            if (n_state > 0) {
                std::vector<int> block_of(n_state);
                int pos = 0;
                for (int l = 0; l < r.components(); ++l)
                    for (int b = 0; b < r.block_dims[l]; ++b) block_of[pos++] = l;
                std::vector<std::vector<Complex>> state(n);
                for (int i = 0; i < n; ++i) {
                    const std::vector<Complex> zdiag = [&] {
                        std::vector<Complex> v;
                        for (int l = 0; l < r.components(); ++l)
                            v.insert(v.end(), r.block_dims[l], inst.e.delta_vals[i][l]);
                        return v;
                    }();
                    CMatrix lhs = CMatrix::identity(n_state);
                    for (int a = 0; a < n_state; ++a)
                        for (int bcol = 0; bcol < n_state; ++bcol)
                            lhs(a, bcol) -= r.d(a, bcol) * zdiag[bcol];
                    CMatrix rhs(n_state, 1);
                    for (int a = 0; a < n_state; ++a) rhs(a, 0) = r.gamma[a];
                    const CMatrix u = solve(lhs, rhs);
                    state[i].resize(n_state);
                    for (int a = 0; a < n_state; ++a) state[i][a] = u(a, 0);
                }
                for (int l = 0; l < r.components(); ++l)
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) {
                            Complex acc = 0.0;
                            for (int a = 0; a < n_state; ++a)
                                if (block_of[a] == l)
                                    acc += state[i][a] * std::conj(state[j][a]);
                            warm[l](i, j) = acc;
                        }
            }

            ConeOptions close = opts;
            close.warm_start = &warm;
            const FeasibilityOutcome o = cone_membership(inst, cr.scale, close);
            ++result.probes;
            result.total_iterations += o.iterations;
            if (o.status == FeasibilityOutcome::Status::Feasible) {
                result.lower = std::max(result.lower, cr.norm_lower);
                result.upper = cr.scale;
                result.certificate = *o.certificate;
                return result;
            }
        }
        if (worst_at < 0 || active[worst_at]) break;
        active[worst_at] = true;
    }

    DeltaNormResult direct = delta_norm_direct(inst, tol, opts);
    direct.probes += result.probes;
    direct.total_iterations += result.total_iterations;
    return direct;
}

}  // namespace polyfun
