#include "polyfun/oka.hpp"

#include <algorithm>
#include <cmath>

namespace polyfun {

Complex Polynomial::eval(const std::vector<Complex>& lambda) const {
    if (static_cast<int>(lambda.size()) != d)
        throw validation_error("Polynomial: point dimension mismatch");
    Complex acc = 0.0;
    for (const auto& [e, c] : coeffs) {
        Complex mono = c;
        for (int r = 0; r < d; ++r)
            for (int k = 0; k < e[r]; ++k) mono *= lambda[r];
        acc += mono;
    }
    return acc;
}

void Polynomial::prune(double tol) {
    for (auto it = coeffs.begin(); it != coeffs.end();)
        it = std::abs(it->second) <= tol ? coeffs.erase(it) : std::next(it);
}

Polynomial poly_add(const Polynomial& a, const Polynomial& b) {
    if (a.d != b.d) throw validation_error("poly_add: dimension mismatch");
    Polynomial out = a;
    for (const auto& [e, c] : b.coeffs) out.coeffs[e] += c;
    return out;
}

Polynomial poly_mul(const Polynomial& a, const Polynomial& b, double prune_tol) {
    if (a.d != b.d) throw validation_error("poly_mul: dimension mismatch");
    Polynomial out;
    out.d = a.d;
    for (const auto& [ea, ca] : a.coeffs)
        for (const auto& [eb, cb] : b.coeffs) {
            std::vector<int> e(a.d);
            for (int r = 0; r < a.d; ++r) e[r] = ea[r] + eb[r];
            out.coeffs[e] += ca * cb;
        }
    if (prune_tol > 0.0) out.prune(prune_tol);
    return out;
}

Polynomial poly_scale(Complex s, const Polynomial& a) {
    Polynomial out = a;
    for (auto& [e, c] : out.coeffs) c *= s;
    return out;
}

Polynomial poly_from_component(const PolyMap& p, int l) {
    Polynomial out;
    out.d = p.dim();
    for (const PolyTerm& t : p.terms())
        if (t.component == l) out.coeffs[t.exponents] += t.coeff;
    out.prune(0.0);
    return out;
}

Complex eval_phi(const ExtensionResult& res, const std::vector<Complex>& z) {
    std::vector<Complex> tz(z.size());
    for (size_t l = 0; l < z.size(); ++l) tz[l] = res.t * z[l];
    return res.norm_bound * transfer_eval_scalar(res.psi, tz);
}

Complex eval_extension(const ExtensionResult& res, const std::vector<Complex>& lambda) {
    return eval_phi(res, res.gamma.eval_point(lambda));
}

ExtensionResult oka_extend(const PolyMap& delta, const Polynomial& f, const Box& box,
                           const OkaConfig& config) {
    if (f.d != delta.dim()) throw validation_error("oka_extend: f dimension != delta dimension");
    if (!(config.t > 0.0 && config.t < 1.0))
        throw validation_error("oka_extend: t must lie in (0,1)");
    if (config.sample_count < 2 || config.holdout_count < 1)
        throw validation_error("oka_extend: sample and holdout counts too small");

    Augmentation aug = augment(delta, box, config.grid_n, config.safety);

    const PolyMap tgamma = aug.gamma.scaled(config.t);
    PickInstance inst;
    inst.e = sample_gdel(tgamma, box, config.sample_count, config.seed, config.sample_margin);
    inst.fvals.reserve(inst.e.size());
    for (const auto& p : inst.e.points) inst.fvals.push_back(f.eval(p));

    const CertifiedRealization cr = realize_interpolant(
        inst, config.norm_tol, std::max(1e-3, config.norm_tol), config.cone);

    ExtensionResult res;
    res.gamma = std::move(aug.gamma);
    res.epsilon = aug.epsilon;
    res.t = config.t;
    res.norm_bound = cr.scale;
    res.norm_lower = cr.norm_lower;
    res.sample = inst.e;
    res.sample_f = inst.fvals;
    res.seed = config.seed;
    res.tol = config.tol;
    res.psi = cr.realization;

    const std::uint64_t holdout_seed = config.seed ^ 0x9e3779b97f4a7c15ULL;
    const FiniteSample holdout = sample_gdel(delta, box, config.holdout_count,
                                             holdout_seed, 1e-3);
    double worst = 0.0;
    std::vector<Complex> worst_pt;
    for (const auto& p : holdout.points) {
        const double err = std::abs(eval_extension(res, p) - f.eval(p));
        if (err > worst) { worst = err; worst_pt = p; }
    }
    res.holdout_max_error = worst;
    if (worst > config.tol) {
        std::string where;
        for (const Complex& z : worst_pt)
            where += " (" + std::to_string(z.real()) + "," + std::to_string(z.imag()) + ")";
        throw numeric_error("oka_extend: holdout error " + sci(worst) +
                            " exceeds tolerance at point" + where +
                            "; raise sample_count or loosen tol");
    }
    return res;
}

namespace {

// One monomial of the state-space series: exponent vector -> state vector.
using SeriesVec = std::map<std::vector<int>, std::vector<Complex>>;

int total_degree(const std::vector<int>& e) {
    int t = 0;
    for (int v : e) t += v;
    return t;
}

}  // namespace

Polynomial oka_weil_approx(const ExtensionResult& res, int degree_j, double prune_tol) {
    if (degree_j < 0) throw validation_error("oka_weil_approx: negative degree");
    const Realization& r = res.psi;
    const int m = r.components();
    const int n = r.state_dim();
    const int d = res.gamma.dim();

    // Power-series coefficients of Psi up to total degree J, from the fixed
    // point h = gamma_vec + D W h iterated degree-by-degree.
    std::map<std::vector<int>, Complex> psi_coeffs;
    psi_coeffs[std::vector<int>(m, 0)] = r.a;

    if (n > 0) {
        std::vector<int> block_of(n);
        int pos = 0;
        for (int l = 0; l < m; ++l)
            for (int b = 0; b < r.block_dims[l]; ++b) block_of[pos++] = l;

        SeriesVec h;
        std::vector<Complex> gvec(r.gamma.begin(), r.gamma.end());
        h[std::vector<int>(m, 0)] = gvec;
        for (int step = 0; step < degree_j; ++step) {
            SeriesVec next;
            next[std::vector<int>(m, 0)] = gvec;
            for (const auto& [e, v] : h) {
                if (total_degree(e) >= degree_j) continue;
                for (int l = 0; l < m; ++l) {
                    // D (P^l v): restrict to block l, then apply D.
                    std::vector<Complex> w(n, 0.0);
                    bool nonzero = false;
                    for (int mu = 0; mu < n; ++mu) {
                        if (block_of[mu] != l || v[mu] == Complex(0.0)) continue;
                        nonzero = true;
                        for (int i = 0; i < n; ++i) w[i] += r.d(i, mu) * v[mu];
                    }
                    if (!nonzero) continue;
                    std::vector<int> enew = e;
                    ++enew[l];
                    auto& slot = next[enew];
                    if (slot.empty()) slot.assign(n, 0.0);
                    for (int i = 0; i < n; ++i) slot[i] += w[i];
                }
            }
            h = std::move(next);
        }
        // q = beta^* W h
        for (const auto& [e, v] : h) {
            if (total_degree(e) >= degree_j + 1) continue;
            for (int l = 0; l < m; ++l) {
                Complex acc = 0.0;
                for (int mu = 0; mu < n; ++mu)
                    if (block_of[mu] == l) acc += std::conj(r.beta[mu]) * v[mu];
                if (acc == Complex(0.0)) continue;
                std::vector<int> enew = e;
                ++enew[l];
                if (total_degree(enew) > degree_j) continue;
                psi_coeffs[enew] += acc;
            }
        }
    }

    // Compose with t*gamma over C^d, powers memoized per component.
    std::vector<Polynomial> tg(m);
    for (int l = 0; l < m; ++l)
        tg[l] = poly_scale(res.t, poly_from_component(res.gamma, l));
    std::vector<std::vector<Polynomial>> tg_pow(m);
    for (int l = 0; l < m; ++l) {
        Polynomial one;
        one.d = d;
        one.coeffs[std::vector<int>(d, 0)] = 1.0;
        tg_pow[l].push_back(one);
    }
    auto power = [&](int l, int e) -> const Polynomial& {
        while (static_cast<int>(tg_pow[l].size()) <= e)
            tg_pow[l].push_back(poly_mul(tg_pow[l].back(), tg[l], prune_tol));
        return tg_pow[l][e];
    };

    Polynomial p;
    p.d = d;
    for (const auto& [e, c] : psi_coeffs) {
        Polynomial mono;
        mono.d = d;
        mono.coeffs[std::vector<int>(d, 0)] = c * res.norm_bound;
        for (int l = 0; l < m; ++l)
            if (e[l] > 0) mono = poly_mul(mono, power(l, e[l]), prune_tol);
        p = poly_add(p, mono);
    }
    p.prune(prune_tol);
    return p;
}

namespace {

bool advance_grid(std::vector<int>& idx, int grid_n) {
    for (size_t k = 0; k < idx.size(); ++k) {
        if (++idx[k] < grid_n) return true;
        idx[k] = 0;
    }
    return false;
}

}  // namespace

double kdel_grid_error(const PolyMap& delta, const Box& box, int grid_n,
                       const Polynomial& p, const Polynomial& f) {
    box.validate(delta.dim());
    const int d = delta.dim();
    std::vector<int> idx(2 * d, 0);
    std::vector<Complex> pt(d);
    double worst = 0.0;
    do {
        for (int r = 0; r < d; ++r) {
            const double fre = static_cast<double>(idx[2 * r]) / (grid_n - 1);
            const double fim = static_cast<double>(idx[2 * r + 1]) / (grid_n - 1);
            pt[r] = Complex(box.center[r].real() + (2.0 * fre - 1.0) * box.radius[r],
                            box.center[r].imag() + (2.0 * fim - 1.0) * box.radius[r]);
        }
        const std::vector<Complex> dv = delta.eval_point(pt);
        double mx = 0.0;
        for (const Complex& v : dv) mx = std::max(mx, std::abs(v));
        if (mx > 1.0) continue;
        worst = std::max(worst, std::abs(p.eval(pt) - f.eval(pt)));
    } while (advance_grid(idx, grid_n));
    return worst;
}

ExtensionReport verify_extension(const ExtensionResult& res, const PolyMap& delta,
                                 const Polynomial& f, const Box& box,
                                 std::uint64_t fresh_seed) {
    ExtensionReport rep;
    const FiniteSample holdout =
        sample_gdel(delta, box, std::max(1, res.sample.size() * 4), fresh_seed, 1e-3);
    for (const auto& p : holdout.points)
        rep.fresh_holdout_error =
            std::max(rep.fresh_holdout_error, std::abs(eval_extension(res, p) - f.eval(p)));

    // |Phi| over a seeded polydisc grid.
    SeededRng rng(fresh_seed ^ 0xda3e39cb94b95bdbULL);
    const int m = res.gamma.components();
    for (int g = 0; g < 4000; ++g) {
        std::vector<Complex> z(m);
        for (int l = 0; l < m; ++l) {
            const double rad = std::sqrt(rng.uniform());
            const double ang = rng.uniform(0.0, 6.283185307179586);
            z[l] = Complex(rad * std::cos(ang), rad * std::sin(ang));
        }
        rep.polydisc_sup = std::max(rep.polydisc_sup, std::abs(eval_phi(res, z)));
    }
    rep.norm_bound_ok = rep.polydisc_sup <= res.norm_bound * (1.0 + 1e-6);

    for (int i = 0; i < res.sample.size(); ++i) {
        const Complex got =
            res.norm_bound * transfer_eval_scalar(res.psi, res.sample.delta_vals[i]);
        rep.interp_error = std::max(rep.interp_error, std::abs(got - res.sample_f[i]));
    }
    return rep;
}

}  // namespace polyfun
