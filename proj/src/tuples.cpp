#include "polyfun/tuples.hpp"

#include <algorithm>
#include <cmath>

namespace polyfun {

namespace {

double sup_dist(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double d = 0.0;
    for (size_t r = 0; r < a.size(); ++r) d = std::max(d, std::abs(a[r] - b[r]));
    return d;
}

CMatrix diag_from(const std::vector<Complex>& v) {
    CMatrix m(static_cast<int>(v.size()), static_cast<int>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = v[i];
    return m;
}

}  // namespace

GenericTuple make_generic(const std::vector<std::vector<Complex>>& lambda,
                          const CMatrix& k) {
    const int n = static_cast<int>(lambda.size());
    if (n == 0) throw validation_error("make_generic: no eigenvalues");
    const int d = static_cast<int>(lambda.front().size());
    if (d == 0) throw validation_error("make_generic: zero-dimensional points");
    for (const auto& p : lambda)
        if (static_cast<int>(p.size()) != d)
            throw validation_error("make_generic: inconsistent point dimensions");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (sup_dist(lambda[i], lambda[j]) <= 1e-10)
                throw validation_error("make_generic: joint eigenvalues not distinct");
    if (k.rows() != n || k.cols() != n)
        throw validation_error("make_generic: K must be N x N");

    GenericTuple t;
    t.lambda = lambda;
    t.k = k;
    t.k_inv = inverse(k);  // throws when K is singular
    t.t.reserve(d);
    for (int r = 0; r < d; ++r) {
        std::vector<Complex> ev(n);
        for (int j = 0; j < n; ++j) ev[j] = lambda[j][r];
        t.t.push_back(k * diag_from(ev) * t.k_inv);
    }
    check_commuting(t.as_commuting(), 1e-9);
    return t;
}

CMatrix eigen_calculus(const GenericTuple& t, const std::vector<Complex>& fvals) {
    if (static_cast<int>(fvals.size()) != t.order())
        throw validation_error("eigen_calculus: value count != N");
    return t.k * diag_from(fvals) * t.k_inv;
}

MembershipReport in_fdel(const PolyMap& delta, const GenericTuple& t, double tol) {
    if (t.dim() != delta.dim())
        throw validation_error("in_fdel: dimension mismatch");
    MembershipReport rep;
    rep.spectrum_in_gdel = true;
    for (const auto& p : t.lambda) {
        const PointClass pc = classify_point(delta, p, 0.0);
        if (!(pc.value < 1.0)) rep.spectrum_in_gdel = false;
    }
    const int m = delta.components();
    rep.margins.resize(m);
    bool all = true;
    for (int l = 0; l < m; ++l) {
        std::vector<Complex> vals(t.order());
        for (int j = 0; j < t.order(); ++j) vals[j] = delta.eval_component(l, t.lambda[j]);
        rep.margins[l] = 1.0 - op_norm(eigen_calculus(t, vals));
        if (rep.margins[l] < -tol) all = false;
    }
    rep.member = rep.spectrum_in_gdel && all;
    return rep;
}

GenericTuple two_point_tuple(const std::vector<Complex>& lambda1,
                             const std::vector<Complex>& lambda2, double theta) {
    if (lambda1.size() != lambda2.size())
        throw validation_error("two_point_tuple: dimension mismatch");
    if (sup_dist(lambda1, lambda2) <= 1e-10)
        throw validation_error("two_point_tuple: points must be distinct");
    if (!(theta > 0.0 && theta <= 1.5707963267948966 + 1e-12))
        throw validation_error("two_point_tuple: theta outside (0, pi/2]");
    CMatrix k(2, 2);
    k(0, 0) = 1.0;
    k(0, 1) = std::cos(theta);
    k(1, 1) = std::sin(theta);
    return make_generic({lambda1, lambda2}, k);
}

namespace {

struct SearchState {
    std::vector<int> subset;
    CMatrix k;
    double value;
};

CMatrix normalize_columns(CMatrix k) {
    for (int j = 0; j < k.cols(); ++j) {
        double s = 0.0;
        for (int i = 0; i < k.rows(); ++i) s += std::norm(k(i, j));
        s = std::sqrt(s);
        if (s < 1e-300) return k;  // caller will reject a singular candidate
        for (int i = 0; i < k.rows(); ++i) k(i, j) /= s;
    }
    return k;
}

// Builds the tuple, checks membership, returns ‖f(T)‖ or nullopt.
std::optional<double> member_value(const PolyMap& delta, const FiniteSample& e,
                                   const std::vector<Complex>& fvals,
                                   const std::vector<int>& subset, const CMatrix& k) {
    std::vector<std::vector<Complex>> pts;
    std::vector<Complex> fsub;
    pts.reserve(subset.size());
    for (int idx : subset) {
        pts.push_back(e.points[idx]);
        fsub.push_back(fvals[idx]);
    }
    GenericTuple t;
    try {
        t = make_generic(pts, k);
    } catch (const std::exception&) {
        return std::nullopt;
    }
    const MembershipReport rep = in_fdel(delta, t, 1e-12);
    if (!rep.member) return std::nullopt;
    return op_norm(eigen_calculus(t, fsub));
}

}  // namespace

double search_lower_bound(const PolyMap& delta, const FiniteSample& e,
                          const std::vector<Complex>& fvals, int n_max, int iters,
                          std::uint64_t seed) {
    const int n = e.size();
    if (static_cast<int>(fvals.size()) != n)
        throw validation_error("search_lower_bound: value count != |E|");
    if (n_max < 1) throw validation_error("search_lower_bound: n_max must be positive");

    double best = 0.0;
    for (const Complex& f : fvals) best = std::max(best, std::abs(f));
    if (n < 2 || n_max < 2 || iters <= 0) return best;

    SeededRng rng(seed);
    std::optional<SearchState> incumbent;

    for (int it = 0; it < iters; ++it) {
        // Annealed perturbation scale with periodic restarts. The schedule
        // depends on the iteration index only, so a longer run extends a
        // shorter one and the best value is monotone in iters.
        const double frac = static_cast<double>(it % 600) / 600.0;
        const double sigma = 1.2 * std::pow(0.02, frac);

        const bool refine = incumbent.has_value() && (it % 2 == 1);
        std::vector<int> subset;
        CMatrix cand;

        if (refine) {
            subset = incumbent->subset;
            cand = incumbent->k;
            const int s = static_cast<int>(subset.size());
            const int i = static_cast<int>(rng.next_u64() % s);
            const int j = static_cast<int>(rng.next_u64() % s);
            cand(i, j) += Complex(rng.uniform(-sigma, sigma), rng.uniform(-sigma, sigma));
            cand = normalize_columns(cand);
        } else {
            const int smax = std::min(n_max, n);
            const int s = 2 + static_cast<int>(rng.next_u64() % (smax - 1));
            std::vector<int> pool(n);
            for (int i = 0; i < n; ++i) pool[i] = i;
            for (int i = 0; i < s; ++i) {
                const int j = i + static_cast<int>(rng.next_u64() % (n - i));
                std::swap(pool[i], pool[j]);
            }
            subset.assign(pool.begin(), pool.begin() + s);
            std::sort(subset.begin(), subset.end());
            cand = CMatrix::identity(s);
            for (int i = 0; i < s; ++i)
                for (int j = 0; j < s; ++j)
                    cand(i, j) += Complex(rng.uniform(-sigma, sigma), rng.uniform(-sigma, sigma));
            cand = normalize_columns(cand);
        }

        const std::optional<double> val = member_value(delta, e, fvals, subset, cand);
        if (!val) continue;
        if (*val > best) best = *val;
        if (!incumbent || *val > incumbent->value)
            incumbent = SearchState{subset, cand, *val};
    }
    return best;
}

BlaschkeIdempotent blaschke_idempotent(const std::vector<std::vector<Complex>>& lambda,
                                       int j) {
    const int n = static_cast<int>(lambda.size());
    if (n == 0) throw validation_error("blaschke_idempotent: empty point set");
    if (j < 0 || j >= n) throw validation_error("blaschke_idempotent: index out of range");
    const int m = static_cast<int>(lambda.front().size());
    for (const auto& p : lambda) {
        if (static_cast<int>(p.size()) != m)
            throw validation_error("blaschke_idempotent: inconsistent dimensions");
        for (const Complex& z : p)
            if (!(std::abs(z) < 1.0))
                throw validation_error("blaschke_idempotent: points must lie in the open polydisc");
    }

    BlaschkeIdempotent g;
    g.j = j;
    for (int i = 0; i < n; ++i) {
        if (i == j) continue;
        int best_r = -1;
        double best_sep = 0.0;
        for (int r = 0; r < m; ++r) {
            const double sep = std::abs(lambda[j][r] - lambda[i][r]);
            if (sep > best_sep + 1e-15) {
                best_sep = sep;
                best_r = r;
            }
        }
        if (best_r < 0 || best_sep <= 1e-14)
            throw validation_error(
                "blaschke_idempotent: two points agree in every coordinate");
        g.factors.push_back({best_r, lambda[i][best_r]});
    }

    Complex h_at_j = 1.0;
    for (const auto& f : g.factors) {
        const Complex w = lambda[j][f.coordinate];
        h_at_j *= (w - f.center) / (1.0 - std::conj(f.center) * w);
    }
    g.normalizer = 1.0 / h_at_j;
    g.bound = std::abs(g.normalizer);

    for (int i = 0; i < n; ++i) {
        const Complex v = eval_blaschke(g, lambda[i]);
        const Complex want = (i == j) ? 1.0 : 0.0;
        if (std::abs(v - want) > 1e-10)
            throw numeric_error("blaschke_idempotent: interpolation check failed");
    }
    return g;
}

Complex eval_blaschke(const BlaschkeIdempotent& g, const std::vector<Complex>& w) {
    Complex h = 1.0;
    for (const auto& f : g.factors) {
        const Complex z = w[f.coordinate];
        h *= (z - f.center) / (1.0 - std::conj(f.center) * z);
    }
    return g.normalizer * h;
}

InjectivityReport injectivity_diagnostic(const PolyMap& delta, const FiniteSample& e) {
    InjectivityReport rep;
    const int n = e.size();
    for (int i = 0; i < n && rep.injective; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (sup_dist(e.delta_vals[i], e.delta_vals[j]) <= 1e-8) {
                rep.injective = false;
                rep.collide_i = i;
                rep.collide_j = j;
                break;
            }
        }
    if (rep.injective) return rep;

    // Members whose norm blows up: the colliding pair's eigenvectors close
    // to angle theta, everything else orthonormal.
    std::vector<int> order{rep.collide_i, rep.collide_j};
    for (int i = 0; i < n; ++i)
        if (i != rep.collide_i && i != rep.collide_j) order.push_back(i);

    std::vector<std::vector<Complex>> pts;
    for (int idx : order) pts.push_back(e.points[idx]);

    for (double theta : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}) {
        CMatrix k = CMatrix::identity(n);
        // column 0 at angle theta to column 1
        k(0, 0) = std::sin(theta);
        k(1, 0) = std::cos(theta);
        GenericTuple t;
        try {
            t = make_generic(pts, k);
        } catch (const std::exception&) {
            continue;
        }
        double mx = 0.0;
        for (const CMatrix& m : t.t) mx = std::max(mx, op_norm(m));
        const MembershipReport mem = in_fdel(delta, t, 1e-9);
        rep.family.push_back({theta, mx, mem.member});
    }
    return rep;
}

}  // namespace polyfun
