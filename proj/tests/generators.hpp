// Seeded generators and independent oracles shared by the unit and
// acceptance suites. Everything here is test-side only.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "polyfun/pickcone.hpp"
#include "polyfun/tuples.hpp"

namespace testgen {

using polyfun::Box;
using polyfun::CMatrix;
using polyfun::Complex;
using polyfun::FiniteSample;
using polyfun::PickInstance;
using polyfun::PolyMap;
using polyfun::PolyTerm;
using polyfun::SeededRng;

inline Complex rand_complex(SeededRng& rng, double radius) {
    const double r = radius * std::sqrt(rng.uniform());
    const double a = rng.uniform(0.0, 6.283185307179586);
    return Complex(r * std::cos(a), r * std::sin(a));
}

inline CMatrix rand_matrix(SeededRng& rng, int rows, int cols, double radius = 1.0) {
    CMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rand_complex(rng, radius);
    return m;
}

// Orthonormalizes the columns of a random square matrix.
inline CMatrix rand_unitary(SeededRng& rng, int n) {
    CMatrix m = rand_matrix(rng, n, n);
    for (int j = 0; j < n; ++j) {
        for (int pass = 0; pass < 2; ++pass)
            for (int p = 0; p < j; ++p) {
                Complex proj = 0.0;
                for (int i = 0; i < n; ++i) proj += std::conj(m(i, p)) * m(i, j);
                for (int i = 0; i < n; ++i) m(i, j) -= proj * m(i, p);
            }
        double nn = 0.0;
        for (int i = 0; i < n; ++i) nn += std::norm(m(i, j));
        nn = std::sqrt(nn);
        if (nn < 1e-8) {  // retry the column from fresh noise
            for (int i = 0; i < n; ++i) m(i, j) = rand_complex(rng, 1.0);
            --j;
            continue;
        }
        for (int i = 0; i < n; ++i) m(i, j) /= nn;
    }
    return m;
}

// A random polynomial tuple with a linear anchor per component plus a
// quadratic perturbation; coefficients stay modest so G_delta has volume.
inline PolyMap rand_polymap(SeededRng& rng, int d, int m) {
    std::vector<PolyTerm> terms;
    for (int l = 0; l < m; ++l) {
        PolyTerm lin;
        lin.component = l;
        lin.coeff = rand_complex(rng, 0.6) + Complex(0.4, 0.0);
        lin.exponents.assign(d, 0);
        lin.exponents[static_cast<int>(rng.next_u64() % d)] = 1;
        terms.push_back(lin);

        PolyTerm quad;
        quad.component = l;
        quad.coeff = rand_complex(rng, 0.3);
        quad.exponents.assign(d, 0);
        quad.exponents[static_cast<int>(rng.next_u64() % d)] += 1;
        quad.exponents[static_cast<int>(rng.next_u64() % d)] += 1;
        terms.push_back(quad);
    }
    return PolyMap(d, m, std::move(terms));
}

inline Box unit_box(int d, double radius = 1.0) {
    Box b;
    b.center.assign(d, Complex(0.0, 0.0));
    b.radius.assign(d, radius);
    return b;
}

// A pick instance whose points are rejection-sampled from G_delta and whose
// delta-images are pairwise separated (keeps two-point norms finite).
inline PickInstance rand_instance(SeededRng& rng, const PolyMap& delta, int n,
                                  double fmax = 2.0, double min_image_sep = 5e-2) {
    const int d = delta.dim();
    PickInstance inst;
    int guard = 0;
    while (inst.size() < n) {
        if (++guard > 200000) throw std::runtime_error("rand_instance: sampling stalled");
        std::vector<Complex> p(d);
        for (int r = 0; r < d; ++r) p[r] = rand_complex(rng, 1.0);
        const std::vector<Complex> vals = delta.eval_point(p);
        double mx = 0.0;
        for (const Complex& v : vals) mx = std::max(mx, std::abs(v));
        if (mx >= 0.95) continue;
        bool ok = true;
        for (const auto& row : inst.e.delta_vals) {
            double sep = 0.0;
            for (size_t l = 0; l < row.size(); ++l)
                sep = std::max(sep, std::abs(row[l] - vals[l]));
            if (sep < min_image_sep) { ok = false; break; }
        }
        if (!ok) continue;
        inst.e.points.push_back(p);
        inst.e.delta_vals.push_back(vals);
        inst.fvals.push_back(rand_complex(rng, fmax));
    }
    return inst;
}

// Closed-form two-point norm: the quadratic in u = c^2 solved directly.
// Independent of the bisection route in the library.
inline double two_point_norm_oracle(const std::vector<Complex>& d1,
                                    const std::vector<Complex>& d2, Complex f1,
                                    Complex f2) {
    double cap = 0.0;
    for (size_t l = 0; l < d1.size(); ++l)
        cap = std::max(cap, std::abs(d2[l] - d1[l]) / std::abs(1.0 - std::conj(d1[l]) * d2[l]));
    const double c0 = std::max(std::abs(f1), std::abs(f2));
    if (std::abs(f1 - f2) == 0.0) return c0;
    if (cap == 0.0) return std::numeric_limits<double>::infinity();
    const Complex w = std::conj(f1) * f2;
    const double dd = cap * cap;
    const double delta2 = std::norm(f2 - f1);
    // dd*u^2 - (2 dd Re w + |Delta|^2) u + dd |w|^2 = 0
    const double bq = 2.0 * dd * w.real() + delta2;
    const double disc = std::max(0.0, bq * bq - 4.0 * dd * dd * std::norm(w));
    const double u = (bq + std::sqrt(disc)) / (2.0 * dd);
    return std::max(c0, std::sqrt(std::max(u, 0.0)));
}

// Wide image separation keeps the interpolation data well conditioned, so
// certificates translate into realizations without amplification.
inline PickInstance rand_certifiable_instance(SeededRng& rng, const PolyMap& delta, int n,
                                              double fmax = 1.5) {
    return rand_instance(rng, delta, n, fmax, 0.3);
}

// Commuting upper-triangular pair: polynomials in one random triangular
// matrix, each rescaled to the requested spectral radius.
inline std::vector<CMatrix> rand_commuting_triangular(SeededRng& rng, int k, int count,
                                                      double rho_max, double norm_scale) {
    CMatrix base(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j)
            base(i, j) = i == j ? rand_complex(rng, 1.0)
                                : norm_scale * rand_complex(rng, 1.0);
    std::vector<CMatrix> out;
    for (int c = 0; c < count; ++c) {
        const Complex a1 = rand_complex(rng, 1.0) + Complex(0.5, 0);
        const Complex a2 = rand_complex(rng, 0.5);
        CMatrix s = a1 * base + a2 * (base * base);
        double rho = 0.0;  // triangular: the diagonal is the spectrum
        for (int i = 0; i < k; ++i) rho = std::max(rho, std::abs(s(i, i)));
        const double target = rho_max * (0.3 + 0.7 * rng.uniform());
        if (rho > 1e-12) s = (target / rho) * s;
        out.push_back(s);
    }
    return out;
}

}  // namespace testgen
