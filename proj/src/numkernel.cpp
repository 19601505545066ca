#include "polyfun/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace polyfun {

namespace {

void require_same_shape(const CMatrix& a, const CMatrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw validation_error(std::string(op) + ": shape mismatch");
}

void require_square(const CMatrix& a, const char* op) {
    if (a.rows() != a.cols() || a.rows() == 0)
        throw validation_error(std::string(op) + ": square matrix required");
}

}  // namespace


std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

CMatrix CMatrix::identity(int n) {
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::adjoint() const {
    CMatrix m(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

double CMatrix::max_abs() const {
    double mx = 0.0;
    for (const Complex& z : a_) mx = std::max(mx, std::abs(z));
    return mx;
}

double CMatrix::frobenius() const {
    double s = 0.0;
    for (const Complex& z : a_) s += std::norm(z);
    return std::sqrt(s);
}

bool CMatrix::is_finite() const {
    for (const Complex& z : a_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

CMatrix operator+(const CMatrix& a, const CMatrix& b) {
    require_same_shape(a, b, "operator+");
    CMatrix c = a;
    for (size_t k = 0; k < c.data().size(); ++k) c.data()[k] += b.data()[k];
    return c;
}

CMatrix operator-(const CMatrix& a, const CMatrix& b) {
    require_same_shape(a, b, "operator-");
    CMatrix c = a;
    for (size_t k = 0; k < c.data().size(); ++k) c.data()[k] -= b.data()[k];
    return c;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) throw validation_error("operator*: inner dimension mismatch");
    CMatrix c(a.rows(), b.cols());
    const int n = a.rows(), k = a.cols(), m = b.cols();
    for (int i = 0; i < n; ++i) {
        for (int p = 0; p < k; ++p) {
            const Complex aip = a(i, p);
            if (aip == Complex(0.0)) continue;
            for (int j = 0; j < m; ++j) c(i, j) += aip * b(p, j);
        }
    }
    return c;
}

CMatrix operator*(Complex s, const CMatrix& a) {
    CMatrix c = a;
    for (Complex& z : c.data()) z *= s;
    return c;
}

CMatrix operator*(double s, const CMatrix& a) { return Complex(s) * a; }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            const Complex aij = a(i, j);
            if (aij == Complex(0.0)) continue;
            for (int p = 0; p < b.rows(); ++p)
                for (int q = 0; q < b.cols(); ++q)
                    c(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
        }
    return c;
}

CMatrix solve(const CMatrix& a, const CMatrix& b) {
    require_square(a, "solve");
    if (a.rows() != b.rows()) throw validation_error("solve: rhs row count mismatch");
    const int n = a.rows(), m = b.cols();
    CMatrix lu = a;
    CMatrix x = b;
    std::vector<int> piv(n);
    std::iota(piv.begin(), piv.end(), 0);

    const double scale = std::max(lu.max_abs(), 1e-300);
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::abs(lu(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::abs(lu(i, k));
            if (v > best) { best = v; p = i; }
        }
        if (best <= 1e-14 * scale * n)
            throw numeric_error("solve: matrix singular to working precision");
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(lu(k, j), lu(p, j));
            for (int j = 0; j < m; ++j) std::swap(x(k, j), x(p, j));
        }
        const Complex pivot = lu(k, k);
        for (int i = k + 1; i < n; ++i) {
            const Complex f = lu(i, k) / pivot;
            if (f == Complex(0.0)) continue;
            lu(i, k) = f;
            for (int j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
            for (int j = 0; j < m; ++j) x(i, j) -= f * x(k, j);
        }
    }
    for (int k = n - 1; k >= 0; --k) {
        for (int j = 0; j < m; ++j) {
            Complex s = x(k, j);
            for (int i = k + 1; i < n; ++i) s -= lu(k, i) * x(i, j);
            x(k, j) = s / lu(k, k);
        }
    }
    return x;
}

CMatrix inverse(const CMatrix& a) { return solve(a, CMatrix::identity(a.rows())); }

HermEigResult herm_eig(const CMatrix& h_in, double herm_tol) {
    require_square(h_in, "herm_eig");
    if (!h_in.is_finite()) throw validation_error("herm_eig: non-finite entries");
    const int n = h_in.rows();

    const CMatrix hadj = h_in.adjoint();
    const double asym = (h_in - hadj).max_abs();
    const double hscale = std::max(h_in.max_abs(), 1e-300);
    if (asym > herm_tol * hscale)
        throw validation_error("herm_eig: input not Hermitian within tolerance");

    // Symmetrize so drift from the input asymmetry cannot accumulate.
    CMatrix h = 0.5 * (h_in + hadj);
    CMatrix v = CMatrix::identity(n);

    const double fro = std::max(h.frobenius(), 1e-300);
    const double stop = 1e-14 * fro;
    const int max_sweeps = 100;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += 2.0 * std::norm(h(p, q));
        off = std::sqrt(off);
        if (off <= stop) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const Complex hpq = h(p, q);
                const double habs = std::abs(hpq);
                if (habs <= 1e-300 || habs <= 1e-18 * fro) continue;

                const double app = h(p, p).real();
                const double aqq = h(q, q).real();
                const Complex phase = hpq / habs;

                // tan of the rotation angle: the smaller-magnitude root of
                // t^2 - 2 tau t - 1 = 0.
                const double tau = (app - aqq) / (2.0 * habs);
                double t;
                if (std::abs(tau) > 1e153) {
                    t = -1.0 / (2.0 * tau);
                } else {
                    t = (tau >= 0.0 ? -1.0 : 1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const Complex spe = s * phase;        // G(p,q) entry
                const Complex spe_c = std::conj(spe);

                // H <- G* H G, columns then rows.
                for (int k = 0; k < n; ++k) {
                    const Complex hkp = h(k, p), hkq = h(k, q);
                    h(k, p) = c * hkp - spe_c * hkq;
                    h(k, q) = spe * hkp + c * hkq;
                }
                for (int k = 0; k < n; ++k) {
                    const Complex hpk = h(p, k), hqk = h(q, k);
                    h(p, k) = c * hpk - spe * hqk;
                    h(q, k) = spe_c * hpk + c * hqk;
                }
                h(p, q) = 0.0;
                h(q, p) = 0.0;
                h(p, p) = Complex(h(p, p).real(), 0.0);
                h(q, q) = Complex(h(q, q).real(), 0.0);

                for (int k = 0; k < n; ++k) {
                    const Complex vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - spe_c * vkq;
                    v(k, q) = spe * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return h(i, i).real() < h(j, j).real(); });

    HermEigResult r;
    r.eigenvalues.resize(n);
    r.basis = CMatrix(n, n);
    for (int j = 0; j < n; ++j) {
        r.eigenvalues[j] = h(order[j], order[j]).real();
        for (int i = 0; i < n; ++i) r.basis(i, j) = v(i, order[j]);
    }
    return r;
}

double op_norm(const CMatrix& m) {
    if (m.empty()) throw validation_error("op_norm: empty matrix");
    if (!m.is_finite()) throw validation_error("op_norm: non-finite entries");
    const double mx = m.max_abs();
    if (mx == 0.0) return 0.0;
    const CMatrix b = (1.0 / mx) * m;
    const HermEigResult e = herm_eig(b.adjoint() * b, 1e-10);
    const double top = std::max(0.0, e.eigenvalues.back());
    return mx * std::sqrt(top);
}

std::vector<std::vector<Complex>> gram_factor(const CMatrix& a, double tol) {
    require_square(a, "gram_factor");
    const int n = a.rows();
    double trace = 0.0;
    for (int i = 0; i < n; ++i) trace += a(i, i).real();
    if (tol < 0.0) tol = 1e-9 * std::max(trace, 1e-30);

    const HermEigResult e = herm_eig(a);
    if (e.eigenvalues.front() < -tol)
        throw numeric_error("gram_factor: matrix not PSD (eigenvalue " +
                            sci(e.eigenvalues.front()) + " < -tol)");

    std::vector<int> kept;
    for (int k = 0; k < n; ++k)
        if (e.eigenvalues[k] > tol) kept.push_back(k);

    // u_j[r] = sqrt(w_k) * conj(U(j,k)) reproduces <u_j, u_i> = a(i,j).
    std::vector<std::vector<Complex>> u(n, std::vector<Complex>(kept.size()));
    for (size_t r = 0; r < kept.size(); ++r) {
        const double w = std::sqrt(e.eigenvalues[kept[r]]);
        for (int j = 0; j < n; ++j) u[j][r] = w * std::conj(e.basis(j, kept[r]));
    }
    return u;
}

namespace {

// log ‖m^(2^j)‖ for j = 0..j_max via rescaled repeated squaring.
// Returns the sequence of logs; stops early (and truncates) at an exactly
// nilpotent power.
std::vector<double> log_power_norms(const CMatrix& m, int j_max) {
    std::vector<double> logs;
    const double s0 = op_norm(m);
    if (s0 == 0.0) return logs;  // zero matrix
    logs.push_back(std::log(s0));
    CMatrix b = (1.0 / s0) * m;
    for (int j = 1; j <= j_max; ++j) {
        CMatrix sq = b * b;
        const double s = op_norm(sq);
        if (s == 0.0) return logs;  // nilpotent: every later power vanishes
        logs.push_back(2.0 * logs.back() + std::log(s));
        b = (1.0 / s) * sq;
    }
    return logs;
}

}  // namespace

RadiusBracket spectral_radius(const CMatrix& m, double tol) {
    require_square(m, "spectral_radius");
    if (!m.is_finite()) throw validation_error("spectral_radius: non-finite entries");

    const std::vector<double> logs = log_power_norms(m, 7);  // up to k = 128
    RadiusBracket r;
    if (logs.size() < 8) {  // some power vanished: nilpotent, radius is exactly 0
        r.estimate = r.lower = r.upper = 0.0;
        return r;
    }
    const double l32 = logs[5], l64 = logs[6], l128 = logs[7];
    // On the lattice {k, 2k, 4k} the combination (L_4k - 2 L_2k + L_k)/k
    // recovers log rho exactly for ‖m^k‖ = C k^p rho^k growth.
    const double rho_est = std::exp((l128 - 2.0 * l64 + l32) / 32.0);
    const double rho_128 = std::exp(l128 / 128.0);
    r.estimate = std::min(rho_est, rho_128);
    r.lower = std::max(0.0, r.estimate * (1.0 - tol));
    r.upper = rho_128;
    return r;
}

RadiusCertificate certify_radius_below(const CMatrix& m, double bound, int max_log2) {
    require_square(m, "certify_radius_below");
    if (!m.is_finite()) throw validation_error("certify_radius_below: non-finite entries");

    RadiusCertificate cert;
    const double s0 = op_norm(m);
    if (s0 < bound) return {true, s0, s0};

    std::vector<double> logs{std::log(s0)};
    CMatrix b = (1.0 / s0) * m;
    double best_upper = s0;
    double estimate = s0;
    for (int j = 1; j <= max_log2; ++j) {
        CMatrix sq = b * b;
        const double s = op_norm(sq);
        if (s == 0.0) return {true, 0.0, 0.0};
        logs.push_back(2.0 * logs.back() + std::log(s));
        b = (1.0 / s) * sq;

        const double k = std::pow(2.0, j);
        const double rho_k = std::exp(logs.back() / k);
        best_upper = std::min(best_upper, rho_k);
        if (logs.size() >= 3) {
            const double kq = std::pow(2.0, j - 2);
            estimate = std::exp((logs[j] - 2.0 * logs[j - 1] + logs[j - 2]) / kq);
        }
        if (rho_k < bound) return {true, rho_k, std::min(estimate, rho_k)};
        // Deep in the iteration a stable estimate above the bound means the
        // radius genuinely exceeds it; stop powering.
        if (j >= 7 && estimate > bound * (1.0 + 1e-3) && rho_k > bound * (1.0 + 1e-3) &&
            std::abs(estimate - rho_k) < 0.05 * rho_k)
            break;
    }
    cert.certified = false;
    cert.upper = best_upper;
    cert.estimate = std::min(estimate, best_upper);
    return cert;
}

}  // namespace polyfun
