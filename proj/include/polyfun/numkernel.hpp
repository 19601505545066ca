#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace polyfun {

using Complex = std::complex<double>;

/// Malformed or out-of-contract input (bad shapes, non-finite data, ...).
class validation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computation could not certify its postcondition (singular solve,
/// non-PSD certificate, solver stalled, ...).
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scientific-notation formatting for diagnostics in error messages.
std::string sci(double v);

/// Dense complex matrix, row-major storage.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {
        if (rows < 0 || cols < 0)
            throw validation_error("CMatrix: negative dimension");
    }

    static CMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    Complex& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    const Complex& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

    std::vector<Complex>& data() { return a_; }
    const std::vector<Complex>& data() const { return a_; }

    CMatrix adjoint() const;

    double max_abs() const;
    double frobenius() const;
    bool is_finite() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Complex> a_;
};

CMatrix operator+(const CMatrix& a, const CMatrix& b);
CMatrix operator-(const CMatrix& a, const CMatrix& b);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator*(Complex s, const CMatrix& a);
CMatrix operator*(double s, const CMatrix& a);

/// Kronecker product, (i,j) block of a ⊗ b is a(i,j)·b.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Solves a·x = b by LU with partial pivoting. Throws numeric_error when a
/// is singular to working precision.
CMatrix solve(const CMatrix& a, const CMatrix& b);
CMatrix inverse(const CMatrix& a);

/// Full spectral decomposition of a Hermitian matrix.
/// eigenvalues ascending; basis unitary with h·basis = basis·diag(eigenvalues).
struct HermEigResult {
    std::vector<double> eigenvalues;
    CMatrix basis;
};

/// Cyclic complex Jacobi iteration. `herm_tol` bounds the accepted relative
/// deviation ‖h − h*‖/‖h‖ of the input from Hermitian symmetry.
HermEigResult herm_eig(const CMatrix& h, double herm_tol = 1e-8);

/// Largest singular value, computed as sqrt of the top eigenvalue of m*·m.
double op_norm(const CMatrix& m);

/// Factors a PSD matrix a into vectors u_1..u_N of common dimension
/// r = numerical rank, with <u_j, u_i> = a(i,j). The inner product is
/// linear in the first slot. tol < 0 selects the default cutoff,
/// 1e-9 relative to the trace. Eigenvalues below -tol throw.
std::vector<std::vector<Complex>> gram_factor(const CMatrix& a, double tol = -1.0);

/// Gelfand estimate of the spectral radius from ‖m^k‖^(1/k) on the dyadic
/// lattice k = 32, 64, 128, with the three-point extrapolation that removes
/// polynomial growth factors. upper = ‖m^128‖^(1/128) is a true bound.
struct RadiusBracket {
    double estimate = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

RadiusBracket spectral_radius(const CMatrix& m, double tol = 1e-6);

/// Tries to certify ρ(m) < bound by powering until some ‖m^k‖^(1/k) drops
/// below bound (a rigorous certificate), doubling k up to 2^max_log2.
/// Returns {certified, best upper bound seen, extrapolated estimate}.
struct RadiusCertificate {
    bool certified = false;
    double upper = 0.0;
    double estimate = 0.0;
};

RadiusCertificate certify_radius_below(const CMatrix& m, double bound,
                                       int max_log2 = 15);

}  // namespace polyfun
