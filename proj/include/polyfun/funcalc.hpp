#pragma once

#include <vector>

#include "polyfun/realization.hpp"
#include "polyfun/tuples.hpp"

namespace polyfun {

/// S_P = sum_l S^l ⊗ P^l on C^k ⊗ C^n for the grading block_dims.
CMatrix build_sp(const std::vector<CMatrix>& s, const std::vector<int>& block_dims);

struct PrecondReport {
    bool ok = false;
    std::vector<RadiusBracket> radii;
};

/// Certifies ρ(S^l) < 1 for every component (norm bound first, then powered
/// radius certificates); radii carry the Gelfand estimates.
PrecondReport fc_precondition(const std::vector<CMatrix>& s);

enum class CalcMethod { Direct, Neumann };

struct CalcOptions {
    CalcMethod method = CalcMethod::Direct;
    int max_terms = 100000;
    double tol = 1e-12;
};

/// f(T) = a I + R_beta^* S_P (I - (I ⊗ D) S_P)^{-1} R_gamma for S = delta(T).
/// Direct solves densely; Neumann sums the series until the term norm drops
/// below tol * (1 - rho_est).
CMatrix fc_eval(const Realization& r, const std::vector<CMatrix>& s,
                const CalcOptions& opts = {});

/// Similarity A with every ‖A^{-1} S^l A‖ < 1, built from the Gram matrix of
/// monomial images of degree < N in each variable.
struct RenormResult {
    CMatrix a;
    CMatrix a_inv;
    std::vector<double> renormed_norms;
    double condition = 1.0;
    int degree = 1;  // the N actually used
};

RenormResult rota_renorm(const std::vector<CMatrix>& s, int degree_cap = 256);

/// Max relative deviation between the resolvent-formula value of f(T) and the
/// eigenvalue route K diag(F(delta(lambda_j))) K^{-1}, for generic T.
double fc_agreement(const Realization& r, const GenericTuple& t, const PolyMap& delta,
                    CalcMethod method = CalcMethod::Direct);

}  // namespace polyfun
