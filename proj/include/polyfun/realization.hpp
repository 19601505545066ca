#pragma once

#include <cstdint>
#include <vector>

#include "polyfun/pickcone.hpp"

namespace polyfun {

/// Colligation (a, beta, gamma, D) over the graded space ⊕_l C^{n_l}.
/// The block matrix V = [[a, beta*],[gamma, D]] acts isometrically; the
/// transfer function is F(z) = a + <Z (I - D Z)^{-1} gamma, beta> with
/// Z = sum_l z_l P^l.
struct Realization {
    Complex a;
    std::vector<int> block_dims;  // length m, entries >= 0
    std::vector<Complex> beta;
    std::vector<Complex> gamma;
    CMatrix d;

    int state_dim() const { return d.rows(); }
    int components() const { return static_cast<int>(block_dims.size()); }

    /// The (1+n) x (1+n) colligation matrix.
    CMatrix colligation() const;

    void validate() const;
};

/// ‖V*V - I‖ for the assembled colligation.
double isometry_residual(const Realization& r);

/// Constructs the realization from a certificate for data already scaled to
/// the closed unit ball (the certificate must hold at c = 1). Gram-factors
/// each block, matches the two vector families by an isometry, and completes
/// it to a unitary deterministically.
Realization lurking_isometry(const PickInstance& scaled_inst, const AglerCertificate& cert);

/// F at a point of the closed polydisc.
Complex transfer_eval_scalar(const Realization& r, const std::vector<Complex>& z);

/// F at an m-tuple of commuting contractions on C^k:
/// a I + R_beta^* S_P (I - (I ⊗ D) S_P)^{-1} R_gamma, with S_P = sum S^l ⊗ P^l.
CMatrix transfer_eval_tuple(const Realization& r, const std::vector<CMatrix>& s);

/// End-to-end interpolant construction: delta_norm at norm_tol, the scale
/// relaxed by (1 + relax) to open slack, the certificate refined there to
/// near machine residual, then the lurking isometry. The relaxed scale stays
/// a certified upper bound for the norm.
struct CertifiedRealization {
    Realization realization;
    double scale = 1.0;       // data divided by this; certified upper bound
    double norm_lower = 0.0;  // rigorous lower bound from delta_norm
    AglerCertificate certificate;
};

CertifiedRealization realize_interpolant(const PickInstance& inst, double norm_tol = 1e-3,
                                         double relax = 1e-3,
                                         const ConeOptions& opts = {});

struct RealizationReport {
    double max_interp_error = 0.0;
    double isometry_residual = 0.0;
    double polydisc_sup_estimate = 0.0;
};

/// Recomputes the defining conditions; the polydisc sup is estimated on a
/// seeded sample of grid_points points.
RealizationReport verify_realization(const Realization& r, const PickInstance& scaled_inst,
                                     int grid_points = 10000, std::uint64_t seed = 1);

}  // namespace polyfun
