#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "polyfun/funcalc.hpp"

namespace polyfun {

/// A single polynomial in d variables: exponent vector -> coefficient.
/// Unlike a PolyMap component it may be constant.
struct Polynomial {
    int d = 0;
    std::map<std::vector<int>, Complex> coeffs;

    Complex eval(const std::vector<Complex>& lambda) const;
    void prune(double tol);
};

Polynomial poly_add(const Polynomial& a, const Polynomial& b);
Polynomial poly_mul(const Polynomial& a, const Polynomial& b, double prune_tol = 0.0);
Polynomial poly_scale(Complex s, const Polynomial& a);
Polynomial poly_from_component(const PolyMap& p, int l);

struct OkaConfig {
    OkaConfig() {
        cone.max_iter = 1500;
        cone.stall_window = 100;
    }

    double t = 0.95;
    int sample_count = 40;
    int holdout_count = 200;
    std::uint64_t seed = 1;
    double tol = 1e-5;            // holdout acceptance threshold
    int grid_n = 21;              // augmentation grid nodes per real axis
    double safety = 0.9;          // augmentation safety factor
    double sample_margin = 0.02;  // rejection margin inside G_{t gamma}
    double norm_tol = 2e-2;       // scale bisection tolerance
    ConeOptions cone;             // sized for the large dense solves here
};

/// Output of the extension pipeline. Phi on the polydisc of gamma's length
/// is norm_bound * Psi(t z) where Psi is the stored unit-ball realization.
struct ExtensionResult {
    PolyMap gamma;
    double epsilon = 0.0;
    double t = 0.95;
    Realization psi;
    double norm_bound = 0.0;
    double norm_lower = 0.0;
    FiniteSample sample;               // delta_vals hold the t*gamma values
    std::vector<Complex> sample_f;
    double holdout_max_error = 0.0;
    std::uint64_t seed = 0;
    double tol = 0.0;
};

/// Phi at a point of the closed polydisc of dimension gamma.components().
Complex eval_phi(const ExtensionResult& res, const std::vector<Complex>& z);

/// Phi(gamma(lambda)), the extension evaluated back on C^d.
Complex eval_extension(const ExtensionResult& res, const std::vector<Complex>& lambda);

/// Augment, sample G_{t gamma}, certify the interpolation norm, and extract
/// the realization; the holdout reports how well Phi∘gamma reproduces f on
/// fresh points of G_delta. Throws when the holdout error exceeds config.tol.
ExtensionResult oka_extend(const PolyMap& delta, const Polynomial& f, const Box& box,
                           const OkaConfig& config = {});

/// Taylor partial sum of Phi up to total degree J, composed with gamma; a
/// polynomial on C^d approximating f near K_delta.
Polynomial oka_weil_approx(const ExtensionResult& res, int degree_j,
                           double prune_tol = 1e-14);

/// Sup of |p - f| over the grid points of the box lying in K_delta.
double kdel_grid_error(const PolyMap& delta, const Box& box, int grid_n,
                       const Polynomial& p, const Polynomial& f);

struct ExtensionReport {
    double fresh_holdout_error = 0.0;
    double polydisc_sup = 0.0;        // grid sup of |Phi|
    double interp_error = 0.0;        // on the stored sample
    bool norm_bound_ok = false;       // sup <= norm_bound * (1 + 1e-6)
};

ExtensionReport verify_extension(const ExtensionResult& res, const PolyMap& delta,
                                 const Polynomial& f, const Box& box,
                                 std::uint64_t fresh_seed);

}  // namespace polyfun
