#pragma once

#include <optional>
#include <vector>

#include "polyfun/polymap.hpp"

namespace polyfun {

/// Interpolation data on a finite sample: target values fvals on E, with the
/// delta-values carried by the sample. All |delta_l(lambda_i)| must be < 1.
struct PickInstance {
    FiniteSample e;
    std::vector<Complex> fvals;

    int size() const { return e.size(); }
    int components() const {
        return e.delta_vals.empty() ? 0 : static_cast<int>(e.delta_vals.front().size());
    }

    void validate() const;
    PickInstance scaled(double c) const;  // fvals divided by c
};

/// PSD matrices A_1..A_m witnessing the cone decomposition
/// 1 - conj(f_j) f_i = sum_l (1 - conj(delta_l(lambda_j)) delta_l(lambda_i)) A_l[i,j].
struct AglerCertificate {
    std::vector<CMatrix> a;
    double residual = 0.0;
};

/// Entrywise residual of the decomposition for the given scaled data.
double certificate_residual(const PickInstance& inst, double c,
                            const std::vector<CMatrix>& a);

struct FeasibilityOutcome {
    enum class Status { Feasible, Undetermined };
    Status status = Status::Undetermined;
    std::optional<AglerCertificate> certificate;
    double residual = 0.0;
    int iterations = 0;
};

struct ConeOptions {
    double feas_tol = 1e-8;
    int max_iter = 50000;
    // Cadence of the extrapolation jumps; also sets the first no-progress
    // checkpoint (at 5x this many iterations, doubling afterwards).
    int stall_window = 200;
    const std::vector<CMatrix>* warm_start = nullptr;
};

/// Feasibility of the cone decomposition for data f/c, by Douglas-Rachford
/// splitting between the affine decomposition constraints and the product of
/// PSD cones (entrywise affine projection; PSD projection by eigenvalue
/// clipping). Cannot certify infeasibility; a stalled run reports
/// Undetermined with its residual. warm_start (a certificate from a nearby
/// scale) makes continuation probes cheap.
FeasibilityOutcome cone_membership(const PickInstance& inst, double c,
                                   const ConeOptions& opts = {});

/// Least c >= max(|f1|,|f2|) making the pair (f1/c, f2/c) pseudometrically
/// dominated by the delta data, by monotone bisection. Returns +infinity when
/// the delta rows coincide but f1 != f2.
double two_point_norm(const std::vector<Complex>& delta_row1,
                      const std::vector<Complex>& delta_row2, Complex f1, Complex f2);

/// Caratheodory pseudometric |(a2-a1)/(1-conj(a1) a2)| on the unit disc.
double pseudometric(Complex a1, Complex a2);

struct DeltaNormResult {
    double lower = 0.0;  // rigorous: sup norm and pairwise two-point norms
    double upper = 0.0;  // certified: a certificate at this scale is in hand
    AglerCertificate certificate;  // valid at upper
    int probes = 0;
    int total_iterations = 0;
};

/// Bisection on the scale c: lower seeded by the sup norm and all pairwise
/// two-point norms, upper doubled until feasible, contracted until
/// upper <= lower (1 + tol), then polished along the feasibility frontier
/// with warm starts.
DeltaNormResult delta_norm(const PickInstance& inst, double tol = 1e-6,
                           const ConeOptions& opts = {});

}  // namespace polyfun
