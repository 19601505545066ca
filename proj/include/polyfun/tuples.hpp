#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "polyfun/polymap.hpp"

namespace polyfun {

/// A commuting d-tuple with N distinct joint eigenvalues and an invertible
/// joint eigenvector matrix K (eigenvectors as columns):
/// T^r = K diag(lambda_j^r) K^{-1}.
struct GenericTuple {
    std::vector<std::vector<Complex>> lambda;  // N points in C^d
    CMatrix k;
    CMatrix k_inv;
    std::vector<CMatrix> t;  // materialized T^1..T^d

    int order() const { return static_cast<int>(lambda.size()); }
    int dim() const { return lambda.empty() ? 0 : static_cast<int>(lambda.front().size()); }

    CommutingTuple as_commuting() const { return CommutingTuple{t}; }
};

GenericTuple make_generic(const std::vector<std::vector<Complex>>& lambda,
                          const CMatrix& k);

/// f(T) = K diag(fvals) K^{-1}; fvals indexed like lambda.
CMatrix eigen_calculus(const GenericTuple& t, const std::vector<Complex>& fvals);

struct MembershipReport {
    bool member = false;
    bool spectrum_in_gdel = false;
    std::vector<double> margins;  // 1 - ‖delta_l(T)‖ per component
};

/// Membership of T in the delta-ball class: spectrum inside G_delta and
/// every ‖delta_l(T)‖ <= 1 + tol.
MembershipReport in_fdel(const PolyMap& delta, const GenericTuple& t, double tol = 1e-10);

/// N = 2 tuple with eigenvector columns (1,0) and (cos theta, sin theta).
GenericTuple two_point_tuple(const std::vector<Complex>& lambda1,
                             const std::vector<Complex>& lambda2, double theta);

/// Seeded stochastic maximization of ‖f(T)‖ over members with spectrum in a
/// subset of E of size <= n_max. Returns the best value found; never less
/// than max |f| over E (diagonal tuples are always members).
double search_lower_bound(const PolyMap& delta, const FiniteSample& e,
                          const std::vector<Complex>& fvals, int n_max, int iters,
                          std::uint64_t seed);

/// Product of one-coordinate Moebius factors interpolating 1 at lambda_j and
/// 0 elsewhere, with the von Neumann bound 1/|h(lambda_j)|.
struct BlaschkeIdempotent {
    struct Factor {
        int coordinate;  // 0-based r_i
        Complex center;  // lambda_i^{r_i}
    };
    int j = 0;
    std::vector<Factor> factors;
    Complex normalizer;  // 1 / h(lambda_j)
    double bound = 1.0;  // 1 / |h(lambda_j)|
};

BlaschkeIdempotent blaschke_idempotent(const std::vector<std::vector<Complex>>& lambda,
                                       int j);

Complex eval_blaschke(const BlaschkeIdempotent& g, const std::vector<Complex>& w);

/// Injectivity of delta on E; when it fails, a family of members T(theta)
/// with unbounded norms as theta -> 0 demonstrates the blow-up.
struct InjectivityReport {
    bool injective = true;
    int collide_i = -1;
    int collide_j = -1;
    struct FamilyPoint {
        double theta;
        double max_norm;  // max_r ‖T(theta)^r‖
        bool member;
    };
    std::vector<FamilyPoint> family;
};

InjectivityReport injectivity_diagnostic(const PolyMap& delta, const FiniteSample& e);

}  // namespace polyfun
