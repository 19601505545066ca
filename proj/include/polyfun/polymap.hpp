#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "polyfun/numkernel.hpp"

namespace polyfun {

/// One monomial of one component: coeff * z^exponents in component `component`.
struct PolyTerm {
    int component = 0;  // 0-based index into the tuple
    Complex coeff;
    std::vector<int> exponents;  // length d, entries >= 0
};

/// An m-tuple of polynomials in d complex variables. Every component must be
/// non-constant.
class PolyMap {
public:
    PolyMap() = default;  // empty sentinel; any use before assignment throws
    PolyMap(int d, int m, std::vector<PolyTerm> terms);

    int dim() const { return d_; }
    int components() const { return m_; }
    const std::vector<PolyTerm>& terms() const { return terms_; }

    /// Exact evaluation of all components at a point of C^d.
    std::vector<Complex> eval_point(const std::vector<Complex>& lambda) const;

    /// Single-component evaluation.
    Complex eval_component(int l, const std::vector<Complex>& lambda) const;

    /// All coefficients multiplied by t.
    PolyMap scaled(double t) const;

    /// Keeps only the first m components.
    PolyMap truncated(int m) const;

private:
    int d_ = 0;
    int m_ = 0;
    std::vector<PolyTerm> terms_;
};

/// Axis-aligned product of squares in C^d: coordinate r ranges over the
/// square with the given center and half-width.
struct Box {
    std::vector<Complex> center;
    std::vector<double> radius;

    void validate(int d) const;
};

/// A d-tuple of pairwise commuting N x N matrices.
struct CommutingTuple {
    std::vector<CMatrix> t;  // size d

    int dim() const { return static_cast<int>(t.size()); }
    int order() const { return t.empty() ? 0 : t.front().rows(); }
};

/// Throws unless pairwise commutators are small:
/// ‖[T^r,T^s]‖ <= tol·(1 + ‖T^r‖‖T^s‖).
void check_commuting(const CommutingTuple& t, double tol = 1e-10);

/// delta_l(T) for every component, by substitution with memoized powers.
std::vector<CMatrix> eval_tuple(const PolyMap& delta, const CommutingTuple& t,
                                double commute_tol = 1e-10);

enum class Region { Interior, Boundary, Exterior };

struct PointClass {
    Region region;
    double value;  // max_l |delta_l(lambda)|
};

PointClass classify_point(const PolyMap& delta, const std::vector<Complex>& lambda,
                          double margin);

/// Ordered distinct points of G_delta with their delta-values.
struct FiniteSample {
    std::vector<std::vector<Complex>> points;     // N x d
    std::vector<std::vector<Complex>> delta_vals; // N x m

    int size() const { return static_cast<int>(points.size()); }
};

/// Seeded rejection sampling from the box; keeps points with
/// max_l |delta_l| < 1 - margin, pairwise separation > 1e-6.
FiniteSample sample_gdel(const PolyMap& delta, const Box& box, int count,
                         std::uint64_t seed, double margin);

/// Subordinate extension gamma = (delta_1..delta_m, eps*z^1..eps*z^d) with
/// eps = safety / R, R the grid maximum of max_r |lambda^r| over K_delta.
struct Augmentation {
    PolyMap gamma;
    double epsilon;
    double coordinate_bound;  // R
};

Augmentation augment(const PolyMap& delta, const Box& box, int grid_n, double safety);

/// mt19937_64 with a bit-stable double extraction, shared by every sampling
/// routine so that seeded runs reproduce exactly.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t next_u64() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

}  // namespace polyfun
