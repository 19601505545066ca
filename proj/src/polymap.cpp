#include "polyfun/polymap.hpp"

#include <algorithm>
#include <cmath>

namespace polyfun {

PolyMap::PolyMap(int d, int m, std::vector<PolyTerm> terms)
    : d_(d), m_(m), terms_(std::move(terms)) {
    if (d_ <= 0 || m_ <= 0) throw validation_error("PolyMap: d and m must be positive");
    std::vector<bool> nonconstant(m_, false);
    for (const PolyTerm& t : terms_) {
        if (t.component < 0 || t.component >= m_)
            throw validation_error("PolyMap: component index out of range");
        if (static_cast<int>(t.exponents.size()) != d_)
            throw validation_error("PolyMap: exponent vector length != d");
        int total = 0;
        for (int e : t.exponents) {
            if (e < 0) throw validation_error("PolyMap: negative exponent");
            total += e;
        }
        if (!std::isfinite(t.coeff.real()) || !std::isfinite(t.coeff.imag()))
            throw validation_error("PolyMap: non-finite coefficient");
        if (total > 0 && t.coeff != Complex(0.0)) nonconstant[t.component] = true;
    }
    for (int l = 0; l < m_; ++l)
        if (!nonconstant[l])
            throw validation_error("PolyMap: component " + std::to_string(l + 1) +
                                   " is constant");
}

Complex PolyMap::eval_component(int l, const std::vector<Complex>& lambda) const {
    if (d_ == 0) throw validation_error("PolyMap: empty map");
    if (static_cast<int>(lambda.size()) != d_)
        throw validation_error("PolyMap: point dimension != d");
    Complex acc = 0.0;
    for (const PolyTerm& t : terms_) {
        if (t.component != l) continue;
        Complex mono = t.coeff;
        for (int r = 0; r < d_; ++r)
            for (int e = 0; e < t.exponents[r]; ++e) mono *= lambda[r];
        acc += mono;
    }
    return acc;
}

std::vector<Complex> PolyMap::eval_point(const std::vector<Complex>& lambda) const {
    if (d_ == 0) throw validation_error("PolyMap: empty map");
    if (static_cast<int>(lambda.size()) != d_)
        throw validation_error("PolyMap: point dimension != d");
    // Memoized coordinate powers shared across components.
    std::vector<std::vector<Complex>> pow(d_);
    for (int r = 0; r < d_; ++r) pow[r].push_back(1.0);
    auto power = [&](int r, int e) {
        while (static_cast<int>(pow[r].size()) <= e) pow[r].push_back(pow[r].back() * lambda[r]);
        return pow[r][e];
    };
    std::vector<Complex> out(m_, 0.0);
    for (const PolyTerm& t : terms_) {
        Complex mono = t.coeff;
        for (int r = 0; r < d_; ++r)
            if (t.exponents[r] > 0) mono *= power(r, t.exponents[r]);
        out[t.component] += mono;
    }
    return out;
}

PolyMap PolyMap::scaled(double t) const {
    std::vector<PolyTerm> ts = terms_;
    for (PolyTerm& term : ts) term.coeff *= t;
    return PolyMap(d_, m_, std::move(ts));
}

PolyMap PolyMap::truncated(int m) const {
    if (m <= 0 || m > m_) throw validation_error("PolyMap::truncated: bad component count");
    std::vector<PolyTerm> ts;
    for (const PolyTerm& t : terms_)
        if (t.component < m) ts.push_back(t);
    return PolyMap(d_, m, std::move(ts));
}

void Box::validate(int d) const {
    if (static_cast<int>(center.size()) != d || static_cast<int>(radius.size()) != d)
        throw validation_error("Box: dimension mismatch");
    for (double r : radius)
        if (!(r > 0.0)) throw validation_error("Box: radii must be positive");
}

void check_commuting(const CommutingTuple& t, double tol) {
    const int d = t.dim();
    if (d == 0) throw validation_error("CommutingTuple: empty tuple");
    const int n = t.t.front().rows();
    for (const CMatrix& m : t.t) {
        if (m.rows() != n || m.cols() != n)
            throw validation_error("CommutingTuple: matrices must be square, equal size");
        if (!m.is_finite()) throw validation_error("CommutingTuple: non-finite entries");
    }
    for (int r = 0; r < d; ++r)
        for (int s = r + 1; s < d; ++s) {
            const CMatrix comm = t.t[r] * t.t[s] - t.t[s] * t.t[r];
            const double bound = tol * (1.0 + op_norm(t.t[r]) * op_norm(t.t[s]));
            const double err = op_norm(comm);
            if (err > bound)
                throw validation_error("CommutingTuple: commutator norm " +
                                       sci(err) + " exceeds tolerance");
        }
}

std::vector<CMatrix> eval_tuple(const PolyMap& delta, const CommutingTuple& t,
                                double commute_tol) {
    check_commuting(t, commute_tol);
    if (t.dim() != delta.dim())
        throw validation_error("eval_tuple: tuple dimension != polynomial dimension");
    const int n = t.order();
    const int d = delta.dim();

    std::vector<std::vector<CMatrix>> pow(d);
    for (int r = 0; r < d; ++r) pow[r].push_back(CMatrix::identity(n));
    auto power = [&](int r, int e) -> const CMatrix& {
        while (static_cast<int>(pow[r].size()) <= e) pow[r].push_back(pow[r].back() * t.t[r]);
        return pow[r][e];
    };

    std::vector<CMatrix> out(delta.components(), CMatrix(n, n));
    for (const PolyTerm& term : delta.terms()) {
        CMatrix mono = term.coeff * CMatrix::identity(n);
        for (int r = 0; r < d; ++r)
            if (term.exponents[r] > 0) mono = mono * power(r, term.exponents[r]);
        out[term.component] = out[term.component] + mono;
    }
    return out;
}

PointClass classify_point(const PolyMap& delta, const std::vector<Complex>& lambda,
                          double margin) {
    const std::vector<Complex> vals = delta.eval_point(lambda);
    double mx = 0.0;
    for (const Complex& v : vals) mx = std::max(mx, std::abs(v));
    Region r = Region::Boundary;
    if (mx < 1.0 - margin) r = Region::Interior;
    else if (mx > 1.0 + margin) r = Region::Exterior;
    return {r, mx};
}

FiniteSample sample_gdel(const PolyMap& delta, const Box& box, int count,
                         std::uint64_t seed, double margin) {
    box.validate(delta.dim());
    if (count <= 0) throw validation_error("sample_gdel: count must be positive");
    if (margin < 0.0 || margin >= 1.0) throw validation_error("sample_gdel: bad margin");

    SeededRng rng(seed);
    const int d = delta.dim();
    FiniteSample out;
    const long budget = std::max<long>(200000, 20000L * count);
    long attempts = 0;
    while (out.size() < count && attempts < budget) {
        ++attempts;
        std::vector<Complex> p(d);
        for (int r = 0; r < d; ++r) {
            const double re = rng.uniform(box.center[r].real() - box.radius[r],
                                          box.center[r].real() + box.radius[r]);
            const double im = rng.uniform(box.center[r].imag() - box.radius[r],
                                          box.center[r].imag() + box.radius[r]);
            p[r] = Complex(re, im);
        }
        const std::vector<Complex> vals = delta.eval_point(p);
        double mx = 0.0;
        for (const Complex& v : vals) mx = std::max(mx, std::abs(v));
        if (mx >= 1.0 - margin) continue;

        bool separated = true;
        for (const auto& q : out.points) {
            double dist = 0.0;
            for (int r = 0; r < d; ++r) dist = std::max(dist, std::abs(p[r] - q[r]));
            if (dist <= 1e-6) { separated = false; break; }
        }
        if (!separated) continue;

        out.points.push_back(std::move(p));
        out.delta_vals.push_back(vals);
    }
    if (out.size() < count) {
        const double rate = static_cast<double>(out.size()) / static_cast<double>(attempts);
        throw numeric_error("sample_gdel: acceptance rate " + sci(rate) +
                            " too low; box or margin incompatible with G_delta");
    }
    return out;
}

namespace {

// Odometer over the real/imaginary grid axes: 2d axes, grid_n nodes each.
bool advance(std::vector<int>& idx, int grid_n) {
    for (size_t k = 0; k < idx.size(); ++k) {
        if (++idx[k] < grid_n) return true;
        idx[k] = 0;
    }
    return false;
}

}  // namespace

Augmentation augment(const PolyMap& delta, const Box& box, int grid_n, double safety) {
    box.validate(delta.dim());
    if (grid_n < 3) throw validation_error("augment: grid_n must be at least 3");
    if (!(safety > 0.0 && safety <= 1.0)) throw validation_error("augment: safety in (0,1]");
    const int d = delta.dim();
    const int m = delta.components();

    const double axes_count = 2.0 * d * std::log(static_cast<double>(grid_n));
    if (axes_count > std::log(4e7))
        throw validation_error("augment: grid too large for dimension");

    double coord_bound = 0.0;
    bool found = false;
    std::vector<int> idx(2 * d, 0);
    std::vector<Complex> p(d);
    std::vector<bool> on_boundary_axis(2 * d, false);
    do {
        bool boundary = false;
        for (int r = 0; r < d; ++r) {
            const double fre = static_cast<double>(idx[2 * r]) / (grid_n - 1);
            const double fim = static_cast<double>(idx[2 * r + 1]) / (grid_n - 1);
            const double re = box.center[r].real() + (2.0 * fre - 1.0) * box.radius[r];
            const double im = box.center[r].imag() + (2.0 * fim - 1.0) * box.radius[r];
            p[r] = Complex(re, im);
            if (idx[2 * r] == 0 || idx[2 * r] == grid_n - 1 || idx[2 * r + 1] == 0 ||
                idx[2 * r + 1] == grid_n - 1)
                boundary = true;
        }
        const std::vector<Complex> vals = delta.eval_point(p);
        double mx = 0.0;
        for (const Complex& v : vals) mx = std::max(mx, std::abs(v));
        if (mx <= 1.0) {  // grid point of K_delta
            if (boundary)
                throw numeric_error(
                    "augment: K_delta reaches the box boundary; enlarge the box");
            found = true;
            for (int r = 0; r < d; ++r) coord_bound = std::max(coord_bound, std::abs(p[r]));
        }
    } while (advance(idx, grid_n));

    if (!found)
        throw numeric_error("augment: grid found no point of K_delta inside the box");

    const double eps = coord_bound > 1e-12 ? safety / coord_bound : 1.0;

    std::vector<PolyTerm> terms = delta.terms();
    for (int r = 0; r < d; ++r) {
        PolyTerm t;
        t.component = m + r;
        t.coeff = eps;
        t.exponents.assign(d, 0);
        t.exponents[r] = 1;
        terms.push_back(std::move(t));
    }
    Augmentation a{PolyMap(d, m + d, std::move(terms)), eps, coord_bound};

    // Grid subordination sanity: the extension may not change K on the grid.
    std::fill(idx.begin(), idx.end(), 0);
    do {
        for (int r = 0; r < d; ++r) {
            const double fre = static_cast<double>(idx[2 * r]) / (grid_n - 1);
            const double fim = static_cast<double>(idx[2 * r + 1]) / (grid_n - 1);
            p[r] = Complex(box.center[r].real() + (2.0 * fre - 1.0) * box.radius[r],
                           box.center[r].imag() + (2.0 * fim - 1.0) * box.radius[r]);
        }
        const std::vector<Complex> dv = delta.eval_point(p);
        const std::vector<Complex> gv = a.gamma.eval_point(p);
        double dmax = 0.0, gmax = 0.0;
        for (const Complex& v : dv) dmax = std::max(dmax, std::abs(v));
        for (const Complex& v : gv) gmax = std::max(gmax, std::abs(v));
        if ((dmax <= 1.0) != (gmax <= 1.0))
            throw numeric_error("augment: grid subordination check failed");
    } while (advance(idx, grid_n));

    return a;
}

}  // namespace polyfun
