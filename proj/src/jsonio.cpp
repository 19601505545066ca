#include "polyfun/jsonio.hpp"

#include <fstream>

namespace polyfun {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw validation_error("json: " + what);
}

const json& field(const json& j, const char* name) {
    require(j.is_object(), std::string("expected object with field '") + name + "'");
    auto it = j.find(name);
    require(it != j.end(), std::string("missing field '") + name + "'");
    return *it;
}

}  // namespace

json stamped(json j) {
    j["schema"] = "v1";
    return j;
}

json to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json to_json(const std::vector<Complex>& v) {
    json a = json::array();
    for (const Complex& z : v) a.push_back(to_json(z));
    return a;
}

Complex complex_from_json(const json& j) {
    require(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(),
            "complex scalar must be [re, im]");
    return Complex(j[0].get<double>(), j[1].get<double>());
}

std::vector<Complex> cvector_from_json(const json& j) {
    require(j.is_array(), "expected array of complex scalars");
    std::vector<Complex> v;
    v.reserve(j.size());
    for (const json& e : j) v.push_back(complex_from_json(e));
    return v;
}

json to_json(const CMatrix& m) {
    json re = json::array(), im = json::array();
    for (const Complex& z : m.data()) {
        re.push_back(z.real());
        im.push_back(z.imag());
    }
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

CMatrix cmatrix_from_json(const json& j) {
    const int rows = field(j, "rows").get<int>();
    const int cols = field(j, "cols").get<int>();
    const json& re = field(j, "re");
    const json& im = field(j, "im");
    require(rows >= 0 && cols >= 0, "matrix dimensions must be nonnegative");
    require(re.is_array() && im.is_array(), "matrix re/im must be arrays");
    require(static_cast<int>(re.size()) == rows * cols &&
                static_cast<int>(im.size()) == rows * cols,
            "matrix entry count != rows*cols");
    CMatrix m(rows, cols);
    for (int k = 0; k < rows * cols; ++k)
        m.data()[k] = Complex(re[k].get<double>(), im[k].get<double>());
    return m;
}

json to_json(const PolyMap& p) {
    json terms = json::array();
    for (const PolyTerm& t : p.terms())
        terms.push_back(json{{"l", t.component + 1},
                             {"re", t.coeff.real()},
                             {"im", t.coeff.imag()},
                             {"exp", t.exponents}});
    return json{{"d", p.dim()}, {"m", p.components()}, {"terms", terms}};
}

PolyMap polymap_from_json(const json& j) {
    const int d = field(j, "d").get<int>();
    const int m = field(j, "m").get<int>();
    std::vector<PolyTerm> terms;
    for (const json& t : field(j, "terms")) {
        PolyTerm term;
        term.component = field(t, "l").get<int>() - 1;
        term.coeff = Complex(field(t, "re").get<double>(), field(t, "im").get<double>());
        term.exponents = field(t, "exp").get<std::vector<int>>();
        terms.push_back(std::move(term));
    }
    return PolyMap(d, m, std::move(terms));
}

json to_json(const Polynomial& p) {
    json terms = json::array();
    for (const auto& [e, c] : p.coeffs)
        terms.push_back(json{{"l", 1}, {"re", c.real()}, {"im", c.imag()}, {"exp", e}});
    return json{{"d", p.d}, {"m", 1}, {"terms", terms}};
}

Polynomial polynomial_from_json(const json& j) {
    Polynomial p;
    p.d = field(j, "d").get<int>();
    if (j.contains("m")) require(j["m"].get<int>() == 1, "polynomial must have m = 1");
    for (const json& t : field(j, "terms")) {
        if (t.contains("l")) require(t["l"].get<int>() == 1, "polynomial terms must have l = 1");
        const std::vector<int> e = field(t, "exp").get<std::vector<int>>();
        require(static_cast<int>(e.size()) == p.d, "exponent length != d");
        p.coeffs[e] += Complex(field(t, "re").get<double>(), field(t, "im").get<double>());
    }
    return p;
}

json to_json(const Box& b) {
    return json{{"center", to_json(b.center)}, {"radius", b.radius}};
}

Box box_from_json(const json& j) {
    Box b;
    b.center = cvector_from_json(field(j, "center"));
    b.radius = field(j, "radius").get<std::vector<double>>();
    return b;
}

json to_json(const FiniteSample& s) {
    json pts = json::array(), dv = json::array();
    for (const auto& p : s.points) pts.push_back(to_json(p));
    for (const auto& row : s.delta_vals) dv.push_back(to_json(row));
    return json{{"points", pts}, {"deltaVals", dv}};
}

FiniteSample sample_from_json(const json& j) {
    FiniteSample s;
    for (const json& p : field(j, "points")) s.points.push_back(cvector_from_json(p));
    if (j.contains("deltaVals"))
        for (const json& row : j["deltaVals"]) s.delta_vals.push_back(cvector_from_json(row));
    return s;
}

json to_json(const GenericTuple& t) {
    json lam = json::array();
    for (const auto& p : t.lambda) lam.push_back(to_json(p));
    return json{{"lambda", lam}, {"K", to_json(t.k)}};
}

GenericTuple generic_tuple_from_json(const json& j) {
    std::vector<std::vector<Complex>> lambda;
    for (const json& p : field(j, "lambda")) lambda.push_back(cvector_from_json(p));
    return make_generic(lambda, cmatrix_from_json(field(j, "K")));
}

json to_json(const PickInstance& inst) {
    json out = to_json(inst.e);
    out["fVals"] = to_json(inst.fvals);
    return out;
}

PickInstance instance_from_json(const json& j) {
    PickInstance inst;
    inst.e = sample_from_json(j);
    inst.fvals = cvector_from_json(field(j, "fVals"));
    inst.validate();
    return inst;
}

json to_json(const AglerCertificate& c) {
    json blocks = json::array();
    for (const CMatrix& a : c.a) blocks.push_back(to_json(a));
    return json{{"A", blocks}, {"residual", c.residual}};
}

AglerCertificate certificate_from_json(const json& j) {
    AglerCertificate c;
    for (const json& a : field(j, "A")) c.a.push_back(cmatrix_from_json(a));
    c.residual = j.contains("residual") ? j["residual"].get<double>() : 0.0;
    return c;
}

json to_json(const Realization& r) {
    return json{{"a", to_json(r.a)},
                {"blockDims", r.block_dims},
                {"beta", to_json(r.beta)},
                {"gamma", to_json(r.gamma)},
                {"D", to_json(r.d)}};
}

Realization realization_from_json(const json& j) {
    Realization r;
    r.a = complex_from_json(field(j, "a"));
    r.block_dims = field(j, "blockDims").get<std::vector<int>>();
    r.beta = cvector_from_json(field(j, "beta"));
    r.gamma = cvector_from_json(field(j, "gamma"));
    r.d = cmatrix_from_json(field(j, "D"));
    r.validate();
    return r;
}

json to_json(const ExtensionResult& r) {
    return json{{"gamma", to_json(r.gamma)},
                {"epsilon", r.epsilon},
                {"t", r.t},
                {"normBound", r.norm_bound},
                {"normLower", r.norm_lower},
                {"realization", to_json(r.psi)},
                {"sample", to_json(r.sample)},
                {"sampleF", to_json(r.sample_f)},
                {"holdoutMaxError", r.holdout_max_error},
                {"seed", r.seed},
                {"tol", r.tol}};
}

ExtensionResult extension_from_json(const json& j) {
    ExtensionResult r;
    r.gamma = polymap_from_json(field(j, "gamma"));
    r.epsilon = field(j, "epsilon").get<double>();
    r.t = field(j, "t").get<double>();
    r.norm_bound = field(j, "normBound").get<double>();
    r.norm_lower = field(j, "normLower").get<double>();
    r.psi = realization_from_json(field(j, "realization"));
    r.sample = sample_from_json(field(j, "sample"));
    r.sample_f = cvector_from_json(field(j, "sampleF"));
    r.holdout_max_error = field(j, "holdoutMaxError").get<double>();
    r.seed = field(j, "seed").get<std::uint64_t>();
    r.tol = field(j, "tol").get<double>();
    return r;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw validation_error("parse error in " + path + ": " + e.what());
    }
}

void save_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace polyfun
