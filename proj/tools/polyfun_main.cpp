// polyfun: delta-norms, Agler-cone certificates, realizations, the
// transfer-function calculus, and Oka extension on analytic polyhedra.
// All inputs and outputs are JSON; see README for the file shapes.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "polyfun/jsonio.hpp"

namespace {

using namespace polyfun;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitVerify = 2;

void emit(const json& j, const std::string& out_path) {
    const json doc = stamped(j);
    if (out_path.empty())
        std::cout << doc.dump(2) << "\n";
    else
        save_json(out_path, doc);
}

json tolerances(std::initializer_list<std::pair<const char*, double>> vals) {
    json t = json::object();
    for (const auto& [k, v] : vals) t[k] = v;
    return t;
}

// Realization files may be raw or wrapped in a `realize` report.
json field_or_self(const json& j) {
    if (j.is_object() && j.contains("realization")) return j["realization"];
    return j;
}

struct Args {
    std::string in, delta, f, box, realization, instance, sample, tuple, svals, extension;
    std::string out, method = "direct";
    double c = 1.0, tol = 1e-6, t = 0.95;
    std::uint64_t seed = 0;
    int max_iter = 20000, iters = 2000, nmax = 6, degree = 6;
    int samples = 40, holdout = 200;
};

int cmd_pick_norm(const Args& a) {
    const PickInstance inst = instance_from_json(load_json(a.in));
    ConeOptions copts;
    copts.max_iter = a.max_iter;
    const DeltaNormResult r = delta_norm(inst, a.tol, copts);
    json out{{"lower", r.lower},
             {"upper", r.upper},
             {"certificate", to_json(r.certificate)},
             {"probes", r.probes},
             {"solverIterations", r.total_iterations},
             {"tolerances", tolerances({{"bisection", a.tol}, {"feas", copts.feas_tol}})}};
    emit(out, a.out);
    return kExitOk;
}

int cmd_pick_feas(const Args& a) {
    const PickInstance inst = instance_from_json(load_json(a.in));
    ConeOptions copts;
    copts.max_iter = a.max_iter;
    const FeasibilityOutcome o = cone_membership(inst, a.c, copts);
    json out{{"c", a.c},
             {"status", o.status == FeasibilityOutcome::Status::Feasible ? "feasible"
                                                                         : "undetermined"},
             {"residual", o.residual},
             {"iterations", o.iterations},
             {"tolerances", tolerances({{"feas", copts.feas_tol}})}};
    if (o.certificate) out["certificate"] = to_json(*o.certificate);
    emit(out, a.out);
    return kExitOk;
}

int cmd_realize(const Args& a) {
    const PickInstance inst = instance_from_json(load_json(a.in));
    ConeOptions copts;
    copts.max_iter = a.max_iter;
    const DeltaNormResult dn = delta_norm(inst, a.tol, copts);
    const double scale = dn.upper > 0.0 ? dn.upper : 1.0;
    const Realization r = lurking_isometry(inst.scaled(scale), dn.certificate);
    json out{{"scale", scale},
             {"lower", dn.lower},
             {"realization", to_json(r)},
             {"isometryResidual", isometry_residual(r)},
             {"tolerances", tolerances({{"bisection", a.tol}, {"feas", copts.feas_tol}})}};
    emit(out, a.out);
    return kExitOk;
}

int cmd_eval(const Args& a) {
    const Realization r = realization_from_json(field_or_self(load_json(a.realization)));
    if (!a.in.empty()) {
        const json j = load_json(a.in);
        if (j.is_array() && !j.empty() && j[0].is_array() && j[0].size() == 2 &&
            j[0][0].is_number()) {
            // a single point: array of complex scalars
            const std::vector<Complex> z = cvector_from_json(j);
            emit(json{{"value", to_json(transfer_eval_scalar(r, z))}}, a.out);
            return kExitOk;
        }
        // otherwise a tuple: array of matrices
        std::vector<CMatrix> s;
        for (const json& e : j) s.push_back(cmatrix_from_json(e));
        const CMatrix v = transfer_eval_tuple(r, s);
        emit(json{{"value", to_json(v)}, {"norm", op_norm(v)}}, a.out);
        return kExitOk;
    }
    throw validation_error("eval: provide --in with a point or a tuple file");
}

int cmd_tuples_check(const Args& a) {
    const PolyMap delta = polymap_from_json(load_json(a.delta));
    const GenericTuple t = generic_tuple_from_json(load_json(a.tuple));
    const MembershipReport rep = in_fdel(delta, t, a.tol);
    json out{{"member", rep.member},
             {"spectrumInGdel", rep.spectrum_in_gdel},
             {"margins", rep.margins},
             {"tolerances", tolerances({{"membership", a.tol}})}};
    emit(out, a.out);
    return kExitOk;
}

int cmd_tuples_search(const Args& a) {
    const PolyMap delta = polymap_from_json(load_json(a.delta));
    const FiniteSample e = sample_from_json(load_json(a.sample));
    const std::vector<Complex> fvals = cvector_from_json(load_json(a.f));
    FiniteSample sample = e;
    if (sample.delta_vals.empty())
        for (const auto& p : sample.points) sample.delta_vals.push_back(delta.eval_point(p));
    const double bound = search_lower_bound(delta, sample, fvals, a.nmax, a.iters, a.seed);
    json out{{"lowerBound", bound},
             {"iters", a.iters},
             {"nMax", a.nmax},
             {"seed", a.seed},
             {"tolerances", json::object()}};
    emit(out, a.out);
    return kExitOk;
}

int cmd_funcalc_eval(const Args& a) {
    const Realization r = realization_from_json(field_or_self(load_json(a.realization)));
    const json sj = load_json(a.svals);
    std::vector<CMatrix> s;
    for (const json& e : sj) s.push_back(cmatrix_from_json(e));
    const PrecondReport pre = fc_precondition(s);
    json radii = json::array();
    for (const RadiusBracket& b : pre.radii)
        radii.push_back(json{{"estimate", b.estimate}, {"lower", b.lower}, {"upper", b.upper}});
    if (!pre.ok) {
        emit(json{{"preconditionOk", false}, {"radii", radii}}, a.out);
        return kExitVerify;
    }
    CalcOptions opts;
    opts.method = a.method == "neumann" ? CalcMethod::Neumann : CalcMethod::Direct;
    const CMatrix v = fc_eval(r, s, opts);
    json out{{"preconditionOk", true},
             {"radii", radii},
             {"method", a.method},
             {"value", to_json(v)},
             {"norm", op_norm(v)},
             {"tolerances", tolerances({{"neumann", opts.tol}})}};
    emit(out, a.out);
    return kExitOk;
}

int cmd_funcalc_rota(const Args& a) {
    const json sj = load_json(a.svals);
    std::vector<CMatrix> s;
    for (const json& e : sj) s.push_back(cmatrix_from_json(e));
    const RenormResult r = rota_renorm(s, a.degree > 1 ? a.degree : 256);
    json out{{"A", to_json(r.a)},
             {"renormedNorms", r.renormed_norms},
             {"condition", r.condition},
             {"degree", r.degree},
             {"tolerances", json::object()}};
    emit(out, a.out);
    return kExitOk;
}

int cmd_oka_extend(const Args& a, bool tol_given) {
    const PolyMap delta = polymap_from_json(load_json(a.delta));
    const Polynomial f = polynomial_from_json(load_json(a.f));
    const Box box = box_from_json(load_json(a.box));
    OkaConfig cfg;
    cfg.t = a.t;
    cfg.sample_count = a.samples;
    cfg.holdout_count = a.holdout;
    cfg.seed = a.seed;
    cfg.tol = tol_given ? a.tol : 1e-5;
    const ExtensionResult res = oka_extend(delta, f, box, cfg);
    json out = to_json(res);
    out["tolerances"] = tolerances({{"holdout", cfg.tol}, {"norm", cfg.norm_tol}});
    emit(out, a.out);
    return kExitOk;
}

int cmd_oka_approx(const Args& a) {
    const ExtensionResult res = extension_from_json(load_json(a.extension));
    const Polynomial p = oka_weil_approx(res, a.degree);
    json out{{"degree", a.degree}, {"polynomial", to_json(p)}};
    emit(out, a.out);
    return kExitOk;
}

int cmd_verify(const Args& a) {
    if (!a.realization.empty()) {
        const Realization r = realization_from_json(field_or_self(load_json(a.realization)));
        const PickInstance inst = instance_from_json(load_json(a.instance));
        const RealizationReport rep = verify_realization(r, inst, 10000, a.seed + 1);
        const bool ok = rep.max_interp_error <= a.tol && rep.isometry_residual <= 1e-9 &&
                        rep.polydisc_sup_estimate <= 1.0 + 1e-6;
        json out{{"maxInterpError", rep.max_interp_error},
                 {"isometryResidual", rep.isometry_residual},
                 {"polydiscSupEstimate", rep.polydisc_sup_estimate},
                 {"pass", ok},
                 {"tolerances", tolerances({{"interp", a.tol}, {"isometry", 1e-9}})}};
        emit(out, a.out);
        return ok ? kExitOk : kExitVerify;
    }
    if (!a.extension.empty()) {
        const ExtensionResult res = extension_from_json(load_json(a.extension));
        const PolyMap delta = polymap_from_json(load_json(a.delta));
        const Polynomial f = polynomial_from_json(load_json(a.f));
        const Box box = box_from_json(load_json(a.box));
        const ExtensionReport rep = verify_extension(res, delta, f, box, a.seed + 7);
        const bool ok = rep.fresh_holdout_error <= res.tol && rep.norm_bound_ok &&
                        rep.interp_error <= 1e-6;
        json out{{"freshHoldoutError", rep.fresh_holdout_error},
                 {"polydiscSup", rep.polydisc_sup},
                 {"interpError", rep.interp_error},
                 {"normBoundOk", rep.norm_bound_ok},
                 {"pass", ok},
                 {"tolerances", tolerances({{"holdout", res.tol}})}};
        emit(out, a.out);
        return ok ? kExitOk : kExitVerify;
    }
    throw validation_error("verify: provide --realization with --instance, or "
                           "--extension with --delta, --f, --box");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"operator-theoretic function theory on analytic polyhedra"};
    app.require_subcommand(1);
    Args a;

    auto add_common = [&](CLI::App* c) {
        c->add_option("--out", a.out, "write the JSON report here instead of stdout");
        c->add_option("--tol", a.tol, "tolerance for the subcommand");
    };

    CLI::App* pick = app.add_subcommand("pick", "cone feasibility and delta-norms");
    CLI::App* pick_norm = pick->add_subcommand("norm", "delta-norm by bisection");
    pick_norm->add_option("--in", a.in, "PickInstance JSON")->required();
    pick_norm->add_option("--max-iter", a.max_iter, "solver iteration cap");
    add_common(pick_norm);
    CLI::App* pick_feas = pick->add_subcommand("feas", "cone membership at a fixed scale");
    pick_feas->add_option("--in", a.in, "PickInstance JSON")->required();
    pick_feas->add_option("--c", a.c, "scale to test")->required();
    pick_feas->add_option("--max-iter", a.max_iter, "solver iteration cap");
    add_common(pick_feas);

    CLI::App* realize = app.add_subcommand("realize", "certificate -> realization");
    realize->add_option("--in", a.in, "PickInstance JSON")->required();
    realize->add_option("--max-iter", a.max_iter, "solver iteration cap");
    add_common(realize);

    CLI::App* eval = app.add_subcommand("eval", "evaluate a transfer function");
    eval->add_option("--realization", a.realization, "Realization JSON")->required();
    eval->add_option("--in", a.in, "point (array of [re,im]) or tuple (array of matrices)")
        ->required();
    add_common(eval);

    CLI::App* tuples = app.add_subcommand("tuples", "generic tuple diagnostics");
    CLI::App* tcheck = tuples->add_subcommand("check", "membership report");
    tcheck->add_option("--delta", a.delta, "PolyMap JSON")->required();
    tcheck->add_option("--tuple", a.tuple, "GenericTuple JSON")->required();
    add_common(tcheck);
    CLI::App* tsearch = tuples->add_subcommand("search", "stochastic lower bound");
    tsearch->add_option("--delta", a.delta, "PolyMap JSON")->required();
    tsearch->add_option("--sample", a.sample, "FiniteSample JSON")->required();
    tsearch->add_option("--f", a.f, "values on the sample, JSON array")->required();
    tsearch->add_option("--iters", a.iters, "search iterations");
    tsearch->add_option("--nmax", a.nmax, "largest tuple order");
    tsearch->add_option("--seed", a.seed, "rng seed")->required();
    add_common(tsearch);

    CLI::App* funcalc = app.add_subcommand("funcalc", "functional calculus");
    CLI::App* feval = funcalc->add_subcommand("eval", "f(T) from a realization");
    feval->add_option("--realization", a.realization, "Realization JSON")->required();
    feval->add_option("--svals", a.svals, "delta(T) blocks, JSON array of matrices")
        ->required();
    feval->add_option("--method", a.method, "direct|neumann")
        ->check(CLI::IsMember({"direct", "neumann"}));
    add_common(feval);
    CLI::App* rota = funcalc->add_subcommand("rota", "renorming similarity");
    rota->add_option("--svals", a.svals, "tuple blocks, JSON array of matrices")->required();
    rota->add_option("--degree-cap", a.degree, "cap on the monomial degree");
    add_common(rota);

    CLI::App* oka = app.add_subcommand("oka", "extension and approximation");
    CLI::App* extend = oka->add_subcommand("extend", "Phi with a certified bound");
    extend->add_option("--delta", a.delta, "PolyMap JSON")->required();
    extend->add_option("--f", a.f, "polynomial JSON (m = 1)")->required();
    extend->add_option("--box", a.box, "compactness witness box JSON")->required();
    extend->add_option("--t", a.t, "strictness parameter in (0,1)");
    extend->add_option("--samples", a.samples, "interpolation sample size");
    extend->add_option("--holdout", a.holdout, "holdout size");
    extend->add_option("--seed", a.seed, "rng seed")->required();
    add_common(extend);
    CLI::App* approx = oka->add_subcommand("approx", "Taylor partial sum composed with gamma");
    approx->add_option("--extension", a.extension, "ExtensionResult JSON")->required();
    approx->add_option("--degree", a.degree, "total degree of the partial sum")->required();
    add_common(approx);

    CLI::App* verify = app.add_subcommand("verify", "re-check certified artifacts");
    verify->add_option("--realization", a.realization, "Realization JSON");
    verify->add_option("--instance", a.instance, "PickInstance JSON");
    verify->add_option("--extension", a.extension, "ExtensionResult JSON");
    verify->add_option("--delta", a.delta, "PolyMap JSON");
    verify->add_option("--f", a.f, "polynomial JSON");
    verify->add_option("--box", a.box, "box JSON");
    verify->add_option("--seed", a.seed, "rng seed for fresh holdouts");
    add_common(verify);

    CLI11_PARSE(app, argc, argv);

    try {
        if (pick_norm->parsed()) return cmd_pick_norm(a);
        if (pick_feas->parsed()) return cmd_pick_feas(a);
        if (realize->parsed()) return cmd_realize(a);
        if (eval->parsed()) return cmd_eval(a);
        if (tcheck->parsed()) return cmd_tuples_check(a);
        if (tsearch->parsed()) return cmd_tuples_search(a);
        if (feval->parsed()) return cmd_funcalc_eval(a);
        if (rota->parsed()) return cmd_funcalc_rota(a);
        if (extend->parsed()) return cmd_oka_extend(a, extend->count("--tol") > 0);
        if (approx->parsed()) return cmd_oka_approx(a);
        if (verify->parsed()) return cmd_verify(a);
        std::cerr << "no subcommand selected\n";
        return kExitInput;
    } catch (const polyfun::validation_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const polyfun::numeric_error& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return kExitVerify;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
}
