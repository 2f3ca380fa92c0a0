#include "ambit/config.hpp"

#include <json.hpp>

namespace ambit {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw config_error("config error at " + path + ": " + what);
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

std::vector<double> as_poly(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a coefficient array");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::array<double, 2> as_range(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) fail(path, "expected [lo, hi]");
    std::array<double, 2> r{as_number(j[0], path + "[0]"),
                            as_number(j[1], path + "[1]")};
    if (!(r[1] > r[0])) fail(path, "needs hi > lo");
    return r;
}

void parse_profile(const json& j, const std::string& path, RunConfig& cfg,
                   bool is_A) {
    if (j.is_array()) {
        (is_A ? cfg.A_poly : cfg.B_poly) = as_poly(j, path);
        return;
    }
    if (j.is_object() && j.contains("poly")) {
        (is_A ? cfg.A_poly : cfg.B_poly) = as_poly(j["poly"], path + ".poly");
        return;
    }
    if (j.is_object() && j.contains("builtin")) {
        if (j["builtin"] != "sphere")
            fail(path + ".builtin", "unknown builtin profile");
        cfg.builtin_sphere_profiles = true;
        return;
    }
    fail(path, "expected a coefficient array, {\"poly\": [...]} or "
               "{\"builtin\": \"sphere\"}");
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config is not valid JSON: ") +
                           e.what());
    }
    if (!root.is_object()) fail("$", "top level must be an object");

    static const std::vector<std::string> known_top{
        "geometry", "samples", "seed",   "suites",
        "tolerances", "perturbation", "output", "margin"};
    for (auto it = root.begin(); it != root.end(); ++it)
        if (std::find(known_top.begin(), known_top.end(), it.key()) ==
            known_top.end())
            fail("$." + it.key(), "unknown field");

    RunConfig cfg;
    if (!root.contains("geometry") || !root["geometry"].is_object())
        fail("$.geometry", "required object");
    const json& g = root["geometry"];
    if (!g.contains("family") || !g["family"].is_string())
        fail("$.geometry.family", "required string");
    cfg.family = g["family"].get<std::string>();

    static const std::vector<std::string> families{
        "ambitoric", "sphere", "deformed-sphere", "calabi", "product"};
    if (std::find(families.begin(), families.end(), cfg.family) ==
        families.end())
        fail("$.geometry.family", "unknown family '" + cfg.family + "'");

    if (cfg.family == "ambitoric") {
        if (g.contains("A")) parse_profile(g["A"], "$.geometry.A", cfg, true);
        if (g.contains("B")) parse_profile(g["B"], "$.geometry.B", cfg, false);
        const bool builtin = cfg.builtin_sphere_profiles;
        if (!builtin && (cfg.A_poly.empty() || cfg.B_poly.empty()))
            fail("$.geometry", "ambitoric needs profiles A and B (or the "
                               "builtin sphere pair)");
        if (g.contains("x_range"))
            cfg.x_range = as_range(g["x_range"], "$.geometry.x_range");
        else if (!builtin)
            fail("$.geometry.x_range", "required for polynomial profiles");
        if (g.contains("y_range"))
            cfg.y_range = as_range(g["y_range"], "$.geometry.y_range");
        else if (!builtin)
            fail("$.geometry.y_range", "required for polynomial profiles");
    }
    if (cfg.family == "ambitoric" || cfg.family == "sphere" ||
        cfg.family == "deformed-sphere") {
        if (g.contains("lambda"))
            cfg.lambda = as_number(g["lambda"], "$.geometry.lambda");
        if (g.contains("mu")) cfg.mu = as_number(g["mu"], "$.geometry.mu");
    }
    if (cfg.family == "sphere") {
        if (g.contains("chart_box")) {
            const json& cb = g["chart_box"];
            if (!cb.is_array() || cb.size() != 4)
                fail("$.geometry.chart_box", "expected four [lo, hi] pairs");
            std::array<std::array<double, 2>, 4> box;
            for (int i = 0; i < 4; ++i)
                box[i] = as_range(cb[i], "$.geometry.chart_box[" +
                                             std::to_string(i) + "]");
            cfg.chart_box = box;
        }
    }
    if (cfg.family == "deformed-sphere" && g.contains("epsilon"))
        cfg.epsilon = as_number(g["epsilon"], "$.geometry.epsilon");
    if (cfg.family == "calabi") {
        if (g.contains("k")) cfg.k = as_number(g["k"], "$.geometry.k");
        if (g.contains("phi")) {
            const json& ph = g["phi"];
            if (ph.is_object() && ph.contains("builtin")) {
                if (ph["builtin"] != "two-plus-tanh")
                    fail("$.geometry.phi.builtin", "unknown builtin");
                cfg.phi_tanh = true;
            } else if (ph.is_object() && ph.contains("poly")) {
                cfg.phi_poly = as_poly(ph["poly"], "$.geometry.phi.poly");
                cfg.phi_tanh = false;
            } else {
                fail("$.geometry.phi",
                     "expected {\"poly\": [...]} or {\"builtin\": "
                     "\"two-plus-tanh\"}");
            }
        }
        if (g.contains("t_range"))
            cfg.t_range = as_range(g["t_range"], "$.geometry.t_range");
    }
    if (cfg.family == "product" && g.contains("phi_poly_u"))
        cfg.product_phi_poly = as_poly(g["phi_poly_u"],
                                       "$.geometry.phi_poly_u");

    if (root.contains("margin"))
        cfg.margin = as_number(root["margin"], "$.margin");
    if (root.contains("samples")) {
        if (!root["samples"].is_number_integer())
            fail("$.samples", "expected an integer");
        cfg.samples = root["samples"].get<int>();
        if (cfg.samples < 1 || cfg.samples > 100000)
            fail("$.samples", "must be in [1, 100000]");
    }
    if (root.contains("seed")) {
        if (!root["seed"].is_number_unsigned() &&
            !root["seed"].is_number_integer())
            fail("$.seed", "expected a non-negative integer");
        cfg.seed = root["seed"].get<std::uint64_t>();
    }
    if (root.contains("suites")) {
        if (!root["suites"].is_array()) fail("$.suites", "expected an array");
        for (const auto& s : root["suites"]) {
            if (!s.is_string()) fail("$.suites", "entries must be strings");
            cfg.suites.push_back(s.get<std::string>());
        }
    }
    if (root.contains("tolerances")) {
        if (!root["tolerances"].is_object())
            fail("$.tolerances", "expected an object of suite -> number");
        for (auto it = root["tolerances"].begin();
             it != root["tolerances"].end(); ++it)
            cfg.tolerance_override[it.key()] =
                as_number(it.value(), "$.tolerances." + it.key());
    }
    if (root.contains("perturbation")) {
        const json& p = root["perturbation"];
        if (!p.is_object()) fail("$.perturbation", "expected an object");
        if (p.contains("metric_epsilon"))
            cfg.metric_epsilon =
                as_number(p["metric_epsilon"], "$.perturbation.metric_epsilon");
    }
    if (root.contains("output")) {
        const json& o = root["output"];
        if (!o.is_object()) fail("$.output", "expected an object");
        if (o.contains("report")) {
            if (!o["report"].is_string())
                fail("$.output.report", "expected a path string");
            cfg.report_path = o["report"].get<std::string>();
        }
    }
    return cfg;
}

const std::string& config_schema() {
    static const std::string schema = R"json({
  "$comment": "ambit run configuration; numbers are IEEE doubles, polynomial profiles are coefficient arrays lowest-degree-first",
  "geometry": {
    "family": "ambitoric | sphere | deformed-sphere | calabi | product",
    "A": "[c0, c1, ...] | {\"poly\": [...]} | {\"builtin\": \"sphere\"}   (ambitoric; A(x) > 0 on x_range)",
    "B": "same as A                                                       (ambitoric; B(y) > 0 on y_range)",
    "x_range": "[lo, hi]   (ambitoric with polynomial profiles; lo > 0)",
    "y_range": "[lo, hi]   (ambitoric with polynomial profiles)",
    "lambda": "number      (sphere families and builtin profiles; 0 <= lambda <= mu)",
    "mu": "number          (sphere families and builtin profiles; mu > 0)",
    "chart_box": "[[lo,hi] x4]  (sphere; stereographic chart sampling box)",
    "epsilon": "number     (deformed-sphere; bump amplitude added to A)",
    "k": "number           (calabi; family parameter, 1 + k*phi must not vanish)",
    "phi": "{\"poly\": [...]} | {\"builtin\": \"two-plus-tanh\"}  (calabi; positive increasing on t_range)",
    "t_range": "[lo, hi]   (calabi)",
    "phi_poly_u": "[c0, c1, ...]  (product; phi as a polynomial in u, positive)"
  },
  "margin": "number (default 1e-2); sampling stays this far from the domain boundary and singular loci",
  "samples": "integer in [1, 100000] (default 100)",
  "seed": "non-negative integer (default 0); fixes the low-discrepancy sample set",
  "suites": "array of suite names (default: all applicable). Known suites: star-killing, kahler, curvature-closed-forms, separation, killing-fields, momenta, killing-tensor, classifier, deformation, calabi-family, product, sphere-formulas",
  "tolerances": "object suite-name -> number; replaces the default tolerance of that suite's upper-bound checks",
  "perturbation": {"metric_epsilon": "number (default 0); adds an asymmetric metric perturbation so residual checks must fail -- a negative-control knob"},
  "output": {"report": "path for the JSON report (default stdout)"}
})json";
    return schema;
}

Fixture build_fixture(const RunConfig& cfg) {
    Fixture fix;
    fix.lambda = cfg.lambda;
    fix.mu = cfg.mu;
    if (cfg.family == "ambitoric") {
        fix.family = Fixture::Family::Ambitoric;
        ProfilePair pp;
        if (cfg.builtin_sphere_profiles) {
            pp = sphere_profiles(cfg.lambda, cfg.mu);
            if (cfg.x_range[1] > cfg.x_range[0]) pp.x_range = cfg.x_range;
            if (cfg.y_range[1] > cfg.y_range[0]) pp.y_range = cfg.y_range;
        } else {
            pp.A = Curve::poly(cfg.A_poly);
            pp.B = Curve::poly(cfg.B_poly);
            pp.x_range = cfg.x_range;
            pp.y_range = cfg.y_range;
        }
        pp.margin = cfg.margin;
        fix.ansatz = build_hyperbolic_ambitoric(pp);
        fix.geo = fix.ansatz->geo;
        fix.psi = fix.ansatz->psi;
        fix.profiles = pp;
        fix.expected_case = CaseLabel::Kind::Ambitoric;
    } else if (cfg.family == "sphere") {
        fix.family = Fixture::Family::Sphere;
        SphereSpec ss;
        ss.lambda = cfg.lambda;
        ss.mu = cfg.mu;
        ss.margin = cfg.margin;
        if (cfg.chart_box) ss.chart_box = *cfg.chart_box;
        fix.sphere = build_round_sphere(ss);
        fix.geo = fix.sphere->geo;
        fix.psi = fix.sphere->psi;
        if (cfg.lambda <= 0.0) {
            fix.expected_case = CaseLabel::Kind::Decomposable;
        } else if (cfg.lambda == cfg.mu) {
            fix.expected_case = CaseLabel::Kind::Calabi;
            fix.expected_c = cfg.lambda * cfg.lambda / 4.0;
            fix.has_expected_c = true;
        } else {
            fix.expected_case = CaseLabel::Kind::Ambitoric;
        }
    } else if (cfg.family == "deformed-sphere") {
        fix.family = Fixture::Family::DeformedSphere;
        fix.ansatz = build_deformed_sphere(cfg.lambda, cfg.mu, cfg.epsilon);
        fix.geo = fix.ansatz->geo;
        fix.psi = fix.ansatz->psi;
        fix.profiles = fix.ansatz->profiles;
        fix.expected_case = CaseLabel::Kind::Ambitoric;
    } else if (cfg.family == "calabi") {
        fix.family = Fixture::Family::Calabi;
        CalabiSpec cs;
        cs.phi = cfg.phi_tanh ? Curve::two_plus_tanh()
                              : Curve::poly(cfg.phi_poly);
        cs.k = cfg.k;
        cs.t_range = cfg.t_range;
        cs.margin = cfg.margin;
        fix.calabi = build_calabi(cs);
        fix.geo = fix.calabi->geo;
        fix.psi = fix.calabi->psi;
        fix.expected_case = CaseLabel::Kind::Calabi;
        if (cfg.k != 0.0) {
            // With this family's normalization the constant combination of
            // f_pm is 1 for every k, so K_2 = K_1 / 4.
            fix.expected_c = 0.25;
            fix.has_expected_c = true;
        }
    } else if (cfg.family == "product") {
        fix.family = Fixture::Family::Product;
        ProductSpec ps;
        const Curve poly = Curve::poly(cfg.product_phi_poly);
        ps.phi = [poly](const Jet& u, const Jet& v) {
            (void)v;
            return poly.at(u);
        };
        ps.margin = cfg.margin;
        fix.product = build_product(ps);
        fix.geo = fix.product->geo;
        fix.psi = fix.product->psi;
        fix.expected_case = CaseLabel::Kind::Decomposable;
    } else {
        throw config_error("unknown family: " + cfg.family);
    }

    if (cfg.metric_epsilon != 0.0) {
        // Negative-control knob: an anisotropic, position-dependent bump that
        // breaks the Killing identities but keeps the metric positive.
        const double eps = cfg.metric_epsilon;
        const MetricField base = fix.geo.metric;
        fix.geo.metric = {fix.geo.domain, [base, eps](const Coord4& p) {
                              Mat4j g = base.f(p);
                              const Jet c0 = Jet::var(0, p[0]);
                              const Jet bump = eps * sin(3.0 * c0) * g(0, 0);
                              g(0, 0) = g(0, 0) + bump;
                              return g;
                          }};
        // Rebuild the dependent psi? No: psi stays, the perturbed metric is
        // exactly what must make the residual suites fail.
    }
    return fix;
}

}  // namespace ambit
