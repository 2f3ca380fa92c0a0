#include "ambit/engine.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace ambit {

using json = nlohmann::ordered_json;

Engine::Engine(const std::string& config_json)
    : Engine(parse_config(config_json)) {}

Engine::Engine(RunConfig cfg) : cfg_(std::move(cfg)), fix_(build_fixture(cfg_)) {
    samples_ = sample_points(fix_.geo.domain, cfg_.samples, cfg_.seed);
    for (const std::string& s : cfg_.suites)
        if (!suite_applicable(fix_.family, s))
            throw config_error("suite '" + s + "' is not applicable to the " +
                               family_name(fix_.family) + " family");
}

bool Engine::run(const std::vector<std::string>& suites) {
    std::vector<std::string> wanted = suites;
    if (wanted.empty()) wanted = cfg_.suites;
    if (wanted.empty()) wanted = applicable_suites(fix_.family);
    // Canonical order with the classifier last (it reuses cached fields).
    const std::vector<std::string> canon = applicable_suites(fix_.family);
    std::vector<std::string> ordered;
    for (const std::string& name : canon)
        if (std::find(wanted.begin(), wanted.end(), name) != wanted.end())
            ordered.push_back(name);
    for (const std::string& name : wanted)
        if (std::find(canon.begin(), canon.end(), name) == canon.end())
            throw config_error("suite '" + name +
                               "' is not applicable to the " +
                               family_name(fix_.family) + " family");

    report_ = VerificationReport{};
    report_.version = kVersion;
    report_.seed = cfg_.seed;
    report_.geometry = family_name(fix_.family);
    SuiteContext ctx(fix_, samples_);
    for (const std::string& name : ordered) {
        ctx.tol_override.reset();
        const auto it = cfg_.tolerance_override.find(name);
        if (it != cfg_.tolerance_override.end()) ctx.tol_override = it->second;
        SuiteResult res = run_suite(name, ctx);
        if (!res.pass) report_.overall_pass = false;
        report_.suites.push_back(std::move(res));
    }
    return report_.overall_pass;
}

std::string Engine::report_json() const {
    json root;
    root["version"] = report_.version;
    root["seed"] = report_.seed;
    root["geometry"] = report_.geometry;
    root["samples"] = cfg_.samples;
    json suites = json::array();
    for (const SuiteResult& s : report_.suites) {
        json js;
        js["suite"] = s.name;
        js["pass"] = s.pass;
        json rows = json::array();
        for (const CheckRow& r : s.rows) {
            json jr;
            jr["identity"] = r.identity;
            jr["verifies"] = r.anchor;
            jr["n_points"] = r.n_points;
            jr["max_residual"] = r.max_residual;
            jr["rms_residual"] = r.rms_residual;
            jr["tolerance"] = r.tolerance;
            jr["comparison"] = r.lower_bound ? "max >= tolerance"
                                             : "max <= tolerance";
            if (r.skipped) jr["skipped"] = true;
            jr["pass"] = r.pass;
            if (!r.note.empty()) jr["note"] = r.note;
            rows.push_back(std::move(jr));
        }
        js["checks"] = std::move(rows);
        suites.push_back(std::move(js));
    }
    root["suites"] = std::move(suites);
    root["overall_pass"] = report_.overall_pass;
    return root.dump(2) + "\n";
}

const std::vector<std::string>& Engine::known_dump_fields() {
    static const std::vector<std::string> fields{
        "f_plus",       "f_minus",     "x",
        "y",            "f",           "scal",
        "b",            "star_killing", "kahler_plus",
        "kahler_minus", "lie_k1",      "lie_k2"};
    return fields;
}

std::string Engine::dump_csv(const std::vector<std::string>& fields, int nx,
                             int ny) {
    if (nx < 1 || ny < 1) throw config_error("grid must be at least 1x1");
    for (const std::string& f : fields) {
        const auto& known = known_dump_fields();
        if (std::find(known.begin(), known.end(), f) == known.end())
            throw config_error("unknown dump field: " + f);
    }
    const bool need_bundle =
        std::any_of(fields.begin(), fields.end(), [](const std::string& f) {
            return f != "scal";
        });
    AmbiKahlerBundle bundle = build_bundle(fix_.geo, fix_.psi);
    std::optional<KillingData> kd;
    if (std::find(fields.begin(), fields.end(), "lie_k1") != fields.end() ||
        std::find(fields.begin(), fields.end(), "lie_k2") != fields.end())
        kd = build_killing_data(fix_.geo, fix_.psi);

    std::ostringstream os;
    os << "c0,c1,c2,c3";
    for (const std::string& f : fields) os << "," << f;
    os << "\r\n";
    if (fields.empty()) return os.str();
    char buf[32];
    auto emit = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
    };
    const Domain& dom = fix_.geo.domain;
    const double m = dom.margin;
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            Coord4 p;
            p[0] = dom.bounds[0][0] + m +
                   (dom.bounds[0][1] - dom.bounds[0][0] - 2 * m) *
                       (nx == 1 ? 0.5 : double(ix) / (nx - 1));
            p[1] = dom.bounds[1][0] + m +
                   (dom.bounds[1][1] - dom.bounds[1][0] - 2 * m) *
                       (ny == 1 ? 0.5 : double(iy) / (ny - 1));
            p[2] = 0.5 * (dom.bounds[2][0] + dom.bounds[2][1]);
            p[3] = 0.5 * (dom.bounds[3][0] + dom.bounds[3][1]);
            if (!dom.contains(p, m)) continue;
            emit(p[0]); os << ",";
            emit(p[1]); os << ",";
            emit(p[2]); os << ",";
            emit(p[3]);
            std::optional<BundleEval> be;
            if (need_bundle) be = bundle.eval(p);
            for (const std::string& f : fields) {
                os << ",";
                if (f == "f_plus") emit(be->f_p.v);
                else if (f == "f_minus") emit(be->f_m.v);
                else if (f == "x") emit(be->x.v);
                else if (f == "y") emit(be->y.v);
                else if (f == "f") emit(be->f.v);
                else if (f == "scal") emit(curvature(fix_.geo, p).scal);
                else if (f == "b") {
                    const CurvaturePack cp =
                        curvature(be->md, christoffel(be->md));
                    Mat4d dev = cp.ricci;
                    for (int i = 0; i < 4; ++i) dev(i, i) -= cp.scal / 4.0;
                    emit(trace(mul(dev, values(be->tau))) / 4.0);
                } else if (f == "star_killing") {
                    emit(star_killing_residual(fix_.geo, fix_.psi, p).value);
                } else if (f == "kahler_plus") {
                    emit(kahler_residual(bundle, +1, p));
                } else if (f == "kahler_minus") {
                    emit(kahler_residual(bundle, -1, p));
                } else if (f == "lie_k1") {
                    emit(killing_vector_residual(fix_.geo, kd->K1, p));
                } else if (f == "lie_k2") {
                    emit(killing_vector_residual(fix_.geo, kd->K2, p));
                }
            }
            os << "\r\n";
        }
    return os.str();
}

}  // namespace ambit
