#include "spt/report.hpp"

namespace spt {

Json to_json(const ArbVerdict& v) {
    return Json{{"n_paths", v.n_paths},   {"frac_ge", v.frac_ge}, {"frac_gt", v.frac_gt},
                {"min", v.v_min},         {"max", v.v_max},       {"mean", v.v_mean},
                {"negative_paths", v.negative_paths}, {"K", v.K},  {"tol", v.tol}};
}

Json to_json(const IdentityCheck& c) {
    return Json{{"name", c.name}, {"max_dev", c.max_dev}, {"tol", c.tol}, {"pass", c.pass}};
}

Json to_json(const MartingaleReport& m) {
    Json assets = Json::array();
    for (const auto& a : m.assets) assets.push_back(Json{{"mu0", a.mu0}, {"mean", a.mean}, {"se", a.se}, {"z", a.z}});
    Json j{{"assets", assets}, {"max_abs_z", m.max_abs_z}, {"pass", m.pass}};
    if (m.growth)
        j["wealth_growth"] = Json{{"mean", m.growth->mean}, {"se", m.growth->se}, {"expected", m.growth->expected},
                                  {"z", m.growth->z}};
    return j;
}

Json to_json(const HittingStats& h) {
    return Json{{"n_hit", h.n_hit}, {"min", h.min}, {"max", h.max}, {"mean", h.mean}};
}

Json to_json(const HorizonReport& h) {
    Json tested = Json::array();
    for (const auto& [T, v] : h.tested) tested.push_back(Json{{"T", T}, {"verdict", v.classification}, {"stats", to_json(v)}});
    return Json{{"G", h.G}, {"G0", h.G0}, {"eta", h.eta}, {"threshold", h.threshold}, {"tested", tested}};
}

Json to_json(const MonotoneVerdict& v) {
    Json first = v.first_violation ? Json(*v.first_violation) : Json(nullptr);
    return Json{{"holds", v.holds}, {"first_violation", first}, {"max_violation", v.max_violation}};
}

Json to_json(const EmpiricalGammaH& e) {
    Json check = to_json(e.slope_check);
    check["eta"] = e.eta_checked;
    return Json{{"total", e.total}, {"eta_hat", e.eta_hat}, {"slope_check", check}};
}

}  // namespace spt
