#include "greybox/json_report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace greybox {

namespace {

double round12(double x) {
    if (x == 0.0 || !std::isfinite(x)) return x == 0.0 ? 0.0 : x;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    const double r = std::strtod(buf, nullptr);
    return r == 0.0 ? 0.0 : r;
}

void round_all(Json& j) {
    if (j.is_number_float()) {
        j = round12(j.get<double>());
    } else if (j.is_structured()) {
        for (auto& v : j) round_all(v);
    }
}

Json entry_json(const EntryKey& key) { return Json::array({key.first + 1, key.second + 1}); }

}  // namespace

Json complex_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Json mode_json(const Mode& mode, std::size_t index, bool pair) {
    Json j;
    j["index"] = index;
    j["re"] = mode.lambda.real();
    j["im"] = mode.lambda.imag();
    j["freq_hz"] = mode.freq_hz();
    j["rad_s"] = std::abs(mode.lambda.imag());
    j["damping_ratio"] = mode.damping_ratio();
    j["pair"] = pair;
    j["near_repeated"] = mode.near_repeated;
    return j;
}

Json modes_json(const std::vector<ListedMode>& modes) {
    Json list = Json::array();
    for (std::size_t k = 0; k < modes.size(); ++k) list.push_back(mode_json(modes[k].mode, k, modes[k].pair));
    return Json{{"modes", list}};
}

Json greybox_json(const NetworkModel& net, const GreyboxReport& report, std::size_t index) {
    Json doc;
    Json mode = mode_json(report.mode, index, report.mode.lambda.imag() != 0.0);
    mode["xi"] = complex_json(report.mode.xi);
    doc["mode"] = mode;
    doc["fraction"] = report.fraction;

    const auto placement = [&](const std::string& id) {
        const Component& c = net.component(id);
        Json nodes = Json::array({net.nodes()[c.from].id});
        if (!c.is_shunt()) nodes.push_back(net.nodes()[c.to].id);
        return std::pair{Json(c.is_shunt() ? "shunt" : "branch"), nodes};
    };

    Json l1 = Json::array();
    for (const auto& e : report.layer1) {
        auto [where, nodes] = placement(e.component);
        l1.push_back({{"component", e.component}, {"placement", where}, {"nodes", nodes}, {"value", e.value}});
    }
    doc["layer1"] = l1;

    Json l2 = Json::array();
    for (const auto& e : report.layer2) {
        auto [where, nodes] = placement(e.component);
        l2.push_back({{"component", e.component},
                      {"placement", where},
                      {"nodes", nodes},
                      {"value", complex_json(e.value)},
                      {"share", complex_json(e.share)}});
    }
    doc["layer2"] = l2;

    Json l3 = Json::array();
    for (const auto& e : report.layer3) {
        const ParamSensitivity& p = e.sensitivity;
        l3.push_back({{"component", p.component},
                      {"param", p.param},
                      {"value", p.value},
                      {"s_lambda_rho", complex_json(p.s_lambda_rho)},
                      {"normalized", complex_json(p.normalized)},
                      {"predicted", complex_json(e.predicted)},
                      {"significant", e.significant}});
    }
    doc["layer3"] = l3;

    Json guidance = Json::array();
    for (const auto& g : report.guidance) {
        guidance.push_back({{"component", g.component},
                            {"param", g.param},
                            {"direction", direction_name(g.direction)},
                            {"rationale", g.rationale},
                            {"predicted", complex_json(g.predicted)}});
    }
    doc["guidance"] = guidance;
    return doc;
}

Json scan_peaks_json(const ScanResult& scan, int row, int col) {
    Json peaks = Json::array();
    for (std::size_t j : scan.peaks)
        peaks.push_back({{"index", j}, {"freq_hz", scan.freq_hz[j]}, {"magnitude", std::abs(scan.values[j])}});
    return Json{{"entry", Json::array({row + 1, col + 1})}, {"points", scan.freq_hz.size()}, {"peaks", peaks}};
}

Json fit_json(const PoleResidueModel& model) {
    Json poles = Json::array();
    std::size_t index = 0;
    for (std::size_t k = 0; k < model.poles.size(); ++k) {
        const Complex p = model.poles[k];
        if (p.imag() < 0.0) continue;
        Mode m;
        m.lambda = p;
        Json j = mode_json(m, index++, p.imag() > 0.0);
        j.erase("near_repeated");
        j["unstable"] = bool(model.unstable[k]);
        Json residues = Json::array();
        for (const auto& [key, r] : model.residues) {
            residues.push_back({{"entry", entry_json(key)}, {"re", r[k].real()}, {"im", r[k].imag()}});
        }
        j["residues"] = residues;
        poles.push_back(j);
    }
    Json direct = Json::array();
    for (const auto& [key, d] : model.direct) {
        direct.push_back({{"entry", entry_json(key)}, {"re", d.real()}, {"im", d.imag()}});
    }
    Json warnings = Json::array();
    if (model.any_unstable()) warnings.push_back("unstable poles in fit");
    return Json{{"order", model.poles.size()},
                {"iterations", model.iterations},
                {"misfit", model.misfit},
                {"poles", poles},
                {"direct", direct},
                {"warnings", warnings}};
}

Json tune_json(const TuneResult& r) {
    return Json{{"component", r.sensitivity.component},
                {"param", r.sensitivity.param},
                {"value", r.sensitivity.value},
                {"fraction", r.fraction},
                {"lambda", complex_json(r.lambda)},
                {"perturbed", complex_json(r.perturbed)},
                {"s_lambda_rho", complex_json(r.sensitivity.s_lambda_rho)},
                {"normalized", complex_json(r.sensitivity.normalized)},
                {"predicted", complex_json(r.predicted)},
                {"actual", complex_json(r.actual)},
                {"error", r.error}};
}

std::string dump_json(const Json& doc) {
    Json copy = doc;
    round_all(copy);
    return copy.dump(2) + "\n";
}

}  // namespace greybox
