#pragma once

// JSON and CSV persistence for curves, map specs, coefficient lists and reports.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "qcharm/catalog.hpp"
#include "qcharm/error.hpp"
#include "qcharm/geometry.hpp"
#include "qcharm/harmonic.hpp"
#include "qcharm/lindelof.hpp"
#include "qcharm/qc.hpp"
#include "qcharm/weights.hpp"

namespace qcharm::io {

using json = nlohmann::ordered_json;

inline json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError("malformed JSON in '" + path + "': " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
    if (!out) throw IoError("write failed for '" + path + "'");
}

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j)
{
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    throw IoError("expected a number or a [re, im] pair");
}

// ---------------------------------------------------------------------------
// curves

inline JordanCurve curve_from_json(const json& j)
{
    try {
        const std::string kind = j.value("kind", "named");
        if (kind == "named") {
            std::map<std::string, double> params;
            if (j.contains("params"))
                for (auto& [k, v] : j["params"].items()) params[k] = v.get<double>();
            return JordanCurve::named(j.at("name").get<std::string>(), params);
        }
        if (kind == "samples") {
            std::vector<Point> pts;
            for (const auto& p : j.at("points")) pts.push_back(complex_from_json(p));
            return JordanCurve::from_points(std::move(pts), j.value("name", "samples"));
        }
        throw IoError("unknown curve kind '" + kind + "' (valid: named, samples)");
    } catch (const json::exception& e) {
        throw IoError(std::string("bad curve JSON: ") + e.what());
    }
}

inline json to_json(const JordanCurve& c)
{
    json j;
    if (c.kind() == ParamKind::analytic && c.transform() == std::pair<cplx, cplx>{1.0, 0.0}) {
        j["kind"] = "named";
        j["name"] = c.name();
        j["params"] = json::object();
        for (auto& [k, v] : c.params()) j["params"][k] = v;
        return j;
    }
    j["kind"] = "samples";
    j["name"] = c.name();
    j["points"] = json::array();
    for (auto p : c.samples()) j["points"].push_back(to_json(p));
    return j;
}

// ---------------------------------------------------------------------------
// map specs

inline MapSpec spec_from_json(const json& j)
{
    try {
        const std::string kind = j.at("kind").get<std::string>();
        MapSpec s;
        if (kind == "identity") s = MapSpec::identity();
        else if (kind == "mobius") s = MapSpec::mobius(complex_from_json(j.at("a")), j.value("rot", 0.0));
        else if (kind == "shear") s = MapSpec::shear(complex_from_json(j.at("mu")));
        else if (kind == "sc_square") s = MapSpec::sc_square();
        else if (kind == "affine") s = MapSpec::affine(complex_from_json(j.at("alpha")), complex_from_json(j.value("beta", json(0.0))));
        else if (kind == "rkc") {
            Reparam r;
            if (j.contains("reparam")) {
                const auto& rp = j["reparam"];
                r.sin_terms = rp.value("sin", std::vector<double>{});
                r.cos_terms = rp.value("cos", std::vector<double>{});
                r.shift = rp.value("shift", 0.0);
            }
            s = MapSpec::rkc(curve_from_json(j.at("curve")), std::move(r));
        } else if (kind == "composed") {
            std::vector<MapSpec> stages;
            for (const auto& st : j.at("stages")) stages.push_back(spec_from_json(st));
            s = MapSpec::composed(std::move(stages));
        } else {
            throw IoError("unknown map kind '" + kind + "' (valid: identity, mobius, shear, rkc, sc_square, affine, composed)");
        }
        if (j.contains("label")) s.label = j["label"].get<std::string>();
        return s;
    } catch (const json::exception& e) {
        throw IoError(std::string("bad map spec JSON: ") + e.what());
    }
}

inline json to_json(const MapSpec& s)
{
    json j;
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, spec::Identity>) j["kind"] = "identity";
            else if constexpr (std::is_same_v<T, spec::Mobius>) {
                j["kind"] = "mobius";
                j["a"] = to_json(k.a);
                j["rot"] = k.rot;
            } else if constexpr (std::is_same_v<T, spec::Shear>) {
                j["kind"] = "shear";
                j["mu"] = to_json(k.mu);
            } else if constexpr (std::is_same_v<T, spec::Rkc>) {
                j["kind"] = "rkc";
                j["curve"] = to_json(*k.curve);
                j["reparam"] = {{"sin", k.reparam.sin_terms}, {"cos", k.reparam.cos_terms}, {"shift", k.reparam.shift}};
            } else if constexpr (std::is_same_v<T, spec::ScSquare>) j["kind"] = "sc_square";
            else if constexpr (std::is_same_v<T, spec::Affine>) {
                j["kind"] = "affine";
                j["alpha"] = to_json(k.alpha);
                j["beta"] = to_json(k.beta);
            } else {
                j["kind"] = "composed";
                j["stages"] = json::array();
                for (const auto& st : k.stages) j["stages"].push_back(to_json(st));
            }
        },
        s.kind);
    j["label"] = s.label;
    return j;
}

// ---------------------------------------------------------------------------
// coefficient files: { "N": int, "coeffs": [[re, im], ...] } indexed n = -N..N

inline HarmonicMap coeffs_from_json(const json& j)
{
    try {
        const long n = j.at("N").get<long>();
        const auto& arr = j.at("coeffs");
        if (n < 1 || arr.size() != static_cast<std::size_t>(2 * n + 1))
            throw IoError("coefficient file needs N >= 1 and 2N+1 coefficients");
        std::vector<cplx> c;
        c.reserve(arr.size());
        for (const auto& v : arr) c.push_back(complex_from_json(v));
        return HarmonicMap(std::move(c));
    } catch (const json::exception& e) {
        throw IoError(std::string("bad coefficient JSON: ") + e.what());
    }
}

inline json to_json(const HarmonicMap& m)
{
    json j;
    j["N"] = m.order();
    j["coeffs"] = json::array();
    for (auto c : m.coeffs()) j["coeffs"].push_back(to_json(c));
    return j;
}

// ---------------------------------------------------------------------------
// reports

inline json to_json(const QcReport& r)
{
    return {{"k_sup", r.k_sup},
            {"K", r.K},
            {"jacobian_min", r.jacobian_min},
            {"radii", r.radii},
            {"angles", r.angles},
            {"k_argmax", to_json(r.k_argmax)},
            {"distortion_defect", r.distortion_defect},
            {"distortion_holds", r.distortion_holds}};
}

inline json to_json(const ConditionReport& r)
{
    json j;
    j["condition"] = r.condition;
    for (auto& [k, v] : r.params) j[k] = v;
    j["constant"] = std::isfinite(r.constant) ? json(r.constant) : json("inf");
    j["per_depth"] = json::array();
    for (double v : r.per_depth) j["per_depth"].push_back(std::isfinite(v) ? json(v) : json("inf"));
    j["verdict"] = to_string(r.verdict);
    j["argmax"] = {{"depth", r.argmax.depth}, {"index", r.argmax.index}, {"shifted", r.argmax.shifted}};
    return j;
}

inline json to_json(const ProbeResult& p)
{
    auto entries = [](const std::vector<ProbeEntry>& es) {
        json a = json::array();
        for (const auto& e : es)
            a.push_back({{"exponent", e.exponent},
                         {"integral", std::isfinite(e.integral) ? json(e.integral) : json("inf")},
                         {"integral_half", std::isfinite(e.integral_half) ? json(e.integral_half) : json("inf")},
                         {"stable", e.stable}});
        return a;
    };
    return {{"best_kappa", p.best_kappa ? json(*p.best_kappa) : json(nullptr)},
            {"best_lambda", p.best_lambda ? json(*p.best_lambda) : json(nullptr)},
            {"kappa", entries(p.kappa)},
            {"lambda", entries(p.lambda)}};
}

inline json to_json(const BoundaryAngle& b)
{
    return {{"limit", b.limit}, {"defect", b.defect}, {"status", to_string(b.status)}, {"radii", b.radii},
            {"values", b.values}, {"defects", b.defects}};
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

/// Header row followed by numeric rows.
inline std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
        os << "\n";
    }
    return os.str();
}

inline std::string weight_csv(const WeightProfile& w)
{
    std::vector<std::vector<double>> rows;
    rows.reserve(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) rows.push_back({w.t(j), w[j]});
    return csv({"t", "w"}, rows);
}

inline std::string trace_csv(const std::vector<double>& trace)
{
    std::vector<std::vector<double>> rows;
    for (std::size_t d = 0; d < trace.size(); ++d) rows.push_back({double(d), trace[d]});
    return csv({"depth", "sup"}, rows);
}

inline std::string field_csv(const AngleField& f)
{
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < f.radii.size(); ++i)
        for (std::size_t j = 0; j < f.n_phi; ++j) rows.push_back({f.radii[i], f.phi(j), f.at(i, j)});
    return csv({"r", "phi", "U"}, rows);
}

} // namespace qcharm::io
