#pragma once

// Run configuration, the catalog-wide suite and plot-data emission.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcharm/catalog.hpp"
#include "qcharm/io.hpp"
#include "qcharm/lindelof.hpp"
#include "qcharm/qc.hpp"
#include "qcharm/weights.hpp"

namespace qcharm {

inline constexpr const char* suite_schema = "qcharm.suite/1";

struct RunConfig {
    std::string command = "suite";
    std::string map = "catalog";  ///< catalog name (see catalog_names) or a spec / coefficient file
    std::string curve;            ///< optional curve file overriding the spec's target
    std::size_t N = 2048;
    int depth = 10;
    double p = 2.0;
    double q = 1.5;
    double eps = 0.1;
    std::vector<double> radii{0.9, 0.99, 0.999};
    std::size_t n_phi = 64;
    std::uint64_t seed = detail::default_seed;
    std::size_t apo_arcs = 20;
    std::vector<double> kappa{0.25, 0.5, 1.0};
    std::vector<double> lambda{1.25, 1.5, 2.0};
    std::string report;                    ///< JSON report path
    std::vector<std::string> emit;         ///< "tag:path"
    bool timing = false;                   ///< include stage timings in the report

    void validate() const
    {
        if (!detail::is_power_of_two(N) || N < 64) throw PreconditionError("N must be a power of two >= 64");
        if (depth < 1) throw PreconditionError("depth must be >= 1");
        if (!curve.empty() && !std::filesystem::exists(curve)) throw IoError("curve file '" + curve + "' does not exist");
    }
};

/// Applies config-file keys. Keys already set on the command line win unless `file_wins`.
inline void merge_config(RunConfig& cfg, const io::json& j, const std::vector<std::string>& cli_set, bool file_wins)
{
    auto take = [&](const char* key) {
        if (!j.contains(key)) return false;
        bool on_cli = std::find(cli_set.begin(), cli_set.end(), key) != cli_set.end();
        return file_wins || !on_cli;
    };
    try {
        if (take("command")) cfg.command = j["command"].get<std::string>();
        if (take("map")) cfg.map = j["map"].get<std::string>();
        if (take("curve")) cfg.curve = j["curve"].get<std::string>();
        if (take("N")) cfg.N = j["N"].get<std::size_t>();
        if (take("depth")) cfg.depth = j["depth"].get<int>();
        if (take("p")) cfg.p = j["p"].get<double>();
        if (take("q")) cfg.q = j["q"].get<double>();
        if (take("eps")) cfg.eps = j["eps"].get<double>();
        if (take("radii")) cfg.radii = j["radii"].get<std::vector<double>>();
        if (take("n_phi")) cfg.n_phi = j["n_phi"].get<std::size_t>();
        if (take("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (take("apo_arcs")) cfg.apo_arcs = j["apo_arcs"].get<std::size_t>();
        if (take("kappa")) cfg.kappa = j["kappa"].get<std::vector<double>>();
        if (take("lambda")) cfg.lambda = j["lambda"].get<std::vector<double>>();
        if (take("report")) cfg.report = j["report"].get<std::string>();
        if (take("emit")) cfg.emit = j["emit"].get<std::vector<std::string>>();
        if (take("timing")) cfg.timing = j["timing"].get<bool>();
    } catch (const io::json::exception& e) {
        throw IoError(std::string("bad config value: ") + e.what());
    }
}

inline std::vector<std::string> catalog_names()
{
    return {"identity", "mobius", "shear", "rkc-circle", "rkc-ellipse", "rkc-polar", "sc_square"};
}

/// Named catalog maps; "mobius:0.5" and "shear:0.2" override the parameter.
inline std::optional<MapSpec> catalog_spec(const std::string& name)
{
    std::string base = name;
    std::optional<double> param;
    if (auto colon = name.find(':'); colon != std::string::npos) {
        base = name.substr(0, colon);
        try {
            param = std::stod(name.substr(colon + 1));
        } catch (const std::exception&) {
            throw IoError("bad catalog parameter in '" + name + "'");
        }
    }
    MapSpec s;
    if (base == "identity") s = MapSpec::identity();
    else if (base == "mobius") s = MapSpec::mobius(param.value_or(0.3));
    else if (base == "shear") s = MapSpec::shear(param.value_or(0.3));
    else if (base == "rkc-circle") s = MapSpec::rkc(JordanCurve::circle(), Reparam::sine(param.value_or(0.2), 2));
    else if (base == "rkc-ellipse") s = MapSpec::rkc(JordanCurve::ellipse(1.5, 1.0), Reparam::sine(param.value_or(0.2), 1));
    else if (base == "rkc-polar") s = MapSpec::rkc(JordanCurve::polar(0.1, 3), Reparam::sine(param.value_or(0.15), 2));
    else if (base == "sc_square") s = MapSpec::sc_square();
    else return std::nullopt;
    s.label = name;
    return s;
}

struct MapSource {
    std::string label;
    HarmonicMap map;
    JordanCurve curve;
};

/// Resolves a catalog name, a map-spec file or a coefficient file. A coefficient file needs a curve.
inline MapSource load_map(const std::string& what, std::size_t n, const std::string& curve_path)
{
    std::optional<JordanCurve> curve;
    if (!curve_path.empty()) curve = io::curve_from_json(io::read_json_file(curve_path));
    if (auto s = catalog_spec(what)) {
        JordanCurve c = curve ? *curve : target_curve(*s);
        return {s->label, build_map(*s, n), c};
    }
    if (!std::filesystem::exists(what))
        throw IoError("map '" + what + "' is neither a catalog name nor an existing file");
    auto j = io::read_json_file(what);
    if (j.contains("coeffs")) {
        if (!curve) throw PreconditionError("a coefficient file needs --curve for its target curve");
        return {std::filesystem::path(what).stem().string(), io::coeffs_from_json(j), *curve};
    }
    MapSpec s = io::spec_from_json(j);
    JordanCurve c = curve ? *curve : target_curve(s);
    return {s.label, build_map(s, n), c};
}

struct MapResult {
    std::string label;
    io::json results;
    bool passed = true;
    std::vector<std::string> failures;
    std::vector<double> weight_t, weight_w;
    std::map<std::string, std::vector<double>> traces;  ///< "ap", "cf-i", "gehring", "bmo"
    std::optional<AngleField> field;
};

struct SuiteReport {
    std::string schema = suite_schema;
    io::json config;
    std::vector<MapResult> maps;
    bool passed = true;
    std::vector<std::pair<std::string, double>> timing;  ///< stage, seconds

    /// Deterministic report; timing only when requested.
    io::json to_json(bool with_timing = false) const
    {
        io::json j;
        j["schema"] = schema;
        j["config"] = config;
        j["passed"] = passed;
        j["maps"] = io::json::array();
        for (const auto& m : maps) {
            io::json e;
            e["label"] = m.label;
            e["passed"] = m.passed;
            e["failures"] = m.failures;
            e["results"] = m.results;
            j["maps"].push_back(e);
        }
        if (with_timing) {
            j["timing"] = io::json::object();
            for (auto& [k, v] : timing) j["timing"][k] = v;
        }
        return j;
    }
};

namespace detail {

struct StageTimer {
    SuiteReport& rep;
    std::string name;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    ~StageTimer()
    {
        rep.timing.emplace_back(name, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
};

/// Runs one stage; a library error becomes a failure naming the stage.
template <class Fn>
void stage(SuiteReport& rep, MapResult& m, const std::string& name, Fn&& fn)
{
    StageTimer t{rep, m.label + "/" + name};
    try {
        fn();
    } catch (const Error& e) {
        m.results[name] = {{"error", e.what()}};
        m.failures.push_back(name + ": " + e.what());
        m.passed = false;
    }
}

inline void check(MapResult& m, bool ok, const std::string& what)
{
    if (!ok) {
        m.failures.push_back(what);
        m.passed = false;
    }
}

inline io::json config_json(const RunConfig& c)
{
    return {{"command", c.command}, {"map", c.map},   {"curve", c.curve},   {"N", c.N},
            {"depth", c.depth},     {"p", c.p},       {"q", c.q},           {"eps", c.eps},
            {"radii", c.radii},     {"n_phi", c.n_phi}, {"seed", c.seed},   {"apo_arcs", c.apo_arcs},
            {"kappa", c.kappa},     {"lambda", c.lambda}};
}

} // namespace detail

/// Runs every diagnostic on one map. Asserted checks: the distortion inequality, Heinz-Hall
/// (disk self-maps fixing 0), the |f_z(0)| lower bound, the quasi-harmonic measure bound and,
/// for C1 targets, the tangent-angle identity. Weight conditions are recorded, not asserted.
inline MapResult run_map(SuiteReport& rep, const RunConfig& cfg, const MapSource& src)
{
    MapResult m;
    m.label = src.label;
    m.results = io::json::object();
    const HarmonicMap& map = src.map;
    const JordanCurve& curve = src.curve;
    double K = 1;
    bool qc_ok = false;

    detail::stage(rep, m, "qc", [&] {
        std::vector<double> radii{0.0, 0.5, 0.9};
        for (double r : cfg.radii)
            if (r <= 0.999 && std::find(radii.begin(), radii.end(), r) == radii.end()) radii.push_back(r);
        auto q = measure_qc(map, radii, 64);
        K = q.K;
        qc_ok = true;
        m.results["qc"] = io::to_json(q);
        detail::check(m, q.distortion_holds, "qc: distortion inequality violated");
    });

    detail::stage(rep, m, "heinz", [&] {
        try {
            auto h = heinz_check(map);
            m.results["heinz"] = {{"lhs", h.lhs}, {"bound", h.bound}, {"pass", h.pass}};
            detail::check(m, h.pass, "heinz: lhs below bound");
        } catch (const PreconditionError& e) {
            m.results["heinz"] = {{"skipped", e.what()}};
        }
    });

    if (qc_ok) {
        detail::stage(rep, m, "dz0", [&] {
            auto d = dz0_lower_bound(map, curve, K);
            m.results["dz0"] = {{"lhs", d.lhs}, {"rhs", d.rhs}, {"dist", d.dist}, {"pass", d.pass}};
            detail::check(m, d.pass, "dz0: |f_z(0)| below bound");
        });
    }

    detail::stage(rep, m, "weights", [&] {
        auto w = boundary_weight(map);
        for (std::size_t j = 0; j < w.size(); ++j) {
            m.weight_t.push_back(w.t(j));
            m.weight_w.push_back(w[j]);
        }
        const int depth = std::min(cfg.depth, detail::log2_exact(w.size()) - 2);
        io::json wj;
        wj["integral"] = w.integral();
        wj["length"] = curve.length();
        wj["zero_samples"] = w.zero_count();
        auto ap = check_ap(w, cfg.p, depth);
        auto cfi = check_cf_i(w, depth);
        auto cfii = check_cf_ii(w, cfg.eps, depth);
        auto geh = check_gehring(w, cfg.q, depth);
        wj["ap"] = io::to_json(ap);
        wj["cf_i"] = io::to_json(cfi);
        wj["cf_ii"] = io::to_json(cfii);
        wj["gehring"] = io::to_json(geh);
        m.traces["ap"] = ap.per_depth;
        m.traces["cf-i"] = cfi.per_depth;
        m.traces["gehring"] = geh.per_depth;
        if (w.zero_count() == 0) {
            auto lw = log_samples(w);
            auto bmo = bmo_norm(lw, depth);
            auto conj = bmo_norm(conjugate_function(lw), depth);
            wj["bmo_log_w"] = io::to_json(bmo);
            wj["bmo_conjugate_log_w"] = io::to_json(conj);
            m.traces["bmo"] = bmo.per_depth;
        } else {
            wj["bmo_log_w"] = {{"skipped", "weight has zero samples"}};
        }
        wj["probe"] = io::to_json(integrability_probe(w, cfg.kappa, cfg.lambda));
        m.results["weights"] = wj;
    });

    if (qc_ok) {
        detail::stage(rep, m, "apo", [&] {
            auto norm = normalize_for_apo(map, curve, K);
            BoundaryCorrespondence bc(norm.map, norm.curve);
            BoundaryPolygon poly(norm.curve, std::max<std::size_t>(64, 8 * static_cast<std::size_t>(map.order())));
            const double dist = poly.distance(norm.map.coeff(0));
            detail::Rng rng(cfg.seed);
            std::size_t violations = 0;
            double worst = 0;
            for (std::size_t i = 0; i < cfg.apo_arcs; ++i) {
                double sigma = std::exp(rng.uniform(std::log(1e-4), std::log(0.1)));
                double start = rng.uniform(0, bc.length());
                auto r = apo_bound_check(bc, dist, K, {{start, start + sigma}});
                if (!r.pass) ++violations;
                worst = std::max(worst, r.lhs / r.rhs);
            }
            m.results["apo"] = {{"arcs", cfg.apo_arcs}, {"violations", violations}, {"worst_ratio", worst}, {"scale", norm.scale}};
            detail::check(m, violations == 0, "apo: bound violated");
        });
    }

    if (qc_ok) {
        detail::stage(rep, m, "lindelof", [&] {
            std::vector<double> radii;
            for (double r : cfg.radii)
                if (r > 0 && r < 1) radii.push_back(r);
            if (!radii.empty()) m.field = angle_field(map, radii, cfg.n_phi);
            io::json lj;
            if (curve.is_c1()) {
                auto idc = lindelof_identity_check(map, curve, cfg.n_phi);
                lj["identity_max_error"] = idc.max_error;
                double dmax = 0;
                for (double d : idc.defect) dmax = std::max(dmax, d);
                lj["max_defect"] = dmax;
                detail::check(m, idc.max_error < 1e-3, "lindelof: identity error above 1e-3");
            } else {
                BranchTracker tr(map);
                io::json per = io::json::array();
                for (int j = 0; j < 8; ++j) {
                    double phi = two_pi * j / 8.0;
                    auto b = boundary_angle(tr, phi);
                    per.push_back({{"phi", phi}, {"limit", b.limit}, {"defect", b.defect}, {"status", to_string(b.status)}});
                }
                lj["identity_skipped"] = "target curve is not C1";
                lj["boundary_angles"] = per;
            }
            m.results["lindelof"] = lj;
        });
    }
    return m;
}

inline SuiteReport run_suite(const RunConfig& cfg)
{
    cfg.validate();
    SuiteReport rep;
    rep.config = detail::config_json(cfg);
    std::vector<std::string> names;
    if (cfg.map == "catalog") names = catalog_names();
    else names.push_back(cfg.map);
    for (const auto& name : names) {
        std::optional<MapSource> src;
        {
            detail::StageTimer t{rep, name + "/build"};
            src = load_map(name, cfg.N, cfg.curve);
        }
        rep.maps.push_back(run_map(rep, cfg, *src));
        rep.passed = rep.passed && rep.maps.back().passed;
    }
    return rep;
}

inline std::vector<std::string> plot_tags() { return {"weight", "ap-trace", "cf-i-trace", "gehring-trace", "bmo-trace", "lindelof-field"}; }

/// Writes the CSV for a tag. With several maps, "{map}" in the path is replaced by each label;
/// otherwise the first map is used.
inline void emit_plot_data(const SuiteReport& rep, const std::string& what, const std::string& out)
{
    auto tags = plot_tags();
    if (std::find(tags.begin(), tags.end(), what) == tags.end()) {
        std::string valid;
        for (const auto& t : tags) valid += (valid.empty() ? "" : ", ") + t;
        throw IoError("unknown plot tag '" + what + "' (valid: " + valid + ")");
    }
    if (rep.maps.empty()) throw PreconditionError("report has no maps");
    const bool per_map = out.find("{map}") != std::string::npos;
    for (const auto& m : rep.maps) {
        std::string path = out;
        if (per_map) path.replace(path.find("{map}"), 5, m.label);
        std::string text;
        if (what == "weight") {
            if (m.weight_w.empty()) throw PreconditionError("weight series missing for " + m.label);
            std::vector<std::vector<double>> rows;
            for (std::size_t j = 0; j < m.weight_w.size(); ++j) rows.push_back({m.weight_t[j], m.weight_w[j]});
            text = io::csv({"t", "w"}, rows);
        } else if (what == "lindelof-field") {
            if (!m.field) throw PreconditionError("lindelof field missing for " + m.label);
            text = io::field_csv(*m.field);
        } else {
            std::string key = what.substr(0, what.size() - 6);  // strip "-trace"
            auto it = m.traces.find(key);
            if (it == m.traces.end()) throw PreconditionError(what + " missing for " + m.label);
            text = io::trace_csv(it->second);
        }
        io::write_text_file(path, text);
        if (!per_map) break;
    }
}

} // namespace qcharm
