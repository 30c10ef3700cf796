// Runs the twelve acceptance criteria and prints one PASS/FAIL line for each.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "oracles.hpp"
#include "qcharm/qcharm.hpp"

using namespace qcharm;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream note;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            if (pass) note << "failed: ";
            else note << "; ";
            note << what;
            pass = false;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::vector<MapSpec> catalog()
{
    std::vector<MapSpec> out;
    for (const auto& n : catalog_names()) out.push_back(*catalog_spec(n));
    return out;
}

// shear(0.3) and two RKC maps onto C1 convex curves
std::vector<MapSpec> smooth_trio() { return {*catalog_spec("shear"), *catalog_spec("rkc-ellipse"), *catalog_spec("rkc-polar")}; }

const std::vector<double> grid_radii{0.0, 0.5, 0.9, 0.99, 0.999};

void c1(Outcome& o)
{
    auto t0 = std::chrono::steady_clock::now();
    double worst_norm = 0;
    for (double r : {0.0, 0.5, 0.99}) {
        const int m = 1 << 14;
        long double s = 0;
        for (int j = 0; j < m; ++j) s += poisson_kernel(r, two_pi * j / m);
        worst_norm = std::max(worst_norm, std::abs(double(s * two_pi / m) - 1.0));
    }
    o.require(worst_norm < 1e-12, "kernel normalization " + fmt(worst_norm));
    detail::Rng rng(101);
    double worst = 0;
    for (const char* name : {"mobius", "shear", "rkc-ellipse"}) {
        auto s = *catalog_spec(name);
        auto m = build_map(s, 2048);
        for (int i = 0; i < 20; ++i) {
            double r = rng.uniform(0, 0.9), phi = rng.uniform(0, two_pi);
            cplx quad = oracle::poisson_integral([&](double t) { return boundary(s, t); }, r, phi);
            worst = std::max(worst, std::abs(m.evaluate(DiskPoint{r, phi}) - quad));
        }
    }
    o.require(worst < 1e-9, "spectral vs quadrature " + fmt(worst));
    double sec = seconds_since(t0);
    o.require(sec < 5, "runtime " + fmt(sec) + " s");
    o.note << (o.pass ? "" : "; ") << "kernel " << fmt(worst_norm) << ", eval " << fmt(worst) << ", " << fmt(sec) << " s";
}

void c2(Outcome& o)
{
    double res = 0, pol = 0;
    for (const auto& s : catalog()) {
        auto m = build_map(s, 1 << 11);
        for (double r : grid_radii)
            for (int j = 0; j < 64; ++j) {
                cplx z = std::polar(r, two_pi * j / 64);
                cplx f = m.evaluate(z);
                res = std::max(res, std::abs(f - (m.a(z) + std::conj(m.b(z)))) / std::max(1.0, std::abs(f)));
                auto [fz, fzb] = m.wirtinger(z);
                cplx d = m.d_phi(z);
                pol = std::max(pol, std::abs(d - (cplx(0, 1) * z * fz - cplx(0, 1) * std::conj(z) * fzb)) / std::max(1.0, std::abs(d)));
            }
    }
    o.require(res < 1e-10, "residual " + fmt(res));
    o.require(pol < 1e-10, "d_phi identity " + fmt(pol));
    o.note << (o.pass ? "" : "; ") << "residual " << fmt(res) << ", d_phi " << fmt(pol);
}

void c3(Outcome& o)
{
    double k_id = measure_qc(build_map(MapSpec::identity(), 2048), grid_radii, 128).K;
    double k_sh = measure_qc(build_map(MapSpec::shear(0.3), 2048), grid_radii, 128).K;
    o.require(std::abs(k_id - 1) <= 1e-10, "identity K " + fmt(k_id));
    o.require(std::abs(k_sh - 13.0 / 7.0) <= 1e-10, "shear K " + fmt(k_sh));
    double defect = 0;
    for (const auto& s : catalog()) {
        auto q = measure_qc(build_map(s, 2048), grid_radii, 128);
        o.require(q.distortion_holds, "distortion fails for " + s.label);
        defect = std::max(defect, q.distortion_defect);
    }
    o.note << (o.pass ? "" : "; ") << "K(identity) = " << k_id << ", K(shear) = " << k_sh << ", distortion defect " << fmt(defect);
}

void c4(Outcome& o)
{
    std::vector<Reparam> self{Reparam::sine(0.1, 2), Reparam::sine(0.2, 2), Reparam::sine(0.3, 2), Reparam::sine(0.15, 4)};
    Reparam mixed;
    mixed.sin_terms = {0, 0.1};
    mixed.cos_terms = {0, 0, 0, 0, 0, 0.1};
    self.push_back(mixed);
    double lo = INFINITY;
    for (const auto& r : self) {
        auto h = heinz_check(build_map(MapSpec::rkc(JordanCurve::circle(), r), 2048));
        o.require(h.pass, "lhs " + fmt(h.lhs) + " below bound");
        lo = std::min(lo, h.lhs);
    }
    auto id = heinz_check(build_map(MapSpec::identity(), 64));
    o.require(id.lhs == 1.0, "identity lhs " + fmt(id.lhs));
    o.note << (o.pass ? "" : "; ") << self.size() << " self-maps, min lhs " << lo << " >= " << heinz_bound;
}

WeightProfile trio_weight(const MapSpec& s, std::size_t m) { return boundary_weight(build_map(s, 2048), m); }

void c5(Outcome& o)
{
    auto t0 = std::chrono::steady_clock::now();
    for (const auto& s : smooth_trio()) {
        auto w = trio_weight(s, 1 << 12);
        for (const auto& r : {check_cf_i(w, 10), check_ap(w, 2, 10), check_gehring(w, 1.5, 10)}) {
            const auto& t = r.per_depth;
            bool stable = std::abs(t[10] - t[8]) <= 0.05 * std::abs(t[8]);
            o.require(r.verdict == Verdict::bounded && stable, s.label + " " + r.condition + " " + to_string(r.verdict));
        }
    }
    double sec = seconds_since(t0);
    o.require(sec < 60, "runtime " + fmt(sec) + " s");
    o.note << (o.pass ? "" : "; ") << "cf-i, A_2, B_1.5 bounded on 3 maps, " << fmt(sec) << " s";
}

void c6(Outcome& o)
{
    for (const auto& s : smooth_trio()) {
        auto m = build_map(s, 2048);
        auto w = boundary_weight(m, 1 << 12);
        auto p = integrability_probe(w, {0.25, 0.5, 1.0}, {1.25, 1.5, 2.0});
        o.require(p.best_kappa >= 0.25 && p.best_lambda >= 1.25, s.label + " probe");
        auto b1 = bmo_norm(log_samples(w), 10);
        auto b2 = bmo_norm(log_samples(boundary_weight(m, 1 << 13)), 10);
        bool stable = std::isfinite(b1.constant) && std::abs(b1.constant - b2.constant) <= 0.05 * b2.constant;
        o.require(stable, s.label + " bmo(log w) " + fmt(b1.constant) + " vs " + fmt(b2.constant));
        auto c = bmo_norm(conjugate_function(log_samples(w)), 10);
        o.require(std::isfinite(c.constant), s.label + " bmo(conj log w) infinite");
    }
    o.note << (o.pass ? "" : "; ") << "probe, BMO(log w) and BMO(conj log w) on 3 maps";
}

void c7(Outcome& o)
{
    std::size_t checked = 0, violations = 0;
    double worst = 0;
    for (const auto& s : catalog()) {
        auto m = build_map(s, 1024);
        auto curve = target_curve(s);
        double K = measure_qc(m, grid_radii, 64).K;
        auto norm = normalize_for_apo(m, curve, K);
        BoundaryCorrespondence bc(norm.map, norm.curve);
        BoundaryPolygon poly(norm.curve, 8 * 1024);
        const double dist = poly.distance(norm.map.coeff(0));
        detail::Rng rng(7007);
        for (int i = 0; i < 100; ++i) {
            double sigma = std::exp(rng.uniform(std::log(1e-4), std::log(0.1)));  // arc length of E
            double start = rng.uniform(0, bc.length());
            auto r = apo_bound_check(bc, dist, K, {{start, start + sigma}});
            ++checked;
            if (!r.pass) ++violations;
            worst = std::max(worst, r.lhs / r.rhs);
        }
    }
    o.require(violations == 0, std::to_string(violations) + " violations");
    o.note << (o.pass ? "" : "; ") << checked << " arcs, worst lhs/rhs " << fmt(worst);
}

void c8(Outcome& o)
{
    auto sh = MapSpec::shear(0.3);
    double e_sh = lindelof_identity_check(build_map(sh, 2048), target_curve(sh), 256).max_error;
    o.require(e_sh < 1e-3, "shear " + fmt(e_sh));
    double e_mob = 0;
    for (auto s : {MapSpec::mobius(0.3), MapSpec::mobius(cplx(0.3, 0.1), 0.2)})
        e_mob = std::max(e_mob, lindelof_identity_check(build_map(s, 2048), target_curve(s), 256).max_error);
    o.require(e_mob < 1e-6, "mobius " + fmt(e_mob));
    // conformal reduction against closed-form derivatives
    double red = 0;
    detail::Rng rng(88);
    const cplx a(0.3, 0.1);
    auto mob = build_map(MapSpec::mobius(a, 0.2), 2048);
    auto sq = build_map(MapSpec::sc_square(), 2048);
    BranchTracker tm(mob), ts(sq);
    const double g = std::tgamma(0.25);
    const cplx sc_c = cplx(2, -2) * std::sqrt(2 * pi) / (g * g);
    for (int i = 0; i < 100; ++i) {
        cplx z = std::polar(rng.uniform(0.05, 0.9), rng.uniform(0, two_pi));
        red = std::max(red, std::abs(detail::wrap_angle(tm.angle(z) - std::arg(mobius_derivative(a, 0.2, z)) - pi / 2)));
        cplx sq_d = sc_c / std::sqrt(1.0 - std::pow(z, 4));
        red = std::max(red, std::abs(detail::wrap_angle(ts.angle(z) - std::arg(sq_d) - pi / 2)));
    }
    o.require(red < 1e-8, "conformal reduction " + fmt(red));
    o.note << (o.pass ? "" : "; ") << "shear " << fmt(e_sh) << ", mobius " << fmt(e_mob) << ", reduction " << fmt(red);
}

void c9(Outcome& o)
{
    auto m = build_map(MapSpec::sc_square(), 1 << 16);
    BranchTracker tr(m);
    double corner_min = INFINITY, side_max = 0;
    for (int c = 0; c < 4; ++c) {
        auto b = boundary_angle(tr, c * pi / 2);
        for (int k = 8; k <= 12; ++k) corner_min = std::min(corner_min, b.defects[k - 3]);
    }
    for (int j = 0; j < 16; ++j) side_max = std::max(side_max, boundary_angle(tr, (j + 0.5) * pi / 8).defect);
    o.require(corner_min > 0.1, "corner defect " + fmt(corner_min));
    o.require(side_max < 1e-2, "side defect " + fmt(side_max));
    o.note << (o.pass ? "" : "; ") << "min corner defect " << fmt(corner_min) << ", max side defect " << fmt(side_max);
}

void c10(Outcome& o)
{
    double worst = 0, full = 0;
    for (double eps : {0.1, 0.5, 1.0})
        for (double r : {0.0, 0.5, 0.9, 0.99}) worst = std::max(worst, std::abs(arc_mass_closed_form(r, eps) - arc_mass_quadrature(r, eps)));
    for (double r : {0.0, 0.5, 0.9, 0.99}) full = std::max(full, std::abs(arc_mass_closed_form(r, 2.0) - 1.0));
    o.require(worst < 1e-9, "closed form vs quadrature " + fmt(worst));
    o.require(full < 1e-12, "eps = 2 gives " + fmt(1 + full));
    o.note << (o.pass ? "" : "; ") << "max difference " << fmt(worst) << ", eps = 2 off by " << fmt(full);
}

void c11(Outcome& o)
{
    auto power = [](double alpha) {
        return WeightProfile::from_function([alpha](double t) { return std::pow(std::abs(std::polar(1.0, t) - 1.0), alpha); }, 1 << 14);
    };
    auto good = check_ap(power(0.5), 2, 10);
    auto bad = check_ap(power(1.5), 2, 10);
    o.require(good.verdict == Verdict::bounded, std::string("alpha = 1/2 ") + to_string(good.verdict));
    o.require(bad.verdict == Verdict::diverging, std::string("alpha = 3/2 ") + to_string(bad.verdict));
    o.note << (o.pass ? "" : "; ") << "alpha = 1/2 " << to_string(good.verdict) << " (" << fmt(good.constant) << "), alpha = 3/2 "
           << to_string(bad.verdict) << " (" << fmt(bad.constant) << ")";
}

void c12(Outcome& o)
{
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "qcharm_acceptance";
    fs::create_directories(dir);
    auto run = [&](const fs::path& report) {
        std::string cmd = std::string("\"") + QCHARM_CLI_PATH + "\" suite --map catalog --N 1024 --depth 8 --n-phi 32 --report \"" +
                          report.string() + "\" > /dev/null";
        return std::system(cmd.c_str());
    };
    auto read = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    int ra = run(dir / "a.json"), rb = run(dir / "b.json");
    o.require(ra == 0 && rb == 0, "suite exit codes " + std::to_string(ra) + ", " + std::to_string(rb));
    std::string a = read(dir / "a.json"), b = read(dir / "b.json");
    o.require(!a.empty() && a == b, "reports differ");
    o.note << (o.pass ? "" : "; ") << a.size() << " byte reports identical";
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
        {"poisson machinery", c1},        {"decomposition", c2},
        {"qc measurement", c3},           {"heinz bound on self-maps", c4},
        {"weight conditions bounded", c5}, {"integrability and bmo", c6},
        {"quasi-harmonic measure bound", c7}, {"tangent-angle identity", c8},
        {"corner dichotomy", c9},         {"arc mass", c10},
        {"power-weight A_2 dichotomy", c11}, {"determinism", c12}};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.note << "exception: " << e.what();
        }
        if (!o.pass) ++failed;
        std::printf("%s  C%-2zu %-30s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.note.str().c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
