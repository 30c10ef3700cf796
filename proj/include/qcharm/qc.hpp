#pragma once

// Quasiconformality measurement and pointwise distortion diagnostics.

#include <algorithm>
#include <cmath>
#include <vector>

#include "qcharm/detail/numeric.hpp"
#include "qcharm/error.hpp"
#include "qcharm/geometry.hpp"
#include "qcharm/harmonic.hpp"

namespace qcharm {

/// Heinz-Hall lower bound for |g_z(0)|^2 + |g_zbar(0)|^2 over harmonic self-maps of the disk fixing 0.
inline constexpr double heinz_bound = 27.0 / (4.0 * pi * pi);

struct QcReport {
    double k_sup = 0;
    double K = 1;
    double jacobian_min = 0;
    std::vector<double> radii;
    std::size_t angles = 0;
    cplx k_argmax;             ///< grid point attaining k_sup
    double distortion_defect = 0;  ///< max relative excess of (|f_z|+|f_zbar|)^2 over K J
    bool distortion_holds = true;
};

/// Wirtinger derivatives on radii x angles; k_sup = max |f_zbar / f_z|.
inline QcReport measure_qc(const HarmonicMap& map, const std::vector<double>& radii, std::size_t angles)
{
    if (radii.empty()) throw PreconditionError("measure_qc needs at least one radius");
    for (double r : radii)
        if (!(r >= 0 && r <= 0.999)) throw PreconditionError(detail::concat("measure_qc radii must lie in [0, 0.999], got ", r));
    if (angles < 64) throw PreconditionError("measure_qc needs at least 64 angles per radius");

    struct Row {
        double k = 0, jac = INFINITY;
        cplx arg;
        std::vector<std::pair<double, double>> moduli;  // (|f_z|, |f_zbar|)
    };
    std::vector<Row> rows(radii.size());
    detail::parallel_for(radii.size(), [&](std::size_t i) {
        Row& row = rows[i];
        row.moduli.resize(angles);
        for (std::size_t j = 0; j < angles; ++j) {
            cplx z = std::polar(radii[i], two_pi * double(j) / double(angles));
            auto [fz, fzb] = map.wirtinger(z);
            double a = std::abs(fz), b = std::abs(fzb);
            if (!(a > 0)) throw NotQuasiconformalError("not locally quasiconformal here: f_z = 0", z);
            double k = b / a;
            if (!(k < 1)) throw NotQuasiconformalError("not locally quasiconformal here: |f_zbar| >= |f_z|", z);
            if (k > row.k || j == 0) row.k = k, row.arg = z;
            row.jac = std::min(row.jac, a * a - b * b);
            row.moduli[j] = {a, b};
        }
    });

    QcReport rep;
    rep.radii = radii;
    rep.angles = angles;
    rep.jacobian_min = INFINITY;
    rep.k_sup = -1;
    for (const auto& row : rows) {
        if (row.k > rep.k_sup) rep.k_sup = row.k, rep.k_argmax = row.arg;
        rep.jacobian_min = std::min(rep.jacobian_min, row.jac);
    }
    rep.K = (1 + rep.k_sup) / (1 - rep.k_sup);
    for (const auto& row : rows) {
        for (auto [a, b] : row.moduli) {
            double lhs = (a + b) * (a + b);
            double rhs = rep.K * (a * a - b * b);
            rep.distortion_defect = std::max(rep.distortion_defect, (lhs - rhs) / lhs);
        }
    }
    rep.distortion_defect = std::max(0.0, rep.distortion_defect);
    rep.distortion_holds = rep.distortion_defect <= 1e-10;
    return rep;
}

struct HeinzResult {
    double lhs = 0;
    double bound = heinz_bound;
    bool pass = false;
};

/// |c_1|^2 + |c_{-1}|^2 against 27/(4 pi^2). Needs a self-map of the disk fixing 0.
inline HeinzResult heinz_check(const HarmonicMap& map)
{
    for (auto v : map.grid())
        if (std::abs(std::abs(v) - 1.0) > 1e-6)
            throw PreconditionError("heinz_check needs boundary values on the unit circle (target is not the disk)");
    if (std::abs(map.coeff(0)) > 1e-8) throw PreconditionError("heinz_check needs f(0) = 0");
    HeinzResult r;
    r.lhs = std::norm(map.coeff(1)) + std::norm(map.coeff(-1));
    r.pass = r.lhs >= r.bound;
    return r;
}

/// Closed polygon through n arc-length stations of a curve, for distance queries.
class BoundaryPolygon {
public:
    BoundaryPolygon(const JordanCurve& curve, std::size_t n)
    {
        ArcLengthParam g(curve, n);
        pts_.assign(g.stations().begin(), g.stations().end());
    }

    double distance(cplx p) const
    {
        double best = INFINITY;
        const std::size_t n = pts_.size();
        for (std::size_t i = 0; i < n; ++i) {
            cplx a = pts_[i], d = pts_[(i + 1) % n] - a;
            double t = std::clamp(std::real((p - a) * std::conj(d)) / std::norm(d), 0.0, 1.0);
            best = std::min(best, std::norm(a + t * d - p));
        }
        return std::sqrt(best);
    }

private:
    std::vector<cplx> pts_;
};

/// (2 pi / (3 sqrt 6)) sqrt(1 + K^2).
inline double ck_constant(double K)
{
    if (!(K >= 1)) throw DomainError(detail::concat("ck_constant needs K >= 1, got ", K));
    return two_pi / (3 * std::sqrt(6.0)) * std::sqrt(1 + K * K);
}

/// 3 sqrt3 (1+K) / (2 sqrt2 pi sqrt(1+K^2)), the factor multiplying dist(f(0), boundary).
inline double dz0_factor(double K) { return 3 * std::sqrt(3.0) * (1 + K) / (2 * std::sqrt(2.0) * pi * std::sqrt(1 + K * K)); }

struct Dz0Result {
    double lhs = 0;   ///< |f_z(0)|
    double rhs = 0;   ///< factor(K) * dist(f(0), boundary)
    double dist = 0;
    bool pass = false;
};

inline Dz0Result dz0_lower_bound(const HarmonicMap& map, const JordanCurve& curve, double K)
{
    if (!(K >= 1)) throw DomainError("dz0_lower_bound needs K >= 1");
    Dz0Result r;
    r.lhs = std::abs(map.coeff(1));
    BoundaryPolygon poly(curve, std::max<std::size_t>(64, 8 * static_cast<std::size_t>(map.order())));
    r.dist = poly.distance(map.coeff(0));
    r.rhs = dz0_factor(K) * r.dist;
    r.pass = r.lhs >= r.rhs;
    return r;
}

namespace detail {

/// Max over pairs of (arc between them) / chord for an open polyline.
inline double open_chord_arc(const std::vector<cplx>& p)
{
    std::vector<double> cum(p.size(), 0.0);
    for (std::size_t i = 1; i < p.size(); ++i) cum[i] = cum[i - 1] + std::abs(p[i] - p[i - 1]);
    double best = 1.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = i + 1; j < p.size(); ++j) {
            double chord = std::abs(p[j] - p[i]);
            if (chord <= 1e-15 * cum.back()) continue;
            best = std::max(best, (cum[j] - cum[i]) / chord);
        }
    }
    return best;
}

} // namespace detail

/// Chord-arc constant of the image of the diameter e^{it}[-1+eps, 1-eps], eps = 1e-3.
inline double diameter_image_chordarc(const HarmonicMap& map, double t, std::size_t samples)
{
    if (samples < 16) throw PreconditionError("diameter_image_chordarc needs at least 16 samples");
    constexpr double eps = 1e-3;
    const cplx dir = std::polar(1.0, t);
    std::vector<cplx> pts(samples);
    detail::parallel_for(samples, [&](std::size_t j) {
        double x = -1 + eps + (2 - 2 * eps) * double(j) / double(samples - 1);
        pts[j] = map.evaluate(x * dir);
    });
    if (auto bad = detail::polyline_self_intersection(pts, false))
        throw GeometryError("image of the diameter self-intersects", double(*bad));
    return detail::open_chord_arc(pts);
}

struct GradientDistance {
    std::vector<double> radii;
    std::vector<double> min_ratio, max_ratio;
    bool within_bounds = true;  ///< all ratios in [1/C, C], C = 50
    bool blowup = false;        ///< max ratio grows by more than 2x at every radius step
};

/// |Df(z)| (1 - |z|) / dist(f(z), boundary) with |Df| = |f_z| + |f_zbar|.
inline GradientDistance gradient_distance_ratio(const HarmonicMap& map, const JordanCurve& curve,
                                                std::vector<double> radii = {0.9, 0.99, 0.999}, std::size_t angles = 64)
{
    constexpr double C = 50.0;
    BoundaryPolygon poly(curve, std::max<std::size_t>(64, 8 * static_cast<std::size_t>(map.order())));
    GradientDistance g;
    g.radii = radii;
    g.min_ratio.assign(radii.size(), INFINITY);
    g.max_ratio.assign(radii.size(), 0.0);
    detail::parallel_for(radii.size(), [&](std::size_t i) {
        for (std::size_t j = 0; j < angles; ++j) {
            cplx z = std::polar(radii[i], two_pi * double(j) / double(angles));
            auto [fz, fzb] = map.wirtinger(z);
            double ratio = (std::abs(fz) + std::abs(fzb)) * (1 - radii[i]) / poly.distance(map.evaluate(z));
            g.min_ratio[i] = std::min(g.min_ratio[i], ratio);
            g.max_ratio[i] = std::max(g.max_ratio[i], ratio);
        }
    });
    for (std::size_t i = 0; i < radii.size(); ++i)
        if (!(g.min_ratio[i] >= 1 / C && g.max_ratio[i] <= C)) g.within_bounds = false;
    g.blowup = radii.size() >= 2;
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(g.max_ratio[i] > 2 * g.max_ratio[i - 1])) g.blowup = false;
    return g;
}

} // namespace qcharm
