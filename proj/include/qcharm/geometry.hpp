#pragma once

// Jordan curves, arc-length parametrizations, tangent angles and chord-arc geometry.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "qcharm/detail/numeric.hpp"
#include "qcharm/error.hpp"

namespace qcharm {

using Point = cplx;

enum class ParamKind { analytic, polyline };

/// Consecutive tangent turn above this marks a corner (non-C1 point).
inline constexpr double corner_threshold = 10.0 * pi / 180.0;

namespace detail {

inline double cross(Point a, Point b) { return a.real() * b.imag() - a.imag() * b.real(); }

inline double polygon_signed_area(std::span<const Point> p)
{
    double a = 0;
    for (std::size_t i = 0; i < p.size(); ++i) a += cross(p[i], p[(i + 1) % p.size()]);
    return 0.5 * a;
}

inline bool segments_cross(Point a, Point b, Point c, Point d)
{
    double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
    double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

/// Index of the first segment that properly crosses a non-adjacent segment, if any.
/// Segments are bucketed on a uniform grid so large polylines stay near-linear.
inline std::optional<std::size_t> polyline_self_intersection(std::span<const Point> p, bool closed)
{
    const std::size_t n = p.size();
    const std::size_t segs = closed ? n : n - 1;
    if (segs < 3) return std::nullopt;
    double xmin = p[0].real(), xmax = xmin, ymin = p[0].imag(), ymax = ymin;
    for (auto q : p) {
        xmin = std::min(xmin, q.real());
        xmax = std::max(xmax, q.real());
        ymin = std::min(ymin, q.imag());
        ymax = std::max(ymax, q.imag());
    }
    const std::size_t g = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(double(segs))));
    const double wx = std::max(xmax - xmin, 1e-300) / double(g);
    const double wy = std::max(ymax - ymin, 1e-300) / double(g);
    auto cell = [&](double v, double lo, double w) {
        return std::min<std::size_t>(g - 1, static_cast<std::size_t>(std::max(0.0, (v - lo) / w)));
    };
    std::vector<std::vector<std::size_t>> grid(g * g);
    for (std::size_t s = 0; s < segs; ++s) {
        Point a = p[s], b = p[(s + 1) % n];
        std::size_t x0 = cell(std::min(a.real(), b.real()), xmin, wx), x1 = cell(std::max(a.real(), b.real()), xmin, wx);
        std::size_t y0 = cell(std::min(a.imag(), b.imag()), ymin, wy), y1 = cell(std::max(a.imag(), b.imag()), ymin, wy);
        for (std::size_t x = x0; x <= x1; ++x)
            for (std::size_t y = y0; y <= y1; ++y) grid[x * g + y].push_back(s);
    }
    std::optional<std::size_t> first;
    for (const auto& bucket : grid) {
        for (std::size_t i = 0; i < bucket.size(); ++i) {
            for (std::size_t j = i + 1; j < bucket.size(); ++j) {
                std::size_t s = bucket[i], t = bucket[j];
                std::size_t diff = s > t ? s - t : t - s;
                if (diff <= 1 || (closed && diff == segs - 1)) continue;
                if (segments_cross(p[s], p[(s + 1) % n], p[t], p[(t + 1) % n])) {
                    std::size_t lo = std::min(s, t);
                    if (!first || lo < *first) first = lo;
                }
            }
        }
    }
    return first;
}

} // namespace detail

/// A closed, positively oriented, rectifiable planar curve.
///
/// Named analytic curves carry an exact parametrization over tau in [0, 2pi);
/// sample curves are closed polylines parametrized by normalized arc length.
/// Negatively oriented input is reversed and a warning is recorded.
class JordanCurve {
public:
    using Fn = std::function<Point(double)>;

    static JordanCurve circle(double radius = 1.0, Point center = {})
    {
        if (!(radius > 0)) throw DegenerateError("circle radius must be positive");
        JordanCurve c;
        c.name_ = "circle";
        c.params_ = {{"radius", radius}, {"cx", center.real()}, {"cy", center.imag()}};
        c.init_analytic([=](double t) { return center + std::polar(radius, t); },
                        [=](double t) { return Point(0, 1) * std::polar(radius, t); });
        return c;
    }

    static JordanCurve ellipse(double a, double b, Point center = {}, double rotation = 0.0)
    {
        if (!(a > 0 && b > 0)) throw DegenerateError("ellipse semi-axes must be positive");
        JordanCurve c;
        c.name_ = "ellipse";
        c.params_ = {{"a", a}, {"b", b}, {"cx", center.real()}, {"cy", center.imag()}, {"rotation", rotation}};
        const Point rot = std::polar(1.0, rotation);
        c.init_analytic([=](double t) { return center + rot * Point(a * std::cos(t), b * std::sin(t)); },
                        [=](double t) { return rot * Point(-a * std::sin(t), b * std::cos(t)); });
        return c;
    }

    /// Axis-aligned square with lower-left corner `origin`, traversed from that corner.
    static JordanCurve square(double side = 1.0, Point origin = {})
    {
        if (!(side > 0)) throw DegenerateError("square side must be positive");
        JordanCurve c = from_points({origin, origin + side, origin + Point(side, side), origin + Point(0, side)}, "square");
        c.params_ = {{"side", side}, {"x0", origin.real()}, {"y0", origin.imag()}};
        return c;
    }

    /// Polar curve r(theta) = radius (1 + eps cos(k theta)) around `center`.
    static JordanCurve polar(double eps, int k, double radius = 1.0, Point center = {}, std::string name = "polar")
    {
        if (!(radius > 0) || !(std::abs(eps) < 1) || k < 1) throw DegenerateError("polar curve needs radius > 0, |eps| < 1, k >= 1");
        JordanCurve c;
        c.name_ = std::move(name);
        c.params_ = {{"radius", radius}, {"eps", eps}, {"k", double(k)}, {"cx", center.real()}, {"cy", center.imag()}};
        c.init_analytic(
            [=](double t) { return center + std::polar(radius * (1 + eps * std::cos(k * t)), t); },
            [=](double t) {
                double r = radius * (1 + eps * std::cos(k * t));
                double dr = -radius * eps * k * std::sin(k * t);
                return std::polar(1.0, t) * Point(dr, r);
            });
        return c;
    }

    /// Limacon r = 1 + eps cos(theta); non-convex (dimpled) for eps > 1/2.
    static JordanCurve kidney(double eps = 0.8)
    {
        JordanCurve c = polar(eps, 1, 1.0, {}, "kidney");
        c.params_ = {{"eps", eps}};
        return c;
    }

    static JordanCurve from_points(std::vector<Point> pts, std::string name = "samples")
    {
        std::vector<Point> clean;
        clean.reserve(pts.size());
        for (auto p : pts) {
            if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) throw DegenerateError("non-finite curve sample");
            if (clean.empty() || p != clean.back()) clean.push_back(p);
        }
        while (clean.size() > 1 && clean.back() == clean.front()) clean.pop_back();
        if (clean.size() < 3) throw DegenerateError("a Jordan curve needs at least three distinct samples");

        JordanCurve c;
        c.name_ = std::move(name);
        c.kind_ = ParamKind::polyline;
        double area = detail::polygon_signed_area(clean);
        double len = 0;
        for (std::size_t i = 0; i < clean.size(); ++i) len += std::abs(clean[(i + 1) % clean.size()] - clean[i]);
        if (!(len > 0) || !std::isfinite(len)) throw DegenerateError("curve has zero or infinite length");
        if (std::abs(area) <= 1e-12 * len * len) throw DegenerateError("not a Jordan curve: encloses zero area");
        if (area < 0) {
            std::reverse(clean.begin() + 1, clean.end());
            c.warnings_.push_back("negatively oriented input reversed");
            area = -area;
        }
        if (auto bad = detail::polyline_self_intersection(clean, true))
            throw GeometryError("curve samples self-intersect", double(*bad));
        c.samples_ = std::move(clean);
        c.area_ = area;
        c.build_polyline();
        return c;
    }

    static JordanCurve named(const std::string& name, const std::map<std::string, double>& params)
    {
        auto get = [&](const char* key, double def) {
            auto it = params.find(key);
            return it == params.end() ? def : it->second;
        };
        if (name == "circle") return circle(get("radius", 1.0), {get("cx", 0), get("cy", 0)});
        if (name == "ellipse") return ellipse(get("a", 2.0), get("b", 1.0), {get("cx", 0), get("cy", 0)}, get("rotation", 0));
        if (name == "square") return square(get("side", 1.0), {get("x0", 0), get("y0", 0)});
        if (name == "polar")
            return polar(get("eps", 0.1), static_cast<int>(get("k", 3)), get("radius", 1.0), {get("cx", 0), get("cy", 0)});
        if (name == "kidney") return kidney(get("eps", 0.8));
        throw IoError("unknown named curve '" + name + "' (valid: circle, ellipse, square, polar, kidney)");
    }

    /// Image under z -> alpha z + beta.
    JordanCurve transformed(Point alpha, Point beta) const
    {
        if (alpha == Point{}) throw DegenerateError("transform scale must be nonzero");
        JordanCurve c = *this;
        c.transform_ = {alpha * transform_.first, alpha * transform_.second + beta};
        for (auto& p : c.samples_) p = alpha * p + beta;
        c.length_ *= std::abs(alpha);
        c.area_ *= std::norm(alpha);
        return c;
    }

    const std::string& name() const { return name_; }
    const std::map<std::string, double>& params() const { return params_; }
    ParamKind kind() const { return kind_; }
    bool is_c1() const { return c1_; }
    double length() const { return length_; }
    double signed_area() const { return area_; }
    std::span<const Point> samples() const { return samples_; }
    const std::vector<std::string>& warnings() const { return warnings_; }
    /// Accumulated z -> alpha z + beta applied since construction.
    std::pair<Point, Point> transform() const { return transform_; }

    /// Position at native parameter tau (periodic in 2pi).
    Point position(double tau) const
    {
        auto [alpha, beta] = transform_;
        if (kind_ == ParamKind::analytic) return alpha * pos_(tau) + beta;
        return alpha * polyline_at(detail::wrap_periodic(tau, two_pi) * base_length_ / two_pi) + beta;
    }

    /// d position / d tau. Right-sided at polyline vertices.
    Point velocity(double tau) const
    {
        const Point alpha = transform_.first;
        if (kind_ == ParamKind::analytic) return alpha * vel_(tau);
        double s = detail::wrap_periodic(tau, two_pi) * base_length_ / two_pi;
        std::size_t j = segment_index(s);
        Point d = base_[(j + 1) % base_.size()] - base_[j];
        return alpha * d / std::abs(d) * (base_length_ / two_pi);
    }

    /// Arc-length positions (in [0, L)) of corners; empty for C1 curves.
    const std::vector<double>& corners() const { return corners_; }

    /// Cumulative arc length at each polyline vertex (polyline curves only; untransformed scale).
    std::span<const double> vertex_arclength() const { return cumulative_; }

private:
    JordanCurve() = default;

    void init_analytic(Fn pos, Fn vel)
    {
        kind_ = ParamKind::analytic;
        pos_ = std::move(pos);
        vel_ = std::move(vel);
        c1_ = true;
        // Periodic trapezoid converges geometrically for analytic curves.
        double prev = -1, len = 0, area = 0;
        for (std::size_t m = 256; m <= (1u << 16); m *= 2) {
            len = 0;
            area = 0;
            for (std::size_t j = 0; j < m; ++j) {
                double t = two_pi * double(j) / double(m);
                Point z = pos_(t), dz = vel_(t);
                if (std::abs(dz) == 0) throw DegenerateError("parametrization has zero velocity");
                len += std::abs(dz);
                area += detail::cross(z, dz);
            }
            len *= two_pi / double(m);
            area *= 0.5 * two_pi / double(m);
            if (std::abs(len - prev) <= 1e-15 * len) break;
            prev = len;
        }
        if (!(len > 0) || !std::isfinite(len)) throw DegenerateError("curve has zero or infinite length");
        if (std::abs(area) <= 1e-12 * len * len) throw DegenerateError("not a Jordan curve: encloses zero area");
        if (area < 0) {
            Fn p = pos_, v = vel_;
            pos_ = [p](double t) { return p(-t); };
            vel_ = [v](double t) { return -v(-t); };
            warnings_.push_back("negatively oriented input reversed");
            area = -area;
        }
        length_ = len;
        area_ = area;
        constexpr std::size_t n_samples = 2048;
        samples_.resize(n_samples);
        for (std::size_t j = 0; j < n_samples; ++j) samples_[j] = pos_(two_pi * double(j) / double(n_samples));
    }

    void build_polyline()
    {
        base_ = samples_;
        const std::size_t n = base_.size();
        cumulative_.assign(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) cumulative_[i + 1] = cumulative_[i] + std::abs(base_[(i + 1) % n] - base_[i]);
        base_length_ = cumulative_[n];
        length_ = base_length_;
        corners_.clear();
        for (std::size_t i = 0; i < n; ++i) {
            Point in = base_[i] - base_[(i + n - 1) % n];
            Point out = base_[(i + 1) % n] - base_[i];
            if (std::abs(std::arg(out / in)) > corner_threshold) corners_.push_back(cumulative_[i]);
        }
        c1_ = corners_.empty();
    }

    std::size_t segment_index(double s) const
    {
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
        std::size_t j = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
        return std::min(j, base_.size() - 1);
    }

    Point polyline_at(double s) const
    {
        std::size_t j = segment_index(s);
        double seg = cumulative_[j + 1] - cumulative_[j];
        double u = seg > 0 ? (s - cumulative_[j]) / seg : 0.0;
        return base_[j] + u * (base_[(j + 1) % base_.size()] - base_[j]);
    }

    std::string name_;
    std::map<std::string, double> params_;
    ParamKind kind_ = ParamKind::analytic;
    bool c1_ = true;
    double length_ = 0;
    double area_ = 0;
    std::vector<Point> samples_;
    std::vector<std::string> warnings_;
    std::pair<Point, Point> transform_{1.0, 0.0};
    Fn pos_, vel_;
    // polyline data, in the untransformed frame
    std::vector<Point> base_;
    std::vector<double> cumulative_;
    double base_length_ = 0;
    std::vector<double> corners_;
};

/// Arc-length parametrization g(s), s in [0, L), with the continuous tangent-angle lift.
///
/// For analytic curves the arc-length map s(tau) is tabulated with Gauss-Legendre panels,
/// inverted by monotone cubic interpolation and polished with Newton steps. Polylines use
/// cumulative chord length directly.
class ArcLengthParam {
public:
    ArcLengthParam(const JordanCurve& curve, std::size_t n) : curve_(std::make_shared<JordanCurve>(curve))
    {
        if (n < 16) throw PreconditionError("arclength_parametrize needs n >= 16");
        scale_ = std::abs(curve.transform().first);
        if (curve.kind() == ParamKind::analytic)
            build_analytic(std::max<std::size_t>(8 * n, 4096));
        length_ = curve.length();
        stations_.resize(n);
        for (std::size_t j = 0; j < n; ++j) stations_[j] = position(length_ * double(j) / double(n));
        if (auto bad = detail::polyline_self_intersection(stations_, true))
            throw GeometryError("self-intersection detected during resampling", length_ * double(*bad) / double(n));
        if (curve.kind() == ParamKind::polyline) {
            build_polyline_angles();
        }
        station_angles_.resize(n);
        for (std::size_t j = 0; j < n; ++j) station_angles_[j] = raw_lift(length_ * double(j) / double(n));
    }

    const JordanCurve& curve() const { return *curve_; }
    double length() const { return length_; }
    std::size_t size() const { return stations_.size(); }
    bool is_c1() const { return curve_->is_c1(); }
    std::span<const Point> stations() const { return stations_; }
    /// Lifted tangent angles at the stations. Piecewise constant for polylines with corners.
    std::span<const double> station_angles() const { return station_angles_; }
    std::vector<double> corners() const
    {
        std::vector<double> out;
        for (double c : curve_->corners()) out.push_back(c * scale_);
        return out;
    }

    /// Native curve parameter tau in [0, 2pi) at arc length s (periodic).
    double native_parameter(double s) const
    {
        s = detail::wrap_periodic(s, length_);
        if (curve_->kind() == ParamKind::polyline) return two_pi * s / length_;
        double u = s / scale_;  // untransformed arc length
        double tau = tau_of_s_(u);
        for (int it = 0; it < 4; ++it) {
            double err = arclength_at(tau) - u;
            tau -= err / std::abs(curve_->velocity(tau) / curve_->transform().first);
            if (std::abs(err) < 1e-15 * base_length_) break;
        }
        return tau;
    }

    /// Arc length of native parameter tau, in [0, L).
    double arclength_of(double tau) const
    {
        tau = detail::wrap_periodic(tau, two_pi);
        if (curve_->kind() == ParamKind::polyline) return length_ * tau / two_pi;
        return detail::wrap_periodic(arclength_at(tau) * scale_, length_);
    }

    Point position(double s) const { return curve_->position(native_parameter(s)); }

    /// Continuous tangent-angle lift; tangent_angle(s + L) = tangent_angle(s) + 2 pi.
    double tangent_angle(double s) const
    {
        if (!is_c1()) {
            double sm = detail::wrap_periodic(s, length_);
            double nearest = 0, best = INFINITY;
            for (double c : corners()) {
                double d = std::min(std::abs(c - sm), length_ - std::abs(c - sm));
                if (d < best) best = d, nearest = c;
            }
            throw GeometryError("tangent undefined: curve is not C1", nearest);
        }
        return raw_lift(s);
    }

    /// Arc-length position of the point of the curve nearest to p. With a hint, only a
    /// window of +-L/8 around the hint is searched.
    double locate(Point p, std::optional<double> hint = std::nullopt) const
    {
        const std::size_t n = stations_.size();
        std::size_t best = 0;
        double best_d = INFINITY;
        auto consider = [&](std::size_t j) {
            double d = std::norm(stations_[j] - p);
            if (d < best_d) best_d = d, best = j;
        };
        if (hint) {
            long center = std::lround(detail::wrap_periodic(*hint, length_) / length_ * double(n));
            long w = static_cast<long>(n / 8) + 1;
            for (long k = -w; k <= w; ++k) consider(static_cast<std::size_t>(((center + k) % long(n) + long(n)) % long(n)));
        } else {
            for (std::size_t j = 0; j < n; ++j) consider(j);
        }
        const double h = length_ / double(n);
        double s0 = h * double(best);
        if (curve_->kind() == ParamKind::polyline) {
            // project onto the polyline segments covering [s0 - h, s0 + h]
            double best_s = s0;
            double bd = INFINITY;
            auto span_cum = curve_->vertex_arclength();
            for (double sa : {s0 - h, s0 + h, s0}) {
                double u = detail::wrap_periodic(sa, length_) / scale_;
                auto it = std::upper_bound(span_cum.begin(), span_cum.end(), u);
                std::size_t j = it == span_cum.begin() ? 0 : std::size_t(it - span_cum.begin()) - 1;
                j = std::min(j, span_cum.size() - 2);
                Point a = curve_->position(two_pi * span_cum[j] / (span_cum.back()));
                Point b = curve_->position(two_pi * span_cum[j + 1] / (span_cum.back()));
                if (j + 1 == span_cum.size() - 1) b = curve_->position(0.0);
                Point d = b - a;
                double t = std::clamp(std::real((p - a) * std::conj(d)) / std::norm(d), 0.0, 1.0);
                double dist = std::norm(a + t * d - p);
                if (dist < bd) {
                    bd = dist;
                    best_s = (span_cum[j] + t * (span_cum[j + 1] - span_cum[j])) * scale_;
                }
            }
            return detail::wrap_periodic(best_s, length_);
        }
        // analytic: golden-section on tau over the bracketing stations, then map back to s
        double lo = native_parameter(s0 - h), hi = native_parameter(s0 + h);
        if (hi < lo) hi += two_pi;
        auto f = [&](double t) { return std::norm(curve_->position(t) - p); };
        const double g = (std::sqrt(5.0) - 1) / 2;
        double a = lo, b = hi;
        double c = b - g * (b - a), d = a + g * (b - a);
        double fc = f(c), fd = f(d);
        for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
            if (fc < fd) {
                b = d, d = c, fd = fc;
                c = b - g * (b - a), fc = f(c);
            } else {
                a = c, c = d, fc = fd;
                d = a + g * (b - a), fd = f(d);
            }
        }
        return arclength_of(0.5 * (a + b));
    }

private:
    void build_analytic(std::size_t table)
    {
        auto speed = [this](double t) { return std::abs(curve_->velocity(t)) / scale_; };
        tau_.resize(table + 1);
        cum_.resize(table + 1);
        raw_angle_.resize(table + 1);
        cum_[0] = 0;
        for (std::size_t i = 0; i <= table; ++i) tau_[i] = two_pi * double(i) / double(table);
        for (std::size_t i = 0; i < table; ++i)
            cum_[i + 1] = cum_[i] + boost::math::quadrature::gauss<double, 15>::integrate(speed, tau_[i], tau_[i + 1]);
        base_length_ = cum_[table];
        for (std::size_t i = 0; i <= table; ++i) raw_angle_[i] = std::arg(curve_->velocity(tau_[i]));
        detail::unwrap(raw_angle_);
        tau_of_s_ = detail::MonotoneCubic(cum_, tau_);
    }

    double arclength_at(double tau) const
    {
        // untransformed arc length from 0 to tau in [0, 2pi]
        const std::size_t table = tau_.size() - 1;
        double x = std::clamp(tau, 0.0, two_pi);
        std::size_t i = std::min<std::size_t>(table - 1, static_cast<std::size_t>(x / two_pi * double(table)));
        auto speed = [this](double t) { return std::abs(curve_->velocity(t)) / scale_; };
        double extra = boost::math::quadrature::gauss<double, 15>::integrate(speed, tau_[i], x);
        double s = cum_[i] + extra;
        if (tau < 0 || tau > two_pi) {
            double turns = std::floor(tau / two_pi);
            return arclength_at(tau - turns * two_pi) + turns * base_length_;
        }
        return s;
    }

    void build_polyline_angles()
    {
        auto cum = curve_->vertex_arclength();
        const std::size_t n = cum.size() - 1;
        seg_angle_.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            Point a = curve_->position(two_pi * cum[j] / cum[n]);
            Point b = curve_->position(two_pi * cum[(j + 1) % n] / cum[n]);
            if (j + 1 == n) b = curve_->position(0.0);
            seg_angle_[j] = std::arg(b - a);
        }
        detail::unwrap(seg_angle_);
        seg_mid_.resize(n);
        for (std::size_t j = 0; j < n; ++j) seg_mid_[j] = 0.5 * (cum[j] + cum[j + 1]) * scale_;
        seg_start_.assign(cum.begin(), cum.end());
        for (auto& v : seg_start_) v *= scale_;
    }

    /// Lift without the C1 check; the periodic extension adds 2 pi per turn.
    double raw_lift(double s) const
    {
        double turns = std::floor(s / length_);
        double sm = s - turns * length_;
        if (sm >= length_) sm -= length_, turns += 1;
        double base;
        if (curve_->kind() == ParamKind::analytic) {
            double tau = native_parameter(sm);
            const std::size_t table = tau_.size() - 1;
            std::size_t i = std::min<std::size_t>(table, static_cast<std::size_t>(std::lround(tau / two_pi * double(table))));
            double a = std::arg(curve_->velocity(tau));
            base = raw_angle_[i] + detail::wrap_angle(a - raw_angle_[i]);
        } else if (!is_c1()) {
            auto it = std::upper_bound(seg_start_.begin(), seg_start_.end(), sm);
            std::size_t j = it == seg_start_.begin() ? 0 : std::size_t(it - seg_start_.begin()) - 1;
            base = seg_angle_[std::min(j, seg_angle_.size() - 1)];
        } else {
            // continuous piecewise-linear lift through the segment midpoints
            const std::size_t n = seg_angle_.size();
            auto it = std::upper_bound(seg_mid_.begin(), seg_mid_.end(), sm);
            std::size_t j = static_cast<std::size_t>(it - seg_mid_.begin());
            double x0, x1, y0, y1;
            if (j == 0) {
                x0 = seg_mid_[n - 1] - length_, y0 = seg_angle_[n - 1] - two_pi;
                x1 = seg_mid_[0], y1 = seg_angle_[0];
            } else if (j == n) {
                x0 = seg_mid_[n - 1], y0 = seg_angle_[n - 1];
                x1 = seg_mid_[0] + length_, y1 = seg_angle_[0] + two_pi;
            } else {
                x0 = seg_mid_[j - 1], y0 = seg_angle_[j - 1];
                x1 = seg_mid_[j], y1 = seg_angle_[j];
            }
            base = y0 + (y1 - y0) * (sm - x0) / (x1 - x0);
        }
        return base + two_pi * turns;
    }

    std::shared_ptr<const JordanCurve> curve_;
    double length_ = 0;
    double scale_ = 1;
    double base_length_ = 0;
    std::vector<Point> stations_;
    std::vector<double> station_angles_;
    // analytic tables (untransformed arc length)
    std::vector<double> tau_, cum_, raw_angle_;
    detail::MonotoneCubic tau_of_s_;
    // polyline tables
    std::vector<double> seg_angle_, seg_mid_, seg_start_;
};

inline ArcLengthParam arclength_parametrize(const JordanCurve& curve, std::size_t n)
{
    return ArcLengthParam(curve, n);
}

inline double tangent_angle(const ArcLengthParam& param, double s) { return param.tangent_angle(s); }

/// True iff every turn of the sample polygon is counterclockwise (cross products >= -1e-12).
inline bool is_convex(const JordanCurve& curve)
{
    auto p = curve.samples();
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        Point e1 = p[(i + 1) % n] - p[i];
        Point e2 = p[(i + 2) % n] - p[(i + 1) % n];
        if (detail::cross(e1, e2) / (std::abs(e1) * std::abs(e2)) < -1e-12) return false;
    }
    return true;
}

struct ChordArcResult {
    double constant = 1.0;  ///< max over evaluated pairs of shorter-arc / chord
    double s1 = 0, s2 = 0;  ///< arc-length positions of the maximizing pair
    Point p1, p2;
    std::size_t pairs = 0;  ///< pairs actually evaluated
};

namespace detail {

inline void chord_arc_refine(const ArcLengthParam& g, ChordArcResult& best, double window, std::size_t grid, int rounds, std::size_t& pairs)
{
    const double len = g.length();
    double c1 = best.s1, c2 = best.s2;
    for (int r = 0; r < rounds; ++r) {
        std::vector<Point> a(grid), b(grid);
        std::vector<double> sa(grid), sb(grid);
        for (std::size_t i = 0; i < grid; ++i) {
            double u = -1.0 + 2.0 * double(i) / double(grid - 1);
            sa[i] = c1 + window * u;
            sb[i] = c2 + window * u;
            a[i] = g.position(sa[i]);
            b[i] = g.position(sb[i]);
        }
        for (std::size_t i = 0; i < grid; ++i) {
            for (std::size_t j = 0; j < grid; ++j) {
                ++pairs;
                double chord = std::abs(a[i] - b[j]);
                if (chord <= 1e-14 * len) continue;
                double d = std::abs(wrap_periodic(sa[i], len) - wrap_periodic(sb[j], len));
                double arc = std::min(d, len - d);
                double ratio = arc / chord;
                if (ratio > best.constant) {
                    best.constant = ratio;
                    best.s1 = wrap_periodic(sa[i], len), best.s2 = wrap_periodic(sb[j], len);
                    best.p1 = a[i], best.p2 = b[j];
                }
            }
        }
        c1 = best.s1, c2 = best.s2;
        window /= 4;
    }
}

} // namespace detail

/// Measured chord-arc constant: sup over sampled pairs of (shorter arc)/(chord).
///
/// Stratified scan: all pairs on nested station sets of 16, 32, ... points, each level
/// followed by a local refinement around its maximizer. The evaluated pair family grows
/// with the budget, so the result is nondecreasing in pair_budget.
inline ChordArcResult chord_arc_constant(const JordanCurve& curve, std::size_t pair_budget)
{
    if (pair_budget < 1000) throw PreconditionError("chord_arc_constant needs pair_budget >= 1000");
    constexpr std::size_t refine_grid = 16;
    constexpr int refine_rounds = 3;
    constexpr std::size_t refine_cost = refine_grid * refine_grid * refine_rounds;

    ChordArcResult best;
    best.constant = 0;
    std::size_t used = 0;
    bool any = false;
    for (std::size_t n = 16; n <= 8192; n *= 2) {
        std::size_t cost = n * (n - 1) / 2 + refine_cost;
        if (used + cost > pair_budget) break;
        used += cost;
        ArcLengthParam g(curve, n);
        const double len = g.length();
        auto st = g.stations();
        ChordArcResult level;
        level.constant = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                ++level.pairs;
                double chord = std::abs(st[i] - st[j]);
                if (chord <= 1e-14 * len) continue;
                double d = len * double(j - i) / double(n);
                double ratio = std::min(d, len - d) / chord;
                if (ratio > level.constant) {
                    level.constant = ratio;
                    level.s1 = len * double(i) / double(n), level.s2 = len * double(j) / double(n);
                    level.p1 = st[i], level.p2 = st[j];
                    any = true;
                }
            }
        }
        if (level.constant > 0) detail::chord_arc_refine(g, level, len / double(n), refine_grid, refine_rounds, level.pairs);
        best.pairs += level.pairs;
        if (level.constant > best.constant) {
            std::size_t p = best.pairs;
            best = level;
            best.pairs = p;
        }
    }
    if (!any) throw DegenerateError("all sampled pairs are degenerate (zero chord)");
    best.constant = std::max(1.0, best.constant);
    return best;
}

} // namespace qcharm
