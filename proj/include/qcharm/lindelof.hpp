#pragma once

// The angle function U(z) = arg(d_phi f(z) / z), its boundary behaviour and the tangent-angle
// identity U(e^{i phi}) = beta(phi) - phi.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qcharm/detail/numeric.hpp"
#include "qcharm/error.hpp"
#include "qcharm/geometry.hpp"
#include "qcharm/harmonic.hpp"
#include "qcharm/weights.hpp"

namespace qcharm {

inline constexpr double anchor_radius = 0.5;
inline constexpr int series_cap = 200;

/// -Im sum_{k>=1} m^k / k, truncated once |m|^k / k < 1e-12.
inline double log_series_arg(cplx m, cplx where = {})
{
    const double am = std::abs(m);
    if (!(am < 1)) throw NotQuasiconformalError("not quasiconformal on grid: |m| >= 1", where);
    cplx p = 1.0, sum = 0;
    for (int k = 1;; ++k) {
        p *= m;
        sum += p / double(k);
        if (std::pow(am, k + 1) / double(k + 1) < 1e-12) break;
        if (k >= series_cap)
            throw ConvergenceError(detail::concat("log series needs more than ", series_cap, " terms; |m| = ", am,
                                                  " is too close to 1, use a smaller k_sup grid"),
                                   std::pow(am, k) / double(k));
    }
    return -sum.imag();
}

/// Continuous branch of arg(i a'(z)) on the disk, fixed by the principal value at the anchor
/// 0.5 and propagated along the circle |z| = 0.5 and then along rays.
class BranchTracker {
public:
    explicit BranchTracker(const HarmonicMap& map, std::size_t circle_nodes = 256) : map_(&map)
    {
        circle_.resize(circle_nodes);
        const cplx z0(anchor_radius, 0);
        circle_[0] = raw(z0);
        for (std::size_t j = 1; j < circle_nodes; ++j) {
            cplx a = std::polar(anchor_radius, two_pi * double(j - 1) / double(circle_nodes));
            cplx b = std::polar(anchor_radius, two_pi * double(j) / double(circle_nodes));
            circle_[j] = walk(a, circle_[j - 1], b);
        }
    }

    /// Lifted arg(i a'(z)).
    double arg_ia(cplx z) const
    {
        const std::size_t n = circle_.size();
        double phi = detail::wrap_periodic(std::arg(z), two_pi);
        std::size_t j = static_cast<std::size_t>(std::lround(phi / two_pi * double(n))) % n;
        cplx node = std::polar(anchor_radius, two_pi * double(j) / double(n));
        cplx on_circle = std::polar(anchor_radius, std::arg(z));
        double v = walk(node, circle_[j], on_circle);
        return walk(on_circle, v, z);
    }

    /// Continue a known lift value at `from` along the segment to `to`.
    double walk(cplx from, double value, cplx to) const { return walk_rec(from, value, to, 0); }

    double raw(cplx z) const
    {
        cplx ap = map_->a_prime(z);
        if (ap == cplx{}) throw NotQuasiconformalError("a'(z) = 0: U is undefined here", z);
        return std::arg(cplx(0, 1) * ap);
    }

    /// U from a lifted arg(i a') value.
    double angle_from(cplx z, double arg_ia_value) const
    {
        cplx ap = map_->a_prime(z);
        cplx bp = map_->b_prime(z);
        cplx m = std::conj(z * bp) / (z * ap);
        return arg_ia_value + log_series_arg(m, z);
    }

    double angle(cplx z) const { return angle_from(z, arg_ia(z)); }

    const HarmonicMap& map() const { return *map_; }

private:
    double walk_rec(cplx from, double value, cplx to, int depth) const
    {
        double delta = detail::wrap_angle(raw(to) - value);
        if (std::abs(delta) > pi / 4 && depth < 40) {
            cplx mid = 0.5 * (from + to);
            double vm = walk_rec(from, value, mid, depth + 1);
            return walk_rec(mid, vm, to, depth + 1);
        }
        return value + delta;
    }

    const HarmonicMap* map_;
    std::vector<double> circle_;
};

struct AngleField {
    std::vector<double> radii;
    std::size_t n_phi = 0;
    std::vector<double> values;  ///< row-major: values[i * n_phi + j] = U(radii[i] e^{2 pi i j / n_phi})
    double anchor = 0;           ///< U(0.5)

    double at(std::size_t i, std::size_t j) const { return values[i * n_phi + j]; }
    double phi(std::size_t j) const { return two_pi * double(j) / double(n_phi); }
};

/// U on radii x n_phi angles via the log series, lifted from the anchor.
inline AngleField angle_field(const HarmonicMap& map, std::vector<double> radii, std::size_t n_phi)
{
    if (radii.empty() || n_phi < 1) throw PreconditionError("angle_field needs radii and n_phi >= 1");
    for (double r : radii)
        if (!(r > 0 && r < 1)) throw DomainError("angle_field radii must lie in (0, 1)");
    BranchTracker tr(map);
    AngleField f;
    f.radii = radii;
    f.n_phi = n_phi;
    f.values.assign(radii.size() * n_phi, 0.0);
    f.anchor = tr.angle(cplx(anchor_radius, 0));
    std::vector<std::size_t> order(radii.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return radii[a] < radii[b]; });
    detail::parallel_for(n_phi, [&](std::size_t j) {
        const double phi = f.phi(j);
        cplx prev = std::polar(anchor_radius, phi);
        double v = tr.arg_ia(prev);
        for (std::size_t i : order) {
            cplx z = std::polar(radii[i], phi);
            v = tr.walk(prev, v, z);
            prev = z;
            f.values[i * n_phi + j] = tr.angle_from(z, v);
        }
    });
    return f;
}

enum class ExtensionStatus { extends, fails, inconclusive };

inline const char* to_string(ExtensionStatus s)
{
    switch (s) {
    case ExtensionStatus::extends: return "extends";
    case ExtensionStatus::fails: return "fails";
    default: return "inconclusive";
    }
}

struct BoundaryAngle {
    double limit = 0;               ///< Richardson-extrapolated U at the last radius
    double defect = 0;              ///< max of per-level defects over the last four levels
    std::vector<double> radii;
    std::vector<double> values;     ///< U(r_k e^{i phi}), lifted along the ray
    std::vector<double> defects;    ///< per level (first entry 0: no predecessor)
    ExtensionStatus status = ExtensionStatus::inconclusive;
};

inline std::vector<double> default_boundary_radii()
{
    std::vector<double> r;
    for (int k = 3; k <= 12; ++k) r.push_back(1.0 - std::ldexp(1.0, -k));
    return r;
}

/// Boundary behaviour of U along the ray at phi.
///
/// Each level k combines two Cauchy-type defects: the change of the Richardson limit in
/// h = 1 - r between consecutive radii, and the failure of U to be locally linear in angle at
/// scale h, |(U(phi+h) - U(phi-h)) - (U(phi+2h) - U(phi-2h))/2|. A corner of the image leaves
/// an O(1) angular profile of width ~h that the second term sees at every level.
inline BoundaryAngle boundary_angle(const BranchTracker& tr, double phi, std::vector<double> radii = default_boundary_radii())
{
    if (radii.size() < 2) throw PreconditionError("boundary_angle needs at least two radii");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0 && radii[i] < 1)) throw DomainError("boundary_angle radii must lie in (0, 1)");
        if (i > 0 && !(radii[i] > radii[i - 1])) throw PreconditionError("boundary_angle radii must increase");
    }
    BoundaryAngle out;
    out.radii = radii;
    const std::size_t n = radii.size();
    std::vector<double> richardson(n), args(n);
    cplx prev = std::polar(anchor_radius, phi);
    double v = tr.arg_ia(prev);
    for (std::size_t k = 0; k < n; ++k) {
        cplx z = std::polar(radii[k], phi);
        v = tr.walk(prev, v, z);
        prev = z;
        args[k] = v;
        out.values.push_back(tr.angle_from(z, v));
    }
    out.defects.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double h = 1 - radii[k];
        richardson[k] = out.values[k];
        if (k > 0) {
            double hp = 1 - radii[k - 1];
            richardson[k] = out.values[k] - h * (out.values[k - 1] - out.values[k]) / (hp - h);
        }
        // angular linearity at scale h, lifted from the ray point along the circle
        const cplx z = std::polar(radii[k], phi);
        auto u_at = [&](double dphi) {
            cplx w = std::polar(radii[k], phi + dphi);
            return tr.angle_from(w, tr.walk(z, args[k], w));
        };
        double jump = std::abs((u_at(h) - u_at(-h)) - 0.5 * (u_at(2 * h) - u_at(-2 * h)));
        double radial = k > 1 ? std::abs(richardson[k] - richardson[k - 1]) : (k == 1 ? std::abs(out.values[1] - out.values[0]) : 0.0);
        out.defects[k] = std::max(radial, jump);
    }
    out.limit = richardson[n - 1];
    for (std::size_t k = n >= 4 ? n - 4 : 0; k < n; ++k) out.defect = std::max(out.defect, out.defects[k]);
    out.status = out.defect < 1e-3 ? ExtensionStatus::extends : (out.defect > 0.1 ? ExtensionStatus::fails : ExtensionStatus::inconclusive);
    return out;
}

inline BoundaryAngle boundary_angle(const HarmonicMap& map, double phi, std::vector<double> radii = default_boundary_radii())
{
    return boundary_angle(BranchTracker(map), phi, std::move(radii));
}

struct IdentityCheck {
    double max_error = 0;
    std::vector<double> phi, u_limit, target, defect;  ///< target = beta(phi) - phi after alignment
};

/// max over n_phi angles of |U_limit(phi) - (beta(phi) - phi)|, lifts aligned at phi = 0.
inline IdentityCheck lindelof_identity_check(const HarmonicMap& map, const JordanCurve& curve, std::size_t n_phi)
{
    if (!curve.is_c1()) {
        double where = curve.corners().empty() ? 0.0 : curve.corners().front();
        throw GeometryError("lindelof_identity_check needs a C1 curve; use boundary_angle to diagnose corners", where);
    }
    if (n_phi < 1) throw PreconditionError("lindelof_identity_check needs n_phi >= 1");
    BranchTracker tr(map);
    ArcLengthParam g(curve, 4096);
    IdentityCheck out;
    out.phi.resize(n_phi);
    out.u_limit.resize(n_phi);
    out.target.resize(n_phi);
    out.defect.resize(n_phi);
    std::vector<double> where(n_phi);
    detail::parallel_for(n_phi, [&](std::size_t j) {
        double phi = two_pi * double(j) / double(n_phi);
        out.phi[j] = phi;
        auto b = boundary_angle(tr, phi);
        out.u_limit[j] = b.limit;
        out.defect[j] = b.defect;
        where[j] = g.locate(map.boundary_value(phi));
    });
    for (std::size_t j = 0; j < n_phi; ++j)
        if (!(out.defect[j] < 1e-3))
            throw PreconditionError(detail::concat("boundary angle does not converge at phi = ", out.phi[j], " (defect ", out.defect[j], ")"));
    // lift the arc-length positions so beta is continuous in phi
    double shift = 0;
    for (std::size_t j = 0; j < n_phi; ++j) {
        if (j > 0 && where[j] + shift < where[j - 1] - 0.5 * g.length()) shift += g.length();
        where[j] += shift;
        out.target[j] = g.tangent_angle(where[j]) - out.phi[j];
    }
    detail::unwrap(out.u_limit);
    double align = two_pi * std::round((out.u_limit[0] - out.target[0]) / two_pi);
    for (std::size_t j = 0; j < n_phi; ++j) {
        out.target[j] += align;
        out.max_error = std::max(out.max_error, std::abs(out.u_limit[j] - out.target[j]));
    }
    return out;
}

struct ProofInternals {
    double A = 0, B = 0, V = 0;
    double U = 0;                 ///< U(r e^{i phi}) from the log series
    double v_consistency = 0;     ///< |wrap(V - (U + phi - beta(phi)))|
    bool b_positive = true;
    std::vector<double> eps;
    std::vector<double> arc_mass_closed, arc_mass_quadrature;
};

/// (2/pi) arctan((1+r)/(1-r) eps / (sqrt(2-eps) sqrt(2+eps))), the Poisson mass of |e^{it} - 1| <= eps.
inline double arc_mass_closed_form(double r, double eps)
{
    if (!(r >= 0 && r < 1)) throw DomainError("arc mass needs 0 <= r < 1");
    if (!(eps > 0 && eps <= 2)) throw DomainError("arc mass needs 0 < eps <= 2");
    return 2 / pi * std::atan((1 + r) / (1 - r) * eps / (std::sqrt(2 - eps) * std::sqrt(2 + eps)));
}

/// int_{|e^{it}-1| <= eps} P(r, t) dt by adaptive Gauss-Kronrod.
inline double arc_mass_quadrature(double r, double eps)
{
    if (!(eps > 0 && eps <= 2)) throw DomainError("arc mass needs 0 < eps <= 2");
    const double te = 2 * std::asin(eps / 2);
    auto f = [r](double t) { return poisson_kernel(r, t); };
    // split at 0 where the kernel peaks
    double a = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -te, 0.0, 15, 1e-12);
    double b = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, te, 15, 1e-12);
    return a + b;
}

/// The A, B integrals and V = atan2(A, B) from the proof of the tangent-angle identity,
/// with beta and psi' = w taken from the curve and the boundary weight.
inline ProofInternals proof_internals(const HarmonicMap& map, const JordanCurve& curve, double phi, double r,
                                      std::vector<double> eps = {0.1, 0.5, 1.0}, std::size_t nodes = 1u << 14)
{
    if (!curve.is_c1()) throw GeometryError("proof_internals needs a C1 curve", curve.corners().empty() ? 0.0 : curve.corners().front());
    if (!(r >= 0 && r < 1)) throw DomainError("proof_internals needs 0 <= r < 1");
    nodes = std::max<std::size_t>(nodes, 1u << 14);
    ArcLengthParam g(curve, 4096);
    BoundaryCorrespondence bc(map, curve);
    const double len = bc.length();
    auto position = [&](double tau) {
        double k = std::floor(tau / two_pi);
        return bc.start() + bc.forward(tau - k * two_pi) + k * len;
    };
    const double beta_phi = g.tangent_angle(position(phi));
    auto d = map.boundary_derivative_samples(nodes, phi);
    long double a_sum = 0, b_sum = 0;
    std::vector<double> ta(nodes), tb(nodes);
    detail::parallel_for(nodes, [&](std::size_t j) {
        double t = two_pi * double(j) / double(nodes);
        double p = poisson_kernel(r, t) * std::abs(d[j]);
        double diff = g.tangent_angle(position(phi + t)) - beta_phi;
        ta[j] = p * std::sin(diff);
        tb[j] = p * std::cos(diff);
    });
    for (std::size_t j = 0; j < nodes; ++j) a_sum += ta[j], b_sum += tb[j];
    ProofInternals out;
    const double h = two_pi / double(nodes);
    out.A = static_cast<double>(a_sum) * h;
    out.B = static_cast<double>(b_sum) * h;
    out.V = std::atan2(out.A, out.B);
    out.b_positive = out.B > 0;
    if (r > 0) {
        BranchTracker tr(map);
        out.U = tr.angle(std::polar(r, phi));
        out.v_consistency = std::abs(detail::wrap_angle(out.V - (out.U + phi - beta_phi)));
    }
    out.eps = eps;
    for (double e : eps) {
        out.arc_mass_closed.push_back(arc_mass_closed_form(r, e));
        out.arc_mass_quadrature.push_back(arc_mass_quadrature(r, e));
    }
    return out;
}

struct ConverseTangent {
    double max_deviation = 0;
    double u_limit = 0;
    std::vector<double> offsets, radii, deviation;  ///< flattened (radius, offset) table
};

/// Secant directions (f(r e^{i(s+h)}) - f(r e^{is})) / h against the tangent angle U_limit(s) + s.
/// A radius of 1 uses the boundary function.
inline ConverseTangent converse_tangent_test(const HarmonicMap& map, double s, const std::vector<double>& t_window,
                                             const std::vector<double>& r_list)
{
    if (t_window.empty() || r_list.empty()) throw PreconditionError("converse_tangent_test needs offsets and radii");
    ConverseTangent out;
    out.u_limit = boundary_angle(map, s).limit;
    const double tangent = out.u_limit + s;
    auto f = [&](double r, double t) { return r >= 1 ? map.boundary_value(t) : map.evaluate(std::polar(r, t)); };
    for (double r : r_list) {
        if (!(r > 0 && r <= 1)) throw DomainError("converse_tangent_test radii must lie in (0, 1]");
        for (double h : t_window) {
            if (h == 0) continue;
            cplx secant = (f(r, s + h) - f(r, s)) / h;
            double dev = std::abs(detail::wrap_angle(std::arg(secant) - tangent));
            out.radii.push_back(r);
            out.offsets.push_back(h);
            out.deviation.push_back(dev);
            out.max_deviation = std::max(out.max_deviation, dev);
        }
    }
    return out;
}

} // namespace qcharm
