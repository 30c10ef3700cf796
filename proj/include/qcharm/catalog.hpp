#pragma once

// Test mappings: Mobius automorphisms, shears, Rado-Kneser-Choquet extensions onto convex
// curves and the exact conformal map of the disk onto the unit square.

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "qcharm/detail/numeric.hpp"
#include "qcharm/error.hpp"
#include "qcharm/geometry.hpp"
#include "qcharm/harmonic.hpp"

namespace qcharm {

/// psi(t) = t + shift + sum_k sin_terms[k-1] sin(kt) + cos_terms[k-1] cos(kt).
struct Reparam {
    std::vector<double> sin_terms;
    std::vector<double> cos_terms;
    double shift = 0.0;

    double operator()(double t) const
    {
        double v = t + shift;
        for (std::size_t k = 0; k < sin_terms.size(); ++k) v += sin_terms[k] * std::sin(double(k + 1) * t);
        for (std::size_t k = 0; k < cos_terms.size(); ++k) v += cos_terms[k] * std::cos(double(k + 1) * t);
        return v;
    }

    double derivative(double t) const
    {
        double v = 1.0;
        for (std::size_t k = 0; k < sin_terms.size(); ++k) v += double(k + 1) * sin_terms[k] * std::cos(double(k + 1) * t);
        for (std::size_t k = 0; k < cos_terms.size(); ++k) v -= double(k + 1) * cos_terms[k] * std::sin(double(k + 1) * t);
        return v;
    }

    /// t + eps sin(k t)
    static Reparam sine(double eps, int k = 1)
    {
        Reparam r;
        r.sin_terms.assign(static_cast<std::size_t>(k), 0.0);
        r.sin_terms.back() = eps;
        return r;
    }
};

struct MapSpec;

namespace spec {

struct Identity {};
struct Mobius {
    cplx a;
    double rot = 0.0;
};
struct Shear {
    cplx mu;
};
struct Rkc {
    std::shared_ptr<const JordanCurve> curve;
    Reparam reparam;
};
struct ScSquare {};
/// z -> alpha z + beta, used to normalize targets.
struct Affine {
    cplx alpha{1.0};
    cplx beta{};
};
struct Composed {
    std::vector<MapSpec> stages;
};

} // namespace spec

struct MapSpec {
    using Kind = std::variant<spec::Identity, spec::Mobius, spec::Shear, spec::Rkc, spec::ScSquare, spec::Affine, spec::Composed>;
    Kind kind;
    std::string label;

    static MapSpec identity() { return {spec::Identity{}, "identity"}; }
    static MapSpec mobius(cplx a, double rot = 0.0)
    {
        if (!(std::abs(a) < 1)) throw DomainError("mobius parameter needs |a| < 1");
        return {spec::Mobius{a, rot}, "mobius"};
    }
    static MapSpec shear(cplx mu)
    {
        if (!(std::abs(mu) < 1)) throw DomainError("shear parameter needs |mu| < 1");
        return {spec::Shear{mu}, "shear"};
    }
    static MapSpec rkc(const JordanCurve& curve, Reparam reparam)
    {
        if (!is_convex(curve)) throw PreconditionError("rkc needs a convex target curve");
        return {spec::Rkc{std::make_shared<JordanCurve>(curve), std::move(reparam)}, "rkc"};
    }
    static MapSpec sc_square() { return {spec::ScSquare{}, "sc_square"}; }
    static MapSpec affine(cplx alpha, cplx beta)
    {
        if (alpha == cplx{}) throw DegenerateError("affine scale must be nonzero");
        return {spec::Affine{alpha, beta}, "affine"};
    }
    static MapSpec composed(std::vector<MapSpec> stages)
    {
        if (stages.empty()) throw PreconditionError("composed spec needs at least one stage");
        return {spec::Composed{std::move(stages)}, "composed"};
    }
};

/// e^{i rot} (z - a) / (1 - conj(a) z).
inline cplx mobius(cplx a, double rot, cplx z)
{
    if (!(std::abs(a) < 1)) throw DomainError("mobius parameter needs |a| < 1");
    return std::polar(1.0, rot) * (z - a) / (1.0 - std::conj(a) * z);
}

/// Derivative of mobius(a, rot, .) at z.
inline cplx mobius_derivative(cplx a, double rot, cplx z)
{
    cplx d = 1.0 - std::conj(a) * z;
    return std::polar(1.0, rot) * (1.0 - std::norm(a)) / (d * d);
}

namespace detail {

/// Gamma(1/4)^2 / (4 sqrt(2 pi)) = int_0^1 (1 - t^4)^{-1/2} dt.
inline double lemniscate_quarter()
{
    const double g = std::tgamma(0.25);
    return g * g / (4 * std::sqrt(two_pi));
}

/// c = (2 - 2i) sqrt(2 pi) / Gamma(1/4)^2, so that c * lemniscate_quarter() = (1 - i)/2.
inline cplx sc_square_constant()
{
    const double g = std::tgamma(0.25);
    return cplx(2, -2) * std::sqrt(two_pi) / (g * g);
}

} // namespace detail

/// phi(z) = (1+i)/2 + c int_0^z (1 - zeta^4)^{-1/2} d zeta, the conformal map of the disk onto
/// [0,1]^2 with phi(0) = center. The integral is taken along the segment [0, z].
inline cplx sc_square_map(cplx z, double quad_tol = 1e-12)
{
    if (!(quad_tol > 0 && quad_tol <= 1e-6)) throw PreconditionError("sc_square_map needs quad_tol in (0, 1e-6]");
    if (std::abs(z) > 1 + 1e-14) throw DomainError("sc_square_map needs |z| <= 1");
    const cplx center(0.5, 0.5);
    if (z == cplx{}) return center;
    const cplx z2 = z * z;
    const cplx one_minus_z4 = 1.0 - z2 * z2;
    // 1 - z^4 s^4 = (1-s)(1+s)(1+s^2) + (1 - z^4) s^4, with 1-s taken from the quadrature's
    // endpoint distance so the vertex singularity keeps full precision
    auto g = [one_minus_z4](double s, double sc) {
        double rest = sc > 0 ? sc : 1.0 - s;
        double s4 = s * s * s * s;
        return 1.0 / std::sqrt(rest * (1 + s) * (1 + s * s) + one_minus_z4 * s4);
    };
    boost::math::quadrature::tanh_sinh<double> integrator;
    double err_re = 0, err_im = 0;
    double re = integrator.integrate([&](double s, double sc) { return g(s, sc).real(); }, 0.0, 1.0, quad_tol, &err_re);
    double im = integrator.integrate([&](double s, double sc) { return g(s, sc).imag(); }, 0.0, 1.0, quad_tol, &err_im);
    double achieved = std::hypot(err_re, err_im);
    if (!std::isfinite(re) || !std::isfinite(im) || achieved > 1e3 * quad_tol)
        throw ConvergenceError(detail::concat("sc_square_map quadrature did not converge at z = ", z), achieved);
    return center + detail::sc_square_constant() * z * cplx(re, im);
}

/// Taylor coefficients of the square map: c_0 = center, c_{4k+1} = c binom(2k,k) / (4^k (4k+1)).
inline std::vector<cplx> sc_square_taylor(std::size_t n)
{
    std::vector<cplx> a(n + 1, cplx{});
    a[0] = cplx(0.5, 0.5);
    const cplx c = detail::sc_square_constant();
    double central = 1.0;  // binom(2k,k)/4^k
    for (std::size_t k = 0; 4 * k + 1 <= n; ++k) {
        a[4 * k + 1] = c * central / double(4 * k + 1);
        central *= double(2 * k + 1) / double(2 * k + 2);
    }
    return a;
}

/// Boundary correspondence f*(e^{it}) of a spec.
inline cplx boundary(const MapSpec& s, double t);

namespace detail {

inline cplx apply_stage(const MapSpec& s, cplx z)
{
    return std::visit(
        [&](const auto& k) -> cplx {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, spec::Identity>) return z;
            else if constexpr (std::is_same_v<T, spec::Mobius>) return mobius(k.a, k.rot, z);
            else if constexpr (std::is_same_v<T, spec::Shear>) return z + k.mu * std::conj(z);
            else if constexpr (std::is_same_v<T, spec::Rkc>) return k.curve->position(k.reparam(std::arg(z)));
            else if constexpr (std::is_same_v<T, spec::ScSquare>) return sc_square_map(z / std::abs(z));
            else if constexpr (std::is_same_v<T, spec::Affine>) return k.alpha * z + k.beta;
            else {
                cplx w = z;
                for (const auto& st : k.stages) w = apply_stage(st, w);
                return w;
            }
        },
        s.kind);
}

inline void check_monotone(const MapSpec& s, std::size_t grid)
{
    if (const auto* r = std::get_if<spec::Rkc>(&s.kind)) {
        // psi must be a strictly increasing bijection of [0, 2pi]
        if (std::abs(r->reparam(two_pi) - r->reparam(0) - two_pi) > 1e-9)
            throw NonMonotoneError("reparametrization does not advance by exactly 2 pi", 0.0, two_pi);
        double bad_begin = -1;
        for (std::size_t j = 0; j <= grid; ++j) {
            double t = two_pi * double(j) / double(grid);
            bool bad = r->reparam.derivative(t) < 1e-6;
            if (bad && bad_begin < 0) bad_begin = t;
            if ((!bad || j == grid) && bad_begin >= 0)
                throw NonMonotoneError("boundary correspondence is not strictly increasing (min psi' < 1e-6)", bad_begin, t);
        }
    } else if (const auto* c = std::get_if<spec::Composed>(&s.kind)) {
        for (const auto& st : c->stages) check_monotone(st, grid);
    }
}

} // namespace detail

inline cplx boundary(const MapSpec& s, double t) { return detail::apply_stage(s, std::polar(1.0, t)); }

/// The Jordan curve traced by the boundary correspondence.
inline JordanCurve target_curve(const MapSpec& s)
{
    return std::visit(
        [&](const auto& k) -> JordanCurve {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, spec::Identity> || std::is_same_v<T, spec::Mobius>) return JordanCurve::circle();
            else if constexpr (std::is_same_v<T, spec::Shear>) {
                double m = std::abs(k.mu);
                return JordanCurve::ellipse(1 + m, 1 - m, {}, 0.5 * std::arg(k.mu));
            } else if constexpr (std::is_same_v<T, spec::Rkc>) return *k.curve;
            else if constexpr (std::is_same_v<T, spec::ScSquare>) return JordanCurve::square(1.0);
            else if constexpr (std::is_same_v<T, spec::Affine>) return JordanCurve::circle().transformed(k.alpha, k.beta);
            else {
                std::optional<JordanCurve> cur;
                bool on_disk = true;
                for (const auto& st : k.stages) {
                    if (const auto* a = std::get_if<spec::Affine>(&st.kind)) {
                        cur = (cur ? *cur : JordanCurve::circle()).transformed(a->alpha, a->beta);
                        on_disk = false;
                        continue;
                    }
                    if (!on_disk) throw PreconditionError("composed stages after the first non-disk stage must be affine");
                    if (std::holds_alternative<spec::Identity>(st.kind) || std::holds_alternative<spec::Mobius>(st.kind)) continue;
                    cur = target_curve(st);
                    on_disk = false;
                }
                return cur ? *cur : JordanCurve::circle();
            }
        },
        s.kind);
}

/// HarmonicMap of a spec with truncation order n_coeff (a power of two >= 64).
///
/// Identity, shear and affine stages have exact coefficients; the square map uses its exact
/// Taylor series; everything else interpolates 2 n_coeff boundary samples.
inline HarmonicMap build_map(const MapSpec& s, std::size_t n_coeff)
{
    if (n_coeff < 64 || !detail::is_power_of_two(n_coeff)) throw PreconditionError("build_map needs n_coeff a power of two >= 64");
    detail::check_monotone(s, 16 * n_coeff);
    const std::size_t n = n_coeff;
    std::vector<cplx> c(2 * n + 1, cplx{});
    auto at = [&](long k) -> cplx& { return c[static_cast<std::size_t>(k + long(n))]; };
    if (std::holds_alternative<spec::Identity>(s.kind)) {
        at(1) = 1;
        return HarmonicMap(std::move(c));
    }
    if (const auto* sh = std::get_if<spec::Shear>(&s.kind)) {
        at(1) = 1;
        at(-1) = sh->mu;
        return HarmonicMap(std::move(c));
    }
    if (const auto* af = std::get_if<spec::Affine>(&s.kind)) {
        at(1) = af->alpha;
        at(0) = af->beta;
        return HarmonicMap(std::move(c));
    }
    if (std::holds_alternative<spec::ScSquare>(s.kind)) {
        auto a = sc_square_taylor(n);
        for (std::size_t k = 0; k <= n; ++k) at(long(k)) = a[k];
        return HarmonicMap(std::move(c));
    }
    if (const auto* comp = std::get_if<spec::Composed>(&s.kind)) {
        // a trailing affine stage acts on coefficients exactly
        if (comp->stages.size() >= 2) {
            if (const auto* af = std::get_if<spec::Affine>(&comp->stages.back().kind)) {
                std::vector<MapSpec> head(comp->stages.begin(), comp->stages.end() - 1);
                MapSpec inner = head.size() == 1 ? head.front() : MapSpec::composed(std::move(head));
                return build_map(inner, n_coeff).affine(af->alpha, af->beta);
            }
        } else {
            return build_map(comp->stages.front(), n_coeff);
        }
    }
    const std::size_t m = 2 * n;
    std::vector<cplx> samples(m);
    detail::parallel_for(m, [&](std::size_t j) { samples[j] = boundary(s, two_pi * double(j) / double(m)); });
    return HarmonicMap::from_samples(samples);
}

/// A spec's map followed by z -> alpha z + beta.
inline MapSpec then_affine(const MapSpec& s, cplx alpha, cplx beta)
{
    MapSpec out = MapSpec::composed({s, MapSpec::affine(alpha, beta)});
    out.label = s.label + "+affine";
    return out;
}

} // namespace qcharm
