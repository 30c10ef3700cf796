#pragma once

// Weight conditions on the circle (A_p, Coifman-Fefferman, Gehring), BMO, conjugate
// functions and quasi-harmonic measure.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcharm/detail/numeric.hpp"
#include "qcharm/error.hpp"
#include "qcharm/geometry.hpp"
#include "qcharm/harmonic.hpp"
#include "qcharm/qc.hpp"
#include "qcharm/weight_profile.hpp"

namespace qcharm {

enum class Verdict { bounded, diverging, inconclusive };

inline const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::bounded: return "bounded";
    case Verdict::diverging: return "diverging";
    default: return "inconclusive";
    }
}

/// [2 pi index / 2^depth, 2 pi (index+1) / 2^depth), moved by half its length when shifted.
struct DyadicArc {
    int depth = 0;
    std::size_t index = 0;
    bool shifted = false;

    double length() const { return two_pi / double(std::size_t{1} << depth); }
    double begin() const { return length() * (double(index) + (shifted ? 0.5 : 0.0)); }
    double end() const { return begin() + length(); }
};

struct ConditionReport {
    std::string condition;               ///< "ap", "cf-i", "cf-ii", "gehring", "bmo"
    std::map<std::string, double> params;
    double constant = 0;                 ///< sup over all scanned arcs
    std::vector<double> per_depth;       ///< running sup by depth
    Verdict verdict = Verdict::inconclusive;
    DyadicArc argmax;
};

namespace detail {

inline constexpr double bounded_tol = 0.05;
inline constexpr double diverging_ratio = 1.25;

/// bounded: last three depths within 5%; diverging: any infinite value, or each of the
/// last three steps grows by 25% or more; otherwise inconclusive.
inline Verdict classify_trace(const std::vector<double>& t)
{
    for (double v : t)
        if (std::isinf(v)) return Verdict::diverging;
    const std::size_t n = t.size();
    // the absolute floor keeps a trace of pure rounding noise (e.g. a BMO norm of 1e-16) bounded
    if (n >= 3 && (t[n - 1] - t[n - 3]) <= bounded_tol * std::abs(t[n - 3]) + 1e-12) return Verdict::bounded;
    if (n >= 4) {
        bool grows = true;
        for (std::size_t i = n - 3; i < n; ++i)
            if (!(t[i] >= diverging_ratio * t[i - 1] && t[i - 1] > 0)) grows = false;
        if (grows) return Verdict::diverging;
    }
    return Verdict::inconclusive;
}

inline void check_depth(std::size_t m, int max_depth)
{
    if (!is_power_of_two(m)) throw PreconditionError("weight grid size must be a power of two");
    int limit = log2_exact(m) - 2;
    if (max_depth < 1 || max_depth > limit)
        throw PreconditionError(concat("max_depth must lie in [1, log2 M - 2] = [1, ", limit, "], got ", max_depth));
}

/// Evaluator for one resolution: value of the condition on the periodic cell range [j0, j0+n).
using ArcEval = std::function<double(std::size_t, std::size_t)>;

/// Scans dyadic and half-shifted dyadic arcs of depth 0..max_depth.
///
/// With multires, step d evaluates every arc of depth <= d on a grid of min(M, 8 2^d) cells, so
/// the trace follows the sup as both the arc family and the resolution refine. A singularity
/// whose integral diverges then shows up as growth from step to step, whereas a fixed number of
/// cells per arc would hide it (power weights are scale invariant). Without multires the full
/// grid is used throughout and each step only adds the new depth.
inline ConditionReport dyadic_scan(std::string condition, std::size_t m, int max_depth, bool multires,
                                   const std::function<ArcEval(std::size_t)>& level)
{
    check_depth(m, max_depth);
    ConditionReport rep;
    rep.condition = std::move(condition);
    double running = -std::numeric_limits<double>::infinity();
    std::size_t prev_res = 0;
    ArcEval eval;
    for (int d = 0; d <= max_depth; ++d) {
        const std::size_t res = multires ? std::min(m, std::size_t{8} << d) : m;
        const bool fresh = res != prev_res;
        if (fresh) eval = level(res);
        prev_res = res;
        // a new resolution revisits the coarser depths; otherwise only depth d is new
        for (int k = fresh ? 0 : d; k <= d; ++k) {
            const std::size_t arcs = std::size_t{1} << k;
            const std::size_t n = res / arcs;
            std::vector<double> vals(2 * arcs);
            parallel_for(2 * arcs, [&](std::size_t i) {
                std::size_t j = i / 2;
                bool shifted = i % 2 == 1;
                vals[i] = eval(j * n + (shifted ? n / 2 : 0), n);
            });
            for (std::size_t i = 0; i < vals.size(); ++i) {
                double v = vals[i];
                if (std::isnan(v)) continue;
                if (v > running) {
                    running = v;
                    rep.argmax = DyadicArc{k, i / 2, i % 2 == 1};
                }
            }
        }
        rep.per_depth.push_back(running);
    }
    rep.constant = running;
    rep.verdict = classify_trace(rep.per_depth);
    return rep;
}

inline double inf_if_nan(double v) { return std::isnan(v) ? std::numeric_limits<double>::infinity() : v; }

} // namespace detail

/// A_p on arcs: (avg w) (avg w^{-1/(p-1)})^{p-1}.
inline ConditionReport check_ap(const WeightProfile& w, double p, int max_depth)
{
    if (!(p > 1)) throw PreconditionError("check_ap needs p > 1");
    const double dual = 1.0 / (p - 1);
    auto rep = detail::dyadic_scan("ap", w.size(), max_depth, true, [&](std::size_t res) -> detail::ArcEval {
        auto lw = std::make_shared<WeightProfile>(w.resampled(res));
        auto s1 = std::make_shared<PrefixSums>(lw->prefix([](double x) { return x; }));
        auto s2 = std::make_shared<PrefixSums>(lw->prefix([dual](double x) { return std::pow(x, -dual); }));
        return [s1, s2, p](std::size_t j0, std::size_t n) {
            return detail::inf_if_nan(s1->average(j0, n) * std::pow(s2->average(j0, n), p - 1));
        };
    });
    rep.params["p"] = p;
    return rep;
}

/// Coifman-Fefferman (i): avg w / exp(avg log w).
inline ConditionReport check_cf_i(const WeightProfile& w, int max_depth)
{
    return detail::dyadic_scan("cf-i", w.size(), max_depth, true, [&](std::size_t res) -> detail::ArcEval {
        auto lw = std::make_shared<WeightProfile>(w.resampled(res));
        auto s1 = std::make_shared<PrefixSums>(lw->prefix([](double x) { return x; }));
        auto sl = std::make_shared<PrefixSums>(lw->prefix([](double x) { return std::log(x); }));
        return [s1, sl](std::size_t j0, std::size_t n) {
            double l = sl->average(j0, n);
            if (l == -std::numeric_limits<double>::infinity()) return std::numeric_limits<double>::infinity();
            return detail::inf_if_nan(s1->average(j0, n) / std::exp(l));
        };
    });
}

/// Coifman-Fefferman (ii) measured as phi(eps): the largest length fraction of an arc that
/// carries at most an eps fraction of its mass. Lightest cells are taken greedily, the last
/// one fractionally.
inline ConditionReport check_cf_ii(const WeightProfile& w, double eps, int max_depth)
{
    if (!(eps > 0 && eps < 1)) throw PreconditionError("check_cf_ii needs eps in (0, 1)");
    constexpr double margin = 0.05;
    auto rep = detail::dyadic_scan("cf-ii", w.size(), max_depth, true, [&](std::size_t res) -> detail::ArcEval {
        auto lw = std::make_shared<WeightProfile>(w.resampled(res));
        return [lw, eps](std::size_t j0, std::size_t n) {
            std::vector<double> cells(n);
            const std::size_t m = lw->size();
            for (std::size_t i = 0; i < n; ++i) cells[i] = (*lw)[(j0 + i) % m];
            std::sort(cells.begin(), cells.end());
            long double total = 0;
            for (double c : cells) total += c;
            if (total <= 0) return 1.0;
            const long double budget = eps * total;
            long double acc = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (acc + cells[i] > budget) {
                    double frac = cells[i] > 0 ? static_cast<double>((budget - acc) / cells[i]) : 1.0;
                    return (double(i) + frac) / double(n);
                }
                acc += cells[i];
            }
            return 1.0;
        };
    });
    rep.params["eps"] = eps;
    rep.verdict = rep.constant < 1 - margin ? Verdict::bounded : Verdict::diverging;
    return rep;
}

/// Gehring B_q: (avg w^q)^{1/q} / avg w.
inline ConditionReport check_gehring(const WeightProfile& w, double q, int max_depth)
{
    if (!(q > 1)) throw PreconditionError("check_gehring needs q > 1");
    auto rep = detail::dyadic_scan("gehring", w.size(), max_depth, true, [&](std::size_t res) -> detail::ArcEval {
        auto lw = std::make_shared<WeightProfile>(w.resampled(res));
        auto s1 = std::make_shared<PrefixSums>(lw->prefix([](double x) { return x; }));
        auto sq = std::make_shared<PrefixSums>(lw->prefix([q](double x) { return std::pow(x, q); }));
        return [s1, sq, q](std::size_t j0, std::size_t n) {
            double a = s1->average(j0, n);
            if (!(a > 0)) return std::numeric_limits<double>::quiet_NaN();  // arc of zeros: ratio undefined
            return std::pow(sq->average(j0, n), 1.0 / q) / a;
        };
    });
    rep.params["q"] = q;
    return rep;
}

/// sup over scanned arcs of avg_I |u - u_I|, on the full grid at every depth.
inline ConditionReport bmo_norm(std::span<const double> u, int max_depth)
{
    for (double v : u)
        if (!std::isfinite(v)) throw DomainError("bmo_norm needs finite samples");
    std::vector<double> data(u.begin(), u.end());
    auto rep = detail::dyadic_scan("bmo", data.size(), max_depth, false, [&](std::size_t) -> detail::ArcEval {
        auto values = std::make_shared<std::vector<double>>(data);
        auto prefix = std::make_shared<PrefixSums>(*values, [](double x) { return x; });
        return [values, prefix](std::size_t j0, std::size_t n) {
            const std::size_t m = values->size();
            const double mean = prefix->average(j0, n);
            long double osc = 0;
            for (std::size_t i = 0; i < n; ++i) osc += std::abs((*values)[(j0 + i) % m] - mean);
            return static_cast<double>(osc / static_cast<long double>(n));
        };
    });
    if (rep.constant < 0) rep.constant = 0;
    return rep;
}

struct ProbeEntry {
    double exponent = 0;
    double integral = 0;       ///< at the full grid
    double integral_half = 0;  ///< at half the grid
    bool stable = false;
};

struct ProbeResult {
    std::optional<double> best_kappa;   ///< largest stable kappa, if any
    std::optional<double> best_lambda;  ///< largest stable lambda, if any
    std::vector<ProbeEntry> kappa, lambda;
};

/// Grid integrals of w^{-kappa} and w^{lambda} at M and M/2; stable means < 10% change.
inline ProbeResult integrability_probe(const WeightProfile& w, const std::vector<double>& kappa_grid,
                                       const std::vector<double>& lambda_grid)
{
    if (kappa_grid.empty() || lambda_grid.empty()) throw PreconditionError("integrability_probe needs nonempty grids");
    for (double k : kappa_grid)
        if (!(k > 0)) throw PreconditionError("kappa values must be positive");
    for (double l : lambda_grid)
        if (!(l > 1)) throw PreconditionError("lambda values must exceed 1");
    const WeightProfile half = w.resampled(w.size() / 2);
    auto integral = [](const WeightProfile& p, double e) {
        long double s = 0;
        for (double x : p.samples()) s += std::pow(x, e);
        return static_cast<double>(s * two_pi / static_cast<long double>(p.size()));
    };
    auto entry = [&](double e, double exponent) {
        ProbeEntry pe;
        pe.exponent = exponent;
        pe.integral = integral(w, e);
        pe.integral_half = integral(half, e);
        pe.stable = std::isfinite(pe.integral) && std::isfinite(pe.integral_half) &&
                    std::abs(pe.integral - pe.integral_half) < 0.1 * std::abs(pe.integral);
        return pe;
    };
    ProbeResult r;
    for (double k : kappa_grid) {
        r.kappa.push_back(entry(-k, k));
        if (r.kappa.back().stable && (!r.best_kappa || k > *r.best_kappa)) r.best_kappa = k;
    }
    for (double l : lambda_grid) {
        r.lambda.push_back(entry(l, l));
        if (r.lambda.back().stable && (!r.best_lambda || l > *r.best_lambda)) r.best_lambda = l;
    }
    return r;
}

/// Boundary conjugate function via the multiplier -i sign(n); the mean is discarded.
inline std::vector<double> conjugate_function(std::span<const double> u)
{
    const std::size_t m = u.size();
    if (m < 2) throw PreconditionError("conjugate_function needs at least two samples");
    std::vector<cplx> in(u.begin(), u.end());
    auto x = detail::dft(in, -1);
    x[0] = 0;
    for (std::size_t k = 1; k < m; ++k) {
        if (2 * k == m) x[k] = 0;
        else if (2 * k < m) x[k] *= cplx(0, -1);
        else x[k] *= cplx(0, 1);
    }
    auto y = detail::dft(x, +1);
    std::vector<double> out(m);
    for (std::size_t j = 0; j < m; ++j) out[j] = y[j].real() / double(m);
    return out;
}

inline std::vector<double> log_samples(const WeightProfile& w)
{
    std::vector<double> out(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) out[j] = std::log(w[j]);
    return out;
}

/// Arc-length interval [begin, end] on the curve; end - begin is the length (wraps mod L).
using BoundaryArc = std::pair<double, double>;

struct QuasiHarmonicMeasure {
    double omega = 0;  ///< |f^{-1}(E)| on T
    double sigma = 0;  ///< arc length of E
};

/// Inverts the boundary correspondence t -> arc-length position of f*(e^{it}).
///
/// The position is s0 + int_0^t w, with w = |d/dt f*| normalized so its total is L and s0
/// the arc-length position of f*(1).
class BoundaryCorrespondence {
public:
    BoundaryCorrespondence(const HarmonicMap& map, const JordanCurve& curve)
    {
        const std::size_t m = std::max<std::size_t>(1u << 14, 4 * static_cast<std::size_t>(map.order()));
        auto d = map.boundary_derivative_samples(m);
        std::vector<double> w(m);
        for (std::size_t j = 0; j < m; ++j) w[j] = std::abs(d[j]);
        cum_.assign(m + 1, 0.0);
        for (std::size_t j = 0; j < m; ++j) cum_[j + 1] = cum_[j] + 0.5 * (w[j] + w[(j + 1) % m]);
        ArcLengthParam g(curve, 4096);
        length_ = g.length();
        const double total = cum_.back();
        if (!(total > 0)) throw DegenerateError("boundary correspondence has zero length");
        for (auto& c : cum_) c *= length_ / total;
        s0_ = g.locate(map.grid()[0]);
    }

    double length() const { return length_; }
    double start() const { return s0_; }

    /// Arc-length position of f*(e^{it}) measured from f*(1), in [0, L].
    double forward(double t) const
    {
        const std::size_t m = cum_.size() - 1;
        double x = detail::wrap_periodic(t, two_pi) / two_pi * double(m);
        std::size_t j = std::min(m - 1, static_cast<std::size_t>(x));
        return cum_[j] + (x - double(j)) * (cum_[j + 1] - cum_[j]);
    }

    /// Smallest t in [0, 2pi] with forward(t) = u, u in [0, L].
    double inverse(double u) const
    {
        const std::size_t m = cum_.size() - 1;
        auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
        if (it == cum_.begin()) return 0.0;
        if (it == cum_.end()) return two_pi;
        std::size_t j = static_cast<std::size_t>(it - cum_.begin()) - 1;
        double seg = cum_[j + 1] - cum_[j];
        double frac = seg > 0 ? (u - cum_[j]) / seg : 0.0;
        return two_pi * (double(j) + frac) / double(m);
    }

private:
    std::vector<double> cum_;
    double length_ = 0;
    double s0_ = 0;
};

namespace detail {

/// Merged, disjoint [a, b) pieces of [0, L) covering the given arcs.
inline std::vector<std::pair<double, double>> normalize_arcs(const std::vector<BoundaryArc>& arcs, double len)
{
    std::vector<std::pair<double, double>> pieces;
    for (auto [a, b] : arcs) {
        double l = b - a;
        if (!(l >= 0)) throw PreconditionError("boundary arc must have end >= begin");
        if (l >= len) return {{0.0, len}};
        double s = wrap_periodic(a, len);
        if (s + l <= len) pieces.emplace_back(s, s + l);
        else {
            pieces.emplace_back(s, len);
            pieces.emplace_back(0.0, s + l - len);
        }
    }
    std::sort(pieces.begin(), pieces.end());
    std::vector<std::pair<double, double>> merged;
    for (auto p : pieces) {
        if (!merged.empty() && p.first <= merged.back().second) merged.back().second = std::max(merged.back().second, p.second);
        else merged.push_back(p);
    }
    return merged;
}

} // namespace detail

/// omega_f(E) = |f^{-1}(E)| and sigma(E) for E a union of arc-length intervals of the curve.
inline QuasiHarmonicMeasure quasi_harmonic_measure(const BoundaryCorrespondence& bc, const std::vector<BoundaryArc>& e)
{
    const double len = bc.length();
    QuasiHarmonicMeasure q;
    for (auto [a, b] : detail::normalize_arcs(e, len)) {
        q.sigma += b - a;
        // shift into coordinates measured from f*(1)
        double u0 = detail::wrap_periodic(a - bc.start(), len);
        double u1 = u0 + (b - a);
        if (u1 <= len) q.omega += bc.inverse(u1) - bc.inverse(u0);
        else q.omega += (two_pi - bc.inverse(u0)) + bc.inverse(u1 - len);
    }
    return q;
}

inline QuasiHarmonicMeasure quasi_harmonic_measure(const HarmonicMap& map, const JordanCurve& curve, const std::vector<BoundaryArc>& e)
{
    return quasi_harmonic_measure(BoundaryCorrespondence(map, curve), e);
}

struct ApoResult {
    double lhs = 0;  ///< omega_f(E)
    double rhs = 0;  ///< 2 |boundary| / |log sigma(E)|
    double sigma = 0;
    bool pass = false;
};

/// Checks omega_f(E) <= 2 |boundary| / |log sigma(E)| for a map normalized so that the image
/// contains the disk D(f(0), C_K).
inline ApoResult apo_bound_check(const BoundaryCorrespondence& bc, double dist_center, double K, const std::vector<BoundaryArc>& e)
{
    const double ck = ck_constant(K);
    if (dist_center < ck)
        throw PreconditionError(detail::concat("apo_bound_check normalization unmet: dist(f(0), boundary) = ", dist_center,
                                               " < C_K = ", ck));
    auto q = quasi_harmonic_measure(bc, e);
    ApoResult r;
    r.lhs = q.omega;
    r.sigma = q.sigma;
    if (q.sigma == 0) {
        r.rhs = 0;
        r.pass = true;
        return r;
    }
    if (!(q.sigma < 1)) throw PreconditionError("apo_bound_check needs sigma(E) < 1");
    r.rhs = 2 * bc.length() / std::abs(std::log(q.sigma));
    r.pass = r.lhs <= r.rhs;
    return r;
}

inline ApoResult apo_bound_check(const HarmonicMap& map, const JordanCurve& curve, double K, const std::vector<BoundaryArc>& e)
{
    BoundaryPolygon poly(curve, std::max<std::size_t>(64, 8 * static_cast<std::size_t>(map.order())));
    return apo_bound_check(BoundaryCorrespondence(map, curve), poly.distance(map.coeff(0)), K, e);
}

/// Scale about f(0) by the factor that makes dist(f(0), boundary) = margin * C_K.
struct Normalized {
    HarmonicMap map;
    JordanCurve curve;
    double scale;
};

inline Normalized normalize_for_apo(const HarmonicMap& map, const JordanCurve& curve, double K, double margin = 1.05)
{
    BoundaryPolygon poly(curve, std::max<std::size_t>(64, 8 * static_cast<std::size_t>(map.order())));
    const cplx c = map.coeff(0);
    const double d = poly.distance(c);
    if (!(d > 0)) throw DegenerateError("f(0) lies on the boundary");
    const double s = margin * ck_constant(K) / d;
    return {map.affine(s, (1 - s) * c), curve.transformed(s, (1 - s) * c), s};
}

} // namespace qcharm
