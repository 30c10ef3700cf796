#pragma once

// Disk harmonic maps stored by the Fourier coefficients of their boundary function.
//
// f(re^{i phi}) = sum_n c_n r^{|n|} e^{i n phi} = a(z) + conj(b(z)),
// a(z) = sum_{n>=0} c_n z^n, b(z) = sum_{n>=1} conj(c_{-n}) z^n.

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "qcharm/detail/numeric.hpp"
#include "qcharm/error.hpp"
#include "qcharm/weight_profile.hpp"

namespace qcharm {

struct DiskPoint {
    double r = 0;
    double phi = 0;

    cplx z() const { return std::polar(r, phi); }
};

/// Poisson kernel P(r, x) = (1 - r^2) / (2 pi (1 - 2 r cos x + r^2)).
inline double poisson_kernel(double r, double x)
{
    if (!(r >= 0 && r < 1)) throw DomainError(detail::concat("poisson_kernel needs 0 <= r < 1, got r = ", r));
    return (1 - r * r) / (two_pi * (1 - 2 * r * std::cos(x) + r * r));
}

class HarmonicMap {
public:
    /// coeffs indexed n = -N..N (size 2N+1, N >= 1).
    explicit HarmonicMap(std::vector<cplx> coeffs) : c_(std::move(coeffs))
    {
        if (c_.size() < 3 || c_.size() % 2 == 0) throw PreconditionError("coefficient list must have odd size 2N+1 with N >= 1");
        n_ = static_cast<long>(c_.size() / 2);
        for (auto v : c_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw DomainError("non-finite Fourier coefficient");
        grid_ = detail::synthesize(c_, 2 * static_cast<std::size_t>(n_));
    }

    /// Interpolating coefficients from M = 2N equispaced boundary samples f*(e^{2 pi i j/M}).
    /// The Nyquist coefficient is split evenly between n = N and n = -N.
    static HarmonicMap from_samples(std::span<const cplx> samples)
    {
        const std::size_t m = samples.size();
        if (m < 4 || m % 2 != 0) throw PreconditionError("from_samples needs an even sample count >= 4");
        auto x = detail::dft(samples, -1);
        const std::size_t big_n = m / 2;
        std::vector<cplx> c(m + 1);
        const double inv = 1.0 / double(m);
        for (std::size_t n = 0; n < big_n; ++n) c[big_n + n] = x[n] * inv;
        for (std::size_t n = 1; n < big_n; ++n) c[big_n - n] = x[m - n] * inv;
        c[0] = c[m] = 0.5 * x[big_n] * inv;
        return HarmonicMap(std::move(c));
    }

    long order() const { return n_; }
    std::span<const cplx> coeffs() const { return c_; }
    cplx coeff(long n) const { return std::abs(n) > n_ ? cplx{} : c_[static_cast<std::size_t>(n + n_)]; }

    /// Cached boundary samples f*(e^{i t_j}), t_j = 2 pi j / (2N).
    std::span<const cplx> grid() const { return grid_; }

    /// sum_{|n| > N/2} |c_n|^2 / sum |c_n|^2.
    double tail_energy_ratio() const
    {
        long double tail = 0, total = 0;
        for (long n = -n_; n <= n_; ++n) {
            long double e = std::norm(coeff(n));
            total += e;
            if (2 * std::abs(n) > n_) tail += e;
        }
        return total > 0 ? static_cast<double>(tail / total) : 0.0;
    }

    bool sampling_adequate() const { return tail_energy_ratio() < 1e-8; }

    /// alpha f + beta.
    HarmonicMap affine(cplx alpha, cplx beta) const
    {
        std::vector<cplx> c = c_;
        for (auto& v : c) v *= alpha;
        c[static_cast<std::size_t>(n_)] += beta;
        return HarmonicMap(std::move(c));
    }

    /// Spectral Poisson integral sum_n c_n r^{|n|} e^{i n phi}.
    cplx evaluate(cplx z) const
    {
        check_interior(z);
        cplx sum = coeff(0), p = 1.0;
        for (long n = 1; n <= n_; ++n) {
            p *= z;
            sum += coeff(n) * p + coeff(-n) * std::conj(p);
        }
        return sum;
    }
    cplx evaluate(DiskPoint p) const { return evaluate(p.z()); }

    cplx a(cplx z) const { return horner(z, +1, false); }
    cplx b(cplx z) const { return horner(z, -1, false); }
    cplx a_prime(cplx z) const { return horner(z, +1, true); }
    cplx b_prime(cplx z) const { return horner(z, -1, true); }

    /// (f_z, f_zbar) = (a'(z), conj(b'(z))).
    std::pair<cplx, cplx> wirtinger(cplx z) const
    {
        check_interior(z);
        return {a_prime(z), std::conj(b_prime(z))};
    }
    std::pair<cplx, cplx> wirtinger(DiskPoint p) const { return wirtinger(p.z()); }

    /// d f / d phi = sum_n (i n) c_n r^{|n|} e^{i n phi}.
    cplx d_phi(cplx z) const
    {
        check_interior(z);
        cplx sum = 0, p = 1.0;
        for (long n = 1; n <= n_; ++n) {
            p *= z;
            sum += double(n) * (coeff(n) * p - coeff(-n) * std::conj(p));
        }
        return cplx(0, 1) * sum;
    }
    cplx d_phi(DiskPoint p) const { return d_phi(p.z()); }

    /// d f / d r = sum_n |n| c_n r^{|n|-1} e^{i n phi}.
    cplx d_r(DiskPoint q) const
    {
        check_interior(q.z());
        const cplx u = std::polar(1.0, q.phi);
        cplx sum = 0, p = 1.0;  // p = r^{n-1} e^{i(n-1)phi}
        const cplx z = q.z();
        for (long n = 1; n <= n_; ++n) {
            sum += double(n) * (coeff(n) * p * u + coeff(-n) * std::conj(p * u));
            p *= z;
        }
        return sum;
    }

    /// f*(e^{it}) by direct summation.
    cplx boundary_value(double t) const
    {
        cplx sum = coeff(0);
        const cplx e = std::polar(1.0, t);
        cplx p = 1.0;
        for (long n = 1; n <= n_; ++n) {
            p *= e;
            sum += coeff(n) * p + coeff(-n) * std::conj(p);
        }
        return sum;
    }

    /// d/dt f*(e^{it}) via the multiplier (i n).
    cplx boundary_derivative(double t) const
    {
        const cplx e = std::polar(1.0, t);
        cplx sum = 0, p = 1.0;
        for (long n = 1; n <= n_; ++n) {
            p *= e;
            sum += double(n) * (coeff(n) * p - coeff(-n) * std::conj(p));
        }
        return cplx(0, 1) * sum;
    }

    /// f* at t_j = t0 + 2 pi j / m (zero padded when m > 2N).
    std::vector<cplx> boundary_samples(std::size_t m, double t0 = 0.0) const { return detail::synthesize(c_, m, t0); }

    /// d/dt f* at t_j = t0 + 2 pi j / m.
    std::vector<cplx> boundary_derivative_samples(std::size_t m, double t0 = 0.0) const
    {
        std::vector<cplx> d(c_.size());
        for (long n = -n_; n <= n_; ++n) d[static_cast<std::size_t>(n + n_)] = cplx(0, double(n)) * coeff(n);
        return detail::synthesize(d, m, t0);
    }

private:
    static void check_interior(cplx z)
    {
        if (!(std::abs(z) < 1)) throw DomainError(detail::concat("interior evaluation needs |z| < 1, got |z| = ", std::abs(z)));
    }

    /// Horner for a (side +1) or b (side -1), or their derivatives.
    cplx horner(cplx z, int side, bool derivative) const
    {
        auto coef = [&](long n) { return side > 0 ? coeff(n) : std::conj(coeff(-n)); };
        cplx acc = 0;
        if (derivative) {
            for (long n = n_; n >= 1; --n) acc = acc * z + double(n) * coef(n);
            return acc;
        }
        for (long n = n_; n >= 1; --n) acc = acc * z + coef(n);
        acc *= z;
        return side > 0 ? acc + coeff(0) : acc;
    }

    std::vector<cplx> c_;
    long n_ = 0;
    std::vector<cplx> grid_;
};

/// Boundary-derivative weight w(t_j) = |d/dt f*(e^{it_j})| on m >= 2N grid nodes (default m = 2N).
inline WeightProfile boundary_weight(const HarmonicMap& map, std::size_t m = 0)
{
    const std::size_t base = 2 * static_cast<std::size_t>(map.order());
    if (m == 0) m = base;
    if (m < base) throw PreconditionError("boundary_weight needs at least 2N samples");
    auto d = map.boundary_derivative_samples(m);
    std::vector<double> w(m);
    for (std::size_t j = 0; j < m; ++j) w[j] = std::abs(d[j]);
    return WeightProfile(std::move(w), 0.0);
}

} // namespace qcharm
