#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <numbers>
#include <span>
#include <thread>
#include <vector>

#include <fftw3.h>

namespace qcharm {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

namespace detail {

/// Reduce an angle to (-pi, pi].
inline double wrap_angle(double a)
{
    double r = std::remainder(a, two_pi);
    if (r <= -pi) r += two_pi;
    return r;
}

/// Reduce to [0, period).
inline double wrap_periodic(double x, double period)
{
    double r = std::fmod(x, period);
    if (r < 0) r += period;
    if (r >= period) r -= period;
    return r;
}

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline int log2_exact(std::size_t n)
{
    int k = 0;
    while ((std::size_t{1} << k) < n) ++k;
    return k;
}

/// Unwrap a sequence of angles in place so consecutive entries differ by at most pi.
inline void unwrap(std::span<double> angles)
{
    for (std::size_t i = 1; i < angles.size(); ++i)
        angles[i] = angles[i - 1] + wrap_angle(angles[i] - angles[i - 1]);
}

// ---------------------------------------------------------------------------
// FFT. The FFTW planner is not reentrant, so planning is serialized.

inline std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

/// Unnormalized DFT. sign = -1 gives X_k = sum_j x_j e^{-2 pi i jk/M}.
inline std::vector<cplx> dft(std::span<const cplx> in, int sign)
{
    const int n = static_cast<int>(in.size());
    std::vector<cplx> out(in.size());
    if (n == 0) return out;
    std::vector<cplx> buf(in.begin(), in.end());
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(buf.data()),
                                reinterpret_cast<fftw_complex*>(out.data()),
                                sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

/// Samples at t_j = t0 + 2 pi j / M of the trigonometric polynomial sum_n spec(n) e^{int},
/// where spec is indexed n = -N..N (size 2N+1). Frequencies alias modulo M.
inline std::vector<cplx> synthesize(std::span<const cplx> spec, std::size_t m, double t0 = 0.0)
{
    const long big_n = static_cast<long>(spec.size() / 2);
    std::vector<cplx> bins(m, cplx{});
    const long mm = static_cast<long>(m);
    for (long n = -big_n; n <= big_n; ++n) {
        cplx c = spec[static_cast<std::size_t>(n + big_n)];
        if (c == cplx{}) continue;
        if (t0 != 0.0) c *= std::polar(1.0, static_cast<double>(n) * t0);
        long bin = ((n % mm) + mm) % mm;
        bins[static_cast<std::size_t>(bin)] += c;
    }
    return dft(bins, +1);
}

// ---------------------------------------------------------------------------
// Threading. QCHARM_THREADS caps the worker count.

inline unsigned thread_count()
{
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("QCHARM_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return hw;
}

/// Runs fn(i) for i in [0, n). Each index must write only its own output slot.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn)
{
    const unsigned workers = std::min<std::size_t>(thread_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------

/// Fritsch-Carlson monotone cubic interpolant through increasing (x, y) data.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y))
    {
        const std::size_t n = x_.size();
        m_.assign(n, 0.0);
        if (n < 2) return;
        std::vector<double> delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
        m_[0] = delta[0];
        m_[n - 1] = delta[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i)
            m_[i] = (delta[i - 1] * delta[i] <= 0) ? 0.0 : 0.5 * (delta[i - 1] + delta[i]);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (delta[i] == 0) {
                m_[i] = m_[i + 1] = 0;
                continue;
            }
            double a = m_[i] / delta[i];
            double b = m_[i + 1] / delta[i];
            double s = a * a + b * b;
            if (s > 9) {
                double tau = 3 / std::sqrt(s);
                m_[i] = tau * a * delta[i];
                m_[i + 1] = tau * b * delta[i];
            }
        }
    }

    double operator()(double x) const
    {
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
        i = std::min(i, x_.size() - 2);
        double h = x_[i + 1] - x_[i];
        double t = (x - x_[i]) / h;
        double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
        double h10 = t * (1 - t) * (1 - t);
        double h01 = t * t * (3 - 2 * t);
        double h11 = t * t * (t - 1);
        return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
    }

private:
    std::vector<double> x_, y_, m_;
};

// ---------------------------------------------------------------------------

inline constexpr std::uint64_t default_seed = 0x5EED;

/// splitmix64; the stream is fully specified so reports are reproducible across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed = default_seed) : state_(seed) {}

    std::uint64_t next()
    {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

} // namespace detail
} // namespace qcharm
