#pragma once

// Sampled boundary weights with prefix sums for O(1) arc averages.

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "qcharm/detail/numeric.hpp"
#include "qcharm/error.hpp"

namespace qcharm {

/// Cumulative sums of g(w_j) for one transform g. Infinite terms are counted, not summed,
/// so arcs touching a zero sample average to exactly +inf or -inf.
class PrefixSums {
public:
    PrefixSums() = default;
    PrefixSums(std::span<const double> w, const std::function<double(double)>& g)
    {
        const std::size_t m = w.size();
        sum_.assign(m + 1, 0.0L);
        pos_inf_.assign(m + 1, 0);
        neg_inf_.assign(m + 1, 0);
        for (std::size_t j = 0; j < m; ++j) {
            double v = g(w[j]);
            sum_[j + 1] = sum_[j];
            pos_inf_[j + 1] = pos_inf_[j];
            neg_inf_[j + 1] = neg_inf_[j];
            if (v == std::numeric_limits<double>::infinity()) ++pos_inf_[j + 1];
            else if (v == -std::numeric_limits<double>::infinity()) ++neg_inf_[j + 1];
            else sum_[j + 1] += v;
        }
    }

    std::size_t size() const { return sum_.empty() ? 0 : sum_.size() - 1; }

    /// Mean of g(w) over the periodic cell range [j0, j0 + n).
    double average(std::size_t j0, std::size_t n) const
    {
        const std::size_t m = size();
        j0 %= m;
        long double s;
        std::size_t pinf, ninf;
        if (j0 + n <= m) {
            s = sum_[j0 + n] - sum_[j0];
            pinf = pos_inf_[j0 + n] - pos_inf_[j0];
            ninf = neg_inf_[j0 + n] - neg_inf_[j0];
        } else {
            std::size_t rest = j0 + n - m;
            s = (sum_[m] - sum_[j0]) + sum_[rest];
            pinf = (pos_inf_[m] - pos_inf_[j0]) + pos_inf_[rest];
            ninf = (neg_inf_[m] - neg_inf_[j0]) + neg_inf_[rest];
        }
        if (pinf > 0 && ninf > 0) return std::numeric_limits<double>::quiet_NaN();
        if (pinf > 0) return std::numeric_limits<double>::infinity();
        if (ninf > 0) return -std::numeric_limits<double>::infinity();
        return static_cast<double>(s / static_cast<long double>(n));
    }

    /// Total of the finite terms (for rebuild checks).
    long double total() const { return sum_.empty() ? 0.0L : sum_.back(); }

private:
    std::vector<long double> sum_;
    std::vector<std::size_t> pos_inf_, neg_inf_;
};

/// Nonnegative weight sampled at t_j = (j + offset) 2 pi / M, j = 0..M-1.
///
/// offset 0 means grid nodes, offset 1/2 means cell midpoints. An optional sampler
/// (the exact weight as a function of t) lets coarser resolutions be resampled exactly.
class WeightProfile {
public:
    using Sampler = std::function<double(double)>;

    explicit WeightProfile(std::vector<double> samples, double offset = 0.0, Sampler sampler = {})
        : w_(std::move(samples)), offset_(offset), sampler_(std::move(sampler))
    {
        if (w_.empty()) throw DegenerateError("weight profile has no samples");
        bool any_positive = false;
        for (double v : w_) {
            if (!std::isfinite(v)) throw DomainError("weight samples must be finite");
            if (v < 0) throw DomainError("weight samples must be nonnegative");
            if (v == 0) ++zeros_;
            else any_positive = true;
        }
        if (!any_positive) throw DegenerateError("all-zero weight");
    }

    /// Samples fn at the cell midpoints of an M-point grid.
    static WeightProfile from_function(const Sampler& fn, std::size_t m, double offset = 0.5)
    {
        std::vector<double> w(m);
        for (std::size_t j = 0; j < m; ++j) w[j] = fn(two_pi * (double(j) + offset) / double(m));
        return WeightProfile(std::move(w), offset, fn);
    }

    std::size_t size() const { return w_.size(); }
    std::span<const double> samples() const { return w_; }
    double offset() const { return offset_; }
    bool has_sampler() const { return static_cast<bool>(sampler_); }
    std::size_t zero_count() const { return zeros_; }
    double t(std::size_t j) const { return two_pi * (double(j) + offset_) / double(w_.size()); }
    double operator[](std::size_t j) const { return w_[j]; }

    /// Riemann sum of w over T.
    double integral() const
    {
        long double s = 0;
        for (double v : w_) s += v;
        return static_cast<double>(s * two_pi / static_cast<long double>(w_.size()));
    }

    PrefixSums prefix(const std::function<double(double)>& g) const { return PrefixSums(w_, g); }

    /// The same weight on a grid of r points (r divides M for sampler-free profiles).
    WeightProfile resampled(std::size_t r) const
    {
        const std::size_t m = w_.size();
        if (r == m) return *this;
        if (sampler_) return from_function(sampler_, r, offset_);
        if (r == 0 || m % r != 0) throw PreconditionError("resampling needs a divisor of the grid size");
        const std::size_t step = m / r;
        std::vector<double> out(r);
        if (offset_ == 0.0) {
            for (std::size_t k = 0; k < r; ++k) out[k] = w_[k * step];
            return WeightProfile(std::move(out), 0.0);
        }
        // midpoint grids: the coarse midpoint falls between two fine midpoints
        for (std::size_t k = 0; k < r; ++k) {
            std::size_t c = k * step + step / 2;
            out[k] = 0.5 * (w_[c - 1] + w_[c]);
        }
        return WeightProfile(std::move(out), offset_);
    }

private:
    std::vector<double> w_;
    double offset_ = 0.0;
    Sampler sampler_;
    std::size_t zeros_ = 0;
};

} // namespace qcharm
