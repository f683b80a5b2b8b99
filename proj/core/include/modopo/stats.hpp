#pragma once

#include <cmath>
#include <cstddef>

namespace modopo {

/// Welford accumulator with Chan's pairwise merge. Merging in a fixed order
/// gives bit-identical results independent of how samples were partitioned
/// across threads, as long as the partition itself is fixed.
class RunningStat {
public:
    void add(double x) noexcept
    {
        ++n_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }

    void merge(const RunningStat& o) noexcept
    {
        if (o.n_ == 0) {
            return;
        }
        if (n_ == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n_);
        const double nb = static_cast<double>(o.n_);
        const double delta = o.mean_ - mean_;
        const double total = na + nb;
        mean_ += delta * nb / total;
        m2_ += o.m2_ + delta * delta * na * nb / total;
        n_ += o.n_;
    }

    [[nodiscard]] std::size_t count() const noexcept { return n_; }
    [[nodiscard]] double mean() const noexcept { return mean_; }
    [[nodiscard]] double variance() const noexcept
    {
        return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
    }
    [[nodiscard]] double std_error() const noexcept
    {
        return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
    }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

}  // namespace modopo
