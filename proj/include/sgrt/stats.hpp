#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace sgrt {

/// Welford running mean / variance.
class RunningStats {
public:
    void add(double x) {
        ++n_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }
    std::uint64_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double std_error() const { return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Upper tail P(X >= stat) of a chi-square distribution.
double chi_square_pvalue(double stat, double dof);

struct ChiSquareResult {
    double statistic = 0.0;
    double dof = 0.0;
    double p_value = 0.0;
};

/// Goodness of fit of `samples` in [0, 1) to the uniform distribution.
ChiSquareResult chi_square_uniform(std::span<const double> samples, int bins);

/// Homogeneity test of two count histograms over the same categories.
ChiSquareResult chi_square_two_sample(std::span<const std::uint64_t> a,
                                      std::span<const std::uint64_t> b);

/// Sample Pearson correlation.
double correlation(std::span<const double> x, std::span<const double> y);

} // namespace sgrt
