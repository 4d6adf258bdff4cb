#include "sgrt/stats.hpp"

#include "sgrt/gaussian.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>

namespace sgrt {

double chi_square_pvalue(double stat, double dof) {
    if (!(dof > 0.0))
        throw Error("chi-square needs positive degrees of freedom");
    if (!(stat > 0.0))
        return 1.0;
    return boost::math::gamma_q(0.5 * dof, 0.5 * stat);
}

ChiSquareResult chi_square_uniform(std::span<const double> samples, int bins) {
    if (bins < 2 || samples.empty())
        throw Error("chi_square_uniform: need at least two bins and one sample");
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(bins), 0);
    for (double x : samples) {
        const int b = std::clamp(static_cast<int>(x * bins), 0, bins - 1);
        ++counts[static_cast<std::size_t>(b)];
    }
    const double expected = static_cast<double>(samples.size()) / bins;
    ChiSquareResult r;
    for (std::uint64_t c : counts)
        r.statistic += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
    r.dof = bins - 1;
    r.p_value = chi_square_pvalue(r.statistic, r.dof);
    return r;
}

ChiSquareResult chi_square_two_sample(std::span<const std::uint64_t> a,
                                      std::span<const std::uint64_t> b) {
    if (a.size() != b.size())
        throw Error("chi_square_two_sample: histogram sizes differ");
    double na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        na += static_cast<double>(a[i]);
        nb += static_cast<double>(b[i]);
    }
    if (na == 0.0 || nb == 0.0)
        throw Error("chi_square_two_sample: empty histogram");
    const double ka = std::sqrt(nb / na);
    const double kb = std::sqrt(na / nb);
    ChiSquareResult r;
    int used = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double sum = static_cast<double>(a[i] + b[i]);
        if (sum == 0.0)
            continue;
        const double d = ka * static_cast<double>(a[i]) - kb * static_cast<double>(b[i]);
        r.statistic += d * d / sum;
        ++used;
    }
    r.dof = std::max(1, used - 1);
    r.p_value = chi_square_pvalue(r.statistic, r.dof);
    return r;
}

double correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw Error("correlation: need two equally sized samples");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

} // namespace sgrt
