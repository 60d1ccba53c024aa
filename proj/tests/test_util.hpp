#pragma once

#include "mixdim/dg1d.hpp"
#include "mixdim/quadrature.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace test_util {

/// L2 error of a DG field against f with a 10-point rule per element.
inline double dg_l2_error(const mixdim::DgSpace& dg, const std::vector<double>& u, const mixdim::LineFunction& f)
{
    const auto rule = mixdim::gauss_legendre(10);
    double sum = 0.0;
    for (int e = 0; e < dg.element_count(); ++e) {
        const double a = dg.partition().node(e), h = dg.partition().element_size(e);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double s = a + 0.5 * h * (rule.points[q] + 1.0);
            const double d = dg.evaluate(u, e, s) - f(s);
            sum += 0.5 * h * rule.weights[q] * d * d;
        }
    }
    return std::sqrt(sum);
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937& rng, double lo = -1.0, double hi = 1.0)
{
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace test_util
