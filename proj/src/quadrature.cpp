#include "mixdim/quadrature.hpp"

#include "mixdim/common.hpp"

#include <cmath>
#include <string>

namespace mixdim {

double legendre(int m, double xi)
{
    if (m == 0) return 1.0;
    double p0 = 1.0, p1 = xi;
    for (int k = 2; k <= m; ++k) {
        const double p2 = ((2 * k - 1) * xi * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

double legendre_derivative(int m, double xi)
{
    // P'_m = sum over k = m-1, m-3, ... of (2k+1) P_k, valid on the closed interval.
    double d = 0.0;
    for (int k = m - 1; k >= 0; k -= 2) d += (2 * k + 1) * legendre(k, xi);
    return d;
}

GaussRule gauss_legendre(int n)
{
    if (n < 1) throw ConfigError("gauss_legendre: need at least one point");
    GaussRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at converged node
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.points[i] = -x;
        rule.points[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.points[n / 2] = 0.0;
    return rule;
}

namespace {

std::vector<TetQuadPoint> make_order1()
{
    return {{{0.25, 0.25, 0.25, 0.25}, 1.0 / 6.0}};
}

std::vector<TetQuadPoint> make_order2()
{
    const double a = 0.5854101966249685, b = 0.1381966011250105;
    std::vector<TetQuadPoint> q;
    for (int i = 0; i < 4; ++i) {
        TetQuadPoint p{{b, b, b, b}, 1.0 / 24.0};
        p.bary[i] = a;
        q.push_back(p);
    }
    return q;
}

// 14-point rule with positive weights, exact through degree 5.
std::vector<TetQuadPoint> make_order4()
{
    std::vector<TetQuadPoint> q;
    const auto add_class_4 = [&](double a, double w) {
        for (int i = 0; i < 4; ++i) {
            TetQuadPoint p{{a, a, a, a}, w};
            p.bary[i] = 1.0 - 3.0 * a;
            q.push_back(p);
        }
    };
    add_class_4(0.0927352503108912264, 0.0122488405193936582);
    add_class_4(0.3108859192633006097, 0.0187813209530026417);
    const double b = 0.0455037041256496494, w6 = 0.0070910034628469110;
    const double c = 0.5 - b;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            TetQuadPoint p{{c, c, c, c}, w6};
            p.bary[i] = b;
            p.bary[j] = b;
            q.push_back(p);
        }
    return q;
}

} // namespace

const std::vector<TetQuadPoint>& tet_quadrature(int order)
{
    static const std::vector<TetQuadPoint> q1 = make_order1();
    static const std::vector<TetQuadPoint> q2 = make_order2();
    static const std::vector<TetQuadPoint> q4 = make_order4();
    switch (order) {
    case 1: return q1;
    case 2: return q2;
    case 4: return q4;
    default: throw ConfigError("tet_quadrature: unsupported order " + std::to_string(order));
    }
}

} // namespace mixdim
