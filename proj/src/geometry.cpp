#include "mixdim/geometry.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace mixdim {

double RadiusProfile::operator()(double s, double length) const
{
    if (const auto* c = std::get_if<Constant>(&shape_)) return c->radius;
    const auto& t = std::get<Tanh>(shape_);
    return t.r_min + 0.5 * (t.r_max - t.r_min) * (1.0 + std::tanh(t.beta * (s / length - 0.5)));
}

PermeabilityProfile PermeabilityProfile::piecewise(std::vector<Piece> pieces)
{
    if (pieces.empty()) throw ConfigError("piecewise permeability needs at least one piece");
    std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.begin < b.begin; });
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (!(pieces[i].end > pieces[i].begin)) throw ConfigError("permeability piece with empty interval");
        if (i > 0 && std::abs(pieces[i].begin - pieces[i - 1].end) > 1e-12)
            throw ConfigError("permeability pieces must tile the centerline without gaps");
    }
    return PermeabilityProfile(std::move(pieces), 0.0);
}

double PermeabilityProfile::operator()(double s) const
{
    if (pieces_.empty()) return value_;
    for (const auto& p : pieces_)
        if (s < p.end) return p.value;
    return pieces_.back().value;
}

double PermeabilityProfile::max_value() const
{
    if (pieces_.empty()) return value_;
    double m = 0.0;
    for (const auto& p : pieces_) m = std::max(m, p.value);
    return m;
}

VesselGeometry::VesselGeometry(Vec3 p0, Vec3 p1, RadiusProfile radius_profile, PermeabilityProfile permeability)
    : p0_(p0), p1_(p1), radius_(radius_profile), permeability_(std::move(permeability))
{
    length_ = norm(p1 - p0);
    if (!(length_ > 0.0)) throw ConfigError("vessel endpoints coincide");
    tangent_ = (1.0 / length_) * (p1 - p0);

    // Gram-Schmidt against the coordinate axis least aligned with the tangent.
    int axis = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(tangent_[i]) < std::abs(tangent_[axis])) axis = i;
    Vec3 a;
    a[axis] = 1.0;
    e1_ = a - dot(a, tangent_) * tangent_;
    e1_ *= 1.0 / norm(e1_);
    e2_ = cross(tangent_, e1_);

    d0_ = std::numeric_limits<double>::max();
    d1_ = 0.0;
    double prev_area = -1.0;
    for (int j = 0; j <= sample_count; ++j) {
        const double s = length_ * j / sample_count;
        const double r = radius(s);
        if (!(r > 0.0)) throw ConfigError("radius must be positive along the centerline");
        const double area = section_area(s), circ = section_circumference(s);
        d0_ = std::min({d0_, area, circ});
        d1_ = std::max({d1_, area, circ});
        r_max_ = std::max(r_max_, r);
        if (prev_area >= 0.0 && area < prev_area - 1e-12) {
            std::ostringstream msg;
            msg << "cross-section area decreases near s = " << s << "; positivity of the advection form needs it nondecreasing";
            throw ConfigError(msg.str());
        }
        prev_area = area;
        const double g = permeability_(s);
        if (!(g >= 0.0)) throw ConfigError("permeability must be non-negative");
    }
}

void VesselGeometry::check_domain(double s) const
{
    if (s < -1e-14 * length_ || s > length_ * (1.0 + 1e-14)) {
        std::ostringstream msg;
        msg << "arclength " << s << " outside [0, " << length_ << "]";
        throw DomainError(msg.str());
    }
}

Vec3 VesselGeometry::point_at(double s) const
{
    check_domain(s);
    return p0_ + s * tangent_;
}

double VesselGeometry::radius(double s) const { return radius_(s, length_); }

double VesselGeometry::section_area(double s) const
{
    const double r = radius(s);
    return pi * r * r;
}

double VesselGeometry::section_circumference(double s) const { return 2.0 * pi * radius(s); }

double VesselGeometry::permeability(double s) const { return permeability_(s); }

std::vector<CirclePoint> VesselGeometry::circle_points(double s, int n) const
{
    if (n < 4) throw ConfigError("circle quadrature needs at least 4 points");
    const Vec3 c = point_at(s);
    const double r = radius(s);
    const double w = section_circumference(s) / n;
    std::vector<CirclePoint> pts;
    pts.reserve(n);
    for (int j = 0; j < n; ++j) {
        const double theta = 2.0 * pi * j / n;
        pts.push_back({c + r * (std::cos(theta) * e1_ + std::sin(theta) * e2_), w});
    }
    return pts;
}

void VesselGeometry::check_inside_box(const Vec3& lo, const Vec3& hi, int n_circ) const
{
    constexpr int samples = 200;
    for (int j = 0; j <= samples; ++j) {
        const double s = length_ * j / samples;
        auto pts = circle_points(s, n_circ);
        pts.push_back({point_at(s), 0.0});
        for (const auto& p : pts)
            for (int d = 0; d < 3; ++d)
                if (p.x[d] < lo[d] - 1e-12 || p.x[d] > hi[d] + 1e-12) {
                    std::ostringstream msg;
                    msg << "vessel tube leaves the domain at s = " << s;
                    throw GeometryError(msg.str());
                }
    }
}

} // namespace mixdim
