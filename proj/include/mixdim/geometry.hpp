#pragma once

#include "mixdim/common.hpp"

#include <utility>
#include <variant>
#include <vector>

namespace mixdim {

/// Radius of the vessel cross-section as a function of arclength.
class RadiusProfile {
public:
    struct Constant {
        double radius;
    };
    /// R(s) = R_min + (R_max - R_min)/2 * (1 + tanh(beta (s/L - 1/2)))
    struct Tanh {
        double r_min, r_max, beta;
    };

    static RadiusProfile constant(double radius) { return RadiusProfile(Constant{radius}); }
    static RadiusProfile tanh_ramp(double r_min, double r_max, double beta)
    {
        return RadiusProfile(Tanh{r_min, r_max, beta});
    }

    double operator()(double s, double length) const;

private:
    explicit RadiusProfile(std::variant<Constant, Tanh> v) : shape_(v) {}
    std::variant<Constant, Tanh> shape_;
};

/// Wall permeability gamma(s); pieces are half-open [begin, end) except the last.
class PermeabilityProfile {
public:
    struct Piece {
        double begin, end, value;
    };

    static PermeabilityProfile constant(double gamma) { return PermeabilityProfile({}, gamma); }
    static PermeabilityProfile piecewise(std::vector<Piece> pieces);

    double operator()(double s) const;
    double max_value() const;
    bool is_piecewise() const { return !pieces_.empty(); }
    const std::vector<Piece>& pieces() const { return pieces_; }

private:
    PermeabilityProfile(std::vector<Piece> pieces, double value) : pieces_(std::move(pieces)), value_(value) {}
    std::vector<Piece> pieces_;
    double value_ = 0.0;
};

struct CirclePoint {
    Vec3 x;
    double weight;
};

/// Straight vessel centerline from p0 to p1 with cross-section and wall data.
/// Immutable after construction.
class VesselGeometry {
public:
    VesselGeometry(Vec3 p0, Vec3 p1, RadiusProfile radius_profile, PermeabilityProfile permeability);

    double length() const { return length_; }
    const Vec3& start() const { return p0_; }
    const Vec3& end() const { return p1_; }
    const Vec3& tangent() const { return tangent_; }
    const Vec3& normal1() const { return e1_; }
    const Vec3& normal2() const { return e2_; }

    Vec3 point_at(double s) const;
    double radius(double s) const;
    double section_area(double s) const;
    double section_circumference(double s) const;
    double permeability(double s) const;

    /// n-point trapezoid rule on the boundary circle of the cross-section at s.
    std::vector<CirclePoint> circle_points(double s, int n) const;

    /// Lower/upper bounds of |D| and |dD| over sampled s (non-collapse constants).
    double d0() const { return d0_; }
    double d1() const { return d1_; }
    double gamma_max() const { return permeability_.max_value(); }
    double max_radius() const { return r_max_; }

    /// Throws GeometryError when any sampled circle point leaves the closed box.
    void check_inside_box(const Vec3& lo, const Vec3& hi, int n_circ = 16) const;

    const PermeabilityProfile& permeability_profile() const { return permeability_; }

    static constexpr int sample_count = 10000;

private:
    void check_domain(double s) const;

    Vec3 p0_, p1_;
    double length_ = 0.0;
    Vec3 tangent_, e1_, e2_;
    RadiusProfile radius_;
    PermeabilityProfile permeability_;
    double d0_ = 0.0, d1_ = 0.0, r_max_ = 0.0;
};

} // namespace mixdim
