#pragma once

#include "mixdim/linalg.hpp"
#include "mixdim/mesh3d.hpp"

#include <functional>
#include <string>

namespace mixdim {

/// Space-time scalar coefficient or source. `is_zero` lets assembly skip work.
struct ScalarField3 {
    std::function<double(const Vec3&, double)> eval;
    bool is_zero = false;

    static ScalarField3 constant(double value)
    {
        return {[value](const Vec3&, double) { return value; }, value == 0.0};
    }
    static ScalarField3 zero() { return constant(0.0); }

    double operator()(const Vec3& x, double t) const { return eval(x, t); }
};

/// Time-independent velocity field.
struct VectorField3 {
    std::function<Vec3(const Vec3&)> eval;
    bool is_zero = false;
    bool divergence_free = false;

    static VectorField3 constant(const Vec3& u)
    {
        return {[u](const Vec3&) { return u; }, u.x == 0.0 && u.y == 0.0 && u.z == 0.0, true};
    }

    Vec3 operator()(const Vec3& x) const { return eval(x); }
};

namespace fem3d {

inline constexpr int assembly_order = 2;
inline constexpr int load_order = 4;

SparseMatrix assemble_mass(const FemSpace& space);

/// Throws CoefficientError if kappa <= 0 at any quadrature point.
SparseMatrix assemble_stiffness(const FemSpace& space, const ScalarField3& kappa);

/// Entry (i, j) = -int (U phi_j) . grad phi_i
SparseMatrix assemble_convection(const FemSpace& space, const VectorField3& velocity);

std::vector<double> assemble_load(const FemSpace& space, const ScalarField3& f, double t);

/// Row replacement: Dirichlet rows become identity rows, rhs gets g(x_i, t).
/// Columns are left untouched.
void apply_dirichlet(const FemSpace& space, SparseMatrix& system, std::vector<double>& rhs,
                     const ScalarField3& g, double t);
void apply_dirichlet_rows(const FemSpace& space, SparseMatrix& system);
void apply_dirichlet_rhs(const FemSpace& space, std::vector<double>& rhs, const ScalarField3& g, double t);

struct CoefficientReport {
    double kappa_min = 0.0, kappa_max = 0.0;
    double velocity_max = 0.0;
    double poincare_estimate = 0.0;
    bool divergence_free = false;
    bool velocity_bound_ok = true; // ||U||_inf <= k0 / (2 C0)
    std::string warning;
};

/// Samples kappa and U on the load quadrature points. Throws CoefficientError if kappa <= 0.
CoefficientReport check_coefficients(const FemSpace& space, const ScalarField3& kappa,
                                     const VectorField3& velocity);

} // namespace fem3d
} // namespace mixdim
