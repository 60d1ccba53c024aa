#pragma once

#include "mixdim/dg1d.hpp"
#include "mixdim/geometry.hpp"
#include "mixdim/mesh3d.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mixdim {

struct IoError : Error {
    using Error::Error;
};

/// Scientific notation, 6 significant digits, independent of the C++ locale.
std::string format_sci(double v);

/// Legacy ASCII VTK, UNSTRUCTURED_GRID of tetrahedra with a point scalar.
void write_vtk_3d(const TetMesh& mesh, std::span<const double> field, const std::string& path,
                  const std::string& name = "c");

/// Legacy ASCII VTK POLYDATA: one polyline per element sampled at degree + 1
/// equispaced points, with the DG field as point scalar.
void write_vtk_1d(const VesselGeometry& geometry, const DgSpace& dg, std::span<const double> field,
                  const std::string& path, const std::string& name = "c_hat");

/// Header row plus rows; empty optionals become empty cells.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::optional<double>>>& rows);

/// Flat `key = value` configuration; '#' starts a comment.
class ConfigFile {
public:
    static ConfigFile parse(const std::string& text);
    static ConfigFile load(const std::string& path);

    /// Throws ConfigError on keys outside `allowed`.
    void check_keys(const std::vector<std::string>& allowed) const;

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string get(const std::string& key) const;
    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    const std::map<std::string, std::string>& values() const { return values_; }

    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<int> get_ints(const std::string& key) const;
    Vec3 get_vec3(const std::string& key) const;
    bool get_bool(const std::string& key) const;

private:
    std::map<std::string, std::string> values_;
};

} // namespace mixdim
