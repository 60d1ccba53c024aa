#include "mixdim/io.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mixdim {

std::string format_sci(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 5);
    return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_for_write(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing: " + std::strerror(errno));
    return out;
}

void finish(std::ofstream& out, const std::string& path)
{
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& text)
{
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) throw ConfigError("key '" + key + "': not a number: '" + text + "'");
    return v;
}

int parse_int(const std::string& key, const std::string& text)
{
    int v = 0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) throw ConfigError("key '" + key + "': not an integer: '" + text + "'");
    return v;
}

} // namespace

void write_vtk_3d(const TetMesh& mesh, std::span<const double> field, const std::string& path,
                  const std::string& name)
{
    if (static_cast<int>(field.size()) != mesh.vertex_count())
        throw DomainError("write_vtk_3d: field length does not match vertex count");
    auto out = open_for_write(path);
    const int nv = mesh.vertex_count(), nt = mesh.tet_count();
    out << "# vtk DataFile Version 3.0\n" << name << " tissue concentration\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << nv << " double\n";
    for (const auto& v : mesh.vertices())
        out << format_sci(v.x) << ' ' << format_sci(v.y) << ' ' << format_sci(v.z) << '\n';
    out << "CELLS " << nt << ' ' << 5 * nt << '\n';
    for (int k = 0; k < nt; ++k) {
        const auto& t = mesh.tet(k);
        out << "4 " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
    }
    out << "CELL_TYPES " << nt << '\n';
    for (int k = 0; k < nt; ++k) out << "10\n";
    out << "POINT_DATA " << nv << "\nSCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : field) out << format_sci(v) << '\n';
    finish(out, path);
}

void write_vtk_1d(const VesselGeometry& geometry, const DgSpace& dg, std::span<const double> field,
                  const std::string& path, const std::string& name)
{
    if (static_cast<int>(field.size()) != dg.dof_count())
        throw DomainError("write_vtk_1d: field length does not match dof count");
    auto out = open_for_write(path);
    const int ne = dg.element_count(), per = dg.degree() + 1;
    const int np = ne * per;
    out << "# vtk DataFile Version 3.0\n" << name << " vessel concentration\nASCII\nDATASET POLYDATA\n";
    out << "POINTS " << np << " double\n";
    std::vector<double> values;
    values.reserve(np);
    const auto& part = dg.partition();
    for (int e = 0; e < ne; ++e)
        for (int j = 0; j < per; ++j) {
            const double s = part.node(e) + part.element_size(e) * j / dg.degree();
            const Vec3 x = geometry.point_at(std::min(s, geometry.length()));
            out << format_sci(x.x) << ' ' << format_sci(x.y) << ' ' << format_sci(x.z) << '\n';
            values.push_back(dg.evaluate(field, e, s));
        }
    out << "LINES " << ne << ' ' << ne * (per + 1) << '\n';
    for (int e = 0; e < ne; ++e) {
        out << per;
        for (int j = 0; j < per; ++j) out << ' ' << e * per + j;
        out << '\n';
    }
    out << "POINT_DATA " << np << "\nSCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : values) out << format_sci(v) << '\n';
    finish(out, path);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::optional<double>>>& rows)
{
    auto out = open_for_write(path);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size()) throw DomainError("write_csv: row width does not match header");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            if (row[i]) out << format_sci(*row[i]);
        }
        out << '\n';
    }
    finish(out, path);
}

ConfigFile ConfigFile::parse(const std::string& text)
{
    ConfigFile cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (cfg.values_.count(key)) throw ConfigError("config key '" + key + "' given twice");
        cfg.values_[key] = value;
    }
    return cfg;
}

ConfigFile ConfigFile::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void ConfigFile::check_keys(const std::vector<std::string>& allowed) const
{
    for (const auto& [key, value] : values_)
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown config key '" + key + "'");
}

std::string ConfigFile::get(const std::string& key) const
{
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
    return it->second;
}

double ConfigFile::get_double(const std::string& key) const { return parse_double(key, get(key)); }

int ConfigFile::get_int(const std::string& key) const { return parse_int(key, get(key)); }

std::vector<double> ConfigFile::get_doubles(const std::string& key) const
{
    std::vector<double> out;
    for (const auto& item : split_list(get(key))) out.push_back(parse_double(key, item));
    return out;
}

std::vector<int> ConfigFile::get_ints(const std::string& key) const
{
    std::vector<int> out;
    for (const auto& item : split_list(get(key))) out.push_back(parse_int(key, item));
    return out;
}

Vec3 ConfigFile::get_vec3(const std::string& key) const
{
    const auto v = get_doubles(key);
    if (v.size() != 3) throw ConfigError("key '" + key + "': expected three comma-separated numbers");
    return {v[0], v[1], v[2]};
}

bool ConfigFile::get_bool(const std::string& key) const
{
    const auto v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key '" + key + "': expected a boolean");
}

} // namespace mixdim
