#include "nasal/cloud_io.hpp"

#include "nasal/csv.hpp"
#include "nasal/errors.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace nasal {

bool PointCloud::well_formed() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!is_valid(i)) continue;
        if (!points[i].allFinite()) return false;
    }
    auto pts = valid_points();
    if (pts.size() < 3) return false;
    // Any pair spanning a nonzero area with a third point will do.
    const Vec3& a = pts[0];
    for (std::size_t i = 1; i < pts.size(); ++i) {
        Vec3 ab = pts[i] - a;
        if (ab.norm() < 1e-12) continue;
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            if (ab.cross(pts[j] - a).norm() > 1e-9) return true;
        }
        return false;  // all remaining points collinear with a..i
    }
    return false;
}

CloudFormat cloud_format_from_string(const std::string& s) {
    if (s == "xyz") return CloudFormat::xyz;
    if (s == "ply") return CloudFormat::ply;
    if (s == "scanner_grid") return CloudFormat::scanner_grid;
    throw Error("unknown cloud format: " + s);
}

std::string to_string(CloudFormat f) {
    switch (f) {
        case CloudFormat::xyz: return "xyz";
        case CloudFormat::ply: return "ply";
        case CloudFormat::scanner_grid: return "scanner_grid";
    }
    return "?";
}

namespace {

PointCloud load_xyz(const std::string& path) {
    auto in = open_in(path);
    PointCloud cloud;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t i = line.find_first_not_of(" \t\r");
        if (i == std::string::npos || line[i] == '#') continue;
        double x, y, z;
        std::istringstream ss(line);
        if (!(ss >> x >> y >> z))
            throw ParseError("expected 'x y z' in " + path, line_no);
        if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
            throw ParseError("non-finite coordinate in " + path, line_no);
        cloud.points.emplace_back(x, y, z);
    }
    if (cloud.points.empty()) throw DegenerateInputError("empty point cloud: " + path);
    return cloud;
}

PointCloud load_scanner_grid(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    long line_no = 0;
    long rows = -1, cols = -1;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t i = line.find_first_not_of(" \t\r");
        if (i == std::string::npos || line[i] == '#') continue;
        std::istringstream ss(line);
        if (!(ss >> rows >> cols))
            throw ParseError("expected header 'rows cols' in " + path, line_no);
        break;
    }
    if (rows <= 0 || cols <= 0)
        throw ParseError("bad scanner grid header in " + path, line_no);

    PointCloud cloud;
    cloud.points.reserve(static_cast<std::size_t>(rows * cols));
    cloud.valid.reserve(static_cast<std::size_t>(rows * cols));
    long needed = rows * cols;
    while (static_cast<long>(cloud.points.size()) < needed && std::getline(in, line)) {
        ++line_no;
        std::size_t i = line.find_first_not_of(" \t\r");
        if (i == std::string::npos || line[i] == '#') continue;
        double x, y, z;
        int flag;
        std::istringstream ss(line);
        if (!(ss >> x >> y >> z >> flag))
            throw ParseError("expected 'x y z flag' in " + path, line_no);
        if (flag != 0 && (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)))
            throw ParseError("non-finite coordinate on valid point in " + path, line_no);
        cloud.points.emplace_back(x, y, z);
        cloud.valid.push_back(flag != 0 ? 1 : 0);
    }
    if (static_cast<long>(cloud.points.size()) != needed)
        throw ParseError("scanner grid truncated: expected " + std::to_string(needed) +
                             " records in " + path,
                         line_no);
    if (cloud.valid_count() == 0) throw DegenerateInputError("all points invalid: " + path);
    return cloud;
}

struct PlyProperty {
    std::string type;
    std::string name;
};

std::size_t ply_type_size(const std::string& t, const std::string& path, long line_no) {
    if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
    if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
    if (t == "int" || t == "uint" || t == "int32" || t == "uint32" || t == "float" ||
        t == "float32")
        return 4;
    if (t == "double" || t == "float64") return 8;
    throw ParseError("unsupported PLY property type '" + t + "' in " + path, line_no);
}

double read_binary_scalar(std::ifstream& in, const std::string& type, const std::string& path) {
    unsigned char buf[8];
    std::size_t n = ply_type_size(type, path, -1);
    if (!in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(n)))
        throw ParseError("unexpected end of PLY data in " + path, -1,
                         static_cast<long>(in.tellg()));
    if (type == "float" || type == "float32") {
        float f;
        std::memcpy(&f, buf, 4);
        return f;
    }
    if (type == "double" || type == "float64") {
        double d;
        std::memcpy(&d, buf, 8);
        return d;
    }
    // Integer types, little endian.
    long long v = 0;
    for (std::size_t i = 0; i < n; ++i) v |= static_cast<long long>(buf[i]) << (8 * i);
    bool is_signed = type[0] != 'u';
    if (is_signed && n < 8) {
        long long sign_bit = 1LL << (8 * n - 1);
        if (v & sign_bit) v -= (1LL << (8 * n));
    }
    return static_cast<double>(v);
}

PointCloud load_ply(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    long line_no = 0;

    if (!std::getline(in, line)) throw ParseError("empty PLY file: " + path, 1);
    ++line_no;
    if (line.rfind("ply", 0) != 0) throw ParseError("missing 'ply' magic in " + path, 1);

    std::string format;
    long vertex_count = -1;
    std::vector<PlyProperty> vertex_props;
    struct OtherElement {
        long count;
        std::vector<PlyProperty> props;
        bool has_list;
    };
    std::vector<OtherElement> trailing_elements;  // elements after vertex
    bool in_vertex = false;
    bool vertex_seen = false;

    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string word;
        ss >> word;
        if (word == "comment" || word == "obj_info" || word.empty()) continue;
        if (word == "format") {
            ss >> format;
            if (format != "ascii" && format != "binary_little_endian")
                throw ParseError("unsupported PLY format '" + format + "' in " + path, line_no);
        } else if (word == "element") {
            std::string name;
            long count;
            if (!(ss >> name >> count))
                throw ParseError("bad element line in " + path, line_no);
            if (name == "vertex") {
                vertex_count = count;
                in_vertex = true;
                vertex_seen = true;
            } else {
                in_vertex = false;
                if (vertex_seen) trailing_elements.push_back({count, {}, false});
                else if (count > 0)
                    throw ParseError("PLY elements before 'vertex' unsupported in " + path, line_no);
            }
        } else if (word == "property") {
            std::string type;
            ss >> type;
            if (type == "list") {
                std::string count_type, item_type, name;
                ss >> count_type >> item_type >> name;
                if (in_vertex)
                    throw ParseError("list property on vertex element unsupported in " + path, line_no);
                if (!trailing_elements.empty()) trailing_elements.back().has_list = true;
            } else {
                std::string name;
                ss >> name;
                if (in_vertex) vertex_props.push_back({type, name});
                else if (!trailing_elements.empty()) trailing_elements.back().props.push_back({type, name});
            }
        } else if (word == "end_header") {
            break;
        } else {
            throw ParseError("unexpected header token '" + word + "' in " + path, line_no);
        }
    }
    if (format.empty()) throw ParseError("PLY header missing 'format' in " + path, line_no);
    if (vertex_count < 0) throw ParseError("PLY header missing 'element vertex' in " + path, line_no);

    int ix = -1, iy = -1, iz = -1;
    for (std::size_t i = 0; i < vertex_props.size(); ++i) {
        if (vertex_props[i].name == "x") ix = static_cast<int>(i);
        if (vertex_props[i].name == "y") iy = static_cast<int>(i);
        if (vertex_props[i].name == "z") iz = static_cast<int>(i);
    }
    if (ix < 0 || iy < 0 || iz < 0)
        throw ParseError("PLY vertex element lacks x/y/z in " + path, line_no);

    PointCloud cloud;
    cloud.points.reserve(static_cast<std::size_t>(vertex_count));

    if (format == "ascii") {
        for (long v = 0; v < vertex_count; ++v) {
            if (!std::getline(in, line))
                throw ParseError("PLY vertex data truncated in " + path, line_no);
            ++line_no;
            std::istringstream ss(line);
            std::vector<double> vals(vertex_props.size());
            for (auto& value : vals)
                if (!(ss >> value)) throw ParseError("bad vertex record in " + path, line_no);
            cloud.points.emplace_back(vals[ix], vals[iy], vals[iz]);
        }
    } else {
        for (long v = 0; v < vertex_count; ++v) {
            double px = 0, py = 0, pz = 0;
            for (std::size_t i = 0; i < vertex_props.size(); ++i) {
                double value = read_binary_scalar(in, vertex_props[i].type, path);
                if (static_cast<int>(i) == ix) px = value;
                if (static_cast<int>(i) == iy) py = value;
                if (static_cast<int>(i) == iz) pz = value;
            }
            cloud.points.emplace_back(px, py, pz);
        }
    }
    // Elements after the vertices (faces etc.) are ignored.

    if (cloud.points.empty()) throw DegenerateInputError("empty point cloud: " + path);
    for (std::size_t i = 0; i < cloud.points.size(); ++i)
        if (!cloud.points[i].allFinite())
            throw ParseError("non-finite vertex " + std::to_string(i) + " in " + path, -1);
    return cloud;
}

}  // namespace

PointCloud load_point_cloud(const std::string& path, CloudFormat format) {
    switch (format) {
        case CloudFormat::xyz: return load_xyz(path);
        case CloudFormat::ply: return load_ply(path);
        case CloudFormat::scanner_grid: return load_scanner_grid(path);
    }
    throw Error("unreachable cloud format");
}

void save_point_cloud_xyz(const PointCloud& cloud, const std::string& path) {
    auto out = open_out(path);
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        if (!cloud.is_valid(i)) continue;
        const Vec3& p = cloud.points[i];
        out << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z())
            << '\n';
    }
}

void save_point_cloud_scanner_grid(const PointCloud& cloud, long rows, long cols,
                                   const std::string& path) {
    if (rows * cols != static_cast<long>(cloud.size()))
        throw Error("scanner grid shape does not match cloud size");
    auto out = open_out(path);
    out << rows << ' ' << cols << '\n';
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        const Vec3& p = cloud.points[i];
        out << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z())
            << ' ' << (cloud.is_valid(i) ? 1 : 0) << '\n';
    }
}

}  // namespace nasal
