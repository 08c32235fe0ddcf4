#include "nasal/depth_grid.hpp"

#include "nasal/csv.hpp"
#include "nasal/errors.hpp"

#include <cmath>
#include <sstream>

namespace nasal {

Eigen::Index DepthGrid::valid_count() const {
    Eigen::Index n = 0;
    for (Eigen::Index r = 0; r < rows(); ++r)
        for (Eigen::Index c = 0; c < cols(); ++c) n += (mask(r, c) != 0);
    return n;
}

std::vector<Vec3> DepthGrid::valid_points() const {
    std::vector<Vec3> out;
    out.reserve(static_cast<std::size_t>(rows() * cols()));
    for (Eigen::Index r = 0; r < rows(); ++r)
        for (Eigen::Index c = 0; c < cols(); ++c)
            if (mask(r, c) != 0) out.push_back(point(r, c));
    return out;
}

std::optional<double> DepthGrid::sample(double px, double py) const {
    double fc = (px - x0) / resolution;
    double fr = (py - y0) / resolution;
    Eigen::Index c0 = static_cast<Eigen::Index>(std::floor(fc));
    Eigen::Index r0 = static_cast<Eigen::Index>(std::floor(fr));
    // Points exactly on the upper borders belong to the last cell.
    if (c0 == cols() - 1 && fc == static_cast<double>(c0)) --c0;
    if (r0 == rows() - 1 && fr == static_cast<double>(r0)) --r0;
    if (r0 < 0 || c0 < 0 || r0 + 1 >= rows() || c0 + 1 >= cols()) return std::nullopt;
    if (!(mask(r0, c0) && mask(r0, c0 + 1) && mask(r0 + 1, c0) && mask(r0 + 1, c0 + 1)))
        return std::nullopt;
    double tx = fc - static_cast<double>(c0);
    double ty = fr - static_cast<double>(r0);
    double top = nz(r0, c0) * (1.0 - tx) + nz(r0, c0 + 1) * tx;
    double bot = nz(r0 + 1, c0) * (1.0 - tx) + nz(r0 + 1, c0 + 1) * tx;
    return top * (1.0 - ty) + bot * ty;
}

void DepthGrid::nearest(double px, double py, Eigen::Index& r, Eigen::Index& c) const {
    c = static_cast<Eigen::Index>(std::lround((px - x0) / resolution));
    r = static_cast<Eigen::Index>(std::lround((py - y0) / resolution));
    c = std::clamp<Eigen::Index>(c, 0, cols() - 1);
    r = std::clamp<Eigen::Index>(r, 0, rows() - 1);
}

bool DepthGrid::well_formed() const {
    if (resolution <= 0.0) return false;
    if (nz.rows() != mask.rows() || nz.cols() != mask.cols()) return false;
    if (nz.rows() < 1 || nz.cols() < 1) return false;
    for (Eigen::Index r = 0; r < rows(); ++r)
        for (Eigen::Index c = 0; c < cols(); ++c)
            if (mask(r, c) != 0 && !std::isfinite(nz(r, c))) return false;
    return true;
}

DepthGrid make_grid(double x0, double y0, double resolution, Eigen::Index rows, Eigen::Index cols) {
    DepthGrid g;
    g.x0 = x0;
    g.y0 = y0;
    g.resolution = resolution;
    g.nz = Eigen::MatrixXd::Zero(rows, cols);
    g.mask = MaskMatrix::Zero(rows, cols);
    return g;
}

void save_grid_csv(const DepthGrid& grid, const std::string& csv_path, const std::string& meta_path) {
    auto csv = open_out(csv_path);
    for (Eigen::Index r = 0; r < grid.rows(); ++r) {
        for (Eigen::Index c = 0; c < grid.cols(); ++c) {
            if (c) csv << ',';
            csv << (grid.mask(r, c) ? format_double(grid.nz(r, c)) : "nan");
        }
        csv << '\n';
    }

    auto meta = open_out(meta_path);
    meta << "rows=" << grid.rows() << '\n';
    meta << "cols=" << grid.cols() << '\n';
    meta << "x0=" << format_double(grid.x0) << '\n';
    meta << "y0=" << format_double(grid.y0) << '\n';
    meta << "resolution=" << format_double(grid.resolution) << '\n';
    // Mask as run lengths over row-major order, starting with a run of valid
    // pixels (possibly 0).
    meta << "mask_rle=";
    std::uint8_t current = 1;
    long run = 0;
    bool first = true;
    auto flush = [&]() {
        if (!first) meta << ' ';
        meta << run;
        first = false;
    };
    for (Eigen::Index r = 0; r < grid.rows(); ++r) {
        for (Eigen::Index c = 0; c < grid.cols(); ++c) {
            std::uint8_t v = grid.mask(r, c) ? 1 : 0;
            if (v == current) {
                ++run;
            } else {
                flush();
                current = v;
                run = 1;
            }
        }
    }
    flush();
    meta << '\n';
}

DepthGrid load_grid_csv(const std::string& csv_path, const std::string& meta_path) {
    auto meta = open_in(meta_path);
    long rows = -1, cols = -1;
    double x0 = 0, y0 = 0, res = 0;
    std::vector<long> rle;
    std::string line;
    long line_no = 0;
    while (std::getline(meta, line)) {
        ++line_no;
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        if (key == "rows") rows = std::stol(value);
        else if (key == "cols") cols = std::stol(value);
        else if (key == "x0") x0 = std::stod(value);
        else if (key == "y0") y0 = std::stod(value);
        else if (key == "resolution") res = std::stod(value);
        else if (key == "mask_rle") {
            std::istringstream ss(value);
            long v;
            while (ss >> v) rle.push_back(v);
        }
    }
    if (rows <= 0 || cols <= 0 || res <= 0)
        throw ParseError("grid sidecar missing rows/cols/resolution: " + meta_path, line_no);

    DepthGrid g = make_grid(x0, y0, res, rows, cols);

    // Expand the mask RLE.
    {
        std::uint8_t current = 1;
        Eigen::Index idx = 0;
        for (long run : rle) {
            for (long i = 0; i < run; ++i) {
                if (idx >= rows * cols) throw ParseError("mask RLE overruns grid: " + meta_path, -1);
                g.mask(idx / cols, idx % cols) = current;
                ++idx;
            }
            current = current ? 0 : 1;
        }
        if (idx != rows * cols) throw ParseError("mask RLE short of grid size: " + meta_path, -1);
    }

    auto csv = open_in(csv_path);
    long r = 0;
    while (std::getline(csv, line)) {
        if (r >= rows) throw ParseError("too many rows in " + csv_path, r + 1);
        auto fields = split_csv_line(line);
        if (static_cast<long>(fields.size()) != cols)
            throw ParseError("wrong column count in " + csv_path, r + 1);
        for (long c = 0; c < cols; ++c) {
            if (fields[c] == "nan") {
                g.nz(r, c) = std::nan("");
            } else {
                try {
                    g.nz(r, c) = std::stod(fields[c]);
                } catch (const std::exception&) {
                    throw ParseError("bad number '" + fields[c] + "' in " + csv_path, r + 1);
                }
            }
        }
        ++r;
    }
    if (r != rows) throw ParseError("row count mismatch in " + csv_path, r);
    return g;
}

}  // namespace nasal
