#include "nasal/delaunay.hpp"

#include "nasal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nasal {

namespace {

// Positive when (a,b,c) wind counter-clockwise. Long double keeps the regular
// scanner-lattice near-degeneracies well above roundoff.
long double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
    long double abx = static_cast<long double>(b.x()) - a.x();
    long double aby = static_cast<long double>(b.y()) - a.y();
    long double acx = static_cast<long double>(c.x()) - a.x();
    long double acy = static_cast<long double>(c.y()) - a.y();
    return abx * acy - aby * acx;
}

// Positive when p lies strictly inside the circumcircle of CCW (a,b,c).
// `thresh` receives a magnitude-scaled tolerance; exact cocircularity lands in
// [-thresh, thresh] and is treated as "not inside".
long double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p,
                     long double& thresh) {
    long double ax = static_cast<long double>(a.x()) - p.x();
    long double ay = static_cast<long double>(a.y()) - p.y();
    long double bx = static_cast<long double>(b.x()) - p.x();
    long double by = static_cast<long double>(b.y()) - p.y();
    long double cx = static_cast<long double>(c.x()) - p.x();
    long double cy = static_cast<long double>(c.y()) - p.y();
    long double a2 = ax * ax + ay * ay;
    long double b2 = bx * bx + by * by;
    long double c2 = cx * cx + cy * cy;
    long double det = a2 * (bx * cy - by * cx) - b2 * (ax * cy - ay * cx) + c2 * (ax * by - ay * bx);
    long double mag = std::abs(a2 * (bx * cy)) + std::abs(a2 * (by * cx)) +
                      std::abs(b2 * (ax * cy)) + std::abs(b2 * (ay * cx)) +
                      std::abs(c2 * (ax * by)) + std::abs(c2 * (ay * bx));
    thresh = mag * 1e-14L + 1e-300L;
    return det;
}

}  // namespace

Delaunay2D::Delaunay2D(const std::vector<Vec2>& input, double merge_tol) {
    if (input.size() < 3) throw DegenerateInputError("need at least 3 points to triangulate");

    double minx = std::numeric_limits<double>::max(), maxx = -minx;
    double miny = minx, maxy = -minx;
    for (const auto& p : input) {
        minx = std::min(minx, p.x());
        maxx = std::max(maxx, p.x());
        miny = std::min(miny, p.y());
        maxy = std::max(maxy, p.y());
    }
    double span = std::max({maxx - minx, maxy - miny, 1.0});
    double cx = 0.5 * (minx + maxx);
    double cy = 0.5 * (miny + maxy);
    double big = 64.0 * span;

    sites_.reserve(input.size() + 3);
    sites_.emplace_back(cx - big, cy - big);
    sites_.emplace_back(cx + big, cy - big);
    sites_.emplace_back(cx, cy + big);
    tris_.push_back(Tri{{0, 1, 2}, {-1, -1, -1}, true});
    last_tri_ = 0;

    double merge2 = merge_tol * merge_tol;
    for (std::size_t idx = 0; idx < input.size(); ++idx) {
        const Vec2& p = input[idx];
        // Skip coincident sites; the first sample wins.
        std::int32_t t = locate(p);
        bool dup = false;
        if (t >= 0) {
            for (int k = 0; k < 3; ++k)
                if ((sites_[static_cast<std::size_t>(tris_[t].v[k])] - p).squaredNorm() <= merge2)
                    dup = true;
        }
        if (dup) continue;
        sites_.push_back(p);
        original_.push_back(static_cast<std::int32_t>(idx));
        insert(static_cast<std::int32_t>(sites_.size() - 1));
    }

    finish();
    if (finished_.empty())
        throw DegenerateInputError("triangulation degenerate (collinear points)");
}

std::int32_t Delaunay2D::locate(const Vec2& p) const {
    std::int32_t t = last_tri_;
    if (t < 0 || !tris_[static_cast<std::size_t>(t)].alive) {
        t = -1;
        for (std::size_t i = tris_.size(); i-- > 0;) {
            if (tris_[i].alive) {
                t = static_cast<std::int32_t>(i);
                break;
            }
        }
        if (t < 0) return -1;
    }
    std::size_t guard = tris_.size() * 4 + 16;
    while (guard--) {
        const Tri& tri = tris_[static_cast<std::size_t>(t)];
        std::int32_t next = -1;
        long double worst = 0.0L;
        for (int k = 0; k < 3; ++k) {
            const Vec2& u = sites_[static_cast<std::size_t>(tri.v[(k + 1) % 3])];
            const Vec2& w = sites_[static_cast<std::size_t>(tri.v[(k + 2) % 3])];
            long double o = orient2d(u, w, p);
            if (o < worst) {  // p strictly to the right of edge (u,w): leave
                worst = o;
                next = tri.n[k];
            }
        }
        if (next == -1) return t;
        t = next;
    }
    // Walk failed (should not happen inside the super-triangle); exhaustive scan.
    for (std::size_t i = 0; i < tris_.size(); ++i) {
        if (!tris_[i].alive) continue;
        const Tri& tri = tris_[i];
        bool inside = true;
        for (int k = 0; k < 3 && inside; ++k) {
            const Vec2& u = sites_[static_cast<std::size_t>(tri.v[(k + 1) % 3])];
            const Vec2& w = sites_[static_cast<std::size_t>(tri.v[(k + 2) % 3])];
            if (orient2d(u, w, p) < 0) inside = false;
        }
        if (inside) return static_cast<std::int32_t>(i);
    }
    return -1;
}

void Delaunay2D::insert(std::int32_t site_index) {
    const Vec2& p = sites_[static_cast<std::size_t>(site_index)];
    std::int32_t t0 = locate(p);
    if (t0 < 0) return;  // outside super-triangle: cannot happen by construction

    // Grow the cavity of triangles whose circumcircle contains p.
    std::vector<std::int32_t> cavity;
    std::vector<std::int32_t> stack{t0};
    std::vector<char> in_cavity(tris_.size(), 0);
    in_cavity[static_cast<std::size_t>(t0)] = 1;
    while (!stack.empty()) {
        std::int32_t t = stack.back();
        stack.pop_back();
        cavity.push_back(t);
        const Tri tri = tris_[static_cast<std::size_t>(t)];
        for (int k = 0; k < 3; ++k) {
            std::int32_t nb = tri.n[k];
            if (nb < 0 || in_cavity[static_cast<std::size_t>(nb)]) continue;
            const Tri& nt = tris_[static_cast<std::size_t>(nb)];
            long double thresh;
            long double det = incircle(sites_[static_cast<std::size_t>(nt.v[0])],
                                       sites_[static_cast<std::size_t>(nt.v[1])],
                                       sites_[static_cast<std::size_t>(nt.v[2])], p, thresh);
            if (det > thresh) {
                in_cavity[static_cast<std::size_t>(nb)] = 1;
                stack.push_back(nb);
            }
        }
    }

    // Boundary edges (u, w) oriented CCW as seen from inside the cavity,
    // together with the surviving outer neighbor.
    struct Edge {
        std::int32_t u, w, outer;
    };
    std::vector<Edge> boundary;
    for (std::int32_t t : cavity) {
        const Tri& tri = tris_[static_cast<std::size_t>(t)];
        for (int k = 0; k < 3; ++k) {
            std::int32_t nb = tri.n[k];
            if (nb >= 0 && in_cavity[static_cast<std::size_t>(nb)]) continue;
            boundary.push_back(Edge{tri.v[(k + 1) % 3], tri.v[(k + 2) % 3], nb});
        }
    }
    for (std::int32_t t : cavity) tris_[static_cast<std::size_t>(t)].alive = false;

    // One new triangle (u, w, p) per boundary edge; link siblings around p by
    // matching shared vertices (boundary edges form a single cycle).
    std::vector<std::int32_t> created;
    created.reserve(boundary.size());
    for (const Edge& e : boundary) {
        tris_.push_back(Tri{{e.u, e.w, site_index}, {-1, -1, -1}, true});
        created.push_back(static_cast<std::int32_t>(tris_.size() - 1));
        in_cavity.push_back(0);
    }
    for (std::size_t i = 0; i < boundary.size(); ++i) {
        Tri& nt = tris_[static_cast<std::size_t>(created[i])];
        // Opposite p: the outer survivor across edge (u, w).
        nt.n[2] = boundary[i].outer;
        if (boundary[i].outer >= 0) {
            Tri& outer = tris_[static_cast<std::size_t>(boundary[i].outer)];
            for (int k = 0; k < 3; ++k) {
                std::int32_t a = outer.v[(k + 1) % 3];
                std::int32_t b = outer.v[(k + 2) % 3];
                if ((a == boundary[i].w && b == boundary[i].u)) outer.n[k] = created[i];
            }
        }
        // Adjacent new triangles share (w, p) / (p, u) edges.
        for (std::size_t j = 0; j < boundary.size(); ++j) {
            if (j == i) continue;
            if (boundary[j].u == boundary[i].w) nt.n[0] = created[j];  // opposite u: edge (w, p)
            if (boundary[j].w == boundary[i].u) nt.n[1] = created[j];  // opposite w: edge (p, u)
        }
    }
    last_tri_ = created.empty() ? last_tri_ : created.front();
}

void Delaunay2D::finish() {
    finished_.clear();
    for (const Tri& t : tris_) {
        if (!t.alive) continue;
        if (t.v[0] < 3 || t.v[1] < 3 || t.v[2] < 3) continue;  // touches super-triangle
        // Map back to the caller's input indices; creation order is kept,
        // which makes downstream rasterization deterministic.
        finished_.push_back(
            {original_[static_cast<std::size_t>(t.v[0] - 3)],
             original_[static_cast<std::size_t>(t.v[1] - 3)],
             original_[static_cast<std::size_t>(t.v[2] - 3)]});
    }
}

}  // namespace nasal
