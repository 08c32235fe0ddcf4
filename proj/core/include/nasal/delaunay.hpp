#pragma once

#include "nasal/geometry.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace nasal {

/// Incremental 2D Delaunay triangulation (Bowyer–Watson with walk-based point
/// location). Built for scattered-data interpolation of scanner clouds:
/// double coordinates throughout, long-double predicates, and deterministic
/// handling of the cocircular quadruples that regular scanner grids produce
/// (on-circle points are treated as outside, so either diagonal of a cocircular
/// quad may be produced — both interpolate identically for piecewise-linear z).
class Delaunay2D {
public:
    /// Triangulates the given sites. Points closer than `merge_tol` to an
    /// already-inserted site are skipped (first one wins).
    /// Throws DegenerateInputError when fewer than 3 distinct sites remain or
    /// all sites are collinear.
    explicit Delaunay2D(const std::vector<Vec2>& sites, double merge_tol = 1e-9);

    /// Index triples into the input site array, CCW winding. Only real
    /// triangles (no super-triangle vertices).
    const std::vector<std::array<std::int32_t, 3>>& triangles() const { return finished_; }

private:
    struct Tri {
        std::int32_t v[3];  // CCW
        std::int32_t n[3];  // neighbor opposite v[k]; -1 = none
        bool alive;
    };

    std::vector<Vec2> sites_;             // first 3 entries are the super-triangle
    std::vector<std::int32_t> original_;  // inserted site -> input index
    std::vector<Tri> tris_;
    std::vector<std::array<std::int32_t, 3>> finished_;
    std::int32_t last_tri_ = 0;

    std::int32_t locate(const Vec2& p) const;
    void insert(std::int32_t site_index);
    void finish();
};

}  // namespace nasal
