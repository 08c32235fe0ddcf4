#include "nasal/keypoints.hpp"

#include "nasal/errors.hpp"

namespace nasal {

KeypointGrid build_keypoint_grid(const LandmarkSet& landmarks, const DepthGrid& surface,
                                 const SubdivisionSpec& spec) {
    if (!spec.valid()) throw Error("invalid subdivision spec");

    KeypointGrid grid;
    int next_id = 0;
    auto add = [&](const Vec3& p) {
        auto z = surface.sample(p.x(), p.y());
        if (z) {
            grid.points.emplace_back(p.x(), p.y(), *z);
            grid.ids.push_back(next_id);
        } else {
            ++grid.dropped;
        }
        ++next_id;
    };

    for (int k = 1; k <= 7; ++k) add(landmarks.l(k));

    auto subdivide = [&](const Vec3& a, const Vec3& b, int parts) {
        for (int i = 1; i < parts; ++i) {
            double t = static_cast<double>(i) / parts;
            add(a + t * (b - a));
        }
    };
    subdivide(landmarks.l(2), landmarks.l(1), spec.root_row_parts);
    subdivide(landmarks.l(1), landmarks.l(7), spec.root_row_parts);
    subdivide(landmarks.l(3), landmarks.l(4), spec.alar_row_parts);
    subdivide(landmarks.l(4), landmarks.l(6), spec.alar_row_parts);
    subdivide(landmarks.l(1), landmarks.l(4), spec.ridge_parts);
    subdivide(landmarks.l(4), landmarks.l(5), spec.ridge_parts);

    if (grid.points.empty()) throw DegenerateInputError("no keypoints landed on the surface");
    return grid;
}

}  // namespace nasal
