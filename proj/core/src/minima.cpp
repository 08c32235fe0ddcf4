#include "nasal/minima.hpp"

#include "nasal/errors.hpp"

#include <algorithm>
#include <cmath>

namespace nasal {

MinimaResult minima_detector(const PlanarCurve& curve, int n, double alpha) {
    if (n < 1) throw Error("minima_detector: n must be >= 1");
    const Eigen::Index k = curve.size();
    if (k < 3) throw DegenerateInputError("minima_detector: curve needs >= 3 samples");

    const double c = std::cos(alpha);
    const double s = std::sin(alpha);
    const double px = curve.abscissa(0);
    const double py = curve.height(0);

    // Rotate about the first sample: [x y] -> [x c - y s, x s + y c].
    Eigen::VectorXd xr(k), yr(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        double x = curve.abscissa(i) - px;
        double y = curve.height(i) - py;
        xr(i) = x * c - y * s;
        yr(i) = x * s + y * c;
    }
    for (Eigen::Index i = 0; i + 1 < k; ++i)
        if (!(xr(i + 1) > xr(i)))
            throw Error("minima_detector: rotated curve is not single-valued for this alpha");

    // Strict sign change of the first-order difference: - then +.
    std::vector<Eigen::Index> candidates;
    for (Eigen::Index i = 1; i + 1 < k; ++i)
        if (yr(i) < yr(i - 1) && yr(i) < yr(i + 1)) candidates.push_back(i);

    std::sort(candidates.begin(), candidates.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (yr(a) != yr(b)) return yr(a) < yr(b);
        return curve.abscissa(a) < curve.abscissa(b);
    });

    MinimaResult result;
    result.rotation_used = alpha;
    result.shortfall = static_cast<int>(candidates.size()) < n;
    auto take = std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(n));
    result.min.resize(static_cast<Eigen::Index>(take), 2);
    result.indices.assign(candidates.begin(), candidates.begin() + static_cast<long>(take));
    for (std::size_t i = 0; i < take; ++i) {
        result.min(static_cast<Eigen::Index>(i), 0) = curve.abscissa(candidates[i]);
        result.min(static_cast<Eigen::Index>(i), 1) = curve.height(candidates[i]);
    }
    return result;
}

}  // namespace nasal
