#ifndef REPVOL_SIMPLEX_VOLUME_HPP
#define REPVOL_SIMPLEX_VOLUME_HPP

#include <complex>
#include <vector>

#include "repvol/geometry.hpp"

// Signed hyperbolic volume of the geodesic simplex spanned by an ordered
// vertex tuple, with ideal vertices allowed. The sign convention is the
// orientation of the tuple in the Klein model (determinant of edge vectors
// from vertex 0).

namespace repvol {

class degenerate_error : public geometry_error {
public:
    using geometry_error::geometry_error;
};

class quadrature_error : public std::runtime_error {
public:
    quadrature_error(const std::string& what, double partial_value, double error_bound)
        : std::runtime_error(what), partial_value(partial_value), error_bound(error_bound) {}
    double partial_value;
    double error_bound;
};

struct GeodesicSimplex {
    int dimension;                        // 2 or 3
    std::vector<ExtendedPoint> vertices;  // ordered, dimension + 1 entries
};

enum class VolumeMethod { closed_form, quadrature };

enum class MethodPolicy { automatic, closed_form, quadrature };

struct VolumeValue {
    double value = 0.0;
    double est_error = 0.0;
    VolumeMethod method = VolumeMethod::closed_form;
};

// Mobius-invariant cross-ratio of four distinct boundary points of H^3:
// the image of p3 under the map sending (p0, p1, p2) to (0, 1, inf).
// Throws degenerate_error on repeated points.
Complex cross_ratio(const ExtendedPoint& p0, const ExtendedPoint& p1,
                    const ExtendedPoint& p2, const ExtendedPoint& p3);

// Supremum of geodesic n-simplex volumes: pi for n = 2, 3 L(pi/3) for n = 3.
double max_simplex_volume(int n);

// Klein-model orientation determinant of the ordered tuple.
double klein_orientation(const GeodesicSimplex& s);

struct QuadratureBudget {
    int max_leaves = 1 << 20;
};

// Signed volume with |error| <= max(tol, intrinsic closed-form error).
// Dispatch: n = 2 closed-form angle defect; n = 3 all-ideal closed form via
// the Bloch-Wigner dilogarithm of the cross-ratio; otherwise adaptive
// quadrature of the vertical fiber integral. Degenerate tuples (repeated
// vertex, flat Klein determinant) give exactly 0. Throws quadrature_error
// when the subdivision budget is exhausted before reaching tol.
VolumeValue simplex_volume(const GeodesicSimplex& s, double tol,
                           MethodPolicy policy = MethodPolicy::automatic,
                           QuadratureBudget budget = {});

}  // namespace repvol

#endif
