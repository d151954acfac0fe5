#ifndef REPVOL_GEOMETRY_HPP
#define REPVOL_GEOMETRY_HPP

#include <array>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Models of the hyperbolic spaces H^2 and H^3 together with their ideal
// boundaries, and the actions of PSL(2,R) / PSL(2,C) by Mobius
// transformations. Upper half-space coordinates are authoritative; the
// Klein ball is a derived chart used for straightness and orientation.

namespace repvol {

using Complex = std::complex<double>;

class geometry_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class PointKind { interior, ideal };

// A point of H^n or of its ideal boundary (n = 2 or 3).
//
// Interior points: upper half-space coordinates, horizontal part z
// (Im(z) == 0 when n == 2) and height > 0.
// Ideal points: a boundary coordinate in C u {inf} (n == 3) or
// R u {inf} (n == 2); infinity is a distinguished flag, never a large float.
struct ExtendedPoint {
    int dimension = 3;
    PointKind kind = PointKind::interior;
    Complex z{0.0, 0.0};
    double height = 1.0;
    bool at_infinity = false;

    bool is_interior() const { return kind == PointKind::interior; }
    bool is_ideal() const { return kind == PointKind::ideal; }

    static ExtendedPoint interior2(double x, double h);
    static ExtendedPoint interior3(double x, double y, double h);
    static ExtendedPoint ideal2(double x);
    static ExtendedPoint ideal3(Complex z);
    static ExtendedPoint infinity(int dimension);
};

// Orientation-preserving isometry of H^n as a unit-determinant 2x2 matrix
// over R (n = 2) or C (n = 3), identified with its negation.
struct Isometry {
    int dimension = 3;
    Complex a{1.0}, b{0.0}, c{0.0}, d{1.0};

    Isometry() = default;
    // Validates |det - 1| <= det_tol (after an exact sign flip is allowed),
    // rejects non-real entries for n = 2, then polishes det to 1.
    Isometry(int dimension, Complex a, Complex b, Complex c, Complex d,
             double det_tol = 1e-12);

    static Isometry identity(int dimension);

    Complex det() const { return a * d - b * c; }
    Complex trace() const { return a + d; }

    Isometry inverse() const;
    Isometry operator*(const Isometry& rhs) const;  // composition, det-polished

    // Canonical representative of {m, -m}: first entry (row-major order) of
    // non-negligible magnitude gets nonnegative real part, then nonnegative
    // imaginary part.
    Isometry sign_normalized() const;

    // max-norm distance to the identity over the sign quotient.
    double distance_to_identity() const;
    double distance_to(const Isometry& rhs) const;
};

enum class IsometryType { identity, parabolic, elliptic, loxodromic };

struct IsometryClass {
    IsometryType type;
    Complex trace_squared;
};

std::string to_string(IsometryType t);

// Mobius action of g on a point of the closed model. Interior maps to
// interior, ideal to ideal. Throws geometry_error on dimension mismatch.
ExtendedPoint act(const Isometry& g, const ExtendedPoint& p);

// Classification by squared trace; stable under matrix negation.
// Loxodromic subsumes hyperbolic when n = 2.
IsometryClass classify(const Isometry& g, double tol = 1e-9);

// Boundary fixed points: roots of c z^2 + (d - a) z - b = 0 with infinity
// handled when c = 0. Parabolic gives one point; loxodromic and n = 3
// elliptic give two (attracting point first for loxodromic); n = 2 elliptic
// fixes no boundary point and gives an empty list. Throws on identity-class
// input (every boundary point is fixed, an ambient choice is required).
std::vector<ExtendedPoint> fixed_points(const Isometry& g, double tol = 1e-9);

// A boundary point displaced by at most tol (chordal metric on the Klein
// sphere) under every g. All-identity input returns the canonical point
// infinity. Tie-break: candidates of the first non-identity element, in
// fixed_points order. Throws geometry_error when no candidate passes.
ExtendedPoint common_fixed_point(std::span<const Isometry> gs, double tol);

// Klein ball chart. Coordinates always live in the first `dimension` slots;
// the rest are zero. Interior points map into the open unit ball, ideal
// points to the unit sphere, ideal infinity to the north pole (0,...,0,1).
using KleinPoint = std::array<double, 3>;

KleinPoint to_klein(const ExtendedPoint& p);
ExtendedPoint from_klein(int dimension, const KleinPoint& k);

// Distance in the curvature -1 metric between interior points.
double hyperbolic_distance(const ExtendedPoint& p, const ExtendedPoint& q);

// Euclidean distance between Klein images; a uniform displacement measure
// that is meaningful for ideal points as well.
double chordal_distance(const ExtendedPoint& p, const ExtendedPoint& q);

}  // namespace repvol

#endif
