#include "repvol/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace repvol {

namespace {

constexpr double kRealSlackAbs = 1e-12;

bool nearly_real(Complex v) {
    return std::abs(v.imag()) <= kRealSlackAbs * std::max(1.0, std::abs(v));
}

double sqr(double x) { return x * x; }

}  // namespace

ExtendedPoint ExtendedPoint::interior2(double x, double h) {
    if (!(h > 0.0)) throw geometry_error("interior point needs height > 0");
    return ExtendedPoint{2, PointKind::interior, Complex{x, 0.0}, h, false};
}

ExtendedPoint ExtendedPoint::interior3(double x, double y, double h) {
    if (!(h > 0.0)) throw geometry_error("interior point needs height > 0");
    return ExtendedPoint{3, PointKind::interior, Complex{x, y}, h, false};
}

ExtendedPoint ExtendedPoint::ideal2(double x) {
    return ExtendedPoint{2, PointKind::ideal, Complex{x, 0.0}, 0.0, false};
}

namespace {

// Boundary coordinates beyond the chordal resolution of doubles collapse to
// the distinguished point at infinity.
ExtendedPoint make_boundary(int dimension, Complex z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) >= 1e10)
        return ExtendedPoint::infinity(dimension);
    if (dimension == 2) return ExtendedPoint::ideal2(z.real());
    return ExtendedPoint::ideal3(z);
}

}  // namespace

ExtendedPoint ExtendedPoint::ideal3(Complex z) {
    return ExtendedPoint{3, PointKind::ideal, z, 0.0, false};
}

ExtendedPoint ExtendedPoint::infinity(int dimension) {
    return ExtendedPoint{dimension, PointKind::ideal, Complex{0.0, 0.0}, 0.0, true};
}

Isometry::Isometry(int dim, Complex a_, Complex b_, Complex c_, Complex d_, double det_tol)
    : dimension(dim), a(a_), b(b_), c(c_), d(d_) {
    if (dim != 2 && dim != 3) throw geometry_error("dimension must be 2 or 3");
    if (dim == 2) {
        if (!nearly_real(a) || !nearly_real(b) || !nearly_real(c) || !nearly_real(d))
            throw geometry_error("n = 2 isometries must have real entries");
        a = Complex{a.real(), 0.0};
        b = Complex{b.real(), 0.0};
        c = Complex{c.real(), 0.0};
        d = Complex{d.real(), 0.0};
    }
    Complex det = a * d - b * c;
    if (dim == 2 && det.real() < 0.0)
        throw geometry_error("orientation-reversing n = 2 isometry rejected");
    if (std::abs(det - 1.0) > det_tol)
        throw geometry_error("matrix determinant is not 1 (|det-1| = " +
                             std::to_string(std::abs(det - 1.0)) + ")");
    if (std::abs(det - 1.0) > 1e-14) {  // polish, but keep exact entries exact
        const Complex s = std::sqrt(det);
        a /= s;
        b /= s;
        c /= s;
        d /= s;
    }
}

Isometry Isometry::identity(int dimension) {
    Isometry g;
    g.dimension = dimension;
    return g;
}

Isometry Isometry::inverse() const {
    Isometry g;
    g.dimension = dimension;
    g.a = d;
    g.b = -b;
    g.c = -c;
    g.d = a;
    return g;
}

Isometry Isometry::operator*(const Isometry& rhs) const {
    if (dimension != rhs.dimension) throw geometry_error("dimension mismatch in composition");
    Isometry g;
    g.dimension = dimension;
    g.a = a * rhs.a + b * rhs.c;
    g.b = a * rhs.b + b * rhs.d;
    g.c = c * rhs.a + d * rhs.c;
    g.d = c * rhs.b + d * rhs.d;
    // polish determinant drift from long products
    const Complex s = std::sqrt(g.a * g.d - g.b * g.c);
    g.a /= s;
    g.b /= s;
    g.c /= s;
    g.d /= s;
    return g;
}

Isometry Isometry::sign_normalized() const {
    const Complex entries[4] = {a, b, c, d};
    double scale = 0.0;
    for (const Complex& e : entries) scale = std::max(scale, std::abs(e));
    Isometry g = *this;
    for (const Complex& e : entries) {
        if (std::abs(e) <= 1e-13 * scale) continue;
        bool flip;
        if (std::abs(e.real()) > 1e-12 * std::abs(e))
            flip = e.real() < 0.0;
        else
            flip = e.imag() < 0.0;
        if (flip) {
            g.a = -g.a;
            g.b = -g.b;
            g.c = -g.c;
            g.d = -g.d;
        }
        break;
    }
    return g;
}

double Isometry::distance_to_identity() const {
    auto dist = [&](double s) {
        double m = 0.0;
        m = std::max(m, std::abs(s * a - 1.0));
        m = std::max(m, std::abs(s * b));
        m = std::max(m, std::abs(s * c));
        m = std::max(m, std::abs(s * d - 1.0));
        return m;
    };
    return std::min(dist(1.0), dist(-1.0));
}

double Isometry::distance_to(const Isometry& rhs) const {
    return ((*this) * rhs.inverse()).distance_to_identity();
}

std::string to_string(IsometryType t) {
    switch (t) {
        case IsometryType::identity: return "identity";
        case IsometryType::parabolic: return "parabolic";
        case IsometryType::elliptic: return "elliptic";
        case IsometryType::loxodromic: return "loxodromic";
    }
    return "unknown";
}

ExtendedPoint act(const Isometry& g, const ExtendedPoint& p) {
    if (g.dimension != p.dimension)
        throw geometry_error("dimension mismatch between isometry and point");
    if (p.is_ideal()) {
        // a denominator that vanishes relative to its summands is the
        // rounded image of an exact zero; the image point is infinity
        if (p.at_infinity) {
            const double scale = std::max(std::abs(g.a), std::abs(g.c));
            if (std::abs(g.c) <= 1e-13 * scale) return ExtendedPoint::infinity(p.dimension);
            return make_boundary(p.dimension, g.a / g.c);
        }
        const Complex den = g.c * p.z + g.d;
        const double scale = std::abs(g.c * p.z) + std::abs(g.d);
        if (std::abs(den) <= 1e-13 * scale || scale == 0.0)
            return ExtendedPoint::infinity(p.dimension);
        return make_boundary(p.dimension, (g.a * p.z + g.b) / den);
    }
    // Interior point: Poincare extension of the Mobius map to upper
    // half-space. For n = 2 the entries are real and this reduces to the
    // complex Mobius action on x + i h.
    const Complex w = p.z;
    const double h = p.height;
    const Complex cw_d = g.c * w + g.d;
    const double den = std::norm(cw_d) + std::norm(g.c) * h * h;
    const Complex z_new = ((g.a * w + g.b) * std::conj(cw_d) + g.a * std::conj(g.c) * h * h) / den;
    const double h_new = h / den;
    ExtendedPoint q;
    q.dimension = p.dimension;
    q.kind = PointKind::interior;
    q.z = p.dimension == 2 ? Complex{z_new.real(), 0.0} : z_new;
    q.height = h_new;
    return q;
}

IsometryClass classify(const Isometry& g, double tol) {
    const Complex tr2 = g.trace() * g.trace();
    if (g.distance_to_identity() <= tol) return {IsometryType::identity, tr2};
    if (std::abs(tr2 - 4.0) <= tol) return {IsometryType::parabolic, tr2};
    if (std::abs(tr2.imag()) <= tol && tr2.real() >= -tol && tr2.real() < 4.0)
        return {IsometryType::elliptic, tr2};
    return {IsometryType::loxodromic, tr2};
}

std::vector<ExtendedPoint> fixed_points(const Isometry& g, double tol) {
    const IsometryClass cls = classify(g, tol);
    if (cls.type == IsometryType::identity)
        throw geometry_error("identity-class isometry: ambient choice required");

    const int n = g.dimension;
    auto boundary = [&](Complex z) { return make_boundary(n, z); };

    double scale = std::max({std::abs(g.a), std::abs(g.b), std::abs(g.c), std::abs(g.d)});
    if (std::abs(g.c) <= tol * scale) {
        if (std::abs(g.d - g.a) <= tol * scale) return {ExtendedPoint::infinity(n)};
        const Complex other = g.b / (g.d - g.a);
        // attracting fixed point first: at infinity iff |a| > |d|
        if (cls.type == IsometryType::loxodromic && std::abs(g.a) < std::abs(g.d))
            return {boundary(other), ExtendedPoint::infinity(n)};
        return {ExtendedPoint::infinity(n), boundary(other)};
    }

    const Complex disc = cls.trace_squared - 4.0;  // equals (d-a)^2 + 4bc
    if (cls.type == IsometryType::parabolic) return {boundary((g.a - g.d) / (2.0 * g.c))};
    if (n == 2 && disc.real() < 0.0) return {};  // plane rotation, no boundary fixed point

    const Complex sq = std::sqrt(disc);
    const Complex r1 = (g.a - g.d) + sq;
    const Complex r2 = (g.a - g.d) - sq;
    Complex z1, z2;
    if (std::abs(r1) >= std::abs(r2)) {
        z1 = r1 / (2.0 * g.c);
        z2 = std::abs(r1) > 0.0 ? (-g.b / g.c) / z1 : r2 / (2.0 * g.c);
    } else {
        z2 = r2 / (2.0 * g.c);
        z1 = std::abs(r2) > 0.0 ? (-g.b / g.c) / z2 : r1 / (2.0 * g.c);
    }
    if (cls.type == IsometryType::loxodromic) {
        // attracting iff |g'(z)| = 1/|cz+d|^2 < 1
        const bool z1_attracts = std::abs(g.c * z1 + g.d) > 1.0;
        if (!z1_attracts) std::swap(z1, z2);
    } else {
        // deterministic order for elliptic pairs
        if (std::make_pair(z1.real(), z1.imag()) > std::make_pair(z2.real(), z2.imag()))
            std::swap(z1, z2);
    }
    return {boundary(z1), boundary(z2)};
}

ExtendedPoint common_fixed_point(std::span<const Isometry> gs, double tol) {
    if (gs.empty()) throw geometry_error("common_fixed_point: empty list");
    const int n = gs.front().dimension;
    const Isometry* first_moving = nullptr;
    for (const Isometry& g : gs) {
        if (g.dimension != n) throw geometry_error("dimension mismatch in isometry list");
        if (!first_moving && classify(g).type != IsometryType::identity) first_moving = &g;
    }
    if (!first_moving) return ExtendedPoint::infinity(n);
    for (const ExtendedPoint& candidate : fixed_points(*first_moving)) {
        bool ok = true;
        for (const Isometry& g : gs) {
            if (chordal_distance(act(g, candidate), candidate) > tol) {
                ok = false;
                break;
            }
        }
        if (ok) return candidate;
    }
    throw geometry_error("no common fixed point");
}

KleinPoint to_klein(const ExtendedPoint& p) {
    const int n = p.dimension;
    if (p.at_infinity) {
        KleinPoint k{0.0, 0.0, 0.0};
        k[n - 1] = 1.0;
        return k;
    }
    // Coordinates as a vector v in R^n with the height in slot n-1.
    std::array<double, 3> v{0.0, 0.0, 0.0};
    if (n == 2) {
        v[0] = p.z.real();
        v[1] = p.height;
    } else {
        v[0] = p.z.real();
        v[1] = p.z.imag();
        v[2] = p.height;
    }
    // Inversion about the sphere of radius sqrt(2) centered at -e_n maps the
    // half-space onto the unit (Poincare) ball; a half-turn then sends the
    // image of infinity to the north pole.
    std::array<double, 3> ve = v;
    ve[n - 1] += 1.0;
    double nrm2 = 0.0;
    for (int i = 0; i < n; ++i) nrm2 += sqr(ve[i]);
    std::array<double, 3> y{0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i) y[i] = 2.0 * ve[i] / nrm2;
    y[n - 1] -= 1.0;
    y[0] = -y[0];
    y[n - 1] = -y[n - 1];
    double ynrm2 = 0.0;
    for (int i = 0; i < n; ++i) ynrm2 += sqr(y[i]);
    if (p.is_ideal()) {
        // already on the unit sphere; renormalize away rounding
        const double s = std::sqrt(ynrm2);
        KleinPoint k{0.0, 0.0, 0.0};
        for (int i = 0; i < n; ++i) k[i] = y[i] / s;
        return k;
    }
    KleinPoint k{0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i) k[i] = 2.0 * y[i] / (1.0 + ynrm2);
    return k;
}

ExtendedPoint from_klein(int n, const KleinPoint& k) {
    if (n != 2 && n != 3) throw geometry_error("dimension must be 2 or 3");
    double knrm2 = 0.0;
    for (int i = 0; i < n; ++i) knrm2 += sqr(k[i]);
    const bool ideal = knrm2 >= sqr(1.0 - 1e-12);

    std::array<double, 3> y{0.0, 0.0, 0.0};
    if (ideal) {
        const double s = std::sqrt(knrm2);
        for (int i = 0; i < n; ++i) y[i] = k[i] / s;
    } else {
        const double s = 1.0 + std::sqrt(std::max(0.0, 1.0 - knrm2));
        for (int i = 0; i < n; ++i) y[i] = k[i] / s;
    }
    y[0] = -y[0];
    y[n - 1] = -y[n - 1];

    std::array<double, 3> ye = y;
    ye[n - 1] += 1.0;
    double nrm2 = 0.0;
    for (int i = 0; i < n; ++i) nrm2 += sqr(ye[i]);
    if (ideal && nrm2 <= 1e-24) return ExtendedPoint::infinity(n);
    std::array<double, 3> v{0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i) v[i] = 2.0 * ye[i] / nrm2;
    v[n - 1] -= 1.0;

    ExtendedPoint p;
    p.dimension = n;
    if (ideal) {
        p.kind = PointKind::ideal;
        p.height = 0.0;
        p.z = n == 2 ? Complex{v[0], 0.0} : Complex{v[0], v[1]};
    } else {
        p.kind = PointKind::interior;
        p.height = v[n - 1];
        p.z = n == 2 ? Complex{v[0], 0.0} : Complex{v[0], v[1]};
        if (!(p.height > 0.0)) p.height = std::max(p.height, 1e-300);
    }
    return p;
}

double hyperbolic_distance(const ExtendedPoint& p, const ExtendedPoint& q) {
    if (p.dimension != q.dimension) throw geometry_error("dimension mismatch");
    if (!p.is_interior() || !q.is_interior())
        throw geometry_error("hyperbolic distance needs interior points");
    const double num = std::norm(p.z - q.z) + sqr(p.height - q.height);
    const double ch = 1.0 + num / (2.0 * p.height * q.height);
    return std::acosh(std::max(1.0, ch));
}

double chordal_distance(const ExtendedPoint& p, const ExtendedPoint& q) {
    const KleinPoint kp = to_klein(p);
    const KleinPoint kq = to_klein(q);
    return std::sqrt(sqr(kp[0] - kq[0]) + sqr(kp[1] - kq[1]) + sqr(kp[2] - kq[2]));
}

}  // namespace repvol
