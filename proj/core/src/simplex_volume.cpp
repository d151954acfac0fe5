#include "repvol/simplex_volume.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>

#include "repvol/special_functions.hpp"

namespace repvol {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFlatCutoff = 1e-14;

struct Projective {
    Complex p, q;  // boundary point p/q of H^3
};

Projective projective(const ExtendedPoint& x) {
    if (x.at_infinity) return {Complex{1.0, 0.0}, Complex{0.0, 0.0}};
    return {x.z, Complex{1.0, 0.0}};
}

Complex pdet(const Projective& u, const Projective& v) { return u.p * v.q - v.p * u.q; }

// --- n = 2 angle defect -------------------------------------------------

struct Vec2 {
    double x, y;
};

// Unit tangent at the interior point a toward the (interior or ideal) point b,
// along the half-plane geodesic through them.
Vec2 half_plane_tangent(const ExtendedPoint& a, const ExtendedPoint& b) {
    const double xa = a.z.real();
    const double ha = a.height;
    if (b.at_infinity) return {0.0, 1.0};
    const double xb = b.z.real();
    const double hb = b.is_interior() ? b.height : 0.0;
    const double dx = xb - xa;
    const double scale = std::max({std::abs(xa), std::abs(xb), ha, hb, 1.0});
    if (std::abs(dx) <= 1e-15 * scale) {
        // vertical geodesic
        return {0.0, b.is_ideal() || hb < ha ? -1.0 : 1.0};
    }
    const double center = (xb * xb + hb * hb - xa * xa - ha * ha) / (2.0 * dx);
    double tx = -ha;
    double ty = xa - center;
    if (tx * dx < 0.0) {
        tx = -tx;
        ty = -ty;
    }
    const double n = std::hypot(tx, ty);
    return {tx / n, ty / n};
}

double angle_between(Vec2 u, Vec2 v) {
    return std::abs(std::atan2(u.x * v.y - u.y * v.x, u.x * v.x + u.y * v.y));
}

VolumeValue area_angle_defect(const GeodesicSimplex& s, double det) {
    const double sigma = det > 0.0 ? 1.0 : -1.0;
    double angles = 0.0;
    for (int i = 0; i < 3; ++i) {
        if (!s.vertices[i].is_interior()) continue;  // ideal corners contribute 0
        const Vec2 u = half_plane_tangent(s.vertices[i], s.vertices[(i + 1) % 3]);
        const Vec2 v = half_plane_tangent(s.vertices[i], s.vertices[(i + 2) % 3]);
        angles += angle_between(u, v);
    }
    return {sigma * (kPi - angles), 1e-12, VolumeMethod::closed_form};
}

// --- vertical cone quadrature -------------------------------------------

struct FacePlane {
    // geodesic plane A(|w|^2 + h^2) + Bx x + By y + C = 0; height over w:
    // h^2(w) = -(A |w|^2 + Bx x + By y + C) / A
    double A, Bx, By, C;

    double height_squared(Complex w) const {
        return -(A * std::norm(w) + Bx * w.real() + By * w.imag() + C) / A;
    }
};

// Fit the geodesic plane through three points of the closed half-space model
// (heights >= 0, none at infinity). Returns false for a vertical plane.
bool fit_face_plane(const std::array<ExtendedPoint, 3>& u, FacePlane& plane) {
    double m[3][4];
    double scale = 1.0;
    for (int i = 0; i < 3; ++i) {
        const double x = u[i].z.real();
        const double y = u[i].z.imag();
        const double h = u[i].is_interior() ? u[i].height : 0.0;
        m[i][0] = x * x + y * y + h * h;
        m[i][1] = x;
        m[i][2] = y;
        m[i][3] = 1.0;
        scale = std::max({scale, std::abs(x), std::abs(y), h});
    }
    auto det3 = [&](int c0, int c1, int c2) {
        return m[0][c0] * (m[1][c1] * m[2][c2] - m[1][c2] * m[2][c1]) -
               m[0][c1] * (m[1][c0] * m[2][c2] - m[1][c2] * m[2][c0]) +
               m[0][c2] * (m[1][c0] * m[2][c1] - m[1][c1] * m[2][c0]);
    };
    plane.A = det3(1, 2, 3);
    plane.Bx = -det3(0, 2, 3);
    plane.By = det3(0, 1, 3);
    plane.C = -det3(0, 1, 2);
    const double mag = std::max({std::abs(plane.Bx), std::abs(plane.By), std::abs(plane.C)});
    // A ~ 0 relative to the other coefficients: vertical plane.
    return std::abs(plane.A) * scale * scale > 1e-13 * std::max(mag, 1e-300);
}

// degree-5 7-point rule (Radon) on the triangle (w0, w1, w2)
template <typename F>
double triangle_rule(Complex w0, Complex w1, Complex w2, const F& f) {
    static const double s15 = std::sqrt(15.0);
    static const double a = (6.0 - s15) / 21.0;
    static const double b = (6.0 + s15) / 21.0;
    static const double wa = (155.0 - s15) / 1200.0;
    static const double wb = (155.0 + s15) / 1200.0;
    const Complex e1 = w1 - w0;
    const Complex e2 = w2 - w0;
    const double area =
        0.5 * std::abs(e1.real() * e2.imag() - e1.imag() * e2.real());
    auto at = [&](double l1, double l2) { return w0 + l1 * e1 + l2 * e2; };
    double sum = (9.0 / 40.0) * f(at(1.0 / 3.0, 1.0 / 3.0));
    sum += wa * (f(at(a, a)) + f(at(1.0 - 2.0 * a, a)) + f(at(a, 1.0 - 2.0 * a)));
    sum += wb * (f(at(b, b)) + f(at(1.0 - 2.0 * b, b)) + f(at(b, 1.0 - 2.0 * b)));
    return area * sum;
}

struct Cell {
    Complex w[3];
    double fine;      // children rule sum
    double diff;      // |coarse - fine|
    double est;       // geometric-tail error estimate for fine
    int split_edge;   // longest edge index: edge i joins corner i, i+1
};

// The local error of the accepted fine value is modelled as the tail of a
// geometric series of bisection differences, diff * r / (1 - r). Smooth cells
// contract with r ~ 2^-6; cells touching the integrable rim singularity
// contract only like r ~ 0.7, so r is measured per split and inherited.
double tail_estimate(double diff, double ratio) {
    return 1.5 * diff * ratio / (1.0 - ratio) + 1e-17 * std::abs(diff);
}

template <typename F>
Cell make_cell(Complex w0, Complex w1, Complex w2, double coarse, double ratio,
               const F& f) {
    Cell cell;
    cell.w[0] = w0;
    cell.w[1] = w1;
    cell.w[2] = w2;
    const double l0 = std::abs(w1 - w0);
    const double l1 = std::abs(w2 - w1);
    const double l2 = std::abs(w0 - w2);
    cell.split_edge = l0 >= l1 ? (l0 >= l2 ? 0 : 2) : (l1 >= l2 ? 1 : 2);
    const Complex mid = 0.5 * (cell.w[cell.split_edge] + cell.w[(cell.split_edge + 1) % 3]);
    const Complex opp = cell.w[(cell.split_edge + 2) % 3];
    const double r1 = triangle_rule(cell.w[cell.split_edge], mid, opp, f);
    const double r2 = triangle_rule(mid, cell.w[(cell.split_edge + 1) % 3], opp, f);
    cell.fine = r1 + r2;
    cell.diff = std::abs(coarse - cell.fine);
    cell.est = tail_estimate(cell.diff, ratio) + 1e-17 * std::abs(cell.fine);
    return cell;
}

struct QuadratureResult {
    double value;
    double est;
    bool converged;
};

// Adaptive bisection of the base triangle for integrand f, aiming at
// absolute error <= tol with a hard leaf budget. The integrand has an
// integrable 1/distance blow-up at corners lying on the rim of the face
// hemisphere; those corners are listed in singular_corners and receive a
// geometrically graded pre-split so that no adaptive cell is singular (the
// leftover tip carries a share of the corner mass proportional to its
// scale, 2^-40 of the corner cell).
template <typename F>
QuadratureResult integrate_triangle(Complex w0, Complex w1, Complex w2, const F& f,
                                    double tol, int max_leaves,
                                    const std::vector<int>& singular_corners) {
    std::vector<Cell> cells;
    cells.reserve(1024);

    std::vector<std::array<Complex, 3>> seeds;
    if (singular_corners.empty()) {
        seeds.push_back({w0, w1, w2});
    } else {
        // Cut a shrinking cascade of rings toward each singular corner.
        // Splitting the triangle at the centroid keeps each corner's cascade
        // independent of the others.
        const Complex corners[3] = {w0, w1, w2};
        const Complex centroid = (w0 + w1 + w2) / 3.0;
        auto is_singular = [&](int i) {
            return std::find(singular_corners.begin(), singular_corners.end(), i) !=
                   singular_corners.end();
        };
        constexpr int kCascadeDepth = 40;
        for (int i = 0; i < 3; ++i) {
            const Complex p = corners[i];
            const Complex q = corners[(i + 1) % 3];
            // wedge (p, q, centroid) split between the corner cascades of p and q
            const Complex m = 0.5 * (p + q);
            for (auto [apex, base] : {std::pair{p, m}, std::pair{q, m}}) {
                if ((apex == p && !is_singular(i)) ||
                    (apex == q && !is_singular((i + 1) % 3))) {
                    seeds.push_back({apex, base, centroid});
                    continue;
                }
                Complex b = base, c = centroid;
                for (int k = 0; k < kCascadeDepth; ++k) {
                    const Complex b2 = apex + 0.5 * (b - apex);
                    const Complex c2 = apex + 0.5 * (c - apex);
                    seeds.push_back({b2, b, c});
                    seeds.push_back({b2, c, c2});
                    b = b2;
                    c = c2;
                }
                seeds.push_back({apex, b, c});  // negligible tip
            }
        }
    }
    for (const auto& t : seeds)
        cells.push_back(make_cell(t[0], t[1], t[2], triangle_rule(t[0], t[1], t[2], f),
                                  0.5, f));

    using Entry = std::pair<double, int>;  // (est, cell index), deterministic order
    auto cmp = [](const Entry& a, const Entry& b) {
        return a.first < b.first || (a.first == b.first && a.second > b.second);
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> queue(cmp);
    double total_est = 0.0;
    for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
        queue.push({cells[i].est, i});
        total_est += cells[i].est;
    }

    auto refine_until = [&](double target) {
        while (total_est > target &&
               static_cast<int>(cells.size()) < max_leaves && !queue.empty()) {
            const auto [est, idx] = queue.top();
            queue.pop();
            if (est != cells[idx].est) continue;  // stale entry
            const Cell cell = cells[idx];
            total_est -= cell.est;
            const int e = cell.split_edge;
            const Complex mid = 0.5 * (cell.w[e] + cell.w[(e + 1) % 3]);
            const Complex opp = cell.w[(e + 2) % 3];
            const double c1 = triangle_rule(cell.w[e], mid, opp, f);
            const double c2 = triangle_rule(mid, cell.w[(e + 1) % 3], opp, f);
            // observed contraction of the bisection differences
            Cell left = make_cell(cell.w[e], mid, opp, c1, 0.5, f);
            Cell right = make_cell(mid, cell.w[(e + 1) % 3], opp, c2, 0.5, f);
            const double ratio = std::clamp(
                (left.diff + right.diff) / std::max(cell.diff, 1e-300), 1.0 / 64.0, 0.85);
            left.est = tail_estimate(left.diff, ratio);
            right.est = tail_estimate(right.diff, ratio);
            cells[idx] = left;
            cells.push_back(right);
            total_est += left.est + right.est;
            queue.push({left.est, idx});
            queue.push({right.est, static_cast<int>(cells.size()) - 1});
        }
    };

    auto leaf_sum = [&] {  // compensated, in index order for determinism
        double sum = 0.0, comp = 0.0;
        for (const Cell& cell : cells) {
            const double y = cell.fine - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        return sum;
    };

    // The local model can miss slowly resolving boundary-layer mass, so the
    // local target is tightened until the global value stops moving at the
    // requested tolerance; successive global steps decay geometrically, and
    // the final step bounds the remaining tail.
    double target = 0.5 * tol;
    refine_until(target);
    double value = leaf_sum();
    for (;;) {
        if (static_cast<int>(cells.size()) >= max_leaves)
            return {value, std::max(total_est, tol), false};
        target *= 0.25;
        refine_until(target);
        const double next = leaf_sum();
        const double step = std::abs(next - value);
        value = next;
        if (step <= tol / 3.0)
            return {value, std::max(total_est, 1.5 * step), true};
    }
}

// Isometry moving the ideal point q to infinity.
Isometry to_infinity(const ExtendedPoint& q) {
    if (q.at_infinity) return Isometry::identity(q.dimension);
    if (q.dimension == 2)
        return Isometry(2, Complex{0.0}, Complex{-1.0}, Complex{1.0}, Complex{-q.z.real()});
    const Complex mi{0.0, -1.0};
    return Isometry(3, Complex{0.0}, mi, mi, Complex{0.0, 1.0} * q.z);
}

// Unsigned volume of the geodesic simplex [u0, u1, u2, infinity]: the
// vertical fiber integral of 1/(2 h^2) over the Euclidean triangle of the
// projections, h being the height of the face through u0, u1, u2.
QuadratureResult cone_volume(const std::array<ExtendedPoint, 3>& u, double tol,
                             int max_leaves) {
    FacePlane plane;
    if (!fit_face_plane(u, plane)) return {0.0, 0.0, true};  // vertical: flat simplex
    auto integrand = [&plane](Complex w) {
        const double h2 = std::max(plane.height_squared(w), 1e-300);
        return 0.5 / h2;
    };
    // corners on the rim are singular; corners whose height is small against
    // the triangle scale behave the same way numerically and get the same
    // graded pre-split
    double spread = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) spread = std::max(spread, std::abs(u[i].z - u[j].z));
    std::vector<int> singular;
    for (int i = 0; i < 3; ++i)
        if (u[i].is_ideal() || u[i].height < 0.05 * spread) singular.push_back(i);
    return integrate_triangle(u[0].z, u[1].z, u[2].z, integrand, tol, max_leaves,
                              singular);
}

double klein_det(const std::vector<ExtendedPoint>& vs, int n) {
    KleinPoint k[4] = {};
    for (int i = 0; i <= n; ++i) k[i] = to_klein(vs[i]);
    if (n == 2) {
        const double ax = k[1][0] - k[0][0], ay = k[1][1] - k[0][1];
        const double bx = k[2][0] - k[0][0], by = k[2][1] - k[0][1];
        return ax * by - ay * bx;
    }
    double e[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) e[i][j] = k[i + 1][j] - k[0][j];
    return e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1]) -
           e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0]) +
           e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0]);
}

bool all_ideal(const std::vector<ExtendedPoint>& vs) {
    return std::all_of(vs.begin(), vs.end(),
                       [](const ExtendedPoint& p) { return p.is_ideal(); });
}

// Isometry fixing infinity that recenters the points at the origin and
// rescales their spread to 1; pure conditioning for the quadrature.
Isometry normalizing_similarity(const std::array<ExtendedPoint, 3>& u) {
    Complex centroid{0.0, 0.0};
    for (const ExtendedPoint& p : u) centroid += p.z;
    centroid /= 3.0;
    double spread = 0.0;
    for (const ExtendedPoint& p : u) {
        spread = std::max(spread, std::abs(p.z - centroid));
        if (p.is_interior()) spread = std::max(spread, p.height);
    }
    if (!(spread > 1e-12)) return Isometry::identity(3);
    const double rs = std::sqrt(spread);
    return Isometry(3, Complex{1.0 / rs}, -centroid / rs, Complex{0.0}, Complex{rs});
}

// Theta-bar(u0, u1, u2, infinity) by quadrature, signed by the Klein
// convention of the 4-tuple with infinity appended.
VolumeValue cone_term(const std::array<ExtendedPoint, 3>& u, int n, double tol,
                      int max_leaves) {
    std::vector<ExtendedPoint> tuple(u.begin(), u.end());
    tuple.push_back(ExtendedPoint::infinity(n));
    const double det = klein_det(tuple, n);
    if (std::abs(det) < kFlatCutoff) return {0.0, 0.0, VolumeMethod::quadrature};
    const Isometry s = normalizing_similarity(u);
    std::array<ExtendedPoint, 3> v;
    for (int i = 0; i < 3; ++i) v[i] = act(s, u[i]);
    const QuadratureResult r = cone_volume(v, tol, max_leaves);
    if (!r.converged)
        throw quadrature_error("quadrature failure: subdivision budget exhausted",
                               (det > 0.0 ? 1.0 : -1.0) * r.value, r.est);
    return {(det > 0.0 ? 1.0 : -1.0) * r.value, r.est, VolumeMethod::quadrature};
}

VolumeValue volume_by_quadrature(const GeodesicSimplex& s, double tol,
                                 const QuadratureBudget& budget, double det) {
    const double sigma = det > 0.0 ? 1.0 : -1.0;
    // Move an ideal vertex to infinity; the unsigned cone volume is isometry-
    // and order-invariant, the sign is the tuple's own. Prefer the ideal
    // vertex farthest from the rest so the remaining points stay moderate.
    int best = -1;
    double best_sep = -1.0;
    for (int k = 0; k < 4; ++k) {
        if (!s.vertices[k].is_ideal()) continue;
        double sep = 2.0;
        for (int i = 0; i < 4; ++i)
            if (i != k) sep = std::min(sep, chordal_distance(s.vertices[k], s.vertices[i]));
        if (sep > best_sep) {
            best_sep = sep;
            best = k;
        }
    }
    if (best >= 0) {
        const Isometry g = to_infinity(s.vertices[best]);
        std::array<ExtendedPoint, 3> u;
        int j = 0;
        for (int i = 0; i < 4; ++i)
            if (i != best) u[j++] = act(g, s.vertices[i]);
        const Isometry cond = normalizing_similarity(u);
        for (ExtendedPoint& p : u) p = act(cond, p);
        const QuadratureResult r = cone_volume(u, tol, budget.max_leaves);
        if (!r.converged)
            throw quadrature_error("quadrature failure: subdivision budget exhausted",
                                   sigma * r.value, r.est);
        return {sigma * r.value, r.est, VolumeMethod::quadrature};
    }
    // All interior: express the simplex through cones to an auxiliary ideal
    // point via the coboundary identity
    //   Theta(v0..v3) = -sum_i (-1)^i Theta(v0..\hat v_i..v3, infinity).
    double value = 0.0, est = 0.0;
    for (int i = 0; i < 4; ++i) {
        std::array<ExtendedPoint, 3> u;
        int j = 0;
        for (int k = 0; k < 4; ++k)
            if (k != i) u[j++] = s.vertices[k];
        const VolumeValue term = cone_term(u, 3, tol / 4.0, budget.max_leaves / 4);
        value -= (i % 2 == 0 ? 1.0 : -1.0) * term.value;
        est += term.est_error;
    }
    return {value, est, VolumeMethod::quadrature};
}

}  // namespace

Complex cross_ratio(const ExtendedPoint& p0, const ExtendedPoint& p1,
                    const ExtendedPoint& p2, const ExtendedPoint& p3) {
    const ExtendedPoint* ps[4] = {&p0, &p1, &p2, &p3};
    for (const ExtendedPoint* p : ps)
        if (p->dimension != 3 || !p->is_ideal())
            throw geometry_error("cross_ratio needs ideal boundary points of H^3");
    Projective u[4];
    for (int i = 0; i < 4; ++i) u[i] = projective(*ps[i]);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (std::abs(pdet(u[i], u[j])) == 0.0)
                throw degenerate_error("degenerate tuple: repeated boundary point");
    const Complex num = pdet(u[3], u[0]) * pdet(u[1], u[2]);
    const Complex den = pdet(u[3], u[2]) * pdet(u[1], u[0]);
    return num / den;
}

double max_simplex_volume(int n) {
    if (n == 2) return kPi;
    if (n == 3) {
        static const double v3 = 3.0 * lobachevsky(kPi / 3.0);
        return v3;
    }
    throw geometry_error("max_simplex_volume: dimension must be 2 or 3");
}

double klein_orientation(const GeodesicSimplex& s) {
    return klein_det(s.vertices, s.dimension);
}

VolumeValue simplex_volume(const GeodesicSimplex& s, double tol, MethodPolicy policy,
                           QuadratureBudget budget) {
    const int n = s.dimension;
    if ((n != 2 && n != 3) || s.vertices.size() != static_cast<size_t>(n + 1))
        throw geometry_error("simplex_volume: bad simplex");
    for (const ExtendedPoint& v : s.vertices)
        if (v.dimension != n) throw geometry_error("simplex_volume: dimension mismatch");
    if (!(tol > 0.0)) throw geometry_error("simplex_volume: tol must be positive");

    const double det = klein_det(s.vertices, n);
    if (std::abs(det) < kFlatCutoff) return {0.0, 0.0, VolumeMethod::closed_form};

    if (n == 2) return area_angle_defect(s, det);

    if (policy != MethodPolicy::quadrature && all_ideal(s.vertices)) {
        const Complex z = cross_ratio(s.vertices[0], s.vertices[1], s.vertices[2],
                                      s.vertices[3]);
        // sign(D(cross_ratio)) agrees with the Klein determinant on every
        // non-flat ideal 4-tuple (property-tested); the Klein sign is the
        // convention, so it is applied explicitly
        const double sigma = det > 0.0 ? 1.0 : -1.0;
        return {sigma * std::abs(bloch_wigner(z)), 1e-12, VolumeMethod::closed_form};
    }
    if (policy == MethodPolicy::closed_form)
        throw geometry_error("no closed form for simplices with interior vertices");
    return volume_by_quadrature(s, tol, budget, det);
}

}  // namespace repvol
