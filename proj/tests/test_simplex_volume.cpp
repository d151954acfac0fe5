#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "oracles.hpp"
#include "repvol/simplex_volume.hpp"
#include "repvol/special_functions.hpp"

using namespace repvol;
using repvol_tests::Rng;

namespace {

constexpr double kPi = std::numbers::pi;

GeodesicSimplex make_simplex(int n, std::vector<ExtendedPoint> vs) {
    return GeodesicSimplex{n, std::move(vs)};
}

GeodesicSimplex random_simplex(Rng& rng, int n) {
    std::vector<ExtendedPoint> vs;
    for (int i = 0; i <= n; ++i) vs.push_back(rng.point(n));
    return make_simplex(n, std::move(vs));
}

int permutation_sign(const std::vector<int>& perm) {
    int sign = 1;
    for (size_t i = 0; i < perm.size(); ++i)
        for (size_t j = i + 1; j < perm.size(); ++j)
            if (perm[i] > perm[j]) sign = -sign;
    return sign;
}

}  // namespace

TEST_CASE("cross_ratio: normal form and invariance") {
    const ExtendedPoint zero = ExtendedPoint::ideal3({0.0, 0.0});
    const ExtendedPoint one = ExtendedPoint::ideal3({1.0, 0.0});
    const ExtendedPoint inf = ExtendedPoint::infinity(3);
    const Complex z{0.3, 1.2};
    const ExtendedPoint pz = ExtendedPoint::ideal3(z);

    CHECK(std::abs(cross_ratio(zero, one, inf, pz) - z) < 1e-14);

    Rng rng(211);
    for (int i = 0; i < 50; ++i) {
        const Isometry g = rng.isometry(3);
        const Complex w =
            cross_ratio(act(g, zero), act(g, one), act(g, inf), act(g, pz));
        CHECK(std::abs(w - z) <= 1e-9 * std::max(1.0, std::abs(z)));
    }

    CHECK_THROWS_AS(cross_ratio(zero, zero, inf, pz), degenerate_error);
}

TEST_CASE("cross_ratio: vertex reordering acts on D by the permutation sign") {
    Rng rng(223);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<ExtendedPoint> pts;
        for (int i = 0; i < 4; ++i) pts.push_back(rng.ideal_point(3));
        const double d0 = bloch_wigner(cross_ratio(pts[0], pts[1], pts[2], pts[3]));
        if (std::abs(d0) < 1e-6) continue;
        std::vector<int> perm{0, 1, 2, 3};
        do {
            const double d = bloch_wigner(cross_ratio(pts[perm[0]], pts[perm[1]],
                                                      pts[perm[2]], pts[perm[3]]));
            CHECK(d == doctest::Approx(permutation_sign(perm) * d0).epsilon(1e-9));
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    // swapping the first two vertices negates D
    const Complex z{0.4, 0.9};
    const auto zero = ExtendedPoint::ideal3({0.0, 0.0});
    const auto one = ExtendedPoint::ideal3({1.0, 0.0});
    const auto inf = ExtendedPoint::infinity(3);
    const auto pz = ExtendedPoint::ideal3(z);
    const Complex swapped = cross_ratio(one, zero, inf, pz);
    CHECK(bloch_wigner(swapped) == doctest::Approx(-bloch_wigner(z)).epsilon(1e-12));
}

TEST_CASE("max_simplex_volume") {
    CHECK(max_simplex_volume(2) == kPi);
    CHECK(max_simplex_volume(3) == doctest::Approx(1.0149416064).epsilon(1e-9));
    CHECK_THROWS_AS(max_simplex_volume(4), geometry_error);
}

TEST_CASE("simplex_volume: degenerate tuples are exactly zero") {
    const auto p = ExtendedPoint::ideal3({0.0, 0.0});
    const auto q = ExtendedPoint::ideal3({1.0, 0.0});
    const auto r = ExtendedPoint::infinity(3);
    const auto s = make_simplex(3, {p, q, r, q});
    CHECK(simplex_volume(s, 1e-9).value == 0.0);

    // coplanar: four real boundary points
    const auto flat = make_simplex(3, {p, q, r, ExtendedPoint::ideal3({2.0, 0.0})});
    CHECK(simplex_volume(flat, 1e-9).value == 0.0);
}

TEST_CASE("simplex_volume: ideal triangle has area pi") {
    const auto s = make_simplex(
        2, {ExtendedPoint::ideal2(0.0), ExtendedPoint::ideal2(1.0), ExtendedPoint::infinity(2)});
    const VolumeValue v = simplex_volume(s, 1e-12);
    CHECK(std::abs(std::abs(v.value) - kPi) < 1e-12);
    CHECK(v.method == VolumeMethod::closed_form);
}

TEST_CASE("simplex_volume: n = 2 matches known triangle areas") {
    // (2,2,2)-triangle etc. checked through the angle sum itself: for a
    // triangle with interior vertices the defect lies in (0, pi).
    Rng rng(229);
    for (int i = 0; i < 50; ++i) {
        const GeodesicSimplex s = random_simplex(rng, 2);
        const VolumeValue v = simplex_volume(s, 1e-10);
        CHECK(std::abs(v.value) <= kPi + v.est_error);
    }
    // the apex (0.5, 0.5) lies on the geodesic joining 0 and 1: flat
    const auto flat = make_simplex(2, {ExtendedPoint::ideal2(0.0), ExtendedPoint::ideal2(1.0),
                                       ExtendedPoint::interior2(0.5, 0.5)});
    CHECK(simplex_volume(flat, 1e-12).value == 0.0);
    // doubly ideal triangle with apex (0.5, 1): the geodesics to 0 and 1 are
    // the circles centered at 1.25 and -0.25, whose tangents at the apex have
    // cosine -0.28, so the area is pi - acos(-0.28) = acos(0.28)
    const auto s = make_simplex(2, {ExtendedPoint::ideal2(0.0), ExtendedPoint::ideal2(1.0),
                                    ExtendedPoint::interior2(0.5, 1.0)});
    CHECK(std::abs(std::abs(simplex_volume(s, 1e-12).value) - std::acos(0.28)) < 1e-12);
}

TEST_CASE("simplex_volume: regular ideal tetrahedron, closed form and quadrature") {
    const auto s = make_simplex(3, {ExtendedPoint::ideal3({0.0, 0.0}),
                                    ExtendedPoint::ideal3({1.0, 0.0}),
                                    ExtendedPoint::infinity(3),
                                    ExtendedPoint::ideal3(std::polar(1.0, kPi / 3.0))});
    const VolumeValue closed = simplex_volume(s, 1e-8);
    CHECK(closed.method == VolumeMethod::closed_form);
    CHECK(std::abs(std::abs(closed.value) - 1.0149416064) < 1e-8);

    const VolumeValue quad = simplex_volume(s, 1e-7, MethodPolicy::quadrature);
    CHECK(quad.method == VolumeMethod::quadrature);
    CHECK(std::abs(quad.value - closed.value) < 1e-6);
}

TEST_CASE("simplex_volume: cross-path agreement on random ideal tetrahedra") {
    Rng rng(233);
    int tested = 0;
    for (int i = 0; i < 12; ++i) {
        std::vector<ExtendedPoint> vs;
        for (int k = 0; k < 4; ++k) vs.push_back(rng.ideal_point(3));
        const GeodesicSimplex s = make_simplex(3, vs);
        const VolumeValue closed = simplex_volume(s, 1e-8);
        if (closed.value == 0.0) continue;
        const VolumeValue quad = simplex_volume(s, 1e-7, MethodPolicy::quadrature);
        CHECK(std::abs(quad.value - closed.value) < 1e-6);
        ++tested;
    }
    CHECK(tested >= 8);
}

TEST_CASE("simplex_volume: closed-form policy rejects interior vertices") {
    Rng rng(239);
    std::vector<ExtendedPoint> vs;
    for (int k = 0; k < 3; ++k) vs.push_back(rng.ideal_point(3));
    vs.push_back(rng.interior_point(3));
    CHECK_THROWS_AS(simplex_volume(make_simplex(3, vs), 1e-7, MethodPolicy::closed_form),
                    geometry_error);
}

TEST_CASE("Bloch-Wigner sign matches the Klein orientation convention") {
    Rng rng(269);
    for (int i = 0; i < 300; ++i) {
        std::vector<ExtendedPoint> vs;
        for (int k = 0; k < 4; ++k) vs.push_back(rng.ideal_point(3));
        const GeodesicSimplex s = make_simplex(3, vs);
        const double det = klein_orientation(s);
        const double d = bloch_wigner(cross_ratio(vs[0], vs[1], vs[2], vs[3]));
        if (std::abs(det) < 1e-8 || std::abs(d) < 1e-8) continue;
        CHECK((d > 0.0) == (det > 0.0));
        CHECK(simplex_volume(s, 1e-9).value == doctest::Approx(d).epsilon(1e-10));
    }
}

TEST_CASE("simplex_volume: alternation") {
    Rng rng(241);
    const double tol = 1e-7;
    for (int n : {2, 3}) {
        for (int trial = 0; trial < 6; ++trial) {
            const GeodesicSimplex s = random_simplex(rng, n);
            const double base = simplex_volume(s, tol).value;
            std::vector<int> perm(n + 1);
            std::iota(perm.begin(), perm.end(), 0);
            for (int shuffle = 0; shuffle < 4; ++shuffle) {
                std::shuffle(perm.begin(), perm.end(), rng.engine());
                std::vector<ExtendedPoint> vs;
                for (int i = 0; i <= n; ++i) vs.push_back(s.vertices[perm[i]]);
                const double permuted = simplex_volume(make_simplex(n, vs), tol).value;
                CHECK(std::abs(permuted - permutation_sign(perm) * base) <= 2.0 * tol);
            }
        }
    }
}

TEST_CASE("simplex_volume: G-invariance") {
    Rng rng(251);
    const double tol = 1e-7;
    for (int n : {2, 3}) {
        for (int trial = 0; trial < 6; ++trial) {
            const GeodesicSimplex s = random_simplex(rng, n);
            const double base = simplex_volume(s, tol).value;
            for (int k = 0; k < 3; ++k) {
                const Isometry g = rng.isometry(n);
                std::vector<ExtendedPoint> vs;
                for (const ExtendedPoint& p : s.vertices) vs.push_back(act(g, p));
                const double moved = simplex_volume(make_simplex(n, vs), tol).value;
                CHECK(std::abs(moved - base) <= 2.0 * tol);
            }
        }
    }
}

TEST_CASE("simplex_volume: boundedness") {
    Rng rng(257);
    const double tol = 1e-7;
    for (int n : {2, 3}) {
        for (int trial = 0; trial < 25; ++trial) {
            const GeodesicSimplex s = random_simplex(rng, n);
            const VolumeValue v = simplex_volume(s, tol);
            CHECK(std::abs(v.value) <= max_simplex_volume(n) + v.est_error + tol);
        }
    }
}

TEST_CASE("simplex_volume: cocycle identity on 5-tuples") {
    Rng rng(263);
    const double tol = 1e-7;
    for (int trial = 0; trial < 8; ++trial) {
        std::vector<ExtendedPoint> pts;
        for (int i = 0; i < 5; ++i) pts.push_back(rng.point(3));
        double sum = 0.0;
        for (int omit = 0; omit < 5; ++omit) {
            std::vector<ExtendedPoint> vs;
            for (int i = 0; i < 5; ++i)
                if (i != omit) vs.push_back(pts[i]);
            const double v = simplex_volume(make_simplex(3, vs), tol).value;
            sum += (omit % 2 == 0 ? 1.0 : -1.0) * v;
        }
        CHECK(std::abs(sum) <= 5.0 * tol);
    }
}
