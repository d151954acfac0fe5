// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Expected values come from independent oracles (direct
// numerical integration, Gauss-Bonnet, the Lobachevsky value of the regular
// ideal tetrahedron) or are exercised as properties.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "repvol/developing.hpp"
#include "repvol/simplex_volume.hpp"
#include "repvol/special_functions.hpp"
#include "repvol/triangulation.hpp"
#include "repvol/volume_engine.hpp"

using namespace repvol;
using repvol_tests::Rng;

namespace {

constexpr double kPi = std::numbers::pi;

int criteria_failed = 0;

class Criterion {
public:
    Criterion(int number, std::string name, double time_budget_seconds)
        : number_(number), name_(std::move(name)), budget_(time_budget_seconds),
          start_(std::chrono::steady_clock::now()) {}

    void check(bool ok, const std::string& what) {
        if (!ok) {
            failures_.push_back(what);
        }
        ++checks_;
    }

    ~Criterion() {
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        const bool in_time = elapsed <= budget_;
        const bool pass = failures_.empty() && in_time;
        std::printf("[%s] criterion %d: %s (%d checks, %.2fs of %.0fs budget)\n",
                    pass ? "PASS" : "FAIL", number_, name_.c_str(), checks_, elapsed, budget_);
        if (!in_time) std::printf("       over time budget\n");
        for (const std::string& f : failures_) std::printf("       %s\n", f.c_str());
        if (!pass) ++criteria_failed;
        std::fflush(stdout);
    }

private:
    int number_;
    std::string name_;
    double budget_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::string> failures_;
    int checks_ = 0;
};

std::string read_data_file(const std::string& name) {
    const std::string path = std::string(REPVOL_DATA_DIR) + "/" + name;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::fprintf(stderr, "missing data file %s\n", path.c_str());
        std::exit(2);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

ParsedInput load(const std::string& name) { return parse_input(read_data_file(name)); }

ParsedInput with_trivial_cocycle(ParsedInput input) {
    for (Isometry& g : input.cocycle.forward)
        g = Isometry::identity(input.triangulation.dimension);
    input.peripheral.by_vertex.clear();
    return input;
}

ParsedInput subdivided(const ParsedInput& input) {
    ParsedInput sub;
    std::tie(sub.triangulation, sub.cocycle) =
        barycentric_subdivide(input.triangulation, input.cocycle);
    sub.peripheral = input.peripheral;
    return sub;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

void criterion_1_special_functions() {
    Criterion crit(1, "special functions against direct integration", 1.0);
    Rng rng(20260808);
    for (int i = 0; i < 100; ++i) {
        const double theta = rng.uniform(1e-4, kPi - 1e-4);
        const double series = lobachevsky(theta);
        const double integral = repvol_tests::lobachevsky_by_integration(theta, 1e-12);
        if (std::abs(series - integral) > 1e-9)
            crit.check(false, "lobachevsky(" + std::to_string(theta) +
                                  ") deviates by " + fmt(std::abs(series - integral)));
        else
            crit.check(true, "");
    }
    const double bw = bloch_wigner(std::polar(1.0, kPi / 3.0));
    const double anchor = 3.0 * lobachevsky(kPi / 3.0);
    crit.check(std::abs(bw - anchor) <= 1e-8,
               "bloch_wigner(e^{i pi/3}) - 3 L(pi/3) = " + fmt(bw - anchor));
}

void criterion_2_theta_properties() {
    Criterion crit(2, "alternation, invariance, boundedness, cocycle identity", 60.0);
    const double tol = 1e-7;
    Rng rng(1001);
    for (int i = 0; i < 200; ++i) {
        const int n = i % 2 == 0 ? 3 : 2;
        std::vector<ExtendedPoint> tuple;
        for (int k = 0; k <= n; ++k) tuple.push_back(rng.point(n));
        const GeodesicSimplex s{n, tuple};
        const VolumeValue base = simplex_volume(s, tol);

        // alternation under a random transposition and a random 3-cycle
        std::vector<int> perm(n + 1);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng.engine());
        int sign = 1;
        for (size_t a = 0; a < perm.size(); ++a)
            for (size_t b = a + 1; b < perm.size(); ++b)
                if (perm[a] > perm[b]) sign = -sign;
        std::vector<ExtendedPoint> permuted;
        for (int k = 0; k <= n; ++k) permuted.push_back(tuple[perm[k]]);
        const double alt = simplex_volume(GeodesicSimplex{n, permuted}, tol).value;
        crit.check(std::abs(alt - sign * base.value) <= 2.0 * tol,
                   "alternation off by " + fmt(std::abs(alt - sign * base.value)));

        // G-invariance
        const Isometry g = rng.isometry(n);
        std::vector<ExtendedPoint> moved;
        for (const ExtendedPoint& p : tuple) moved.push_back(act(g, p));
        const double inv = simplex_volume(GeodesicSimplex{n, moved}, tol).value;
        crit.check(std::abs(inv - base.value) <= 2.0 * tol,
                   "G-invariance off by " + fmt(std::abs(inv - base.value)));

        // boundedness
        crit.check(std::abs(base.value) <= max_simplex_volume(n) + base.est_error,
                   "|Theta| exceeds v_n: " + fmt(std::abs(base.value)));
    }
    for (int i = 0; i < 50; ++i) {
        std::vector<ExtendedPoint> pts;
        for (int k = 0; k < 5; ++k) pts.push_back(rng.point(3));
        double sum = 0.0;
        for (int omit = 0; omit < 5; ++omit) {
            std::vector<ExtendedPoint> vs;
            for (int k = 0; k < 5; ++k)
                if (k != omit) vs.push_back(pts[k]);
            sum += (omit % 2 == 0 ? 1.0 : -1.0) *
                   simplex_volume(GeodesicSimplex{3, vs}, tol).value;
        }
        crit.check(std::abs(sum) <= 5.0 * tol, "cocycle identity off by " + fmt(std::abs(sum)));
    }
}

void criterion_3_cross_path() {
    Criterion crit(3, "closed form vs quadrature on ideal tetrahedra", 120.0);
    Rng rng(2002);
    int tested = 0;
    while (tested < 50) {
        std::vector<ExtendedPoint> vs;
        for (int k = 0; k < 4; ++k) vs.push_back(rng.ideal_point(3));
        const GeodesicSimplex s{3, vs};
        const VolumeValue closed = simplex_volume(s, 1e-8);
        if (closed.value == 0.0) continue;  // flat draw
        const VolumeValue quad = simplex_volume(s, 1e-7, MethodPolicy::quadrature);
        crit.check(std::abs(closed.value - quad.value) <= 1e-6,
                   "paths disagree by " + fmt(std::abs(closed.value - quad.value)));
        ++tested;
    }
}

void criterion_4_figure_eight() {
    Criterion crit(4, "figure-eight volume and Milnor-Wood ratio", 5.0);
    const ParsedInput input = load("fig8.json");
    EngineOptions options;
    options.tol = 1e-8;
    const VolumeReport report = compute_volume(input, options);
    crit.check(std::abs(std::abs(report.total) - 2.0298832128193) <= 1e-6,
               "|total| = " + std::to_string(std::abs(report.total)));
    const MilnorWoodReport mw = milnor_wood_report(report, 3, report.simplex_count);
    crit.check(std::abs(mw.ratio - 1.0) <= 1e-5, "ratio = " + std::to_string(mw.ratio));
    crit.check(mw.pass, "Milnor-Wood bound violated");
}

void criterion_5_punctured_torus() {
    Criterion crit(5, "punctured torus area 2 pi", 1.0);
    const ParsedInput input = load("punctured_torus.json");
    EngineOptions options;
    options.tol = 1e-10;
    const VolumeReport report = compute_volume(input, options);
    crit.check(std::abs(std::abs(report.total) - 2.0 * kPi) <= 1e-9,
               "|total| = " + std::to_string(std::abs(report.total)));
}

void criterion_6_choice_independence() {
    Criterion crit(6, "placement invariance and subdivision stability", 300.0);
    // 20 random placements on both corpus manifolds and on their
    // subdivisions (whose finite vertices actually move)
    for (const std::string name : {"fig8.json", "punctured_torus.json"}) {
        const ParsedInput input = load(name);
        const InvarianceReport raw = invariance_test(input, 20, 77, 1e-7);
        crit.check(raw.max_deviation <= 1e-6,
                   name + " raw deviation " + fmt(raw.max_deviation));
        const InvarianceReport sub = invariance_test(subdivided(input), 20, 78, 1e-6);
        crit.check(sub.max_deviation <= 1e-6,
                   name + " subdivided deviation " + fmt(sub.max_deviation));
    }
    const SubdivisionReport fig8 = subdivision_test(load("fig8.json"), 1e-7);
    crit.check(std::abs(fig8.delta) <= 5e-5, "fig8 subdivision delta " + fmt(fig8.delta));
    crit.check(fig8.pass, "fig8 subdivision_test FAIL");
    const SubdivisionReport torus = subdivision_test(load("punctured_torus.json"), 1e-9);
    crit.check(std::abs(torus.delta) <= 1e-12, "torus subdivision delta " + fmt(torus.delta));
    crit.check(torus.pass, "torus subdivision_test FAIL");
}

void criterion_7_degenerate_representations() {
    Criterion crit(7, "trivial and boundary-fixing representations", 60.0);
    for (const std::string name : {"fig8.json", "punctured_torus.json"}) {
        const ParsedInput trivial = with_trivial_cocycle(load(name));
        crit.check(compute_volume(trivial, {}).total == 0.0, name + " trivial not exactly 0");
    }
    for (const std::string name : {"fig8_upper.json", "punctured_torus_upper.json"}) {
        const ParsedInput upper = load(name);
        crit.check(compute_volume(upper, {}).total == 0.0, name + " not exactly 0");
        // ten random placements on the subdivision
        const ParsedInput sub = subdivided(upper);
        for (int i = 0; i < 10; ++i) {
            EngineOptions options;
            options.tol = 1e-8;
            options.placement.mode = PlacementPolicy::Mode::random;
            options.placement.seed = 8800 + i;
            const double total = compute_volume(sub, options).total;
            crit.check(std::abs(total) <= 1e-6, name + " subdivided total " + fmt(total));
        }
    }
}

void criterion_8_validator() {
    Criterion crit(8, "validator flags every single-entry perturbation", 60.0);
    const ParsedInput base = load("fig8.json");
    for (size_t gi = 0; gi < base.cocycle.forward.size(); ++gi) {
        for (int component = 0; component < 8; ++component) {
            const int entry = component / 2;
            ParsedInput broken = base;
            Isometry& m = broken.cocycle.forward[gi];
            Complex& field = entry == 0 ? m.a : entry == 1 ? m.b : entry == 2 ? m.c : m.d;
            field += component % 2 == 0 ? Complex{1e-3, 0.0} : Complex{0.0, 1e-3};
            const CocycleReport edges =
                validate_cocycle(broken.triangulation, broken.cocycle, 1e-9);
            const std::string where = "gluing " + std::to_string(gi) + " entry " +
                                      std::to_string(entry) +
                                      (component % 2 == 0 ? " re" : " im");
            crit.check(!edges.pass && edges.max_residual >= 1e-4,
                       where + ": residual " + fmt(edges.max_residual));
            const Placement placement = place_vertices(
                broken.triangulation, broken.cocycle, broken.peripheral, {});
            const DevelopedChain chain =
                develop(broken.triangulation, broken.cocycle, placement);
            crit.check(chain.max_witness >= 1e-4,
                       where + ": witness " + fmt(chain.max_witness));
        }
    }
}

}  // namespace

int main() {
    criterion_1_special_functions();
    criterion_2_theta_properties();
    criterion_3_cross_path();
    criterion_4_figure_eight();
    criterion_5_punctured_torus();
    criterion_6_choice_independence();
    criterion_7_degenerate_representations();
    criterion_8_validator();
    if (criteria_failed) {
        std::printf("%d criterion(s) FAILED\n", criteria_failed);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
