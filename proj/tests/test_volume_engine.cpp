#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "repvol/special_functions.hpp"
#include "repvol/volume_engine.hpp"

using namespace repvol;
using nlohmann::json;
using repvol_tests::Rng;

namespace {

constexpr double kPi = std::numbers::pi;

std::string read_data_file(const std::string& name) {
    const std::string path = std::string(REPVOL_DATA_DIR) + "/" + name;
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing data file ", path);
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

}  // namespace

TEST_CASE("compute_volume: trivial representation gives exactly zero") {
    for (const std::string name : {"fig8.json", "punctured_torus.json"}) {
        CAPTURE(name);
        const ParsedInput input = with_trivial_cocycle(load(name));
        const VolumeReport report = compute_volume(input, {});
        CHECK(report.total == 0.0);
    }
}

TEST_CASE("compute_volume: figure-eight geometric volume") {
    const ParsedInput input = load("fig8.json");
    EngineOptions options;
    options.tol = 1e-8;
    const VolumeReport report = compute_volume(input, options);
    CHECK(std::abs(std::abs(report.total) - 2.0298832128193) <= 1e-6);
    CHECK(std::abs(std::abs(report.total) - 2.0 * bloch_wigner(std::polar(1.0, kPi / 3.0))) <=
          1e-8);
    CHECK(report.simplex_count == 2);
    CHECK(report.max_witness <= 1e-9);
}

TEST_CASE("compute_volume: punctured torus gives 2 pi by Gauss-Bonnet") {
    const ParsedInput input = load("punctured_torus.json");
    EngineOptions options;
    options.tol = 1e-10;
    const VolumeReport report = compute_volume(input, options);
    CHECK(std::abs(std::abs(report.total) - 2.0 * kPi) <= 1e-9);
}

TEST_CASE("compute_volume: forced quadrature agrees with the closed form") {
    const ParsedInput input = load("fig8.json");
    EngineOptions closed;
    closed.tol = 1e-8;
    EngineOptions quad;
    quad.tol = 1e-7;
    quad.method = MethodPolicy::quadrature;
    const VolumeReport a = compute_volume(input, closed);
    const VolumeReport b = compute_volume(input, quad);
    CHECK(a.quadrature_count == 0);
    CHECK(b.quadrature_count == 2);
    CHECK(std::abs(a.total - b.total) <= 1e-6);
}

TEST_CASE("compute_volume: strict mode rejects a perturbed cocycle") {
    ParsedInput input = load("fig8.json");
    input.cocycle.forward[1].b += 1e-3;
    CHECK_THROWS_AS(compute_volume(input, {}), validation_error);
    EngineOptions lax;
    lax.strict = false;
    const VolumeReport report = compute_volume(input, lax);  // still yields a value
    CHECK(report.max_witness >= 1e-4);
}

TEST_CASE("compute_volume: orientation reversal negates the total exactly") {
    for (const std::string name : {"fig8.json", "punctured_torus.json"}) {
        CAPTURE(name);
        json doc = json::parse(read_data_file(name));
        const ParsedInput input = parse_input(doc.dump());
        for (auto& s : doc["simplices"]) s["sign"] = -s["sign"].get<int>();
        const ParsedInput reversed = parse_input(doc.dump());
        const double a = compute_volume(input, {}).total;
        const double b = compute_volume(reversed, {}).total;
        CHECK(a == -b);
    }
}

TEST_CASE("compute_volume: invariance under global conjugation") {
    const ParsedInput base = load("fig8.json");
    const double tol = 1e-8;
    EngineOptions options;
    options.tol = tol;
    const double reference = compute_volume(base, options).total;
    Rng rng(401);
    for (int trial = 0; trial < 5; ++trial) {
        const Isometry g = rng.isometry(3);
        ParsedInput conj = base;
        for (Isometry& f : conj.cocycle.forward) f = g * f * g.inverse();
        for (auto& [vid, list] : conj.peripheral.by_vertex)
            for (Isometry& f : list) f = g * f * g.inverse();
        const double moved = compute_volume(conj, options).total;
        CHECK(std::abs(moved - reference) <= 2.0 * tol);
    }
}

TEST_CASE("compute_volume: boundary-fixing representations have zero volume") {
    // every transition upper-triangular: the whole orbit stays at infinity
    const ParsedInput fig8_upper = load("fig8_upper.json");
    CHECK(compute_volume(fig8_upper, {}).total == 0.0);
    const ParsedInput torus_upper = load("punctured_torus_upper.json");
    CHECK(compute_volume(torus_upper, {}).total == 0.0);

    // randomly placed finite vertices of the subdivision stay within tolerance
    const ParsedInput sub = subdivided(fig8_upper);
    Rng rng(409);
    for (int i = 0; i < 3; ++i) {
        EngineOptions options;
        options.tol = 1e-8;
        options.placement.mode = PlacementPolicy::Mode::random;
        options.placement.seed = 1000 + i;
        CHECK(std::abs(compute_volume(sub, options).total) <= 1e-6);
    }
}

TEST_CASE("milnor_wood_report: figure-eight is extremal, trivial is zero") {
    const ParsedInput input = load("fig8.json");
    VolumeReport report = compute_volume(input, {});
    const MilnorWoodReport mw = milnor_wood_report(report, 3, report.simplex_count);
    CHECK(mw.pass);
    CHECK(std::abs(mw.ratio - 1.0) <= 1e-5);

    const VolumeReport trivial = compute_volume(with_trivial_cocycle(input), {});
    const MilnorWoodReport mw0 = milnor_wood_report(trivial, 3, trivial.simplex_count);
    CHECK(mw0.pass);
    CHECK(mw0.ratio == 0.0);
}

TEST_CASE("invariance_test: corpus manifolds and a broken cocycle") {
    const ParsedInput fig8 = load("fig8.json");
    const InvarianceReport ideal_only = invariance_test(fig8, 5, 7, 1e-7);
    CHECK(ideal_only.pass);
    CHECK(ideal_only.max_deviation <= 1e-9);  // no finite vertices to move

    // the subdivision has finite vertices, so random placements matter
    const InvarianceReport sub = invariance_test(subdivided(fig8), 4, 7, 1e-6);
    CHECK(sub.pass);
    CHECK(sub.max_deviation <= 1e-5);

    ParsedInput broken = load("fig8.json");
    broken.cocycle.forward[1].b += 1e-3;
    const InvarianceReport bad = invariance_test(subdivided(broken), 4, 7, 1e-7);
    CHECK(!bad.pass);
    CHECK(bad.max_deviation > 1e-4);

    CHECK_THROWS_AS(invariance_test(fig8, 1, 7, 1e-7), validation_error);
}

TEST_CASE("subdivision_test: exact for the torus, within budget for fig8") {
    const SubdivisionReport torus = subdivision_test(load("punctured_torus.json"), 1e-9);
    CHECK(torus.pass);
    CHECK(torus.subdivided_count == 12);
    CHECK(std::abs(torus.delta) <= 1e-12);

    const SubdivisionReport trivial =
        subdivision_test(with_trivial_cocycle(load("punctured_torus.json")), 1e-9);
    CHECK(trivial.before == 0.0);
    CHECK(trivial.after == 0.0);
}

TEST_CASE("compute_volume: twice-subdivided torus still sums to 2 pi") {
    const ParsedInput sub2 = subdivided(subdivided(load("punctured_torus.json")));
    CHECK(sub2.triangulation.simplices.size() == 72);
    EngineOptions options;
    options.tol = 1e-10;
    CHECK(std::abs(std::abs(compute_volume(sub2, options).total) - 2.0 * kPi) <= 1e-9);
    options.placement.mode = PlacementPolicy::Mode::random;
    options.placement.seed = 31;
    CHECK(std::abs(std::abs(compute_volume(sub2, options).total) - 2.0 * kPi) <= 1e-9);
}

TEST_CASE("reports are deterministic and carry the schema version") {
    const std::string bytes = read_data_file("fig8.json");
    const ParsedInput input = parse_input(bytes);
    EngineOptions options;
    options.placement.mode = PlacementPolicy::Mode::random;
    options.placement.seed = 99;
    VolumeReport a = compute_volume(input, options);
    VolumeReport b = compute_volume(input, options);
    a.input_digest = input_digest(bytes);
    b.input_digest = input_digest(bytes);
    CHECK(to_json(a) == to_json(b));
    CHECK(to_json(a).find("\"schema_version\": 1") != std::string::npos);
    CHECK(a.input_digest.size() == 16);

    const InvarianceReport ia = invariance_test(input, 3, 5, 1e-7);
    const InvarianceReport ib = invariance_test(input, 3, 5, 1e-7);
    CHECK(to_json(ia) == to_json(ib));
}

TEST_CASE("volume report invariants") {
    for (const std::string name : {"fig8.json", "punctured_torus.json", "fig8_upper.json"}) {
        CAPTURE(name);
        const ParsedInput input = load(name);
        const VolumeReport report = compute_volume(input, {});
        // total is the signed compensated sum of the per-simplex values
        double sum = 0.0;
        const FundamentalCycle cycle = fundamental_cycle(input.triangulation);
        for (size_t i = 0; i < cycle.entries.size(); ++i)
            sum += cycle.entries[i].second * report.per_simplex[i].value;
        CHECK(std::abs(sum - report.total) <= 1e-12);
        const int n = input.triangulation.dimension;
        CHECK(std::abs(report.total) <=
              report.simplex_count * max_simplex_volume(n) + report.est_error + 1e-12);
    }
}
