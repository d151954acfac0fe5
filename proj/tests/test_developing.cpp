#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "repvol/developing.hpp"
#include "repvol/simplex_volume.hpp"

using namespace repvol;
using nlohmann::json;

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

json doubled_tetrahedron() {
    json root;
    root["dimension"] = 3;
    root["vertices"] = json::array();
    for (int v = 0; v < 4; ++v)
        root["vertices"].push_back({{"id", v}, {"kind", v == 0 ? "ideal" : "finite"}});
    root["simplices"] = {{{"id", 0}, {"vertices", {0, 1, 2, 3}}, {"sign", 1}},
                         {{"id", 1}, {"vertices", {0, 1, 2, 3}}, {"sign", -1}}};
    const json identity = {{{1.0, 0.0}, {0.0, 0.0}}, {{0.0, 0.0}, {1.0, 0.0}}};
    root["gluings"] = json::array();
    for (int f = 0; f < 4; ++f) {
        json vm = json::array();
        for (int pos = 0; pos < 4; ++pos)
            if (pos != f) vm.push_back(pos);
        root["gluings"].push_back({{"from", {0, f}},
                                   {"to", {1, f}},
                                   {"vertex_map", vm},
                                   {"transition", identity}});
    }
    return root;
}

double chain_volume(const Triangulation& t, const DevelopedChain& chain, double tol) {
    double total = 0.0;
    for (const DevelopedEntry& e : chain.entries)
        total += e.sign * simplex_volume(GeodesicSimplex{t.dimension, e.tuple}, tol).value;
    return total;
}

}  // namespace

TEST_CASE("place_vertices: figure-eight canonical pins the cusp at infinity") {
    const ParsedInput input = load("fig8.json");
    const Placement placement =
        place_vertices(input.triangulation, input.cocycle, input.peripheral, {});
    REQUIRE(placement.by_vertex.count(0));
    CHECK(placement.by_vertex.at(0).at_infinity);
}

TEST_CASE("place_vertices: trivial representation sends ideal vertices to infinity") {
    const ParsedInput input = with_trivial_cocycle(load("fig8.json"));
    const Placement placement =
        place_vertices(input.triangulation, input.cocycle, input.peripheral, {});
    CHECK(placement.by_vertex.at(0).at_infinity);
}

TEST_CASE("place_vertices: random mode is deterministic in the seed") {
    const ParsedInput input = parse_input(doubled_tetrahedron().dump());
    PlacementPolicy policy;
    policy.mode = PlacementPolicy::Mode::random;
    policy.seed = 42;
    const Placement a = place_vertices(input.triangulation, input.cocycle, {}, policy);
    const Placement b = place_vertices(input.triangulation, input.cocycle, {}, policy);
    policy.seed = 43;
    const Placement c = place_vertices(input.triangulation, input.cocycle, {}, policy);
    bool all_equal = true;
    bool any_differs = false;
    for (const auto& [vid, p] : a.by_vertex) {
        if (chordal_distance(p, b.by_vertex.at(vid)) != 0.0) all_equal = false;
        if (chordal_distance(p, c.by_vertex.at(vid)) > 1e-6) any_differs = true;
    }
    CHECK(all_equal);
    CHECK(any_differs);
    // finite placements stay in the policy ball
    for (const auto& [vid, p] : a.by_vertex) {
        if (!p.is_interior()) continue;
        const KleinPoint k = to_klein(p);
        CHECK(std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) <= policy.radius + 1e-12);
    }
    policy.radius = 1.5;
    CHECK_THROWS_AS(place_vertices(input.triangulation, input.cocycle, {}, policy),
                    validation_error);
}

TEST_CASE("develop: trivial representation is the constant map") {
    const ParsedInput input = with_trivial_cocycle(load("fig8.json"));
    const Placement placement =
        place_vertices(input.triangulation, input.cocycle, input.peripheral, {});
    const DevelopedChain chain = develop(input.triangulation, input.cocycle, placement);
    CHECK(chain.max_witness == 0.0);
    for (const DevelopedEntry& e : chain.entries)
        for (const ExtendedPoint& p : e.tuple) CHECK(p.at_infinity);
    CHECK(chain_volume(input.triangulation, chain, 1e-9) == 0.0);
}

TEST_CASE("develop: figure-eight tetrahedra are regular ideal") {
    const ParsedInput input = load("fig8.json");
    const Placement placement =
        place_vertices(input.triangulation, input.cocycle, input.peripheral, {});
    const DevelopedChain chain = develop(input.triangulation, input.cocycle, placement);
    CHECK(chain.max_witness <= 1e-9);
    for (const DevelopedEntry& e : chain.entries) {
        for (const ExtendedPoint& p : e.tuple) CHECK(p.is_ideal());
        const Complex z = cross_ratio(e.tuple[0], e.tuple[1], e.tuple[2], e.tuple[3]);
        const double d = std::min(std::abs(z - std::polar(1.0, kPi / 3.0)),
                                  std::abs(z - std::polar(1.0, -kPi / 3.0)));
        CHECK(d <= 1e-9);
    }
}

TEST_CASE("develop: identity cocycle with random finite placements matches shared faces") {
    const ParsedInput input = parse_input(doubled_tetrahedron().dump());
    PlacementPolicy policy;
    policy.mode = PlacementPolicy::Mode::random;
    policy.seed = 7;
    const Placement placement =
        place_vertices(input.triangulation, input.cocycle, {}, policy);
    const DevelopedChain chain = develop(input.triangulation, input.cocycle, placement);
    CHECK(chain.max_witness == 0.0);
    // glued faces coincide exactly: both tetrahedra share all vertex classes
    for (int pos = 0; pos < 4; ++pos)
        CHECK(chordal_distance(chain.entries[0].tuple[pos], chain.entries[1].tuple[pos]) == 0.0);
}

TEST_CASE("develop: ideal vertices carry ideal points, finite vertices interior points") {
    const ParsedInput input = parse_input(doubled_tetrahedron().dump());
    PlacementPolicy policy;
    policy.mode = PlacementPolicy::Mode::random;
    policy.seed = 11;
    const Placement placement =
        place_vertices(input.triangulation, input.cocycle, {}, policy);
    const DevelopedChain chain = develop(input.triangulation, input.cocycle, placement);
    for (const DevelopedEntry& e : chain.entries) {
        const SimplexInfo& s = input.triangulation.simplices[e.simplex];
        for (int pos = 0; pos < 4; ++pos) {
            const VertexInfo& v =
                input.triangulation.vertices[input.triangulation.vertex_index(
                    s.vertices[pos])];
            CHECK(e.tuple[pos].is_ideal() == v.ideal);
        }
    }
}

TEST_CASE("develop: root independence of per-simplex volumes") {
    const double tol = 1e-9;
    for (const std::string name : {"fig8.json", "punctured_torus.json"}) {
        CAPTURE(name);
        const ParsedInput input = load(name);
        const Placement placement =
            place_vertices(input.triangulation, input.cocycle, input.peripheral, {});
        const DevelopedChain from0 =
            develop(input.triangulation, input.cocycle, placement, {0});
        const DevelopedChain from1 =
            develop(input.triangulation, input.cocycle, placement, {1});
        CHECK(from1.max_witness <= 1e-9);
        for (size_t i = 0; i < from0.entries.size(); ++i) {
            const double v0 = simplex_volume(
                GeodesicSimplex{input.triangulation.dimension, from0.entries[i].tuple}, tol)
                .value;
            const double v1 = simplex_volume(
                GeodesicSimplex{input.triangulation.dimension, from1.entries[i].tuple}, tol)
                .value;
            CHECK(std::abs(v0 - v1) <= 2.0 * tol);
        }
    }
}

TEST_CASE("develop: equivariance witness flags a perturbed cocycle") {
    ParsedInput input = load("fig8.json");
    input.cocycle.forward[2].b += 1e-3;
    const Placement placement =
        place_vertices(input.triangulation, input.cocycle, input.peripheral, {});
    const DevelopedChain chain = develop(input.triangulation, input.cocycle, placement);
    CHECK(chain.max_witness >= 1e-4);
    CHECK(!chain.worst_witness_label.empty());
}

TEST_CASE("place_vertices: an end with no boundary fixed point is a reported failure") {
    // an elliptic rotation of the half-plane fixes no ideal point, so no cone
    // placement exists for an end declared with it
    ParsedInput input = load("punctured_torus.json");
    const double t = 0.5;
    input.peripheral.by_vertex[0] = {
        Isometry(2, std::cos(t), -std::sin(t), std::sin(t), std::cos(t))};
    CHECK_THROWS_AS(
        place_vertices(input.triangulation, input.cocycle, input.peripheral, {}),
        validation_error);
}

TEST_CASE("develop: punctured torus chain has area 2 pi") {
    const ParsedInput input = load("punctured_torus.json");
    const Placement placement =
        place_vertices(input.triangulation, input.cocycle, input.peripheral, {});
    const DevelopedChain chain = develop(input.triangulation, input.cocycle, placement);
    CHECK(chain.max_witness <= 1e-12);
    CHECK(std::abs(std::abs(chain_volume(input.triangulation, chain, 1e-12)) - 2.0 * kPi) <=
          1e-10);
}
