#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "repvol/developing.hpp"
#include "repvol/simplex_volume.hpp"
#include "repvol/special_functions.hpp"
#include "repvol/volume_engine.hpp"

using namespace repvol;

namespace {

constexpr double kPi = std::numbers::pi;

std::string read_data_file(const std::string& name) {
    std::ifstream in(std::string(REPVOL_DATA_DIR) + "/" + name, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

const ParsedInput& fig8() {
    static const ParsedInput input = parse_input(read_data_file("fig8.json"));
    return input;
}

GeodesicSimplex mixed_tetrahedron() {
    // one ideal and three interior vertices; quadrature path
    return GeodesicSimplex{3,
                           {ExtendedPoint::ideal3({0.2, 0.4}),
                            ExtendedPoint::interior3(1.0, 0.1, 0.8),
                            ExtendedPoint::interior3(-0.3, 0.5, 1.2),
                            ExtendedPoint::interior3(0.1, -0.6, 0.5)}};
}

GeodesicSimplex regular_ideal() {
    return GeodesicSimplex{3,
                           {ExtendedPoint::ideal3({0.0, 0.0}), ExtendedPoint::ideal3({1.0, 0.0}),
                            ExtendedPoint::infinity(3),
                            ExtendedPoint::ideal3(std::polar(1.0, kPi / 3.0))}};
}

}  // namespace

static void BM_Lobachevsky(benchmark::State& state) {
    double theta = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(lobachevsky(theta));
        theta += 1e-6;
    }
}
BENCHMARK(BM_Lobachevsky);

static void BM_BlochWigner(benchmark::State& state) {
    std::complex<double> z{0.3, 0.9};
    for (auto _ : state) {
        benchmark::DoNotOptimize(bloch_wigner(z));
        z += std::complex<double>{1e-9, 1e-9};
    }
}
BENCHMARK(BM_BlochWigner);

static void BM_IdealVolumeClosedForm(benchmark::State& state) {
    const GeodesicSimplex s = regular_ideal();
    for (auto _ : state) benchmark::DoNotOptimize(simplex_volume(s, 1e-9));
}
BENCHMARK(BM_IdealVolumeClosedForm);

static void BM_VolumeQuadrature(benchmark::State& state) {
    const GeodesicSimplex s = mixed_tetrahedron();
    const double tol = std::pow(10.0, -state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(simplex_volume(s, tol, MethodPolicy::quadrature));
}
BENCHMARK(BM_VolumeQuadrature)->Arg(5)->Arg(6)->Arg(7)->Arg(8);

static void BM_ValidateCocycle(benchmark::State& state) {
    const ParsedInput& input = fig8();
    for (auto _ : state)
        benchmark::DoNotOptimize(validate_cocycle(input.triangulation, input.cocycle, 1e-9));
}
BENCHMARK(BM_ValidateCocycle);

static void BM_Develop(benchmark::State& state) {
    const ParsedInput& input = fig8();
    const Placement placement =
        place_vertices(input.triangulation, input.cocycle, input.peripheral, {});
    for (auto _ : state)
        benchmark::DoNotOptimize(develop(input.triangulation, input.cocycle, placement));
}
BENCHMARK(BM_Develop);

static void BM_ComputeVolumeFig8(benchmark::State& state) {
    const ParsedInput& input = fig8();
    for (auto _ : state) benchmark::DoNotOptimize(compute_volume(input, {}));
}
BENCHMARK(BM_ComputeVolumeFig8);

static void BM_ComputeVolumeSubdivided(benchmark::State& state) {
    ParsedInput sub;
    std::tie(sub.triangulation, sub.cocycle) =
        barycentric_subdivide(fig8().triangulation, fig8().cocycle);
    sub.peripheral = fig8().peripheral;
    EngineOptions options;
    options.tol = 1e-7;
    options.placement.mode = PlacementPolicy::Mode::random;
    options.placement.seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(compute_volume(sub, options));
}
BENCHMARK(BM_ComputeVolumeSubdivided);

static void BM_BarycentricSubdivide(benchmark::State& state) {
    const ParsedInput& input = fig8();
    for (auto _ : state)
        benchmark::DoNotOptimize(barycentric_subdivide(input.triangulation, input.cocycle));
}
BENCHMARK(BM_BarycentricSubdivide);

BENCHMARK_MAIN();
