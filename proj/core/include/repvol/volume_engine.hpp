#ifndef REPVOL_VOLUME_ENGINE_HPP
#define REPVOL_VOLUME_ENGINE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "repvol/developing.hpp"
#include "repvol/simplex_volume.hpp"
#include "repvol/triangulation.hpp"

// Top-level computation: the volume of the representation as the signed sum
// of the straightened simplex volumes over the fundamental cycle, plus the
// verification harness (invariance, subdivision, Milnor-Wood bound).

namespace repvol {

struct EngineOptions {
    double tol = 1e-8;
    MethodPolicy method = MethodPolicy::automatic;
    PlacementPolicy placement;
    int root = 0;
    // develop witness above this signals an inconsistent cocycle in strict mode
    double witness_tol = 1e-6;
    bool strict = true;
};

struct VolumeReport {
    double total = 0.0;
    double est_error = 0.0;
    std::vector<VolumeValue> per_simplex;
    int closed_form_count = 0;
    int quadrature_count = 0;
    double max_witness = 0.0;
    PlacementPolicy placement;
    double tol = 0.0;
    int simplex_count = 0;
    std::string input_digest;
};

// Develops with the given placement policy and evaluates each simplex with a
// per-simplex tolerance of tol / N, summing with signs in input order with
// compensated summation. Throws validation_error when the validators or the
// equivariance witness fail (strict mode) and quadrature_error on budget
// exhaustion.
VolumeReport compute_volume(const ParsedInput& input, const EngineOptions& options = {});

struct InvarianceReport {
    std::vector<double> values;
    double max_deviation = 0.0;
    double tol = 0.0;
    bool pass = false;
};

// Runs compute_volume under `samples` random placement policies with seeds
// derived from `seed`; PASS iff the max pairwise deviation is <= 10 tol.
InvarianceReport invariance_test(const ParsedInput& input, int samples,
                                 std::uint64_t seed, double tol);

struct SubdivisionReport {
    double before = 0.0;
    double after = 0.0;
    double delta = 0.0;
    int subdivided_count = 0;
    double tol = 0.0;
    bool pass = false;
};

// Compares the volume before and after one barycentric subdivision under
// canonical placement; PASS iff |delta| <= 10 tol N_subdivided.
SubdivisionReport subdivision_test(const ParsedInput& input, double tol);

struct MilnorWoodReport {
    double bound = 0.0;  // N v_n
    double ratio = 0.0;  // |total| / bound
    bool pass = false;
};

MilnorWoodReport milnor_wood_report(const VolumeReport& report, int dimension, int simplices);

// FNV-1a 64-bit digest of the input bytes, as 16 hex digits.
std::string input_digest(std::string_view bytes);

// Deterministic single-document JSON renderings (schema_version 1).
std::string to_json(const VolumeReport& report);
std::string to_json(const InvarianceReport& report);
std::string to_json(const SubdivisionReport& report);
std::string to_json(const MilnorWoodReport& report, const VolumeReport& volume);
std::string to_json(const CocycleReport& cocycle, const PeripheralReport& peripheral);

}  // namespace repvol

#endif
