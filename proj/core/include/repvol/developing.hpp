#ifndef REPVOL_DEVELOPING_HPP
#define REPVOL_DEVELOPING_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "repvol/triangulation.hpp"

// The straightened pseudo-developing map at the level of vertex tuples:
// equivariant placement of vertex lifts (ideal vertices at their ends' fixed
// boundary points, finite vertices freely) and propagation across the
// triangulation along a dual spanning tree.

namespace repvol {

struct PlacementPolicy {
    enum class Mode { canonical, random };
    Mode mode = Mode::canonical;
    std::uint64_t seed = 0;
    double radius = 0.5;  // Klein-ball radius for random interior points, in (0, 1)
};

// Base point for the chosen lift of each quotient vertex.
struct Placement {
    std::map<int, ExtendedPoint> by_vertex;  // vertex id -> point
};

// Ideal vertices are pinned to their common fixed boundary points, finite
// vertices go to the Klein origin (canonical) or to a seeded uniform point
// in the Klein ball of the policy radius. Deterministic for a fixed seed.
Placement place_vertices(const Triangulation& t, const TransitionCocycle& c,
                         const PeripheralData& p, const PlacementPolicy& policy);

struct DevelopedEntry {
    int simplex;  // simplex index
    int sign;
    std::vector<ExtendedPoint> tuple;  // n + 1 developed vertex positions
};

struct DevelopedChain {
    std::vector<DevelopedEntry> entries;
    int root = 0;
    std::uint64_t seed = 0;
    // equivariance witness: worst displacement between the two transported
    // placements of a shared face vertex, over all non-tree gluings
    double max_witness = 0.0;
    std::string worst_witness_label;
};

struct DevelopOptions {
    int root = 0;
};

// Develop the fundamental cycle: choose a breadth-first dual spanning tree
// rooted at `root`, give each simplex the frame composed of transitions
// along its tree path, identify vertex lifts across tree faces, and
// propagate placements to the remaining lift classes through the deck
// transformations induced by non-tree gluings.
DevelopedChain develop(const Triangulation& t, const TransitionCocycle& c,
                       const Placement& placement, const DevelopOptions& options = {});

}  // namespace repvol

#endif
