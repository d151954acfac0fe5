#ifndef REPVOL_TRIANGULATION_HPP
#define REPVOL_TRIANGULATION_HPP

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "repvol/geometry.hpp"

// Triangulations of the end compactification: simplices, face gluings with
// vertex bijections, ideal/finite vertex flags, orientation signs, and the
// transition cocycle carrying the representation on face gluings.

namespace repvol {

class parse_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class validation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct VertexInfo {
    int id;
    bool ideal;
};

struct SimplexInfo {
    int id;
    std::vector<int> vertices;  // n + 1 vertex ids
    int sign;                   // +1 or -1
};

struct GluingSlot {
    int simplex;  // simplex index (not id)
    int face;     // face opposite this vertex position
    bool operator==(const GluingSlot&) const = default;
};

// One face identification, listed once; the reverse slot is implied. The
// vertex_map lists, for the from-face positions in ascending order (all
// positions except from.face), the glued position in the to-simplex.
struct GluingInfo {
    GluingSlot from, to;
    std::vector<int> vertex_map;             // n entries
    std::optional<std::string> word;         // set when given as a word
    std::array<int, 4> forward_pos = {};     // position map from -> to (full, from.face -> to.face)
    std::array<int, 4> backward_pos = {};    // inverse map
};

struct Triangulation {
    int dimension = 3;
    std::vector<VertexInfo> vertices;
    std::vector<SimplexInfo> simplices;
    std::vector<GluingInfo> gluings;

    // slot -> (gluing index, true when the slot is the 'from' side);
    // indexed [simplex][face]
    std::vector<std::array<std::pair<int, bool>, 4>> slot_gluing;

    int vertex_index(int id) const;
    int simplex_index(int id) const;
    int faces_per_simplex() const { return dimension + 1; }

    // partner slot and the position of vertex-position i after crossing
    GluingSlot partner(GluingSlot slot) const;
    int glued_position(GluingSlot slot, int position) const;
};

// Transition per gluing in the listed (forward) direction; crossing a face
// from the 'from' simplex into the 'to' simplex applies the stored isometry,
// the reverse crossing its inverse.
struct TransitionCocycle {
    std::vector<Isometry> forward;  // one per gluing

    // isometry applied when crossing out of slot into its partner
    Isometry crossing(const Triangulation& t, GluingSlot slot) const;
};

// Declared generators of each ideal end's holonomy, keyed by vertex id.
struct PeripheralData {
    std::map<int, std::vector<Isometry>> by_vertex;
};

struct FundamentalCycle {
    std::vector<std::pair<int, int>> entries;  // (simplex index, sign)
};

struct ParsedInput {
    Triangulation triangulation;
    TransitionCocycle cocycle;
    PeripheralData peripheral;
    std::map<std::string, Isometry> generators;
};

// Parse and eagerly validate the JSON input format. Throws parse_error with
// a path-addressed message on schema violations and validation_error on
// structural invariant failures.
ParsedInput parse_input(std::string_view bytes);

// Canonical JSON serialization; parse_input(serialize(x)) round-trips.
std::string serialize(const ParsedInput& input);

// Per codimension-2 face class residual of the transition holonomy around
// the face loop. For n = 2 the codimension-2 faces are vertex corners; the
// identity requirement applies at finite vertices only, since the loop
// around an ideal vertex is peripheral rather than null-homotopic.
struct EdgeResidual {
    int class_id;
    std::string label;
    double residual;
};

struct CocycleReport {
    std::vector<EdgeResidual> residuals;
    double max_residual = 0.0;
    double tol = 0.0;
    bool pass = true;
};

CocycleReport validate_cocycle(const Triangulation& t, const TransitionCocycle& c,
                               double tol);

// Signed simplex list with combinatorially exact boundary cancellation.
// Throws validation_error naming the offending face pair when the complex is
// non-orientable or mis-signed.
FundamentalCycle fundamental_cycle(const Triangulation& t);

struct PeripheralResult {
    int vertex_id;
    std::optional<ExtendedPoint> fixed_point;
    std::string error;  // empty on success
};

struct PeripheralReport {
    std::vector<PeripheralResult> entries;
    bool pass = true;

    const PeripheralResult* find(int vertex_id) const;
};

// Common fixed point of each ideal vertex's declared peripheral isometries.
PeripheralReport verify_peripheral(const Triangulation& t, const TransitionCocycle& c,
                                   const PeripheralData& p, double tol);

// Standard barycentric subdivision with induced transitions: faces interior
// to an old simplex get the identity, subdivided boundary faces inherit the
// old transition. Original vertices keep their ids and flags; cell
// barycenters become finite vertices.
std::pair<Triangulation, TransitionCocycle> barycentric_subdivide(
    const Triangulation& t, const TransitionCocycle& c);

// Evaluate whitespace-separated words (name, name^-1, name^k) left-to-right
// over named generator isometries, one word per gluing.
TransitionCocycle word_to_cocycle(const Triangulation& t,
                                  const std::map<std::string, Isometry>& generators,
                                  const std::vector<std::string>& face_words);

Isometry evaluate_word(std::string_view word,
                       const std::map<std::string, Isometry>& generators, int dimension);

}  // namespace repvol

#endif
