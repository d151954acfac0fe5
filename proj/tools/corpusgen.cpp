// Generates the data/ corpus: triangulations of the figure-eight knot
// complement (two regular ideal tetrahedra) and of the once-punctured torus
// (two ideal triangles, commutator subgroup of the modular group), together
// with word-form and upper-triangular variants. The face pairings are found
// by matching Mobius maps between the faces of an explicit fundamental
// domain and certified internally: edge conditions, orientation, first
// homology (Smith form over the side-pairing presentation), peripheral
// holonomy, and the computed volume.

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "repvol/developing.hpp"
#include "repvol/simplex_volume.hpp"
#include "repvol/special_functions.hpp"
#include "repvol/triangulation.hpp"
#include "repvol/volume_engine.hpp"

using namespace repvol;

namespace {

constexpr double kPi = std::numbers::pi;

int checks_failed = 0;

void expect(bool ok, const std::string& what) {
    std::printf("  [%s] %s\n", ok ? "ok" : "FAIL", what.c_str());
    if (!ok) ++checks_failed;
}

// --- projective boundary points and Mobius matching ----------------------

struct Proj {
    Complex p, q;  // boundary point p/q
};

Proj proj_of(const ExtendedPoint& x) {
    if (x.at_infinity) return {Complex{1.0}, Complex{0.0}};
    return {x.z, Complex{1.0}};
}

// the Mobius map sending (a, b, c) to (0, 1, infinity), as an unnormalized
// matrix over C
std::array<Complex, 4> to_normal_form(const Proj& a, const Proj& b, const Proj& c) {
    const Complex lam = (c.q * b.p - c.p * b.q);
    const Complex mu = (a.q * b.p - a.p * b.q);
    // numerator lam*(qa z - pa), denominator mu*(qc z - pc)
    return {lam * a.q, -lam * a.p, mu * c.q, -mu * c.p};
}

std::array<Complex, 4> mat_mul(const std::array<Complex, 4>& x, const std::array<Complex, 4>& y) {
    return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
            x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
}

std::array<Complex, 4> mat_inv(const std::array<Complex, 4>& x) {
    return {x[3], -x[1], -x[2], x[0]};
}

// unique Mobius map with gamma(src[i]) = dst[i]; empty when it fails to be
// an orientation-preserving isometry of the model (n = 2: non-real)
std::optional<Isometry> mobius_through(int dimension, const std::array<ExtendedPoint, 3>& src,
                                       const std::array<ExtendedPoint, 3>& dst) {
    const auto ms = to_normal_form(proj_of(src[0]), proj_of(src[1]), proj_of(src[2]));
    const auto md = to_normal_form(proj_of(dst[0]), proj_of(dst[1]), proj_of(dst[2]));
    const auto m = mat_mul(mat_inv(md), ms);
    const Complex det = m[0] * m[3] - m[1] * m[2];
    if (std::abs(det) < 1e-12) return std::nullopt;
    const Complex s = std::sqrt(det);
    try {
        return Isometry(dimension, m[0] / s, m[1] / s, m[2] / s, m[3] / s, 1e-9);
    } catch (const geometry_error&) {
        return std::nullopt;  // non-real entries for n = 2
    }
}

double side_of_face(const std::array<ExtendedPoint, 3>& face, const ExtendedPoint& x) {
    const KleinPoint k0 = to_klein(face[0]);
    const KleinPoint k1 = to_klein(face[1]);
    const KleinPoint k2 = to_klein(face[2]);
    const KleinPoint kx = to_klein(x);
    double e1[3], e2[3], e3[3];
    for (int i = 0; i < 3; ++i) {
        e1[i] = k1[i] - k0[i];
        e2[i] = k2[i] - k0[i];
        e3[i] = kx[i] - k0[i];
    }
    return e1[0] * (e2[1] * e3[2] - e2[2] * e3[1]) - e1[1] * (e2[0] * e3[2] - e2[2] * e3[0]) +
           e1[2] * (e2[0] * e3[1] - e2[1] * e3[0]);
}

bool points_close(const ExtendedPoint& a, const ExtendedPoint& b, double tol = 1e-9) {
    return chordal_distance(a, b) <= tol;
}

// --- edge relations in the side-pairing generators ------------------------

// Walk every codimension-2 class and record the crossings as signed letters
// indexed by gluing. Gluings whose transition is the identity contribute no
// letter (they are interior to the fundamental domain).
std::vector<std::vector<int>> edge_relation_vectors(const Triangulation& t,
                                                    const std::set<int>& letter_gluings) {
    const int n = t.dimension;
    std::vector<std::vector<int>> relations;
    std::vector<std::vector<bool>> visited(t.simplices.size(),
                                           std::vector<bool>(1 << (n + 1), false));
    std::vector<int> masks;
    for (int m = 1; m < (1 << (n + 1)); ++m)
        if (__builtin_popcount(static_cast<unsigned>(m)) == n - 1) masks.push_back(m);

    auto first_exit = [&](int mask, int exclude) {
        for (int f = 0; f <= n; ++f)
            if (!(mask >> f & 1) && f != exclude) return f;
        return -1;
    };

    for (size_t si = 0; si < t.simplices.size(); ++si) {
        for (int mask : masks) {
            if (visited[si][mask]) continue;
            std::vector<int> coeffs(t.gluings.size(), 0);
            GluingSlot slot{static_cast<int>(si), first_exit(mask, -1)};
            int cur_mask = mask;
            const GluingSlot start = slot;
            const int start_mask = mask;
            do {
                visited[slot.simplex][cur_mask] = true;
                const auto [gi, fwd] = t.slot_gluing[slot.simplex][slot.face];
                if (letter_gluings.count(gi)) coeffs[gi] += fwd ? 1 : -1;
                const GluingSlot into = t.partner(slot);
                int new_mask = 0;
                for (int f = 0; f <= n; ++f)
                    if (cur_mask >> f & 1) new_mask |= 1 << t.glued_position(slot, f);
                slot = {into.simplex, first_exit(new_mask, into.face)};
                cur_mask = new_mask;
            } while (!(slot == start && cur_mask == start_mask));
            relations.push_back(std::move(coeffs));
        }
    }
    return relations;
}

// invariant factors of an integer matrix (rows = relations), for first
// homology of <generators | relations>
struct Homology {
    int free_rank;
    std::vector<long> torsion;  // invariant factors > 1
};

Homology abelianization(std::vector<std::vector<long>> m, int generators) {
    // Smith normal form by elementary operations (small matrices only)
    const int rows = static_cast<int>(m.size());
    const int cols = generators;
    int r = 0, c = 0;
    std::vector<long> diag;
    while (r < rows && c < cols) {
        int pr = -1, pc = -1;
        long best = 0;
        for (int i = r; i < rows; ++i)
            for (int j = c; j < cols; ++j)
                if (m[i][j] != 0 && (best == 0 || std::labs(m[i][j]) < best)) {
                    best = std::labs(m[i][j]);
                    pr = i;
                    pc = j;
                }
        if (pr < 0) break;
        std::swap(m[r], m[pr]);
        for (auto& row : m) std::swap(row[c], row[pc]);
        bool clean = true;
        for (int i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            const long f = m[i][c] / m[r][c];
            for (int j = 0; j < cols; ++j) m[i][j] -= f * m[r][j];
            if (m[i][c] != 0) clean = false;
        }
        for (int j = 0; j < cols; ++j) {
            if (j == c || m[r][j] == 0) continue;
            const long f = m[r][j] / m[r][c];
            for (int i = 0; i < rows; ++i) m[i][j] -= f * m[i][c];
            if (m[r][j] != 0) clean = false;
        }
        if (!clean) continue;
        diag.push_back(std::labs(m[r][c]));
        ++r;
        ++c;
    }
    Homology h;
    h.free_rank = cols - static_cast<int>(diag.size());
    for (long d : diag)
        if (d > 1) h.torsion.push_back(d);
    return h;
}

// --- figure-eight construction -------------------------------------------

struct DomainTetra {
    std::array<ExtendedPoint, 4> verts;
};

struct ExternalFace {
    int tetra;                          // 0 or 1
    int face;                           // opposite position
    std::array<int, 3> positions;       // ascending
    std::array<ExtendedPoint, 3> geom;  // geometric vertices
};

struct PairingCandidate {
    int fa, fb;            // external face indices
    std::array<int, 3> ba; // bijection: geom index of fa -> geom index of fb
    Isometry gamma;        // gamma(face fa) = face fb pointwise
};

struct BuiltComplex {
    ParsedInput input;
    std::vector<int> external_gluings;  // gluing indices carrying letters
};

std::optional<BuiltComplex> build_complex(int dimension,
                                          const std::vector<DomainTetra>& tetra,
                                          const std::vector<std::pair<GluingSlot, GluingSlot>>& internal,
                                          const std::vector<PairingCandidate>& pairing,
                                          const std::vector<ExternalFace>& faces) {
    const int n = dimension;
    ParsedInput out;
    Triangulation& t = out.triangulation;
    t.dimension = n;
    t.vertices.push_back({0, true});
    for (size_t i = 0; i < tetra.size(); ++i) {
        SimplexInfo s;
        s.id = static_cast<int>(i);
        s.vertices.assign(n + 1, 0);
        std::vector<ExtendedPoint> vs(tetra[i].verts.begin(), tetra[i].verts.begin() + n + 1);
        const double det = klein_orientation(GeodesicSimplex{n, vs});
        s.sign = det > 0.0 ? 1 : -1;
        t.simplices.push_back(std::move(s));
    }

    // internal faces: identity transitions, geometric vertex matching
    for (const auto& [sa, sb] : internal) {
        GluingInfo g;
        g.from = sa;
        g.to = sb;
        for (int pos = 0; pos <= n; ++pos) {
            if (pos == sa.face) continue;
            const ExtendedPoint& v = tetra[sa.simplex].verts[pos];
            int target = -1;
            for (int q = 0; q <= n; ++q)
                if (q != sb.face && points_close(tetra[sb.simplex].verts[q], v)) target = q;
            if (target < 0) return std::nullopt;
            g.vertex_map.push_back(target);
        }
        t.gluings.push_back(std::move(g));
        out.cocycle.forward.push_back(Isometry::identity(n));
    }

    BuiltComplex built;
    for (const PairingCandidate& cand : pairing) {
        const ExternalFace& A = faces[cand.fa];
        const ExternalFace& B = faces[cand.fb];
        // the gluing is listed from the B side: crossing out of B's tetra
        // through B's face continues into gamma(A's tetra)
        GluingInfo g;
        g.from = {B.tetra, B.face};
        g.to = {A.tetra, A.face};
        const Isometry inv = cand.gamma.inverse();
        for (int pos = 0; pos <= n; ++pos) {
            if (pos == B.face) continue;
            const ExtendedPoint image = act(inv, tetra[B.tetra].verts[pos]);
            int target = -1;
            for (int q = 0; q <= n; ++q)
                if (q != A.face && points_close(tetra[A.tetra].verts[q], image)) target = q;
            if (target < 0) return std::nullopt;
            g.vertex_map.push_back(target);
        }
        built.external_gluings.push_back(static_cast<int>(t.gluings.size()));
        t.gluings.push_back(std::move(g));
        out.cocycle.forward.push_back(cand.gamma);
    }

    try {
        // re-parse through serialize to exercise finalize and the schema
        ParsedInput parsed = parse_input(serialize(out));
        built.input = std::move(parsed);
    } catch (const std::exception&) {
        return std::nullopt;
    }
    return built;
}

std::vector<ExternalFace> external_faces(const std::vector<DomainTetra>& tetra, int n,
                                         const std::vector<std::pair<GluingSlot, GluingSlot>>& internal) {
    std::set<std::pair<int, int>> internal_slots;
    for (const auto& [a, b] : internal) {
        internal_slots.insert({a.simplex, a.face});
        internal_slots.insert({b.simplex, b.face});
    }
    std::vector<ExternalFace> faces;
    for (size_t s = 0; s < tetra.size(); ++s) {
        for (int f = 0; f <= n; ++f) {
            if (internal_slots.count({static_cast<int>(s), f})) continue;
            ExternalFace face;
            face.tetra = static_cast<int>(s);
            face.face = f;
            int k = 0;
            for (int pos = 0; pos <= n; ++pos) {
                if (pos == f) continue;
                face.positions[k] = pos;
                face.geom[k] = tetra[s].verts[pos];
                ++k;
            }
            faces.push_back(std::move(face));
        }
    }
    return faces;
}

// all orientation-preserving side pairings between two external faces
std::vector<PairingCandidate> face_pairings(int n, const std::vector<DomainTetra>& tetra,
                                            const std::vector<ExternalFace>& faces, int fa,
                                            int fb) {
    std::vector<PairingCandidate> out;
    const ExternalFace& A = faces[fa];
    const ExternalFace& B = faces[fb];
    std::array<int, 3> perm = {0, 1, 2};
    std::sort(perm.begin(), perm.end());
    do {
        std::array<ExtendedPoint, 3> dst;
        for (int i = 0; i < 3; ++i) dst[i] = B.geom[perm[i]];
        const auto gamma = mobius_through(n, A.geom, dst);
        if (!gamma) continue;
        // gamma must move A's tetra to the far side of face B
        const ExtendedPoint a4 = tetra[A.tetra].verts[A.face];
        const ExtendedPoint b4 = tetra[B.tetra].verts[B.face];
        const double sa = side_of_face(B.geom, act(*gamma, a4));
        const double sb = side_of_face(B.geom, b4);
        if (!(sa * sb < -1e-12)) continue;
        out.push_back({fa, fb, perm, *gamma});
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out << bytes;
    std::printf("  wrote %s (%zu bytes)\n", path.c_str(), bytes.size());
}

// The figure-eight matrices live in PSL(2, Z[omega]), whose entries sit on
// the lattice (1/2) Z + (sqrt(3)/2) Z i; snap away the construction noise
// when every entry of every matrix lands on the lattice.
std::optional<Complex> snap_entry(Complex v) {
    const double half = 0.5;
    const double s32 = std::sqrt(3.0) / 2.0;
    const double re = std::round(v.real() / half) * half + 0.0;
    const double im = std::round(v.imag() / s32) * s32 + 0.0;
    if (std::abs(re - v.real()) > 1e-9 || std::abs(im - v.imag()) > 1e-9) return std::nullopt;
    return Complex{re, im};
}

bool snap_isometries(std::vector<Isometry>& gs) {
    std::vector<Isometry> snapped;
    for (const Isometry& g : gs) {
        const auto a = snap_entry(g.a);
        const auto b = snap_entry(g.b);
        const auto c = snap_entry(g.c);
        const auto d = snap_entry(g.d);
        if (!a || !b || !c || !d) return false;
        try {
            snapped.emplace_back(g.dimension, *a, *b, *c, *d, 1e-12);
        } catch (const geometry_error&) {
            return false;
        }
    }
    gs = std::move(snapped);
    return true;
}

// parabolic translations fixing infinity among short side-pairing words,
// used as declared peripheral holonomy at the single cusp
std::vector<std::pair<Isometry, Complex>> cusp_translations(const std::vector<Isometry>& gens,
                                                            int max_len) {
    std::vector<Isometry> letters;
    for (const Isometry& g : gens) {
        letters.push_back(g);
        letters.push_back(g.inverse());
    }
    std::vector<std::pair<Isometry, Complex>> found;
    std::vector<Isometry> layer{Isometry::identity(gens.front().dimension)};
    for (int len = 1; len <= max_len; ++len) {
        std::vector<Isometry> next;
        for (const Isometry& w : layer) {
            for (const Isometry& l : letters) {
                const Isometry prod = w * l;
                next.push_back(prod);
                const Isometry m = prod.sign_normalized();
                if (std::abs(m.c) < 1e-9 && std::abs(m.a - 1.0) < 1e-9 &&
                    std::abs(m.d - 1.0) < 1e-9 && std::abs(m.b) > 1e-6) {
                    bool fresh = true;
                    for (const auto& [g, tau] : found)
                        if (std::abs(tau - m.b) < 1e-6 || std::abs(tau + m.b) < 1e-6)
                            fresh = false;
                    if (fresh) found.push_back({m, m.b});
                }
            }
        }
        layer = std::move(next);
        if (layer.size() > 60000) break;
    }
    return found;
}

// breadth-first search for a word in the named generators matching g up to
// sign; returns the word or nothing
std::optional<std::string> word_for(const Isometry& g,
                                    const std::vector<std::pair<std::string, Isometry>>& gens,
                                    int max_len) {
    struct Node {
        Isometry m;
        std::string word;
    };
    std::vector<Node> layer{{Isometry::identity(g.dimension), ""}};
    const Isometry target = g.sign_normalized();
    for (int len = 1; len <= max_len; ++len) {
        std::vector<Node> next;
        for (const Node& node : layer) {
            for (const auto& [name, gen] : gens) {
                for (int dir = 0; dir < 2; ++dir) {
                    Node candidate;
                    candidate.m = dir == 0 ? node.m * gen : node.m * gen.inverse();
                    candidate.word =
                        node.word.empty()
                            ? (dir == 0 ? name : name + "^-1")
                            : node.word + " " + (dir == 0 ? name : name + "^-1");
                    if (candidate.m.sign_normalized().distance_to(target) < 1e-9 ||
                        candidate.m.distance_to(target) < 1e-9)
                        return candidate.word;
                    next.push_back(std::move(candidate));
                }
            }
        }
        layer = std::move(next);
        if (layer.size() > 200000) break;
    }
    return std::nullopt;
}

// solve the abelianized edge relations for a translation-length vector, for
// the upper-triangular variants
std::vector<double> translation_kernel(const std::vector<std::vector<int>>& relations,
                                       const std::vector<int>& letter_gluings_order,
                                       size_t gluing_count) {
    // gather relation matrix over the external letters only
    const int g = static_cast<int>(letter_gluings_order.size());
    std::vector<std::vector<double>> rows;
    for (const auto& rel : relations) {
        std::vector<double> row(g, 0.0);
        bool nonzero = false;
        for (int j = 0; j < g; ++j) {
            row[j] = rel[letter_gluings_order[j]];
            if (row[j] != 0.0) nonzero = true;
        }
        if (nonzero) rows.push_back(std::move(row));
    }
    (void)gluing_count;
    // find a kernel vector by Gaussian elimination
    std::vector<double> m_flat;
    const int r = static_cast<int>(rows.size());
    std::vector<std::vector<double>> m = rows;
    std::vector<int> pivot_col;
    int rank = 0;
    for (int c = 0; c < g && rank < r; ++c) {
        int p = -1;
        for (int i = rank; i < r; ++i)
            if (std::abs(m[i][c]) > 1e-9) {
                p = i;
                break;
            }
        if (p < 0) continue;
        std::swap(m[rank], m[p]);
        for (int i = 0; i < r; ++i) {
            if (i == rank) continue;
            const double f = m[i][c] / m[rank][c];
            for (int j = 0; j < g; ++j) m[i][j] -= f * m[rank][j];
        }
        pivot_col.push_back(c);
        ++rank;
    }
    // free column -> kernel vector
    std::vector<double> x(g, 0.0);
    for (int c = 0; c < g; ++c) {
        if (std::find(pivot_col.begin(), pivot_col.end(), c) != pivot_col.end()) continue;
        x[c] = 1.0;
        for (int i = rank - 1; i >= 0; --i) {
            double s = 0.0;
            for (int j = 0; j < g; ++j)
                if (j != pivot_col[i]) s += m[i][j] * x[j];
            x[pivot_col[i]] = -s / m[i][pivot_col[i]];
        }
        break;
    }
    return x;
}

ParsedInput upper_triangular_variant(const ParsedInput& base,
                                     const std::vector<int>& external,
                                     const std::vector<double>& lengths) {
    ParsedInput out;
    out.triangulation = base.triangulation;
    const int n = out.triangulation.dimension;
    out.cocycle.forward.assign(base.cocycle.forward.size(), Isometry::identity(n));
    for (size_t j = 0; j < external.size(); ++j)
        out.cocycle.forward[external[j]] =
            Isometry(n, 1.0, lengths[j], 0.0, 1.0);
    // peripheral: one nontrivial translation fixing infinity
    double biggest = 0.0;
    for (double l : lengths) biggest = std::max(biggest, std::abs(l));
    const double tau = biggest > 0.0 ? biggest : 1.0;
    out.peripheral.by_vertex[0] = {Isometry(n, 1.0, tau, 0.0, 1.0)};
    return out;
}

// --- punctured torus -------------------------------------------------------

ParsedInput build_torus() {
    // ideal square (-1, 0, 1, inf) for the commutator subgroup of the
    // modular group; side pairings A: (-1, inf) -> (0, 1), B: (1, inf) -> (0, -1)
    const Isometry A(2, 1.0, 1.0, 1.0, 2.0);
    const Isometry B(2, 1.0, -1.0, -1.0, 2.0);

    std::vector<DomainTetra> tiles(2);
    tiles[0].verts = {ExtendedPoint::ideal2(0.0), ExtendedPoint::ideal2(1.0),
                      ExtendedPoint::infinity(2), ExtendedPoint::infinity(2)};
    tiles[1].verts = {ExtendedPoint::ideal2(0.0), ExtendedPoint::infinity(2),
                      ExtendedPoint::ideal2(-1.0), ExtendedPoint::infinity(2)};

    std::vector<std::pair<GluingSlot, GluingSlot>> internal{{{0, 1}, {1, 2}}};
    const auto faces = external_faces(tiles, 2, internal);
    expect(faces.size() == 4, "torus: four external edges");

    // match each known pairing to the edge pair it identifies
    auto candidate_for = [&](const Isometry& gamma) -> std::optional<PairingCandidate> {
        for (int fa = 0; fa < static_cast<int>(faces.size()); ++fa) {
            for (int fb = 0; fb < static_cast<int>(faces.size()); ++fb) {
                if (fa == fb) continue;
                const ExternalFace& src = faces[fa];
                const ExternalFace& dst = faces[fb];
                bool match = true;
                for (int i = 0; i < 2 && match; ++i) {
                    const ExtendedPoint image = act(gamma, src.geom[i]);
                    if (!points_close(image, dst.geom[0]) && !points_close(image, dst.geom[1]))
                        match = false;
                }
                if (!match) continue;
                return PairingCandidate{fa, fb, {0, 1, 2}, gamma};
            }
        }
        return std::nullopt;
    };
    const auto pa = candidate_for(A);
    const auto pb = candidate_for(B);
    expect(pa.has_value() && pb.has_value(), "torus: side pairings match edge pairs");
    if (!pa || !pb) std::exit(1);

    auto built = build_complex(2, tiles, internal, {*pa, *pb}, faces);
    expect(built.has_value(), "torus: complex assembles and validates");
    if (!built) std::exit(1);
    ParsedInput input = built->input;

    // peripheral holonomy: the commutator [A, B]
    const Isometry commutator = A * B * A.inverse() * B.inverse();
    expect(classify(commutator).type == IsometryType::parabolic,
           "torus: [A,B] is parabolic");
    input.peripheral.by_vertex[0] = {commutator};
    return parse_input(serialize(input));
}

}  // namespace

int main(int argc, char** argv) {
    const std::string out_dir = argc > 1 ? argv[1] : "data";

    std::printf("== punctured torus ==\n");
    ParsedInput torus = build_torus();
    {
        const CocycleReport edges = validate_cocycle(torus.triangulation, torus.cocycle, 1e-9);
        expect(edges.pass, "torus: edge conditions");
        fundamental_cycle(torus.triangulation);
        EngineOptions options;
        options.tol = 1e-10;
        const VolumeReport report = compute_volume(torus, options);
        expect(std::abs(std::abs(report.total) - 2.0 * kPi) < 1e-9,
               "torus: |volume| = 2 pi (got " + std::to_string(report.total) + ")");
        write_file(out_dir + "/punctured_torus.json", serialize(torus));

        // upper-triangular variant: no edge constraints beyond the ideal corner
        ParsedInput upper;
        upper.triangulation = torus.triangulation;
        upper.cocycle.forward = {Isometry::identity(2), Isometry(2, 1.0, 1.0, 0.0, 1.0),
                                 Isometry(2, 1.0, -0.75, 0.0, 1.0)};
        upper.peripheral.by_vertex[0] = {Isometry(2, 1.0, 1.0, 0.0, 1.0)};
        upper = parse_input(serialize(upper));
        const VolumeReport ur = compute_volume(upper, options);
        expect(ur.total == 0.0, "torus upper-triangular: volume exactly 0");
        write_file(out_dir + "/punctured_torus_upper.json", serialize(upper));
    }

    std::printf("== figure-eight knot complement ==\n");
    // two adjacent regular ideal tetrahedra of the H^3 tessellation
    const Complex omega = std::polar(1.0, kPi / 3.0);
    std::vector<DomainTetra> tetra(2);
    tetra[0].verts = {ExtendedPoint::ideal3({0.0, 0.0}), ExtendedPoint::ideal3({1.0, 0.0}),
                      ExtendedPoint::ideal3(omega), ExtendedPoint::infinity(3)};
    tetra[1].verts = {ExtendedPoint::ideal3({1.0, 0.0}), ExtendedPoint::ideal3(omega),
                      ExtendedPoint::infinity(3), ExtendedPoint::ideal3(1.0 + omega)};
    // shared face {1, omega, inf}: T0 face 0, T1 face 3
    std::vector<std::pair<GluingSlot, GluingSlot>> internal{{{0, 0}, {1, 3}}};
    const auto faces = external_faces(tetra, 3, internal);
    expect(faces.size() == 6, "fig8: six external faces");

    // candidate pairings per unordered face pair
    std::map<std::pair<int, int>, std::vector<PairingCandidate>> candidates;
    for (int fa = 0; fa < 6; ++fa)
        for (int fb = 0; fb < 6; ++fb) {
            if (fa == fb) continue;
            auto list = face_pairings(3, tetra, faces, fa, fb);
            if (!list.empty()) candidates[{fa, fb}] = std::move(list);
        }

    // perfect matchings of the six faces into three pairs, then every
    // combination of candidate pairings, certified by homology
    std::optional<BuiltComplex> fig8;
    Homology fig8_h{};
    int valid_sets = 0;
    std::vector<std::array<std::pair<int, int>, 3>> matchings;
    {
        std::array<int, 6> ids = {0, 1, 2, 3, 4, 5};
        // enumerate matchings recursively
        std::vector<int> rest(ids.begin(), ids.end());
        std::function<void(std::vector<int>, std::vector<std::pair<int, int>>)> rec =
            [&](std::vector<int> remaining, std::vector<std::pair<int, int>> acc) {
                if (remaining.empty()) {
                    matchings.push_back({acc[0], acc[1], acc[2]});
                    return;
                }
                const int first = remaining[0];
                for (size_t i = 1; i < remaining.size(); ++i) {
                    std::vector<int> next;
                    for (size_t j = 1; j < remaining.size(); ++j)
                        if (j != i) next.push_back(remaining[j]);
                    auto acc2 = acc;
                    acc2.push_back({first, remaining[i]});
                    rec(next, acc2);
                }
            };
        rec(rest, {});
    }
    for (const auto& matching : matchings) {
        std::array<const std::vector<PairingCandidate>*, 3> lists{};
        bool feasible = true;
        for (int k = 0; k < 3; ++k) {
            const auto it = candidates.find({matching[k].first, matching[k].second});
            if (it == candidates.end()) {
                feasible = false;
                break;
            }
            lists[k] = &it->second;
        }
        if (!feasible) continue;
        for (const PairingCandidate& c0 : *lists[0])
            for (const PairingCandidate& c1 : *lists[1])
                for (const PairingCandidate& c2 : *lists[2]) {
                    auto built = build_complex(3, tetra, internal, {c0, c1, c2}, faces);
                    if (!built) continue;
                    const CocycleReport edges =
                        validate_cocycle(built->input.triangulation, built->input.cocycle, 1e-9);
                    if (!edges.pass) continue;
                    try {
                        fundamental_cycle(built->input.triangulation);
                    } catch (const validation_error&) {
                        continue;
                    }
                    ++valid_sets;
                    const std::set<int> letters(built->external_gluings.begin(),
                                                built->external_gluings.end());
                    const auto relations =
                        edge_relation_vectors(built->input.triangulation, letters);
                    std::vector<std::vector<long>> rel_rows;
                    for (const auto& rel : relations) {
                        std::vector<long> row;
                        for (int gi : built->external_gluings) row.push_back(rel[gi]);
                        rel_rows.push_back(std::move(row));
                    }
                    const Homology h = abelianization(rel_rows, 3);
                    if (h.free_rank == 1 && h.torsion.empty() && !fig8) {
                        fig8 = built;
                        fig8_h = h;
                    }
                }
    }
    std::printf("  (%d geometrically valid pairing sets)\n", valid_sets);
    expect(fig8.has_value(), "fig8: found a pairing set with H1 = Z");
    if (!fig8) return 1;
    expect(fig8_h.free_rank == 1 && fig8_h.torsion.empty(), "fig8: H1 = Z certified");

    ParsedInput input = fig8->input;

    // peripheral holonomy at the single cusp: two independent translations
    std::vector<Isometry> pairing_gens;
    for (int gi : fig8->external_gluings) pairing_gens.push_back(input.cocycle.forward[gi]);
    const auto translations = cusp_translations(pairing_gens, 6);
    std::optional<std::pair<Isometry, Isometry>> cusp_pair;
    for (size_t i = 0; i < translations.size() && !cusp_pair; ++i)
        for (size_t j = i + 1; j < translations.size() && !cusp_pair; ++j) {
            const Complex t1 = translations[i].second;
            const Complex t2 = translations[j].second;
            if (std::abs(std::imag(std::conj(t1) * t2)) > 1e-6)
                cusp_pair = {translations[i].first, translations[j].first};
        }
    expect(cusp_pair.has_value(), "fig8: two independent cusp translations found");
    if (cusp_pair) input.peripheral.by_vertex[0] = {cusp_pair->first, cusp_pair->second};
    {
        std::vector<Isometry> all = input.cocycle.forward;
        all.insert(all.end(), input.peripheral.by_vertex[0].begin(),
                   input.peripheral.by_vertex[0].end());
        const bool snapped = snap_isometries(all);
        expect(snapped, "fig8: entries snap to the Eisenstein half-lattice");
        if (snapped) {
            for (size_t i = 0; i < input.cocycle.forward.size(); ++i)
                input.cocycle.forward[i] = all[i];
            input.peripheral.by_vertex[0] = {all[input.cocycle.forward.size()],
                                             all[input.cocycle.forward.size() + 1]};
        }
    }
    input = parse_input(serialize(input));

    {
        EngineOptions options;
        options.tol = 1e-9;
        const VolumeReport report = compute_volume(input, options);
        const double v3 = max_simplex_volume(3);
        expect(std::abs(std::abs(report.total) - 2.0 * v3) < 1e-8,
               "fig8: |volume| = 2 v3 (got " + std::to_string(std::abs(report.total)) + ")");
        const MilnorWoodReport mw = milnor_wood_report(report, 3, report.simplex_count);
        expect(std::abs(mw.ratio - 1.0) < 1e-6, "fig8: Milnor-Wood ratio 1");

        // developed tetrahedra are regular ideal
        const Placement placement =
            place_vertices(input.triangulation, input.cocycle, input.peripheral, {});
        const DevelopedChain chain = develop(input.triangulation, input.cocycle, placement);
        bool regular = true;
        for (const DevelopedEntry& e : chain.entries) {
            const Complex z = cross_ratio(e.tuple[0], e.tuple[1], e.tuple[2], e.tuple[3]);
            const double d1 = std::abs(z - std::polar(1.0, kPi / 3.0));
            const double d2 = std::abs(z - std::polar(1.0, -kPi / 3.0));
            if (std::min(d1, d2) > 1e-9) regular = false;
        }
        expect(regular, "fig8: developed cross-ratios are e^{+-i pi/3}");
        write_file(out_dir + "/fig8.json", serialize(input));
    }

    // word-form variant over the Riley parabolic generators when they
    // express every pairing, otherwise over the pairings themselves
    {
        std::vector<std::pair<std::string, Isometry>> gen_options;
        bool riley_ok = false;
        const Complex omega_exact{0.5, std::sqrt(3.0) / 2.0};
        for (const Complex c : {omega_exact, std::conj(omega_exact), -omega_exact,
                                -std::conj(omega_exact)}) {
            std::vector<std::pair<std::string, Isometry>> gens{
                {"p", Isometry(3, 1.0, 1.0, 0.0, 1.0)},
                {"q", Isometry(3, 1.0, 0.0, c, 1.0)}};
            std::vector<std::string> words;
            bool all = true;
            for (int gi : fig8->external_gluings) {
                const auto w = word_for(input.cocycle.forward[gi], gens, 6);
                if (!w) {
                    all = false;
                    break;
                }
                words.push_back(*w);
            }
            if (all) {
                riley_ok = true;
                gen_options = gens;
                ParsedInput wordy;
                wordy.triangulation = input.triangulation;
                wordy.cocycle = input.cocycle;
                wordy.peripheral = input.peripheral;
                for (const auto& [name, g] : gens) wordy.generators.emplace(name, g);
                size_t wi = 0;
                for (size_t gi = 0; gi < wordy.triangulation.gluings.size(); ++gi) {
                    const bool external =
                        std::find(fig8->external_gluings.begin(), fig8->external_gluings.end(),
                                  static_cast<int>(gi)) != fig8->external_gluings.end();
                    wordy.triangulation.gluings[gi].word = external ? words[wi++] : "";
                }
                const ParsedInput reparsed = parse_input(serialize(wordy));
                bool match = true;
                for (size_t gi = 0; gi < reparsed.cocycle.forward.size(); ++gi)
                    if (reparsed.cocycle.forward[gi].sign_normalized().distance_to(
                            input.cocycle.forward[gi].sign_normalized()) > 1e-9)
                        match = false;
                expect(match, "fig8 words: word cocycle reproduces the matrices up to sign");
                const VolumeReport wr = compute_volume(reparsed, {});
                expect(std::abs(std::abs(wr.total) - 2.0 * max_simplex_volume(3)) < 1e-6,
                       "fig8 words: volume matches");
                write_file(out_dir + "/fig8_words.json", serialize(wordy));
                break;
            }
        }
        expect(riley_ok, "fig8 words: pairings expressed over the parabolic generators");
        (void)gen_options;
    }

    // upper-triangular variant: translation lengths solving the abelianized
    // edge relations
    {
        const std::set<int> letters(fig8->external_gluings.begin(),
                                    fig8->external_gluings.end());
        const auto relations = edge_relation_vectors(input.triangulation, letters);
        const auto lengths = translation_kernel(relations, fig8->external_gluings,
                                                input.triangulation.gluings.size());
        double scale = 0.0;
        for (double l : lengths) scale = std::max(scale, std::abs(l));
        expect(scale > 1e-9, "fig8 upper: nontrivial translation kernel");
        std::vector<double> scaled;
        for (double l : lengths) scaled.push_back(l / scale);
        ParsedInput upper =
            upper_triangular_variant(input, fig8->external_gluings, scaled);
        upper = parse_input(serialize(upper));
        const CocycleReport edges = validate_cocycle(upper.triangulation, upper.cocycle, 1e-9);
        expect(edges.pass, "fig8 upper: edge conditions");
        const VolumeReport ur = compute_volume(upper, {});
        expect(std::abs(ur.total) < 1e-9, "fig8 upper: volume 0");
        write_file(out_dir + "/fig8_upper.json", serialize(upper));
    }

    if (checks_failed) {
        std::printf("%d check(s) FAILED\n", checks_failed);
        return 1;
    }
    std::printf("all corpus checks passed\n");
    return 0;
}
