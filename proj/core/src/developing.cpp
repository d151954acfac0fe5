#include "repvol/developing.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>

namespace repvol {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// portable uniform double in [0, 1)
double unit_double(std::uint64_t& state) {
    state = splitmix64(state);
    return static_cast<double>(state >> 11) * 0x1.0p-53;
}

ExtendedPoint random_ball_point(int dimension, std::uint64_t seed, double radius) {
    std::uint64_t state = seed;
    KleinPoint k{0.0, 0.0, 0.0};
    for (;;) {
        double r2 = 0.0;
        for (int i = 0; i < dimension; ++i) {
            k[i] = 2.0 * unit_double(state) - 1.0;
            r2 += k[i] * k[i];
        }
        if (r2 <= 1.0 && r2 > 1e-12) break;
    }
    // uniform in the ball of the given radius
    double norm = 0.0;
    for (int i = 0; i < dimension; ++i) norm += k[i] * k[i];
    norm = std::sqrt(norm);
    const double u = unit_double(state);
    const double target = radius * std::pow(u, 1.0 / dimension);
    for (int i = 0; i < dimension; ++i) k[i] *= target / norm;
    return from_klein(dimension, k);
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int size) : parent(size) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int x, int y) { parent[find(x)] = find(y); }
};

}  // namespace

Placement place_vertices(const Triangulation& t, const TransitionCocycle& c,
                         const PeripheralData& p, const PlacementPolicy& policy) {
    if (!(policy.radius > 0.0 && policy.radius < 1.0))
        throw validation_error("placement radius must lie in (0, 1)");
    const PeripheralReport report = verify_peripheral(t, c, p, 1e-9);
    if (!report.pass) {
        std::string msg = "peripheral verification failed:";
        for (const PeripheralResult& r : report.entries)
            if (!r.error.empty())
                msg += " vertex " + std::to_string(r.vertex_id) + ": " + r.error + ";";
        throw validation_error(msg);
    }

    Placement placement;
    for (const VertexInfo& v : t.vertices) {
        if (v.ideal) {
            placement.by_vertex.emplace(v.id, *report.find(v.id)->fixed_point);
        } else if (policy.mode == PlacementPolicy::Mode::canonical) {
            placement.by_vertex.emplace(v.id, from_klein(t.dimension, {0.0, 0.0, 0.0}));
        } else {
            const std::uint64_t seed =
                splitmix64(policy.seed) ^ splitmix64(static_cast<std::uint64_t>(v.id) + 1);
            placement.by_vertex.emplace(
                v.id, random_ball_point(t.dimension, seed, policy.radius));
        }
    }
    return placement;
}

DevelopedChain develop(const Triangulation& t, const TransitionCocycle& c,
                       const Placement& placement, const DevelopOptions& options) {
    const int n = t.dimension;
    const int simplex_count = static_cast<int>(t.simplices.size());
    if (options.root < 0 || options.root >= simplex_count)
        throw validation_error("develop: root simplex out of range");
    for (const VertexInfo& v : t.vertices)
        if (!placement.by_vertex.count(v.id))
            throw validation_error("develop: missing placement for vertex " +
                                   std::to_string(v.id));

    // breadth-first dual spanning tree and per-simplex frames
    std::vector<Isometry> frame(simplex_count, Isometry::identity(n));
    std::vector<bool> seen(simplex_count, false);
    std::vector<bool> tree_gluing(t.gluings.size(), false);
    std::deque<int> queue;
    seen[options.root] = true;
    queue.push_back(options.root);
    while (!queue.empty()) {
        const int s = queue.front();
        queue.pop_front();
        for (int f = 0; f <= n; ++f) {
            const GluingSlot slot{s, f};
            const GluingSlot into = t.partner(slot);
            if (seen[into.simplex]) continue;
            seen[into.simplex] = true;
            tree_gluing[t.slot_gluing[s][f].first] = true;
            frame[into.simplex] = frame[s] * c.crossing(t, slot);
            queue.push_back(into.simplex);
        }
    }
    for (int s = 0; s < simplex_count; ++s)
        if (!seen[s]) throw validation_error("develop: dual graph is disconnected");

    // vertex lift classes under tree-face identifications
    UnionFind classes(simplex_count * (n + 1));
    for (size_t gi = 0; gi < t.gluings.size(); ++gi) {
        if (!tree_gluing[gi]) continue;
        const GluingInfo& g = t.gluings[gi];
        for (int pos = 0; pos <= n; ++pos)
            if (pos != g.from.face)
                classes.unite(g.from.simplex * (n + 1) + pos,
                              g.to.simplex * (n + 1) + g.forward_pos[pos]);
    }

    // canonical class per quotient vertex: smallest member (simplex, position)
    std::map<int, int> canonical_root;  // vertex id -> class root
    std::vector<int> vertex_of_class(simplex_count * (n + 1), -1);
    for (int s = 0; s < simplex_count; ++s) {
        for (int pos = 0; pos <= n; ++pos) {
            const int root = classes.find(s * (n + 1) + pos);
            const int vid = t.simplices[s].vertices[pos];
            vertex_of_class[root] = vid;
            canonical_root.try_emplace(vid, root);
        }
    }

    // deck transformations of the non-tree gluings connect the lift classes
    struct DeckEdge {
        int class_a, class_b;
        Isometry delta;  // position(a) = delta * position(b)
    };
    std::vector<DeckEdge> edges;
    for (size_t gi = 0; gi < t.gluings.size(); ++gi) {
        if (tree_gluing[gi]) continue;
        const GluingInfo& g = t.gluings[gi];
        const Isometry delta =
            frame[g.from.simplex] * c.forward[gi] * frame[g.to.simplex].inverse();
        for (int pos = 0; pos <= n; ++pos) {
            if (pos == g.from.face) continue;
            edges.push_back({classes.find(g.from.simplex * (n + 1) + pos),
                             classes.find(g.to.simplex * (n + 1) + g.forward_pos[pos]),
                             delta});
        }
    }

    // spanning potentials over the class graph: pos(c) = psi(c) * pos(base(c));
    // the leftover edges give the loop stabilizer of each base class
    std::map<int, Isometry> psi;
    std::map<int, int> base_of;  // class root -> base class of its component
    std::map<int, std::vector<Isometry>> loops;
    for (const auto& [vid, root] : canonical_root) {
        psi.emplace(root, Isometry::identity(n));
        base_of.emplace(root, root);
    }
    for (bool progress = true; progress;) {
        progress = false;
        for (const DeckEdge& e : edges) {
            const bool have_a = psi.count(e.class_a);
            const bool have_b = psi.count(e.class_b);
            if (!have_a && !have_b) continue;
            if (have_a && have_b) continue;
            if (have_b) {
                psi.emplace(e.class_a, e.delta * psi.at(e.class_b));
                base_of.emplace(e.class_a, base_of.at(e.class_b));
            } else {
                psi.emplace(e.class_b, e.delta.inverse() * psi.at(e.class_a));
                base_of.emplace(e.class_b, base_of.at(e.class_a));
            }
            progress = true;
        }
    }
    // isolated classes anchor their own component
    for (int s = 0; s < simplex_count; ++s)
        for (int pos = 0; pos <= n; ++pos) {
            const int root = classes.find(s * (n + 1) + pos);
            if (!psi.count(root)) {
                psi.emplace(root, Isometry::identity(n));
                base_of.emplace(root, root);
            }
        }
    for (const DeckEdge& e : edges) {
        // pos(a) = delta pos(b) and pos = psi pos(base) force the loop
        // element psi(a)^-1 delta psi(b) to fix the base point
        const Isometry loop = psi.at(e.class_a).inverse() * e.delta * psi.at(e.class_b);
        if (loop.distance_to_identity() > 1e-13)
            loops[base_of.at(e.class_a)].push_back(loop);
    }

    DevelopedChain chain;
    chain.root = options.root;

    // base points: an ideal lift class must sit at a boundary point fixed by
    // its own loop stabilizer (a conjugate of the declared peripheral
    // holonomy); without loop constraints the placement point is free
    std::map<int, ExtendedPoint> base_point;
    for (const auto& [root, base] : base_of) {
        if (root != base || base_point.count(base)) continue;
        const int vid = vertex_of_class[base];
        const bool ideal = t.vertices[t.vertex_index(vid)].ideal;
        const auto it = loops.find(base);
        if (!ideal || it == loops.end() || it->second.empty()) {
            base_point.emplace(base, placement.by_vertex.at(vid));
            continue;
        }
        try {
            base_point.emplace(base, common_fixed_point(it->second, 1e-9));
        } catch (const geometry_error&) {
            // keep a best-effort fixed point; the displacement shows up in
            // the equivariance witness instead of aborting the run
            ExtendedPoint candidate = placement.by_vertex.at(vid);
            for (const Isometry& g : it->second) {
                if (classify(g).type == IsometryType::identity) continue;
                const auto fixed = fixed_points(g);
                if (!fixed.empty()) {
                    candidate = fixed.front();
                    break;
                }
            }
            double residual = 0.0;
            for (const Isometry& g : it->second)
                residual = std::max(residual, chordal_distance(act(g, candidate), candidate));
            base_point.emplace(base, candidate);
            if (residual > chain.max_witness) {
                chain.max_witness = residual;
                chain.worst_witness_label =
                    "end at vertex " + std::to_string(vid) + ": no common fixed point";
            }
        }
    }

    std::map<int, ExtendedPoint> class_position;
    for (const auto& [root, base] : base_of)
        class_position.emplace(root, act(psi.at(root), base_point.at(base)));
    for (int s = 0; s < simplex_count; ++s) {
        DevelopedEntry entry;
        entry.simplex = s;
        entry.sign = t.simplices[s].sign;
        for (int pos = 0; pos <= n; ++pos)
            entry.tuple.push_back(class_position.at(classes.find(s * (n + 1) + pos)));
        chain.entries.push_back(std::move(entry));
    }

    // equivariance witness over the non-tree gluings; tree faces agree
    // exactly because glued positions share a lift class
    for (size_t gi = 0; gi < t.gluings.size(); ++gi) {
        if (tree_gluing[gi]) continue;
        const GluingInfo& g = t.gluings[gi];
        const Isometry delta =
            frame[g.from.simplex] * c.forward[gi] * frame[g.to.simplex].inverse();
        for (int pos = 0; pos <= n; ++pos) {
            if (pos == g.from.face) continue;
            const ExtendedPoint& a =
                chain.entries[g.from.simplex].tuple[static_cast<size_t>(pos)];
            const ExtendedPoint& b =
                chain.entries[g.to.simplex].tuple[static_cast<size_t>(g.forward_pos[pos])];
            const double d = chordal_distance(a, act(delta, b));
            if (d > chain.max_witness) {
                chain.max_witness = d;
                std::ostringstream label;
                label << "gluing " << gi << " between simplex " << t.simplices[g.from.simplex].id
                      << " and simplex " << t.simplices[g.to.simplex].id << " at position "
                      << pos;
                chain.worst_witness_label = label.str();
            }
        }
    }
    return chain;
}

}  // namespace repvol
