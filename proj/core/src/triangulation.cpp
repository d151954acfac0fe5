#include "repvol/triangulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace repvol {

namespace {

using nlohmann::json;

// parse-time determinant slack: mildly broken matrices must reach the
// validators instead of dying at the schema layer
constexpr double kParseDetTol = 1e-2;

std::string slot_name(const Triangulation& t, GluingSlot slot) {
    std::ostringstream os;
    os << "(simplex " << t.simplices[slot.simplex].id << ", face " << slot.face << ")";
    return os.str();
}

Complex parse_entry(const json& v, const std::string& path) {
    if (v.is_number()) return Complex{v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return Complex{v[0].get<double>(), v[1].get<double>()};
    throw parse_error(path + ": matrix entry must be a number or [re, im]");
}

Isometry parse_matrix(const json& m, int dimension, const std::string& path) {
    if (!m.is_array() || m.size() != 2 || !m[0].is_array() || !m[1].is_array() ||
        m[0].size() != 2 || m[1].size() != 2)
        throw parse_error(path + ": expected a row-major 2x2 matrix");
    const Complex a = parse_entry(m[0][0], path);
    const Complex b = parse_entry(m[0][1], path);
    const Complex c = parse_entry(m[1][0], path);
    const Complex d = parse_entry(m[1][1], path);
    try {
        return Isometry(dimension, a, b, c, d, kParseDetTol);
    } catch (const geometry_error& e) {
        throw parse_error(path + ": " + e.what());
    }
}

json entry_to_json(Complex v, int dimension) {
    if (dimension == 2) return json(v.real());
    return json::array({v.real(), v.imag()});
}

json matrix_to_json(const Isometry& g) {
    return json::array({json::array({entry_to_json(g.a, g.dimension),
                                     entry_to_json(g.b, g.dimension)}),
                        json::array({entry_to_json(g.c, g.dimension),
                                     entry_to_json(g.d, g.dimension)})});
}

// Validate the combinatorial structure and build the slot index. Shared by
// parsed input and internally constructed complexes.
void finalize(Triangulation& t) {
    const int n = t.dimension;
    if (n != 2 && n != 3) throw validation_error("dimension must be 2 or 3");
    if (t.vertices.empty() || t.simplices.empty())
        throw validation_error("need at least one vertex and one simplex");

    std::map<int, int> vid;
    for (size_t i = 0; i < t.vertices.size(); ++i) {
        if (!vid.emplace(t.vertices[i].id, static_cast<int>(i)).second)
            throw validation_error("duplicate vertex id " + std::to_string(t.vertices[i].id));
    }
    if (std::none_of(t.vertices.begin(), t.vertices.end(),
                     [](const VertexInfo& v) { return v.ideal; }))
        throw validation_error("triangulation needs at least one ideal vertex");

    std::map<int, int> sid;
    for (size_t i = 0; i < t.simplices.size(); ++i) {
        const SimplexInfo& s = t.simplices[i];
        if (!sid.emplace(s.id, static_cast<int>(i)).second)
            throw validation_error("duplicate simplex id " + std::to_string(s.id));
        if (s.vertices.size() != static_cast<size_t>(n + 1))
            throw validation_error("simplex " + std::to_string(s.id) + " needs " +
                                   std::to_string(n + 1) + " vertices");
        if (s.sign != 1 && s.sign != -1)
            throw validation_error("simplex " + std::to_string(s.id) + " sign must be 1 or -1");
        for (int v : s.vertices)
            if (!vid.count(v))
                throw validation_error("simplex " + std::to_string(s.id) +
                                       " references unknown vertex " + std::to_string(v));
    }

    t.slot_gluing.assign(t.simplices.size(), {});
    for (auto& row : t.slot_gluing)
        for (auto& cell : row) cell = {-1, false};

    for (size_t gi = 0; gi < t.gluings.size(); ++gi) {
        GluingInfo& g = t.gluings[gi];
        const std::string where = "gluings[" + std::to_string(gi) + "]";
        for (const GluingSlot& slot : {g.from, g.to}) {
            if (slot.simplex < 0 || slot.simplex >= static_cast<int>(t.simplices.size()))
                throw validation_error(where + ": unknown simplex index");
            if (slot.face < 0 || slot.face > n)
                throw validation_error(where + ": face index out of range");
        }
        if (g.from == g.to)
            throw validation_error(where + ": face " + slot_name(t, g.from) +
                                   " glued to itself");
        if (g.vertex_map.size() != static_cast<size_t>(n))
            throw validation_error(where + ": vertex_map needs " + std::to_string(n) +
                                   " entries");

        // every slot glued exactly once
        auto occupy = [&](GluingSlot slot, bool is_from) {
            auto& cell = t.slot_gluing[slot.simplex][slot.face];
            if (cell.first >= 0)
                throw validation_error("face " + slot_name(t, slot) + " is glued twice");
            cell = {static_cast<int>(gi), is_from};
        };
        occupy(g.from, true);
        occupy(g.to, false);

        // position maps and vertex-id consistency
        std::array<bool, 4> used = {};
        g.forward_pos = {};
        g.backward_pos = {};
        int k = 0;
        for (int pos = 0; pos <= n; ++pos) {
            if (pos == g.from.face) continue;
            const int target = g.vertex_map[k];
            if (target < 0 || target > n || target == g.to.face)
                throw validation_error(where + ": vertex_map entry " + std::to_string(target) +
                                       " is not a position of the glued face");
            if (used[target])
                throw validation_error(where + ": vertex_map repeats position " +
                                       std::to_string(target));
            used[target] = true;
            const int v_from = t.simplices[g.from.simplex].vertices[pos];
            const int v_to = t.simplices[g.to.simplex].vertices[target];
            if (v_from != v_to)
                throw validation_error(where + ": glues vertex " + std::to_string(v_from) +
                                       " to a different vertex " + std::to_string(v_to));
            g.forward_pos[pos] = target;
            g.backward_pos[target] = pos;
            ++k;
        }
        g.forward_pos[g.from.face] = g.to.face;
        g.backward_pos[g.to.face] = g.from.face;
    }

    for (size_t si = 0; si < t.simplices.size(); ++si)
        for (int f = 0; f <= n; ++f)
            if (t.slot_gluing[si][f].first < 0)
                throw validation_error("face " + slot_name(t, {static_cast<int>(si), f}) +
                                       " is unglued; the complex must be closed");

    // every declared vertex id must label exactly one gluing-closure class
    // of simplex corners, otherwise vertex stars are ill-defined
    const int pos_count = static_cast<int>(t.simplices.size()) * (n + 1);
    std::vector<int> parent(pos_count);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const GluingInfo& g : t.gluings)
        for (int pos = 0; pos <= n; ++pos)
            if (pos != g.from.face) {
                const int a = find(g.from.simplex * (n + 1) + pos);
                const int b = find(g.to.simplex * (n + 1) + g.forward_pos[pos]);
                parent[a] = b;
            }
    std::map<int, int> class_of_vertex;  // vertex id -> class root
    for (size_t si = 0; si < t.simplices.size(); ++si) {
        for (int pos = 0; pos <= n; ++pos) {
            const int v = t.simplices[si].vertices[pos];
            const int root = find(static_cast<int>(si) * (n + 1) + pos);
            auto [it, fresh] = class_of_vertex.emplace(v, root);
            if (!fresh && it->second != root)
                throw validation_error("vertex " + std::to_string(v) +
                                       " labels a disconnected set of simplex corners");
        }
    }
}

std::vector<std::vector<int>> permutations(int count) {
    std::vector<int> p(count);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> all;
    do {
        all.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return all;
}

int permutation_sign(const std::vector<int>& p) {
    int sign = 1;
    for (size_t i = 0; i < p.size(); ++i)
        for (size_t j = i + 1; j < p.size(); ++j)
            if (p[i] > p[j]) sign = -sign;
    return sign;
}

}  // namespace

int Triangulation::vertex_index(int id) const {
    for (size_t i = 0; i < vertices.size(); ++i)
        if (vertices[i].id == id) return static_cast<int>(i);
    throw validation_error("unknown vertex id " + std::to_string(id));
}

int Triangulation::simplex_index(int id) const {
    for (size_t i = 0; i < simplices.size(); ++i)
        if (simplices[i].id == id) return static_cast<int>(i);
    throw validation_error("unknown simplex id " + std::to_string(id));
}

GluingSlot Triangulation::partner(GluingSlot slot) const {
    const auto [gi, fwd] = slot_gluing[slot.simplex][slot.face];
    return fwd ? gluings[gi].to : gluings[gi].from;
}

int Triangulation::glued_position(GluingSlot slot, int position) const {
    const auto [gi, fwd] = slot_gluing[slot.simplex][slot.face];
    return fwd ? gluings[gi].forward_pos[position] : gluings[gi].backward_pos[position];
}

Isometry TransitionCocycle::crossing(const Triangulation& t, GluingSlot slot) const {
    const auto [gi, fwd] = t.slot_gluing[slot.simplex][slot.face];
    return fwd ? forward[gi] : forward[gi].inverse();
}

Isometry evaluate_word(std::string_view word,
                       const std::map<std::string, Isometry>& generators, int dimension) {
    Isometry result = Isometry::identity(dimension);
    std::istringstream in{std::string(word)};
    std::string token;
    while (in >> token) {
        long power = 1;
        std::string name = token;
        if (const size_t caret = token.find('^'); caret != std::string::npos) {
            name = token.substr(0, caret);
            try {
                power = std::stol(token.substr(caret + 1));
            } catch (const std::exception&) {
                throw parse_error("bad exponent in word token '" + token + "'");
            }
        }
        const auto it = generators.find(name);
        if (it == generators.end())
            throw parse_error("unknown generator '" + name + "' in word");
        const Isometry g = power < 0 ? it->second.inverse() : it->second;
        for (long i = 0; i < std::labs(power); ++i) result = result * g;
    }
    return result;
}

TransitionCocycle word_to_cocycle(const Triangulation& t,
                                  const std::map<std::string, Isometry>& generators,
                                  const std::vector<std::string>& face_words) {
    if (face_words.size() != t.gluings.size())
        throw validation_error("need one word per gluing");
    TransitionCocycle c;
    for (const std::string& w : face_words)
        c.forward.push_back(evaluate_word(w, generators, t.dimension));
    return c;
}

ParsedInput parse_input(std::string_view bytes) {
    json root;
    try {
        root = json::parse(bytes);
    } catch (const json::exception& e) {
        throw parse_error(std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw parse_error("top level must be an object");

    ParsedInput out;
    Triangulation& t = out.triangulation;

    if (!root.contains("dimension") || !root["dimension"].is_number_integer())
        throw parse_error("dimension: required integer 2 or 3");
    t.dimension = root["dimension"].get<int>();
    if (t.dimension != 2 && t.dimension != 3) throw parse_error("dimension: must be 2 or 3");
    const int n = t.dimension;

    if (!root.contains("vertices") || !root["vertices"].is_array())
        throw parse_error("vertices: required array");
    for (size_t i = 0; i < root["vertices"].size(); ++i) {
        const json& v = root["vertices"][i];
        const std::string path = "vertices[" + std::to_string(i) + "]";
        if (!v.is_object() || !v.contains("id") || !v.contains("kind"))
            throw parse_error(path + ": need id and kind");
        const std::string kind = v["kind"].get<std::string>();
        if (kind != "ideal" && kind != "finite")
            throw parse_error(path + ".kind: must be \"ideal\" or \"finite\"");
        t.vertices.push_back({v["id"].get<int>(), kind == "ideal"});
    }

    if (!root.contains("simplices") || !root["simplices"].is_array())
        throw parse_error("simplices: required array");
    for (size_t i = 0; i < root["simplices"].size(); ++i) {
        const json& s = root["simplices"][i];
        const std::string path = "simplices[" + std::to_string(i) + "]";
        if (!s.is_object() || !s.contains("id") || !s.contains("vertices") || !s.contains("sign"))
            throw parse_error(path + ": need id, vertices, sign");
        SimplexInfo info;
        info.id = s["id"].get<int>();
        if (!s["vertices"].is_array() || s["vertices"].size() != static_cast<size_t>(n + 1))
            throw parse_error(path + ".vertices: need " + std::to_string(n + 1) + " ids");
        for (const json& v : s["vertices"]) info.vertices.push_back(v.get<int>());
        info.sign = s["sign"].get<int>();
        t.simplices.push_back(std::move(info));
    }

    if (root.contains("generators")) {
        if (!root["generators"].is_object())
            throw parse_error("generators: must be an object");
        for (const auto& [name, m] : root["generators"].items())
            out.generators.emplace(name, parse_matrix(m, n, "generators." + name));
    }

    if (!root.contains("gluings") || !root["gluings"].is_array())
        throw parse_error("gluings: required array");
    std::map<int, int> sid;
    for (size_t i = 0; i < t.simplices.size(); ++i) sid[t.simplices[i].id] = static_cast<int>(i);
    for (size_t i = 0; i < root["gluings"].size(); ++i) {
        const json& g = root["gluings"][i];
        const std::string path = "gluings[" + std::to_string(i) + "]";
        if (!g.is_object() || !g.contains("from") || !g.contains("to") ||
            !g.contains("vertex_map") || !g.contains("transition"))
            throw parse_error(path + ": need from, to, vertex_map, transition");
        GluingInfo info;
        auto parse_slot = [&](const json& s, const std::string& sub) {
            if (!s.is_array() || s.size() != 2)
                throw parse_error(path + "." + sub + ": expected [simplex, face]");
            const int simplex_id = s[0].get<int>();
            if (!sid.count(simplex_id))
                throw parse_error(path + "." + sub + ": unknown simplex " +
                                  std::to_string(simplex_id));
            return GluingSlot{sid[simplex_id], s[1].get<int>()};
        };
        info.from = parse_slot(g["from"], "from");
        info.to = parse_slot(g["to"], "to");
        if (!g["vertex_map"].is_array() || g["vertex_map"].size() != static_cast<size_t>(n))
            throw parse_error(path + ".vertex_map: need " + std::to_string(n) + " entries");
        for (const json& v : g["vertex_map"]) info.vertex_map.push_back(v.get<int>());

        const json& tr = g["transition"];
        if (tr.is_object() && tr.contains("word")) {
            info.word = tr["word"].get<std::string>();
            out.cocycle.forward.push_back(evaluate_word(*info.word, out.generators, n));
        } else {
            out.cocycle.forward.push_back(parse_matrix(tr, n, path + ".transition"));
        }
        t.gluings.push_back(std::move(info));
    }

    if (root.contains("peripheral")) {
        if (!root["peripheral"].is_object())
            throw parse_error("peripheral: must be an object");
        for (const auto& [key, list] : root["peripheral"].items()) {
            int vertex_id = 0;
            try {
                vertex_id = std::stoi(key);
            } catch (const std::exception&) {
                throw parse_error("peripheral: key '" + key + "' is not a vertex id");
            }
            if (!list.is_array())
                throw parse_error("peripheral." + key + ": expected an array of matrices");
            std::vector<Isometry> gs;
            for (size_t i = 0; i < list.size(); ++i)
                gs.push_back(
                    parse_matrix(list[i], n, "peripheral." + key + "[" + std::to_string(i) + "]"));
            out.peripheral.by_vertex.emplace(vertex_id, std::move(gs));
        }
    }

    finalize(t);
    for (const auto& [vertex_id, gs] : out.peripheral.by_vertex) {
        t.vertex_index(vertex_id);  // throws on unknown id
        (void)gs;
    }
    return out;
}

std::string serialize(const ParsedInput& input) {
    const Triangulation& t = input.triangulation;
    json root;
    root["dimension"] = t.dimension;
    root["vertices"] = json::array();
    for (const VertexInfo& v : t.vertices)
        root["vertices"].push_back({{"id", v.id}, {"kind", v.ideal ? "ideal" : "finite"}});
    root["simplices"] = json::array();
    for (const SimplexInfo& s : t.simplices)
        root["simplices"].push_back({{"id", s.id}, {"vertices", s.vertices}, {"sign", s.sign}});
    root["gluings"] = json::array();
    for (size_t gi = 0; gi < t.gluings.size(); ++gi) {
        const GluingInfo& g = t.gluings[gi];
        json item;
        item["from"] = json::array({t.simplices[g.from.simplex].id, g.from.face});
        item["to"] = json::array({t.simplices[g.to.simplex].id, g.to.face});
        item["vertex_map"] = g.vertex_map;
        if (g.word)
            item["transition"] = json{{"word", *g.word}};
        else
            item["transition"] = matrix_to_json(input.cocycle.forward[gi]);
        root["gluings"].push_back(std::move(item));
    }
    if (!input.generators.empty()) {
        json gens;
        for (const auto& [name, g] : input.generators) gens[name] = matrix_to_json(g);
        root["generators"] = std::move(gens);
    }
    if (!input.peripheral.by_vertex.empty()) {
        json periph;
        for (const auto& [vertex_id, gs] : input.peripheral.by_vertex) {
            json list = json::array();
            for (const Isometry& g : gs) list.push_back(matrix_to_json(g));
            periph[std::to_string(vertex_id)] = std::move(list);
        }
        root["peripheral"] = std::move(periph);
    }
    return root.dump(2) + "\n";
}

CocycleReport validate_cocycle(const Triangulation& t, const TransitionCocycle& c,
                               double tol) {
    const int n = t.dimension;
    CocycleReport report;
    report.tol = tol;

    // codim-2 faces are position subsets of size n-1: pairs for n = 3,
    // corners for n = 2, keyed by bitmask
    std::vector<int> masks;
    for (int m = 1; m < (1 << (n + 1)); ++m)
        if (__builtin_popcount(static_cast<unsigned>(m)) == n - 1) masks.push_back(m);

    std::vector<std::vector<bool>> visited(t.simplices.size(),
                                           std::vector<bool>(1 << (n + 1), false));
    int next_class = 0;

    auto first_exit = [&](int mask, int exclude) {
        for (int f = 0; f <= n; ++f)
            if (!(mask >> f & 1) && f != exclude) return f;
        return -1;
    };

    for (size_t si = 0; si < t.simplices.size(); ++si) {
        for (int mask : masks) {
            if (visited[si][mask]) continue;

            // corners at ideal vertices (n = 2) have peripheral, not trivial,
            // loop holonomy; mark the class but do not demand identity
            bool check = true;
            if (n == 2) {
                const int pos = __builtin_ctz(static_cast<unsigned>(mask));
                const int vid = t.simplices[si].vertices[pos];
                check = !t.vertices[t.vertex_index(vid)].ideal;
            }

            GluingSlot slot{static_cast<int>(si), first_exit(mask, -1)};
            int cur_mask = mask;
            const GluingSlot start = slot;
            const int start_mask = mask;
            Isometry holonomy = Isometry::identity(n);
            do {
                visited[slot.simplex][cur_mask] = true;
                if (check) holonomy = holonomy * c.crossing(t, slot);
                const GluingSlot into = t.partner(slot);
                int new_mask = 0;
                for (int f = 0; f <= n; ++f)
                    if (cur_mask >> f & 1) new_mask |= 1 << t.glued_position(slot, f);
                slot = {into.simplex, first_exit(new_mask, into.face)};
                cur_mask = new_mask;
            } while (!(slot == start && cur_mask == start_mask));

            if (!check) continue;
            EdgeResidual entry;
            entry.class_id = next_class++;
            std::ostringstream label;
            if (n == 3) {
                const int p0 = __builtin_ctz(static_cast<unsigned>(mask));
                const int p1 = __builtin_ctz(static_cast<unsigned>(mask & (mask - 1)));
                label << "edge {" << t.simplices[si].vertices[p0] << ","
                      << t.simplices[si].vertices[p1] << "} at simplex " << t.simplices[si].id
                      << " positions {" << p0 << "," << p1 << "}";
            } else {
                const int p0 = __builtin_ctz(static_cast<unsigned>(mask));
                label << "corner " << t.simplices[si].vertices[p0] << " at simplex "
                      << t.simplices[si].id << " position " << p0;
            }
            entry.label = label.str();
            entry.residual = holonomy.distance_to_identity();
            report.max_residual = std::max(report.max_residual, entry.residual);
            if (entry.residual > tol) report.pass = false;
            report.residuals.push_back(std::move(entry));
        }
    }
    return report;
}

FundamentalCycle fundamental_cycle(const Triangulation& t) {
    for (size_t gi = 0; gi < t.gluings.size(); ++gi) {
        const GluingInfo& g = t.gluings[gi];
        int sign = 1;  // parity of the vertex_map sequence
        for (size_t i = 0; i < g.vertex_map.size(); ++i)
            for (size_t j = i + 1; j < g.vertex_map.size(); ++j)
                if (g.vertex_map[i] > g.vertex_map[j]) sign = -sign;
        const int from_sign =
            t.simplices[g.from.simplex].sign * ((g.from.face % 2 == 0) ? 1 : -1) * sign;
        const int to_sign = t.simplices[g.to.simplex].sign * ((g.to.face % 2 == 0) ? 1 : -1);
        if (from_sign != -to_sign)
            throw validation_error("non-orientable or mis-signed: induced orientations of " +
                                   slot_name(t, g.from) + " and " + slot_name(t, g.to) +
                                   " do not cancel (gluing " + std::to_string(gi) + ")");
    }
    FundamentalCycle cycle;
    for (size_t si = 0; si < t.simplices.size(); ++si)
        cycle.entries.push_back({static_cast<int>(si), t.simplices[si].sign});
    return cycle;
}

const PeripheralResult* PeripheralReport::find(int vertex_id) const {
    for (const PeripheralResult& r : entries)
        if (r.vertex_id == vertex_id) return &r;
    return nullptr;
}

PeripheralReport verify_peripheral(const Triangulation& t,
                                   [[maybe_unused]] const TransitionCocycle& c,
                                   const PeripheralData& p, double tol) {
    PeripheralReport report;
    for (const VertexInfo& v : t.vertices) {
        if (!v.ideal) continue;
        PeripheralResult result;
        result.vertex_id = v.id;
        std::vector<Isometry> gs;
        if (const auto it = p.by_vertex.find(v.id); it != p.by_vertex.end()) gs = it->second;
        if (gs.empty()) gs.push_back(Isometry::identity(t.dimension));
        try {
            result.fixed_point = common_fixed_point(gs, tol);
        } catch (const geometry_error& e) {
            result.error = e.what();
            report.pass = false;
        }
        report.entries.push_back(std::move(result));
    }
    return report;
}

std::pair<Triangulation, TransitionCocycle> barycentric_subdivide(
    const Triangulation& t, const TransitionCocycle& c) {
    const int n = t.dimension;
    const int masks_per = 1 << (n + 1);
    const int simplex_count = static_cast<int>(t.simplices.size());

    // classes of cells (simplex, nonempty proper position subset) under the
    // gluing identifications
    std::vector<int> parent(simplex_count * masks_per);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    const int full_mask = masks_per - 1;
    for (const GluingInfo& g : t.gluings) {
        for (int mask = 1; mask < full_mask; ++mask) {
            if (mask >> g.from.face & 1) continue;
            int image = 0;
            for (int f = 0; f <= n; ++f)
                if (mask >> f & 1) image |= 1 << g.forward_pos[f];
            const int a = find(g.from.simplex * masks_per + mask);
            const int b = find(g.to.simplex * masks_per + image);
            parent[a] = b;
        }
    }

    // singleton classes reuse the original vertex id and flag; other cell
    // classes and the simplex barycenters become fresh finite vertices
    int max_id = 0;
    for (const VertexInfo& v : t.vertices) max_id = std::max(max_id, v.id);

    Triangulation out;
    out.dimension = n;
    std::map<int, int> class_vertex;  // class root -> new vertex id
    int next_id = max_id + 1;
    for (int si = 0; si < simplex_count; ++si) {
        for (int mask = 1; mask < full_mask; ++mask) {
            const int root = find(si * masks_per + mask);
            if (class_vertex.count(root)) continue;
            if (__builtin_popcount(static_cast<unsigned>(mask)) == 1) {
                const int pos = __builtin_ctz(static_cast<unsigned>(mask));
                const int vid = t.simplices[si].vertices[pos];
                class_vertex[root] = vid;
                out.vertices.push_back({vid, t.vertices[t.vertex_index(vid)].ideal});
            } else {
                class_vertex[root] = next_id;
                out.vertices.push_back({next_id, false});
                ++next_id;
            }
        }
    }
    std::vector<int> barycenter_id(simplex_count);
    for (int si = 0; si < simplex_count; ++si) {
        barycenter_id[si] = next_id;
        out.vertices.push_back({next_id, false});
        ++next_id;
    }

    // one small simplex per (simplex, flag permutation)
    const auto perms = permutations(n + 1);
    const int perms_per = static_cast<int>(perms.size());
    std::map<std::vector<int>, int> perm_rank;
    for (int r = 0; r < perms_per; ++r) perm_rank[perms[r]] = r;

    auto small_index = [&](int si, int rank) { return si * perms_per + rank; };
    for (int si = 0; si < simplex_count; ++si) {
        for (int r = 0; r < perms_per; ++r) {
            const std::vector<int>& pi = perms[r];
            SimplexInfo small;
            small.id = small_index(si, r);
            int mask = 0;
            for (int k = 0; k < n; ++k) {
                mask |= 1 << pi[k];
                small.vertices.push_back(class_vertex[find(si * masks_per + mask)]);
            }
            small.vertices.push_back(barycenter_id[si]);
            small.sign = t.simplices[si].sign * permutation_sign(pi);
            out.simplices.push_back(std::move(small));
        }
    }

    // gluings: swapping flag levels k < n stays inside the old simplex with
    // an identity transition; the face opposite the barycenter crosses the
    // old gluing and inherits its transition
    TransitionCocycle out_cocycle;
    auto identity_map = [&](int k) {
        std::vector<int> vm;
        for (int pos = 0; pos <= n; ++pos)
            if (pos != k) vm.push_back(pos);
        return vm;
    };
    for (int si = 0; si < simplex_count; ++si) {
        for (int r = 0; r < perms_per; ++r) {
            const std::vector<int>& pi = perms[r];
            for (int k = 0; k < n; ++k) {
                std::vector<int> swapped = pi;
                std::swap(swapped[k], swapped[k + 1]);
                const int r2 = perm_rank[swapped];
                if (r2 < r) continue;  // listed once
                GluingInfo g;
                g.from = {small_index(si, r), k};
                g.to = {small_index(si, r2), k};
                g.vertex_map = identity_map(k);
                out.gluings.push_back(std::move(g));
                out_cocycle.forward.push_back(Isometry::identity(n));
            }
        }
    }
    for (size_t gi = 0; gi < t.gluings.size(); ++gi) {
        const GluingInfo& old = t.gluings[gi];
        for (int r = 0; r < perms_per; ++r) {
            const std::vector<int>& pi = perms[r];
            if (pi[n] != old.from.face) continue;
            std::vector<int> partner_flag(n + 1);
            for (int j = 0; j < n; ++j) partner_flag[j] = old.forward_pos[pi[j]];
            partner_flag[n] = old.to.face;
            GluingInfo g;
            g.from = {small_index(old.from.simplex, r), n};
            g.to = {small_index(old.to.simplex, perm_rank[partner_flag]), n};
            g.vertex_map = identity_map(n);
            out.gluings.push_back(std::move(g));
            out_cocycle.forward.push_back(c.forward[gi]);
        }
    }

    finalize(out);
    return {std::move(out), std::move(out_cocycle)};
}

}  // namespace repvol
