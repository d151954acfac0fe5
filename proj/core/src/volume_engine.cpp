#include "repvol/volume_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace repvol {

namespace {

using nlohmann::json;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

json placement_json(const PlacementPolicy& p) {
    json j;
    j["mode"] = p.mode == PlacementPolicy::Mode::canonical ? "canonical" : "random";
    j["seed"] = p.seed;
    j["radius"] = p.radius;
    return j;
}

}  // namespace

VolumeReport compute_volume(const ParsedInput& input, const EngineOptions& options) {
    const Triangulation& t = input.triangulation;
    if (options.strict) {
        const CocycleReport edges = validate_cocycle(t, input.cocycle, options.witness_tol);
        if (!edges.pass) {
            std::string worst;
            for (const EdgeResidual& e : edges.residuals)
                if (e.residual > options.witness_tol && worst.empty()) worst = e.label;
            throw validation_error("transition cocycle fails the edge condition at " + worst +
                                   " (residual " + std::to_string(edges.max_residual) + ")");
        }
    }
    const FundamentalCycle cycle = fundamental_cycle(t);

    const Placement placement =
        place_vertices(t, input.cocycle, input.peripheral, options.placement);
    const DevelopedChain chain =
        develop(t, input.cocycle, placement, DevelopOptions{options.root});
    if (options.strict && chain.max_witness > options.witness_tol)
        throw validation_error("equivariance witness " + std::to_string(chain.max_witness) +
                               " exceeds " + std::to_string(options.witness_tol) + " at " +
                               chain.worst_witness_label);

    VolumeReport report;
    report.placement = options.placement;
    report.tol = options.tol;
    report.simplex_count = static_cast<int>(cycle.entries.size());
    report.max_witness = chain.max_witness;

    const double per_simplex_tol =
        options.tol / std::max(1, report.simplex_count);
    double sum = 0.0, comp = 0.0;
    for (const auto& [simplex, sign] : cycle.entries) {
        const DevelopedEntry& entry = chain.entries[simplex];
        const GeodesicSimplex s{t.dimension, entry.tuple};
        VolumeValue v;
        try {
            v = simplex_volume(s, per_simplex_tol, options.method);
        } catch (const quadrature_error& e) {
            if (options.strict) throw;
            v = {e.partial_value, e.error_bound, VolumeMethod::quadrature};
        }
        report.per_simplex.push_back(v);
        if (v.method == VolumeMethod::closed_form)
            ++report.closed_form_count;
        else
            ++report.quadrature_count;
        report.est_error += v.est_error;
        const double term = sign * v.value;
        const double y = term - comp;
        const double tmp = sum + y;
        comp = (tmp - sum) - y;
        sum = tmp;
    }
    report.total = sum;
    return report;
}

InvarianceReport invariance_test(const ParsedInput& input, int samples,
                                 std::uint64_t seed, double tol) {
    if (samples < 2) throw validation_error("invariance_test needs at least 2 samples");
    InvarianceReport report;
    report.tol = tol;
    for (int i = 0; i < samples; ++i) {
        EngineOptions options;
        options.tol = tol;
        options.placement.mode = PlacementPolicy::Mode::random;
        options.placement.seed = splitmix64(seed + static_cast<std::uint64_t>(i));
        options.strict = false;  // a broken cocycle should still yield values
        report.values.push_back(compute_volume(input, options).total);
    }
    const auto [lo, hi] = std::minmax_element(report.values.begin(), report.values.end());
    report.max_deviation = *hi - *lo;
    report.pass = report.max_deviation <= 10.0 * tol;
    return report;
}

SubdivisionReport subdivision_test(const ParsedInput& input, double tol) {
    SubdivisionReport report;
    report.tol = tol;

    EngineOptions options;
    options.tol = tol;
    report.before = compute_volume(input, options).total;

    ParsedInput sub;
    std::tie(sub.triangulation, sub.cocycle) =
        barycentric_subdivide(input.triangulation, input.cocycle);
    sub.peripheral = input.peripheral;
    report.subdivided_count = static_cast<int>(sub.triangulation.simplices.size());
    report.after = compute_volume(sub, options).total;
    report.delta = report.after - report.before;
    report.pass = std::abs(report.delta) <= 10.0 * tol * report.subdivided_count;
    return report;
}

MilnorWoodReport milnor_wood_report(const VolumeReport& report, int dimension,
                                    int simplices) {
    MilnorWoodReport mw;
    mw.bound = simplices * max_simplex_volume(dimension);
    mw.ratio = mw.bound > 0.0 ? std::abs(report.total) / mw.bound : 0.0;
    mw.pass = std::abs(report.total) <= mw.bound + report.est_error;
    return mw;
}

std::string input_digest(std::string_view bytes) {
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (const char ch : bytes) {
        hash ^= static_cast<unsigned char>(ch);
        hash *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string to_json(const VolumeReport& report) {
    json j;
    j["schema_version"] = 1;
    j["kind"] = "volume";
    j["total"] = report.total;
    j["abs_total"] = std::abs(report.total);
    j["est_error"] = report.est_error;
    j["simplex_count"] = report.simplex_count;
    j["method_counts"] = {{"closed_form", report.closed_form_count},
                          {"quadrature", report.quadrature_count}};
    j["max_witness"] = report.max_witness;
    j["placement"] = placement_json(report.placement);
    j["tol"] = report.tol;
    j["input_digest"] = report.input_digest;
    json per = json::array();
    for (const VolumeValue& v : report.per_simplex)
        per.push_back({{"value", v.value},
                       {"est_error", v.est_error},
                       {"method", v.method == VolumeMethod::closed_form ? "closed_form"
                                                                        : "quadrature"}});
    j["per_simplex"] = std::move(per);
    return j.dump(2) + "\n";
}

std::string to_json(const InvarianceReport& report) {
    json j;
    j["schema_version"] = 1;
    j["kind"] = "invariance";
    j["values"] = report.values;
    j["max_deviation"] = report.max_deviation;
    j["tol"] = report.tol;
    j["pass"] = report.pass;
    return j.dump(2) + "\n";
}

std::string to_json(const SubdivisionReport& report) {
    json j;
    j["schema_version"] = 1;
    j["kind"] = "subdivision";
    j["vol_before"] = report.before;
    j["vol_after"] = report.after;
    j["delta"] = report.delta;
    j["subdivided_count"] = report.subdivided_count;
    j["tol"] = report.tol;
    j["pass"] = report.pass;
    return j.dump(2) + "\n";
}

std::string to_json(const MilnorWoodReport& report, const VolumeReport& volume) {
    json j;
    j["schema_version"] = 1;
    j["kind"] = "milnor_wood";
    j["total"] = volume.total;
    j["bound"] = report.bound;
    j["ratio"] = report.ratio;
    j["pass"] = report.pass;
    return j.dump(2) + "\n";
}

std::string to_json(const CocycleReport& cocycle, const PeripheralReport& peripheral) {
    json j;
    j["schema_version"] = 1;
    j["kind"] = "check";
    json edges = json::array();
    for (const EdgeResidual& e : cocycle.residuals)
        edges.push_back({{"class", e.class_id}, {"label", e.label}, {"residual", e.residual}});
    j["edge_residuals"] = std::move(edges);
    j["max_residual"] = cocycle.max_residual;
    j["cocycle_pass"] = cocycle.pass;
    json periph = json::array();
    for (const PeripheralResult& r : peripheral.entries) {
        json item;
        item["vertex"] = r.vertex_id;
        if (r.fixed_point) {
            if (r.fixed_point->at_infinity)
                item["fixed_point"] = "inf";
            else if (r.fixed_point->dimension == 2)
                item["fixed_point"] = r.fixed_point->z.real();
            else
                item["fixed_point"] = json::array(
                    {r.fixed_point->z.real(), r.fixed_point->z.imag()});
        } else {
            item["error"] = r.error;
        }
        periph.push_back(std::move(item));
    }
    j["peripheral"] = std::move(periph);
    j["peripheral_pass"] = peripheral.pass;
    j["pass"] = cocycle.pass && peripheral.pass;
    return j.dump(2) + "\n";
}

}  // namespace repvol
