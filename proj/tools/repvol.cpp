#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "repvol/volume_engine.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitUsage = 64;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw repvol::parse_error("cannot open input file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

repvol::MethodPolicy parse_method(const std::string& name) {
    if (name == "auto") return repvol::MethodPolicy::automatic;
    if (name == "closed") return repvol::MethodPolicy::closed_form;
    return repvol::MethodPolicy::quadrature;
}

struct CommonArgs {
    std::string input;
    double tol = 1e-8;
    bool json = false;
};

int run_volume(const CommonArgs& args, const std::string& method,
               const std::string& placement, std::uint64_t seed) {
    const std::string bytes = read_file(args.input);
    const repvol::ParsedInput input = repvol::parse_input(bytes);
    repvol::EngineOptions options;
    options.tol = args.tol;
    options.method = parse_method(method);
    options.placement.mode = placement == "random"
                                 ? repvol::PlacementPolicy::Mode::random
                                 : repvol::PlacementPolicy::Mode::canonical;
    options.placement.seed = seed;
    repvol::VolumeReport report = repvol::compute_volume(input, options);
    report.input_digest = repvol::input_digest(bytes);
    if (args.json) {
        std::cout << repvol::to_json(report);
    } else {
        std::printf("volume total = %.12f  (|total| = %.12f, est error %.2e)\n",
                    report.total, std::abs(report.total), report.est_error);
        std::printf("simplices: %d (%d closed form, %d quadrature), witness %.2e\n",
                    report.simplex_count, report.closed_form_count,
                    report.quadrature_count, report.max_witness);
    }
    return kExitOk;
}

int run_check(const CommonArgs& args) {
    const std::string bytes = read_file(args.input);
    const repvol::ParsedInput input = repvol::parse_input(bytes);
    const repvol::CocycleReport edges =
        repvol::validate_cocycle(input.triangulation, input.cocycle, args.tol);
    const repvol::PeripheralReport periph =
        repvol::verify_peripheral(input.triangulation, input.cocycle, input.peripheral, args.tol);
    repvol::fundamental_cycle(input.triangulation);  // throws when mis-signed
    if (args.json) {
        std::cout << repvol::to_json(edges, periph);
    } else {
        for (const repvol::EdgeResidual& e : edges.residuals)
            std::printf("%s: residual %.3e%s\n", e.label.c_str(), e.residual,
                        e.residual > args.tol ? "  FAIL" : "");
        for (const repvol::PeripheralResult& r : periph.entries) {
            if (!r.error.empty())
                std::printf("peripheral vertex %d: FAIL (%s)\n", r.vertex_id, r.error.c_str());
        }
        std::printf("cocycle %s (max residual %.3e), peripheral %s\n",
                    edges.pass ? "PASS" : "FAIL", edges.max_residual,
                    periph.pass ? "PASS" : "FAIL");
    }
    return edges.pass && periph.pass ? kExitOk : kExitValidation;
}

int run_invariance(const CommonArgs& args, int samples, std::uint64_t seed) {
    const std::string bytes = read_file(args.input);
    const repvol::ParsedInput input = repvol::parse_input(bytes);
    const repvol::InvarianceReport report =
        repvol::invariance_test(input, samples, seed, args.tol);
    if (args.json) {
        std::cout << repvol::to_json(report);
    } else {
        std::printf("invariance over %d random placements: max deviation %.3e, %s\n",
                    samples, report.max_deviation, report.pass ? "PASS" : "FAIL");
    }
    return report.pass ? kExitOk : kExitNumerical;
}

int run_subdivide(const CommonArgs& args, const std::string& output) {
    const std::string bytes = read_file(args.input);
    const repvol::ParsedInput input = repvol::parse_input(bytes);
    repvol::ParsedInput sub;
    std::tie(sub.triangulation, sub.cocycle) =
        repvol::barycentric_subdivide(input.triangulation, input.cocycle);
    sub.peripheral = input.peripheral;
    std::ofstream out(output, std::ios::binary);
    if (!out) throw repvol::parse_error("cannot open output file: " + output);
    out << repvol::serialize(sub);
    std::printf("subdivided %zu -> %zu simplices\n", input.triangulation.simplices.size(),
                sub.triangulation.simplices.size());
    return kExitOk;
}

int run_bound(const CommonArgs& args) {
    const std::string bytes = read_file(args.input);
    const repvol::ParsedInput input = repvol::parse_input(bytes);
    repvol::EngineOptions options;
    options.tol = args.tol;
    repvol::VolumeReport report = repvol::compute_volume(input, options);
    report.input_digest = repvol::input_digest(bytes);
    const repvol::MilnorWoodReport mw = repvol::milnor_wood_report(
        report, input.triangulation.dimension, report.simplex_count);
    if (args.json) {
        std::cout << repvol::to_json(mw, report);
    } else {
        std::printf("|total| = %.12f, bound N v_n = %.12f, ratio = %.6f, %s\n",
                    std::abs(report.total), mw.bound, mw.ratio, mw.pass ? "PASS" : "FAIL");
    }
    return mw.pass ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"repvol: volumes of representations via straightened developing maps"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string method = "auto";
    std::string placement = "canonical";
    std::uint64_t seed = 0;
    int samples = 0;
    std::string output;

    CLI::App* volume = app.add_subcommand("volume", "compute the volume of the representation");
    volume->add_option("--input", args.input, "input JSON file")->required();
    volume->add_option("--method", method, "auto|closed|quadrature")
        ->check(CLI::IsMember({"auto", "closed", "quadrature"}));
    volume->add_option("--tol", args.tol, "absolute tolerance");
    volume->add_option("--placement", placement, "canonical|random")
        ->check(CLI::IsMember({"canonical", "random"}));
    volume->add_option("--seed", seed, "seed for random placement");
    volume->add_flag("--json", args.json, "emit a JSON report");

    CLI::App* check = app.add_subcommand("check", "validate the transition cocycle");
    check->add_option("--input", args.input, "input JSON file")->required();
    check->add_option("--tol", args.tol, "residual tolerance");
    check->add_flag("--json", args.json, "emit a JSON report");

    CLI::App* invariance =
        app.add_subcommand("invariance", "volume under random placements");
    invariance->add_option("--input", args.input, "input JSON file")->required();
    invariance->add_option("--samples", samples, "number of random placements")->required();
    invariance->add_option("--seed", seed, "base seed")->required();
    invariance->add_option("--tol", args.tol, "absolute tolerance");
    invariance->add_flag("--json", args.json, "emit a JSON report");

    CLI::App* subdivide = app.add_subcommand("subdivide", "barycentric subdivision");
    subdivide->add_option("--input", args.input, "input JSON file")->required();
    subdivide->add_option("--output", output, "output JSON file")->required();

    CLI::App* bound = app.add_subcommand("bound", "Milnor-Wood bound report");
    bound->add_option("--input", args.input, "input JSON file")->required();
    bound->add_option("--tol", args.tol, "absolute tolerance");
    bound->add_flag("--json", args.json, "emit a JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (volume->parsed()) return run_volume(args, method, placement, seed);
        if (check->parsed()) return run_check(args);
        if (invariance->parsed()) return run_invariance(args, samples, seed);
        if (subdivide->parsed()) return run_subdivide(args, output);
        if (bound->parsed()) return run_bound(args);
    } catch (const repvol::quadrature_error& e) {
        std::cerr << "numerical failure: " << e.what() << " (partial value " << e.partial_value
                  << ", error bound " << e.error_bound << ")\n";
        return kExitNumerical;
    } catch (const repvol::parse_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const repvol::validation_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const repvol::geometry_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}
