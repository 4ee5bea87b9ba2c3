// geom: command-line front end over the cgtm headers.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cgtm/cli.hpp"

namespace {

std::vector<double> parse_csv_doubles(const std::string& s, const char* opt) {
    std::vector<double> out;
    if (s.empty()) return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw cgtm::UsageError(std::string(opt) + ": '" + item + "' is not a number");
        }
    }
    return out;
}

std::vector<int> parse_csv_ints(const std::string& s, const char* opt) {
    std::vector<int> out;
    for (double d : parse_csv_doubles(s, opt)) {
        if (d != static_cast<int>(d)) throw cgtm::UsageError(std::string(opt) + " expects integers");
        out.push_back(static_cast<int>(d));
    }
    return out;
}

void emit_error(const std::string& kind, const std::string& message) {
    std::cerr << cgtm::error_json(kind, message).dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cheeger-Gromoll type metrics on tangent bundles of statistical manifolds"};
    app.require_subcommand(1);

    cgtm::RunConfig cfg;
    std::string point, fiber, indices, plane_a, plane_b, velocity;
    double tol = 0.0;

    auto add_common = [&](CLI::App* sub, bool needs_spec) {
        if (needs_spec) {
            auto* m = sub->add_option("--model", cfg.model, "catalog model name");
            auto* s = sub->add_option("--spec", cfg.spec_path, "spec JSON file");
            m->excludes(s);
            sub->add_option("--param", cfg.param_overrides, "override a spec parameter, NAME=VALUE");
            sub->add_option("--p", cfg.p, "metric parameter p");
            sub->add_option("--q", cfg.q, "metric parameter q");
            sub->add_option("--point", point, "base point, comma separated");
            sub->add_option("--fiber", fiber, "fiber vector u, comma separated");
            sub->add_option("--samples", cfg.samples, "sample count")->check(CLI::PositiveNumber);
            sub->add_option("--tol", tol, "tolerance override");
        }
        sub->add_option("--seed", cfg.seed, "sampling seed");
        sub->add_option("--out", cfg.out, "write the report here instead of stdout");
        sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    };

    auto* describe = app.add_subcommand("describe", "base tensors at a point");
    add_common(describe, true);
    auto* connection = app.add_subcommand("connection", "adapted-frame connection table");
    add_common(connection, true);
    auto* curvature = app.add_subcommand("curvature", "the twelve curvature components");
    add_common(curvature, true);
    curvature->add_option("--indices", indices, "single index triple i,j,k (1-based)");
    auto* sectional = app.add_subcommand("sectional", "frame sectional table or a plane query");
    add_common(sectional, true);
    sectional->add_option("--plane-a", plane_a, "first plane vector, h then v components");
    sectional->add_option("--plane-b", plane_b, "second plane vector, h then v components");
    auto* scalar = app.add_subcommand("scalar", "scalar curvature");
    add_common(scalar, true);
    auto* check = app.add_subcommand("check", "run a named check over seeded samples");
    add_common(check, true);
    check->add_option("which", cfg.check, "codazzi | flat | totally-geodesic | incompressible | cross-validate | "
                                          "norm-identity | ex0-pde")
        ->required();
    check->add_option("--A", cfg.ex0_A, "ex0-pde: A(x, y)");
    check->add_option("--B", cfg.ex0_B, "ex0-pde: B(x, y)");
    check->add_option("--C", cfg.ex0_C, "ex0-pde: C(x, y)");
    check->add_option("--D", cfg.ex0_D, "ex0-pde: D(x, y)");
    auto* geodesic = app.add_subcommand("geodesic", "integrate a geodesic of g_{p,q}");
    add_common(geodesic, true);
    geodesic->add_option("--T", cfg.T, "integration time");
    geodesic->add_option("--dt", cfg.dt, "step size");
    geodesic->add_option("--record-every", cfg.record_every, "keep every k-th step")->check(CLI::PositiveNumber);
    geodesic->add_option("--velocity", velocity, "initial velocity, h then v components");
    auto* verify = app.add_subcommand("verify-paper", "regression table of the worked examples");
    add_common(verify, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error("UsageError", e.what());
        return 2;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        cfg.point = parse_csv_doubles(point, "--point");
        cfg.fiber = parse_csv_doubles(fiber, "--fiber");
        cfg.indices = parse_csv_ints(indices, "--indices");
        cfg.plane_a = parse_csv_doubles(plane_a, "--plane-a");
        cfg.plane_b = parse_csv_doubles(plane_b, "--plane-b");
        cfg.velocity = parse_csv_doubles(velocity, "--velocity");
        if (sub->get_option_no_throw("--tol") && sub->count("--tol")) cfg.tol = tol;
        if (cfg.format == "csv" && sub->get_name() != "geodesic")
            throw cgtm::UsageError("csv output is only available for geodesic");

        const auto result = cgtm::run_command(sub->get_name(), cfg);
        const std::string body = result.text.empty() ? cgtm::render_json(result.report) : result.text;
        if (cfg.out.empty()) {
            std::cout << body;
        } else {
            std::ofstream f(cfg.out, std::ios::binary);
            if (!f) throw cgtm::UsageError("cannot write '" + cfg.out + "'");
            f << body;
        }
        return result.exit_code;
    } catch (const cgtm::Error& e) {
        emit_error(e.kind(), e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_error("InternalError", e.what());
        return 2;
    }
}
