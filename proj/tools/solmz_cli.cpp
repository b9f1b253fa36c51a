#include "solmz/commands.hpp"
#include "solmz/error.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <thread>

namespace {

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

int fail(const std::string& kind, const std::string& what, int code) {
    std::cerr << "error: " << kind << ": " << one_line(what) << '\n';
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bright-soliton matter-wave interferometer lab"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    bool dry_run = false;
    std::vector<std::string> sets;
    app.add_option("--config", config, "scenario file")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "64-bit seed for all randomness");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--workers", workers, "worker threads for sweeps")->check(CLI::PositiveNumber);
    app.add_flag("--dry-run", dry_run, "print the resolved parameters and exit");
    app.add_option("--set", sets, "override a scenario key, section.key=value");

    std::string field, scattering, curve, input, model;
    long rho_res = 0, z_res = 0;
    auto* fes = app.add_subcommand("feshbach", "scattering length <-> field conversions");
    fes->add_option("--field", field, "field in G");
    fes->add_option("--scattering", scattering, "scattering length in a0");
    fes->add_option("--curve", curve, "lo:hi:step in G");
    auto* var = app.add_subcommand("varsurface", "variational energy surface and stationary point");
    var->add_option("--rho-res", rho_res, "surface rows");
    var->add_option("--z-res", z_res, "surface columns");
    app.add_subcommand("expand", "guided expansion and soliton-parameter search");
    app.add_subcommand("mz", "Mach-Zehnder fringe scans and sweeps");
    auto* fm = app.add_subcommand("fieldmap", "field curvature from r.f. spectroscopy");
    fm->add_option("--input", input, "CSV of position_mm, frequency_MHz");
    auto* fit = app.add_subcommand("fit", "fit a two-column CSV");
    fit->add_option("--model", model, "parabola, fringe, gaussian_decay or quadratic_phase");
    fit->add_option("--input", input, "two-column CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        solmz::Scenario sc = solmz::make_scenario(command);
        if (!config.empty()) {
            sc.load_file(config);
        }
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) {
                throw solmz::ConfigError("--set expects section.key=value, got '" + s + "'");
            }
            sc.set(s.substr(0, eq), s.substr(eq + 1));
        }
        if (command == "feshbach") {
            if (!field.empty()) sc.set("feshbach.field_g", field);
            if (!scattering.empty()) sc.set("feshbach.scattering_a0", scattering);
            if (!curve.empty()) sc.set("feshbach.curve_g", curve);
        } else if (command == "varsurface") {
            if (rho_res != 0) sc.set("variational.rho_res", std::to_string(rho_res));
            if (z_res != 0) sc.set("variational.z_res", std::to_string(z_res));
        } else if (command == "fieldmap") {
            if (!input.empty()) sc.set("fieldmap.input", input);
        } else if (command == "fit") {
            if (!input.empty()) sc.set("fit.input", input);
            if (!model.empty()) sc.set("fit.model", model);
        }
        solmz::validate_command(command, sc);
        if (dry_run) {
            std::cout << "# command = " << command << "\n# seed = " << seed
                      << "\n# out = " << out_dir << "\n# workers = " << workers << "\n\n"
                      << sc.dump();
            return 0;
        }
        const solmz::RunContext ctx{out_dir, seed, workers};
        const solmz::CommandResult r = solmz::run_command(command, sc, ctx);
        for (const auto& w : r.warnings) {
            std::cerr << "warning: " << one_line(w) << '\n';
        }
        std::cout << r.report;
        for (const auto& f : r.files) {
            std::cout << "wrote = " << f << '\n';
        }
        return 0;
    } catch (const solmz::Error& e) {
        const bool input_error = e.kind() == "config" || e.kind() == "parse";
        return fail(e.kind(), e.what(), input_error ? 2 : 1);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), 1);
    }
}
