// wqed: spectra, two-photon wavefunctions, pulse durations and oracle checks
// for a periodic atom array in a waveguide (units gamma_1d = 1).

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wqed/io.hpp"
#include "wqed/oracle.hpp"

using namespace wqed;
using io::Json;

namespace {

struct Usage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Usage("cannot open output file " + path);
    f << text;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        std::size_t pos = 0;
        int v = 0;
        try {
            v = std::stoi(item, &pos);
        } catch (const std::exception&) {
            throw Usage("not an integer list: " + s);
        }
        if (pos != item.size())
            throw Usage("not an integer list: " + s);
        out.push_back(v);
    }
    return out;
}

ModeMask parse_mask(const std::string& single, const std::string& pairs, const Spectra& s) {
    const int ns = s.single.size(), np = s.pairs.size();
    ModeMask m = ModeMask::full(ns, np);
    if (single == "bright")
        m = ModeMask::superradiant_only(ns, np);
    else if (single != "all")
        m.single = parse_int_list(single);
    if (pairs != "all")
        m.pairs = parse_int_list(pairs);
    m.validate(ns, np);
    return m;
}

// Platform-independent uniform deviate in [0, 1).
double uniform01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

int resolve_jobs(int flag) {
    if (flag > 0)
        return flag;
    if (const char* env = std::getenv("WQED_JOBS")) {
        int v = std::atoi(env);
        if (v > 0)
            return v;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-photon delta-pulse scattering on an atom array in a waveguide.\n"
                 "Units: gamma_1d = 1, frequencies from resonance; times in 1/gamma_1d.\n"
                 "Exit codes: 0 ok, 1 invalid input, 2 numerical failure or oracle mismatch."};
    app.require_subcommand(1);

    int jobs = 0;
    app.add_option("--jobs", jobs, "Worker threads (default: WQED_JOBS, else all logical cores)");

    int n_atoms = 0;
    double phase = 0.0;
    auto add_array = [&](CLI::App* sub) {
        sub->add_option("--n", n_atoms, "Number of atoms N")->required();
        sub->add_option("--phi", phase, "Phase between neighbours, 0 or in [1e-3, pi - 1e-3]")->required();
    };

    std::string out_path;
    std::string mask_single = "all", mask_double = "all";
    auto add_mask = [&](CLI::App* sub) {
        sub->add_option("--mask-single", mask_single,
                        "Single-excitation modes: all, bright (fastest-decaying only) or a list like 0,2 "
                        "(0-based, order of the spectrum output)");
        sub->add_option("--mask-double", mask_double, "Two-excitation modes: all or a 0-based list");
    };

    auto* spectrum = app.add_subcommand("spectrum", "Single and double excitation spectra as JSON");
    add_array(spectrum);
    spectrum->add_option("--out", out_path, "Output JSON file (default stdout)");

    double t_max = 10.0, t_min = 1e-2;
    int steps = 200;
    std::string grid_kind = "uniform";
    auto* pulse = app.add_subcommand("pulse", "Wavefunction psi(t1, t2) on a time grid as CSV");
    add_array(pulse);
    pulse->add_option("--tmax", t_max, "Grid extent in 1/gamma")->required();
    pulse->add_option("--steps", steps, "Grid intervals per axis")->required();
    pulse->add_option("--grid", grid_kind, "uniform or geometric")->check(CLI::IsMember({"uniform", "geometric"}));
    pulse->add_option("--tmin", t_min, "First nonzero time of a geometric grid");
    add_mask(pulse);
    pulse->add_option("--out", out_path, "Output CSV file")->required();

    std::string cut_kind;
    double cut_value = 0.0;
    auto* cut = app.add_subcommand("cut", "One-dimensional cut through psi(t1, t2) as CSV");
    add_array(cut);
    cut->add_option("--kind", cut_kind, "diagonal (t1 = t2), antidiagonal (t1 + t2 = value) or edge (t2 = value)")
        ->required()
        ->check(CLI::IsMember({"diagonal", "antidiagonal", "edge"}));
    cut->add_option("--value", cut_value, "Fixed t1 + t2 (antidiagonal) or t2 (edge)");
    cut->add_option("--tmax", t_max, "Extent of the free coordinate; antidiagonal uses t1 - t2 in [-tmax, tmax]")
        ->required();
    cut->add_option("--steps", steps, "Intervals along the cut")->required();
    add_mask(cut);
    cut->add_option("--out", out_path, "Output CSV file (default stdout)");

    std::string method = "exact";
    auto* duration = app.add_subcommand("duration", "Transmitted pulse duration T");
    add_array(duration);
    duration->add_option("--method", method, "exact (closed-form moments) or quadrature")
        ->check(CLI::IsMember({"exact", "quadrature"}));

    std::string n_list = "2,3,4,5";
    double phi_min = 0.02, phi_max = std::numbers::pi - 0.02;
    int phi_steps = 100;
    auto* sweep = app.add_subcommand("sweep", "T over a grid of N and phi as CSV");
    sweep->add_option("--n-list", n_list, "Comma-separated atom numbers");
    sweep->add_option("--phi-min", phi_min, "First phase");
    sweep->add_option("--phi-max", phi_max, "Last phase");
    sweep->add_option("--phi-steps", phi_steps, "Number of phases (endpoints included)");
    sweep->add_option("--out", out_path, "Output CSV file (default stdout)");

    int samples = 5;
    std::uint64_t seed = 1;
    auto* oracle = app.add_subcommand(
        "oracle-check", "Compare analytic psi_incoh and Sigma with quadrature at seeded random points (JSON)");
    add_array(oracle);
    oracle->add_option("--samples", samples, "Random points per check")->required();
    oracle->add_option("--seed", seed, "Seed for the sample points")->required();
    oracle->add_option("--out", out_path, "Output JSON file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Help and version exit 0; every malformed command line exits 1.
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        set_thread_count(resolve_jobs(jobs));
        ArrayConfig cfg{n_atoms, phase};

        if (*spectrum) {
            write_output(out_path, io::dump(io::spectrum_report(cfg)) + "\n");
            return 0;
        }

        if (*pulse) {
            cfg.validate_for_pulse();
            Spectra s = Spectra::compute(cfg);
            ModeMask mask = parse_mask(mask_single, mask_double, s);
            TimeGrid grid;
            grid.kind = grid_kind == "uniform" ? TimeGrid::Kind::Uniform : TimeGrid::Kind::Geometric;
            grid.t_max = t_max;
            grid.steps = steps;
            grid.t_min = t_min;
            TwoPhotonField field = wavefunction_grid(PulseModel(s, mask), grid);
            for (const auto& w : field.warnings)
                std::cerr << "warning: " << w << "\n";
            write_output(out_path, io::field_csv(field));
            return 0;
        }

        if (*cut) {
            cfg.validate_for_pulse();
            Spectra s = Spectra::compute(cfg);
            ModeMask mask = parse_mask(mask_single, mask_double, s);
            CutKind kind = cut_kind == "diagonal" ? CutKind::Diagonal
                           : cut_kind == "edge"   ? CutKind::Edge
                                                  : CutKind::Antidiagonal;
            auto samples_out = evaluate_cut(PulseModel(s, mask), kind, cut_value, t_max, steps);
            Json meta{{"config", io::to_json(cfg)},
                      {"mask", io::to_json(mask)},
                      {"cut", Json{{"kind", cut_kind}, {"value", cut_value}, {"extent", t_max}, {"steps", steps}}}};
            write_output(out_path, io::cut_csv(samples_out, meta));
            return 0;
        }

        if (*duration) {
            cfg.validate_for_pulse();
            DurationResult r = method == "exact" ? pulse_duration(cfg)
                                                 : pulse_duration_quadrature(PulseModel::build(cfg));
            SweepResult one;
            one.rows.push_back({cfg.n_atoms, cfg.phase, r, r.converged ? 0 : 2, ""});
            std::cout << io::sweep_csv(one);
            if (!r.converged) {
                std::cerr << "error: duration did not converge (tail estimate "
                          << io::format_double(r.tail_estimate) << ")\n";
                return 2;
            }
            return 0;
        }

        if (*sweep) {
            if (phi_steps < 1)
                throw Usage("--phi-steps must be >= 1");
            std::vector<double> grid(phi_steps);
            for (int k = 0; k < phi_steps; ++k)
                grid[k] = phi_steps == 1 ? phi_min : phi_min + (phi_max - phi_min) * k / (phi_steps - 1);
            SweepResult r = duration_sweep(parse_int_list(n_list), grid);
            write_output(out_path, io::sweep_csv(r));
            for (const auto& row : r.rows)
                if (row.status != 0)
                    std::cerr << "error: N=" << row.n_atoms << " phi=" << io::format_double(row.phase) << ": "
                              << row.error << "\n";
            return r.worst_status();
        }

        if (*oracle) {
            cfg.validate_for_pulse();
            if (samples < 1)
                throw Usage("--samples must be >= 1");
            std::mt19937_64 rng(seed);
            Spectra s = Spectra::compute(cfg);
            ModeMask full = ModeMask::full(s.single.size(), s.pairs.size());
            PulseModel model(s, full);
            Json checks = Json::array();
            bool pass = true;
            for (int k = 0; k < samples; ++k) {
                double t1 = 0.2 + 4.8 * (1.0 - uniform01(rng));
                double t2 = 0.2 + 4.8 * (1.0 - uniform01(rng));
                cplx a = model.incoherent(t1, t2);
                ScalarEstimate e = psi_incoherent_numeric(cfg, t1, t2);
                double abs_err = std::abs(a - e.value);
                double rel_err = abs_err / std::abs(e.value);
                pass = pass && rel_err < 1e-3;
                checks.push_back(Json{{"kind", "psi_incoherent"},
                                      {"point", Json::array({t1, t2})},
                                      {"analytic", io::to_json(a)},
                                      {"numeric", io::to_json(e.value)},
                                      {"abs_err", abs_err},
                                      {"rel_err", rel_err},
                                      {"quadrature_err", e.error}});
            }
            double top = -1e300;
            for (int k = 0; k < cfg.n_atoms; ++k)
                top = std::max(top, s.single.eigenvalues(k).imag());
            for (int k = 0; k < samples; ++k) {
                double re = (2.0 * uniform01(rng) - 1.0) * 2.0 * cfg.n_atoms;
                double im = 0.5 * top + 0.05 + 2.0 * uniform01(rng);
                cplx eps(re, im);
                CMatrix a = sigma_matrix(s.single, eps);
                MatrixEstimate e = sigma_numeric(cfg, eps);
                double abs_err = (a - e.value).cwiseAbs().maxCoeff();
                double rel_err = abs_err / e.value.cwiseAbs().maxCoeff();
                pass = pass && rel_err < 1e-6;
                Json an = Json::array(), nu = Json::array();
                for (int m = 0; m < cfg.n_atoms; ++m)
                    for (int q = 0; q < cfg.n_atoms; ++q) {
                        an.push_back(io::to_json(a(m, q)));
                        nu.push_back(io::to_json(e.value(m, q)));
                    }
                checks.push_back(Json{{"kind", "sigma"},
                                      {"point", io::to_json(eps)},
                                      {"analytic", an},
                                      {"numeric", nu},
                                      {"abs_err", abs_err},
                                      {"rel_err", rel_err},
                                      {"quadrature_err", e.error}});
            }
            Json report{{"config", io::to_json(cfg)},
                        {"seed", seed},
                        {"tolerances", Json{{"psi_incoherent_rel", 1e-3}, {"sigma_rel", 1e-6}}},
                        {"passed", pass},
                        {"checks", checks}};
            write_output(out_path, io::dump(report) + "\n");
            return pass ? 0 : 2;
        }
    } catch (const QuadratureNotConverged& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const Usage& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
