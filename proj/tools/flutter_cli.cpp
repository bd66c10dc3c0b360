// Command-line front end: spectrum, coefficients, threshold scans, bridge
// report and time-series scenarios, all driven by one resolved RunConfig.

#include "run_config.hpp"

#include "flutter/coupled.hpp"
#include "flutter/errors.hpp"
#include "flutter/format.hpp"
#include "flutter/hill.hpp"
#include "flutter/modal_coefficients.hpp"
#include "flutter/plate_spectrum.hpp"
#include "flutter/tnb.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace flutter;
using flutter::cli::ConfigError;
using flutter::cli::RunConfig;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitPartial = 4;

// Writes named tables to the output directory, or to stdout when it is "-".
class Sink {
public:
    explicit Sink(const RunConfig& cfg) : dir_(cfg.output.dir), hash_(cli::config_hash(cfg)) {
        if (dir_ != "-") std::filesystem::create_directories(dir_);
    }

    const std::string& hash() const { return hash_; }

    void csv(const std::string& name, const std::string& body) {
        emit(name, "# config-hash: " + hash_ + "\n" + body);
    }

    void json_lines(const std::string& name, const std::vector<std::string>& records) {
        std::string body;
        for (const std::string& r : records) {
            auto j = nlohmann::ordered_json::parse(r);
            j["config_hash"] = hash_;
            body += j.dump() + "\n";
        }
        emit(name, body);
    }

private:
    void emit(const std::string& name, const std::string& content) {
        if (dir_ == "-") {
            std::cout << content << std::flush;
            return;
        }
        const std::filesystem::path path = std::filesystem::path(dir_) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << content;
        std::cerr << "wrote " << path.string() << '\n';
    }

    std::string dir_;
    std::string hash_;
};

std::string short_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

int cmd_eigs(const RunConfig& cfg, int n) {
    const auto pairs = enumerate_spectrum(n, cfg.plate);
    std::ostringstream os;
    os << "rank,kind,m,k,sqrt_lambda\n";
    int rank = 0;
    for (const Eigenpair& p : pairs) {
        const bool even = p.parity == Parity::Even;
        os << ++rank << ',' << (even ? "mu" : "nu") << ',' << p.m << ',' << p.k << ','
           << fmt17(p.sqrt_lambda()) << '\n';
    }
    Sink(cfg).csv("eigs.csv", os.str());
    return 0;
}

int cmd_coeffs(const RunConfig& cfg, bool with_tensor) {
    const ModeBasis basis = make_basis(cfg.plate);
    const ModalCoefficients c = compute_coefficients(basis, cfg.resolved_gamma());
    validate_coefficients(c);
    Sink sink(cfg);
    std::ostringstream co;
    write_coefficients_csv(co, c);
    sink.csv("coefficients.csv", co.str());
    std::ostringstream to;
    to << "l,nu,a_bar,delta\n";
    for (int l = 1; l <= kTors; ++l) {
        to << l << ',' << fmt17(c.nu[l - 1]) << ',' << fmt17(c.a_bar[l - 1]) << ','
           << fmt17(c.delta[l - 1]) << '\n';
    }
    sink.csv("torsional.csv", to.str());
    if (with_tensor) {
        std::ostringstream te;
        te << "# j1 j2 j3 k value\n";
        write_tensor(te, compute_galerkin_tensor(basis));
        sink.csv("tensor.txt", te.str());
    }
    return 0;
}

int cmd_thresholds(const RunConfig& cfg, const std::string& mode, std::vector<int> ks,
                   std::vector<int> ls, bool traces) {
    if (ks.empty()) {
        for (int k = 1; k <= kLong; ++k) ks.push_back(k);
    }
    if (ls.empty()) ls = {1, 2};
    for (int k : ks) {
        if (k < 1 || k > kLong) throw ConfigError("--k: values must lie in 1..14");
    }
    for (int l : ls) {
        if (l != 1 && l != 2) throw ConfigError("--l: values must be 1 or 2");
    }
    const bool coupled = mode == "coupled";
    const ModeBasis basis = make_basis(cfg.plate);
    const double gamma = cfg.resolved_gamma();
    const ModalCoefficients c = compute_coefficients(basis, gamma);
    std::optional<CoupledSystem> sys;
    if (coupled) sys.emplace(basis, compute_galerkin_tensor(basis), gamma);

    Sink sink(cfg);
    std::ostringstream table;
    table << "k,l,A_crit,E_crit,status\n";
    std::vector<std::string> records;
    std::vector<ThresholdResult> results;
    bool partial = false;
    for (int k : ks) {
        for (int l : ls) {
            const ThresholdResult r = coupled
                                          ? coupled_threshold_scan(*sys, k, l, cfg.coupled_scan_options())
                                          : threshold_scan(k, l, c, cfg.scan_options());
            partial = partial || r.exceeded();
            table << k << ',' << l << ',' << fmt17(r.A_crit.value_or(r.A_max)) << ','
                  << fmt17(r.E_crit) << ',' << (r.exceeded() ? "exceeded" : "found") << '\n';
            records.push_back(threshold_json(r));
            if (traces) {
                std::ostringstream tr;
                if (coupled) {
                    tr << "A,max_ratio,status\n";
                    for (const ScanPoint& p : r.trace) {
                        tr << fmt17(p.A) << ',' << fmt17(p.trace) << ',' << to_string(p.status) << '\n';
                    }
                } else {
                    write_scan_csv(tr, r);
                }
                sink.csv("scan_" + mode + "_k" + std::to_string(k) + "_l" + std::to_string(l) + ".csv",
                         tr.str());
            }
            std::cerr << mode << " k=" << k << " l=" << l << ": "
                      << (r.A_crit ? short_number(*r.A_crit) : ">" + short_number(r.A_max)) << '\n';
            results.push_back(r);
        }
    }
    sink.csv("thresholds_" + mode + ".csv", table.str());
    sink.json_lines("thresholds_" + mode + ".jsonl", records);
    if (!coupled && ls.size() == 2) {
        std::ostringstream fe;
        fe << "k,flutter_energy,l,lower_bound\n";
        for (std::size_t i = 0; i + 1 < results.size(); i += 2) {
            const FlutterEnergy f = flutter_energy(results[i], results[i + 1]);
            fe << results[i].k << ',' << fmt17(f.energy) << ',' << f.l << ','
               << (f.lower_bound ? "true" : "false") << '\n';
        }
        sink.csv("flutter_energy.csv", fe.str());
    }
    return partial ? kExitPartial : 0;
}

// Reads the "k,l,A_crit,E_crit,status" table written by the thresholds command.
std::vector<ThresholdResult> read_threshold_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open thresholds table");
    std::vector<ThresholdResult> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || line.rfind("k,", 0) == 0) continue;
        std::istringstream ls(line);
        std::string field[5];
        for (auto& f : field) std::getline(ls, f, ',');
        ThresholdResult r;
        try {
            r.k = std::stoi(field[0]);
            r.l = std::stoi(field[1]);
            const double A = std::stod(field[2]);
            r.E_crit = std::stod(field[3]);
            if (field[4] == "exceeded") {
                r.A_max = A;
            } else if (field[4] == "found") {
                r.A_crit = A;
            } else {
                throw std::invalid_argument("status");
            }
        } catch (const std::exception&) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed thresholds row");
        }
        rows.push_back(r);
    }
    return rows;
}

int cmd_tnb_report(const RunConfig& cfg, const std::string& thresholds_path) {
    const TnbParameters p = derive_parameters(cfg.tnb);
    const ModeBasis basis = make_basis(cfg.plate);
    Sink sink(cfg);
    sink.json_lines("tnb.jsonl", {parameters_json(p)});
    std::ostringstream norms;
    norms << "k,sup_norm\n";
    for (int k = 1; k <= kLong; ++k) norms << k << ',' << fmt17(sup_norm_mode(k, basis)) << '\n';
    sink.csv("sup_norms.csv", norms.str());
    if (!thresholds_path.empty()) {
        const auto rows = read_threshold_table(thresholds_path);
        std::vector<ThresholdResult> l1, l2;
        for (const ThresholdResult& r : rows) (r.l == 1 ? l1 : l2).push_back(r);
        std::ostringstream os;
        write_displacement_csv(os, displacement_table(l1, l2, basis, p.amplitude_scale()));
        sink.csv("displacement.csv", os.str());
    }
    return 0;
}

struct SimulateArgs {
    std::string scenario;
    int k = 14;
    int l = 1;
    std::vector<double> amplitudes;
    std::optional<double> t_end;
};

int simulate_growth(const RunConfig& cfg, const SimulateArgs& a, const std::string& name) {
    const std::vector<double> amps = a.amplitudes.empty() ? std::vector<double>{0.79, 0.80, 0.81}
                                                          : a.amplitudes;
    const double t_end = a.t_end.value_or(200.0);
    const ModalCoefficients c = compute_coefficients(make_basis(cfg.plate), cfg.resolved_gamma());
    std::vector<GrowthResult> runs;
    for (double A : amps) {
        runs.push_back(growth_simulation(make_hill_problem(c, a.k, a.l, A), t_end,
                                         cfg.integrator_settings(), cfg.output.sample_dt));
    }
    std::ostringstream os, summary;
    os << 't';
    for (double A : amps) os << ",xi_A" << short_number(A);
    os << '\n';
    for (std::size_t i = 0; i < runs.front().samples.size(); ++i) {
        os << fmt17(runs.front().samples[i].t);
        for (const GrowthResult& r : runs) os << ',' << fmt17(r.samples.at(i).xi);
        os << '\n';
    }
    summary << "A,max_abs_xi\n";
    for (std::size_t i = 0; i < amps.size(); ++i) {
        summary << fmt17(amps[i]) << ',' << fmt17(runs[i].max_abs_xi) << '\n';
    }
    Sink sink(cfg);
    sink.csv(name + ".csv", os.str());
    sink.csv(name + "_summary.csv", summary.str());
    return 0;
}

int simulate_coupled(const RunConfig& cfg, const SimulateArgs& a) {
    const ModeBasis basis = make_basis(cfg.plate);
    const CoupledSystem sys(basis, compute_galerkin_tensor(basis), cfg.resolved_gamma());
    const double t_end = a.t_end.value_or(cfg.scan.horizon);
    Sink sink(cfg);
    CoupledState s0;
    if (a.scenario == "phi1") {
        s0.phi[0] = 1.0;
    } else if (a.scenario == "phi2") {
        s0.phi[1] = 1.0;
    } else if (a.scenario == "probe") {
        if (a.amplitudes.size() != 1) throw ConfigError("--A: probe takes exactly one amplitude");
        if (a.l != 1 && a.l != 2) throw ConfigError("--l: must be 1 or 2");
        ProbeConfig pc;
        pc.k = a.k;
        pc.l = ModeBasis::kLongitudinal + a.l;
        pc.A = a.amplitudes.front();
        pc.delta = cfg.scan.delta;
        pc.horizon = t_end;
        pc.growth_ratio = cfg.scan.growth_ratio;
        s0 = probe_initial_state(pc);
        sink.json_lines("probe.jsonl", {probe_json(probe(sys, pc, cfg.coupled_settings()))});
    }
    const CoupledTrajectory traj = integrate(sys, s0, t_end, cfg.coupled_settings(), cfg.output.sample_dt);
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    sink.csv("coupled_" + a.scenario + ".csv", os.str());
    return 0;
}

int run(int argc, char** argv) {
    CLI::App app{"Torsional instability of a suspension bridge deck modelled as a thin plate"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    std::vector<std::string> sets;
    std::string gamma_opt, out_opt;
    std::optional<int> workers_opt;
    bool print_config = false;
    app.add_option("-c,--config", config_path, "INI configuration file");
    app.add_option("--set", sets, "Override a field: section.key=value (repeatable)");
    app.add_option("--gamma", gamma_opt, "Stiffness parameter, an expression or 'tnb'");
    app.add_option("--workers", workers_opt, "Worker threads for scans");
    app.add_option("-o,--out", out_opt, "Output directory, '-' for stdout");
    app.add_flag("--print-config", print_config, "Print the resolved configuration and exit");

    int n_eigs = 16;
    auto* eigs = app.add_subcommand("eigs", "Least eigenvalues of the plate");
    eigs->add_option("-n", n_eigs, "Number of eigenvalues")->check(CLI::PositiveNumber);

    bool with_tensor = false;
    auto* coeffs = app.add_subcommand("coeffs", "Modal coefficients a_k, b_k, a_bar_l, d_lk");
    coeffs->add_flag("--tensor", with_tensor, "Also write the 16-mode tensor");

    std::string mode = "decoupled";
    std::vector<int> ks, ls;
    bool traces = false;
    auto* thresholds = app.add_subcommand("thresholds", "Instability thresholds A_l(k)");
    thresholds->add_option("--mode", mode, "decoupled or coupled")
        ->check(CLI::IsMember({"decoupled", "coupled"}));
    thresholds->add_option("--k", ks, "Longitudinal modes (default 1..14)")->delimiter(',');
    thresholds->add_option("--l", ls, "Torsional modes (default 1,2)")->delimiter(',');
    thresholds->add_flag("--traces", traces, "Write the per-point scan of every (k, l)");

    std::string thresholds_path;
    auto* tnb = app.add_subcommand("tnb-report", "Bridge parameters, sup norms, metric thresholds");
    tnb->add_option("--thresholds", thresholds_path, "Thresholds table to convert to meters");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Time series for plotting");
    simulate->add_option("--scenario", sim.scenario, "triple, growth, phi1, phi2, zero or probe")
        ->required()
        ->check(CLI::IsMember({"triple", "growth", "phi1", "phi2", "zero", "probe"}));
    simulate->add_option("--k", sim.k, "Longitudinal mode");
    simulate->add_option("--l", sim.l, "Torsional mode, 1 or 2");
    simulate->add_option("--A", sim.amplitudes, "Amplitudes")->delimiter(',');
    simulate->add_option("--t-end", sim.t_end, "Final time");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    RunConfig cfg;
    if (!config_path.empty()) cli::load_config_file(config_path, cfg);
    if (!gamma_opt.empty()) cli::apply_setting(cfg, "model", "gamma", gamma_opt, "--gamma");
    if (workers_opt) cli::apply_setting(cfg, "scan", "workers", std::to_string(*workers_opt), "--workers");
    if (!out_opt.empty()) cli::apply_setting(cfg, "output", "dir", out_opt, "--out");
    for (const std::string& s : sets) cli::apply_override(cfg, s);
    if (simulate->parsed() && sim.scenario == "triple") {
        // The figure fixes gamma = 1e-4, k = 14, l = 1.
        cfg.gamma_from_tnb = false;
        cfg.gamma = 1e-4;
        sim.k = 14;
        sim.l = 1;
    }
    cfg.validate();
    if (print_config) {
        std::cout << cli::dump_config(cfg) << "# config-hash: " << cli::config_hash(cfg) << '\n';
        return 0;
    }

    if (eigs->parsed()) return cmd_eigs(cfg, n_eigs);
    if (coeffs->parsed()) return cmd_coeffs(cfg, with_tensor);
    if (thresholds->parsed()) return cmd_thresholds(cfg, mode, ks, ls, traces);
    if (tnb->parsed()) return cmd_tnb_report(cfg, thresholds_path);
    if (sim.scenario == "triple") return simulate_growth(cfg, sim, "triple");
    if (sim.scenario == "growth") return simulate_growth(cfg, sim, "growth");
    return simulate_coupled(cfg, sim);
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
