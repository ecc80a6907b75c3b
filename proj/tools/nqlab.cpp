#include <CLI11.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>

#include "json.hpp"
#include "nqlab/control.hpp"
#include "nqlab/dynamics.hpp"
#include "nqlab/errors.hpp"
#include "nqlab/goldbach_cascade.hpp"
#include "nqlab/io.hpp"
#include "nqlab/lattice.hpp"
#include "nqlab/numtheory.hpp"
#include "nqlab/semiclassics.hpp"
#include "nqlab/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nqlab;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string sha256(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string error_name(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
    if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
    if (dynamic_cast<const ResolutionError*>(&e)) return "ResolutionError";
    if (dynamic_cast<const StabilityError*>(&e)) return "StabilityError";
    if (dynamic_cast<const RefinementError*>(&e)) return "RefinementError";
    return "Error";
}

// A run that completed but failed its own validation.
struct ValidationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Output directory, artifacts and manifest for one subcommand invocation.
class Run {
public:
    Run(CLI::App* sub, std::string out, std::vector<std::string> inputs)
        : sub_(sub), out_(std::move(out)), inputs_(std::move(inputs)), t0_(std::chrono::steady_clock::now()) {
        for (const auto& p : inputs_)
            if (!fs::exists(p)) throw ConfigError("input file '" + p + "' does not exist");
        fs::create_directories(out_);
    }

    void write(const std::string& name, const std::string& content) {
        io::write_file((fs::path(out_) / name).string(), content);
        artifacts_[name] = sha256(content);
    }
    void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

    void finish(std::uint64_t seed = 0) {
        json params = json::object();
        std::string canonical = sub_->get_name() + "\n";
        for (const CLI::Option* opt : sub_->get_options()) {
            if (opt->get_name() == "--help" || opt->get_name().empty()) continue;
            std::string v;
            if (opt->count() > 0) {
                for (std::size_t i = 0; i < opt->results().size(); ++i) v += (i ? "," : "") + opt->results()[i];
            } else {
                v = opt->get_default_str();
            }
            const std::string name = opt->get_name(false, true);
            params[name] = v;
            // Output location and thread count do not change artifact content.
            if (name != "--out" && name != "--jobs") canonical += name + "=" + v + "\n";
        }
        for (const auto& p : inputs_) canonical += io::read_file(p);
        json m = {{"tool", "nqlab"},
                  {"version", kVersion},
                  {"subcommand", sub_->get_name()},
                  {"parameters", params},
                  {"seed", seed},
                  {"inputs_sha256", sha256(canonical)},
                  {"artifacts", artifacts_},
                  {"libraries", {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." + std::to_string(EIGEN_MINOR_VERSION)}, {"cxx", __VERSION__}}},
                  {"wall_time_s", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count()}};
        io::write_file((fs::path(out_) / "manifest.json").string(), m.dump(2) + "\n");
    }

private:
    CLI::App* sub_;
    std::string out_;
    std::vector<std::string> inputs_;
    std::chrono::steady_clock::time_point t0_;
    std::map<std::string, std::string> artifacts_;
};

// Apply "key = value" lines from --config to options not given on the command line.
void apply_config(CLI::App* sub, const std::string& path) {
    if (path.empty()) return;
    const auto cfg = io::KeyValueConfig::load(path);
    for (const auto& [key, value] : cfg.values()) {
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (!opt || key == "config") throw ConfigError("config: unknown key '" + key + "' for '" + sub->get_name() + "'");
        if (opt->count() > 0) continue;
        if (opt->get_expected_max() > 1) {
            std::string v = value;
            for (char& c : v)
                if (c == ',') c = ' ';
            std::istringstream in(v);
            std::string tok;
            while (in >> tok) opt->add_result(tok);
        } else {
            opt->add_result(value);
        }
        opt->run_callback();
    }
}

struct PotentialSource {
    std::string kind = "primes";
    int nb = 20;
    std::vector<int> holes;
    std::vector<double> energies;
    std::string potential_file;
    double L = 0.0;
    int M = 0;

    void add(CLI::App* sub) {
        sub->add_option("--kind", kind, "Sequence kind: primes, primes-gt2, ln-naturals, ln-naturals-holes, ln-sum-two-squares, custom")
            ->capture_default_str();
        sub->add_option("--nb", nb, "Number of bound states")->capture_default_str();
        sub->add_option("--holes", holes, "Missing labels (ln-naturals-holes)")->delimiter(',');
        sub->add_option("--energies", energies, "Target energies for --kind custom")->delimiter(',');
        sub->add_option("--potential", potential_file, "Potential JSON instead of synthesizing");
        sub->add_option("--L", L, "Grid half width (0: automatic)")->capture_default_str();
        sub->add_option("--M", M, "Grid points (0: automatic)")->capture_default_str();
    }

    Spectrum spectrum() const {
        const auto k = sequence_kind_from_string(kind);
        if (k == SequenceKind::Custom) {
            if (energies.empty()) throw ConfigError("--kind custom needs --energies");
            return custom_spectrum(energies);
        }
        return target_spectrum({k, nb, holes});
    }

    std::vector<std::string> inputs() const {
        return potential_file.empty() ? std::vector<std::string>{} : std::vector<std::string>{potential_file};
    }

    // Potential from file or synthesis; `report` is filled when synthesized.
    Potential load(SynthesisReport* report = nullptr, const SynthesisOptions& opts = {}) const {
        if (!potential_file.empty()) return io::potential_from_json(io::read_file(potential_file));
        const Spectrum s = spectrum();
        Grid g = recommended_grid(s);
        if (L > 0 || M > 0) g = Grid(L > 0 ? L : g.L, M > 0 ? M : g.M);
        auto r = synthesize_potential(s, g, opts);
        if (report) *report = r.report;
        if (!r.report.converged) throw ValidationFailure("synthesis did not converge: " + r.report.message);
        return r.potential;
    }
};

// ---- synth ------------------------------------------------------------------

void cmd_synth(CLI::App* sub, PotentialSource& src, const std::string& out, const std::string& config) {
    SynthesisOptions opts;
    if (!config.empty()) opts = io::synthesis_options_from(io::KeyValueConfig::load(config));
    auto inputs = src.inputs();
    if (!config.empty()) inputs.push_back(config);
    Run run(sub, out, inputs);
    const Spectrum s = src.spectrum();
    Grid g = recommended_grid(s);
    if (src.L > 0 || src.M > 0) g = Grid(src.L > 0 ? src.L : g.L, src.M > 0 ? src.M : g.M);
    const auto r = synthesize_potential(s, g, opts);
    run.write("spectrum.json", io::spectrum_json(s));
    run.write("potential.json", io::potential_json(r.potential));
    run.write("potential.csv", io::potential_csv(r.potential));

    json levels = json::array();
    double worst = 0.0;
    int bound = 0;
    try {
        const auto basis = solve_bound_states(r.potential);
        bound = basis.count;
        for (std::size_t n = 0; n < s.size(); ++n) {
            const double e = n < basis.energies.size() ? basis.energies[n] : NAN;
            const double res = std::abs(e - s.energies[n]);
            worst = std::max(worst, std::isnan(res) ? INFINITY : res);
            levels.push_back({{"label", s.labels[n]}, {"target", s.energies[n]}, {"forward", e}, {"residual", res}});
        }
    } catch (const ResolutionError& e) {
        throw ValidationFailure(std::string("forward solve rejected the grid: ") + e.what());
    }
    json report = json::parse(io::synthesis_report_json(r.report));
    report["forward_max_residual"] = worst;
    report["forward_bound_count"] = bound;
    report["tolerance"] = opts.tolerance;
    report["grid"] = {{"L", g.L}, {"M", g.M}, {"dx", g.dx()}};
    report["levels"] = levels;
    run.write_json("synthesis.json", report);
    run.finish();
    std::cout << json{{"kind", src.kind}, {"N_b", s.size()}, {"max_residual", worst}, {"converged", r.report.converged}}.dump()
              << "\n";
    if (!r.report.converged || worst > opts.tolerance || bound != static_cast<int>(s.size()))
        throw ValidationFailure("forward-solved spectrum misses the target (max residual " + std::to_string(worst) + ")");
}

// ---- eig --------------------------------------------------------------------

void cmd_eig(CLI::App* sub, PotentialSource& src, const std::string& out, int states, int csv_states) {
    Run run(sub, out, src.inputs());
    const Potential pot = src.load();
    const EigenBasis b = states > 0 ? solve_states(pot, states) : solve_bound_states(pot);
    run.write("eigen.json", json{{"count", b.count}, {"energies", b.energies}, {"threshold", pot.threshold}}.dump(2) + "\n");
    run.write("basis.csv", io::basis_csv(b, csv_states));
    const int K = std::min(b.size(), 10);
    std::string me = io::csv_row({"operator", "m", "n", "value"});
    for (auto [name, f] : {std::pair{"x", drive_profile(pot, DriveForm::Linear)}, {"x2", drive_profile(pot, DriveForm::Quadratic)}}) {
        const auto Fm = operator_matrix(b, f, K);
        for (int m = 0; m < K; ++m)
            for (int n = 0; n < K; ++n)
                me += io::csv_row({name, std::to_string(m), std::to_string(n), io::format_double(Fm(m, n))});
    }
    run.write("matrix_elements.csv", me);
    run.finish();
    std::cout << json{{"count", b.count}, {"E0", b.energies.front()}}.dump() << "\n";
}

// ---- rabi / lineshape -------------------------------------------------------

struct RabiArgs {
    std::string preset;
    int target = 1;
    double beta = 0.25;
    std::string form;
    double detuning = 0.0, T = 0.0, dt = 0.01;
    int galerkin = 60;
    std::string mode = "eigenbasis";

    void add(CLI::App* sub) {
        sub->add_option("--target", target, "Target level (source is the ground state)")->capture_default_str();
        sub->add_option("--beta", beta, "Drive strength")->capture_default_str();
        sub->add_option("--form", form, "linear or quadratic (default: by target parity)");
        sub->add_option("--dt", dt, "Time step")->capture_default_str();
        sub->add_option("--galerkin", galerkin, "Eigenbasis size")->capture_default_str();
        sub->add_option("--mode", mode, "grid or eigenbasis")->capture_default_str();
    }
    RabiConfig config() const {
        RabiConfig c = default_rabi_config(target, beta);
        if (!form.empty()) c.form = drive_form_from_string(form);
        c.detuning = detuning;
        c.T = T;
        c.dt = dt;
        c.galerkin_states = galerkin;
        c.mode = propagation_mode_from_string(mode);
        return c;
    }
};

json rabi_json(const RabiResult& r, const RabiConfig& c) {
    return {{"target", c.target},
            {"form", to_string(c.form)},
            {"beta", c.beta},
            {"omega", r.omega},
            {"matrix_element", r.matrix_element},
            {"rabi_frequency", r.rabi_frequency},
            {"peak_population", r.peak_population},
            {"t_peak", r.t_peak},
            {"leakage", r.leakage},
            {"max_populations", r.max_populations}};
}

std::vector<std::string> index_names(const std::vector<int>& idx) {
    std::vector<std::string> out;
    for (int n : idx) out.push_back(std::to_string(n));
    return out;
}

void cmd_rabi(CLI::App* sub, PotentialSource& src, RabiArgs a, const std::string& out) {
    std::vector<RabiConfig> runs;
    if (a.preset.empty()) runs.push_back(a.config());
    else if (a.preset == "fig3") {
        runs.push_back(default_rabi_config(1, 0.25));
        runs.push_back(default_rabi_config(2, 0.5));
    } else throw ConfigError("unknown rabi preset '" + a.preset + "' (fig3)");
    Run run(sub, out, src.inputs());
    const Potential pot = src.load();
    const EigenBasis b = solve_states(pot, std::max(60, a.galerkin));
    json all = json::array();
    for (const auto& c : runs) {
        const auto r = rabi_experiment(pot, b, c);
        const std::string tag = "0to" + std::to_string(c.target);
        run.write("trajectory_" + tag + ".csv", io::trajectory_csv(r.trajectory, index_names(r.trajectory.tracked)));
        all.push_back(rabi_json(r, c));
    }
    run.write_json("rabi.json", all);
    run.finish();
    std::cout << all.dump() << "\n";
}

void cmd_lineshape(CLI::App* sub, PotentialSource& src, RabiArgs a, const std::string& out, double span, int points,
                   double periods, unsigned jobs) {
    std::vector<RabiConfig> runs;
    if (a.preset.empty()) runs.push_back(a.config());
    else if (a.preset == "fig4") {
        for (double beta : {0.125, 0.25}) runs.push_back(default_rabi_config(1, beta));
        for (double beta : {0.25, 0.5}) runs.push_back(default_rabi_config(2, beta));
    } else throw ConfigError("unknown lineshape preset '" + a.preset + "' (fig4)");
    Run run(sub, out, src.inputs());
    const Potential pot = src.load();
    const EigenBasis b = solve_states(pot, std::max(60, a.galerkin));
    json all = json::array();
    for (const auto& c : runs) {
        const double rabi = c.beta * std::abs(matrix_element(b, drive_profile(pot, c.form), 0, c.target));
        const auto f = lineshape_scan(pot, b, c, span * rabi, points, periods, jobs);
        std::string csv = io::csv_row({"detuning", "peak_population", "lorentzian"});
        for (std::size_t i = 0; i < f.detunings.size(); ++i) {
            const double d = f.detunings[i] - f.center, w2 = 0.25 * f.fwhm * f.fwhm;
            csv += io::csv_row({io::format_double(f.detunings[i]), io::format_double(f.peak_populations[i]),
                                io::format_double(f.amplitude * w2 / (w2 + d * d))});
        }
        std::ostringstream tag;
        tag << "lineshape_0to" << c.target << "_beta" << c.beta << ".csv";
        run.write(tag.str(), csv);
        all.push_back({{"target", c.target}, {"form", to_string(c.form)}, {"beta", c.beta}, {"fwhm", f.fwhm},
                       {"predicted_fwhm", 2.0 * f.predicted_rabi}, {"ratio", f.fwhm / (2.0 * f.predicted_rabi)},
                       {"center", f.center}, {"amplitude", f.amplitude}, {"window", f.window},
                       {"window_too_short", f.window_too_short}});
    }
    run.write_json("lineshape.json", all);
    run.finish();
    std::cout << all.dump() << "\n";
}

// ---- grape ------------------------------------------------------------------

struct GrapeArgs {
    std::string preset;
    double beta = 1.0;
    int power = 2;
    int source = 0, target = 2;
    double T = 5.0, dt = 0.05, lambda = 1e-3;
    std::vector<double> T_list;
    int restarts = 50, max_iter = 400, basis = 20;
    std::uint64_t seed = 1;
    bool stop_on_success = false;
};

json report_json(const OptimizationReport& r) {
    return {{"fidelity", r.fidelity}, {"infidelity", r.infidelity}, {"objective", r.objective},
            {"propagated_fidelity", r.propagated_fidelity}, {"grid_fidelity", r.grid_fidelity},
            {"iterations", r.iterations}, {"restarts_used", r.restarts_used}, {"best_restart", r.best_restart},
            {"converged", r.converged}};
}

void cmd_grape(CLI::App* sub, PotentialSource& src, const GrapeArgs& a, const std::string& out, unsigned jobs) {
    struct Row {
        double beta;
        int power, target;
        double T;
    };
    std::vector<Row> rows;
    if (a.preset.empty()) rows.push_back({a.beta, a.power, a.target, a.T});
    else if (a.preset == "table1")
        rows = {{0.5, 2, 2, 9.5}, {1, 2, 2, 5.0}, {2, 2, 2, 3.0}, {10, 2, 2, 2.0},
                {0.5, 1, 1, 7.5}, {1, 1, 1, 5.5}, {1, 1, 3, 9.0}, {2, 1, 1, 4.0}, {2, 1, 3, 7.0}};
    else throw ConfigError("unknown grape preset '" + a.preset + "' (table1)");
    if (a.power != 1 && a.power != 2) throw ConfigError("--n must be 1 or 2");
    Run run(sub, out, src.inputs());
    const Potential pot = src.load();
    const EigenBasis b = solve_states(pot, std::max(a.basis, 60));
    GrapeOptions o;
    o.restarts = a.restarts;
    o.jobs = jobs;
    o.max_iterations = a.max_iter;
    o.stop_on_success = a.stop_on_success || !a.preset.empty();
    json all = json::array();
    for (const auto& row : rows) {
        ControlProblem p;
        p.beta = row.beta;
        p.form = row.power == 1 ? DriveForm::Linear : DriveForm::Quadratic;
        p.source = a.source;
        p.target = row.target;
        p.lambda = a.lambda;
        p.basis_states = a.basis;
        std::ostringstream tag;
        tag << "beta" << row.beta << "_n" << row.power << "_" << p.source << "to" << p.target;
        if (!a.T_list.empty() && a.preset.empty()) {
            const auto curve = min_time_curve(pot, b, p, a.T_list, a.seed, o, a.dt);
            std::string csv = io::csv_row({"T", "best_infidelity"});
            for (const auto& c : curve) csv += io::csv_row({io::format_double(c.T), io::format_double(c.best_infidelity)});
            run.write("curve_" + tag.str() + ".csv", csv);
            all.push_back({{"problem", tag.str()}, {"threshold_time", threshold_time(curve, 0.01)}});
            continue;
        }
        p.n_steps = std::max(1, static_cast<int>(std::lround(row.T / a.dt)));
        p.T = p.n_steps * a.dt;
        const auto r = grape_optimize(pot, b, p, a.seed, o);
        run.write("pulse_" + tag.str() + ".csv", io::pulse_csv(r.pulse));
        json j = report_json(r.report);
        j["problem"] = tag.str();
        j["T"] = p.T;
        all.push_back(j);
    }
    run.write_json("grape.json", all);
    run.finish(a.seed);
    std::cout << all.dump() << "\n";
}

// ---- cascade ----------------------------------------------------------------

struct CascadeArgs {
    std::string preset = "fig3b";
    std::vector<double> windows;
    bool no_windows = false;
    std::vector<int> holes;
    double beta = -1, T = -1, dt = -1, window_duration = -1;
    std::string mode;
    long initial = 0;
    int extra_states = -1;
    bool absorber = false;
};

void cmd_cascade(CLI::App* sub, const CascadeArgs& a, const std::string& out) {
    CascadeConfig c = cascade_preset(a.preset);
    if (!a.windows.empty()) c.window_starts = a.windows;
    if (a.no_windows) c.window_starts.clear();
    if (!a.holes.empty()) c.spec = {SequenceKind::LnNaturalsWithHoles, c.spec.count, a.holes};
    if (a.beta >= 0) c.beta = a.beta;
    if (a.T > 0) c.T = a.T;
    if (a.dt > 0) c.dt = a.dt;
    if (a.window_duration >= 0) c.window_duration = a.window_duration;
    if (!a.mode.empty()) c.mode = propagation_mode_from_string(a.mode);
    if (a.initial > 0) c.initial_label = a.initial;
    if (a.extra_states >= 0) c.extra_states = a.extra_states;
    c.absorber = a.absorber;
    Run run(sub, out, {});
    const auto r = cascade_experiment(c);
    std::vector<std::string> names;
    for (long l : r.tracked_labels) names.push_back(std::to_string(l));
    run.write("trajectory.csv", io::trajectory_csv(r.trajectory, names));
    json peaks = json::object();
    for (std::size_t i = 0; i < r.tracked_labels.size(); ++i)
        peaks[std::to_string(r.tracked_labels[i])] = {{"max", r.max_population[i]}, {"t", r.trajectory.peak_time[i]}};
    json j = {{"preset", a.preset},
              {"verdict", to_string(r.verdict)},
              {"omega", r.omega},
              {"window_starts", c.window_starts},
              {"window_duration", r.window_duration},
              {"levels", r.spectrum.size()},
              {"mode", to_string(c.mode)},
              {"dt", c.dt},
              {"T", c.T},
              {"min_cascade_fraction", r.min_cascade_fraction},
              {"min_fraction_27_9", r.min_fraction({27, 9})},
              {"min_fraction_27_81", r.min_fraction({27, 81})},
              {"peaks", peaks},
              {"synthesis_residual", r.synthesis.final_residual}};
    run.write_json("cascade.json", j);
    run.finish();
    std::cout << json{{"verdict", j["verdict"]}, {"min_cascade_fraction", r.min_cascade_fraction}}.dump() << "\n";
}

// ---- lattice ----------------------------------------------------------------

void cmd_lattice(CLI::App* sub, std::string preset, double J0, double gamma, int m_left, int m_right, double tol,
                 const std::string& out) {
    if (preset == "fig7") gamma = 0.3;
    else if (preset == "fig8") gamma = std::log(3.0);
    else if (!preset.empty()) throw ConfigError("unknown lattice preset '" + preset + "' (fig7, fig8)");
    Run run(sub, out, {});
    const ExponentialLattice lat(J0, gamma, m_left, m_right);
    const auto spec = diagonalize(lat);
    std::string csv = io::csv_row({"index", "E", "center", "residual_rel"});
    for (std::size_t k = 0; k < spec.states.size(); ++k) {
        const auto& s = spec.states[k];
        csv += io::csv_row({std::to_string(k), io::format_double(s.energy), io::format_double(s.center),
                            io::format_double(s.residual_rel)});
    }
    run.write("lattice_spectrum.csv", csv);

    const int margin = bulk_margin(gamma, tol);
    const auto tc = translation_checks(lat, spec, 2, margin);
    double worst_translation = 0.0;
    for (const auto& c : tc) worst_translation = std::max(worst_translation, c.relative_error);

    json tails = json::array();
    std::string states_csv = io::csv_row({"E", "m", "psi", "dark_state", "cf"});
    for (double E : {J0, -J0}) {
        const auto& st = spec.states[spec.nearest(E)];
        const int mds = dark_state_anchor(lat, E), mcf = cf_anchor(lat, E);
        const auto ds = dark_state_tail(lat, st, mds);
        const auto cf = cf_tail(lat, st, mcf, m_right);
        for (int m = m_left; m <= m_right; ++m) {
            std::string dsv, cfv;
            if (m <= mds) dsv = io::format_double(ds.predicted[mds - m]);
            if (m >= mcf) cfv = io::format_double(cf.predicted[m - mcf]);
            states_csv += io::csv_row({io::format_double(E), std::to_string(m), io::format_double(st.psi[lat.index(m)]), dsv, cfv});
        }
        tails.push_back({{"E", st.energy}, {"energy_error", std::abs(st.energy - E)}, {"m_DS", mds},
                         {"dark_state_residual", ds.max_relative_residual}, {"dark_state_valid", ds.valid},
                         {"m_CF", mcf}, {"cf_residual", cf.max_relative_residual}, {"cf_valid", cf.valid}});
    }
    run.write("lattice_states.csv", states_csv);
    double worst_rel = 0.0;
    for (const auto& s : spec.states) worst_rel = std::max(worst_rel, s.residual_rel);
    json j = {{"J0", J0}, {"gamma", gamma}, {"sites", lat.sites()}, {"m_left", m_left}, {"m_right", m_right},
              {"pairing_error", parity_pairing_error(spec)}, {"max_residual_rel", worst_rel},
              {"translation", {{"dm", 2}, {"edge_margin", margin}, {"checks", tc.size()}, {"worst_relative_error", worst_translation}}},
              {"tails", tails}};
    run.write_json("lattice.json", j);
    run.finish();
    std::cout << j.dump() << "\n";
}

// ---- semiclassics -----------------------------------------------------------

void cmd_semiclassics(CLI::App* sub, PotentialSource& src, int n_center, int dmin, int dmax, int diag_lo, int diag_hi,
                      const std::string& out) {
    Run run(sub, out, src.inputs());
    const Potential pot = src.load();
    const EigenBasis b = solve_bound_states(pot);
    const auto fit = fit_amplitude_A(b, pot, n_center, dmin, dmax);
    std::string csv = io::csv_row({"dn", "numeric", "semiclassical", "ratio"});
    for (std::size_t i = 0; i < fit.deltas.size(); ++i)
        csv += io::csv_row({std::to_string(fit.deltas[i]), io::format_double(fit.numeric[i]),
                            io::format_double(fit.semiclassical[i]), io::format_double(fit.numeric[i] / fit.semiclassical[i])});
    run.write("offdiagonal.csv", csv);
    std::string dcsv = io::csv_row({"n", "numeric", "virial", "difference"});
    double worst = 0.0;
    diag_hi = std::min(diag_hi, b.count);
    for (int n = diag_lo; n <= diag_hi; ++n) {
        const double num = matrix_element(b, pot.values, n - 1, n - 1), vir = diag_virial(n);
        worst = std::max(worst, std::abs(num - vir));
        dcsv += io::csv_row({std::to_string(n), io::format_double(num), io::format_double(vir), io::format_double(num - vir)});
    }
    run.write("diagonal.csv", dcsv);
    json j = {{"n_center", n_center}, {"dmin", dmin}, {"dmax", dmax}, {"A", fit.A},
              {"max_relative_deviation", fit.max_relative_deviation}, {"sign_pattern_ok", fit.sign_pattern_ok},
              {"max_odd_element", fit.max_odd_element}, {"diagonal_max_error", worst}};
    run.write_json("semiclassics.json", j);
    run.finish();
    std::cout << j.dump() << "\n";
}

// ---- numtheory / goldbach-graph ----------------------------------------------

void cmd_numtheory(CLI::App* sub, std::uint64_t census, const std::string& spectrum_kind, int count, const std::string& out,
                   unsigned jobs) {
    Run run(sub, out, {});
    json j = json::object();
    if (census > 0) {
        const auto c = nlt_census(census, jobs);
        std::string csv = io::csv_row({"w", "is_nlt", "partition_count"});
        for (const auto& r : c.rows)
            csv += io::csv_row({std::to_string(r.w), r.status == NltStatus::Nlt ? "1" : "0", std::to_string(r.partition_count)});
        run.write("census.csv", csv);
        const auto lem = verify_nlt_lemmas(census, jobs);
        j["census"] = {{"limit", census},
                       {"nlt_count", c.count},
                       {"lower_bound", static_cast<double>(census) / 30.0 - 19.0 / 15.0},
                       {"lower_bound_ok", c.lower_bound_check},
                       {"ratio_to_n_over_6", c.estimate_ratio},
                       {"provable_sequence_ok", c.provable_sequence_ok},
                       {"goldbach_violations", c.goldbach_violations},
                       {"lemma_twin_mod3_failures", lem.lemma1_failures},
                       {"lemma_2mod6_failures", lem.lemma2_failures},
                       {"sequence_failures", lem.sequence_failures},
                       {"all_ok", lem.all_ok()}};
        if (!lem.all_ok()) {
            run.write_json("numtheory.json", j);
            run.finish();
            throw ValidationFailure("a lemma check failed");
        }
    }
    if (!spectrum_kind.empty()) {
        const auto s = target_spectrum({sequence_kind_from_string(spectrum_kind), count, {}});
        run.write("spectrum.json", io::spectrum_json(s));
        j["spectrum"] = {{"kind", spectrum_kind}, {"count", s.size()}};
    }
    run.write_json("numtheory.json", j);
    run.finish();
    std::cout << j.dump() << "\n";
}

void cmd_goldbach(CLI::App* sub, std::uint64_t w_max, const std::string& out) {
    Run run(sub, out, {});
    const auto g = build_graph(w_max);
    const auto r = classify_transitions(g);
    json levels = json::array();
    for (const auto& [w, states] : g.levels) {
        json st = json::array();
        for (const auto& s : states) st.push_back({s.p1, s.p2});
        levels.push_back({{"w", w}, {"states", st}});
    }
    json edges = json::array();
    for (const auto& [s, t] : g.one_body_edges) edges.push_back({{s.p1, s.p2}, {t.p1, t.p2}});
    json trans = json::array();
    std::string csv = io::csv_row({"w", "class", "degeneracy"});
    for (const auto& [w, c] : g.transitions) {
        trans.push_back({{"from", w}, {"to", w + 2}, {"class", to_string(c)}});
        csv += io::csv_row({std::to_string(w), to_string(c), std::to_string(g.level(w).size())});
    }
    run.write_json("graph.json", {{"w_max", w_max}, {"levels", levels}, {"one_body_edges", edges}, {"transitions", trans}});
    run.write("transitions.csv", csv);
    json j = {{"w_max", w_max},
              {"first_two_body_assisted", r.first_assisted},
              {"two_body_assisted_count", r.two_body_assisted.size()},
              {"goldbach_violations", r.violations},
              {"nlt_mismatches", r.nlt_mismatches},
              {"counts_by_octave", r.counts_by_octave},
              {"count_growing", r.count_growing},
              {"all_levels_reachable", r.all_levels_reachable}};
    run.write_json("goldbach.json", j);
    run.finish();
    std::cout << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Number-theory quantum potentials: synthesis, dynamics, control and lattice tools"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    unsigned jobs = 1;
    std::string out, config;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--jobs", jobs, "Worker threads for sweeps")->capture_default_str();
        sub->add_option("--out", out, "Output directory")->default_str("nqlab-" + sub->get_name());
        sub->add_option("--config", config, "Key-value config file");
    };

    PotentialSource src;
    auto* synth = app.add_subcommand("synth", "Synthesize a potential from a number sequence");
    src.add(synth);
    common(synth);

    PotentialSource eig_src;
    int eig_states = 0, eig_csv = 10;
    auto* eig = app.add_subcommand("eig", "Eigenstates and matrix elements of a potential");
    eig_src.add(eig);
    eig->add_option("--states", eig_states, "States to solve (0: all bound)")->capture_default_str();
    eig->add_option("--csv-states", eig_csv, "States written to basis.csv")->capture_default_str();
    common(eig);

    PotentialSource rabi_src;
    RabiArgs rabi_args;
    auto* rabi = app.add_subcommand("rabi", "Resonant Rabi transfer from the ground state");
    rabi_src.add(rabi);
    rabi_args.add(rabi);
    rabi->add_option("--preset", rabi_args.preset, "fig3");
    rabi->add_option("--detuning", rabi_args.detuning, "Drive detuning")->capture_default_str();
    rabi->add_option("--T", rabi_args.T, "Duration (0: two Rabi periods)")->capture_default_str();
    common(rabi);

    PotentialSource ls_src;
    RabiArgs ls_args;
    double ls_span = 5.0, ls_periods = 2.0;
    int ls_points = 41;
    auto* ls = app.add_subcommand("lineshape", "Detuning scan and Lorentzian fit");
    ls_src.add(ls);
    ls_args.add(ls);
    ls->add_option("--preset", ls_args.preset, "fig4");
    ls->add_option("--span", ls_span, "Detuning half-range in units of the Rabi frequency")->capture_default_str();
    ls->add_option("--points", ls_points, "Detuning samples")->capture_default_str();
    ls->add_option("--window-periods", ls_periods, "Window length in Rabi periods")->capture_default_str();
    common(ls);

    PotentialSource gr_src;
    GrapeArgs ga;
    auto* grape = app.add_subcommand("grape", "Optimal-control pulse search");
    gr_src.add(grape);
    grape->add_option("--preset", ga.preset, "table1");
    grape->add_option("--beta", ga.beta, "Control strength")->capture_default_str();
    grape->add_option("--n", ga.power, "Modulation power: 1 (x) or 2 (x^2)")->capture_default_str();
    grape->add_option("--source", ga.source)->capture_default_str();
    grape->add_option("--target", ga.target)->capture_default_str();
    grape->add_option("--T", ga.T, "Control time")->capture_default_str();
    grape->add_option("--T-list", ga.T_list, "Ascending control times for a fidelity-vs-time curve")->delimiter(',');
    grape->add_option("--dt", ga.dt, "Pulse step")->capture_default_str();
    grape->add_option("--lambda", ga.lambda, "Smoothness penalty weight")->capture_default_str();
    grape->add_option("--restarts", ga.restarts)->capture_default_str();
    grape->add_option("--max-iter", ga.max_iter)->capture_default_str();
    grape->add_option("--basis", ga.basis, "Optimization basis size")->capture_default_str();
    grape->add_option("--seed", ga.seed)->capture_default_str();
    grape->add_flag("--stop-on-success", ga.stop_on_success, "Stop restarts once F >= 0.99");
    common(grape);

    CascadeArgs ca;
    auto* cascade = app.add_subcommand("cascade", "Parametric resonance cascade on the ln-naturals potential");
    cascade->add_option("--preset", ca.preset, "fig3a, fig3b or fig3c")->capture_default_str();
    cascade->add_option("--windows", ca.windows, "Silence-window start times")->delimiter(',');
    cascade->add_flag("--no-windows", ca.no_windows);
    cascade->add_option("--holes", ca.holes, "Missing labels")->delimiter(',');
    cascade->add_option("--beta", ca.beta);
    cascade->add_option("--T", ca.T);
    cascade->add_option("--dt", ca.dt);
    cascade->add_option("--window-duration", ca.window_duration);
    cascade->add_option("--mode", ca.mode, "grid or eigenbasis");
    cascade->add_option("--initial", ca.initial, "Initial label");
    cascade->add_option("--extra-states", ca.extra_states);
    cascade->add_flag("--absorber", ca.absorber);
    common(cascade);

    std::string lat_preset;
    double J0 = 1.0, gamma = 0.3, lat_tol = 1e-6;
    int m_left = -100, m_right = 100;
    auto* lattice = app.add_subcommand("lattice", "Exponential tight-binding lattice");
    lattice->add_option("--preset", lat_preset, "fig7 (gamma 0.3) or fig8 (gamma ln 3)");
    lattice->add_option("--J0", J0)->capture_default_str();
    lattice->add_option("--gamma", gamma)->capture_default_str();
    lattice->add_option("--m-left", m_left)->capture_default_str();
    lattice->add_option("--m-right", m_right)->capture_default_str();
    lattice->add_option("--translation-tol", lat_tol, "Sets the bulk margin for translation checks")->capture_default_str();
    common(lattice);

    PotentialSource sc_src;
    sc_src.kind = "ln-naturals";
    sc_src.nb = 120;
    int n_center = 60, dmin = 4, dmax = 30, diag_lo = 10, diag_hi = 100;
    auto* sc = app.add_subcommand("semiclassics", "Numeric vs semiclassical matrix elements");
    sc_src.add(sc);
    sc->add_option("--n-center", n_center)->capture_default_str();
    sc->add_option("--dmin", dmin)->capture_default_str();
    sc->add_option("--dmax", dmax)->capture_default_str();
    sc->add_option("--diag-from", diag_lo)->capture_default_str();
    sc->add_option("--diag-to", diag_hi)->capture_default_str();
    common(sc);

    std::uint64_t census = 0;
    std::string nt_kind;
    int nt_count = 20;
    auto* nt = app.add_subcommand("numtheory", "NLT census, lemma checks and target spectra");
    nt->add_option("--nlt-census", census, "Census limit");
    nt->add_option("--spectrum", nt_kind, "Write the spectrum of this sequence kind");
    nt->add_option("--count", nt_count)->capture_default_str();
    common(nt);

    std::uint64_t w_max = 10000;
    auto* gb = app.add_subcommand("goldbach-graph", "Two-body cascade graph and transition classes");
    gb->add_option("--w-max", w_max)->capture_default_str();
    common(gb);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        apply_config(sub, sub == synth ? std::string() : config);
        if (out.empty()) out = "nqlab-" + sub->get_name();
        if (sub == synth) cmd_synth(sub, src, out, config);
        else if (sub == eig) cmd_eig(sub, eig_src, out, eig_states, eig_csv);
        else if (sub == rabi) cmd_rabi(sub, rabi_src, rabi_args, out);
        else if (sub == ls) cmd_lineshape(sub, ls_src, ls_args, out, ls_span, ls_points, ls_periods, jobs);
        else if (sub == grape) cmd_grape(sub, gr_src, ga, out, jobs);
        else if (sub == cascade) cmd_cascade(sub, ca, out);
        else if (sub == lattice) cmd_lattice(sub, lat_preset, J0, gamma, m_left, m_right, lat_tol, out);
        else if (sub == sc) cmd_semiclassics(sub, sc_src, n_center, dmin, dmax, diag_lo, diag_hi, out);
        else if (sub == nt) cmd_numtheory(sub, census, nt_kind, nt_count, out, jobs);
        else if (sub == gb) cmd_goldbach(sub, w_max, out);
    } catch (const ValidationFailure& e) {
        std::cout << json{{"error", "ValidationFailure"}, {"message", e.what()}}.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cout << json{{"error", error_name(e)}, {"message", e.what()}}.dump() << "\n";
        return 1;
    }
    return 0;
}
