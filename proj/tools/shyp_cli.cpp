// shyp: condition checks, normalizing sequences, simulation, estimation and
// Monte Carlo suites for two-parameter diagonal stochastic hyperbolic equations.
//
// Exit codes: 0 pass, 1 config error, 2 fail, 3 inconclusive, 4 runtime error.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "shyp/config.hpp"
#include "shyp/error.hpp"
#include "shyp/estimate.hpp"
#include "shyp/montecarlo.hpp"
#include "shyp/simulate.hpp"

#ifndef SHYP_VERSION
#define SHYP_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using namespace shyp;

namespace {

enum Exit { kPass = 0, kConfig = 1, kFail = 2, kInconclusive = 3, kRuntime = 4 };

struct Overrides {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::string n_list;
    std::optional<int> replicates;
    std::optional<std::int64_t> dt_steps;
    std::string estimator;
};

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

std::vector<std::int64_t> parse_n_list(const std::string& csv) {
    std::vector<std::int64_t> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(item, &pos);
        } catch (const std::exception&) {
            throw ConfigError("--n-list: \"" + item + "\" is not an integer");
        }
        if (pos != item.size()) throw ConfigError("--n-list: \"" + item + "\" is not an integer");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("--n-list is empty");
    return out;
}

// Loaded config with command-line overrides applied, plus run bookkeeping.
class Run {
public:
    Run(std::string command, const Overrides& o) : command_(std::move(command)), start_(utc_now()) {
        cfg_ = load_config(o.config);
        config_path_ = o.config;
        ExperimentConfig& ex = cfg_.experiment;
        if (o.seed) ex.seed = *o.seed;
        if (o.workers) ex.workers = *o.workers;
        if (!o.n_list.empty()) ex.N_list = parse_n_list(o.n_list);
        if (o.replicates) {
            if (*o.replicates < 1) throw ConfigError("--replicates must be positive");
            ex.replicates = *o.replicates;
        }
        if (o.dt_steps) {
            if (*o.dt_steps < 1) throw ConfigError("--dt-steps must be positive");
            ex.grid.n_steps = *o.dt_steps;
        }
        if (o.estimator == "statistics") ex.route = EstimatorRoute::statistics;
        else if (o.estimator == "innovation") ex.route = EstimatorRoute::innovation;
        else if (!o.estimator.empty()) throw ConfigError("--estimator must be statistics or innovation");
        if (!o.out.empty()) ex.out_dir = o.out;
        if (ex.out_dir.empty()) ex.out_dir = "shyp_out";
        auto& e = cfg_.echo;
        e["grid"]["n_steps"] = ex.grid.n_steps;
        e["experiment"]["N_list"] = ex.N_list;
        e["experiment"]["replicates"] = ex.replicates;
        e["experiment"]["seed"] = ex.seed;
        e["experiment"]["route"] = to_string(ex.route);
        e["output"]["dir"] = ex.out_dir;
    }

    RunConfig& cfg() { return cfg_; }
    ExperimentConfig& ex() { return cfg_.experiment; }

    void require_n_list() const {
        if (cfg_.experiment.N_list.empty()) throw ConfigError("no N_list: set experiment.N_list or pass --n-list");
    }

    std::string output(const std::string& name) {
        fs::create_directories(cfg_.experiment.out_dir);
        const std::string p = (fs::path(cfg_.experiment.out_dir) / name).string();
        outputs_.push_back(p);
        return p;
    }

    void write_json(const std::string& name, const ojson& j) {
        std::ofstream(output(name)) << j.dump(2) << '\n';
    }

    // Summary document shared by every command; deterministic for fixed inputs.
    ojson summary() const {
        ojson s;
        s["command"] = command_;
        s["version"] = SHYP_VERSION;
        s["seed"] = cfg_.experiment.seed;
        s["config"] = cfg_.echo;
        return s;
    }

    void finish() {
        ojson m;
        m["command"] = command_;
        m["config_path"] = config_path_;
        m["config"] = cfg_.echo;
        m["seed"] = cfg_.experiment.seed;
        m["version"] = SHYP_VERSION;
        m["start"] = start_;
        m["end"] = utc_now();
        m["outputs"] = outputs_;
        fs::create_directories(cfg_.experiment.out_dir);
        std::ofstream(fs::path(cfg_.experiment.out_dir) / "manifest.jsonl", std::ios::app) << m.dump() << '\n';
    }

private:
    std::string command_;
    std::string start_;
    std::string config_path_;
    RunConfig cfg_;
    std::vector<std::string> outputs_;
};

int verdict_exit(Verdict v) {
    switch (v) {
        case Verdict::pass: return kPass;
        case Verdict::fail: return kFail;
        default: return kInconclusive;
    }
}

ojson fit_json(const SlopeFit& f) { return {{"slope", f.slope}, {"ci_lo", f.ci_lo}, {"ci_hi", f.ci_hi}}; }

ojson ks_json(const KsResult& k) {
    ojson c;
    for (const auto& [a, v] : k.critical) {
        std::ostringstream os;
        os << a;
        c[os.str()] = v;
    }
    return {{"D", k.D}, {"critical", c}};
}

void require_exclusions(bool ok, const char* what) {
    if (!ok) throw NumericalError(std::string("montecarlo: ") + what + ": more than 1% of replicates singular");
}

// ---------------------------------------------------------------------------

int cmd_check(Run& run) {
    const RunConfig& c = run.cfg();
    const ExperimentConfig& ex = c.experiment;
    const ConditionReport r = check_hyperbolic(ex.spectrum, ex.params, c.check.range, c.check.theta_grid, c.check.fixed);
    std::cout << "hyperbolic: " << to_string(r.hyperbolic) << "  (k = " << r.checked_range.first << ".."
              << r.checked_range.last << ")\n";
    if (!c.equation.empty()) std::cout << "equation:   " << c.equation << "\n";
    std::cout << "constants:  C* = " << r.C_star << ", C = " << r.C << ", J = " << r.J << ", c1 = " << r.c1
              << ", c2 = " << r.c2 << ", c0 = " << r.c0 << "\n";
    for (const auto& w : r.witnesses)
        std::cout << "witness:    k = " << w.k << ", theta = (" << w.theta1 << ", " << w.theta2 << "): " << w.inequality
                  << "  [" << w.lhs << " vs " << w.rhs << "]\n";
    for (const auto& n : r.notes) std::cout << "note:       " << n << "\n";

    ojson s = run.summary();
    s["hyperbolic"] = to_string(r.hyperbolic);
    s["checked_range"] = {r.checked_range.first, r.checked_range.last};
    s["constants"] = {{"C_star", r.C_star}, {"C", r.C}, {"J", r.J}, {"c1", r.c1}, {"c2", r.c2}, {"c0", r.c0}};
    ojson ws = ojson::array();
    for (const auto& w : r.witnesses)
        ws.push_back({{"k", w.k}, {"theta1", w.theta1}, {"theta2", w.theta2}, {"inequality", w.inequality},
                      {"lhs", w.lhs}, {"rhs", w.rhs}});
    s["witnesses"] = ws;
    s["notes"] = r.notes;
    if (r.hyperbolic == Verdict::pass) {
        const AlgebraicClass a = classify_algebraic(ex.spectrum, ex.params, c.check.range);
        ojson aj = {{"algebraic", a.algebraic}, {"exact", a.exact}, {"reason", a.reason}};
        if (a.algebraic) {
            const ConsistencyVerdict v = consistency_conditions(a);
            aj["alpha"] = a.alpha;
            aj["alpha1"] = a.alpha1;
            aj["beta"] = a.beta;
            aj["beta1"] = a.beta1;
            aj["gamma1"] = v.gamma1;
            aj["gamma2"] = v.gamma2;
            aj["theta1_consistent"] = v.theta1_ok;
            aj["theta2_consistent"] = v.theta2_ok;
            std::cout << "algebraic:  gamma1 = " << v.gamma1 << " (" << (v.theta1_ok ? "consistent" : "not consistent")
                      << "), gamma2 = " << v.gamma2 << " (" << (v.theta2_ok ? "consistent" : "not consistent") << ")\n";
        } else {
            std::cout << "algebraic:  no (" << a.reason << ")\n";
        }
        s["algebraic"] = aj;
    }
    run.write_json("check.json", s);
    return verdict_exit(r.hyperbolic);
}

int cmd_psi(Run& run) {
    run.require_n_list();
    const ExperimentConfig& ex = run.ex();
    const auto table = psi_table(ex.spectrum, ex.params.theta1, ex.params.theta2, ex.params.T, ex.N_list);
    const std::string path = run.output("psi.csv");
    write_psi_csv(path, table);
    std::ifstream in(path);
    std::cout << in.rdbuf();
    return kPass;
}

int cmd_fit(Run& run) {
    run.require_n_list();
    const ExperimentConfig& ex = run.ex();
    const auto table = psi_table(ex.spectrum, ex.params.theta1, ex.params.theta2, ex.params.T, ex.N_list);
    write_psi_csv(run.output("psi.csv"), table);
    ojson s = run.summary();
    ojson fits = ojson::array();
    for (const auto& g : fit_growth(table)) {
        std::cout << std::left << std::setw(6) << g.column << " slope " << std::setprecision(4) << g.slope << "  [" << g.ci_lo
                  << ", " << g.ci_hi << "]" << (g.logarithmic ? "  logarithmic" : "") << "\n";
        fits.push_back({{"column", g.column}, {"slope", g.slope}, {"ci_lo", g.ci_lo}, {"ci_hi", g.ci_hi},
                        {"increasing", g.increasing}, {"logarithmic", g.logarithmic},
                        {"increment_ratio", g.increment_ratio}});
    }
    s["fits"] = fits;
    run.write_json("fit.json", s);
    return kPass;
}

std::int64_t mode_count(Run& run, std::int64_t modes) {
    if (modes > 0) return modes;
    run.require_n_list();
    return run.ex().N_list.back();
}

int cmd_simulate(Run& run, std::int64_t modes) {
    const ExperimentConfig& ex = run.ex();
    const std::int64_t N = mode_count(run, modes);
    const auto trajs = simulate_solution(ex.spectrum, ex.params, N, ex.grid, ex.seed, 0, ex.workers);
    const std::string path = run.output("trajectories.csv");
    write_trajectories_csv(path, trajs, ex.grid);
    std::cout << "wrote " << N << " modes x " << ex.grid.n_steps << " steps to " << path << "\n";
    return kPass;
}

int cmd_estimate(Run& run, std::int64_t modes, const std::string& input, bool truth_known) {
    const ExperimentConfig& ex = run.ex();
    std::vector<ModeTrajectory> trajs;
    TimeGrid grid = ex.grid;
    std::optional<std::uint64_t> seed;
    if (input.empty()) {
        trajs = simulate_solution(ex.spectrum, ex.params, mode_count(run, modes), grid, ex.seed, 0, ex.workers);
        seed = ex.seed;
        truth_known = true;
    } else {
        trajs = read_trajectories_csv(input, grid);
    }
    EstimateOptions opts;
    opts.use_endpoint_identities = ex.use_endpoint_identities;
    opts.truth_known = truth_known;
    opts.with_innovations = truth_known;
    const EstimateResult r = estimate(trajs, ex.spectrum, ex.params, grid, opts);
    const std::string doc = to_json(r, grid, seed);
    std::ofstream(run.output("estimate.json")) << doc << '\n';
    std::cout << doc << '\n';
    return kPass;
}

void warn_grid(const ExperimentData& data, const ExperimentConfig& ex) {
    if (data.high_frequency_modes > 0)
        std::cerr << "warning: " << data.high_frequency_modes << " modes oscillate faster than the grid (ell*dt > pi)\n";
    if (data.stiff_modes > 0 && ex.route == EstimatorRoute::statistics)
        std::cerr << "warning: " << data.stiff_modes
                  << " modes have |mu|*dt > 1; grid statistics are biased there, consider --estimator innovation\n";
}

int cmd_mc_consistency(Run& run) {
    run.require_n_list();
    const ExperimentConfig& ex = run.ex();
    const ExperimentData data = run_experiment(ex);
    warn_grid(data, ex);
    write_rows_csv(run.output("rows.csv"), data);
    write_psi_csv(run.output("psi.csv"), data.psi);
    const ConsistencyTable t = consistency_table(data, ex);
    std::cout << "N        mean|e1|      se1           mean|e2|      se2           excluded\n";
    ojson rows = ojson::array();
    for (const auto& r : t.rows) {
        std::cout << std::left << std::setw(9) << r.N << std::setw(14) << r.mean_abs_err1 << std::setw(14) << r.se1
                  << std::setw(14) << r.mean_abs_err2 << std::setw(14) << r.se2 << r.excluded << "\n";
        rows.push_back({{"N", r.N}, {"mean_abs_err1", r.mean_abs_err1}, {"se1", r.se1},
                        {"mean_abs_err2", r.mean_abs_err2}, {"se2", r.se2}, {"used", r.used}, {"excluded", r.excluded}});
    }
    std::cout << "slope1 " << t.slope1.slope << " [" << t.slope1.ci_lo << ", " << t.slope1.ci_hi << "], decreasing "
              << (t.decreasing1 ? "yes" : "no") << "\n";
    std::cout << "slope2 " << t.slope2.slope << " [" << t.slope2.ci_lo << ", " << t.slope2.ci_hi << "], decreasing "
              << (t.decreasing2 ? "yes" : "no") << "\n";
    ojson s = run.summary();
    s["rows"] = rows;
    s["slope1"] = fit_json(t.slope1);
    s["slope2"] = fit_json(t.slope2);
    s["decreasing1"] = t.decreasing1;
    s["decreasing2"] = t.decreasing2;
    s["identity"] = {{"checked", data.identity_checked}, {"violations", data.identity_violations},
                     {"max_residual", data.identity_max_residual}};
    s["high_frequency_modes"] = data.high_frequency_modes;
    s["stiff_modes"] = data.stiff_modes;
    run.write_json("summary.json", s);
    require_exclusions(t.exclusions_ok, "consistency");
    return t.decreasing1 && t.decreasing2 ? kPass : kFail;
}

int cmd_mc_normality(Run& run) {
    run.require_n_list();
    const ExperimentConfig& ex = run.ex();
    const ExperimentData data = run_experiment(ex);
    warn_grid(data, ex);
    write_rows_csv(run.output("rows.csv"), data);
    const NormalityReport r = normality_report(data, ex);
    std::cout << "N = " << r.N << ", samples = " << r.samples.size() << ", significance = " << r.significance << "\n";
    std::cout << "ks1 = " << r.ks1.D << " (critical " << r.ks1.critical.at(r.significance) << ") "
              << (r.normal1 ? "pass" : "fail") << "\n";
    std::cout << "ks2 = " << r.ks2.D << " (critical " << r.ks2.critical.at(r.significance) << ") "
              << (r.normal2 ? "pass" : "fail") << "\n";
    std::cout << "corr12 = " << r.corr12 << " [" << r.corr_ci_lo << ", " << r.corr_ci_hi << "] "
              << (r.independent ? "pass" : "fail") << "\n";
    ojson s = run.summary();
    s["N"] = r.N;
    s["samples"] = r.samples.size();
    s["ks1"] = ks_json(r.ks1);
    s["ks2"] = ks_json(r.ks2);
    s["corr12"] = r.corr12;
    s["corr_ci"] = {r.corr_ci_lo, r.corr_ci_hi};
    s["normal1"] = r.normal1;
    s["normal2"] = r.normal2;
    s["independent"] = r.independent;
    s["excluded"] = r.excluded;
    run.write_json("summary.json", s);
    require_exclusions(r.exclusions_ok, "normality");
    return r.normal1 && r.normal2 && r.independent ? kPass : kFail;
}

int cmd_mc_lln(Run& run) {
    run.require_n_list();
    const ExperimentData data = run_experiment(run.ex());
    write_rows_csv(run.output("rows.csv"), data);
    const LlnReport rep = lln_report(data);
    std::cout << "N        K1/Psi1 med   K2/Psi2 med   K12/Psi12 med iota1^2/Psi1  iota2^2/Psi2\n";
    ojson rows = ojson::array();
    for (const auto& r : rep.rows) {
        std::cout << std::left << std::setw(9) << r.N << std::setw(14) << r.K1_over_Psi1_median << std::setw(14)
                  << r.K2_over_Psi2_median << std::setw(14) << r.K12_over_Psi12_median << std::setw(14)
                  << r.iota1_isometry << r.iota2_isometry << "\n";
        rows.push_back({{"N", r.N},
                        {"K1_over_Psi1", {r.K1_over_Psi1_q05, r.K1_over_Psi1_median, r.K1_over_Psi1_q95}},
                        {"K2_over_Psi2", {r.K2_over_Psi2_q05, r.K2_over_Psi2_median, r.K2_over_Psi2_q95}},
                        {"K12_over_Psi12_median", r.K12_over_Psi12_median},
                        {"iota1_isometry", {r.iota1_isometry, r.iota1_isometry_se}},
                        {"iota2_isometry", {r.iota2_isometry, r.iota2_isometry_se}}});
    }
    ojson s = run.summary();
    s["rows"] = rows;
    run.write_json("summary.json", s);
    return kPass;
}

int cmd_mc_tables(Run& run, bool fit) {
    const auto cells = exponent_tables(fit);
    const std::string text = render_tables(cells);
    std::cout << text;
    std::ofstream(run.output("tables.txt")) << text;
    std::ofstream csv(run.output("tables.csv"));
    csv << "name,dimension,psi1,psi2,gamma1,gamma2,fitted1,fitted2\n";
    for (const auto& c : cells)
        csv << c.name << ',' << c.dimension << ',' << c.psi1 << ',' << c.psi2 << ',' << c.gamma1 << ',' << c.gamma2 << ','
            << c.fitted1 << ',' << c.fitted2 << '\n';
    return kPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parameter estimation for diagonal stochastic hyperbolic equations"};
    app.set_version_flag("--version", std::string(SHYP_VERSION));
    app.require_subcommand(1);

    Overrides o;
    std::int64_t modes = 0;
    std::string input;
    bool truth_known = false;
    bool fit_tables = false;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "Config document")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "Override the experiment seed");
        sub->add_option("--out", o.out, "Output directory");
        sub->add_option("--workers", o.workers, "Worker threads (0: all cores)");
        sub->add_option("--n-list", o.n_list, "Comma-separated mode counts");
        sub->add_option("--replicates", o.replicates, "Monte Carlo replicates");
        sub->add_option("--dt-steps", o.dt_steps, "Time steps on [0, T]");
        sub->add_option("--estimator", o.estimator, "statistics or innovation");
    };

    auto* check = app.add_subcommand("check", "Hyperbolicity and consistency conditions");
    auto* psi = app.add_subcommand("psi", "Normalizing sequences Psi_N as CSV");
    auto* fit = app.add_subcommand("fit", "Log-log growth fit of Psi_N");
    auto* sim = app.add_subcommand("simulate", "Simulate Fourier modes to a trajectory file");
    auto* est = app.add_subcommand("estimate", "Estimate theta from a trajectory file or a fresh simulation");
    auto* mc = app.add_subcommand("mc", "Monte Carlo suites");
    mc->require_subcommand(1);
    auto* mc_cons = mc->add_subcommand("consistency", "Error decay with N");
    auto* mc_norm = mc->add_subcommand("normality", "Normalized-error distribution at the largest N");
    auto* mc_lln = mc->add_subcommand("lln", "K_N / Psi_N and the isometry");
    auto* mc_tab = mc->add_subcommand("tables", "Exponent tables for the algebraic examples");
    for (auto* s : {check, psi, fit, sim, est, mc_cons, mc_norm, mc_lln, mc_tab}) common(s);
    for (auto* s : {sim, est}) s->add_option("--modes", modes, "Number of modes (default: largest N)");
    est->add_option("--input", input, "Trajectory file from `simulate`")->check(CLI::ExistingFile);
    est->add_flag("--truth-known", truth_known, "Config params are the true values of the input data");
    mc_tab->add_flag("--fit", fit_tables, "Add fitted slopes over N = 50..800");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfig;
    }

    std::string name;
    if (*check) name = "check";
    else if (*psi) name = "psi";
    else if (*fit) name = "fit";
    else if (*sim) name = "simulate";
    else if (*est) name = "estimate";
    else if (*mc_cons) name = "mc consistency";
    else if (*mc_norm) name = "mc normality";
    else if (*mc_lln) name = "mc lln";
    else name = "mc tables";

    try {
        Run run(name, o);
        int rc = kPass;
        if (*check) rc = cmd_check(run);
        else if (*psi) rc = cmd_psi(run);
        else if (*fit) rc = cmd_fit(run);
        else if (*sim) rc = cmd_simulate(run, modes);
        else if (*est) rc = cmd_estimate(run, modes, input, truth_known);
        else if (*mc_cons) rc = cmd_mc_consistency(run);
        else if (*mc_norm) rc = cmd_mc_normality(run);
        else if (*mc_lln) rc = cmd_mc_lln(run);
        else rc = cmd_mc_tables(run, fit_tables);
        run.finish();
        return rc;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << name << ": " << e.what() << "\n";
        return kRuntime;
    }
}
