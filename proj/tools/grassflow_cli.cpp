#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <thread>

#include "grassflow/io.hpp"
#include "grassflow/liepoisson.hpp"
#include "grassflow/raytransform.hpp"
#include "grassflow/topology.hpp"

using nlohmann::json;
using namespace grassflow;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required = true) {
    auto* opt = cmd->add_option("--config", args.config_path, "JSON config file");
    if (config_required) opt->required();
    cmd->add_option("--out", args.out_path, "output path (stdout when omitted)");
    cmd->add_option("--seed", args.seed, "RNG seed for randomized suites");
    cmd->add_option("--threads", args.threads, "worker threads for scans/sweeps");
}

json load_config(const std::string& path) {
    const std::string text = io::read_file(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        fail(errc::config, std::string("malformed JSON config: ") + e.what());
    }
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) known = true;
        if (!known) fail(errc::config, "unknown key \"" + it.key() + "\" in " + where);
    }
}

double require_positive(const json& j, const char* key, std::optional<double> fallback = {}) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        fail(errc::config, std::string("missing key ") + key);
    }
    const double v = j.at(key).get<double>();
    if (!(v > 0.0) || !std::isfinite(v)) fail(errc::config, std::string(key) + " must be positive and finite");
    return v;
}

Eigen::VectorXd vector_from_json(const json& j, const char* key) {
    if (!j.contains(key)) fail(errc::config, std::string("missing key ") + key);
    const auto v = j.at(key).get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size()));
}

void emit(const CommonArgs& args, const std::string& content) {
    if (args.out_path.empty())
        std::cout << content;
    else
        io::write_file_atomic(args.out_path, content);
}

std::unique_ptr<ReducedHamiltonian> hamiltonian_from_json(const json& j) {
    if (!j.contains("kind")) fail(errc::config, "hamiltonian needs key kind");
    const std::string kind = j.at("kind").get<std::string>();
    const double eps = j.value("epsilon", 1.0);
    if (kind == "quartic") {
        check_keys(j, {"kind", "epsilon", "coeffs"}, "hamiltonian");
        return std::make_unique<QuarticHamiltonian>(eps, vector_from_json(j, "coeffs"));
    }
    if (kind == "ellipsoid") {
        check_keys(j, {"kind", "epsilon", "alphas"}, "hamiltonian");
        return std::make_unique<EllipsoidHamiltonian>(eps, vector_from_json(j, "alphas"));
    }
    if (kind == "numeric") {
        check_keys(j, {"kind", "deformation", "nodes"}, "hamiltonian");
        if (!j.contains("deformation")) fail(errc::config, "numeric hamiltonian needs a deformation");
        return std::make_unique<NumericHamiltonian>(io::deformation_from_json(j.at("deformation")),
                                                    j.value("nodes", 64));
    }
    if (kind == "casimir_l2") {
        check_keys(j, {"kind", "n"}, "hamiltonian");
        if (!j.contains("n")) fail(errc::config, "casimir_l2 hamiltonian needs n");
        return std::make_unique<CasimirHamiltonian>(j.at("n").get<int>());
    }
    fail(errc::config, "unknown hamiltonian kind \"" + kind + "\"");
}

SkewMatrix initial_momentum(const json& j, int n) {
    if (j.contains("l0")) return io::skew_from_json(j.at("l0"));
    if (j.contains("x0") && j.contains("v0")) {
        ParticleState s;
        s.x = vector_from_json(j, "x0");
        s.v = vector_from_json(j, "v0");
        return momentum_from_state(s).plane_normalized();
    }
    fail(errc::config, "need l0 or x0/v0 to start a reduced run; n=" + std::to_string(n));
}

// --- subcommands -----------------------------------------------------------

int run_geodesic(const CommonArgs& args) {
    const json cfg = load_config(args.config_path);
    check_keys(cfg,
               {"deformation", "x0", "v0", "T", "dt", "sample_stride", "momentum_columns"},
               "geodesic config");
    if (!cfg.contains("deformation")) fail(errc::config, "missing deformation");
    const Deformation d = io::deformation_from_json(cfg.at("deformation"));
    const ConstraintSurface surface(d);
    IntegratorSettings set;
    set.dt = require_positive(cfg, "dt", 2.0 * M_PI * 1e-3);
    set.sample_stride = cfg.value("sample_stride", 1);
    if (set.sample_stride < 1) fail(errc::config, "sample_stride must be >= 1");
    const double T = require_positive(cfg, "T");
    const ParticleState s0 =
        prepare_state(vector_from_json(cfg, "x0"), vector_from_json(cfg, "v0"), surface);
    const GeodesicTrajectory traj = integrate_geodesic(s0, surface, T, set);
    emit(args, io::trajectory_csv(traj, cfg.value("momentum_columns", false)));
    return 0;
}

ReducedTrajectory reduce_run(const json& cfg, double override_eps = -1.0) {
    json hj = cfg.at("hamiltonian");
    if (override_eps >= 0.0) hj["epsilon"] = override_eps;
    const auto H = hamiltonian_from_json(hj);
    const SkewMatrix l0 = initial_momentum(cfg, H->dim());
    if (l0.n != H->dim()) fail(errc::config, "l0 dimension != hamiltonian dimension");
    ReducedIntegratorSettings set;
    set.dt = require_positive(cfg, "dt", 1e-2);
    set.sample_stride = cfg.value("sample_stride", 1);
    if (set.sample_stride < 1) fail(errc::config, "sample_stride must be >= 1");
    const double T = require_positive(cfg, "T");
    return integrate_reduced(*H, l0, T, set);
}

int run_reduce(const CommonArgs& args) {
    const json cfg = load_config(args.config_path);
    check_keys(cfg,
               {"hamiltonian", "l0", "x0", "v0", "T", "dt", "sample_stride", "epsilon_sweep"},
               "reduce config");
    if (!cfg.contains("hamiltonian")) fail(errc::config, "missing hamiltonian");
    if (!cfg.contains("epsilon_sweep")) {
        emit(args, io::reduced_csv(reduce_run(cfg)));
        return 0;
    }
    // one trajectory file per epsilon plus a manifest
    const auto sweep = cfg.at("epsilon_sweep").get<std::vector<double>>();
    if (args.out_path.empty()) fail(errc::config, "epsilon_sweep requires --out");
    const auto dot = args.out_path.rfind('.');
    const std::string stem = dot == std::string::npos ? args.out_path : args.out_path.substr(0, dot);
    const std::string ext = dot == std::string::npos ? ".csv" : args.out_path.substr(dot);
    json manifest;
    manifest["files"] = json::array();
    for (size_t k = 0; k < sweep.size(); ++k) {
        if (!(sweep[k] >= 0.0)) fail(errc::config, "epsilon_sweep entries must be >= 0");
        const std::string path = stem + "_e" + std::to_string(k) + ext;
        io::write_file_atomic(path, io::reduced_csv(reduce_run(cfg, sweep[k])));
        manifest["files"].push_back({{"epsilon", sweep[k]}, {"path", path}});
    }
    io::write_file_atomic(stem + "_manifest.json", manifest.dump(2) + "\n");
    return 0;
}

int run_raytransform(const CommonArgs& args) {
    const json cfg = load_config(args.config_path);
    check_keys(cfg, {"deformation", "plane", "nodes", "mode"}, "raytransform config");
    if (!cfg.contains("deformation")) fail(errc::config, "missing deformation");
    if (!cfg.contains("plane")) fail(errc::config, "missing plane");
    const Deformation d = io::deformation_from_json(cfg.at("deformation"));
    const SkewMatrix plane = io::skew_from_json(cfg.at("plane"));
    const int nodes = cfg.value("nodes", 64);
    const std::string mode = cfg.value("mode", "average");
    if (mode != "average" && mode != "integral") fail(errc::config, "mode must be average or integral");
    const RayTransformResult r = ray_transform(d.psi, plane, nodes, mode == "average");
    json out{{"value", r.value}, {"N", r.quadrature_nodes}, {"mode", mode}};
    emit(args, out.dump(2) + "\n");
    return 0;
}

int run_compare(const CommonArgs& args) {
    const json cfg = load_config(args.config_path);
    check_keys(cfg,
               {"deformation", "x0", "v0", "T", "dt_full", "dt_reduced", "samples", "kappa",
                "epsilons", "T_times_epsilon", "ratio_band"},
               "compare config");
    if (!cfg.contains("deformation")) fail(errc::config, "missing deformation (psi spec)");
    const Deformation base = io::deformation_from_json(cfg.at("deformation"));
    ParticleState s0;
    s0.x = vector_from_json(cfg, "x0");
    s0.v = vector_from_json(cfg, "v0");
    CompareSettings set;
    set.dt_full = require_positive(cfg, "dt_full", set.dt_full);
    set.dt_reduced = require_positive(cfg, "dt_reduced", set.dt_reduced);
    set.samples = cfg.value("samples", set.samples);
    set.kappa = cfg.value("kappa", set.kappa);

    if (!cfg.contains("epsilons")) {
        const double T = require_positive(cfg, "T");
        emit(args, io::drift_report_to_json(compare_full_vs_reduced(base, s0, T, set)).dump(2) + "\n");
        return 0;
    }
    const auto epsilons = cfg.at("epsilons").get<std::vector<double>>();
    if (epsilons.size() < 2) fail(errc::config, "epsilons needs at least two entries");
    const double c = cfg.value("T_times_epsilon", 1.0);
    json reports = json::array();
    std::vector<double> devs;
    for (const double eps : epsilons) {
        if (!(eps > 0.0)) fail(errc::config, "epsilons entries must be > 0");
        Deformation d = base;
        d.epsilon = eps;
        const DriftReport r = compare_full_vs_reduced(d, s0, c / eps, set);
        reports.push_back(io::drift_report_to_json(r));
        devs.push_back(r.sup_deviation);
    }
    json out;
    out["reports"] = reports;
    // first-order averaging scaling: deviation should drop with epsilon
    const double ratio = devs.front() / devs.back();
    out["deviation_ratio"] = ratio;
    double lo = 1.3, hi = 3.0;
    if (cfg.contains("ratio_band")) {
        lo = cfg.at("ratio_band").at(0).get<double>();
        hi = cfg.at("ratio_band").at(1).get<double>();
    }
    out["verdict"] = (ratio >= lo && ratio <= hi) ? "pass" : "fail";
    emit(args, out.dump(2) + "\n");
    return 0;
}

int run_classify(const CommonArgs& args) {
    const json cfg = load_config(args.config_path);
    check_keys(cfg, {"coeffs"}, "classify config");
    const Eigen::VectorXd c = vector_from_json(cfg, "coeffs");
    if (c.size() != 3) fail(errc::config, "coeffs must have length 3");
    const PortraitReport r = phase_portrait_type(Eigen::Vector3d(c));
    emit(args, io::portrait_to_json(r).dump(2) + "\n");
    return 0;
}

int run_scan(const CommonArgs& args) {
    const json cfg = load_config(args.config_path);
    check_keys(cfg, {"resolution"}, "scan config");
    const int resolution = cfg.value("resolution", 100);
    const auto rows = portrait_scan(resolution, std::max(1, args.threads));
    emit(args, io::scan_csv(rows));
    return 0;
}

ReducedTrajectory trajectory_from_csv(const std::string& path) {
    const io::CsvTable table = io::read_csv(path);
    // infer n from the number of l_i_j columns
    int m = 0;
    for (const std::string& h : table.header)
        if (h.rfind("l_", 0) == 0) ++m;
    int n = 2;
    while (pair_count(n) < m) ++n;
    if (pair_count(n) != m || m == 0) fail(errc::io, "cannot infer dimension from CSV header");
    const int tc = table.column("t");
    if (tc < 0) fail(errc::io, "trajectory CSV needs a t column");
    ReducedTrajectory traj;
    for (const auto& row : table.rows) {
        ReducedSample s;
        s.t = row[tc];
        s.l = SkewMatrix(n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const int col = table.column(pair_label(i, j));
                if (col < 0) fail(errc::io, "missing column " + pair_label(i, j));
                s.l.comps[pair_index(i, j, n)] = row[col];
            }
        const int hc = table.column("H");
        const int lc = table.column("l2");
        if (hc >= 0) s.H = row[hc];
        if (lc >= 0) s.l2 = row[lc];
        traj.samples.push_back(std::move(s));
    }
    return traj;
}

int run_section(const CommonArgs& args) {
    const json cfg = load_config(args.config_path);
    check_keys(cfg, {"reduce", "trajectory", "coord", "level", "direction", "neighbors"},
               "section config");
    ReducedTrajectory traj;
    if (cfg.contains("trajectory"))
        traj = trajectory_from_csv(cfg.at("trajectory").get<std::string>());
    else if (cfg.contains("reduce"))
        traj = reduce_run(cfg.at("reduce"));
    else
        fail(errc::config, "section needs a reduce config or a trajectory CSV");
    if (traj.samples.empty()) fail(errc::config, "empty trajectory");
    const int n = traj.samples.front().l.n;

    int coord = -1;
    if (!cfg.contains("coord")) fail(errc::config, "missing coord");
    if (cfg.at("coord").is_string()) {
        const std::string name = cfg.at("coord").get<std::string>();
        for (int k = 0; k < pair_count(n); ++k) {
            const auto [i, j] = pair_from_index(k, n);
            if (pair_label(i, j) == name) coord = k;
        }
        if (coord < 0) fail(errc::config, "unknown coord \"" + name + "\"");
    } else {
        coord = cfg.at("coord").get<int>();
    }
    const double level = cfg.value("level", 0.0);
    const int direction = cfg.value("direction", 1);
    const auto points = poincare_section(traj, coord, level, direction);
    emit(args, io::section_csv(points));
    json summary{{"crossings", points.size()},
                 {"dimension_proxy", dimension_proxy(points, cfg.value("neighbors", 8))}};
    std::cerr << summary.dump() << "\n";
    return 0;
}

int run_audit(const CommonArgs& args) {
    const json cfg = load_config(args.config_path);
    check_keys(cfg, {"deformation", "trajectory", "bound"}, "audit config");
    if (!cfg.contains("deformation")) fail(errc::config, "missing deformation");
    if (!cfg.contains("trajectory")) fail(errc::config, "missing trajectory path");
    const Deformation d = io::deformation_from_json(cfg.at("deformation"));
    const ConstraintSurface surface(d);
    const double bound = cfg.value("bound", 1e-10);
    const io::CsvTable table = io::read_csv(cfg.at("trajectory").get<std::string>());
    const int n = d.n;
    std::vector<int> xcols(n), vcols(n);
    for (int i = 0; i < n; ++i) {
        xcols[i] = table.column("x_" + std::to_string(i));
        vcols[i] = table.column("v_" + std::to_string(i));
        if (xcols[i] < 0 || vcols[i] < 0) fail(errc::io, "trajectory CSV lacks x/v columns");
    }
    double max_phi = 0.0, max_tan = 0.0, max_speed = 0.0;
    for (const auto& row : table.rows) {
        Eigen::VectorXd x(n), v(n);
        for (int i = 0; i < n; ++i) {
            x[i] = row[xcols[i]];
            v[i] = row[vcols[i]];
        }
        max_phi = std::max(max_phi, std::abs(surface.phi(x)));
        max_tan = std::max(max_tan, std::abs(surface.grad(x).dot(v)));
        max_speed = std::max(max_speed, std::abs(v.squaredNorm() - 1.0));
    }
    const bool pass = max_phi <= bound && max_tan <= bound && max_speed <= bound;
    json out{{"max_abs_phi", max_phi},
             {"max_tangency", max_tan},
             {"max_speed_defect", max_speed},
             {"bound", bound},
             {"rows", table.rows.size()},
             {"pass", pass}};
    emit(args, out.dump(2) + "\n");
    return pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geodesics on weakly deformed spheres and their averaged Grassmannian dynamics"};
    app.require_subcommand(1);

    CommonArgs args;
    int (*handler)(const CommonArgs&) = nullptr;

    auto make = [&](const char* name, const char* help, int (*fn)(const CommonArgs&)) {
        CLI::App* cmd = app.add_subcommand(name, help);
        add_common(cmd, args);
        cmd->callback([&handler, fn]() { handler = fn; });
        return cmd;
    };

    make("geodesic", "integrate the exact constrained geodesic flow", run_geodesic);
    make("reduce", "integrate the averaged Hamiltonian flow on the momentum space", run_reduce);
    make("raytransform", "great-circle transform of a deformation", run_raytransform);
    make("compare", "full vs reduced momentum deviation report", run_compare);
    make("classify", "n=3 phase-portrait classification", run_classify);
    make("scan", "portrait type over the coefficient hemisphere", run_scan);
    make("section", "Poincare section of a reduced trajectory", run_section);
    make("audit", "recompute constraint drift of a trajectory CSV", run_audit);

    CLI11_PARSE(app, argc, argv);

    try {
        return handler(args);
    } catch (const Error& e) {
        nlohmann::json err{{"error", errc_name(e.code())}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return (e.code() == errc::config || e.code() == errc::io) ? 2 : 3;
    } catch (const std::exception& e) {
        nlohmann::json err{{"error", "internal"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 3;
    }
}
