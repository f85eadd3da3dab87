#include "auxbound/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>

#include <CLI11.hpp>

namespace auxbound {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const char* where,
                    std::initializer_list<const char*> known) {
    if (!obj.is_object()) throw InvalidConfigError(std::string(where) + ": object expected");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) ok = true;
        if (!ok)
            throw InvalidConfigError(std::string(where) + ": unknown key '" + it.key() + "'");
    }
}

double num_or(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw InvalidConfigError(std::string(key) + ": number expected");
    return obj[key].get<double>();
}

int int_or(const json& obj, const char* key, int fallback) {
    if (!obj.contains(key)) return fallback;
    return obj[key].get<int>();
}

BenchmarkParams params_from_json(const json& j) {
    reject_unknown(j, "system.custom",
                   {"kind", "alpha1", "alpha2", "omega1Sq", "omega2Sq", "kappa", "a11", "a12",
                    "a21", "a22", "w11", "w12", "w21", "w22", "eps1", "eps2", "F1bar", "F2bar",
                    "q1", "q2"});
    BenchmarkParams p;
    p.alpha1 = num_or(j, "alpha1", p.alpha1);
    p.alpha2 = num_or(j, "alpha2", p.alpha2);
    p.omega1_sq = num_or(j, "omega1Sq", p.omega1_sq);
    p.omega2_sq = num_or(j, "omega2Sq", p.omega2_sq);
    p.kappa = num_or(j, "kappa", p.kappa);
    p.a11 = num_or(j, "a11", p.a11);
    p.a12 = num_or(j, "a12", p.a12);
    p.a21 = num_or(j, "a21", p.a21);
    p.a22 = num_or(j, "a22", p.a22);
    p.w11 = num_or(j, "w11", p.w11);
    p.w12 = num_or(j, "w12", p.w12);
    p.w21 = num_or(j, "w21", p.w21);
    p.w22 = num_or(j, "w22", p.w22);
    p.eps1 = num_or(j, "eps1", p.eps1);
    p.eps2 = num_or(j, "eps2", p.eps2);
    p.F1bar = num_or(j, "F1bar", p.F1bar);
    p.F2bar = num_or(j, "F2bar", p.F2bar);
    p.q1 = num_or(j, "q1", p.q1);
    p.q2 = num_or(j, "q2", p.q2);
    return p;
}

ResolvedSystem resolve_system(const json& sys) {
    reject_unknown(sys, "system", {"preset", "custom", "kappa", "F1bar", "F2bar", "delta"});
    ResolvedSystem out;
    if (sys.contains("preset")) {
        const std::string name = sys["preset"].get<std::string>();
        const auto preset = find_preset(name);
        if (!preset) throw InvalidConfigError("unknown preset '" + name + "'");
        out.params = preset->params;
        out.delta = preset->delta;
        out.horizon = preset->horizon;
        out.name = preset->name;
        out.figure_kind = preset->figure_kind;
        if (sys.contains("kappa")) out.params.kappa = sys["kappa"].get<double>();
        if (sys.contains("F1bar")) out.params.F1bar = sys["F1bar"].get<double>();
        if (sys.contains("F2bar")) out.params.F2bar = sys["F2bar"].get<double>();
        out.spec = preset->duffing ? duffing_like(out.params) : vanderpol_like(out.params);
    } else if (sys.contains("custom")) {
        const json& c = sys["custom"];
        const std::string kind = c.value("kind", "vanderpol");
        out.params = params_from_json(c);
        out.name = "custom-" + kind;
        out.figure_kind = "bound";
        if (kind == "vanderpol")
            out.spec = vanderpol_like(out.params);
        else if (kind == "duffing")
            out.spec = duffing_like(out.params);
        else
            throw InvalidConfigError("system.custom.kind must be vanderpol or duffing");
        out.delta = 0.6283185307179586;
        out.horizon = 100.0;
    } else {
        throw InvalidConfigError("system: preset or custom required");
    }
    if (sys.contains("delta")) out.delta = sys["delta"].get<double>();
    return out;
}

} // namespace

RunConfig parse_config(const nlohmann::json& j) {
    reject_unknown(j, "config", {"schemaVersion", "seed", "system", "grid", "dichotomy",
                                 "stage", "aux", "scan", "bound", "region"});
    if (!j.contains("schemaVersion") || j["schemaVersion"].get<int>() != 1)
        throw InvalidConfigError("config: schemaVersion 1 required");
    if (!j.contains("system")) throw InvalidConfigError("config: system required");

    RunConfig cfg;
    cfg.raw = j;
    cfg.config_hash = fnv1a_hex(j.dump());
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    cfg.system = resolve_system(j["system"]);

    if (j.contains("grid")) {
        reject_unknown(j["grid"], "grid", {"step"});
        cfg.grid_step = num_or(j["grid"], "step", cfg.grid_step);
        if (!(cfg.grid_step > 0.0)) throw InvalidConfigError("grid.step must be positive");
    }
    if (j.contains("dichotomy")) {
        reject_unknown(j["dichotomy"], "dichotomy", {"delta", "quadStep"});
        cfg.system.delta = num_or(j["dichotomy"], "delta", cfg.system.delta);
        cfg.quad_step = num_or(j["dichotomy"], "quadStep", cfg.quad_step);
    }
    if (j.contains("stage")) {
        reject_unknown(j["stage"], "stage", {"depth"});
        cfg.stage_depth = int_or(j["stage"], "depth", 1);
        if (cfg.stage_depth < 1 || cfg.stage_depth > 4)
            throw InvalidConfigError("stage.depth must be in [1, 4]");
    }
    if (j.contains("aux")) {
        reject_unknown(j["aux"], "aux", {"variant", "relTol", "blowupCap"});
        const std::string v = j["aux"].value("variant", "hat33");
        if (v == "hat33")
            cfg.variant = AuxVariant::Hat33;
        else if (v == "full32")
            cfg.variant = AuxVariant::Full32;
        else if (v == "hom34")
            cfg.variant = AuxVariant::Hom34;
        else
            throw InvalidConfigError("aux.variant must be full32, hat33 or hom34");
        cfg.rel_tol = num_or(j["aux"], "relTol", cfg.rel_tol);
        cfg.blowup_cap = num_or(j["aux"], "blowupCap", cfg.blowup_cap);
        if (!(cfg.rel_tol > 0.0)) throw InvalidConfigError("aux.relTol must be positive");
    }
    if (j.contains("scan")) {
        reject_unknown(j["scan"], "scan", {"deltaMin", "deltaMax", "deltaStep", "horizon"});
        cfg.scan_delta_min = num_or(j["scan"], "deltaMin", cfg.scan_delta_min);
        cfg.scan_delta_max = num_or(j["scan"], "deltaMax", cfg.scan_delta_max);
        cfg.scan_delta_step = num_or(j["scan"], "deltaStep", cfg.scan_delta_step);
        cfg.scan_horizon = num_or(j["scan"], "horizon", cfg.scan_horizon);
        if (!(cfg.scan_delta_step > 0.0) || cfg.scan_delta_max < cfg.scan_delta_min)
            throw InvalidConfigError("scan: bad window grid");
    }
    if (j.contains("bound")) {
        reject_unknown(j["bound"], "bound", {"horizon", "x0Norm", "seeds", "x0", "emitFull32"});
        cfg.bound_horizon = num_or(j["bound"], "horizon", cfg.bound_horizon);
        cfg.x0_norm = num_or(j["bound"], "x0Norm", cfg.x0_norm);
        cfg.seeds = int_or(j["bound"], "seeds", cfg.seeds);
        if (j["bound"].contains("x0"))
            cfg.x0_explicit = j["bound"]["x0"].get<std::vector<double>>();
        if (j["bound"].contains("emitFull32"))
            cfg.emit_full32 = j["bound"]["emitFull32"].get<bool>();
        if (cfg.seeds < 1) throw InvalidConfigError("bound.seeds must be >= 1");
    }
    if (j.contains("region")) {
        reject_unknown(j["region"], "region",
                       {"mode", "horizon", "zCap", "bisectTol", "zHatPoints", "zHatMin",
                        "axes", "boundaryPoints"});
        cfg.region_mode = j["region"].value("mode", cfg.region_mode);
        if (cfg.region_mode != "auto" && cfg.region_mode != "stability" &&
            cfg.region_mode != "trapping")
            throw InvalidConfigError("region.mode must be auto, stability or trapping");
        cfg.region_horizon = num_or(j["region"], "horizon", cfg.region_horizon);
        cfg.z_cap = num_or(j["region"], "zCap", cfg.z_cap);
        cfg.bisect_tol = num_or(j["region"], "bisectTol", cfg.bisect_tol);
        cfg.zhat_points = int_or(j["region"], "zHatPoints", cfg.zhat_points);
        cfg.zhat_min = num_or(j["region"], "zHatMin", cfg.zhat_min);
        cfg.boundary_points = int_or(j["region"], "boundaryPoints", cfg.boundary_points);
        if (j["region"].contains("axes")) {
            cfg.axes.clear();
            for (const auto& pair : j["region"]["axes"]) {
                if (!pair.is_array() || pair.size() != 2)
                    throw InvalidConfigError("region.axes: pairs of indices expected");
                cfg.axes.emplace_back(pair[0].get<int>(), pair[1].get<int>());
            }
        }
        if (!(cfg.z_cap > 0.0) || !(cfg.bisect_tol > 0.0))
            throw InvalidConfigError("region: zCap and bisectTol must be positive");
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw InvalidConfigError("cannot open config file " + path.string());
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw InvalidConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config(j);
}

RunConfig config_for_preset(const std::string& preset) {
    json j;
    j["schemaVersion"] = 1;
    j["system"] = {{"preset", preset}};
    return parse_config(j);
}

std::vector<Rvec> seeded_directions(std::uint64_t seed, int count, int n) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() {
        return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    };
    std::vector<Rvec> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        Rvec v(n);
        for (int i = 0; i < n; i += 2) {
            const double u1 = uniform(), u2 = uniform();
            const double r = std::sqrt(-2.0 * std::log(u1));
            v(i) = r * std::cos(2.0 * M_PI * u2);
            if (i + 1 < n) v(i + 1) = r * std::sin(2.0 * M_PI * u2);
        }
        const double nrm = v.norm();
        out.push_back(nrm > 0.0 ? Rvec(v / nrm) : Rvec(Rvec::Unit(n, 0)));
    }
    return out;
}

StageBundle build_bundle(const SystemSpec& system, double delta, double quad_step,
                         double horizon, double grid_step, int depth,
                         const StageOptions& opts) {
    StageBundle b;
    DichotomyConfig dc;
    dc.delta = delta;
    dc.quad_step = quad_step > 0.0
                       ? quad_step
                       : (delta > 0.0 ? std::min(delta / 8.0, 0.05) : 0.05);
    const auto grid = uniform_grid_step(system.t0, horizon, grid_step);
    auto [a0, g0] = moving_average_split(system.B, dc, grid);
    b.a0 = std::move(a0);
    b.g0 = std::move(g0);
    b.chain = build_chain(b.a0, b.g0, depth, opts);
    b.bound = push_nonlinearity(b.chain.back(), system.bound_spec);
    return b;
}

namespace {

OutputMeta make_meta(const RunConfig& cfg, const std::string& command, double horizon) {
    OutputMeta meta;
    meta.command = command;
    meta.config_hash = cfg.config_hash;
    meta.fields["system"] = cfg.system.name;
    meta.fields["kappa"] = format_double(cfg.system.params.kappa);
    meta.fields["delta"] = format_double(cfg.system.delta);
    meta.fields["relTol"] = format_double(cfg.rel_tol);
    meta.fields["gridStep"] = format_double(cfg.grid_step);
    meta.fields["horizon"] = format_double(horizon);
    meta.fields["seed"] = std::to_string(cfg.seed);
    return meta;
}

json meta_json(const RunConfig& cfg, double horizon) {
    json j;
    j["configHash"] = cfg.config_hash;
    j["system"] = cfg.system.name;
    j["kappa"] = cfg.system.params.kappa;
    j["delta"] = cfg.system.delta;
    j["relTol"] = cfg.rel_tol;
    j["certificationHorizon"] = horizon;
    j["seed"] = cfg.seed;
    return j;
}

unsigned env_threads() {
    const char* v = std::getenv("AUXBOUND_THREADS");
    if (!v) return std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    const long n = std::strtol(v, nullptr, 10);
    return n >= 1 ? static_cast<unsigned>(n) : 1u;
}

} // namespace

int cmd_scan(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    std::vector<double> deltas;
    for (double d = cfg.scan_delta_min; d <= cfg.scan_delta_max + 1e-12;
         d += cfg.scan_delta_step)
        deltas.push_back(d);

    ScanOptions opts;
    opts.grid_step = std::max(cfg.grid_step, 0.05); // scan resolution knob
    opts.quad_step = cfg.quad_step > 0.0 ? cfg.quad_step : 0.05;
    opts.stage_depth = cfg.stage_depth;
    opts.threads = env_threads();
    const ScanTable table = window_scan(cfg.system.spec, deltas, cfg.scan_horizon, opts);

    CsvTable csv;
    csv.columns = {"delta", "phi1", "phi2", "converged"};
    for (const ScanRow& r : table.rows)
        csv.rows.push_back({r.delta, r.phi1, r.phi2, r.converged ? 1.0 : 0.0});
    OutputMeta meta = make_meta(cfg, "scan", cfg.scan_horizon);
    meta.fields["irregularRows"] = std::to_string(
        std::count_if(table.rows.begin(), table.rows.end(),
                      [](const ScanRow& r) { return r.irregular; }));
    atomic_write(out_dir / "scan.csv", csv.render(meta));

    json summary = meta_json(cfg, cfg.scan_horizon);
    summary["rows"] = table.rows.size();
    if (table.argmin_phi1 >= 0) {
        summary["argminDeltaPhi1"] = table.rows[static_cast<std::size_t>(table.argmin_phi1)].delta;
        summary["minPhi1"] = table.rows[static_cast<std::size_t>(table.argmin_phi1)].phi1;
    }
    if (table.argmin_phi2 >= 0) {
        summary["argminDeltaPhi2"] = table.rows[static_cast<std::size_t>(table.argmin_phi2)].delta;
        summary["minPhi2"] = table.rows[static_cast<std::size_t>(table.argmin_phi2)].phi2;
    }
    atomic_write(out_dir / "scan_summary.json", summary.dump(2) + "\n");
    return kExitOk;
}

int cmd_bound(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    const SystemSpec& sys = cfg.system.spec;
    const double horizon = cfg.bound_horizon > 0.0 ? cfg.bound_horizon : cfg.system.horizon;
    const StageBundle bundle =
        build_bundle(sys, cfg.system.delta, cfg.quad_step, horizon, cfg.grid_step,
                     cfg.stage_depth);
    const ChainStage& stage = bundle.stage();

    const AuxVariant main_variant =
        cfg.variant == AuxVariant::Hom34 && sys.F0 > 0.0 ? AuxVariant::Hat33 : cfg.variant;
    const AuxEquation aux_main = build_aux(stage, bundle.bound, sys, main_variant);
    std::optional<AuxEquation> aux_full;
    if (cfg.emit_full32 && main_variant != AuxVariant::Full32)
        aux_full = build_aux(stage, bundle.bound, sys, AuxVariant::Full32);

    std::vector<Rvec> initials;
    if (!cfg.x0_explicit.empty()) {
        if (static_cast<int>(cfg.x0_explicit.size()) != sys.n)
            throw InvalidConfigError("bound.x0: dimension mismatch");
        Rvec x0(sys.n);
        for (int i = 0; i < sys.n; ++i) x0(i) = cfg.x0_explicit[static_cast<std::size_t>(i)];
        initials.push_back(x0);
    } else {
        for (const Rvec& dir : seeded_directions(cfg.seed, cfg.seeds, sys.n))
            initials.push_back(Rvec(cfg.x0_norm * dir));
    }

    IntegrateOptions io;
    io.rel_tol = cfg.rel_tol;
    io.blowup_cap = cfg.blowup_cap;
    io.output_step = cfg.grid_step;

    const Cmat v0 = stage.v_cum.values.front();
    json margins = meta_json(cfg, horizon);
    margins["variant"] = to_string(main_variant);
    json per_seed = json::array();
    double min_margin = std::numeric_limits<double>::infinity();
    bool first = true;

    for (const Rvec& x0 : initials) {
        const double z0 = Eigen::PartialPivLU<Cmat>(v0).solve(x0.cast<Complex>()).norm();
        const SystemTrajectory truth = full_integrate(sys, x0, sys.t0, horizon, io);
        if (truth.solution.status == SolveStatus::Diverged)
            throw NumericError("cmd_bound: full system diverged before the horizon");
        const Trajectory z = integrate_aux(aux_main, z0, sys.t0, horizon, io);
        const ScalarPath b = bound_path(stage, z);
        const MarginReport rep = check_bound(truth.norm, b);

        json entry;
        entry["z0"] = z0;
        entry["minMargin"] = rep.min_margin;
        entry["argminTime"] = rep.argmin_time;
        entry["violations"] = rep.violations;
        entry["comparedUntil"] = rep.compared_until;
        entry["boundDiverged"] = z.status == SolveStatus::Diverged;
        if (z.status == SolveStatus::Diverged) entry["boundBlowupTime"] = z.blowup_time;
        per_seed.push_back(entry);
        min_margin = std::min(min_margin, rep.min_margin);

        if (first) {
            first = false;
            std::optional<Trajectory> z_full;
            if (aux_full) z_full = integrate_aux(*aux_full, z0, sys.t0, horizon, io);
            CsvTable csv;
            csv.columns = {"t", "norm_x", "bound_" + std::string(to_string(main_variant))};
            if (z_full) csv.columns.push_back("bound_full32");
            const ScalarPath b_full =
                z_full ? bound_path(stage, *z_full) : ScalarPath();
            for (std::size_t i = 0; i < truth.norm.size(); ++i) {
                const double t = truth.norm.grid[i];
                std::vector<double> row{t, truth.norm.values[i],
                                        t <= b.t_end() ? b(t)
                                                       : std::numeric_limits<double>::quiet_NaN()};
                if (z_full)
                    row.push_back(t <= b_full.t_end()
                                      ? b_full(t)
                                      : std::numeric_limits<double>::quiet_NaN());
                csv.rows.push_back(std::move(row));
            }
            OutputMeta meta = make_meta(cfg, "bound", horizon);
            meta.fields["variant"] = to_string(main_variant);
            meta.fields["x0Norm"] = format_double(x0.norm());
            atomic_write(out_dir / "norms.csv", csv.render(meta));
        }
    }
    margins["minMargin"] = min_margin;
    margins["tolerance"] = 1e-6;
    margins["perSeed"] = per_seed;
    atomic_write(out_dir / "margin.json", margins.dump(2) + "\n");
    return kExitOk;
}

int cmd_region(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    const SystemSpec& sys = cfg.system.spec;
    const double horizon = cfg.region_horizon > 0.0 ? cfg.region_horizon : cfg.system.horizon;
    std::string mode = cfg.region_mode;
    if (mode == "auto") mode = sys.F0 > 0.0 ? "trapping" : "stability";
    if (mode == "stability" && sys.F0 > 0.0)
        throw InvalidConfigError("region: stability mode requires an unforced system");

    const StageBundle bundle =
        build_bundle(sys, cfg.system.delta, cfg.quad_step, horizon, cfg.grid_step,
                     cfg.stage_depth);
    const ChainStage& stage = bundle.stage();

    IntegrateOptions io;
    io.rel_tol = cfg.rel_tol;
    io.blowup_cap = cfg.blowup_cap;
    io.output_step = cfg.grid_step;

    // Nonlocal threshold of the scalar equation.
    const AuxVariant variant = mode == "stability" ? AuxVariant::Hom34 : AuxVariant::Hat33;
    const AuxEquation aux = build_aux(stage, bundle.bound, sys, variant);
    ThresholdOptions topts;
    topts.bisect_tol = cfg.bisect_tol;
    topts.integrate = io;
    const ThresholdResult threshold =
        nonlocal_threshold(aux, cfg.z_cap, horizon,
                           mode == "stability" ? ThresholdMode::Stability
                                               : ThresholdMode::Trapping,
                           topts);

    // Local (linearized) table.
    const LinearMachinery machinery = make_machinery(stage, bundle.bound, sys);
    RegionOptions ropts;
    ropts.integrate = io;
    const std::vector<double> zgrid =
        default_zhat_grid(machinery, cfg.zhat_points, cfg.zhat_min, cfg.z_cap, ropts);
    const RegionReport local = sys.F0 > 0.0 ? local_bounded_region(machinery, zgrid, ropts)
                                            : local_stability_region(machinery, zgrid, ropts);

    CsvTable csv;
    csv.columns = {"zhat", "Z_hs", "Z_Fs", "value", "phi", "classification"};
    for (const ZHatRow& r : local.table)
        csv.rows.push_back({r.z_hat, r.Z_h_sup, r.Z_F_sup, r.value, r.phi,
                            r.verdict == Stability::AsymptoticallyStable ? 2.0
                            : r.verdict == Stability::Stable             ? 1.0
                                                                         : 0.0});
    OutputMeta meta = make_meta(cfg, "region", horizon);
    meta.fields["mode"] = mode;
    meta.fields["bisectTol"] = format_double(cfg.bisect_tol);
    atomic_write(out_dir / "zhat_table.csv", csv.render(meta));

    json rj = meta_json(cfg, horizon);
    rj["mode"] = mode;
    rj["zBar"] = threshold.z_bar;
    rj["atCap"] = threshold.at_cap;
    rj["bracketLo"] = threshold.bracket_lo;
    rj["bracketHi"] = threshold.bracket_hi;
    rj["localRadius"] = local.radius;
    rj["localZHatStar"] = local.z_hat_star;
    rj["unbounded"] = local.unbounded || threshold.at_cap;
    rj["empty"] = local.empty && threshold.z_bar <= 0.0;
    rj["classification"] = to_string(local.classification);
    if (std::isfinite(local.asymptotic_gain)) rj["asymptoticGain"] = local.asymptotic_gain;
    rj["bisectTol"] = cfg.bisect_tol;
    atomic_write(out_dir / "region.json", rj.dump(2) + "\n");

    if (threshold.z_bar > 0.0 && !threshold.at_cap) {
        const Rmat Q = ellipsoid_form(stage.v_cum.values.front());
        for (const auto& [ai, aj] : cfg.axes) {
            if (ai < 1 || aj < 1 || ai > sys.n || aj > sys.n || ai == aj)
                throw InvalidConfigError("region.axes: indices out of range");
            const Rmat q2 = project_ellipsoid(Q, ai - 1, aj - 1);
            const auto boundary = ellipsoid_boundary(q2, threshold.z_bar,
                                                     cfg.boundary_points);
            CsvTable bc;
            bc.columns = {"x_" + std::to_string(ai), "x_" + std::to_string(aj)};
            for (const auto& p : boundary) bc.rows.push_back({p[0], p[1]});
            OutputMeta bmeta = make_meta(cfg, "region-boundary", horizon);
            bmeta.fields["zBar"] = format_double(threshold.z_bar);
            bmeta.fields["axes"] = std::to_string(ai) + "," + std::to_string(aj);
            atomic_write(out_dir / ("boundary_" + std::to_string(ai) + "_" +
                                    std::to_string(aj) + ".csv"),
                         bc.render(bmeta));
        }
    }
    return kExitOk;
}

int cmd_reproduce(const std::string& figure, const std::filesystem::path& out_dir) {
    const auto preset = find_preset(figure);
    if (!preset) throw InvalidConfigError("unknown figure id '" + figure + "'");
    RunConfig cfg = config_for_preset(figure);
    if (preset->figure_kind == "scan") return cmd_scan(cfg, out_dir);
    if (preset->figure_kind == "bound") return cmd_bound(cfg, out_dir);
    return cmd_region(cfg, out_dir);
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"scalar auxiliary-equation bounds for time-varying nonlinear systems"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", preset_override, figure_id;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        sub->add_option("--config", config_path, "run configuration (JSON)")
            ->required(config_required);
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--preset", preset_override, "override the configured preset");
    };
    CLI::App* scan = app.add_subcommand("scan", "window scan of the Lyapunov exponents");
    add_common(scan, true);
    CLI::App* bound = app.add_subcommand("bound", "norm bound vs. full integration");
    add_common(bound, true);
    CLI::App* region = app.add_subcommand("region", "trapping/stability region estimate");
    add_common(region, true);
    CLI::App* reproduce = app.add_subcommand("reproduce", "rebuild a figure's data bundle");
    reproduce->add_option("--figure", figure_id, "figure id, e.g. fig1a")->required();
    reproduce->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (reproduce->parsed()) return cmd_reproduce(figure_id, out_dir);
        RunConfig cfg = load_config(config_path);
        if (!preset_override.empty()) {
            nlohmann::json j = cfg.raw;
            j["system"]["preset"] = preset_override;
            j["system"].erase("custom");
            cfg = parse_config(j);
        }
        if (scan->parsed()) return cmd_scan(cfg, out_dir);
        if (bound->parsed()) return cmd_bound(cfg, out_dir);
        if (region->parsed()) return cmd_region(cfg, out_dir);
        return kExitConfig;
    } catch (const InvalidConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InvalidInputError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const Error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    }
}

} // namespace auxbound
