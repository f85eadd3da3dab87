#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "auxbound/aux_ode.hpp"
#include "auxbound/criteria.hpp"
#include "auxbound/dichotomy.hpp"
#include "auxbound/io.hpp"
#include "auxbound/systems.hpp"

namespace auxbound {

/// Exit codes of the batch front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitIo = 4;

struct ResolvedSystem {
    SystemSpec spec;
    BenchmarkParams params;
    double delta = 0.0;
    double horizon = 100.0;
    std::string name;
    std::string figure_kind;
};

/// Parsed and validated run configuration (schemaVersion 1, unknown keys
/// rejected).
struct RunConfig {
    nlohmann::json raw;
    std::string config_hash;
    std::uint64_t seed = 20240601;

    ResolvedSystem system;

    double grid_step = 0.02;
    double quad_step = 0.0; // 0: derived from the window
    int stage_depth = 1;

    AuxVariant variant = AuxVariant::Hat33;
    double rel_tol = 1e-9;
    double blowup_cap = 1e6;

    // scan
    double scan_delta_min = 0.0, scan_delta_max = 20.0, scan_delta_step = 0.5;
    double scan_horizon = 1000.0;

    // bound
    double bound_horizon = 0.0; // 0: preset default
    double x0_norm = 0.1;
    int seeds = 1;
    std::vector<double> x0_explicit; // overrides seeding when nonempty
    bool emit_full32 = false;

    // region
    std::string region_mode = "auto"; // stability | trapping | auto (by forcing)
    double region_horizon = 0.0;      // 0: preset default
    double z_cap = 10.0;
    double bisect_tol = 1e-4;
    int zhat_points = 32;
    double zhat_min = 1e-3;
    int boundary_points = 256;
    std::vector<std::pair<int, int>> axes{{1, 2}}; // 1-based axis pairs
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
/// Minimal config for a named preset (used by `reproduce`).
RunConfig config_for_preset(const std::string& preset);

/// Deterministic unit vectors for seeded initial conditions.
std::vector<Rvec> seeded_directions(std::uint64_t seed, int count, int n);

/// Everything the bound/region commands need, built once per run.
struct StageBundle {
    MatrixPath a0, g0;
    std::vector<ChainStage> chain;
    PolyBound bound;
    const ChainStage& stage() const { return chain.back(); }
};

StageBundle build_bundle(const SystemSpec& system, double delta, double quad_step,
                         double horizon, double grid_step, int depth = 1,
                         const StageOptions& opts = {});

int cmd_scan(const RunConfig& cfg, const std::filesystem::path& out_dir);
int cmd_bound(const RunConfig& cfg, const std::filesystem::path& out_dir);
int cmd_region(const RunConfig& cfg, const std::filesystem::path& out_dir);
int cmd_reproduce(const std::string& figure, const std::filesystem::path& out_dir);

/// Full command-line entry point (parses argv, maps errors to exit codes).
int run_cli(int argc, const char* const* argv);

} // namespace auxbound
