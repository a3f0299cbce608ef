#pragma once

#include "hsfem/config.hpp"
#include "hsfem/fespace.hpp"
#include "hsfem/simulation.hpp"

#include <string>
#include <vector>

namespace hsfem {

/// A family of runs that differ in one parameter.
struct SweepSpec {
    std::string param; ///< alpha, nu, k or P_max
    std::vector<double> values;
    RunConfig base;
    /// Optional per-value cell counts (nx = ny); lets k-sweeps refine h as k grows.
    std::vector<int> nx_schedule;
    /// Optional per-value time steps.
    std::vector<double> tau_schedule;
    /// Evaluation time of the k-sweep metrics.
    double eval_time = 0.1;
    /// Dump times of a parameter study.
    std::vector<double> output_times{0.1, 0.2, 0.3, 0.4};
    /// Output directory; empty disables all file output.
    std::string out_dir;
    bool write_fields = true;

    /// Throws ConfigError on an unknown parameter, empty value list,
    /// non-integer k, or schedules of the wrong length.
    void validate() const;
};

/// Config of member `i` of the sweep.
RunConfig member_config(const SweepSpec& spec, std::size_t i);

struct KSweepRow {
    int k = 0;
    double h = 0.0;
    double complementarity = 0.0;
    double grad_p = 0.0; ///< ||grad I_h(n^k)||
    double max_dn = 0.0; ///< max |n - n_ref| on the probe points
    double max_dp = 0.0; ///< max |I_h(n^k) - p_ref| on the probe points
    RunSummary summary;
};

/// Runs every k to eval_time and compares against the last (largest k) run on
/// the node set of the coarsest member. Writes k_sweep.csv after every member.
std::vector<KSweepRow> k_sweep(const SweepSpec& spec);

struct FrontSample {
    double value = 0.0;
    double t = 0.0;
    double front_radius = 0.0;
    double max_n = 0.0;
};

struct ParamStudyResult {
    std::vector<FrontSample> samples;
    std::vector<RunSummary> summaries;
};

/// One run per value up to the last output time; field dumps, a series per run
/// and param_study.csv with the front radius at every output time.
ParamStudyResult param_study(const SweepSpec& spec);

/// Largest distance from the origin along the +x axis at which the P1 density
/// is >= threshold (linear interpolation between axis nodes); 0 if nowhere.
double front_radius(const Field& n, double threshold);

/// Front threshold of a run: half the saturation density.
double front_threshold(const ModelParams& params);

/// Per-run output directory name, e.g. "nu_0.5".
std::string member_dir_name(const std::string& param, double value);

} // namespace hsfem
