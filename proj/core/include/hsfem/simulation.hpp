#pragma once

#include "hsfem/assembly.hpp"
#include "hsfem/config.hpp"
#include "hsfem/diagnostics.hpp"
#include "hsfem/fespace.hpp"
#include "hsfem/stepper.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hsfem {

/// Aggregated monitor results over a run.
struct RunSummary {
    std::size_t steps = 0;
    double t = 0.0;
    std::size_t clamped_nodes = 0;
    double h4_min = 0.0;
    bool h4_holds = false;

    std::size_t dmp_violations = 0;       ///< steps with a node outside [0, N_max]
    double min_value = 0.0;               ///< smallest nodal density seen
    double max_value = 0.0;               ///< largest nodal density seen
    std::size_t pressure_violations = 0;  ///< steps with p(n) > P_max + 1e-10
    std::size_t monotonicity_violations = 0; ///< only counted when h4_holds
    double min_dtn = 0.0;
    std::size_t mass_balance_violations = 0; ///< residual > 1e-9 (n^m, 1)_h
    double max_mass_balance_ratio = 0.0;
    std::size_t energy_flags = 0;
    std::size_t snaps = 0;
    std::size_t solver_iterations = 0;
    std::vector<std::string> messages; ///< first few violation descriptions

    bool ok() const
    {
        return dmp_violations == 0 && pressure_violations == 0 && monotonicity_violations == 0 &&
               mass_balance_violations == 0 && energy_flags == 0;
    }
};

using StepObserver = std::function<void(const SimState&)>;

/// Owns the mesh and fixed operators of one run and advances the state with
/// the monitors switched on.
class Simulation {
public:
    /// Initial density from the configured datum.
    explicit Simulation(const RunConfig& config);
    /// Initial density I_h(initial), clamped to [0, N_max(k)].
    Simulation(const RunConfig& config, const ScalarFunction& initial);

    const RunConfig& config() const { return config_; }
    const MeshPtr& mesh() const { return mesh_; }
    const Assembler& assembler() const { return assembler_; }
    const LumpedMass& mass() const { return mass_; }
    const SparseOperator& stiffness() const { return stiffness_; }
    const SimState& state() const { return state_; }
    const RunSummary& summary() const { return summary_; }
    const std::vector<DiagnosticsRecord>& series() const { return series_; }
    std::size_t total_steps() const { return total_steps_; }
    bool finished() const { return state_.step >= total_steps_; }

    /// One time step. Throws on solver failure or a negative input density.
    const SimState& advance();

    /// Steps to t_final, calling `observer` after the initial state and every step.
    const RunSummary& run(const StepObserver& observer = {});

private:
    void initialise(const ScalarFunction& initial);
    DiagnosticsRecord base_record(const SimState& s) const;
    void note(const std::string& message);

    RunConfig config_;
    MeshPtr mesh_;
    Assembler assembler_;
    LumpedMass mass_;
    SparseOperator stiffness_;
    StepOptions step_options_;
    SimState state_;
    std::optional<EnergyTracker> energy_;
    RunSummary summary_;
    std::vector<DiagnosticsRecord> series_;
    std::size_t total_steps_ = 0;
    double n_upper_ = 0.0;
    double last_complementarity_ = 0.0;
};

/// Number of steps to reach `t` with step tau (rounded to nearest).
std::size_t steps_to(double t, double tau);

} // namespace hsfem
