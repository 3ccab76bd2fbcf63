#pragma once

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rephase/network.hpp"
#include "rephase/phase.hpp"

namespace rephase {

struct SolverSettings {
    double tolerance = 1e-6;  // pu, max voltage change between iterations
    int max_iterations = 100;

    void validate() const;
};

enum class SolveStatus { converged, not_converged, collapsed };

/// Result of one unbalanced four-wire power flow.
struct LoadFlowSolution {
    SolveStatus status = SolveStatus::not_converged;
    int iterations = 0;
    double mismatch = 0.0;  // pu, at exit

    std::vector<Vector4> voltages;                // volts, conductors a, b, c, n
    std::vector<std::array<double, 3>> phase_pu;  // |V_phase - V_n| / base
    std::vector<Complex> v_plus;                  // pu
    std::vector<Complex> v_minus;                 // pu
    std::vector<double> vuf_percent;

    bool converged() const { return status == SolveStatus::converged; }
};

class LoadFlowError : public std::runtime_error {
  public:
    LoadFlowError(SolveStatus status, double mismatch, const std::string& what)
        : std::runtime_error(what), status_(status), mismatch_(mismatch) {}
    SolveStatus status() const { return status_; }
    double mismatch() const { return mismatch_; }

  private:
    SolveStatus status_;
    double mismatch_;
};

struct SequenceComponents {
    Complex zero;
    Complex positive;
    Complex negative;
};

/// Symmetrical-component transform with a = 1 at 120 degrees.
SequenceComponents sequence_components(Complex va, Complex vb, Complex vc);

/// Inverse transform back to phase quantities (a, b, c).
std::array<Complex, 3> phase_components(const SequenceComponents& s);

/// Voltage unbalance factor in percent, 100 |V-| / |V+|.
/// Throws std::domain_error when |V+| is zero.
double vuf(Complex v_plus, Complex v_minus);

/// Balanced positive-sequence source, in volts, with a grounded neutral.
Vector4 source_voltages(const SystemBase& base);

/// Backward/forward sweep on the four-wire tree. Constant-power loads and PV
/// injections are connected phase-to-neutral on their assigned phase; the
/// neutral is grounded only at the root.
/// Never throws for numerical trouble; inspect `status`.
LoadFlowSolution solve_unchecked(const Snapshot& snapshot, const PVConfigVector& assignment,
                                 const SolverSettings& settings = {});

/// As solve_unchecked, but throws LoadFlowError unless the flow converged.
LoadFlowSolution solve(const Snapshot& snapshot, const PVConfigVector& assignment,
                       const SolverSettings& settings = {});

/// Reference solver for small networks: fixed-point iteration on the full
/// complex nodal admittance system of all four conductors. Shares no code with
/// the sweep beyond the device model. Limited to 10 buses.
LoadFlowSolution nodal_oracle(const Snapshot& snapshot, const PVConfigVector& assignment,
                              const SolverSettings& settings = {});

/// Per-bus dump: bus, Va, Vb, Vc, Vn, VUF_percent (phase values in pu
/// phase-to-neutral, Vn as neutral-to-ground magnitude in pu).
void write_solution_csv(std::ostream& out, const LoadFlowSolution& solution, const SystemBase& base);

namespace detail {
/// Per-bus, per-phase constant power (VA) drawn for a given assignment.
std::vector<std::array<Complex, 3>> bus_power_va(const Snapshot& snapshot, const PVConfigVector& assignment);
/// Device currents drawn at one bus from its conductor voltages.
Vector4 device_currents(const std::array<Complex, 3>& power_va, const Vector4& v);
/// Fills magnitudes, sequence components and VUF from `voltages`.
void finish_solution(LoadFlowSolution& s, const SystemBase& base);
}  // namespace detail

}  // namespace rephase
