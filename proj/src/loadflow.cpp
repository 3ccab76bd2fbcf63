#include "rephase/loadflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "rephase/csv.hpp"

namespace rephase {

namespace {

const Complex kAlpha = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
const Complex kAlpha2 = std::polar(1.0, -2.0 * std::numbers::pi / 3.0);

constexpr double kCollapsePu = 0.2;

}  // namespace

void SolverSettings::validate() const {
    if (!(tolerance > 0.0)) throw std::invalid_argument("solver tolerance must be > 0");
    if (max_iterations < 1) throw std::invalid_argument("solver max_iterations must be >= 1");
}

SequenceComponents sequence_components(Complex va, Complex vb, Complex vc) {
    return {
        (va + vb + vc) / 3.0,
        (va + kAlpha * vb + kAlpha2 * vc) / 3.0,
        (va + kAlpha2 * vb + kAlpha * vc) / 3.0,
    };
}

std::array<Complex, 3> phase_components(const SequenceComponents& s) {
    return {
        s.zero + s.positive + s.negative,
        s.zero + kAlpha2 * s.positive + kAlpha * s.negative,
        s.zero + kAlpha * s.positive + kAlpha2 * s.negative,
    };
}

double vuf(Complex v_plus, Complex v_minus) {
    const double pos = std::abs(v_plus);
    if (pos == 0.0) throw std::domain_error("vuf: positive-sequence voltage is zero");
    return 100.0 * std::abs(v_minus) / pos;
}

Vector4 source_voltages(const SystemBase& base) {
    return {std::polar(base.volts_ln, 0.0), std::polar(base.volts_ln, -2.0 * std::numbers::pi / 3.0),
            std::polar(base.volts_ln, 2.0 * std::numbers::pi / 3.0), Complex{}};
}

namespace detail {

std::vector<std::array<Complex, 3>> bus_power_va(const Snapshot& snapshot, const PVConfigVector& assignment) {
    const Network& net = snapshot.network();
    if (assignment.size() != net.pv_count())
        throw std::invalid_argument("assignment length " + std::to_string(assignment.size()) +
                                    " does not match PV count " + std::to_string(net.pv_count()));
    std::vector<std::array<Complex, 3>> power(net.bus_count());
    for (int b = 0; b < net.bus_count(); ++b)
        for (std::size_t ph = 0; ph < 3; ++ph) power[b][ph] = snapshot.demand_kva()[b][ph] * 1000.0;
    for (std::size_t i = 0; i < net.pv_count(); ++i)
        power[net.pv_units()[i].bus][index_of(assignment[i])] -= snapshot.pv_kw()[i] * 1000.0;
    return power;
}

Vector4 device_currents(const std::array<Complex, 3>& power_va, const Vector4& v) {
    Vector4 current{};
    for (std::size_t ph = 0; ph < 3; ++ph) {
        if (power_va[ph] == Complex{}) continue;
        current[ph] = std::conj(power_va[ph] / (v[ph] - v[kNeutral]));
        current[kNeutral] -= current[ph];
    }
    return current;
}

void finish_solution(LoadFlowSolution& s, const SystemBase& base) {
    const std::size_t n = s.voltages.size();
    s.phase_pu.assign(n, {});
    s.v_plus.assign(n, {});
    s.v_minus.assign(n, {});
    s.vuf_percent.assign(n, 0.0);
    for (std::size_t b = 0; b < n; ++b) {
        const auto& v = s.voltages[b];
        std::array<Complex, 3> pn;
        for (std::size_t ph = 0; ph < 3; ++ph) {
            pn[ph] = (v[ph] - v[kNeutral]) / base.volts_ln;
            s.phase_pu[b][ph] = std::abs(pn[ph]);
        }
        const auto seq = sequence_components(pn[0], pn[1], pn[2]);
        s.v_plus[b] = seq.positive;
        s.v_minus[b] = seq.negative;
        s.vuf_percent[b] = std::abs(seq.positive) > 0.0 ? vuf(seq.positive, seq.negative)
                                                        : std::numeric_limits<double>::infinity();
    }
}

}  // namespace detail

LoadFlowSolution solve_unchecked(const Snapshot& snapshot, const PVConfigVector& assignment,
                                 const SolverSettings& settings) {
    settings.validate();
    const Network& net = snapshot.network();
    const int n = net.bus_count();
    const auto power = detail::bus_power_va(snapshot, assignment);
    const double vbase = net.base().volts_ln;
    const Vector4 source = source_voltages(net.base());

    std::vector<Matrix4> z(n);
    for (int b = 1; b < n; ++b) z[b] = net.segments()[net.feeding_segment(b)].impedance();

    LoadFlowSolution sol;
    sol.voltages.assign(n, source);
    std::vector<Vector4> branch(n);
    std::vector<Vector4> next(n);
    const auto& order = net.order();

    for (int it = 1; it <= settings.max_iterations; ++it) {
        // backward: device currents accumulated leaf to root
        for (int b = 0; b < n; ++b) branch[b] = detail::device_currents(power[b], sol.voltages[b]);
        for (auto rit = order.rbegin(); rit != order.rend(); ++rit) {
            const int b = *rit;
            const int p = net.parent(b);
            if (p < 0) continue;
            for (std::size_t c = 0; c < 4; ++c) branch[p][c] += branch[b][c];
        }

        // forward: voltage drops root to leaf
        next[0] = source;
        for (int b : order) {
            const int p = net.parent(b);
            if (p < 0) continue;
            const Vector4 drop = multiply(z[b], branch[b]);
            for (std::size_t c = 0; c < 4; ++c) next[b][c] = next[p][c] - drop[c];
        }

        double mismatch = 0.0;
        bool collapsed = false;
        for (int b = 0; b < n; ++b) {
            for (std::size_t c = 0; c < 4; ++c)
                mismatch = std::max(mismatch, std::abs(next[b][c] - sol.voltages[b][c]) / vbase);
            for (std::size_t ph = 0; ph < 3; ++ph)
                if (std::abs(next[b][ph] - next[b][kNeutral]) < kCollapsePu * vbase) collapsed = true;
        }
        std::swap(sol.voltages, next);
        sol.iterations = it;
        sol.mismatch = mismatch;
        if (collapsed || !std::isfinite(mismatch)) {
            sol.status = SolveStatus::collapsed;
            break;
        }
        if (mismatch <= settings.tolerance) {
            sol.status = SolveStatus::converged;
            break;
        }
    }

    detail::finish_solution(sol, net.base());
    return sol;
}

LoadFlowSolution solve(const Snapshot& snapshot, const PVConfigVector& assignment, const SolverSettings& settings) {
    auto sol = solve_unchecked(snapshot, assignment, settings);
    if (sol.status == SolveStatus::collapsed)
        throw LoadFlowError(sol.status, sol.mismatch,
                            "voltage collapse after " + std::to_string(sol.iterations) +
                                " iterations: infeasible snapshot");
    if (sol.status == SolveStatus::not_converged)
        throw LoadFlowError(sol.status, sol.mismatch,
                            "load flow did not converge in " + std::to_string(sol.iterations) +
                                " iterations (last mismatch " + std::to_string(sol.mismatch) + " pu)");
    return sol;
}

void write_solution_csv(std::ostream& out, const LoadFlowSolution& solution, const SystemBase& base) {
    csv::row(out, {"bus", "Va", "Vb", "Vc", "Vn", "VUF_percent"});
    for (std::size_t b = 0; b < solution.voltages.size(); ++b) {
        csv::row(out, {std::to_string(b), csv::num(solution.phase_pu[b][0], 6), csv::num(solution.phase_pu[b][1], 6),
                       csv::num(solution.phase_pu[b][2], 6),
                       csv::num(std::abs(solution.voltages[b][kNeutral]) / base.volts_ln, 6),
                       csv::num(solution.vuf_percent[b], 6)});
    }
}

}  // namespace rephase
