#include <Eigen/Dense>
#include <cmath>

#include "rephase/loadflow.hpp"

namespace rephase {

LoadFlowSolution nodal_oracle(const Snapshot& snapshot, const PVConfigVector& assignment,
                              const SolverSettings& settings) {
    settings.validate();
    const Network& net = snapshot.network();
    const int n = net.bus_count();
    if (n > 10) throw std::invalid_argument("nodal_oracle: limited to networks of at most 10 buses");
    if (assignment.size() != net.pv_count()) throw std::invalid_argument("nodal_oracle: assignment length mismatch");

    using Eigen::MatrixXcd;
    using Eigen::VectorXcd;
    const int unknowns = 4 * (n - 1);
    auto row_of = [](int bus, int conductor) { return 4 * (bus - 1) + conductor; };

    // Full admittance, root columns kept separately.
    MatrixXcd y_uu = MatrixXcd::Zero(unknowns, unknowns);
    MatrixXcd y_ur = MatrixXcd::Zero(unknowns, 4);
    for (const auto& seg : net.segments()) {
        Eigen::Matrix4cd z;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) z(r, c) = seg.z_per_km[r][c] * seg.length_km;
        const Eigen::Matrix4cd y = z.inverse();
        const int ends[2] = {seg.from_bus, seg.to_bus};
        for (int e = 0; e < 2; ++e) {
            const int self = ends[e];
            const int other = ends[1 - e];
            if (self == 0) continue;
            for (int r = 0; r < 4; ++r) {
                for (int c = 0; c < 4; ++c) {
                    y_uu(row_of(self, r), row_of(self, c)) += y(r, c);
                    if (other == 0) y_ur(row_of(self, r), c) -= y(r, c);
                    else y_uu(row_of(self, r), row_of(other, c)) -= y(r, c);
                }
            }
        }
    }
    const Eigen::PartialPivLU<MatrixXcd> lu(y_uu);

    // Net complex power drawn phase-to-neutral at each bus, VA.
    std::vector<std::array<Complex, 3>> drawn(n);
    for (int b = 0; b < n; ++b)
        for (int ph = 0; ph < 3; ++ph) drawn[b][ph] = 1000.0 * snapshot.demand_kva()[b][ph];
    for (std::size_t i = 0; i < net.pv_count(); ++i) {
        const auto& pv = net.pv_units()[i];
        drawn[pv.bus][index_of(assignment[i])] -= 1000.0 * snapshot.pv_kw()[i];
    }

    const Vector4 src = source_voltages(net.base());
    VectorXcd v_root(4);
    for (int c = 0; c < 4; ++c) v_root(c) = src[c];
    VectorXcd v(unknowns);
    for (int b = 1; b < n; ++b)
        for (int c = 0; c < 4; ++c) v(row_of(b, c)) = src[c];
    const VectorXcd root_term = y_ur * v_root;
    const double vbase = net.base().volts_ln;

    LoadFlowSolution sol;
    for (int it = 1; it <= settings.max_iterations; ++it) {
        VectorXcd inj = VectorXcd::Zero(unknowns);
        for (int b = 1; b < n; ++b) {
            const Complex vn = v(row_of(b, 3));
            for (int ph = 0; ph < 3; ++ph) {
                if (drawn[b][ph] == Complex{}) continue;
                const Complex i_draw = std::conj(drawn[b][ph] / (v(row_of(b, ph)) - vn));
                inj(row_of(b, ph)) -= i_draw;
                inj(row_of(b, 3)) += i_draw;
            }
        }
        const VectorXcd v_next = lu.solve(inj - root_term);
        const double mismatch = unknowns ? (v_next - v).cwiseAbs().maxCoeff() / vbase : 0.0;
        v = v_next;
        sol.iterations = it;
        sol.mismatch = mismatch;

        bool collapsed = false;
        for (int b = 1; b < n; ++b)
            for (int ph = 0; ph < 3; ++ph)
                if (std::abs(v(row_of(b, ph)) - v(row_of(b, 3))) < 0.2 * vbase) collapsed = true;
        if (collapsed || !std::isfinite(mismatch)) {
            sol.status = SolveStatus::collapsed;
            break;
        }
        if (mismatch <= settings.tolerance) {
            sol.status = SolveStatus::converged;
            break;
        }
    }

    sol.voltages.assign(n, src);
    for (int b = 1; b < n; ++b)
        for (int c = 0; c < 4; ++c) sol.voltages[b][c] = v(row_of(b, c));
    detail::finish_solution(sol, net.base());
    if (sol.status == SolveStatus::not_converged || sol.status == SolveStatus::collapsed)
        throw LoadFlowError(sol.status, sol.mismatch, "nodal_oracle: no converged solution");
    return sol;
}

}  // namespace rephase
