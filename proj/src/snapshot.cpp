#include <cmath>
#include <stdexcept>

#include "rephase/network.hpp"

namespace rephase {

Snapshot::Snapshot(std::shared_ptr<const Network> net, std::vector<std::array<Complex, 3>> demand_kva,
                   std::vector<double> pv_kw, int hour)
    : network_(std::move(net)), demand_kva_(std::move(demand_kva)), pv_kw_(std::move(pv_kw)), hour_(hour) {
    if (!network_) throw std::invalid_argument("Snapshot: null network");
    if (demand_kva_.size() != static_cast<std::size_t>(network_->bus_count()))
        throw std::invalid_argument("Snapshot: demand must have one entry per bus");
    if (pv_kw_.size() != network_->pv_count())
        throw std::invalid_argument("Snapshot: pv_kw must have one entry per PV unit");
}

double Snapshot::total_pv_kw() const {
    double total = 0.0;
    for (double p : pv_kw_) total += p;
    return total;
}

double reactive_kvar(double kw, double power_factor) {
    return kw * std::tan(std::acos(power_factor));
}

Snapshot make_snapshot(std::shared_ptr<const Network> net, double load_factor, double pv_factor, int hour) {
    if (!net) throw std::invalid_argument("make_snapshot: null network");
    std::vector<std::array<Complex, 3>> demand(net->bus_count(), std::array<Complex, 3>{});
    for (const auto& load : net->loads()) {
        for (std::size_t ph = 0; ph < 3; ++ph) {
            const double kw = load.p_max_kw[ph] * load_factor;
            demand[load.bus][ph] += Complex(kw, reactive_kvar(kw, load.power_factor));
        }
    }
    std::vector<double> pv(net->pv_count());
    for (std::size_t i = 0; i < pv.size(); ++i) pv[i] = net->pv_units()[i].capacity_kw * pv_factor;
    return Snapshot(std::move(net), std::move(demand), std::move(pv), hour);
}

Snapshot make_snapshot(std::shared_ptr<const Network> net, const HourlyProfiles& profiles, int hour) {
    if (hour < 0 || hour > 23) throw std::out_of_range("make_snapshot: hour must be in 0..23");
    return make_snapshot(std::move(net), profiles.load_factor[hour], profiles.pv_factor[hour], hour);
}

}  // namespace rephase
