#include "rfdaq/rdma/simulation.hpp"

#include <algorithm>
#include <cmath>

namespace rfdaq::rdma {

RunResult run_until(Channel& channel, std::span<Endpoint* const> endpoints, double start,
                    double t_limit, const std::function<bool()>& done) {
    double t = start;
    for (uint64_t guard = 0; guard < 50'000'000; ++guard) {
        for (Endpoint* ep : endpoints) ep->step(t);
        if (done()) return {t, true};
        double tn = channel.next_event_time();
        for (Endpoint* ep : endpoints) tn = std::min(tn, ep->next_timer());
        if (!std::isfinite(tn)) return {t, false};  // quiescent
        if (tn > t_limit) return {t_limit, false};
        t = std::max(t, tn);
    }
    throw StageError(Stage::transport, "simulation did not settle");
}

}  // namespace rfdaq::rdma
