#pragma once

#include <functional>
#include <span>

#include "rfdaq/rdma/endpoint.hpp"

namespace rfdaq::rdma {

struct RunResult {
    double time = 0.0;      // virtual time when the loop stopped
    bool completed = false;  // done() returned true (vs. deadline or quiescence)
};

/// Event loop over a shared channel: step every endpoint at the current
/// virtual time, then jump to the next datagram delivery or timer deadline.
/// Stops when done() holds, t_limit is reached, or nothing is pending.
RunResult run_until(Channel& channel, std::span<Endpoint* const> endpoints, double start,
                    double t_limit, const std::function<bool()>& done);

}  // namespace rfdaq::rdma
