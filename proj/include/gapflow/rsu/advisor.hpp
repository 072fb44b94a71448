#pragma once

#include <functional>
#include <memory>

#include "gapflow/env/observation.hpp"
#include "gapflow/env/scenario.hpp"
#include "gapflow/rl/ddpg.hpp"
#include "gapflow/rsu/messages.hpp"

namespace gapflow::rsu {

/// Serves one request: builds the observation from the snapshot plus the
/// request, runs the actor without noise, and decodes the gaps. The response
/// carries the wall-clock time of those three stages. Requests that fail
/// validation or exceed n_max yield an ErrorMessage.
Message handle_request(const GapRequest& request, const rl::DdpgAgent& agent,
                       const env::TrafficSnapshot& traffic, const env::EnvConfig& config);

/// Current traffic conditions as seen by the roadside unit.
using SnapshotSource = std::function<env::TrafficSnapshot()>;

/// Any message in, one message out. Must be safe to call concurrently.
using Handler = std::function<Message(const Message&)>;

/// Request handler bound to a shared read-only agent. Non-request messages
/// are answered with an "unexpected message" error.
Handler make_handler(std::shared_ptr<const rl::DdpgAgent> agent, env::EnvConfig config,
                     SnapshotSource snapshot);

/// Free-flow conditions for a scenario: empty ramp, nominal mainline
/// density of `density` veh/km/lane, every speed at the speed limit.
env::TrafficSnapshot free_flow_snapshot(const env::Scenario& scenario, double density = 0.0);

}  // namespace gapflow::rsu
