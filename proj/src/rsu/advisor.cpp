#include "gapflow/rsu/advisor.hpp"

#include <chrono>

namespace gapflow::rsu {

namespace {

std::int64_t now_us() {
  return std::chrono::duration_cast<std::chrono::microseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

ErrorMessage error(int platoon_id, std::string code, std::string detail) {
  return ErrorMessage{platoon_id, std::move(code), std::move(detail)};
}

}  // namespace

Message handle_request(const GapRequest& request, const rl::DdpgAgent& agent,
                       const env::TrafficSnapshot& traffic, const env::EnvConfig& config) {
  if (request.protocol_version != kProtocolVersion) {
    return error(request.platoon_id, "unsupported_version",
                 "protocol version " + std::to_string(request.protocol_version));
  }
  try {
    request.validate();
  } catch (const std::invalid_argument& e) {
    return error(request.platoon_id, "invalid_request", e.what());
  }
  if (request.size > config.n_max) {
    return error(request.platoon_id, "platoon_too_large",
                 "size " + std::to_string(request.size) + " exceeds n_max " +
                     std::to_string(config.n_max));
  }
  if (agent.config().state_dim != config.state_dim()) {
    return error(request.platoon_id, "model_mismatch", "agent state size differs from n_max");
  }

  const auto start = std::chrono::steady_clock::now();
  const rl::Vector state =
      env::build_observation(traffic, static_cast<std::size_t>(request.size), request.current_gaps,
                             config.bounds.gap_min, config);
  const rl::Vector raw = agent.act(state);
  GapResponse response;
  response.advised_gaps = env::decode_action(raw, static_cast<std::size_t>(request.size), config.bounds);
  const auto stop = std::chrono::steady_clock::now();

  response.platoon_id = request.platoon_id;
  response.compute_delay_us = std::chrono::duration<double, std::micro>(stop - start).count();
  response.timestamp_us = now_us();
  return response;
}

Handler make_handler(std::shared_ptr<const rl::DdpgAgent> agent, env::EnvConfig config,
                     SnapshotSource snapshot) {
  return [agent = std::move(agent), config = std::move(config),
          snapshot = std::move(snapshot)](const Message& message) -> Message {
    if (const auto* req = std::get_if<GapRequest>(&message)) {
      return handle_request(*req, *agent, snapshot(), config);
    }
    return error(-1, "unexpected_message", "only gap requests are served");
  };
}

env::TrafficSnapshot free_flow_snapshot(const env::Scenario& scenario, double density) {
  const double v = scenario.sim.road.speed_limit;
  return env::TrafficSnapshot{density, 0.0, v, v};
}

}  // namespace gapflow::rsu
