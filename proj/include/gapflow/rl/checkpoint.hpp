#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "gapflow/rl/ddpg.hpp"

namespace gapflow::rl {

/// Binary layout (all integers and floats little-endian):
///
///   char[8]  magic "GFDDPG\0\1"
///   u32      format version
///   config   u32 state_dim, u32 action_dim, f64 lr_actor, f64 lr_critic,
///            f64 discount, f64 tau, u64 batch_size, u64 replay_capacity,
///            f64 ou_sigma, f64 ou_theta, f64 ou_dt, u64 seed
///   4 nets   actor, critic, actor_target, critic_target; each is
///            u32 layer_count, u32 sizes[layer_count + 1], u8 activation per
///            layer, then per layer the weights (row-major, out x in) and the
///            bias as f64
///   2 Adam   actor then critic; i64 step, then per layer m_w, v_w, m_b, v_b
///   replay   u64 cursor, u64 count, u8 contents flag, and when set `count`
///            transitions of (state, action, reward, next_state, u8 done)
///   rng      u32 length + the engine state in its textual form
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointOptions {
  bool include_replay = false;
};

/// Raised on a bad magic, unsupported version, truncated file, or a shape
/// that differs from the expected configuration.
class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string serialize_checkpoint(const DdpgAgent& agent, CheckpointOptions options = {});
DdpgAgent deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const DdpgAgent& agent, const std::string& path,
                     CheckpointOptions options = {});
DdpgAgent load_checkpoint(const std::string& path);

/// As load_checkpoint, but fails unless the stored network shapes equal those
/// `expected` would build. The message names both shapes.
DdpgAgent load_checkpoint(const std::string& path, const DdpgConfig& expected);

}  // namespace gapflow::rl
