#include "gapflow/rl/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace gapflow::rl {

namespace {

constexpr char kMagic[8] = {'G', 'F', 'D', 'D', 'P', 'G', '\0', '\1'};

class Writer {
 public:
  void bytes(const void* data, std::size_t n) { out_.append(static_cast<const char*>(data), n); }
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void vec(const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) f64(v(i));
  }
  void mat(const Matrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) f64(m(r, c));
    }
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}
  void bytes(void* data, std::size_t n) {
    need(n);
    std::memcpy(data, in_.data() + pos_, n);
    pos_ += n;
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(in_[pos_++]);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  void vec(Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = f64();
  }
  void mat(Matrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = f64();
    }
  }
  bool at_end() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw CheckpointError("checkpoint truncated");
  }
  const std::string& in_;
  std::size_t pos_ = 0;
};

std::string shape_string(const std::vector<int>& sizes) {
  std::string s = "[";
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(sizes[i]);
  }
  return s + "]";
}

void write_net(Writer& w, const DenseNet& net) {
  w.u32(static_cast<std::uint32_t>(net.layers().size()));
  for (const int s : net.sizes()) w.u32(static_cast<std::uint32_t>(s));
  for (const auto& layer : net.layers()) w.u8(static_cast<std::uint8_t>(layer.activation));
  for (const auto& layer : net.layers()) {
    w.mat(layer.weights);
    w.vec(layer.bias);
  }
}

DenseNet read_net(Reader& r, const char* name) {
  const std::uint32_t layers = r.u32();
  if (layers == 0 || layers > 64) {
    throw CheckpointError(std::string("checkpoint: implausible layer count for ") + name);
  }
  std::vector<int> sizes(layers + 1);
  for (auto& s : sizes) {
    s = static_cast<int>(r.u32());
    if (s <= 0 || s > 1 << 16) {
      throw CheckpointError(std::string("checkpoint: implausible layer size for ") + name);
    }
  }
  std::vector<Activation> acts(layers);
  for (auto& a : acts) {
    const auto v = r.u8();
    if (v > static_cast<std::uint8_t>(Activation::linear)) {
      throw CheckpointError(std::string("checkpoint: unknown activation in ") + name);
    }
    a = static_cast<Activation>(v);
  }
  DenseNet net(sizes, acts.front(), acts.back());
  auto& ls = net.mutable_layers();
  for (std::size_t i = 0; i < ls.size(); ++i) {
    ls[i].activation = acts[i];
    r.mat(ls[i].weights);
    r.vec(ls[i].bias);
  }
  return net;
}

void write_adam(Writer& w, const AdamState& s) {
  w.u64(static_cast<std::uint64_t>(s.step));
  for (std::size_t i = 0; i < s.m_weights.size(); ++i) {
    w.mat(s.m_weights[i]);
    w.mat(s.v_weights[i]);
    w.vec(s.m_bias[i]);
    w.vec(s.v_bias[i]);
  }
}

void read_adam(Reader& r, AdamState& s) {
  s.step = static_cast<std::int64_t>(r.u64());
  for (std::size_t i = 0; i < s.m_weights.size(); ++i) {
    r.mat(s.m_weights[i]);
    r.mat(s.v_weights[i]);
    r.vec(s.m_bias[i]);
    r.vec(s.v_bias[i]);
  }
}

void require_shape(const char* name, const DenseNet& stored, const DenseNet& expected) {
  if (stored.sizes() != expected.sizes()) {
    throw CheckpointError(std::string("checkpoint shape mismatch for ") + name + ": file has " +
                          shape_string(stored.sizes()) + ", expected " +
                          shape_string(expected.sizes()));
  }
}

std::vector<int> hidden_of(const DenseNet& net) {
  return std::vector<int>(net.sizes().begin() + 1, net.sizes().end() - 1);
}

}  // namespace

std::string serialize_checkpoint(const DdpgAgent& agent, CheckpointOptions options) {
  Writer w;
  const auto& c = agent.config();
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(c.state_dim));
  w.u32(static_cast<std::uint32_t>(c.action_dim));
  w.f64(c.lr_actor);
  w.f64(c.lr_critic);
  w.f64(c.discount);
  w.f64(c.tau);
  w.u64(c.batch_size);
  w.u64(c.replay_capacity);
  w.f64(c.ou_sigma);
  w.f64(c.ou_theta);
  w.f64(c.ou_dt);
  w.u64(c.seed);

  write_net(w, agent.actor());
  write_net(w, agent.critic());
  write_net(w, agent.actor_target());
  write_net(w, agent.critic_target());
  write_adam(w, agent.actor_adam());
  write_adam(w, agent.critic_adam());

  const auto& replay = agent.replay();
  w.u64(replay.cursor());
  w.u64(replay.size());
  const bool contents = options.include_replay && replay.has_contents();
  w.u8(contents ? 1 : 0);
  if (contents) {
    for (std::size_t i = 0; i < replay.size(); ++i) {
      const Transition& t = replay.at(i);
      w.vec(t.state);
      w.vec(t.action);
      w.f64(t.reward);
      w.vec(t.next_state);
      w.u8(t.done ? 1 : 0);
    }
  }

  std::ostringstream rng;
  rng << agent.rng();
  const std::string rng_state = rng.str();
  w.u32(static_cast<std::uint32_t>(rng_state.size()));
  w.bytes(rng_state.data(), rng_state.size());
  return w.take();
}

DdpgAgent deserialize_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw CheckpointError("not a checkpoint file");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint version mismatch: file has " + std::to_string(version) +
                          ", expected " + std::to_string(kCheckpointVersion));
  }
  DdpgConfig c;
  c.state_dim = static_cast<int>(r.u32());
  c.action_dim = static_cast<int>(r.u32());
  c.lr_actor = r.f64();
  c.lr_critic = r.f64();
  c.discount = r.f64();
  c.tau = r.f64();
  c.batch_size = r.u64();
  c.replay_capacity = r.u64();
  c.ou_sigma = r.f64();
  c.ou_theta = r.f64();
  c.ou_dt = r.f64();
  c.seed = r.u64();

  DenseNet actor = read_net(r, "actor");
  DenseNet critic = read_net(r, "critic");
  DenseNet actor_target = read_net(r, "actor_target");
  DenseNet critic_target = read_net(r, "critic_target");
  c.actor_hidden = hidden_of(actor);
  c.critic_hidden = hidden_of(critic);

  DdpgAgent agent(c);
  require_shape("actor", actor, agent.actor());
  require_shape("critic", critic, agent.critic());
  require_shape("actor_target", actor_target, agent.actor_target());
  require_shape("critic_target", critic_target, agent.critic_target());
  agent.actor() = std::move(actor);
  agent.critic() = std::move(critic);
  agent.actor_target() = std::move(actor_target);
  agent.critic_target() = std::move(critic_target);
  agent.actor_adam() = AdamState::for_net(agent.actor());
  agent.critic_adam() = AdamState::for_net(agent.critic());
  read_adam(r, agent.actor_adam());
  read_adam(r, agent.critic_adam());

  const std::uint64_t cursor = r.u64();
  const std::uint64_t count = r.u64();
  if (count > c.replay_capacity || cursor >= std::max<std::uint64_t>(c.replay_capacity, 1)) {
    throw CheckpointError("checkpoint: replay metadata out of range");
  }
  if (r.u8() != 0) {
    std::vector<Transition> slots(count);
    for (auto& t : slots) {
      t.state.resize(c.state_dim);
      t.action.resize(c.action_dim);
      t.next_state.resize(c.state_dim);
      r.vec(t.state);
      r.vec(t.action);
      t.reward = r.f64();
      r.vec(t.next_state);
      t.done = r.u8() != 0;
    }
    agent.replay().restore(cursor, count, std::move(slots));
  } else {
    agent.replay().restore_metadata(cursor, count);
  }

  const std::uint32_t rng_len = r.u32();
  std::string rng_state(rng_len, '\0');
  r.bytes(rng_state.data(), rng_len);
  std::istringstream rng(rng_state);
  rng >> agent.rng();
  if (rng.fail()) throw CheckpointError("checkpoint: corrupt rng state");
  if (!r.at_end()) throw CheckpointError("checkpoint: trailing bytes");
  return agent;
}

void save_checkpoint(const DdpgAgent& agent, const std::string& path, CheckpointOptions options) {
  const std::string bytes = serialize_checkpoint(agent, options);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write checkpoint " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError("cannot write checkpoint " + path);
  }
  std::filesystem::rename(tmp, path);
}

DdpgAgent load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_checkpoint(ss.str());
}

DdpgAgent load_checkpoint(const std::string& path, const DdpgConfig& expected) {
  DdpgAgent agent = load_checkpoint(path);
  const DenseNet want_actor =
      make_actor(expected.state_dim, expected.action_dim, expected.actor_hidden);
  const DenseNet want_critic =
      make_critic(expected.state_dim, expected.action_dim, expected.critic_hidden);
  require_shape("actor", agent.actor(), want_actor);
  require_shape("critic", agent.critic(), want_critic);
  return agent;
}

}  // namespace gapflow::rl
