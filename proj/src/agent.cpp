#include "etcl/agent.hpp"

#include <algorithm>

#include "etcl/angles.hpp"
#include "etcl/errors.hpp"

namespace etcl {

Agent::Agent(int id, const StateLayout& layout, const Topology* topology,
             const ModelRegistry* registry, GaussianBelief initial_belief,
             double delta, const CiConfig& ci_config, Eigen::VectorXd alpha,
             bool fuse_implicit)
    : id_(id),
      layout_(layout),
      topology_(topology),
      registry_(registry),
      delta_(delta),
      fuse_implicit_(fuse_implicit),
      own_(std::move(initial_belief)),
      ci_config_(ci_config),
      alpha_(std::move(alpha)) {
  ci_state_.tau = ci_config_.tau_goal;
  for (int j : topology_->neigh(id_)) {
    commons_[j] = own_;  // initialized equal on both ends of every pair
    ci_state_.neighbor_rates[j] = 0.0;
  }
}

const GaussianBelief& Agent::common_belief(int neighbor) const {
  const auto it = commons_.find(neighbor);
  if (it == commons_.end()) {
    throw UnknownNeighbor("agent " + std::to_string(id_ + 1) +
                          " has no channel to " + std::to_string(neighbor + 1));
  }
  return it->second;
}

const GaussianBelief& Agent::common_prior(int neighbor) const {
  const auto it = common_priors_.find(neighbor);
  if (it == common_priors_.end()) {
    throw UnknownNeighbor("agent " + std::to_string(id_ + 1) +
                          " has no channel to " + std::to_string(neighbor + 1));
  }
  return it->second;
}

std::vector<SendDecision> Agent::decide_sends(
    int neighbor, const std::vector<Measurement>& components) const {
  const GaussianBelief& reference = common_prior(neighbor);
  std::vector<SendDecision> decisions;
  decisions.reserve(components.size());
  for (size_t idx = 0; idx < components.size(); ++idx) {
    const MeasurementModel& model = registry_->model(components[idx].model_index);
    const double predicted = model.observe(reference.mean, layout_);
    double innovation = components[idx].value - predicted;
    if (model.is_angle()) innovation = wrap_angle(innovation);
    SendDecision d;
    d.component = static_cast<int>(idx);
    d.is_explicit = std::abs(innovation) > delta_;
    d.value = components[idx].value;
    decisions.push_back(d);
  }
  return decisions;
}

std::vector<Message> Agent::begin_step(int step, const DynamicsModel& dynamics,
                                       const Eigen::VectorXd& controls,
                                       const std::vector<Measurement>& own) {
  predict(own_, dynamics, layout_, controls);
  for (auto& [j, belief] : commons_) {
    predict(belief, dynamics, layout_, controls);
  }
  own_prior_ = own_;
  common_priors_ = commons_;
  sent_streams_.clear();

  // The taker always knows the exact values: fuse everything into the own
  // belief regardless of what gets censored on any channel.
  for (const Measurement& m : own) {
    fuse_explicit_scalar(own_, registry_->model(m.model_index), layout_, m.value);
  }

  std::vector<Message> outbox;
  for (int j : topology_->neigh(id_)) {
    Message msg;
    msg.step = step;
    msg.sender = id_;
    msg.receiver = j;
    msg.kind = MessageKind::Data;
    msg.ci_rate = ci_state_.rate();
    for (const SendDecision& d : decide_sends(j, own)) {
      ComponentEntry entry;
      entry.model = registry_->model(own[d.component].model_index).handle;
      entry.is_explicit = d.is_explicit;
      if (d.is_explicit) entry.value = d.value;
      msg.components.push_back(entry);
    }
    sent_streams_[j] = msg.components;
    outbox.push_back(std::move(msg));
  }
  return outbox;
}

std::vector<ComponentEntry> Agent::synthetic_all_implicit(int sender) const {
  std::vector<ComponentEntry> stream;
  for (int model_index : registry_->suite(sender)) {
    ComponentEntry entry;
    entry.model = registry_->model(model_index).handle;
    entry.is_explicit = false;
    stream.push_back(entry);
  }
  return stream;
}

void Agent::fuse_stream_into_common(int neighbor,
                                    const std::vector<ComponentEntry>& stream) {
  GaussianBelief& common = commons_.at(neighbor);
  const GaussianBelief& prior = common_priors_.at(neighbor);
  for (const ComponentEntry& entry : stream) {
    const MeasurementModel& model =
        registry_->model(registry_->index_of(entry.model));
    if (entry.is_explicit) {
      fuse_explicit_scalar(common, model, layout_, entry.value);
    } else if (fuse_implicit_) {
      fuse_implicit_scalar(common, prior, prior.mean, model, layout_, delta_);
    }
  }
}

void Agent::fuse_stream_into_own(int neighbor,
                                 const std::vector<ComponentEntry>& stream) {
  const GaussianBelief& pair_prior = common_priors_.at(neighbor);
  for (const ComponentEntry& entry : stream) {
    const MeasurementModel& model =
        registry_->model(registry_->index_of(entry.model));
    if (entry.is_explicit) {
      fuse_explicit_scalar(own_, model, layout_, entry.value);
    } else if (fuse_implicit_) {
      fuse_implicit_scalar(own_, own_prior_, pair_prior.mean, model, layout_,
                           delta_);
    }
  }
}

void Agent::finish_step(int step, const std::vector<Message>& inbox) {
  std::map<int, const Message*> by_sender;
  for (const Message& msg : inbox) {
    if (msg.kind != MessageKind::Data) continue;
    if (msg.step != step) {
      throw MalformedMessage("DATA message for step " + std::to_string(msg.step) +
                             " delivered in step " + std::to_string(step));
    }
    if (msg.receiver != id_ || !topology_->has_edge(msg.sender, id_)) {
      throw MalformedMessage("DATA message from " + std::to_string(msg.sender + 1) +
                             " not expected at agent " + std::to_string(id_ + 1));
    }
    if (!by_sender.emplace(msg.sender, &msg).second) {
      throw MalformedMessage("duplicate DATA message from " +
                             std::to_string(msg.sender + 1));
    }
  }

  for (int j : topology_->neigh(id_)) {
    const auto it = by_sender.find(j);
    const std::vector<ComponentEntry> their_stream =
        it != by_sender.end() ? it->second->components : synthetic_all_implicit(j);
    if (it != by_sender.end()) {
      ci_state_.neighbor_rates[j] = it->second->ci_rate;
    }

    // Both replicas of the pair channel must apply one agreed sequence.
    const auto& mine = sent_streams_.at(j);
    if (id_ < j) {
      fuse_stream_into_common(j, mine);
      fuse_stream_into_common(j, their_stream);
    } else {
      fuse_stream_into_common(j, their_stream);
      fuse_stream_into_common(j, mine);
    }

    fuse_stream_into_own(j, their_stream);
  }
}

std::vector<Message> Agent::step(int step, const DynamicsModel& dynamics,
                                 const Eigen::VectorXd& controls,
                                 const std::vector<Measurement>& own,
                                 const std::vector<Message>& inbox) {
  std::vector<Message> outbox = begin_step(step, dynamics, controls, own);
  finish_step(step, inbox);
  if (wants_ci()) {
    for (Message& req : make_ci_requests(step)) outbox.push_back(std::move(req));
  }
  return outbox;
}

bool Agent::wants_ci() const {
  return ci_config_.enabled && ci_trigger(ci_state_, own_.cov, alpha_);
}

std::vector<Message> Agent::make_ci_requests(int step) const {
  std::vector<Message> requests;
  for (int j : topology_->neigh(id_)) {
    Message msg;
    msg.step = step;
    msg.sender = id_;
    msg.receiver = j;
    msg.kind = MessageKind::CiRequest;
    msg.ci = CiPayload::from(own_.mean, own_.cov);
    requests.push_back(std::move(msg));
  }
  return requests;
}

void Agent::end_round(bool triggered) {
  if (triggered) ++ci_state_.trigger_count;
  ++ci_state_.step_count;
  if (ci_config_.enabled && ci_config_.adaptive) {
    update_tau(ci_state_, topology_->neigh(id_), ci_config_);
  }
}

std::pair<double, double> Agent::common_divergence(const Agent& a,
                                                   const Agent& b) {
  const GaussianBelief& ab = a.common_belief(b.id());
  const GaussianBelief& ba = b.common_belief(a.id());
  const double mean_diff = (ab.mean - ba.mean).cwiseAbs().maxCoeff();
  const double cov_diff = (ab.cov - ba.cov).cwiseAbs().maxCoeff();
  return {mean_diff, cov_diff};
}

}  // namespace etcl
