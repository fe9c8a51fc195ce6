#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "etcl/belief.hpp"
#include "etcl/ci.hpp"
#include "etcl/filter.hpp"
#include "etcl/message.hpp"
#include "etcl/network.hpp"

namespace etcl {

// Per-component verdict for one neighbor: share the value, or censor it and
// let the threshold speak.
struct SendDecision {
  int component = -1;  // position in the agent's sensor suite
  bool is_explicit = false;
  double value = 0.0;
};

// One robot's estimator stack: its own belief of the whole network plus one
// "common" belief per neighbor that tracks exactly the information exchanged
// on that pair channel (and nothing else). The common belief is the shared
// reference for trigger decisions and implicit fusion, and must stay
// identical on both ends of the pair under a lossless channel.
//
// A simulator round drives each agent in two phases around the message
// barrier:
//   begin_step: predict all beliefs, fuse own measurements into the own
//               belief, decide per-component verdicts per neighbor against
//               the frozen common prior, emit one DATA message per neighbor.
//   finish_step: fuse the pair streams into each common belief in canonical
//               order (lower robot id's components first -- both replicas
//               must execute identical operations), then fuse neighbors'
//               streams into the own belief. A missing DATA message from a
//               neighbor is read as "everything censored": that is exactly
//               the misinterpretation a lossy channel induces.
// CI exchanges are coordinated by the runner after finish_step.
class Agent {
 public:
  Agent(int id, const StateLayout& layout, const Topology* topology,
        const ModelRegistry* registry, GaussianBelief initial_belief,
        double delta, const CiConfig& ci_config, Eigen::VectorXd alpha,
        bool fuse_implicit = true);

  int id() const { return id_; }
  double delta() const { return delta_; }
  const GaussianBelief& own_belief() const { return own_; }
  GaussianBelief& own_belief() { return own_; }
  const GaussianBelief& common_belief(int neighbor) const;
  const GaussianBelief& common_prior(int neighbor) const;
  const CiState& ci_state() const { return ci_state_; }
  CiState& ci_state() { return ci_state_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const CiConfig& ci_config() const { return ci_config_; }

  // Throws UnknownNeighbor. Verdict is explicit iff the component innovation
  // against the pair's predicted common estimate strictly exceeds delta.
  std::vector<SendDecision> decide_sends(
      int neighbor, const std::vector<Measurement>& components) const;

  std::vector<Message> begin_step(int step, const DynamicsModel& dynamics,
                                  const Eigen::VectorXd& controls,
                                  const std::vector<Measurement>& own);

  void finish_step(int step, const std::vector<Message>& inbox);

  // Single-call form: both phases plus, when the CI trigger fires, one
  // CI_REQUEST per neighbor appended to the returned outbox. The runner uses
  // the split phases so delivery can happen at the barrier.
  std::vector<Message> step(int step, const DynamicsModel& dynamics,
                            const Eigen::VectorXd& controls,
                            const std::vector<Measurement>& own,
                            const std::vector<Message>& inbox);

  bool wants_ci() const;
  std::vector<Message> make_ci_requests(int step) const;

  // Round-end bookkeeping: advance the step counter (and trigger count if
  // this agent fired) and run the threshold dynamics.
  void end_round(bool triggered);

  // Largest common-belief divergence against the peer's replica, used by the
  // symmetry instrumentation.
  static std::pair<double, double> common_divergence(const Agent& a,
                                                     const Agent& b);

 private:
  void fuse_stream_into_common(int neighbor,
                               const std::vector<ComponentEntry>& stream);
  void fuse_stream_into_own(int neighbor,
                            const std::vector<ComponentEntry>& stream);
  std::vector<ComponentEntry> synthetic_all_implicit(int sender) const;

  int id_;
  StateLayout layout_;
  const Topology* topology_;
  const ModelRegistry* registry_;
  double delta_;
  bool fuse_implicit_;

  GaussianBelief own_;
  GaussianBelief own_prior_;
  std::map<int, GaussianBelief> commons_;
  std::map<int, GaussianBelief> common_priors_;
  std::map<int, std::vector<ComponentEntry>> sent_streams_;

  CiConfig ci_config_;
  CiState ci_state_;
  Eigen::VectorXd alpha_;
};

}  // namespace etcl
