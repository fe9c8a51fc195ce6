#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "etcl/message.hpp"
#include "etcl/rng.hpp"

namespace etcl {

enum class TopologyKind { Line, Star, Bridge, Chain, Full, Custom };

const char* to_string(TopologyKind kind);
TopologyKind topology_kind_from_string(const std::string& name);

// Fixed, symmetric, self-loop-free neighbor sets.
struct Topology {
  int robots = 0;
  std::vector<std::vector<int>> neighbors;  // ascending, per robot

  bool has_edge(int i, int j) const;
  const std::vector<int>& neigh(int i) const { return neighbors.at(i); }
  std::vector<std::pair<int, int>> edges() const;  // i < j, lexicographic
};

// line/chain: i <-> i+1. star: robot 0 the hub. bridge: two internally
// complete halves of ceil(N/2) and floor(N/2) joined by one edge between the
// last robot of the first half and the first of the second. full: complete.
Topology make_topology(TopologyKind kind, int robots);
Topology make_custom_topology(int robots,
                              const std::vector<std::pair<int, int>>& edges);

struct ChannelConfig {
  double cp = 1.0;           // per-message delivery probability
  bool ci_lossy = false;     // subject CI messages to the same channel
  std::uint64_t run_seed = 0;
};

struct EdgeCounters {
  long explicit_sent = 0;
  long explicit_delivered = 0;
  long implicit_count = 0;
  long total_components = 0;
};

struct CommStats {
  long explicit_sent = 0;
  long explicit_delivered = 0;
  long implicit_count = 0;
  long total_components = 0;
  long ci_exchanges = 0;
  std::map<std::pair<int, int>, EdgeCounters> per_edge;  // directed (from, to)

  void record_sent(const Message& msg);
  void record_delivered(const Message& msg);
};

// Fraction of all offered measurement components that were sent explicitly.
double explicit_fraction(const CommStats& stats);

// Dropped explicit components over total components (explicit + implicit):
// the share of the stream the receivers misread as implicit censoring.
double confusion_ratio(const CommStats& stats);

// Synchronous round delivery: each DATA message is dropped independently
// with probability 1-cp, whole-message granularity. One Bernoulli draw is
// consumed per (edge, direction, step) from a stream keyed only by the edge
// and the run seed, so loss realizations are identical across trigger or cp
// settings (monotone coupling: lowering cp only adds losses). Throws
// NonEdgeMessage for a message not addressed along a topology edge.
class Channel {
 public:
  Channel(const Topology& topology, const ChannelConfig& config);

  // Consumes outboxes, appends delivered messages to per-agent inboxes,
  // updates stats. Messages must all carry the same step index.
  std::vector<std::vector<Message>> deliver(
      const std::vector<std::vector<Message>>& outboxes, CommStats& stats);

 private:
  const Topology* topology_;
  ChannelConfig config_;
  std::map<std::pair<int, int>, RngStream> data_streams_;
  std::map<std::pair<int, int>, RngStream> ci_streams_;

  bool passes(std::map<std::pair<int, int>, RngStream>& streams,
              const char* tag, int from, int to);
};

}  // namespace etcl
