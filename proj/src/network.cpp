#include "etcl/network.hpp"

#include <algorithm>

#include "etcl/errors.hpp"

namespace etcl {

const char* to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::Line: return "line";
    case TopologyKind::Star: return "star";
    case TopologyKind::Bridge: return "bridge";
    case TopologyKind::Chain: return "chain";
    case TopologyKind::Full: return "full";
    case TopologyKind::Custom: return "custom";
  }
  return "?";
}

TopologyKind topology_kind_from_string(const std::string& name) {
  if (name == "line") return TopologyKind::Line;
  if (name == "star") return TopologyKind::Star;
  if (name == "bridge") return TopologyKind::Bridge;
  if (name == "chain") return TopologyKind::Chain;
  if (name == "full") return TopologyKind::Full;
  if (name == "custom") return TopologyKind::Custom;
  throw BadSize("unknown topology kind '" + name + "'");
}

bool Topology::has_edge(int i, int j) const {
  if (i < 0 || j < 0 || i >= robots || j >= robots || i == j) return false;
  const auto& n = neighbors[i];
  return std::binary_search(n.begin(), n.end(), j);
}

std::vector<std::pair<int, int>> Topology::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < robots; ++i) {
    for (int j : neighbors[i]) {
      if (i < j) out.emplace_back(i, j);
    }
  }
  return out;
}

namespace {

Topology from_edge_list(int robots,
                        const std::vector<std::pair<int, int>>& edges) {
  Topology topo;
  topo.robots = robots;
  topo.neighbors.assign(robots, {});
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= robots || j >= robots || i == j) {
      throw BadSize("topology edge (" + std::to_string(i + 1) + "," +
                    std::to_string(j + 1) + ") out of range");
    }
    topo.neighbors[i].push_back(j);
    topo.neighbors[j].push_back(i);
  }
  for (auto& n : topo.neighbors) {
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
  }
  return topo;
}

}  // namespace

Topology make_topology(TopologyKind kind, int robots) {
  if (robots < 2) {
    throw BadSize("topology needs at least 2 robots, got " +
                  std::to_string(robots));
  }
  std::vector<std::pair<int, int>> edges;
  switch (kind) {
    case TopologyKind::Line:
    case TopologyKind::Chain:
      for (int i = 0; i + 1 < robots; ++i) edges.emplace_back(i, i + 1);
      break;
    case TopologyKind::Star:
      for (int i = 1; i < robots; ++i) edges.emplace_back(0, i);
      break;
    case TopologyKind::Bridge: {
      const int first = (robots + 1) / 2;  // ceil(N/2)
      for (int i = 0; i < first; ++i)
        for (int j = i + 1; j < first; ++j) edges.emplace_back(i, j);
      for (int i = first; i < robots; ++i)
        for (int j = i + 1; j < robots; ++j) edges.emplace_back(i, j);
      edges.emplace_back(first - 1, first);
      break;
    }
    case TopologyKind::Full:
      for (int i = 0; i < robots; ++i)
        for (int j = i + 1; j < robots; ++j) edges.emplace_back(i, j);
      break;
    case TopologyKind::Custom:
      throw BadSize("custom topology requires an explicit edge list");
  }
  return from_edge_list(robots, edges);
}

Topology make_custom_topology(int robots,
                              const std::vector<std::pair<int, int>>& edges) {
  if (robots < 2) {
    throw BadSize("topology needs at least 2 robots, got " +
                  std::to_string(robots));
  }
  return from_edge_list(robots, edges);
}

void CommStats::record_sent(const Message& msg) {
  if (msg.kind != MessageKind::Data) return;
  auto& edge = per_edge[{msg.sender, msg.receiver}];
  for (const auto& c : msg.components) {
    ++total_components;
    ++edge.total_components;
    if (c.is_explicit) {
      ++explicit_sent;
      ++edge.explicit_sent;
    } else {
      ++implicit_count;
      ++edge.implicit_count;
    }
  }
}

void CommStats::record_delivered(const Message& msg) {
  if (msg.kind != MessageKind::Data) return;
  auto& edge = per_edge[{msg.sender, msg.receiver}];
  for (const auto& c : msg.components) {
    if (c.is_explicit) {
      ++explicit_delivered;
      ++edge.explicit_delivered;
    }
  }
}

double explicit_fraction(const CommStats& stats) {
  if (stats.total_components <= 0) {
    throw EmptyStats("explicit_fraction: no components recorded");
  }
  return static_cast<double>(stats.explicit_sent) /
         static_cast<double>(stats.total_components);
}

double confusion_ratio(const CommStats& stats) {
  if (stats.total_components <= 0) {
    throw EmptyStats("confusion_ratio: no components recorded");
  }
  return static_cast<double>(stats.explicit_sent - stats.explicit_delivered) /
         static_cast<double>(stats.total_components);
}

Channel::Channel(const Topology& topology, const ChannelConfig& config)
    : topology_(&topology), config_(config) {
  for (int i = 0; i < topology.robots; ++i) {
    for (int j : topology.neigh(i)) {
      data_streams_.emplace(
          std::make_pair(i, j),
          RngStream(derive_seed(config.run_seed, "chan.data", i, j)));
      ci_streams_.emplace(
          std::make_pair(i, j),
          RngStream(derive_seed(config.run_seed, "chan.ci", i, j)));
    }
  }
}

bool Channel::passes(std::map<std::pair<int, int>, RngStream>& streams,
                     const char* /*tag*/, int from, int to) {
  auto it = streams.find({from, to});
  if (it == streams.end()) {
    throw NonEdgeMessage("message from " + std::to_string(from + 1) + " to " +
                         std::to_string(to + 1) +
                         " does not follow a topology edge");
  }
  return it->second.uniform01() < config_.cp;
}

std::vector<std::vector<Message>> Channel::deliver(
    const std::vector<std::vector<Message>>& outboxes, CommStats& stats) {
  std::vector<std::vector<Message>> inboxes(topology_->robots);
  for (const auto& outbox : outboxes) {
    for (const auto& msg : outbox) {
      if (!topology_->has_edge(msg.sender, msg.receiver)) {
        throw NonEdgeMessage("message from " + std::to_string(msg.sender + 1) +
                             " to " + std::to_string(msg.receiver + 1) +
                             " does not follow a topology edge");
      }
      stats.record_sent(msg);
      bool delivered = true;
      if (msg.kind == MessageKind::Data) {
        delivered = passes(data_streams_, "data", msg.sender, msg.receiver);
      } else if (config_.ci_lossy) {
        delivered = passes(ci_streams_, "ci", msg.sender, msg.receiver);
      }
      if (delivered) {
        stats.record_delivered(msg);
        inboxes[msg.receiver].push_back(msg);
      }
    }
  }
  return inboxes;
}

}  // namespace etcl
