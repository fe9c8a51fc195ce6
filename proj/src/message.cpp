#include "etcl/message.hpp"

#include <json.hpp>

#include "etcl/errors.hpp"

namespace etcl {

using nlohmann::json;

const char* to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::Data: return "DATA";
    case MessageKind::CiRequest: return "CI_REQUEST";
    case MessageKind::CiReply: return "CI_REPLY";
  }
  return "?";
}

namespace {

MessageKind message_kind_from_string(const std::string& name) {
  if (name == "DATA") return MessageKind::Data;
  if (name == "CI_REQUEST") return MessageKind::CiRequest;
  if (name == "CI_REPLY") return MessageKind::CiReply;
  throw MalformedMessage("unknown message kind '" + name + "'");
}

}  // namespace

CiPayload CiPayload::from(const Eigen::VectorXd& mean,
                          const Eigen::MatrixXd& cov) {
  CiPayload out;
  out.mean = mean;
  const int n = static_cast<int>(cov.rows());
  out.cov_lower.reserve(static_cast<size_t>(n) * (n + 1) / 2);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c <= r; ++c) out.cov_lower.push_back(cov(r, c));
  }
  return out;
}

Eigen::MatrixXd CiPayload::covariance() const {
  // invert n(n+1)/2 = size
  const size_t packed = cov_lower.size();
  int n = 0;
  while (static_cast<size_t>(n) * (n + 1) / 2 < packed) ++n;
  if (static_cast<size_t>(n) * (n + 1) / 2 != packed ||
      n != static_cast<int>(mean.size())) {
    throw MalformedMessage("CI payload: packed covariance size mismatch");
  }
  Eigen::MatrixXd cov(n, n);
  size_t k = 0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c <= r; ++c) {
      cov(r, c) = cov_lower[k];
      cov(c, r) = cov_lower[k];
      ++k;
    }
  }
  return cov;
}

std::string Message::to_json() const {
  json j;
  j["step"] = step;
  j["sender"] = sender + 1;
  j["receiver"] = receiver + 1;
  j["kind"] = to_string(kind);
  if (kind == MessageKind::Data) {
    j["ci_rate"] = ci_rate;
    json comps = json::array();
    for (const auto& c : components) {
      json e;
      e["model"] = {{"kind", to_string(c.model.kind)},
                    {"taker", c.model.taker + 1},
                    {"subject", c.model.subject + 1}};
      e["verdict"] = c.is_explicit ? "explicit" : "implicit";
      if (c.is_explicit) e["value"] = c.value;
      comps.push_back(std::move(e));
    }
    j["components"] = std::move(comps);
  }
  if (ci.has_value()) {
    j["ci"] = {{"mean", std::vector<double>(ci->mean.begin(), ci->mean.end())},
               {"cov_lower", ci->cov_lower}};
  }
  return j.dump();
}

Message Message::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw MalformedMessage(std::string("bad message JSON: ") + e.what());
  }
  try {
    Message m;
    m.step = j.at("step").get<int>();
    m.sender = j.at("sender").get<int>() - 1;
    m.receiver = j.at("receiver").get<int>() - 1;
    m.kind = message_kind_from_string(j.at("kind").get<std::string>());
    if (m.kind == MessageKind::Data) {
      m.ci_rate = j.value("ci_rate", 0.0);
      for (const auto& e : j.at("components")) {
        ComponentEntry c;
        const auto& mh = e.at("model");
        c.model.kind =
            measurement_kind_from_string(mh.at("kind").get<std::string>());
        c.model.taker = mh.at("taker").get<int>() - 1;
        c.model.subject = mh.at("subject").get<int>() - 1;
        const std::string verdict = e.at("verdict").get<std::string>();
        if (verdict == "explicit") {
          c.is_explicit = true;
          c.value = e.at("value").get<double>();
        } else if (verdict == "implicit") {
          c.is_explicit = false;
        } else {
          throw MalformedMessage("unknown verdict '" + verdict + "'");
        }
        m.components.push_back(std::move(c));
      }
    }
    if (j.contains("ci")) {
      CiPayload p;
      const auto mean = j["ci"].at("mean").get<std::vector<double>>();
      p.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(),
                                                 static_cast<long>(mean.size()));
      p.cov_lower = j["ci"].at("cov_lower").get<std::vector<double>>();
      m.ci = std::move(p);
    }
    return m;
  } catch (const json::exception& e) {
    throw MalformedMessage(std::string("bad message fields: ") + e.what());
  }
}

}  // namespace etcl
