#include "gsv/wire.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include <json.hpp>

namespace gsv {

namespace {

constexpr std::array<std::pair<MessageKind, const char*>, 6> kKinds{{
    {MessageKind::Hello, "HELLO"},
    {MessageKind::RegisterAnnounce, "REGISTER_ANNOUNCE"},
    {MessageKind::MeasureRequest, "MEASURE_REQUEST"},
    {MessageKind::Outcome, "OUTCOME"},
    {MessageKind::Verdict, "VERDICT"},
    {MessageKind::Error, "ERROR"},
}};

}  // namespace

const char* kindName(MessageKind kind) {
  for (const auto& [k, name] : kKinds)
    if (k == kind) return name;
  return "?";
}

MessageKind kindFromName(std::string_view name) {
  for (const auto& [k, text] : kKinds)
    if (name == text) return k;
  throw WireError("unknown message kind '" + std::string(name) + "'");
}

const std::string& WireMessage::get(const std::string& key) const {
  auto it = fields.find(key);
  if (it == fields.end()) throw WireError(std::string(kindName(kind)) + " lacks field '" + key + "'");
  return it->second;
}

std::int64_t WireMessage::getInt(const std::string& key) const { return parseInteger(get(key)); }

std::string formatDecimal(double value) {
  if (!std::isfinite(value)) throw WireError("non-finite value on the wire");
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

double parseDecimal(std::string_view text) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(v))
    throw WireError("bad decimal '" + std::string(text) + "'");
  return v;
}

std::int64_t parseInteger(std::string_view text) {
  std::int64_t v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty())
    throw WireError("bad integer '" + std::string(text) + "'");
  return v;
}

std::string encodeFrame(const WireMessage& message) {
  nlohmann::json j = nlohmann::json::object();
  j["kind"] = kindName(message.kind);
  for (const auto& [k, v] : message.fields) {
    if (k == "kind") throw WireError("field name 'kind' is reserved");
    j[k] = v;
  }
  const std::string payload = j.dump();
  if (payload.size() > kMaxFrameBytes) throw WireError("frame exceeds size limit");
  const auto len = static_cast<std::uint32_t>(payload.size());
  std::string frame;
  frame.reserve(4 + payload.size());
  frame.push_back(static_cast<char>(len >> 24));
  frame.push_back(static_cast<char>(len >> 16));
  frame.push_back(static_cast<char>(len >> 8));
  frame.push_back(static_cast<char>(len));
  frame += payload;
  return frame;
}

std::uint32_t decodeLength(const unsigned char header[4]) {
  return (std::uint32_t{header[0]} << 24) | (std::uint32_t{header[1]} << 16) | (std::uint32_t{header[2]} << 8) |
         std::uint32_t{header[3]};
}

WireMessage decodePayload(std::string_view payload) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(payload);
  } catch (const nlohmann::json::exception& e) {
    throw WireError(std::string("malformed frame: ") + e.what());
  }
  if (!j.is_object()) throw WireError("frame payload is not an object");
  WireMessage msg;
  bool haveKind = false;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_string()) throw WireError("field '" + it.key() + "' is not a string");
    if (it.key() == "kind") {
      msg.kind = kindFromName(it.value().get<std::string>());
      haveKind = true;
    } else {
      msg.fields[it.key()] = it.value().get<std::string>();
    }
  }
  if (!haveKind) throw WireError("frame lacks 'kind'");
  return msg;
}

WireMessage registerAnnounce(std::int64_t reg, int sites) {
  return {MessageKind::RegisterAnnounce, {{"register", std::to_string(reg)}, {"sites", std::to_string(sites)}}};
}

WireMessage measureRequest(std::int64_t reg, int site, Basis basis) {
  return {MessageKind::MeasureRequest,
          {{"register", std::to_string(reg)}, {"site", std::to_string(site)}, {"basis", basisName(basis)}}};
}

WireMessage outcomeMessage(std::int64_t reg, int site, const Outcome& value) {
  std::string text;
  if (const auto* k = std::get_if<int>(&value))
    text = std::to_string(*k);
  else if (const auto* x = std::get_if<double>(&value))
    text = formatDecimal(*x);
  else
    throw WireError("no outcome to send for a discarded site");
  return {MessageKind::Outcome, {{"register", std::to_string(reg)}, {"site", std::to_string(site)}, {"value", text}}};
}

WireMessage errorMessage(const std::string& reason) { return {MessageKind::Error, {{"reason", reason}}}; }

Outcome parseOutcomeValue(const std::string& text, bool cv) {
  if (cv) return parseDecimal(text);
  const auto v = parseInteger(text);
  if (v < 0 || v > 255) throw WireError("qudit outcome out of range");
  return static_cast<int>(v);
}

}  // namespace gsv
