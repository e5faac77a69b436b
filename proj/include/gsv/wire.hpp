#pragma once

// Wire format of the prover/verifier session.
//
// Frame  = 4-byte big-endian payload length, then the payload.
// Payload = UTF-8 JSON object {"kind": KIND, field: "string", ...}. Every
// field value is a string; numbers are written in decimal, doubles in their
// shortest round-trip form, so both ends reconstruct identical bits.
//
// Session (P = prover, V = verifier):
//   V: HELLO (parameter echo)        P: HELLO (same fields, role=prover)
//   for r = 1..N_total:
//     P: REGISTER_ANNOUNCE {register, sites}
//     for site = 1..n:
//       V: MEASURE_REQUEST {register, site, basis}   basis "discard" gets no reply
//       P: OUTCOME {register, site, value}            for measured sites
//   V: VERDICT {record}
// Either side may send ERROR {reason} and close.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "gsv/dense.hpp"
#include "gsv/device.hpp"

namespace gsv {

enum class MessageKind { Hello, RegisterAnnounce, MeasureRequest, Outcome, Verdict, Error };

const char* kindName(MessageKind kind);
MessageKind kindFromName(std::string_view name);

inline constexpr std::size_t kMaxFrameBytes = 1u << 20;
inline constexpr const char* kWireVersion = "1";

class WireError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WireMessage {
  MessageKind kind = MessageKind::Error;
  std::map<std::string, std::string> fields;

  const std::string& get(const std::string& key) const;
  std::int64_t getInt(const std::string& key) const;
  bool operator==(const WireMessage&) const = default;
};

std::string formatDecimal(double value);
double parseDecimal(std::string_view text);
std::int64_t parseInteger(std::string_view text);

/// Length prefix plus JSON payload.
std::string encodeFrame(const WireMessage& message);
WireMessage decodePayload(std::string_view payload);
std::uint32_t decodeLength(const unsigned char header[4]);

WireMessage registerAnnounce(std::int64_t reg, int sites);
WireMessage measureRequest(std::int64_t reg, int site, Basis basis);
WireMessage outcomeMessage(std::int64_t reg, int site, const Outcome& value);
WireMessage errorMessage(const std::string& reason);

/// Outcome value as the verifier reads it: double in CV mode, digit otherwise.
Outcome parseOutcomeValue(const std::string& text, bool cv);

}  // namespace gsv
