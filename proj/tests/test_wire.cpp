#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <thread>

#include "gsv/transport.hpp"

using namespace gsv;

namespace {

ProtocolParams small(int n, int d, std::int64_t nTest, std::uint64_t seed) {
  auto p = ProtocolParams::standard(presets::path(n), d, 13.0, seed);
  p.nTest = nTest;
  p.nTotal = 2LL * n * nTest;
  return p;
}

struct Loopback {
  VerifierClientResult client;
  ProverSessionResult prover;
};

Loopback runLoopback(const ProtocolParams& p, const RegisterAssignment& a, std::uint32_t trial) {
  auto [v, pr] = channelPair();
  Loopback out;
  std::exception_ptr proverError;
  std::thread prover([&, ch = std::move(pr)]() mutable {
    try {
      out.prover = serveProverSession(ch, p, makeContext(p), a, trial);
    } catch (...) {
      proverError = std::current_exception();
    }
  });
  out.client = runVerifierClient(v, p, trial);
  prover.join();
  if (proverError) std::rethrow_exception(proverError);
  return out;
}

WireMessage decodeFrame(const std::string& frame) {
  REQUIRE(frame.size() >= 4);
  const auto len = decodeLength(reinterpret_cast<const unsigned char*>(frame.data()));
  REQUIRE(len == frame.size() - 4);
  return decodePayload(std::string_view(frame).substr(4));
}

}  // namespace

TEST_CASE("frames round-trip") {
  for (const auto& m : {registerAnnounce(40554, 9), measureRequest(12, 3, Basis::Z), measureRequest(1, 1, Basis::Phase),
                        outcomeMessage(5, 2, 4), outcomeMessage(5, 2, -0.1234567890123), errorMessage("bad \"thing\"\n")})
    CHECK(decodeFrame(encodeFrame(m)) == m);
  const auto frame = encodeFrame(registerAnnounce(7, 3));
  CHECK(static_cast<unsigned char>(frame[0]) == 0);
  CHECK(decodeLength(reinterpret_cast<const unsigned char*>("\x00\x01\x02\x03")) == 0x010203u);
}

TEST_CASE("decimal formatting preserves every bit") {
  Rng rng(1, 0, StreamPurpose::Auxiliary);
  for (int k = 0; k < 2000; ++k) {
    const double x = rng.normal() * std::pow(10.0, static_cast<double>(rng.below(40)) - 20.0);
    CHECK(parseDecimal(formatDecimal(x)) == x);
  }
  CHECK(parseDecimal(formatDecimal(std::numeric_limits<double>::denorm_min())) ==
        std::numeric_limits<double>::denorm_min());
  CHECK_THROWS_AS(parseDecimal("1.5x"), WireError);
  CHECK_THROWS_AS(parseInteger("12.0"), WireError);
  CHECK(parseInteger("-42") == -42);
}

TEST_CASE("malformed payloads are rejected") {
  CHECK_THROWS_AS(decodePayload("not json"), WireError);
  CHECK_THROWS_AS(decodePayload("[1,2]"), WireError);
  CHECK_THROWS_AS(decodePayload(R"({"kind":"OUTCOME","value":1})"), WireError);
  CHECK_THROWS_AS(decodePayload(R"({"kind":"GOSSIP"})"), WireError);
  CHECK_THROWS_AS(decodePayload(R"({"value":"1"})"), WireError);
  CHECK_THROWS_AS(parseOutcomeValue("0.5", false), WireError);
  CHECK(std::get<double>(parseOutcomeValue("0.5", true)) == 0.5);
}

TEST_CASE("loopback session reproduces the in-process run") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto p = small(4, 3, 12, seed);
    const auto a = iidNoise(p.publicParams(seed), 0.1, DeviationDistribution::uniformNonzero(4, 3));
    const auto local = runProtocol(p, a, 1);
    const auto remote = runLoopback(p, a, 1);
    CHECK(remote.client.result.transcript == local.transcript);
    CHECK(remote.client.result.verdict == local.verdict);
    CHECK(remote.client.verdictRecord == verdictRecord(local.verdict, p.seed, 1).dump());
    CHECK(remote.prover.verdictRecord == remote.client.verdictRecord);
    CHECK(remote.prover.registersServed == p.nTotal);
    CHECK(remote.client.pendingHighWater <= 4);
  }
}

TEST_CASE("loopback CV session carries exact doubles") {
  auto p = ProtocolParams::standardCV(presets::path(3), NoiseModel{0.3, 0.05}, 0.4, 13.0, 9);
  p.nTest = 20;
  p.nTotal = 120;
  const auto a = honest(p.publicParams(0));
  const auto local = runProtocol(p, a, 0);
  const auto remote = runLoopback(p, a, 0);
  CHECK(remote.client.result.transcript == local.transcript);
  CHECK(remote.client.verdictRecord == verdictRecord(local.verdict, p.seed, 0).dump());
}

TEST_CASE("parameter mismatch in HELLO aborts both ends") {
  const auto pv = small(3, 2, 5, 1);
  const auto pp = small(3, 3, 5, 1);
  auto [v, pr] = channelPair();
  bool proverThrew = false;
  std::thread prover([&, ch = std::move(pr)]() mutable {
    try {
      serveProverSession(ch, pp, makeContext(pp), honest(pp.publicParams(0)), 0);
    } catch (const std::exception&) {
      proverThrew = true;
    }
  });
  CHECK_THROWS(runVerifierClient(v, pv, 0));
  prover.join();
  CHECK(proverThrew);
}

TEST_CASE("unsolicited outcome draws an ERROR") {
  const auto p = small(3, 2, 5, 1);
  auto [v, fake] = channelPair();
  std::string reason;
  std::thread prover([&, ch = std::move(fake)]() mutable {
    ch.receive();  // verifier HELLO
    ch.send(helloMessage(p, 0, "prover"));
    ch.send(registerAnnounce(1, 3));
    ch.send(outcomeMessage(1, 3, 0));
    ch.flush();
    for (;;) {
      const auto m = ch.receive();
      if (m.kind == MessageKind::Error) {
        reason = m.get("reason");
        break;
      }
    }
  });
  CHECK_THROWS_AS(runVerifierClient(v, p, 0), ProtocolError);
  prover.join();
  CHECK_FALSE(reason.empty());
}

TEST_CASE("silent peer times out") {
  auto [v, quiet] = channelPair(std::chrono::milliseconds(100));
  const auto start = std::chrono::steady_clock::now();
  CHECK_THROWS_AS(runVerifierClient(v, small(3, 2, 5, 1), 0), TransportError);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(5));
}

TEST_CASE("closed peer and oversized frames are transport errors") {
  {
    auto [a, b] = channelPair(std::chrono::milliseconds(500));
    b.close();
    CHECK_THROWS_AS(a.receive(), TransportError);
  }
  {
    auto [a, b] = channelPair(std::chrono::milliseconds(500));
    b.sendRaw(std::string("\x7f\xff\xff\xff", 4));
    b.flush();
    CHECK_THROWS(a.receive());
  }
}

TEST_CASE("TCP endpoint parsing and a TCP session") {
  CHECK(Endpoint::parse("10.0.0.2:7700").port == 7700);
  CHECK(Endpoint::parse(":81").host == "127.0.0.1");
  CHECK_THROWS(Endpoint::parse("nohost"));
  CHECK_THROWS(Endpoint::parse("h:70000"));

  const auto p = small(3, 5, 6, 4);
  const auto a = singleBadRegister(p.publicParams(4), DeviatedRegister{DeviationVector({2, 0, 1}, 5)});
  TcpListener listener(Endpoint{"127.0.0.1", 0});
  std::string proverRecord;
  std::thread prover([&] {
    auto ch = listener.accept();
    proverRecord = serveProverSession(ch, p, makeContext(p), a, 3).verdictRecord;
  });
  auto ch = connectTcp(Endpoint{"127.0.0.1", listener.port()});
  const auto remote = runVerifierClient(ch, p, 3);
  prover.join();
  CHECK(remote.verdictRecord == verdictRecord(runProtocol(p, a, 3).verdict, p.seed, 3).dump());
  CHECK(proverRecord == remote.verdictRecord);
}
