#include "gsv/transport.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

namespace gsv {

namespace {

class PeerAbort : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

[[noreturn]] void sysFail(const std::string& what) { throw TransportError(what + ": " + std::strerror(errno)); }

bool waitFor(int fd, short events, std::chrono::milliseconds timeout) {
  pollfd p{fd, events, 0};
  for (;;) {
    const int r = ::poll(&p, 1, static_cast<int>(timeout.count()));
    if (r > 0) return true;
    if (r == 0) return false;
    if (errno != EINTR) sysFail("poll");
  }
}

void setNoDelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

sockaddr_in toAddress(const Endpoint& ep) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(ep.port);
  if (::inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr) != 1)
    throw TransportError("not an IPv4 address: " + ep.host);
  return addr;
}

WireMessage expect(FrameChannel& channel, MessageKind kind) {
  WireMessage m = channel.receive();
  if (m.kind == MessageKind::Error) {
    auto it = m.fields.find("reason");
    throw PeerAbort("peer aborted: " + (it == m.fields.end() ? std::string("no reason") : it->second));
  }
  if (m.kind != kind)
    throw ProtocolError(std::string("expected ") + kindName(kind) + ", got " + kindName(m.kind));
  return m;
}

void expectField(const WireMessage& m, const std::string& key, std::int64_t value) {
  const auto got = m.getInt(key);
  if (got != value)
    throw ProtocolError(std::string(kindName(m.kind)) + " " + key + " = " + std::to_string(got) + ", expected " +
                        std::to_string(value));
}

// Runs `body`; on a local failure tells the peer before rethrowing.
template <typename F>
auto withAbort(FrameChannel& channel, F&& body) {
  try {
    return body();
  } catch (const PeerAbort&) {
    throw;
  } catch (const TransportError&) {
    throw;
  } catch (const std::exception& e) {
    try {
      channel.send(errorMessage(e.what()));
      channel.flush();
    } catch (...) {
    }
    if (dynamic_cast<const ProtocolError*>(&e)) throw;
    throw ProtocolError(e.what());
  }
}

}  // namespace

FrameChannel::FrameChannel(int fd, std::chrono::milliseconds timeout) : fd_(fd), timeout_(timeout) {}

FrameChannel::FrameChannel(FrameChannel&& other) noexcept
    : fd_(other.fd_), timeout_(other.timeout_), out_(std::move(other.out_)), sent_(other.sent_),
      received_(other.received_) {
  other.fd_ = -1;
}

FrameChannel::~FrameChannel() { close(); }

void FrameChannel::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void FrameChannel::send(const WireMessage& message) {
  out_ += encodeFrame(message);
  ++sent_;
  if (out_.size() >= 1 << 16) flush();
}

void FrameChannel::sendRaw(const std::string& bytes) {
  out_ += bytes;
  flush();
}

void FrameChannel::flush() {
  std::size_t off = 0;
  while (off < out_.size()) {
    if (fd_ < 0) throw TransportError("channel closed");
    const ssize_t w = ::send(fd_, out_.data() + off, out_.size() - off, MSG_NOSIGNAL);
    if (w > 0) {
      off += static_cast<std::size_t>(w);
    } else if (w < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
      if (!waitFor(fd_, POLLOUT, timeout_)) throw TransportError("timeout while sending");
    } else if (w < 0 && errno == EINTR) {
      continue;
    } else {
      sysFail("send");
    }
  }
  out_.clear();
}

void FrameChannel::readExact(char* out, std::size_t count) {
  std::size_t got = 0;
  while (got < count) {
    if (fd_ < 0) throw TransportError("channel closed");
    if (!waitFor(fd_, POLLIN, timeout_)) throw TransportError("timeout while waiting for the peer");
    const ssize_t r = ::recv(fd_, out + got, count - got, 0);
    if (r > 0)
      got += static_cast<std::size_t>(r);
    else if (r == 0)
      throw TransportError("connection closed by peer");
    else if (errno != EINTR && errno != EAGAIN)
      sysFail("recv");
  }
}

WireMessage FrameChannel::receive() {
  flush();
  unsigned char header[4];
  readExact(reinterpret_cast<char*>(header), 4);
  const std::uint32_t len = decodeLength(header);
  if (len > kMaxFrameBytes) throw WireError("incoming frame exceeds size limit");
  std::string payload(len, '\0');
  readExact(payload.data(), len);
  ++received_;
  return decodePayload(payload);
}

Endpoint Endpoint::parse(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw std::invalid_argument("endpoint must be host:port, got '" + text + "'");
  Endpoint ep;
  if (colon > 0) ep.host = text.substr(0, colon);
  const auto port = parseInteger(text.substr(colon + 1));
  if (port < 0 || port > 65535) throw std::invalid_argument("endpoint port out of range");
  ep.port = static_cast<std::uint16_t>(port);
  return ep;
}

std::string Endpoint::toString() const { return host + ":" + std::to_string(port); }

TcpListener::TcpListener(const Endpoint& endpoint) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) sysFail("socket");
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr = toAddress(endpoint);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    const std::string msg = std::strerror(errno);
    ::close(fd_);
    throw TransportError("bind " + endpoint.toString() + ": " + msg);
  }
  if (::listen(fd_, 4) != 0) sysFail("listen");
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

FrameChannel TcpListener::accept(std::chrono::milliseconds timeout) {
  if (!waitFor(fd_, POLLIN, timeout)) throw TransportError("timeout waiting for a verifier to connect");
  const int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) sysFail("accept");
  setNoDelay(fd);
  return FrameChannel(fd, timeout);
}

FrameChannel connectTcp(const Endpoint& endpoint, std::chrono::milliseconds timeout) {
  const sockaddr_in addr = toAddress(endpoint);
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) sysFail("socket");
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) == 0) {
      setNoDelay(fd);
      return FrameChannel(fd, timeout);
    }
    const int err = errno;
    ::close(fd);
    if ((err != ECONNREFUSED && err != EINTR) || std::chrono::steady_clock::now() >= deadline)
      throw TransportError("connect " + endpoint.toString() + ": " + std::strerror(err));
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
}

std::pair<FrameChannel, FrameChannel> channelPair(std::chrono::milliseconds timeout) {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0) sysFail("socketpair");
  return {FrameChannel(fds[0], timeout), FrameChannel(fds[1], timeout)};
}

WireMessage helloMessage(const ProtocolParams& params, std::uint32_t trial, const std::string& role) {
  WireMessage m{MessageKind::Hello, {}};
  m.fields = {{"version", kWireVersion},
              {"role", role},
              {"rng", kRngName},
              {"seed", std::to_string(params.seed)},
              {"trial", std::to_string(trial)},
              {"mode", params.cv ? "cv" : "qudit"},
              {"d", std::to_string(params.cv ? 0 : params.d)},
              {"n", std::to_string(params.n())},
              {"edges", std::to_string(params.graph.edges().size())},
              {"c", formatDecimal(params.c)},
              {"n_test", std::to_string(params.nTest)},
              {"n_total", std::to_string(params.nTotal)},
              {"n_tilde", std::to_string(params.nTilde)}};
  return m;
}

ProverSessionResult serveProverSession(FrameChannel& channel, const ProtocolParams& params,
                                       std::shared_ptr<const SimulationContext> context,
                                       const RegisterAssignment& assignment, std::uint32_t trial) {
  return withAbort(channel, [&] {
    const WireMessage hello = expect(channel, MessageKind::Hello);
    WireMessage mine = helloMessage(params, trial, "prover");
    for (const auto& [key, value] : mine.fields) {
      if (key == "role") continue;
      auto it = hello.fields.find(key);
      if (it == hello.fields.end() || it->second != value)
        throw ProtocolError("HELLO disagrees on '" + key + "'");
    }
    channel.send(mine);

    ProverDevice device(std::move(context), assignment, params.seed, trial);
    const int n = params.n();
    ProverSessionResult result;
    for (RegisterId r = 1; r <= params.nTotal; ++r) {
      channel.send(registerAnnounce(r, n));
      device.beginRegister(r);
      for (Vertex site = 1; site <= n; ++site) {
        const WireMessage req = expect(channel, MessageKind::MeasureRequest);
        expectField(req, "register", r);
        expectField(req, "site", site);
        const Basis basis = basisFromName(req.get("basis"));
        const Outcome out = device.measure(site, basis);
        if (basis != Basis::Discard) channel.send(outcomeMessage(r, site, out));
      }
      device.endRegister();
      result.registersServed = r;
    }
    result.verdictRecord = expect(channel, MessageKind::Verdict).get("record");
    return result;
  });
}

VerifierClientResult runVerifierClient(FrameChannel& channel, const ProtocolParams& params, std::uint32_t trial,
                                       bool keepOutcomes) {
  params.validate();
  return withAbort(channel, [&] {
    VerifierSession session(params, trial, keepOutcomes);
    channel.send(helloMessage(params, trial, "verifier"));
    const WireMessage reply = expect(channel, MessageKind::Hello);
    if (reply.get("role") != "prover") throw ProtocolError("peer is not a prover");

    const int n = params.n();
    for (RegisterId r = 1; r <= params.nTotal; ++r) {
      const WireMessage announce = expect(channel, MessageKind::RegisterAnnounce);
      expectField(announce, "register", r);
      expectField(announce, "sites", n);
      session.beginRegister(r);
      for (Vertex site = 1; site <= n; ++site) {
        const Basis basis = session.basisFor(r, site);
        channel.send(measureRequest(r, site, basis));
        if (basis == Basis::Discard) {
          session.recordOutcome(site, std::monostate{});
          continue;
        }
        const WireMessage out = expect(channel, MessageKind::Outcome);
        expectField(out, "register", r);
        expectField(out, "site", site);
        session.recordOutcome(site, parseOutcomeValue(out.get("value"), params.cv));
      }
      session.endRegister();
    }
    VerifierClientResult result;
    result.pendingHighWater = session.pendingHighWater();
    result.result = session.finish();
    result.verdictRecord = verdictRecord(result.result.verdict, params.seed, trial).dump();
    channel.send({MessageKind::Verdict, {{"record", result.verdictRecord}}});
    channel.flush();
    return result;
  });
}

}  // namespace gsv
