#include "gsv/adversary.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gsv {

namespace {

Rng adversaryStream(const PublicParams& params) { return Rng(params.correlationSeed, 0, StreamPurpose::Adversary); }

template <typename T>
std::vector<T> parseList(const std::string& text, const std::string& what) {
  std::vector<T> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !(is >> std::ws).eof()) throw std::invalid_argument("assignment: bad " + what + " entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::string formatDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

DeviationDistribution DeviationDistribution::fixed(RegisterState state) {
  DeviationDistribution dist;
  dist.kind_ = Kind::Fixed;
  dist.fixed_ = std::move(state);
  return dist;
}

DeviationDistribution DeviationDistribution::uniformNonzero(int n, int d) {
  if (n < 1 || d < 2) throw std::invalid_argument("uniformNonzero: need n >= 1 and d >= 2");
  DeviationDistribution dist;
  dist.kind_ = Kind::UniformNonzero;
  dist.n_ = n;
  dist.d_ = d;
  return dist;
}

RegisterState DeviationDistribution::sample(Rng& rng) const {
  if (kind_ == Kind::Fixed) return fixed_;
  for (;;) {
    std::vector<int> a(static_cast<std::size_t>(n_));
    for (auto& v : a) v = static_cast<int>(rng.below(static_cast<std::uint64_t>(d_)));
    DeviationVector dv(std::move(a), d_);
    if (!dv.isZero()) return DeviatedRegister{std::move(dv)};
  }
}

RegisterAssignment honest(const PublicParams& params) {
  RegisterAssignment out;
  out.perRegister.assign(static_cast<std::size_t>(params.nTotal), IdealRegister{});
  out.correlationSeed = params.correlationSeed;
  out.strategy = "honest";
  return out;
}

RegisterAssignment iidNoise(const PublicParams& params, double epsilon, const DeviationDistribution& bad) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("iidNoise: epsilon must lie in [0, 1]");
  Rng rng = adversaryStream(params);
  RegisterAssignment out;
  out.correlationSeed = params.correlationSeed;
  out.strategy = "iid";
  out.perRegister.reserve(static_cast<std::size_t>(params.nTotal));
  for (RegisterId r = 0; r < params.nTotal; ++r) {
    if (rng.bernoulli(epsilon))
      out.perRegister.push_back(bad.sample(rng));
    else
      out.perRegister.emplace_back(IdealRegister{});
  }
  validateAssignment(params, out);
  return out;
}

RegisterAssignment singleBadRegister(const PublicParams& params, RegisterState bad, std::optional<RegisterId> position) {
  RegisterAssignment out = honest(params);
  out.strategy = "single-bad";
  RegisterId where = 0;
  if (position) {
    where = *position;
    if (where < 1 || where > params.nTotal) throw std::out_of_range("singleBadRegister: position out of range");
  } else {
    Rng rng = adversaryStream(params);
    where = static_cast<RegisterId>(rng.below(static_cast<std::uint64_t>(params.nTotal))) + 1;
  }
  out.perRegister[static_cast<std::size_t>(where - 1)] = std::move(bad);
  validateAssignment(params, out);
  return out;
}

RegisterState parseRegisterState(const PublicParams& params, const std::string& line) {
  std::istringstream is(line);
  std::string head, rest;
  is >> head;
  std::getline(is >> std::ws, rest);
  if (head == "ideal") {
    if (!rest.empty()) throw std::invalid_argument("assignment: 'ideal' takes no arguments");
    return IdealRegister{};
  }
  if (head == "dev") {
    if (params.isCV()) throw std::invalid_argument("assignment: 'dev' entries need qudit mode");
    auto a = parseList<int>(rest, "deviation");
    if (static_cast<int>(a.size()) != params.n) throw std::invalid_argument("assignment: deviation length != n");
    for (int v : a)
      if (v < 0 || v >= *params.d) throw std::invalid_argument("assignment: deviation entry outside [0, d)");
    return DeviatedRegister{DeviationVector(std::move(a), *params.d)};
  }
  if (head == "shift") {
    if (!params.isCV()) throw std::invalid_argument("assignment: 'shift' entries need CV mode");
    auto s = parseList<double>(rest, "shift");
    if (static_cast<int>(s.size()) != params.n) throw std::invalid_argument("assignment: shift length != n");
    return ShiftedRegister{std::move(s)};
  }
  throw std::invalid_argument("assignment: unknown entry '" + head + "'");
}

std::string formatRegisterState(const RegisterState& state) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        std::string out;
        if constexpr (std::is_same_v<T, IdealRegister>) {
          out = "ideal";
        } else if constexpr (std::is_same_v<T, DeviatedRegister>) {
          out = "dev ";
          for (std::size_t i = 0; i < s.a.values().size(); ++i) out += (i ? "," : "") + std::to_string(s.a.values()[i]);
        } else if constexpr (std::is_same_v<T, ShiftedRegister>) {
          out = "shift ";
          for (std::size_t i = 0; i < s.shifts.size(); ++i) out += (i ? "," : "") + formatDouble(s.shifts[i]);
        } else {
          out = "tableau";
        }
        return out;
      },
      state);
}

RegisterAssignment scripted(const PublicParams& params, std::istream& in) {
  RegisterAssignment out;
  out.correlationSeed = params.correlationSeed;
  out.strategy = "scripted";
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.perRegister.push_back(parseRegisterState(params, line));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string(e.what()) + " (line " + std::to_string(lineNo) + ")");
    }
  }
  if (out.size() != params.nTotal)
    throw std::invalid_argument("assignment: expected " + std::to_string(params.nTotal) + " registers, got " +
                                std::to_string(out.size()));
  return out;
}

RegisterAssignment scriptedFromFile(const PublicParams& params, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open assignment file: " + path);
  return scripted(params, in);
}

double registerFidelity(const RegisterState& state, const WeightedHypergraph& graph) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IdealRegister>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, DeviatedRegister>) {
          return s.a.isZero() ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, ShiftedRegister>) {
          for (double v : s.shifts)
            if (v != 0.0) return 0.0;
          return 1.0;
        } else {
          return boost::rational_cast<double>(graphStateFidelity(*s.state, graph));
        }
      },
      state);
}

void validateAssignment(const PublicParams& params, const RegisterAssignment& assignment) {
  if (assignment.size() != params.nTotal)
    throw std::invalid_argument("assignment: length " + std::to_string(assignment.size()) + " != N_total " +
                                std::to_string(params.nTotal));
  for (const auto& entry : assignment.perRegister) {
    if (const auto* dev = std::get_if<DeviatedRegister>(&entry)) {
      if (params.isCV()) throw std::invalid_argument("assignment: qudit deviation in CV mode");
      if (dev->a.size() != params.n) throw std::invalid_argument("assignment: deviation length != n");
    } else if (const auto* sh = std::get_if<ShiftedRegister>(&entry)) {
      if (!params.isCV()) throw std::invalid_argument("assignment: CV shift in qudit mode");
      if (static_cast<int>(sh->shifts.size()) != params.n) throw std::invalid_argument("assignment: shift length != n");
    } else if (const auto* tab = std::get_if<TableauRegister>(&entry)) {
      if (params.isCV() || !tab->state || tab->state->qudits() != params.n || tab->state->dim() != *params.d)
        throw std::invalid_argument("assignment: tableau entry does not match register shape");
    }
  }
}

}  // namespace gsv
