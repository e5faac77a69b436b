#include "gsv/device.hpp"

#include <stdexcept>

#include "gsv/pauli.hpp"
#include "gsv/qudit.hpp"

namespace gsv {

std::shared_ptr<const SimulationContext> SimulationContext::qudit(const WeightedHypergraph& graph, int d) {
  auto ctx = std::make_shared<SimulationContext>();
  ctx->graph = graph;
  ctx->cv = false;
  ctx->d = d;
  buildStabilizers(graph, d);  // validates d and edge shape
  if (isPrime(d) && d <= StabilizerTableau::kMaxDim)
    ctx->tableauTemplate = prepareGraphState(graph, d);
  else
    ctx->denseTemplate = DenseState::graphState(graph, d);
  return ctx;
}

std::shared_ptr<const SimulationContext> SimulationContext::continuous(const WeightedHypergraph& graph,
                                                                       const NoiseModel& noise,
                                                                       std::optional<CVModelKind> kind) {
  auto ctx = std::make_shared<SimulationContext>();
  ctx->graph = graph;
  ctx->cv = true;
  ctx->d = 0;
  ctx->noise = noise;
  const std::vector<double> zero(static_cast<std::size_t>(graph.vertexCount()), 0.0);
  ctx->cvHonest = cvDeviationModel(graph, zero, noise, kind);
  return ctx;
}

ProverDevice::ProverDevice(std::shared_ptr<const SimulationContext> context, const RegisterAssignment& assignment,
                           std::uint64_t seed, std::uint32_t trial)
    : ctx_(std::move(context)), assignment_(assignment), seed_(seed), trial_(trial) {}

void ProverDevice::beginRegister(RegisterId id) {
  if (open_) throw std::logic_error("ProverDevice: previous register still open");
  if (id != current_ + 1) throw std::logic_error("ProverDevice: registers must be taken in order");
  if (id > assignment_.size()) throw std::out_of_range("ProverDevice: register beyond assignment");
  current_ = id;
  lastSite_ = 0;
  open_ = true;
  live_ = false;
  rng_.emplace(seed_, trial_, StreamPurpose::Measurement, static_cast<std::uint32_t>(id));
}

void ProverDevice::materialize() {
  const RegisterState& state = assignment_.at(current_);
  if (ctx_->cv) {
    if (const auto* sh = std::get_if<ShiftedRegister>(&state))
      cvModel_.emplace(ctx_->cvHonest->withShifts(sh->shifts));
    else if (std::holds_alternative<IdealRegister>(state))
      cvModel_.emplace(*ctx_->cvHonest);
    else
      throw std::invalid_argument("ProverDevice: register state not valid in CV mode");
    sampler_.emplace(*cvModel_, *rng_);
  } else if (ctx_->tableauTemplate) {
    if (const auto* tab = std::get_if<TableauRegister>(&state)) {
      tableau_ = *tab->state;
    } else {
      tableau_ = *ctx_->tableauTemplate;
      if (const auto* dev = std::get_if<DeviatedRegister>(&state)) {
        for (int q = 0; q < dev->a.size(); ++q)
          if (int a = dev->a[static_cast<std::size_t>(q)]) tableau_->applyZPower(q, a);
      } else if (!std::holds_alternative<IdealRegister>(state)) {
        throw std::invalid_argument("ProverDevice: register state not valid in qudit mode");
      }
    }
  } else {
    dense_ = *ctx_->denseTemplate;
    if (const auto* dev = std::get_if<DeviatedRegister>(&state)) {
      for (int q = 0; q < dev->a.size(); ++q)
        if (int a = dev->a[static_cast<std::size_t>(q)]) dense_->applyZPower(q, a);
    } else if (!std::holds_alternative<IdealRegister>(state)) {
      throw std::invalid_argument("ProverDevice: composite d supports ideal and deviated registers only");
    }
  }
  live_ = true;
}

Outcome ProverDevice::measure(Vertex site, Basis basis) {
  if (!open_) throw std::logic_error("ProverDevice: no open register");
  if (site <= lastSite_ || site > ctx_->n()) throw std::logic_error("ProverDevice: sites must be visited in order");
  lastSite_ = site;
  if (basis == Basis::Discard) return std::monostate{};
  if (!live_) materialize();
  if (ctx_->cv) {
    if (basis != Basis::Amplitude && basis != Basis::Phase)
      throw std::invalid_argument("ProverDevice: CV sites take x or p");
    return sampler_->measure(site, basis);
  }
  if (basis != Basis::X && basis != Basis::Z) throw std::invalid_argument("ProverDevice: qudit sites take X or Z");
  if (tableau_ && ctx_->tableauTemplate)
    return basis == Basis::X ? tableau_->measureX(site - 1, *rng_) : tableau_->measureZ(site - 1, *rng_);
  return dense_->measure(site - 1, basis, *rng_);
}

void ProverDevice::endRegister() {
  if (!open_) throw std::logic_error("ProverDevice: no open register");
  open_ = false;
  sampler_.reset();
}

}  // namespace gsv
