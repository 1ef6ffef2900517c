#include "qmoves/propagation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <string>

#include "qmoves/errors.hpp"
#include "qmoves/parallel.hpp"

namespace qmoves {

// ---------------------------------------------------------------------------
// PositionLattice / DiscreteProtocol
// ---------------------------------------------------------------------------

PositionLattice PositionLattice::standard(const PhysicsConfig& cfg) { return centered(0.0, cfg.sigma / 8.0, 128); }

PositionLattice PositionLattice::centered(double center, double spacing, std::size_t count)
{
  if (count == 0 || !(spacing > 0.0)) {
    throw DomainError("lattice needs a positive spacing and at least one point");
  }
  PositionLattice l;
  l.spacing = spacing;
  l.count = count;
  l.first = center - 0.5 * spacing * static_cast<double>(count - 1);
  return l;
}

std::vector<double> PositionLattice::positions() const
{
  std::vector<double> xs(count);
  for (std::size_t k = 0; k < count; ++k) {
    xs[k] = position(k);
  }
  return xs;
}

std::size_t PositionLattice::nearest(double x, std::optional<std::size_t> previous) const
{
  const double u = (x - first) / spacing;
  const double lo = std::floor(u);
  const double frac = u - lo;
  double pick = lo;
  if (frac > 0.5) {
    pick = lo + 1.0;
  } else if (frac == 0.5 && previous && static_cast<double>(*previous) >= lo + 1.0) {
    pick = lo + 1.0;
  }
  pick = std::clamp(pick, 0.0, static_cast<double>(count - 1));
  return static_cast<std::size_t>(pick);
}

void DiscreteProtocol::validate() const
{
  if (indices.empty()) {
    throw ContractError("discrete protocol needs at least one step");
  }
  for (auto k : indices) {
    if (k >= lattice.count) {
      throw ContractError("discrete protocol index " + std::to_string(k) + " outside lattice of size " +
                          std::to_string(lattice.count));
    }
  }
}

Protocol DiscreteProtocol::to_protocol(double T, ProtocolKind kind) const
{
  validate();
  const std::size_t n = indices.size();
  const double dt = T / static_cast<double>(n);
  // Hold each step's position across its whole interval, ends included.
  std::vector<double> t;
  std::vector<double> x;
  t.reserve(n + 2);
  x.reserve(n + 2);
  t.push_back(0.0);
  x.push_back(lattice.position(indices.front()));
  for (std::size_t i = 0; i < n; ++i) {
    const double mid = (static_cast<double>(i) + 0.5) * dt;
    t.push_back(mid);
    x.push_back(lattice.position(indices[i]));
  }
  t.push_back(T);
  x.push_back(lattice.position(indices.back()));
  return Protocol(std::move(t), std::move(x), kind);
}

DiscreteProtocol quantize_protocol(const Protocol& p, const PositionLattice& lattice, std::size_t N)
{
  if (N == 0) {
    throw DomainError("quantization needs N >= 1");
  }
  const double dt = p.duration() / static_cast<double>(N);
  DiscreteProtocol dp;
  dp.lattice = lattice;
  dp.indices.resize(N);
  std::optional<std::size_t> previous;
  for (std::size_t i = 0; i < N; ++i) {
    const double x = p.position((static_cast<double>(i) + 0.5) * dt);
    if (x < lattice.lower() || x > lattice.upper()) {
      throw DomainError("protocol position " + std::to_string(x) + " outside lattice range [" +
                        std::to_string(lattice.lower()) + ", " + std::to_string(lattice.upper()) + "]");
    }
    dp.indices[i] = lattice.nearest(x, previous);
    previous = dp.indices[i];
  }
  return dp;
}

// ---------------------------------------------------------------------------
// SpectralBank
// ---------------------------------------------------------------------------

struct SpectralBank::Lazy {
  explicit Lazy(std::size_t n) : once(new std::once_flag[n]), built(new std::atomic<bool>[n]) {
    for (std::size_t k = 0; k < n; ++k) {
      built[k] = false;
    }
  }
  std::unique_ptr<std::once_flag[]> once;
  std::unique_ptr<std::atomic<bool>[]> built;
};

std::size_t SpectralBank::required_bytes(std::size_t positions, std::size_t n_x)
{
  return positions * n_x * (n_x + 1) * sizeof(double);
}

SpectralBank::SpectralBank(const PhysicsConfig& cfg, const PositionLattice& lattice, bool eager,
                           std::size_t budget_bytes)
    : cfg_(cfg), lattice_(lattice), grid_(SpatialGrid::from_config(cfg))
{
  cfg_.validate();
  if (lattice_.count == 0) {
    throw DomainError("lattice is empty");
  }
  if (lattice_.position(0) < cfg.x_min || lattice_.position(lattice_.count - 1) > cfg.x_max) {
    throw DomainError("lattice positions leave the spatial grid");
  }
  const std::size_t need = required_bytes(lattice_.count, grid_.n);
  if (need > budget_bytes) {
    throw ResourceError("unitary bank needs " + std::to_string(need >> 20) + " MiB, exceeding the memory budget of " +
                        std::to_string(budget_bytes >> 20) + " MiB");
  }
  const auto n = static_cast<Eigen::Index>(grid_.n);
  vectors_.resize(n, n * static_cast<Eigen::Index>(lattice_.count));
  energies_.resize(n, static_cast<Eigen::Index>(lattice_.count));
  lazy_ = std::make_unique<Lazy>(lattice_.count);
  if (eager) {
    ensure_all();
  }
}

SpectralBank::~SpectralBank() = default;

void SpectralBank::ensure(std::size_t k) const
{
  if (k >= lattice_.count) {
    throw ContractError("lattice index out of range");
  }
  if (lazy_->built[k].load(std::memory_order_acquire)) {
    return;
  }
  std::call_once(lazy_->once[k], [&] {
    const auto spec = diagonalize(build_hamiltonian(lattice_.position(k), cfg_));
    const auto n = static_cast<Eigen::Index>(grid_.n);
    vectors_.middleCols(static_cast<Eigen::Index>(k) * n, n) = spec.vectors;
    energies_.col(static_cast<Eigen::Index>(k)) = spec.energies;
    lazy_->built[k].store(true, std::memory_order_release);
  });
}

void SpectralBank::ensure_all() const
{
  parallel_for(lattice_.count, [&](std::size_t k) { ensure(k); });
}

bool SpectralBank::is_built(std::size_t k) const { return lazy_->built[k].load(std::memory_order_acquire); }

const Eigen::MatrixXd& SpectralBank::all_vectors() const
{
  ensure_all();
  return vectors_;
}

Eigen::Ref<const Eigen::MatrixXd> SpectralBank::vectors(std::size_t k) const
{
  ensure(k);
  const auto n = static_cast<Eigen::Index>(grid_.n);
  return vectors_.middleCols(static_cast<Eigen::Index>(k) * n, n);
}

Eigen::Ref<const Eigen::VectorXd> SpectralBank::energies(std::size_t k) const
{
  ensure(k);
  return energies_.col(static_cast<Eigen::Index>(k));
}

// ---------------------------------------------------------------------------
// UnitaryBank
// ---------------------------------------------------------------------------

UnitaryBank::UnitaryBank(std::shared_ptr<const SpectralBank> spectra, double T, std::size_t steps)
    : spectra_(std::move(spectra)), T_(T), steps_(steps), dt_(T / static_cast<double>(steps))
{
  if (!spectra_) {
    throw ContractError("unitary bank needs spectral factorizations");
  }
  if (steps_ == 0) {
    throw DomainError("unitary bank needs N >= 1");
  }
  if (!(T_ > 0.0)) {
    throw DomainError("unitary bank duration must be > 0");
  }
}

void UnitaryBank::apply(std::size_t k, Eigen::VectorXcd& psi, double dt) const
{
  const auto V = spectra_->vectors(k);
  const auto E = spectra_->energies(k);
  const auto n = V.rows();
  if (psi.size() != n) {
    throw ContractError("state size does not match the bank grid");
  }
  // Complex vector viewed as a 2 x n real matrix (real row, imaginary row).
  Eigen::Map<Eigen::Matrix<double, 2, Eigen::Dynamic>> X(reinterpret_cast<double*>(psi.data()), 2, n);
  Eigen::Matrix<double, 2, Eigen::Dynamic> c = X * V;
  for (Eigen::Index j = 0; j < n; ++j) {
    const std::complex<double> phase = std::polar(1.0, -E(j) * dt);
    const std::complex<double> z = std::complex<double>(c(0, j), c(1, j)) * phase;
    c(0, j) = z.real();
    c(1, j) = z.imag();
  }
  X.noalias() = c * V.transpose();
}

UnitaryBank build_bank(const PhysicsConfig& cfg, const PositionLattice& lattice, double T, std::size_t N, bool eager,
                       std::size_t budget_bytes)
{
  return UnitaryBank(std::make_shared<const SpectralBank>(cfg, lattice, eager, budget_bytes), T, N);
}

// ---------------------------------------------------------------------------
// Evolution and fidelity
// ---------------------------------------------------------------------------

std::complex<double> overlap(const WaveFunction& phi, const WaveFunction& psi)
{
  if (!(phi.grid() == psi.grid())) {
    throw ContractError("overlap of wave functions on different grids");
  }
  return phi.amplitudes().dot(psi.amplitudes()) * phi.grid().dx;
}

double fidelity(const WaveFunction& psi, const WaveFunction& phi) { return std::norm(overlap(phi, psi)); }

double frame_bin_width(const SpatialGrid& grid, std::size_t bins)
{
  return static_cast<double>(grid.n) * grid.dx / static_cast<double>(bins);
}

std::vector<double> downsample_density(const std::vector<double>& density, std::size_t bins)
{
  // Cell i covers [i, i+1) in index units; bin b covers [b w, (b+1) w) with w = n / bins.
  const std::size_t n = density.size();
  const double w = static_cast<double>(n) / static_cast<double>(bins);
  std::vector<double> out(bins, 0.0);
  for (std::size_t b = 0; b < bins; ++b) {
    const double lo = static_cast<double>(b) * w;
    const double hi = lo + w;
    double acc = 0.0;
    for (auto i = static_cast<std::size_t>(lo); i < n && static_cast<double>(i) < hi; ++i) {
      const double overlap_len = std::min(hi, static_cast<double>(i + 1)) - std::max(lo, static_cast<double>(i));
      if (overlap_len > 0.0) {
        acc += density[i] * overlap_len;
      }
    }
    out[b] = acc / w;
  }
  return out;
}

namespace {

DensityFrame frame_of(double t, const Eigen::VectorXcd& psi)
{
  std::vector<double> n(static_cast<std::size_t>(psi.size()));
  for (std::size_t i = 0; i < n.size(); ++i) {
    n[i] = std::norm(psi(static_cast<Eigen::Index>(i)));
  }
  return DensityFrame{t, downsample_density(n, kFrameBins)};
}

} // namespace

SimulationResult evolve(const DiscreteProtocol& dp, const UnitaryBank& bank, const WaveFunction& psi0,
                        std::size_t frame_stride, const WaveFunction* target)
{
  dp.validate();
  if (!(dp.lattice == bank.lattice())) {
    throw ContractError("discrete protocol and unitary bank use different lattices");
  }
  if (dp.steps() != bank.steps()) {
    throw ContractError("discrete protocol has " + std::to_string(dp.steps()) + " steps but the bank was built for " +
                        std::to_string(bank.steps()));
  }
  if (!(psi0.grid() == bank.grid())) {
    throw ContractError("initial state grid does not match the bank grid");
  }
  if (std::abs(psi0.norm_squared() - 1.0) > 1e-8) {
    throw ContractError("initial state is not normalized");
  }

  SimulationResult result;
  Eigen::VectorXcd psi = psi0.amplitudes();
  if (frame_stride > 0) {
    result.frames.push_back(frame_of(0.0, psi));
  }
  const std::size_t N = dp.steps();
  for (std::size_t i = 0; i < N; ++i) {
    bank.apply(dp.indices[i], psi);
    if (frame_stride > 0 && ((i + 1) % frame_stride == 0 || i + 1 == N)) {
      result.frames.push_back(frame_of(static_cast<double>(i + 1) * bank.dt(), psi));
    }
  }
  result.final_state = WaveFunction(psi0.grid(), std::move(psi));
  if (target) {
    result.fidelity = std::clamp(fidelity(result.final_state, *target), 0.0, 1.0);
  }
  return result;
}

TransportStates transport_states(const PhysicsConfig& cfg)
{
  cfg.validate();
  auto initial = cfg.initial_state == InitialState::joint_ground ? ground_state(cfg.x0_start, cfg)
                                                                 : static_well_ground_state(cfg);
  auto target = ground_state(cfg.x0_end, cfg);
  return TransportStates{std::move(initial.psi), std::move(target.psi)};
}

} // namespace qmoves
