#include <algorithm>
#include <cmath>

#include "qmoves/errors.hpp"
#include "qmoves/propagation.hpp"

namespace qmoves {

std::size_t default_step_rule(double T)
{
  return std::max<std::size_t>(100, static_cast<std::size_t>(std::ceil(T / 2.5e-4 - 1e-9)));
}

std::vector<FidelityPoint> fidelity_curve(const ProtocolFamily& family, const std::string& kind,
                                          std::shared_ptr<const SpectralBank> spectra, const StepRule& n_rule,
                                          const std::vector<double>& T_list, const TransportStates& states)
{
  if (T_list.empty()) {
    throw DomainError("fidelity curve needs at least one duration");
  }
  for (std::size_t i = 1; i < T_list.size(); ++i) {
    if (T_list[i] < T_list[i - 1]) {
      throw DomainError("fidelity curve durations must be ascending");
    }
  }
  std::vector<FidelityPoint> rows;
  rows.reserve(T_list.size());
  for (double T : T_list) {
    const std::size_t N = n_rule ? n_rule(T) : default_step_rule(T);
    const UnitaryBank bank(spectra, T, N);
    const auto dp = quantize_protocol(family(T), bank.lattice(), N);
    const auto result = evolve(dp, bank, states.initial, 0, &states.target);
    rows.push_back(FidelityPoint{T, *result.fidelity, kind});
  }
  return rows;
}

} // namespace qmoves
