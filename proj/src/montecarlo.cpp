#include "lsv/montecarlo.hpp"

#include <algorithm>
#include <stdexcept>

#include "lsv/kernels/kernels.hpp"
#include "lsv/parallel.hpp"

namespace lsv {

SumMatrix birkhoff_sums(const SumSpec& spec) {
  if (!spec.phi || !spec.initial) throw std::invalid_argument("birkhoff_sums: observable and initial law required");
  if ((spec.quenched == nullptr) == (spec.annealed == nullptr)) {
    throw std::invalid_argument("birkhoff_sums: give exactly one of a quenched schedule or an annealed space");
  }
  if (spec.checkpoints.empty() || spec.checkpoints.front() == 0 ||
      !std::is_sorted(spec.checkpoints.begin(), spec.checkpoints.end())) {
    throw std::invalid_argument("birkhoff_sums: checkpoints must be positive and ascending");
  }
  const std::size_t n_max = spec.checkpoints.back();
  if (!spec.centering.empty() && spec.centering.size() < n_max + 1) {
    throw std::invalid_argument("birkhoff_sums: centering table shorter than the longest checkpoint");
  }

  std::vector<double> shared_alpha;
  if (spec.quenched) shared_alpha = spec.quenched->alphas(n_max);
  std::vector<double> omega_alpha;
  if (spec.annealed) {
    for (auto p : spec.annealed->omegas()) omega_alpha.push_back(p.alpha());
  }

  SumMatrix out(spec.checkpoints, spec.samples);
  const CounterRng x0_rng(spec.seed, spec.x0_domain);
  const CounterRng omega_rng(spec.omega_seed, StreamDomain::Schedule);
  const auto& kt = kernels::active();
  const std::size_t chunks = (spec.samples + kSampleChunk - 1) / kSampleChunk;

  parallel_for(chunks, spec.workers, [&](std::size_t chunk) {
    const std::size_t first = chunk * kSampleChunk;
    const std::size_t len = std::min(kSampleChunk, spec.samples - first);
    std::vector<double> x(len), acc(len, 0.0), val(len), alpha(spec.annealed ? len : 0);
    for (std::size_t i = 0; i < len; ++i) x[i] = spec.initial->sample(x0_rng.uniform(first + i, 0));
    std::size_t cp = 0;
    for (std::size_t k = 1; k <= n_max; ++k) {
      if (spec.annealed) {
        for (std::size_t i = 0; i < len; ++i) {
          alpha[i] = omega_alpha[spec.annealed->pick(omega_rng.uniform(first + i, k))];
        }
        kt.step_lanes(x.data(), alpha.data(), len);
      } else {
        kt.step_uniform(x.data(), len, shared_alpha[k - 1]);
      }
      spec.phi->eval(x, val);
      const double c = spec.centering.empty() ? 0.0 : spec.centering[k];
      for (std::size_t i = 0; i < len; ++i) acc[i] += val[i] - c;
      if (k == spec.checkpoints[cp]) {
        while (cp < spec.checkpoints.size() && spec.checkpoints[cp] == k) {
          std::copy(acc.begin(), acc.end(), out.row(cp).begin() + static_cast<std::ptrdiff_t>(first));
          ++cp;
        }
      }
    }
  });
  return out;
}

}  // namespace lsv
