#pragma once

#include "mlmunmix/core.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

namespace mlmunmix {

enum class PLaw { Uniform01, Constant, Zero };
enum class EndmemberSource { ProvidedMatrix, SyntheticSmooth };

struct SceneSpec {
  Index d = 224;
  Index m = 4;
  Index height = 100;
  Index width = 100;
  double snr_db = 40.0;
  PLaw p_law = PLaw::Uniform01;
  double p_constant = 0.0;  // used by PLaw::Constant, must lie in [0, 1)
  std::uint64_t seed = 0;
  EndmemberSource endmember_source = EndmemberSource::SyntheticSmooth;

  Index num_pixels() const { return height * width; }
  /// Throws std::invalid_argument on a non-finite SNR, m > d, m < 1, an
  /// empty grid or a constant P outside [0, 1).
  void validate() const;
};

struct GroundTruth {
  EndmemberMatrix E_true;
  AbundanceMatrix A_true;
  TransitionProbabilities P_true;
  MatrixXd X_clean;
  HyperCube X_noisy;
  /// Per-sample noise variance the noise was drawn with.
  double sigma2 = 0.0;
  /// Upper end of the interval P was drawn from (Uniform01 only).
  double p_upper = 1.0;

  /// 10 log10(||X_clean||^2 / ||X_noisy - X_clean||^2).
  double realized_snr_db() const;
};

// Independent random streams. Every (seed, stream, index) triple gets its own engine.
enum class RandomStream : std::uint64_t { Abundance = 1, Probability = 2, Noise = 3, Endmember = 4 };
std::mt19937_64 stream_engine(std::uint64_t seed, RandomStream stream, std::uint64_t index);

/// Uniform (flat Dirichlet) draw on the m-simplex by normalized exponentials.
template <typename Engine>
VectorXd sample_simplex_uniform(Index m, Engine& rng) {
  if (m < 1) throw std::invalid_argument("sample_simplex_uniform: m must be at least 1");
  std::exponential_distribution<double> expo(1.0);
  VectorXd a(m);
  for (Index k = 0; k < m; ++k) a(k) = expo(rng);
  return a / a.sum();
}

VectorXd sample_simplex_uniform(Index m, std::uint64_t seed);

/// Smooth synthetic spectra in [0.05, 0.95]: 3 to 6 Gaussian bumps per
/// signature, rescaled, with every pair at least 5 degrees apart.
EndmemberMatrix synthetic_endmembers(Index d, Index m, std::uint64_t seed);

/// Nominal band centres (nm), evenly spaced over 383-2508 nm.
std::vector<double> default_wavelengths(Index d);

/// Ground-truth MLM scene: uniform-simplex abundances, P per the law, clean
/// spectra from the closed-form MLM, then i.i.d. Gaussian noise with
/// sigma^2 = ||X_clean||^2 / (n d 10^(snr/10)).
GroundTruth generate_scene(const SceneSpec& spec, const std::optional<EndmemberMatrix>& provided = {});

std::string_view to_string(PLaw law);

}  // namespace mlmunmix
