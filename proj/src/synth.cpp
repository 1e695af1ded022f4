#include "mlmunmix/synth.hpp"

#include "mlmunmix/metrics.hpp"
#include "mlmunmix/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mlmunmix {

void SceneSpec::validate() const {
  if (!std::isfinite(snr_db)) throw std::invalid_argument("scene: SNR must be finite");
  if (m < 1) throw std::invalid_argument("scene: m must be at least 1");
  if (m > d) throw std::invalid_argument("scene: m must not exceed the band count");
  if (height < 1 || width < 1) throw std::invalid_argument("scene: grid must be positive");
  if (p_law == PLaw::Constant && !(p_constant >= 0.0 && p_constant < 1.0))
    throw std::invalid_argument("scene: constant P must lie in [0, 1)");
}

double GroundTruth::realized_snr_db() const {
  return 10.0 * std::log10(X_clean.squaredNorm() / (X_noisy.data() - X_clean).squaredNorm());
}

std::mt19937_64 stream_engine(std::uint64_t seed, RandomStream stream, std::uint64_t index) {
  const auto s = static_cast<std::uint64_t>(stream);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

VectorXd sample_simplex_uniform(Index m, std::uint64_t seed) {
  auto rng = stream_engine(seed, RandomStream::Abundance, 0);
  return sample_simplex_uniform(m, rng);
}

std::vector<double> default_wavelengths(Index d) {
  std::vector<double> out(static_cast<std::size_t>(d));
  for (Index j = 0; j < d; ++j)
    out[static_cast<std::size_t>(j)] = d == 1 ? 383.0 : 383.0 + (2508.0 - 383.0) * double(j) / double(d - 1);
  return out;
}

namespace {

constexpr double kSpectrumLo = 0.05;
constexpr double kSpectrumHi = 0.95;
constexpr double kMinPairwiseSamDeg = 5.0;
constexpr int kMaxAttempts = 1000;

VectorXd smooth_spectrum(Index d, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> bump_count(3, 6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int bumps = bump_count(rng);
  VectorXd s = VectorXd::Zero(d);
  for (int b = 0; b < bumps; ++b) {
    const double amplitude = 2.0 * unit(rng) - 1.0;
    const double centre = unit(rng);
    const double width = 0.04 + 0.2 * unit(rng);
    for (Index j = 0; j < d; ++j) {
      const double t = d == 1 ? 0.0 : double(j) / double(d - 1);
      s(j) += amplitude * std::exp(-0.5 * (t - centre) * (t - centre) / (width * width));
    }
  }
  // Rescale into a random sub-range of [0.05, 0.95].
  const double lo = kSpectrumLo + 0.3 * unit(rng);
  const double hi = kSpectrumHi - 0.35 * unit(rng);
  const double span = s.maxCoeff() - s.minCoeff();
  if (!(span > 1e-9)) return VectorXd::Constant(d, 0.5 * (lo + hi));
  return (lo + (hi - lo) * (s.array() - s.minCoeff()) / span).matrix();
}

}  // namespace

EndmemberMatrix synthetic_endmembers(Index d, Index m, std::uint64_t seed) {
  if (m < 1 || m > d) throw std::invalid_argument("synthetic_endmembers: need 1 <= m <= d");
  MatrixXd E(d, m);
  Index accepted = 0;
  for (int attempt = 0; attempt < kMaxAttempts && accepted < m; ++attempt) {
    auto rng = stream_engine(seed, RandomStream::Endmember, static_cast<std::uint64_t>(attempt));
    const VectorXd candidate = smooth_spectrum(d, rng);
    bool distinct = true;
    for (Index k = 0; k < accepted && distinct; ++k)
      distinct = sam_deg(E.col(k), candidate) >= kMinPairwiseSamDeg;
    if (distinct) E.col(accepted++) = candidate;
  }
  if (accepted < m)
    throw NumericError("synthetic_endmembers: could not find " + std::to_string(m) +
                       " spectra 5 degrees apart in " + std::to_string(kMaxAttempts) + " attempts");
  return EndmemberMatrix(std::move(E));
}

std::string_view to_string(PLaw law) {
  switch (law) {
    case PLaw::Uniform01: return "uniform";
    case PLaw::Constant: return "constant";
    case PLaw::Zero: return "zero";
  }
  return "?";
}

GroundTruth generate_scene(const SceneSpec& spec, const std::optional<EndmemberMatrix>& provided) {
  spec.validate();
  EndmemberMatrix E;
  if (spec.endmember_source == EndmemberSource::ProvidedMatrix) {
    if (!provided) throw std::invalid_argument("scene: provided endmember matrix is missing");
    if (provided->num_bands() != spec.d || provided->num_endmembers() != spec.m)
      throw DimensionError("scene: provided endmembers are " + std::to_string(provided->num_bands()) + "x" +
                           std::to_string(provided->num_endmembers()) + ", expected " +
                           std::to_string(spec.d) + "x" + std::to_string(spec.m));
    E = *provided;
  } else {
    E = synthetic_endmembers(spec.d, spec.m, spec.seed);
  }

  const Index n = spec.num_pixels();
  const Index d = spec.d;
  const MatrixXd& Em = E.data();

  GroundTruth gt;
  // A unit reflectance makes y reach the pole of the closed form at P -> 1.
  gt.p_upper = Em.maxCoeff() >= 1.0 - kDivergenceMargin ? 0.95 : 1.0;

  MatrixXd A(spec.m, n);
  VectorXd P(n);
  MatrixXd clean(d, n);
  for (Index i = 0; i < n; ++i) {
    const auto idx = static_cast<std::uint64_t>(i);
    auto arng = stream_engine(spec.seed, RandomStream::Abundance, idx);
    A.col(i) = sample_simplex_uniform(spec.m, arng);
    switch (spec.p_law) {
      case PLaw::Uniform01: {
        auto prng = stream_engine(spec.seed, RandomStream::Probability, idx);
        P(i) = std::uniform_real_distribution<double>(0.0, gt.p_upper)(prng);
        break;
      }
      case PLaw::Constant: P(i) = spec.p_constant; break;
      case PLaw::Zero: P(i) = 0.0; break;
    }
    clean.col(i) = mlm_forward(Em, A.col(i), P(i));
  }

  gt.sigma2 = clean.squaredNorm() / (double(n) * double(d) * std::pow(10.0, spec.snr_db / 10.0));
  const double sigma = std::sqrt(gt.sigma2);
  MatrixXd noisy = clean;
  for (Index i = 0; i < n; ++i) {
    auto nrng = stream_engine(spec.seed, RandomStream::Noise, static_cast<std::uint64_t>(i));
    std::normal_distribution<double> gauss(0.0, sigma);
    for (Index j = 0; j < d; ++j) noisy(j, i) += gauss(nrng);
  }

  gt.E_true = std::move(E);
  gt.A_true = AbundanceMatrix(std::move(A));
  gt.P_true = TransitionProbabilities(std::move(P));
  gt.X_clean = std::move(clean);
  gt.X_noisy = HyperCube(std::move(noisy), default_wavelengths(d), spec.height, spec.width);
  return gt;
}

}  // namespace mlmunmix
