#pragma once

#include "mlmunmix/core.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace mlmunmix {

struct VcaConfig {
  Index m = 1;
  /// Known SNR in dB; estimated from the data when unset.
  std::optional<double> snr_db;
  std::uint64_t seed = 0;
};

struct VcaSelection {
  std::vector<Index> indices;  // selected pixel (column) indices, in selection order
  double snr_db = 0.0;         // supplied or estimated SNR
  bool projective = true;      // projective projection (high SNR) vs. affine/PCA
};

/// SNR threshold 15 + 10 log10(m) dB above which the projective projection is used.
double vca_snr_threshold(Index m);

/// Vertex component analysis: picks m pure-pixel candidates by iterated
/// projections onto random directions orthogonal to the span of the
/// pixels chosen so far. Throws std::invalid_argument for m outside
/// [1, min(d, n)] and RankDeficientError when the data subspace has fewer
/// than m usable dimensions.
VcaSelection vca_select(const HyperCube& X, const VcaConfig& cfg);

/// The selected columns of X, clamped into [0, 1].
EndmemberMatrix vca(const HyperCube& X, const VcaConfig& cfg);

}  // namespace mlmunmix
