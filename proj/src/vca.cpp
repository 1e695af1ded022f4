#include "mlmunmix/vca.hpp"

#include "mlmunmix/projections.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace mlmunmix {

namespace {

constexpr double kRankTol = 1e-12;

// Leading `p` eigenvectors of a symmetric PSD matrix, strongest first,
// together with their eigenvalues.
struct Subspace {
  MatrixXd basis;
  VectorXd values;
  double largest = 0.0;
};

Subspace leading_subspace(const MatrixXd& sym, Index p) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym);
  const Index d = sym.rows();
  Subspace s{MatrixXd(d, p), VectorXd(p), es.eigenvalues()(d - 1)};
  for (Index k = 0; k < p; ++k) {
    s.basis.col(k) = es.eigenvectors().col(d - 1 - k);
    s.values(k) = es.eigenvalues()(d - 1 - k);
  }
  return s;
}

void require_rank(const Subspace& s, Index needed, const char* what) {
  if (needed == 0) return;
  if (!(s.largest > 0.0) || !(s.values(needed - 1) > kRankTol * s.largest))
    throw RankDeficientError(std::string("vca: ") + what + " subspace has fewer than " +
                             std::to_string(needed) + " significant dimensions");
}

Index argmax_abs(const Eigen::RowVectorXd& v) {
  Index best = 0;
  double best_val = -1.0;
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > best_val) {
      best_val = std::abs(v(i));
      best = i;
    }
  }
  return best;
}

}  // namespace

double vca_snr_threshold(Index m) { return 15.0 + 10.0 * std::log10(static_cast<double>(m)); }

VcaSelection vca_select(const HyperCube& cube, const VcaConfig& cfg) {
  const MatrixXd& R = cube.data();
  const Index d = R.rows();
  const Index n = R.cols();
  const Index p = cfg.m;
  if (p < 1 || p > std::min(d, n))
    throw std::invalid_argument("vca: endmember count " + std::to_string(p) + " outside [1, min(d, n)]");

  VcaSelection sel;
  const double N = static_cast<double>(n);

  if (p == 1) {
    // One vertex: the pixel with the largest energy along the dominant direction.
    const Subspace s = leading_subspace(R * R.transpose() / N, 1);
    require_rank(s, 1, "signal");
    const Eigen::RowVectorXd proj = s.basis.col(0).transpose() * R;
    sel.indices.push_back(argmax_abs(proj));
    sel.snr_db = cfg.snr_db.value_or(std::numeric_limits<double>::infinity());
    return sel;
  }

  const VectorXd mean = R.rowwise().mean();
  const MatrixXd centered = R.colwise() - mean;
  const Subspace pca = leading_subspace(centered * centered.transpose() / N, p);
  const MatrixXd x_p = pca.basis.transpose() * centered;

  if (cfg.snr_db) {
    sel.snr_db = *cfg.snr_db;
  } else {
    const double power_total = R.squaredNorm() / N;
    const double power_signal = x_p.squaredNorm() / N + mean.squaredNorm();
    const double noise = power_total - power_signal;
    const double signal = power_signal - static_cast<double>(p) / static_cast<double>(d) * power_total;
    if (!(noise > std::numeric_limits<double>::epsilon() * power_total))
      sel.snr_db = std::numeric_limits<double>::infinity();
    else
      sel.snr_db = 10.0 * std::log10(std::max(signal, std::numeric_limits<double>::min()) / noise);
  }
  sel.projective = sel.snr_db >= vca_snr_threshold(p);

  MatrixXd y(p, n);
  if (!sel.projective) {
    require_rank(pca, p - 1, "centered");
    const MatrixXd x = x_p.topRows(p - 1);
    const double c = std::sqrt(x.colwise().squaredNorm().maxCoeff());
    y.topRows(p - 1) = x;
    y.row(p - 1).setConstant(c);
  } else {
    const Subspace sig = leading_subspace(R * R.transpose() / N, p);
    require_rank(sig, p, "signal");
    const MatrixXd x = sig.basis.transpose() * R;
    const VectorXd u = x.rowwise().mean();
    const Eigen::RowVectorXd scale = u.transpose() * x;
    if ((scale.array().abs() <= std::numeric_limits<double>::min()).any())
      throw RankDeficientError("vca: pixel orthogonal to the mean direction in the projective projection");
    y = x.array().rowwise() / scale.array();
  }

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixXd chosen = MatrixXd::Zero(p, p);
  chosen(p - 1, 0) = 1.0;
  for (Index i = 0; i < p; ++i) {
    VectorXd w(p);
    for (Index k = 0; k < p; ++k) w(k) = gauss(rng);
    const MatrixXd pinv = chosen.completeOrthogonalDecomposition().pseudoInverse();
    VectorXd f = w - chosen * (pinv * w);
    const double norm = f.norm();
    if (!(norm > kRankTol * w.norm())) throw RankDeficientError("vca: random direction collapsed");
    f /= norm;
    const Eigen::RowVectorXd v = f.transpose() * y;
    const Index idx = argmax_abs(v);
    sel.indices.push_back(idx);
    chosen.col(i) = y.col(idx);
  }
  return sel;
}

EndmemberMatrix vca(const HyperCube& cube, const VcaConfig& cfg) {
  const VcaSelection sel = vca_select(cube, cfg);
  MatrixXd E(cube.num_bands(), cfg.m);
  for (Index k = 0; k < cfg.m; ++k) E.col(k) = cube.data().col(sel.indices[static_cast<std::size_t>(k)]);
  return EndmemberMatrix(project_box(E, 0.0, 1.0));
}

}  // namespace mlmunmix
