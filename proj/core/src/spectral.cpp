#include "moire_ssh/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "moire_ssh/eigen_lapack.hpp"

namespace moire_ssh {

namespace {

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index best = 0;
  v.cwiseAbs().maxCoeff(&best);
  if (v(best) < 0.0) v = -v;
}

}  // namespace

SpectrumResult eigensolve(const RealSpaceHamiltonian& h) {
  auto solved = lapack::eigh(h.matrix);
  for (Eigen::Index c = 0; c < solved.vectors.cols(); ++c) fix_sign(solved.vectors.col(c));
  return {std::move(solved.values), std::move(solved.vectors), h.params, h.boundary};
}

Eigen::VectorXd eigenvalues(const RealSpaceHamiltonian& h) { return lapack::eigvalsh(h.matrix); }

GapPair energy_gaps(const Eigen::VectorXd& energies) {
  const auto n = energies.size();
  if (n % 2 != 0 || n < 4) {
    throw std::invalid_argument("energy_gaps: need an even spectrum with N >= 4");
  }
  const auto half = n / 2;
  // 1-based E_L, E_{L+1}, E_{L+2} are 0-based half-1, half, half+1.
  return {energies(half) - energies(half - 1), energies(half + 1) - energies(half - 1)};
}

GapPair energy_gaps(const SpectrumResult& spec) { return energy_gaps(spec.energies); }

int zero_mode_count(const Eigen::VectorXd& energies, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("zero_mode_count: tol must be positive");
  return static_cast<int>((energies.array().abs() < tol).count());
}

int zero_mode_count(const SpectrumResult& spec, double tol) {
  return zero_mode_count(spec.energies, tol);
}

std::vector<double> density_distribution(const Eigen::Ref<const Eigen::VectorXd>& state) {
  const auto cells = state.size() / 2;
  std::vector<double> rho(static_cast<std::size_t>(cells));
  for (Eigen::Index j = 0; j < cells; ++j) {
    rho[static_cast<std::size_t>(j)] = state(2 * j) * state(2 * j) + state(2 * j + 1) * state(2 * j + 1);
  }
  return rho;
}

std::vector<double> density_distribution(const SpectrumResult& spec, int state_index) {
  if (state_index < 0 || state_index >= spec.states.cols()) {
    throw std::out_of_range("density_distribution: state index " + std::to_string(state_index) +
                            " out of range");
  }
  return density_distribution(spec.states.col(state_index));
}

EdgeModes edge_resolved_zero_modes(const SpectrumResult& spec, double tol) {
  std::vector<Eigen::Index> picked;
  for (Eigen::Index i = 0; i < spec.energies.size(); ++i) {
    if (std::abs(spec.energies(i)) < tol) picked.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(picked.size());
  const auto n = spec.states.rows();
  EdgeModes out{Eigen::VectorXd(m), Eigen::MatrixXd(n, m), Eigen::VectorXd(m)};
  if (m == 0) return out;

  Eigen::MatrixXd z(n, m);
  for (Eigen::Index c = 0; c < m; ++c) {
    z.col(c) = spec.states.col(picked[static_cast<std::size_t>(c)]);
    out.energies(c) = spec.energies(picked[static_cast<std::size_t>(c)]);
  }
  // Left half of the chain: the first L/2 cells, i.e. the first N/2 sites.
  const auto left_sites = 2 * (n / 4);
  const Eigen::MatrixXd zl = z.topRows(left_sites);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> proj(zl.transpose() * zl);
  // Ascending eigenvalues; reverse so left-localized columns come first.
  for (Eigen::Index c = 0; c < m; ++c) {
    const auto src = m - 1 - c;
    Eigen::VectorXd col = z * proj.eigenvectors().col(src);
    fix_sign(col);
    out.states.col(c) = col;
    out.left_weight(c) = proj.eigenvalues()(src);
  }
  return out;
}

}  // namespace moire_ssh
