#include "moire_ssh/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "moire_ssh/eigen_lapack.hpp"
#include "moire_ssh/errors.hpp"

namespace moire_ssh {

namespace {

constexpr double kClampSlack = 1e-12;

double binary_entropy(double z) {
  double s = 0.0;
  if (z > 0.0) s -= z * std::log(z);
  if (z < 1.0) s -= (1.0 - z) * std::log1p(-z);
  return s;
}

}  // namespace

CorrelationMatrix correlation_matrix(const SpectrumResult& spec, int filling, DegeneracyPolicy policy) {
  const int n = spec.sites();
  if (filling < 0 || filling > n) {
    throw std::invalid_argument("correlation_matrix: filling " + std::to_string(filling) + " out of range");
  }
  if (spec.states.cols() != n) throw std::invalid_argument("correlation_matrix: spectrum has no eigenvectors");
  if (policy == DegeneracyPolicy::Reject && filling > 0 && filling < n &&
      std::abs(spec.energies(filling) - spec.energies(filling - 1)) <= kFermiDegeneracyGap) {
    throw FermiDegeneracy("correlation_matrix: E_" + std::to_string(filling) + " and E_" +
                          std::to_string(filling + 1) + " are degenerate");
  }
  const auto occupied = spec.states.leftCols(filling);
  Eigen::MatrixXd c(n, n);
  c.setZero();
  c.selfadjointView<Eigen::Lower>().rankUpdate(occupied);
  c.triangularView<Eigen::StrictlyUpper>() = c.transpose();
  return {std::move(c), filling};
}

CorrelationMatrix ground_state_correlation(const SpectrumResult& spec, DegeneracyPolicy policy) {
  return correlation_matrix(spec, spec.cells(), policy);
}

CorrelationMatrix ground_state_correlation(const ModelParams& params, Boundary boundary,
                                           DegeneracyPolicy policy) {
  const auto h = build_hamiltonian(params, boundary);
  const auto lower = lapack::chiral_lowest(lapack::chiral_block(h.matrix));
  const int cells = params.cells();
  // E_{L+1} = -E_L by chiral symmetry.
  if (policy == DegeneracyPolicy::Reject && -2.0 * lower.values(cells - 1) <= kFermiDegeneracyGap) {
    throw FermiDegeneracy("ground_state_correlation: E_" + std::to_string(cells) + " and E_" +
                          std::to_string(cells + 1) + " are degenerate");
  }
  Eigen::MatrixXd c(2 * cells, 2 * cells);
  c.setZero();
  c.selfadjointView<Eigen::Lower>().rankUpdate(lower.vectors);
  c.triangularView<Eigen::StrictlyUpper>() = c.transpose();
  return {std::move(c), cells};
}

EntanglementResult entanglement_spectrum(const CorrelationMatrix& c, int l) {
  const int cells = static_cast<int>(c.matrix.rows() / 2);
  if (l < 1 || l >= cells) {
    throw std::invalid_argument("entanglement_spectrum: l = " + std::to_string(l) + " outside [1, L)");
  }
  const Eigen::VectorXd values = lapack::eigvalsh(c.matrix.topLeftCorner(2 * l, 2 * l));
  std::vector<double> zetas(values.data(), values.data() + values.size());
  const double s = entanglement_entropy(zetas);
  const int mid = midgap_degeneracy(zetas);
  return {std::move(zetas), s, l, mid};
}

double entanglement_entropy(std::span<const double> zetas) {
  double s = 0.0;
  for (const double z : zetas) {
    if (!(z >= -kClampSlack && z <= 1.0 + kClampSlack)) {
      throw std::invalid_argument("entanglement_entropy: zeta " + std::to_string(z) + " outside [0, 1]");
    }
    s += binary_entropy(std::clamp(z, 0.0, 1.0));
  }
  return s;
}

int midgap_degeneracy(std::span<const double> zetas, double tol) {
  if (!(tol > 0.0 && tol < 0.5)) throw std::invalid_argument("midgap_degeneracy: tol must be in (0, 0.5)");
  return static_cast<int>(std::count_if(zetas.begin(), zetas.end(),
                                        [tol](double z) { return std::abs(z - 0.5) < tol; }));
}

double entanglement_energy(double zeta) {
  if (zeta <= 0.0) return std::numeric_limits<double>::infinity();
  if (zeta >= 1.0) return -std::numeric_limits<double>::infinity();
  return std::log(1.0 / zeta - 1.0);
}

double block_entropy(const CorrelationMatrix& c, int l) {
  const int cells = static_cast<int>(c.matrix.rows() / 2);
  if (2 * l <= cells) return entanglement_spectrum(c, l).entropy;
  if (l >= cells) throw std::invalid_argument("block_entropy: l = " + std::to_string(l) + " outside [1, L)");
  // C is a projector, so the first l cells and the remaining L - l share S.
  const int rest = 2 * (cells - l);
  const Eigen::VectorXd values = lapack::eigvalsh(c.matrix.bottomRightCorner(rest, rest));
  return entanglement_entropy(std::span<const double>(values.data(), values.size()));
}

std::vector<double> entropy_profile(const CorrelationMatrix& c, std::span<const int> ls) {
  std::vector<double> out;
  out.reserve(ls.size());
  for (const int l : ls) out.push_back(block_entropy(c, l));
  return out;
}

}  // namespace moire_ssh
