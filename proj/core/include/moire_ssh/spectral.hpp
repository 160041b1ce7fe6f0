#pragma once

#include <vector>

#include <Eigen/Dense>

#include "moire_ssh/model.hpp"

namespace moire_ssh {

inline constexpr double kDefaultZeroModeTol = 1e-6;
// Levels closer than this at the Fermi energy make the ground state ambiguous.
inline constexpr double kFermiDegeneracyGap = 1e-12;

/// Full spectrum of a real-space Hamiltonian.
///
/// `energies` ascending; column i of `states` is the normalized eigenvector
/// for energies(i), with its largest-magnitude component made positive.
struct SpectrumResult {
  Eigen::VectorXd energies;
  Eigen::MatrixXd states;
  ModelParams params;
  Boundary boundary;

  int sites() const noexcept { return static_cast<int>(energies.size()); }
  int cells() const noexcept { return sites() / 2; }
};

/// Delta E1 = E_{L+1} - E_L, Delta E2 = E_{L+2} - E_L (1-based levels).
struct GapPair {
  double delta_e1;
  double delta_e2;
};

SpectrumResult eigensolve(const RealSpaceHamiltonian& h);

/// Eigenvalues only, ascending. Cheaper than eigensolve when no states are needed.
Eigen::VectorXd eigenvalues(const RealSpaceHamiltonian& h);

GapPair energy_gaps(const Eigen::VectorXd& energies);
GapPair energy_gaps(const SpectrumResult& spec);

int zero_mode_count(const Eigen::VectorXd& energies, double tol = kDefaultZeroModeTol);
int zero_mode_count(const SpectrumResult& spec, double tol = kDefaultZeroModeTol);

/// Per-unit-cell density |psi(M_j)|^2 + |psi(W_j)|^2 of one state.
/// Throws std::out_of_range for a bad index.
std::vector<double> density_distribution(const SpectrumResult& spec, int state_index);
std::vector<double> density_distribution(const Eigen::Ref<const Eigen::VectorXd>& state);

/// Near-zero states rotated to be maximally edge localized.
struct EdgeModes {
  Eigen::VectorXd energies;     // energies of the original near-zero states
  Eigen::MatrixXd states;       // rotated orthonormal columns spanning the same subspace
  Eigen::VectorXd left_weight;  // weight of each rotated column on the left half of the chain
};

/// Collects states with |E| < tol and diagonalizes the left-half projector
/// inside that subspace, which separates left- and right-localized modes of
/// a (near) degenerate zero-energy manifold. Columns are ordered by
/// descending left weight.
EdgeModes edge_resolved_zero_modes(const SpectrumResult& spec, double tol = kDefaultZeroModeTol);

}  // namespace moire_ssh
