#pragma once

// Free-fermion entanglement from the single-particle correlation matrix.
//
// The Hamiltonian is real, so occupied orbitals and C_mn = <c_m^+ c_n> are
// real; C is stored as a real symmetric matrix.

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "moire_ssh/spectral.hpp"

namespace moire_ssh {

inline constexpr double kDefaultMidgapTol = 1e-3;

enum class DegeneracyPolicy {
  Reject,  // throw FermiDegeneracy when E_filling == E_{filling+1}
  Accept,  // fill the lowest `filling` states as returned by the eigensolver
};

struct CorrelationMatrix {
  Eigen::MatrixXd matrix;
  int filling;
};

struct EntanglementResult {
  std::vector<double> zetas;  // ascending, length 2l
  double entropy;             // nats
  int bipartition_l;
  int midgap_count;           // |zeta - 1/2| < kDefaultMidgapTol
};

CorrelationMatrix correlation_matrix(const SpectrumResult& spec, int filling,
                                     DegeneracyPolicy policy = DegeneracyPolicy::Reject);

/// Half-filled ground state correlation matrix (filling = L).
CorrelationMatrix ground_state_correlation(const SpectrumResult& spec,
                                           DegeneracyPolicy policy = DegeneracyPolicy::Reject);

/// Half-filled ground state of the model directly, using the chiral
/// structure of H (one L x L SVD instead of a 2L x 2L eigensolve).
CorrelationMatrix ground_state_correlation(const ModelParams& params, Boundary boundary,
                                           DegeneracyPolicy policy = DegeneracyPolicy::Reject);

/// Spectrum of C restricted to the first l unit cells (first 2l sites).
EntanglementResult entanglement_spectrum(const CorrelationMatrix& c, int l);

/// S = -sum [z ln z + (1 - z) ln(1 - z)], 0 ln 0 = 0. Inputs within 1e-12
/// of [0, 1] are clamped; anything further out throws std::invalid_argument.
double entanglement_entropy(std::span<const double> zetas);

int midgap_degeneracy(std::span<const double> zetas, double tol = kDefaultMidgapTol);

/// xi = ln(1/zeta - 1), the entanglement Hamiltonian level for one zeta.
double entanglement_energy(double zeta);

/// S of the first l cells. For l > L/2 the smaller complement is diagonalized,
/// which is exact because C describes a pure state.
double block_entropy(const CorrelationMatrix& c, int l);

/// S(l) of the correlation matrix for each requested bipartition.
std::vector<double> entropy_profile(const CorrelationMatrix& c, std::span<const int> ls);

}  // namespace moire_ssh
