#pragma once

// Moiré-modulated extended SSH chain: couplings, real-space and Bloch
// Hamiltonians.
//
// Site basis is (M_1, W_1, M_2, W_2, ...). Unit cells are 1-based in every
// public formula; matrix rows are 0-based (M_j -> 2(j-1), W_j -> 2(j-1)+1).

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace moire_ssh {

enum class Boundary { Open, Periodic };

const char* to_string(Boundary b) noexcept;

/// Hamiltonian couplings and lattice periods.
///
/// Only epsilon is stored for the SSH dimerization; v = 1 + epsilon and
/// w = 1 - epsilon are always derived. Lengths (a12, L, N) are likewise
/// derived from a1, a2 and the supercell count.
class ModelParams {
 public:
  ModelParams(double epsilon, double j2, double m_o, int a1, int a2, int supercells);

  double epsilon() const noexcept { return epsilon_; }
  double j2() const noexcept { return j2_; }
  double m_o() const noexcept { return m_o_; }
  int a1() const noexcept { return a1_; }
  int a2() const noexcept { return a2_; }
  int supercells() const noexcept { return supercells_; }

  double v() const noexcept { return 1.0 + epsilon_; }
  double w() const noexcept { return 1.0 - epsilon_; }
  int a12() const noexcept { return a1_ * a2_; }
  /// Number of unit cells L = A * a12.
  int cells() const noexcept { return supercells_ * a12(); }
  /// Number of sites N = 2L.
  int sites() const noexcept { return 2 * cells(); }

  ModelParams with_epsilon(double epsilon) const;
  ModelParams with_j2(double j2) const;
  ModelParams with_m_o(double m_o) const;
  ModelParams with_supercells(int supercells) const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  double epsilon_;
  double j2_;
  double m_o_;
  int a1_;
  int a2_;
  int supercells_;
};

struct RealSpaceHamiltonian {
  Eigen::MatrixXd matrix;
  Boundary boundary;
  ModelParams params;
};

struct BlochHamiltonian {
  double k;
  Eigen::MatrixXcd matrix;   // 2 a12 x 2 a12, chiral block form
  Eigen::MatrixXcd q_block;  // upper-right a12 x a12 block
};

/// m_j = m_o [cos(2 pi j / a1) + cos(2 pi j / a2)], j >= 1.
double moire_pattern(const ModelParams& params, int j);

/// v_j = v + m_j for j = 1 .. a12 (the chain tiles this A times).
std::vector<double> intracell_hoppings(const ModelParams& params);

/// Dense real-space Hamiltonian. Throws std::invalid_argument when N < 6.
RealSpaceHamiltonian build_hamiltonian(const ModelParams& params, Boundary boundary);

/// Chiral operator diagonal: +1 on M sites, -1 on W sites.
Eigen::VectorXd chiral_diagonal(int cells);

/// Bloch Hamiltonian in the reduced moiré zone. Throws std::invalid_argument
/// unless 0 <= k < 2 pi / a12.
BlochHamiltonian build_bloch(const ModelParams& params, double k);

/// Same construction evaluated at any real k (the formula is 2 pi / a12
/// periodic up to a cyclic relabelling of channels).
BlochHamiltonian build_bloch_extended(const ModelParams& params, double k);

/// Off-diagonal block q(k) = v I + X + (m_o / 2)(E + F) - i Y at any real k.
Eigen::MatrixXcd q_block(const ModelParams& params, double k);

/// Channel-shift matrix S(i, j) = delta_{j,(i+shift)%n} + delta_{j,(i+n-shift)%n}.
/// E is channel_shift(a12, a2), F is channel_shift(a12, a1).
Eigen::MatrixXd channel_shift(int n, int shift);

/// Upper end of the reduced moiré zone, 2 pi / a12.
double reduced_zone_width(const ModelParams& params) noexcept;

}  // namespace moire_ssh
