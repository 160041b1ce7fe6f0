#pragma once

// Thin LAPACK drivers for dense symmetric eigenproblems. Eigen's own
// self-adjoint solver is correct but several times slower than the divide
// and conquer driver at the N ~ 10^3..10^4 sizes used here.

#include <Eigen/Dense>

namespace moire_ssh::lapack {

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // column i pairs with values(i); empty if not requested
};

/// All eigenvalues and eigenvectors (dsyevd). Throws EigensolverError.
SymmetricEigen eigh(const Eigen::MatrixXd& a);

/// Eigenvalues only (dsyevd, jobz = 'N').
Eigen::VectorXd eigvalsh(const Eigen::MatrixXd& a);

/// The `count` lowest eigenpairs (dsyevr, index range 1..count).
SymmetricEigen eigh_lowest(const Eigen::MatrixXd& a, int count);

/// Lowest half of the spectrum of a chiral Hamiltonian in interleaved
/// basis (A1, B1, A2, B2, ...), with H[A_i, B_j] = q(i, j) and no A-A or
/// B-B terms. From q = U diag(s) V^T the occupied states are
/// (u_i, -v_i) / sqrt 2 at energy -s_i (dgesdd).
SymmetricEigen chiral_lowest(const Eigen::MatrixXd& q);

/// Extracts q from an interleaved chiral Hamiltonian.
Eigen::MatrixXd chiral_block(const Eigen::MatrixXd& h);

}  // namespace moire_ssh::lapack
