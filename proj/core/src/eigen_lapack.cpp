#include "moire_ssh/eigen_lapack.hpp"

#include <lapacke.h>

#include <algorithm>
#include <string>
#include <vector>

#include "moire_ssh/errors.hpp"

namespace moire_ssh::lapack {

namespace {

void check_info(lapack_int info, const char* routine) {
  if (info < 0) {
    throw EigensolverError(std::string(routine) + ": illegal argument " + std::to_string(-info));
  }
  if (info > 0) {
    throw EigensolverError(std::string(routine) + ": failed to converge (info = " +
                           std::to_string(info) + ")");
  }
}

void check_finite(const Eigen::MatrixXd& a) {
  if (!a.allFinite()) throw EigensolverError("eigensolver input contains non-finite entries");
}

}  // namespace

SymmetricEigen eigh(const Eigen::MatrixXd& a) {
  check_finite(a);
  const lapack_int n = static_cast<lapack_int>(a.rows());
  SymmetricEigen out{Eigen::VectorXd(n), a};
  if (n == 0) return out;
  check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, out.vectors.data(), n, out.values.data()),
             "dsyevd");
  return out;
}

Eigen::VectorXd eigvalsh(const Eigen::MatrixXd& a) {
  check_finite(a);
  const lapack_int n = static_cast<lapack_int>(a.rows());
  Eigen::VectorXd values(n);
  if (n == 0) return values;
  Eigen::MatrixXd work = a;
  check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', n, work.data(), n, values.data()), "dsyevd");
  return values;
}

SymmetricEigen eigh_lowest(const Eigen::MatrixXd& a, int count) {
  check_finite(a);
  const lapack_int n = static_cast<lapack_int>(a.rows());
  if (count < 1 || count > n) {
    throw EigensolverError("eigh_lowest: count out of range");
  }
  Eigen::MatrixXd work = a;
  Eigen::VectorXd all_values(n);
  SymmetricEigen out{Eigen::VectorXd(count), Eigen::MatrixXd(n, count)};
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(count));
  lapack_int found = 0;
  check_info(LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', n, work.data(), n, 0.0, 0.0, 1, count,
                            0.0, &found, all_values.data(), out.vectors.data(), n, support.data()),
             "dsyevr");
  if (found != count) throw EigensolverError("dsyevr: returned fewer eigenpairs than requested");
  out.values = all_values.head(count);
  return out;
}

SymmetricEigen chiral_lowest(const Eigen::MatrixXd& q) {
  check_finite(q);
  const lapack_int m = static_cast<lapack_int>(q.rows());
  if (q.cols() != m || m == 0) throw EigensolverError("chiral_lowest: q must be square and non-empty");
  Eigen::MatrixXd work = q;
  Eigen::VectorXd s(m);
  Eigen::MatrixXd u(m, m);
  Eigen::MatrixXd vt(m, m);
  lapack_int info =
      LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'A', m, m, work.data(), m, s.data(), u.data(), m, vt.data(), m);
  if (info > 0) {
    // Divide and conquer occasionally fails on clustered singular values;
    // QR iteration is slower but robust.
    work = q;
    Eigen::VectorXd superb(std::max<lapack_int>(m - 1, 1));
    info = LAPACKE_dgesvd(LAPACK_COL_MAJOR, 'A', 'A', m, m, work.data(), m, s.data(), u.data(), m, vt.data(), m,
                          superb.data());
  }
  check_info(info, "dgesdd/dgesvd");
  // Singular values descend, so -s ascends.
  SymmetricEigen out{-s, Eigen::MatrixXd(2 * m, m)};
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  for (lapack_int i = 0; i < m; ++i) {
    out.vectors.col(i)(Eigen::seq(0, 2 * m - 2, 2)) = kInvSqrt2 * u.col(i);
    out.vectors.col(i)(Eigen::seq(1, 2 * m - 1, 2)) = -kInvSqrt2 * vt.row(i).transpose();
  }
  return out;
}

Eigen::MatrixXd chiral_block(const Eigen::MatrixXd& h) {
  const auto n = h.rows();
  if (n % 2 != 0 || h.cols() != n) throw EigensolverError("chiral_block: need an even square matrix");
  return h(Eigen::seq(0, n - 2, 2), Eigen::seq(1, n - 1, 2));
}

}  // namespace moire_ssh::lapack
