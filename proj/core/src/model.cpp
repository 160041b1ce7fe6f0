#include "moire_ssh/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace moire_ssh {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int site_m(int cell) { return 2 * (cell - 1); }
int site_w(int cell) { return 2 * (cell - 1) + 1; }

}  // namespace

const char* to_string(Boundary b) noexcept {
  return b == Boundary::Open ? "open" : "periodic";
}

ModelParams::ModelParams(double epsilon, double j2, double m_o, int a1, int a2, int supercells)
    : epsilon_(epsilon), j2_(j2), m_o_(m_o), a1_(a1), a2_(a2), supercells_(supercells) {
  if (!std::isfinite(epsilon) || !std::isfinite(j2) || !std::isfinite(m_o)) {
    throw std::invalid_argument("ModelParams: couplings must be finite");
  }
  if (a1 < 1 || a2 < 1) {
    throw std::invalid_argument("ModelParams: moire periods must be >= 1");
  }
  if (supercells < 1) {
    throw std::invalid_argument("ModelParams: supercell count must be >= 1");
  }
}

ModelParams ModelParams::with_epsilon(double epsilon) const {
  return {epsilon, j2_, m_o_, a1_, a2_, supercells_};
}
ModelParams ModelParams::with_j2(double j2) const {
  return {epsilon_, j2, m_o_, a1_, a2_, supercells_};
}
ModelParams ModelParams::with_m_o(double m_o) const {
  return {epsilon_, j2_, m_o, a1_, a2_, supercells_};
}
ModelParams ModelParams::with_supercells(int supercells) const {
  return {epsilon_, j2_, m_o_, a1_, a2_, supercells};
}

double moire_pattern(const ModelParams& params, int j) {
  // Reduce j into one supercell first so that the result is exactly
  // periodic in a12 rather than periodic up to trig round-off.
  const int a12 = params.a12();
  const int jr = ((j % a12) + a12) % a12;
  const double c1 = std::cos(kTwoPi * (jr % params.a1()) / params.a1());
  const double c2 = std::cos(kTwoPi * (jr % params.a2()) / params.a2());
  return params.m_o() * (c1 + c2);
}

std::vector<double> intracell_hoppings(const ModelParams& params) {
  std::vector<double> out(static_cast<std::size_t>(params.a12()));
  for (int j = 1; j <= params.a12(); ++j) {
    out[static_cast<std::size_t>(j - 1)] = params.v() + moire_pattern(params, j);
  }
  return out;
}

RealSpaceHamiltonian build_hamiltonian(const ModelParams& params, Boundary boundary) {
  const int cells = params.cells();
  const int n = params.sites();
  if (n < 6) {
    throw std::invalid_argument("build_hamiltonian: chain needs at least 3 unit cells, got N = " +
                                std::to_string(n));
  }
  const auto vj = intracell_hoppings(params);
  const int a12 = params.a12();
  const double w = params.w();
  const double j2 = params.j2();
  const bool periodic = boundary == Boundary::Periodic;

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  auto place = [&h](int r, int c, double value) {
    h(r, c) = value;
    h(c, r) = value;
  };
  for (int j = 1; j <= cells; ++j) {
    place(site_m(j), site_w(j), vj[static_cast<std::size_t>((j - 1) % a12)]);

    int next = j + 1;
    if (next <= cells || periodic) {
      next = (next - 1) % cells + 1;
      place(site_w(j), site_m(next), w);
    }
    int far = j + 2;
    if (far <= cells || periodic) {
      far = (far - 1) % cells + 1;
      place(site_m(far), site_w(j), j2);
    }
  }
  return {std::move(h), boundary, params};
}

Eigen::VectorXd chiral_diagonal(int cells) {
  Eigen::VectorXd c(2 * cells);
  for (int i = 0; i < cells; ++i) {
    c(2 * i) = 1.0;
    c(2 * i + 1) = -1.0;
  }
  return c;
}

double reduced_zone_width(const ModelParams& params) noexcept {
  return kTwoPi / params.a12();
}

Eigen::MatrixXd channel_shift(int n, int shift) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    s(i, (i + shift) % n) += 1.0;
    s(i, (i + n - shift % n) % n) += 1.0;
  }
  return s;
}

Eigen::MatrixXcd q_block(const ModelParams& params, double k) {
  const int a12 = params.a12();
  const double w = params.w();
  const double j2 = params.j2();
  Eigen::MatrixXcd q(a12, a12);
  q.real() = (0.5 * params.m_o()) * (channel_shift(a12, params.a2()) + channel_shift(a12, params.a1()));
  q.imag().setZero();
  for (int l = 0; l < a12; ++l) {
    const double kk = k + kTwoPi * l / a12;
    const double x = w * std::cos(kk) + j2 * std::cos(2.0 * kk);
    const double y = w * std::sin(kk) + j2 * std::sin(2.0 * kk);
    q(l, l) += std::complex<double>(params.v() + x, -y);
  }
  return q;
}

BlochHamiltonian build_bloch_extended(const ModelParams& params, double k) {
  const int a12 = params.a12();
  Eigen::MatrixXcd q = q_block(params, k);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2 * a12, 2 * a12);
  h.topRightCorner(a12, a12) = q;
  h.bottomLeftCorner(a12, a12) = q.adjoint();
  return {k, std::move(h), std::move(q)};
}

BlochHamiltonian build_bloch(const ModelParams& params, double k) {
  if (!(k >= 0.0 && k < reduced_zone_width(params))) {
    throw std::invalid_argument("build_bloch: k = " + std::to_string(k) +
                                " outside the reduced zone [0, 2pi/a12)");
  }
  return build_bloch_extended(params, k);
}

}  // namespace moire_ssh
