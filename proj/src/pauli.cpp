#include "cssqkd/pauli.hpp"

namespace cssqkd::pauli {

PauliElement identity_element(int n) {
  return PauliElement{0, gf2::BitVector(n), gf2::BitVector(n)};
}

PauliElement from_x_mask(const gf2::BitVector& u) {
  return PauliElement{0, u, gf2::BitVector(u.size())};
}

PauliElement from_z_mask(const gf2::BitVector& v) {
  return PauliElement{0, gf2::BitVector(v.size()), v};
}

PauliElement hermitian_element(const gf2::BitVector& u,
                               const gf2::BitVector& v) {
  if (u.size() != v.size()) throw DimensionError("mask length mismatch");
  return PauliElement{u.dot(v), u, v};
}

gf2::BitVector flatten(const PauliElement& g) {
  return g.x_mask.concat(g.z_mask);
}

gf2::BitMatrix SymplecticForm::matrix() const {
  gf2::BitMatrix s(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    s.set(i, n + i, 1);
    s.set(n + i, i, 1);
  }
  return s;
}

int symplectic_product(const PauliElement& g, const PauliElement& h) {
  if (g.qubits() != h.qubits())
    throw DimensionError("symplectic_product: qubit counts differ");
  return g.x_mask.dot(h.z_mask) ^ g.z_mask.dot(h.x_mask);
}

PauliElement multiply(const PauliElement& g, const PauliElement& h) {
  if (g.qubits() != h.qubits())
    throw DimensionError("multiply: qubit counts differ");
  // Moving Z^{v_g} past X^{u_h} contributes (-1)^{v_g . u_h}.
  const int phase =
      (g.phase_exp + h.phase_exp + 2 * g.z_mask.dot(h.x_mask)) % 4;
  return PauliElement{phase, g.x_mask + h.x_mask, g.z_mask + h.z_mask};
}

bool is_hermitian(const PauliElement& g) {
  // (X^u Z^v)^dagger = (-1)^{u.v} X^u Z^v, so conj(i^p)(-1)^{u.v} = i^p.
  const int overlap = g.x_mask.dot(g.z_mask);
  return (g.phase_exp % 2 == 0) == (overlap == 0);
}

CMatrix to_dense(const PauliElement& g, int dense_limit) {
  const int n = g.qubits();
  if (n > dense_limit)
    throw CapacityError("to_dense: qubit count exceeds dense limit");
  const std::uint64_t dim = std::uint64_t(1) << n;
  static const Complex kPhases[4] = {
      {1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const Complex scale = kPhases[((g.phase_exp % 4) + 4) % 4];
  const std::uint64_t u = g.x_mask.to_index();
  const std::uint64_t v = g.z_mask.to_index();
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(dim),
                            static_cast<Eigen::Index>(dim));
  for (std::uint64_t z = 0; z < dim; ++z) {
    // X^u Z^v |z> = (-1)^{v.z} |z + u>
    const int sign = __builtin_parityll(v & z) ? -1 : 1;
    m(static_cast<Eigen::Index>(z ^ u), static_cast<Eigen::Index>(z)) =
        scale * static_cast<double>(sign);
  }
  return m;
}

}  // namespace cssqkd::pauli
