#pragma once

#include "cssqkd/gf2.hpp"
#include "cssqkd/types.hpp"

namespace cssqkd::pauli {

/// n-qubit Pauli operator i^phase_exp * X^x_mask * Z^z_mask, where X^u is the
/// tensor product of bit-flip factors over the support of u and Z^v likewise
/// for phase flips. The (phase, x, z) triple is a unique normal form; the
/// Hermitian Y factor is representable as phase_exp=1 with both masks set.
struct PauliElement {
  int phase_exp = 0;  // exponent of i, mod 4
  gf2::BitVector x_mask;
  gf2::BitVector z_mask;

  int qubits() const { return x_mask.size(); }

  bool operator==(const PauliElement& o) const {
    return phase_exp == o.phase_exp && x_mask == o.x_mask && z_mask == o.z_mask;
  }
};

PauliElement identity_element(int n);

/// X^u with phase +1.
PauliElement from_x_mask(const gf2::BitVector& u);

/// Z^v with phase +1.
PauliElement from_z_mask(const gf2::BitVector& v);

/// X^u Z^v with the phase chosen so the operator is Hermitian
/// (i when the masks overlap on an odd number of qubits, else +1).
PauliElement hermitian_element(const gf2::BitVector& u, const gf2::BitVector& v);

/// Image under the binary homomorphism: the concatenation [x_mask z_mask].
/// The phase is discarded.
gf2::BitVector flatten(const PauliElement& g);

/// The 2n x 2n block form [[0, I],[I, 0]] pairing x- and z-halves of
/// flattened elements.
struct SymplecticForm {
  int n = 1;
  gf2::BitMatrix matrix() const;
};

/// flatten(g) . S . flatten(h)^T over GF(2); zero exactly when g and h
/// commute as dense operators.
int symplectic_product(const PauliElement& g, const PauliElement& h);

/// Group product with exact phase tracking:
/// to_dense(multiply(g,h)) == to_dense(g) * to_dense(h).
PauliElement multiply(const PauliElement& g, const PauliElement& h);

bool is_hermitian(const PauliElement& g);

/// Dense 2^n x 2^n materialization. Basis index packs qubit 0 as the most
/// significant bit.
CMatrix to_dense(const PauliElement& g, int dense_limit = kDenseQubitLimit);

}  // namespace cssqkd::pauli
