#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cssqkd/css.hpp"
#include "cssqkd/gf2.hpp"
#include "cssqkd/pauli.hpp"
#include "cssqkd/types.hpp"

namespace cssqkd::qsim {

/// |psi> = 2^{-n/2} sum_z |z>|z> on a 2n-qubit register (A then B).
CVector max_entangled(int n);

/// [I (x) X^alpha Z^beta] |psi>. The 4^n states over all (alpha, beta) form
/// an orthonormal basis of the AB register.
CVector bell_state(int n, const gf2::BitVector& alpha,
                   const gf2::BitVector& beta);

/// Hadamard on every one of m qubits; dimension 2^m, involutive.
CMatrix hadamard_layer(int m);

/// Joint eigenprojector 2^{-m} prod_j [I + (-1)^{x_j} g_j] of m pairwise
/// commuting, independent, Hermitian-involutive generators. One factor of
/// one half per constraint makes the product idempotent, with rank 2^{n-m}.
CMatrix pauli_projector(std::span<const pauli::PauliElement> generators,
                        const gf2::BitVector& x);

/// Two projector layers folded together: each outer constraint factor is
/// multiplied by the inner projector, 2^{-m} prod_j [(I + (-1)^{x_j} g_j) Q].
/// When the layers commute this equals the plain product of the two
/// projectors. An empty outer layer returns the inner projector.
CMatrix projector_composition(std::span<const pauli::PauliElement> outer,
                              const gf2::BitVector& x_outer,
                              std::span<const pauli::PauliElement> inner,
                              const gf2::BitVector& x_inner);

/// Max entrywise deviation between sum_{b} |psi_{alpha,b}><psi_{alpha,b}|
/// and the offset-diagonal form sum_z |z, z+alpha><z, z+alpha|.
double bell_marginal_residual_z(int n, const gf2::BitVector& alpha);

/// Max entrywise deviation between sum_{a} |psi_{a,beta}><psi_{a,beta}|
/// and the Hadamard-conjugated offset-diagonal form.
double bell_marginal_residual_x(int n, const gf2::BitVector& beta);

struct ConstrainedSumResiduals {
  double residual_z = 0.0;
  double residual_x = 0.0;
};

/// Compares the label-constrained Bell outer-product sums (over pairs with
/// alpha != beta') against the sandwiched offset-diagonal expressions, in
/// both the computational and the Hadamard-conjugated basis. With
/// `constrained` false the sums run over all label pairs, where the two
/// sides agree exactly. Residuals are reported, not asserted.
ConstrainedSumResiduals constrained_bell_sum_residual(int n,
                                                      bool constrained = true);

/// Probability-weighted collection of matrices with distinct members.
struct MatrixEnsemble {
  std::vector<std::pair<double, gf2::BitMatrix>> members;

  void validate() const;
  static MatrixEnsemble singleton(const gf2::BitMatrix& m);
  static MatrixEnsemble uniform(std::vector<gf2::BitMatrix> ms);
};

/// sum_L sqrt(p_L) |L>|L> on a doubled register indexing ensemble members.
CVector purification_state(const MatrixEnsemble& ensemble);

/// Standard partial trace. `dims` factors the operator's dimension; `keep`
/// lists the factor indices retained, in ascending order.
CMatrix partial_trace(const CMatrix& op, std::span<const int> dims,
                      std::span<const int> keep);

/// Half the trace norm of rho - sigma, via the eigenvalues of the Hermitian
/// difference.
double trace_distance(const CMatrix& rho, const CMatrix& sigma);

/// Squared overlap |<a|b>|^2.
double fidelity(const CVector& a, const CVector& b);

/// Components of a pure state on A (x) B (x) E along the Bell basis of AB:
/// entry at index(alpha) * 2^n + index(beta) is the unnormalized environment
/// vector gamma_{alpha beta} = (<psi_{alpha beta}| (x) I_E) |state>. The
/// state reconstructs as sum |psi_{alpha beta}> (x) gamma_{alpha beta} and
/// the squared norms of the components sum to 1.
std::vector<CVector> bell_expand(const CVector& state, int n, int env_dim);

/// Projector onto Bell labels with both alpha and beta inside the radius-r
/// ball: rank = volume(n, r)^2.
CMatrix ball_projector(int n, int r);

// ---------------------------------------------------------------------------
// Claim validators. These quantify numeric claims that are under test; they
// report residuals and flags and never throw on a failed identity.
// ---------------------------------------------------------------------------

/// Closed forms T_k = 1 / (1 + sum_{j != k} 1/t'_j) built from the eight
/// product terms. Entries whose reciprocal sum degenerates produce NaN.
std::array<double, 8> prefactor_closed_forms(
    const std::array<double, 8>& t_prime);

/// Shape used by the desk-scale validators. Unlike full protocol parameters,
/// only 0 <= 2k <= n is required: the validators exercise the two parity
/// blocks and tolerate an empty key block, which is the only way to fit the
/// tiny registers they need.
struct ValidatorSetup {
  gf2::BitMatrix L;  // n x n, invertible
  int k = 0;
  int r = 0;

  int n() const { return L.rows(); }
  void validate() const;
};

struct PrefactorReport {
  std::array<double, 8> t_prime{};   // normalized traces of the product terms
  std::array<double, 8> t_closed{};  // closed forms derived from t_prime
  double sum_closed = 0.0;
  double f_ratio = 0.0;      // trace ratio of the swapped projector products
  double residual = 0.0;     // |f_ratio - sum_closed|
  bool singular_denominator = false;
  bool singular_terms = false;
};

/// Evaluates the commutation-prefactor identity at n <= 2: the ratio of
/// nested projector products (bit-flip layer signs u, u'; phase-flip layer
/// signs v, v'; each of length k, empty when k = 0) against the sum of the
/// eight closed forms.
PrefactorReport commutation_prefactor_report(const ValidatorSetup& setup,
                                             const gf2::BitVector& u,
                                             const gf2::BitVector& u_prime,
                                             const gf2::BitVector& v,
                                             const gf2::BitVector& v_prime);

enum class AgreementSector { bit_flip, phase_flip };

struct AgreementReport {
  AgreementSector sector = AgreementSector::bit_flip;
  int n = 1;
  int k = 0;
  int r = 0;
  std::size_t ensemble_size = 1;
  double min_eigenvalue = 0.0;   // operator reading on AB
  double trace_scalar = 0.0;     // scalar reading, Tr / dim
  double bound_constant = 0.0;   // 2^{7/2} - 2^{-k + n h(r/n) + 7/2}
  bool bound_satisfied_operator = false;
  bool bound_satisfied_scalar = false;
};

/// Builds the real, simulator and ideal isometry models of one error sector
/// on AB plus six classical value registers, contracts them against the
/// ensemble purification, and reports the agreement operator on AB against
/// the closed-form constant. Every ensemble member must share the setup's
/// shape. Report-only.
AgreementReport isometry_agreement_report(int k, int r,
                                          const MatrixEnsemble& ensemble,
                                          AgreementSector sector);

}  // namespace cssqkd::qsim
