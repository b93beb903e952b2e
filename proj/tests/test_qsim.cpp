#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cssqkd/qsim.hpp"
#include "cssqkd/security.hpp"

using namespace cssqkd;
using gf2::BitMatrix;
using gf2::BitVector;
using pauli::PauliElement;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

PauliElement xel(int n, std::uint64_t u) {
  return pauli::from_x_mask(BitVector::from_index(n, u));
}
PauliElement zel(int n, std::uint64_t v) {
  return pauli::from_z_mask(BitVector::from_index(n, v));
}

}  // namespace

TEST_CASE("maximally entangled state") {
  const CVector psi = qsim::max_entangled(1);
  CHECK(psi.size() == 4);
  CHECK(std::abs(psi(0) - Complex(1 / std::sqrt(2.0), 0)) < 1e-15);
  CHECK(std::abs(psi(3) - Complex(1 / std::sqrt(2.0), 0)) < 1e-15);
  CHECK(std::abs(psi(1)) == 0.0);
  CHECK(std::abs(psi(2)) == 0.0);
  for (int n = 1; n <= 4; ++n)
    CHECK(qsim::max_entangled(n).norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("reduced state of the maximally entangled pair is maximally mixed") {
  for (int n = 1; n <= 2; ++n) {
    const CVector psi = qsim::max_entangled(n);
    const CMatrix rho = psi * psi.adjoint();
    const int half = 1 << n;
    const std::vector<int> dims{half, half};
    for (int keep : {0, 1}) {
      const std::vector<int> keep_set{keep};
      const CMatrix red = qsim::partial_trace(rho, dims, keep_set);
      CHECK(max_abs(red - CMatrix::Identity(half, half) / half) < 1e-14);
    }
  }
}

TEST_CASE("bell states") {
  CHECK((qsim::bell_state(1, BitVector(1), BitVector(1)) -
         qsim::max_entangled(1))
            .cwiseAbs()
            .maxCoeff() < 1e-15);
  const CVector flipped =
      qsim::bell_state(1, BitVector::from_bits({1}), BitVector(1));
  CHECK(std::abs(flipped(1) - Complex(1 / std::sqrt(2.0), 0)) < 1e-15);
  CHECK(std::abs(flipped(2) - Complex(1 / std::sqrt(2.0), 0)) < 1e-15);

  // orthonormal and complete for n = 1, 2
  for (int n = 1; n <= 2; ++n) {
    const std::uint64_t lim = std::uint64_t(1) << n;
    std::vector<CVector> states;
    for (std::uint64_t a = 0; a < lim; ++a)
      for (std::uint64_t b = 0; b < lim; ++b)
        states.push_back(qsim::bell_state(n, BitVector::from_index(n, a),
                                          BitVector::from_index(n, b)));
    for (std::size_t i = 0; i < states.size(); ++i)
      for (std::size_t j = 0; j < states.size(); ++j) {
        const Complex overlap = states[i].dot(states[j]);
        CHECK(std::abs(overlap - (i == j ? 1.0 : 0.0)) < 1e-13);
      }
  }
}

TEST_CASE("pauli projector on a single qubit") {
  const std::vector<PauliElement> z{zel(1, 1)};
  const CMatrix p0 = qsim::pauli_projector(z, BitVector::from_bits({0}));
  CHECK(std::abs(p0(0, 0) - Complex(1, 0)) < 1e-15);
  CHECK(std::abs(p0(1, 1)) < 1e-15);
  const CMatrix p1 = qsim::pauli_projector(z, BitVector::from_bits({1}));
  CHECK(std::abs(p1(1, 1) - Complex(1, 0)) < 1e-15);
  CHECK(std::abs(p1(0, 0)) < 1e-15);
}

TEST_CASE("pauli projector rejects bad generator sets") {
  const std::vector<PauliElement> anticommuting{xel(1, 1), zel(1, 1)};
  CHECK_THROWS_AS(
      qsim::pauli_projector(anticommuting, BitVector::from_bits({0, 0})),
      ParameterError);
  const std::vector<PauliElement> dependent{xel(2, 0b11), xel(2, 0b11)};
  CHECK_THROWS_AS(
      qsim::pauli_projector(dependent, BitVector::from_bits({0, 0})),
      ParameterError);
  const std::vector<PauliElement> nonhermitian{
      PauliElement{0, BitVector::from_bits({1}), BitVector::from_bits({1})}};
  CHECK_THROWS_AS(qsim::pauli_projector(nonhermitian, BitVector::from_bits({0})),
                  ParameterError);
}

TEST_CASE("pauli projector properties on random commuting sets") {
  Rng rng(61);
  for (int n = 2; n <= 3; ++n) {
    const std::uint64_t lim = std::uint64_t(1) << n;
    for (int trial = 0; trial < 40; ++trial) {
      // grow a random commuting independent set of Hermitian elements
      std::vector<PauliElement> gens;
      for (int attempts = 0; attempts < 40 && static_cast<int>(gens.size()) < n;
           ++attempts) {
        const std::uint64_t u = rng.next_below(lim);
        const std::uint64_t v = rng.next_below(lim);
        if (u == 0 && v == 0) continue;
        const PauliElement g = pauli::hermitian_element(
            BitVector::from_index(n, u), BitVector::from_index(n, v));
        bool ok = true;
        for (const auto& h : gens) ok = ok && !pauli::symplectic_product(g, h);
        if (!ok) continue;
        gf2::BitMatrix flat(static_cast<int>(gens.size()) + 1, 2 * n);
        for (std::size_t i = 0; i < gens.size(); ++i)
          flat.set_row(static_cast<int>(i), pauli::flatten(gens[i]));
        flat.set_row(static_cast<int>(gens.size()), pauli::flatten(g));
        if (gf2::rank(flat) != flat.rows()) continue;
        gens.push_back(g);
      }
      if (gens.empty()) continue;
      const int m = static_cast<int>(gens.size());
      const Eigen::Index dim = Eigen::Index(1) << n;
      CMatrix total = CMatrix::Zero(dim, dim);
      for (std::uint64_t xbits = 0; xbits < (std::uint64_t(1) << m); ++xbits) {
        const BitVector x = BitVector::from_index(m, xbits);
        const CMatrix p = qsim::pauli_projector(gens, x);
        CHECK(max_abs(p * p - p) < 1e-12);
        CHECK(max_abs(p - p.adjoint()) < 1e-12);
        CHECK(std::abs(p.trace().real() - std::exp2(n - m)) < 1e-12);
        total += p;
      }
      CHECK(max_abs(total - CMatrix::Identity(dim, dim)) < 1e-12);
    }
  }
}

TEST_CASE("projector composition") {
  const std::vector<PauliElement> z{zel(1, 1)};
  const BitVector zero = BitVector::from_bits({0});
  const std::vector<PauliElement> empty;

  // inner empty reduces to the plain projector
  CHECK(max_abs(qsim::projector_composition(z, zero, empty, BitVector()) -
                qsim::pauli_projector(z, zero)) < 1e-15);

  // two aligned layers give the ground projector and stay idempotent
  const CMatrix composed = qsim::projector_composition(z, zero, z, zero);
  CHECK(std::abs(composed(0, 0) - Complex(1, 0)) < 1e-15);
  CHECK(std::abs(composed(1, 1)) < 1e-15);
  CHECK(max_abs(composed * composed - composed) < 1e-12);
}

TEST_CASE("composition equals the plain product for commuting layers") {
  Rng rng(67);
  for (int n = 1; n <= 2; ++n) {
    const std::uint64_t lim = std::uint64_t(1) << n;
    for (int trial = 0; trial < 30; ++trial) {
      // z-type layers always commute
      std::vector<PauliElement> outer{zel(n, 1 + rng.next_below(lim - 1))};
      std::vector<PauliElement> inner{zel(n, 1 + rng.next_below(lim - 1))};
      const BitVector xo = BitVector::from_index(1, rng.next_below(2));
      const BitVector xi = BitVector::from_index(1, rng.next_below(2));
      const CMatrix lhs = qsim::projector_composition(outer, xo, inner, xi);
      const CMatrix rhs = qsim::pauli_projector(outer, xo) *
                          qsim::pauli_projector(inner, xi);
      CHECK(max_abs(lhs - rhs) < 1e-13);
    }
  }
}

TEST_CASE("bell marginal identities hold exactly") {
  for (int n = 1; n <= 2; ++n) {
    for (std::uint64_t label = 0; label < (std::uint64_t(1) << n); ++label) {
      const BitVector bits = BitVector::from_index(n, label);
      CHECK(qsim::bell_marginal_residual_z(n, bits) < 1e-12);
      CHECK(qsim::bell_marginal_residual_x(n, bits) < 1e-12);
    }
  }
}

TEST_CASE("unconstrained bell sums match; constrained residuals are pinned") {
  for (int n = 1; n <= 2; ++n) {
    const auto full = qsim::constrained_bell_sum_residual(n, false);
    CHECK(full.residual_z < 1e-12);
    CHECK(full.residual_x < 1e-12);
  }
  // hand-derived residuals at n = 1: the constrained sums differ from the
  // sandwiched forms by one Bell projector swap
  const auto res = qsim::constrained_bell_sum_residual(1, true);
  CHECK(res.residual_z == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(res.residual_x == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("purification") {
  const auto single = qsim::MatrixEnsemble::singleton(BitMatrix::identity(2));
  const CVector one = qsim::purification_state(single);
  CHECK(one.size() == 1);
  CHECK(std::abs(one(0) - Complex(1, 0)) < 1e-15);

  const auto pair = qsim::MatrixEnsemble::uniform(
      {BitMatrix::identity(2), BitMatrix::from_rows({{1, 1}, {0, 1}})});
  const CVector two = qsim::purification_state(pair);
  CHECK(two.size() == 4);
  CHECK(std::abs(two(0) - Complex(1 / std::sqrt(2.0), 0)) < 1e-15);
  CHECK(std::abs(two(3) - Complex(1 / std::sqrt(2.0), 0)) < 1e-15);

  // tracing the copy register leaves the diagonal ensemble weights
  const CMatrix rho = two * two.adjoint();
  const std::vector<int> dims{2, 2};
  const std::vector<int> keep{0};
  const CMatrix red = qsim::partial_trace(rho, dims, keep);
  CHECK(std::abs(red(0, 0) - Complex(0.5, 0)) < 1e-14);
  CHECK(std::abs(red(1, 1) - Complex(0.5, 0)) < 1e-14);
  CHECK(std::abs(red(0, 1)) < 1e-14);
}

TEST_CASE("ensemble validation") {
  CHECK_THROWS_AS(qsim::MatrixEnsemble{}.validate(), ParameterError);
  qsim::MatrixEnsemble dup{{{0.5, BitMatrix::identity(2)},
                            {0.5, BitMatrix::identity(2)}}};
  CHECK_THROWS_AS(dup.validate(), ParameterError);
  qsim::MatrixEnsemble bad_mass{{{0.7, BitMatrix::identity(2)}}};
  CHECK_THROWS_AS(bad_mass.validate(), ParameterError);
}

TEST_CASE("partial trace basics") {
  Rng rng(71);
  // keep everything
  const CVector psi = qsim::max_entangled(1);
  const CMatrix rho = psi * psi.adjoint();
  const std::vector<int> dims{2, 2};
  const std::vector<int> all{0, 1};
  CHECK(max_abs(qsim::partial_trace(rho, dims, all) - rho) < 1e-15);

  // product state: tracing the second factor leaves the first times its trace
  CMatrix a(2, 2), b(2, 2);
  a << Complex(0.75, 0), Complex(0.1, 0.2), Complex(0.1, -0.2), Complex(0.25, 0);
  b << Complex(0.5, 0), Complex(0, 0.5), Complex(0, -0.5), Complex(0.5, 0);
  CMatrix prod = CMatrix::Zero(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          prod(i * 2 + k, j * 2 + l) = a(i, j) * b(k, l);
  const std::vector<int> keep_first{0};
  CHECK(max_abs(qsim::partial_trace(prod, dims, keep_first) -
                a * b.trace()) < 1e-14);
}

TEST_CASE("trace distance and fidelity") {
  const CVector psi = qsim::max_entangled(1);
  const CMatrix rho = psi * psi.adjoint();
  CHECK(qsim::trace_distance(rho, rho) == doctest::Approx(0.0).epsilon(1e-14));

  CMatrix zero_state = CMatrix::Zero(2, 2), one_state = CMatrix::Zero(2, 2);
  zero_state(0, 0) = 1.0;
  one_state(1, 1) = 1.0;
  CHECK(qsim::trace_distance(zero_state, one_state) ==
        doctest::Approx(1.0).epsilon(1e-14));

  for (std::uint64_t a = 0; a < 2; ++a)
    for (std::uint64_t b = 0; b < 2; ++b) {
      const double f = qsim::fidelity(
          psi, qsim::bell_state(1, BitVector::from_index(1, a),
                                BitVector::from_index(1, b)));
      CHECK(f == doctest::Approx(a == 0 && b == 0 ? 1.0 : 0.0).epsilon(1e-13));
    }
}

TEST_CASE("bell expansion round trip") {
  Rng rng(73);
  const int n = 1, env = 3;
  const Eigen::Index dim = 4 * env;
  CVector state(dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    state(i) = Complex(rng.next_real() - 0.5, rng.next_real() - 0.5);
  state /= state.norm();

  const auto gammas = qsim::bell_expand(state, n, env);
  CHECK(gammas.size() == 4);
  double total = 0.0;
  CVector rebuilt = CVector::Zero(dim);
  for (std::uint64_t a = 0; a < 2; ++a)
    for (std::uint64_t b = 0; b < 2; ++b) {
      const auto& gamma = gammas[a * 2 + b];
      total += gamma.squaredNorm();
      const CVector psi = qsim::bell_state(n, BitVector::from_index(1, a),
                                           BitVector::from_index(1, b));
      for (Eigen::Index ab = 0; ab < 4; ++ab)
        for (Eigen::Index e = 0; e < env; ++e)
          rebuilt(ab * env + e) += psi(ab) * gamma(e);
    }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((rebuilt - state).cwiseAbs().maxCoeff() < 1e-12);

  // concentrated cases
  const CVector plain = qsim::max_entangled(1);
  CVector embedded = CVector::Zero(4);
  for (Eigen::Index i = 0; i < 4; ++i) embedded(i) = plain(i);
  const auto g0 = qsim::bell_expand(embedded, 1, 1);
  CHECK(std::abs(g0[0](0) - Complex(1, 0)) < 1e-13);
  for (std::size_t i = 1; i < 4; ++i) CHECK(g0[i].norm() < 1e-13);
}

TEST_CASE("ball projector") {
  // full radius covers the whole space
  CHECK(max_abs(qsim::ball_projector(1, 1) - CMatrix::Identity(4, 4)) < 1e-12);

  const CVector psi = qsim::max_entangled(1);
  const CMatrix p0 = qsim::ball_projector(1, 0);
  CHECK(max_abs(p0 - psi * psi.adjoint()) < 1e-13);
  CHECK(std::abs(p0.trace().real() - 1.0) < 1e-13);

  const CMatrix p = qsim::ball_projector(2, 1);
  CHECK(max_abs(p * p - p) < 1e-12);
  const double expected_rank =
      std::pow(static_cast<double>(css::hamming_ball_volume(2, 1)), 2);
  CHECK(std::abs(p.trace().real() - expected_rank) < 1e-12);
}

TEST_CASE("hadamard layer is an involution") {
  for (int m = 1; m <= 4; ++m) {
    const CMatrix h = qsim::hadamard_layer(m);
    CHECK(max_abs(h * h - CMatrix::Identity(h.rows(), h.cols())) < 1e-12);
  }
}

TEST_CASE("closed forms from uniform product terms") {
  for (double t : {0.5, 1.0, 2.0, 8.0}) {
    std::array<double, 8> tp;
    tp.fill(t);
    const auto closed = qsim::prefactor_closed_forms(tp);
    double sum = 0.0;
    for (double c : closed) {
      CHECK(c == doctest::Approx(t / (t + 7.0)).epsilon(1e-13));
      sum += c;
    }
    CHECK(sum == doctest::Approx(8.0 * t / (t + 7.0)).epsilon(1e-13));
  }
}

TEST_CASE("prefactor report on the degenerate empty-layer shape") {
  const qsim::ValidatorSetup setup{BitMatrix::identity(1), 0, 0};
  const auto rep = qsim::commutation_prefactor_report(
      setup, BitVector(), BitVector(), BitVector(), BitVector());
  CHECK(rep.f_ratio == doctest::Approx(1.0).epsilon(1e-13));
  for (double t : rep.t_prime) CHECK(t == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(rep.sum_closed == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(rep.residual < 1e-12);
  CHECK_FALSE(rep.singular_terms);
}

TEST_CASE("prefactor report runs on a two-qubit code") {
  Rng rng(79);
  const BitMatrix l = gf2::sample_matrix(2, true, rng);
  const qsim::ValidatorSetup setup{l, 1, 0};
  const BitVector zero = BitVector::from_bits({0});
  const auto rep =
      qsim::commutation_prefactor_report(setup, zero, zero, zero, zero);
  // generic layers have traceless products, so the closed forms degenerate;
  // that is exactly what the report is for
  CHECK(rep.singular_terms);
  CHECK(std::isfinite(rep.f_ratio));
}

TEST_CASE("agreement report shapes and determinism") {
  const auto singleton = qsim::MatrixEnsemble::singleton(BitMatrix::identity(1));
  const auto rep_a = qsim::isometry_agreement_report(
      0, 0, singleton, qsim::AgreementSector::bit_flip);
  const auto rep_b = qsim::isometry_agreement_report(
      0, 0, singleton, qsim::AgreementSector::bit_flip);
  CHECK(rep_a.min_eigenvalue == rep_b.min_eigenvalue);
  CHECK(rep_a.trace_scalar == rep_b.trace_scalar);
  CHECK(std::isfinite(rep_a.min_eigenvalue));
  CHECK(rep_a.bound_constant ==
        doctest::Approx(security::agreement_bound_constant(1, 0, 0))
            .epsilon(1e-13));

  Rng rng(83);
  std::vector<BitMatrix> members;
  while (members.size() < 2) {
    BitMatrix m = gf2::sample_matrix(2, true, rng);
    bool fresh = true;
    for (const auto& seen : members) fresh = fresh && !(seen == m);
    if (fresh) members.push_back(std::move(m));
  }
  const auto pair_ensemble = qsim::MatrixEnsemble::uniform(std::move(members));
  for (auto sector :
       {qsim::AgreementSector::bit_flip, qsim::AgreementSector::phase_flip}) {
    const auto rep = qsim::isometry_agreement_report(1, 0, pair_ensemble,
                                                     sector);
    CHECK(std::isfinite(rep.min_eigenvalue));
    CHECK(std::isfinite(rep.trace_scalar));
    CHECK(rep.bound_constant ==
          doctest::Approx(security::agreement_bound_constant(2, 1, 0))
              .epsilon(1e-13));
  }

  // regression anchors for the archived desk-scale reports (seed 83 ensemble)
  const auto bit0 = qsim::isometry_agreement_report(
      1, 0, pair_ensemble, qsim::AgreementSector::bit_flip);
  CHECK(bit0.trace_scalar == doctest::Approx(0.0441941738242).epsilon(1e-9));
  const auto bit1 = qsim::isometry_agreement_report(
      1, 1, pair_ensemble, qsim::AgreementSector::bit_flip);
  CHECK(bit1.trace_scalar == doctest::Approx(0.254116499489).epsilon(1e-9));
  const auto phase1 = qsim::isometry_agreement_report(
      1, 1, pair_ensemble, qsim::AgreementSector::phase_flip);
  // the two sectors agree exactly on this shape
  CHECK(phase1.trace_scalar ==
        doctest::Approx(bit1.trace_scalar).epsilon(1e-12));
}
