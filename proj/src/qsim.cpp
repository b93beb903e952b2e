#include "cssqkd/qsim.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "cssqkd/security.hpp"

namespace cssqkd::qsim {

namespace {

Eigen::Index dim_of(int qubits) {
  return Eigen::Index(1) << qubits;
}

void check_dense(int qubits, int limit = kDenseQubitLimit) {
  if (qubits < 1) throw DimensionError("qubit count must be >= 1");
  if (qubits > limit)
    throw CapacityError("register exceeds the dense qubit limit");
}

/// Offset-diagonal projector sum_z |z, z+delta><z, z+delta| on AB.
CMatrix offset_diagonal(int n, std::uint64_t delta) {
  const Eigen::Index half = dim_of(n);
  CMatrix m = CMatrix::Zero(half * half, half * half);
  for (std::uint64_t z = 0; z < static_cast<std::uint64_t>(half); ++z) {
    const Eigen::Index i =
        static_cast<Eigen::Index>((z << n) | (z ^ delta));
    m(i, i) = 1.0;
  }
  return m;
}

double max_abs(const CMatrix& m) {
  return m.cwiseAbs().maxCoeff();
}

}  // namespace

CVector max_entangled(int n) {
  check_dense(2 * n);
  const Eigen::Index half = dim_of(n);
  CVector psi = CVector::Zero(half * half);
  const double amp = std::pow(2.0, -0.5 * n);
  for (Eigen::Index z = 0; z < half; ++z) psi((z << n) | z) = amp;
  return psi;
}

CVector bell_state(int n, const gf2::BitVector& alpha,
                   const gf2::BitVector& beta) {
  check_dense(2 * n);
  if (alpha.size() != n || beta.size() != n)
    throw DimensionError("bell_state: label length mismatch");
  const std::uint64_t a = alpha.to_index();
  const std::uint64_t b = beta.to_index();
  const Eigen::Index half = dim_of(n);
  CVector psi = CVector::Zero(half * half);
  const double amp = std::pow(2.0, -0.5 * n);
  // (I (x) X^a Z^b) |psi> = 2^{-n/2} sum_z (-1)^{b.z} |z, z+a>
  for (std::uint64_t z = 0; z < static_cast<std::uint64_t>(half); ++z) {
    const double sign = __builtin_parityll(b & z) ? -1.0 : 1.0;
    psi(static_cast<Eigen::Index>((z << n) | (z ^ a))) = sign * amp;
  }
  return psi;
}

CMatrix hadamard_layer(int m) {
  check_dense(m);
  const Eigen::Index dim = dim_of(m);
  const double scale = std::pow(2.0, -0.5 * m);
  CMatrix h(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      h(i, j) = __builtin_parityll(static_cast<std::uint64_t>(i) &
                                   static_cast<std::uint64_t>(j))
                    ? -scale
                    : scale;
  return h;
}

namespace {

void validate_generator_layer(std::span<const pauli::PauliElement> generators,
                              const gf2::BitVector& x) {
  const int n = generators.front().qubits();
  check_dense(n);
  const int m = static_cast<int>(generators.size());
  if (m > n)
    throw ParameterError("pauli_projector: more generators than qubits");
  if (x.size() != m)
    throw DimensionError("pauli_projector: sign vector length mismatch");
  gf2::BitMatrix flattened(m, 2 * n);
  for (int i = 0; i < m; ++i) {
    const auto& g = generators[static_cast<std::size_t>(i)];
    if (g.qubits() != n)
      throw DimensionError("pauli_projector: mixed qubit counts");
    if (!pauli::is_hermitian(g))
      throw ParameterError("pauli_projector: generator is not Hermitian");
    for (int j = i + 1; j < m; ++j) {
      if (pauli::symplectic_product(g,
                                    generators[static_cast<std::size_t>(j)]))
        throw ParameterError("pauli_projector: generators do not commute");
    }
    flattened.set_row(i, pauli::flatten(g));
  }
  if (gf2::rank(flattened) != m)
    throw ParameterError("pauli_projector: generators are dependent");
}

}  // namespace

CMatrix pauli_projector(std::span<const pauli::PauliElement> generators,
                        const gf2::BitVector& x) {
  if (generators.empty()) {
    throw ParameterError("pauli_projector: empty generator list needs a qubit "
                         "count; use the identity matrix directly");
  }
  validate_generator_layer(generators, x);
  const int n = generators.front().qubits();
  const Eigen::Index dim = dim_of(n);
  CMatrix p = CMatrix::Identity(dim, dim);
  for (std::size_t j = 0; j < generators.size(); ++j) {
    const double sign = x.bit(static_cast<int>(j)) ? -1.0 : 1.0;
    const CMatrix g = pauli::to_dense(generators[j]);
    p = 0.5 * (p + sign * (p * g));
  }
  return p;
}

CMatrix projector_composition(std::span<const pauli::PauliElement> outer,
                              const gf2::BitVector& x_outer,
                              std::span<const pauli::PauliElement> inner,
                              const gf2::BitVector& x_inner) {
  if (outer.empty() && inner.empty())
    throw ParameterError("projector_composition: both layers empty");
  if (outer.empty()) return pauli_projector(inner, x_inner);

  validate_generator_layer(outer, x_outer);
  const int n = outer.front().qubits();
  const Eigen::Index dim = dim_of(n);
  const CMatrix q = inner.empty() ? CMatrix(CMatrix::Identity(dim, dim))
                                  : pauli_projector(inner, x_inner);
  if (q.rows() != dim)
    throw DimensionError("projector_composition: layer dimensions differ");
  CMatrix p = CMatrix::Identity(dim, dim);
  for (std::size_t j = 0; j < outer.size(); ++j) {
    const double sign = x_outer.bit(static_cast<int>(j)) ? -1.0 : 1.0;
    const CMatrix g = pauli::to_dense(outer[j]);
    p = 0.5 * (p * q + sign * (p * (g * q)));
  }
  return p;
}

double bell_marginal_residual_z(int n, const gf2::BitVector& alpha) {
  check_dense(2 * n);
  const Eigen::Index dim = dim_of(2 * n);
  CMatrix lhs = CMatrix::Zero(dim, dim);
  for (std::uint64_t b = 0; b < (std::uint64_t(1) << n); ++b) {
    const CVector psi = bell_state(n, alpha, gf2::BitVector::from_index(n, b));
    lhs.noalias() += psi * psi.adjoint();
  }
  return max_abs(lhs - offset_diagonal(n, alpha.to_index()));
}

double bell_marginal_residual_x(int n, const gf2::BitVector& beta) {
  check_dense(2 * n);
  const Eigen::Index dim = dim_of(2 * n);
  CMatrix lhs = CMatrix::Zero(dim, dim);
  for (std::uint64_t a = 0; a < (std::uint64_t(1) << n); ++a) {
    const CVector psi = bell_state(n, gf2::BitVector::from_index(n, a), beta);
    lhs.noalias() += psi * psi.adjoint();
  }
  const CMatrix h = hadamard_layer(2 * n);
  return max_abs(lhs - h * offset_diagonal(n, beta.to_index()) * h);
}

ConstrainedSumResiduals constrained_bell_sum_residual(int n,
                                                      bool constrained) {
  check_dense(2 * n);
  if (n > 4) throw CapacityError("constrained_bell_sum_residual: n <= 4");
  const Eigen::Index dim = dim_of(2 * n);
  const std::uint64_t labels = std::uint64_t(1) << n;

  // The offset-selector operators are diagonal in the computational basis,
  // so the sandwiched side stays a diagonal vector throughout.
  auto offset_diag_vec = [&](std::uint64_t delta) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
    for (std::uint64_t z = 0; z < labels; ++z)
      d(static_cast<Eigen::Index>((z << n) | (z ^ delta))) = 1.0;
    return d;
  };

  CMatrix lhs = CMatrix::Zero(dim, dim);
  Eigen::VectorXd rhs_diag = Eigen::VectorXd::Zero(dim);
  for (std::uint64_t a = 0; a < labels; ++a) {
    const Eigen::VectorXd diag_a = offset_diag_vec(a);
    for (std::uint64_t b = 0; b < labels; ++b) {
      if (constrained && a == b) continue;
      const CVector psi = bell_state(n, gf2::BitVector::from_index(n, a),
                                     gf2::BitVector::from_index(n, b));
      lhs.noalias() += psi * psi.adjoint();
      // sandwich of the fixed-offset diagonal block between the selectors
      // of the combined offset a+b
      rhs_diag.array() +=
          offset_diag_vec(a ^ b).array().square() * diag_a.array();
    }
  }
  const CMatrix h = hadamard_layer(2 * n);
  const CMatrix rhs_z = rhs_diag.cast<Complex>().asDiagonal();
  ConstrainedSumResiduals out;
  out.residual_z = max_abs(lhs - rhs_z);
  out.residual_x = max_abs(lhs - h * rhs_z * h);
  return out;
}

void MatrixEnsemble::validate() const {
  if (members.empty()) throw ParameterError("ensemble: empty");
  double total = 0.0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (members[i].first <= 0.0)
      throw ParameterError("ensemble: masses must be > 0");
    total += members[i].first;
    for (std::size_t j = i + 1; j < members.size(); ++j)
      if (members[i].second == members[j].second)
        throw ParameterError("ensemble: duplicate member");
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ParameterError("ensemble: masses must sum to 1");
}

MatrixEnsemble MatrixEnsemble::singleton(const gf2::BitMatrix& m) {
  return MatrixEnsemble{{{1.0, m}}};
}

MatrixEnsemble MatrixEnsemble::uniform(std::vector<gf2::BitMatrix> ms) {
  MatrixEnsemble e;
  const double mass = 1.0 / static_cast<double>(ms.size());
  for (auto& m : ms) e.members.emplace_back(mass, std::move(m));
  e.validate();
  return e;
}

CVector purification_state(const MatrixEnsemble& ensemble) {
  ensemble.validate();
  const Eigen::Index s = static_cast<Eigen::Index>(ensemble.members.size());
  CVector psi = CVector::Zero(s * s);
  for (Eigen::Index l = 0; l < s; ++l)
    psi(l * s + l) = std::sqrt(ensemble.members[static_cast<std::size_t>(l)].first);
  return psi;
}

CMatrix partial_trace(const CMatrix& op, std::span<const int> dims,
                      std::span<const int> keep) {
  Eigen::Index total = 1;
  for (int d : dims) {
    if (d < 1) throw DimensionError("partial_trace: factor dims must be >= 1");
    total *= d;
  }
  if (op.rows() != total || op.cols() != total)
    throw DimensionError("partial_trace: dims do not factor the operator");
  std::vector<bool> kept(dims.size(), false);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const int f = keep[i];
    if (f < 0 || f >= static_cast<int>(dims.size()) ||
        kept[static_cast<std::size_t>(f)])
      throw DimensionError("partial_trace: bad keep set");
    if (i > 0 && keep[i] <= keep[i - 1])
      throw DimensionError("partial_trace: keep set must ascend");
    kept[static_cast<std::size_t>(f)] = true;
  }

  std::vector<Eigen::Index> stride(dims.size(), 1);
  for (int f = static_cast<int>(dims.size()) - 2; f >= 0; --f)
    stride[static_cast<std::size_t>(f)] =
        stride[static_cast<std::size_t>(f) + 1] * dims[static_cast<std::size_t>(f) + 1];

  Eigen::Index keep_dim = 1, trace_dim = 1;
  std::vector<int> traced;
  for (std::size_t f = 0; f < dims.size(); ++f) {
    if (kept[f])
      keep_dim *= dims[f];
    else {
      trace_dim *= dims[f];
      traced.push_back(static_cast<int>(f));
    }
  }

  auto offset = [&](std::span<const int> factors, Eigen::Index mixed) {
    Eigen::Index off = 0;
    for (int fi = static_cast<int>(factors.size()) - 1; fi >= 0; --fi) {
      const int f = factors[static_cast<std::size_t>(fi)];
      off += (mixed % dims[static_cast<std::size_t>(f)]) *
             stride[static_cast<std::size_t>(f)];
      mixed /= dims[static_cast<std::size_t>(f)];
    }
    return off;
  };

  std::vector<int> keep_list(keep.begin(), keep.end());
  CMatrix out = CMatrix::Zero(keep_dim, keep_dim);
  for (Eigen::Index t = 0; t < trace_dim; ++t) {
    const Eigen::Index toff = offset(traced, t);
    for (Eigen::Index i = 0; i < keep_dim; ++i) {
      const Eigen::Index ioff = offset(keep_list, i) + toff;
      for (Eigen::Index j = 0; j < keep_dim; ++j)
        out(i, j) += op(ioff, offset(keep_list, j) + toff);
    }
  }
  return out;
}

double trace_distance(const CMatrix& rho, const CMatrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols() ||
      rho.rows() != rho.cols())
    throw DimensionError("trace_distance: shape mismatch");
  const CMatrix diff = rho - sigma;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (diff + diff.adjoint()));
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

double fidelity(const CVector& a, const CVector& b) {
  if (a.size() != b.size()) throw DimensionError("fidelity: length mismatch");
  return std::norm(a.dot(b));
}

std::vector<CVector> bell_expand(const CVector& state, int n, int env_dim) {
  check_dense(2 * n);
  const Eigen::Index half = dim_of(n);
  const Eigen::Index ab_dim = half * half;
  if (state.size() != ab_dim * env_dim)
    throw DimensionError("bell_expand: state dimension mismatch");
  const double amp = std::pow(2.0, -0.5 * n);
  std::vector<CVector> gammas;
  gammas.reserve(static_cast<std::size_t>(ab_dim));
  for (std::uint64_t a = 0; a < static_cast<std::uint64_t>(half); ++a) {
    for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(half); ++b) {
      CVector gamma = CVector::Zero(env_dim);
      for (std::uint64_t z = 0; z < static_cast<std::uint64_t>(half); ++z) {
        const double sign = __builtin_parityll(b & z) ? -1.0 : 1.0;
        const Eigen::Index ab = static_cast<Eigen::Index>((z << n) | (z ^ a));
        for (Eigen::Index e = 0; e < env_dim; ++e)
          gamma(e) += sign * amp * state(ab * env_dim + e);
      }
      gammas.push_back(std::move(gamma));
    }
  }
  return gammas;
}

CMatrix ball_projector(int n, int r) {
  if (2 * n > kDenseQubitLimit)
    throw CapacityError("ball_projector: n exceeds dense limit / 2");
  const css::HammingBall ball(n, r);
  const auto members = ball.enumerate();
  const Eigen::Index dim = dim_of(2 * n);
  CMatrix proj = CMatrix::Zero(dim, dim);
  for (const auto& alpha : members) {
    for (const auto& beta : members) {
      const CVector psi = bell_state(n, alpha, beta);
      proj.noalias() += psi * psi.adjoint();
    }
  }
  return proj;
}

// ---------------------------------------------------------------------------
// Claim validators
// ---------------------------------------------------------------------------

std::array<double, 8> prefactor_closed_forms(
    const std::array<double, 8>& t_prime) {
  std::array<double, 8> out{};
  for (int k = 0; k < 8; ++k) {
    double denom = 1.0;
    for (int j = 0; j < 8; ++j) {
      if (j == k) continue;
      denom += 1.0 / t_prime[static_cast<std::size_t>(j)];
    }
    out[static_cast<std::size_t>(k)] = 1.0 / denom;
  }
  return out;
}

void ValidatorSetup::validate() const {
  if (L.rows() != L.cols()) throw ParameterError("validator: L must be square");
  const int nn = L.rows();
  if (k < 0 || 2 * k > nn)
    throw ParameterError("validator: 0 <= 2k <= n required");
  if (r < 0 || r > nn) throw ParameterError("validator: 0 <= r <= n required");
  if (gf2::rank(L) != nn) throw SingularError("validator: L is singular");
}

PrefactorReport commutation_prefactor_report(const ValidatorSetup& setup,
                                             const gf2::BitVector& u,
                                             const gf2::BitVector& u_prime,
                                             const gf2::BitVector& v,
                                             const gf2::BitVector& v_prime) {
  setup.validate();
  const int n = setup.n();
  const int k = setup.k;
  if (n > 2) throw CapacityError("commutation_prefactor_report: n <= 2");
  if (u.size() != k || u_prime.size() != k || v.size() != k ||
      v_prime.size() != k)
    throw DimensionError("commutation_prefactor_report: sign length mismatch");

  std::vector<pauli::PauliElement> gen_x, gen_z;
  if (k > 0) {
    const gf2::BitMatrix l_inv_t = gf2::transpose(gf2::inverse(setup.L));
    for (int i = 0; i < k; ++i) {
      gen_x.push_back(pauli::from_x_mask(setup.L.row(i)));
      gen_z.push_back(pauli::from_z_mask(l_inv_t.row(k + i)));
    }
  }

  PrefactorReport rep;
  const Eigen::Index dense_dim = Eigen::Index(1) << n;
  const CMatrix eye = CMatrix::Identity(dense_dim, dense_dim);
  const CMatrix num =
      k == 0 ? eye
             : CMatrix(projector_composition(gen_x, u, gen_x, u_prime) *
                       projector_composition(gen_z, v, gen_z, v_prime));
  const CMatrix den =
      k == 0 ? eye
             : CMatrix(projector_composition(gen_z, u, gen_z, u_prime) *
                       projector_composition(gen_x, v, gen_x, v_prime));
  const Complex tr_num = num.trace();
  const Complex tr_den = den.trace();
  if (std::abs(tr_den) < 1e-12) {
    rep.singular_denominator = true;
    rep.f_ratio = std::numeric_limits<double>::quiet_NaN();
  } else {
    rep.f_ratio = (tr_num / tr_den).real();
  }

  // Product of each generator layer, kept in normal form so traces are exact.
  pauli::PauliElement prod_x = pauli::identity_element(n);
  pauli::PauliElement prod_z = pauli::identity_element(n);
  for (const auto& g : gen_x) prod_x = pauli::multiply(prod_x, g);
  for (const auto& g : gen_z) prod_z = pauli::multiply(prod_z, g);
  const CMatrix gx = pauli::to_dense(prod_x);
  const CMatrix gz = pauli::to_dense(prod_z);
  const Eigen::Index dim = dense_dim;

  const double su = u.weight() % 2 ? -1.0 : 1.0;
  const double sup = u_prime.weight() % 2 ? -1.0 : 1.0;
  const double sv = v.weight() % 2 ? -1.0 : 1.0;
  const double svp = v_prime.weight() % 2 ? -1.0 : 1.0;
  const double c2 = std::exp2(-2.0 * k);
  const double c3 = std::exp2(-3.0 * k);
  const double c4 = std::exp2(-4.0 * k);

  const std::array<CMatrix, 8> terms = {
      c3 * sv * gz,
      c2 * sv * svp * (gz * gz),
      c3 * su * gx,
      c2 * su * sup * (gx * gx),
      c4 * su * sv * (gx * gz),
      c4 * su * sv * svp * (gx * gz * gz),
      c4 * su * sup * sv * (gx * gx * gz),
      c4 * su * sup * sv * svp * (gx * gx * gz * gz)};
  for (int t = 0; t < 8; ++t) {
    rep.t_prime[static_cast<std::size_t>(t)] =
        terms[static_cast<std::size_t>(t)].trace().real() /
        static_cast<double>(dim);
    if (rep.t_prime[static_cast<std::size_t>(t)] == 0.0)
      rep.singular_terms = true;
  }
  rep.t_closed = prefactor_closed_forms(rep.t_prime);
  rep.sum_closed = 0.0;
  for (double t : rep.t_closed) rep.sum_closed += t;
  rep.residual = std::abs(rep.f_ratio - rep.sum_closed);
  return rep;
}

// --------------------------------------------------------------------------
// Isometry agreement model. One sector acts on AB plus six classical value
// registers; the bit-flip sector works in the computational basis with the
// first parity-check block, the phase-flip sector in the Hadamard-conjugated
// basis with the second block. Values are written reversibly (XOR for
// syndrome slots, modular add for tagged-value slots), which makes every
// branch invertible so adjoints are exact.
// --------------------------------------------------------------------------

namespace {

struct SlotCodec {
  int k = 1;          // syndrome bits
  int n = 1;          // error bits
  int value_dim = 0;  // syndromes plus one abort symbol
  std::array<int, 6> dims{};
  Eigen::Index total = 1;

  SlotCodec(int k_, int n_) : k(k_), n(n_) {
    // All three models write into a common alphabet: a k-bit syndrome plus
    // one abort flag bit, accumulated by XOR so branch cancellation follows
    // the linear structure of the syndromes. Accepted errors are re-encoded
    // through the active check block so ideal, simulator and real values are
    // comparable.
    value_dim = 1 << (k + 1);
    for (int s = 0; s < 4; ++s) dims[static_cast<std::size_t>(s)] = 1 << k;
    dims[4] = value_dim;
    dims[5] = value_dim;
    for (int d : dims) total *= d;
  }

  int tag_syndrome(std::uint64_t s) const { return static_cast<int>(s); }
  int tag_bottom() const { return 1 << k; }

  std::array<int, 6> decode(Eigen::Index y) const {
    std::array<int, 6> vals{};
    for (int s = 5; s >= 0; --s) {
      vals[static_cast<std::size_t>(s)] =
          static_cast<int>(y % dims[static_cast<std::size_t>(s)]);
      y /= dims[static_cast<std::size_t>(s)];
    }
    return vals;
  }

  Eigen::Index encode(const std::array<int, 6>& vals) const {
    Eigen::Index y = 0;
    for (int s = 0; s < 6; ++s)
      y = y * dims[static_cast<std::size_t>(s)] +
          vals[static_cast<std::size_t>(s)];
    return y;
  }

  /// Forward write: every slot accumulates by XOR, so each branch is an
  /// involution on the classical registers and adjoints reuse the same shift.
  Eigen::Index shift(Eigen::Index y, const std::array<int, 6>& writes) const {
    auto vals = decode(y);
    for (int s = 0; s < 6; ++s)
      vals[static_cast<std::size_t>(s)] ^= writes[static_cast<std::size_t>(s)];
    return encode(vals);
  }
};

struct Branch {
  CVector in_vec;   // bra side on AB
  CVector out_vec;  // ket side on AB
  std::array<int, 6> writes{};
  double amp = 1.0;
};

/// Branches of one isometry for one ensemble member (the ideal model is
/// member-independent and reuses one list).
using BranchList = std::vector<Branch>;

struct AgreementSpace {
  int n, k;
  Eigen::Index da;      // AB dimension 4^n
  Eigen::Index s;       // ensemble size
  SlotCodec slots;
  Eigen::Index total;   // da * s^2 * slots.total

  AgreementSpace(int n_, int k_, Eigen::Index s_)
      : n(n_), k(k_), da(dim_of(2 * n_)), s(s_), slots(k_, n_) {
    total = da * s * s * slots.total;
    if (total > (Eigen::Index(1) << 22))
      throw CapacityError("isometry agreement register exceeds 2^22 states");
  }

  Eigen::Index index(Eigen::Index ab, Eigen::Index l, Eigen::Index lp,
                     Eigen::Index y) const {
    return ((ab * s + l) * s + lp) * slots.total + y;
  }
};

CVector basis_vec(Eigen::Index dim, Eigen::Index i) {
  CVector v = CVector::Zero(dim);
  v(i) = 1.0;
  return v;
}

/// Applies sum_l |l><l| (x) branches_l, identity on the copy register.
CVector apply_model(const AgreementSpace& sp,
                    const std::vector<BranchList>& per_member,
                    const CVector& w, bool adjoint) {
  CVector out = CVector::Zero(sp.total);
  CVector slice(sp.da);
  for (Eigen::Index l = 0; l < sp.s; ++l) {
    const BranchList& branches =
        per_member.size() == 1 ? per_member[0]
                               : per_member[static_cast<std::size_t>(l)];
    for (Eigen::Index lp = 0; lp < sp.s; ++lp) {
      for (Eigen::Index y = 0; y < sp.slots.total; ++y) {
        for (const Branch& b : branches) {
          const Eigen::Index ys = sp.slots.shift(y, b.writes);
          if (!adjoint) {
            // out[.., ys] += amp * out_vec * <in_vec, w[.., y]>
            Complex c = 0.0;
            for (Eigen::Index ab = 0; ab < sp.da; ++ab)
              c += std::conj(b.in_vec(ab)) * w(sp.index(ab, l, lp, y));
            if (c == Complex(0.0)) continue;
            c *= b.amp;
            for (Eigen::Index ab = 0; ab < sp.da; ++ab) {
              const Complex o = b.out_vec(ab);
              if (o != Complex(0.0)) out(sp.index(ab, l, lp, ys)) += c * o;
            }
          } else {
            // out[.., y] += amp * in_vec * <out_vec, w[.., ys]>
            Complex c = 0.0;
            for (Eigen::Index ab = 0; ab < sp.da; ++ab)
              c += std::conj(b.out_vec(ab)) * w(sp.index(ab, l, lp, ys));
            if (c == Complex(0.0)) continue;
            c *= b.amp;
            for (Eigen::Index ab = 0; ab < sp.da; ++ab) {
              const Complex i = b.in_vec(ab);
              if (i != Complex(0.0)) out(sp.index(ab, l, lp, y)) += c * i;
            }
          }
        }
      }
    }
  }
  return out;
}

}  // namespace

AgreementReport isometry_agreement_report(int k, int r,
                                          const MatrixEnsemble& ensemble,
                                          AgreementSector sector) {
  ensemble.validate();
  const int n = ensemble.members.front().second.rows();
  ValidatorSetup{ensemble.members.front().second, k, r}.validate();
  if (n > 2) throw CapacityError("isometry_agreement_report: n <= 2 required");
  const Eigen::Index s = static_cast<Eigen::Index>(ensemble.members.size());
  AgreementSpace sp(n, k, s);

  const bool phase = sector == AgreementSector::phase_flip;
  const CMatrix h2n = hadamard_layer(2 * n);
  const css::HammingBall ball(n, r);

  // Real and simulator branches per ensemble member.
  std::vector<BranchList> real_model, sim_model;
  for (Eigen::Index l = 0; l < s; ++l) {
    const gf2::BitMatrix& member =
        ensemble.members[static_cast<std::size_t>(l)].second;
    ValidatorSetup{member, k, r}.validate();
    // bit sector checks with rows of L, phase sector with rows of (L^-1)^T
    std::optional<gf2::BitMatrix> check;
    if (k > 0) {
      check = phase ? gf2::row_slice(gf2::transpose(gf2::inverse(member)), k,
                                     2 * k)
                    : gf2::row_slice(member, 0, k);
    }
    auto syndrome_index = [&](std::uint64_t e) -> int {
      if (!check) return 0;
      return static_cast<int>(
          css::syndrome(*check, gf2::BitVector::from_index(n, e)).to_index());
    };
    auto decode_tag = [&](const std::optional<gf2::BitVector>& s_diff) -> int {
      if (!check) {
        // no checks: unique decoding only when the ball is a single point
        return ball.volume() == 1 ? sp.slots.tag_syndrome(0)
                                  : sp.slots.tag_bottom();
      }
      const auto decoded = css::decode_in_ball(*check, *s_diff, n, r);
      // a successful decode reproduces its own syndrome
      return decoded ? sp.slots.tag_syndrome(s_diff->to_index())
                     : sp.slots.tag_bottom();
    };

    BranchList real, sim;
    const std::uint64_t half = std::uint64_t(1) << n;
    for (std::uint64_t a = 0; a < half; ++a) {
      for (std::uint64_t b = 0; b < half; ++b) {
        const int ua = syndrome_index(a);
        const int ub = syndrome_index(b);
        std::optional<gf2::BitVector> s_diff;
        if (check)
          s_diff = css::syndrome(*check, gf2::BitVector::from_index(n, a)) +
                   css::syndrome(*check, gf2::BitVector::from_index(n, b));
        const int gval = decode_tag(s_diff);

        const Eigen::Index in_ab =
            static_cast<Eigen::Index>((a << n) | b);
        const Eigen::Index out1 =
            static_cast<Eigen::Index>((a << n) | (a ^ b));  // sum into B
        const Eigen::Index out2 =
            static_cast<Eigen::Index>(((a ^ b) << n) | b);  // sum into A

        CVector in_v = basis_vec(sp.da, in_ab);
        CVector out1_v = basis_vec(sp.da, out1);
        CVector out2_v = basis_vec(sp.da, out2);
        if (phase) {
          in_v = h2n * in_v;
          out1_v = h2n * out1_v;
          out2_v = h2n * out2_v;
        }

        // slot payloads: branch kets differ only in the two value slots
        std::array<int, 6> w_real1{ua, ua, ub, ub, 0, 0};
        std::array<int, 6> w_real2 = w_real1;
        std::array<int, 6> w_sim1 = w_real1;
        std::array<int, 6> w_sim2 = w_real1;
        if (!phase) {
          w_real1[4] = gval;
          w_real1[5] = sp.slots.tag_syndrome(static_cast<std::uint64_t>(ub));
          w_real2[4] = sp.slots.tag_syndrome(static_cast<std::uint64_t>(ub));
          w_real2[5] = gval;
        } else {
          w_real1[4] = gval;
          w_real1[5] = sp.slots.tag_syndrome(static_cast<std::uint64_t>(ua));
          w_real2[4] = sp.slots.tag_syndrome(static_cast<std::uint64_t>(ub));
          w_real2[5] = gval;
        }
        w_sim1[4] = sp.slots.tag_syndrome(static_cast<std::uint64_t>(ua));
        w_sim1[5] = sp.slots.tag_syndrome(static_cast<std::uint64_t>(ub));
        w_sim2[4] = sp.slots.tag_syndrome(static_cast<std::uint64_t>(ub));
        w_sim2[5] = sp.slots.tag_syndrome(static_cast<std::uint64_t>(ua));

        const double amp = 1.0 / std::sqrt(2.0);
        real.push_back(Branch{in_v, out1_v, w_real1, amp});
        real.push_back(Branch{in_v, out1_v, w_real2, amp});
        real.push_back(Branch{in_v, out2_v, w_real1, amp});
        real.push_back(Branch{in_v, out2_v, w_real2, amp});
        sim.push_back(Branch{in_v, out1_v, w_sim1, amp});
        sim.push_back(Branch{in_v, out1_v, w_sim2, amp});
        sim.push_back(Branch{in_v, out2_v, w_sim1, amp});
        sim.push_back(Branch{in_v, out2_v, w_sim2, amp});
      }
    }
    real_model.push_back(std::move(real));
    sim_model.push_back(std::move(sim));
  }

  // Ideal branches: member-independent Bell projectors with filtered error
  // labels written into the value slots. The filter re-encodes accepted
  // errors through the first member's check block so the written values are
  // comparable with the other models; rejected errors write the abort symbol.
  std::optional<gf2::BitMatrix> ref_check;
  if (k > 0) {
    const gf2::BitMatrix& first = ensemble.members.front().second;
    ref_check = phase
                    ? gf2::row_slice(gf2::transpose(gf2::inverse(first)), k,
                                     2 * k)
                    : gf2::row_slice(first, 0, k);
  }
  auto filtered = [&](std::uint64_t e) {
    if (!ball.contains(gf2::BitVector::from_index(n, e)))
      return sp.slots.tag_bottom();
    if (!ref_check) return sp.slots.tag_syndrome(0);
    return sp.slots.tag_syndrome(
        css::syndrome(*ref_check, gf2::BitVector::from_index(n, e))
            .to_index());
  };
  std::vector<BranchList> ideal_model(1);
  {
    const std::uint64_t half = std::uint64_t(1) << n;
    const double amp = 1.0 / std::sqrt(2.0);
    for (std::uint64_t a = 0; a < half; ++a) {
      for (std::uint64_t b = 0; b < half; ++b) {
        if (a == b) continue;
        const CVector psi = bell_state(n, gf2::BitVector::from_index(n, a),
                                       gf2::BitVector::from_index(n, b));
        std::array<int, 6> w1{0, 0, 0, 0, 0, 0};
        std::array<int, 6> w2 = w1;
        if (!phase) {
          w1[4] = filtered(a);
          w1[5] = filtered(a ^ b);
          w2[4] = filtered(b);
          w2[5] = filtered(a ^ b);
        } else {
          w1[4] = filtered(a ^ b);
          w1[5] = filtered(a);
          w2[4] = filtered(a ^ b);
          w2[5] = filtered(b);
        }
        ideal_model[0].push_back(Branch{psi, psi, w1, amp});
        ideal_model[0].push_back(Branch{psi, psi, w2, amp});
      }
    }
  }

  // Contract column by column against the purification.
  CMatrix m_ab = CMatrix::Zero(sp.da, sp.da);
  for (Eigen::Index j = 0; j < sp.da; ++j) {
    CVector w = CVector::Zero(sp.total);
    for (Eigen::Index l = 0; l < s; ++l)
      w(sp.index(j, l, l, 0)) =
          std::sqrt(ensemble.members[static_cast<std::size_t>(l)].first);
    w = apply_model(sp, real_model, w, /*adjoint=*/false);
    w = apply_model(sp, sim_model, w, /*adjoint=*/true);
    w = apply_model(sp, ideal_model, w, /*adjoint=*/true);
    for (Eigen::Index i = 0; i < sp.da; ++i) {
      Complex acc = 0.0;
      for (Eigen::Index l = 0; l < s; ++l)
        acc += std::sqrt(
                   ensemble.members[static_cast<std::size_t>(l)].first) *
               w(sp.index(i, l, l, 0));
      m_ab(i, j) = acc;
    }
  }

  AgreementReport rep;
  rep.sector = sector;
  rep.n = n;
  rep.k = k;
  rep.r = r;
  rep.ensemble_size = static_cast<std::size_t>(s);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 *
                                                (m_ab + m_ab.adjoint()));
  rep.min_eigenvalue = solver.eigenvalues().minCoeff();
  rep.trace_scalar = m_ab.trace().real() / static_cast<double>(sp.da);
  rep.bound_constant = security::agreement_bound_constant(n, k, r);
  rep.bound_satisfied_operator = rep.min_eigenvalue >= rep.bound_constant;
  rep.bound_satisfied_scalar = rep.trace_scalar >= rep.bound_constant;
  return rep;
}

}  // namespace cssqkd::qsim
