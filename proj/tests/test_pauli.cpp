#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <vector>

#include "cssqkd/pauli.hpp"

using namespace cssqkd;
using gf2::BitVector;
using pauli::PauliElement;

namespace {

// Reference matrices and kron product, independent of pauli::to_dense.
using Mat = std::vector<std::vector<Complex>>;

const Mat kI{{1, 0}, {0, 1}};
const Mat kX{{0, 1}, {1, 0}};
const Mat kZ{{1, 0}, {0, -1}};

Mat mul(const Mat& a, const Mat& b) {
  const std::size_t n = a.size();
  Mat c(n, std::vector<Complex>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

Mat kron(const Mat& a, const Mat& b) {
  const std::size_t na = a.size(), nb = b.size();
  Mat c(na * nb, std::vector<Complex>(na * nb, 0.0));
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j)
      for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t l = 0; l < nb; ++l)
          c[i * nb + k][j * nb + l] = a[i][j] * b[k][l];
  return c;
}

Mat scale(Complex s, Mat a) {
  for (auto& row : a)
    for (auto& v : row) v *= s;
  return a;
}

// Reference dense form built qubit by qubit, leftmost factor first.
Mat reference_dense(const PauliElement& g) {
  static const Complex phases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  Mat acc{{1}};
  for (int q = 0; q < g.qubits(); ++q) {
    Mat factor = kI;
    if (g.x_mask.bit(q) && g.z_mask.bit(q))
      factor = mul(kX, kZ);
    else if (g.x_mask.bit(q))
      factor = kX;
    else if (g.z_mask.bit(q))
      factor = kZ;
    acc = kron(acc, factor);
  }
  return scale(phases[g.phase_exp % 4], acc);
}

double max_diff(const CMatrix& a, const Mat& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      worst = std::max(worst,
                       std::abs(a(i, j) - b[static_cast<std::size_t>(i)]
                                           [static_cast<std::size_t>(j)]));
  return worst;
}

PauliElement element(int n, std::uint64_t u, std::uint64_t v, int phase = 0) {
  return PauliElement{phase, BitVector::from_index(n, u),
                      BitVector::from_index(n, v)};
}

}  // namespace

TEST_CASE("flatten") {
  CHECK(pauli::flatten(element(1, 1, 0)) == BitVector::from_bits({1, 0}));
  CHECK(pauli::flatten(pauli::identity_element(1)) ==
        BitVector::from_bits({0, 0}));
  CHECK(pauli::flatten(element(1, 1, 1)) == BitVector::from_bits({1, 1}));
}

TEST_CASE("dense single-qubit forms") {
  CHECK(max_diff(pauli::to_dense(element(1, 1, 0)), kX) == 0.0);
  CHECK(max_diff(pauli::to_dense(element(1, 0, 1)), kZ) == 0.0);
  // i X Z is the Hermitian Y factor
  const CMatrix y = pauli::to_dense(element(1, 1, 1, 1));
  CHECK(std::abs(y(0, 1) - Complex(0, -1)) == 0.0);
  CHECK(std::abs(y(1, 0) - Complex(0, 1)) == 0.0);
  CHECK(std::abs(y(0, 0)) == 0.0);
}

TEST_CASE("symplectic product matches dense commutation") {
  const PauliElement x = element(1, 1, 0);
  const PauliElement z = element(1, 0, 1);
  CHECK(pauli::symplectic_product(x, z) == 1);
  CHECK(pauli::symplectic_product(x, x) == 0);

  // X(x)X vs Z(x)Z commute
  const PauliElement xx = element(2, 0b11, 0);
  const PauliElement zz = element(2, 0, 0b11);
  CHECK(pauli::symplectic_product(xx, zz) == 0);
  const Mat ref_xx = kron(kX, kX);
  const Mat ref_zz = kron(kZ, kZ);
  const Mat ab = mul(ref_xx, ref_zz);
  const Mat ba = mul(ref_zz, ref_xx);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(std::abs(ab[i][j] - ba[i][j]) == 0.0);
}

TEST_CASE("symplectic form matrix pairs the two halves") {
  const pauli::SymplecticForm form{3};
  const gf2::BitMatrix s = form.matrix();
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const PauliElement g = element(3, rng.next_below(8), rng.next_below(8));
    const PauliElement h = element(3, rng.next_below(8), rng.next_below(8));
    const BitVector fg = pauli::flatten(g);
    const BitVector fh = pauli::flatten(h);
    CHECK(pauli::symplectic_product(g, h) == fg.dot(gf2::mul_vec(s, fh)));
  }
}

TEST_CASE("multiply") {
  const PauliElement x = element(1, 1, 0);
  const PauliElement z = element(1, 0, 1);
  const PauliElement xx = pauli::multiply(x, x);
  CHECK(xx == pauli::identity_element(1));

  const PauliElement xz = pauli::multiply(x, z);
  const PauliElement zx = pauli::multiply(z, x);
  CHECK(xz.x_mask == zx.x_mask);
  CHECK(xz.z_mask == zx.z_mask);
  CHECK((zx.phase_exp - xz.phase_exp + 4) % 4 == 2);  // differ by -1

  // X.Z = [[0,-1],[1,0]]
  const CMatrix d = pauli::to_dense(xz);
  CHECK(std::abs(d(0, 1) - Complex(-1, 0)) == 0.0);
  CHECK(std::abs(d(1, 0) - Complex(1, 0)) == 0.0);
}

TEST_CASE("dense product identity, exhaustive masks at n <= 2") {
  Rng rng(5);
  for (int n = 1; n <= 2; ++n) {
    const std::uint64_t lim = std::uint64_t(1) << n;
    for (std::uint64_t u1 = 0; u1 < lim; ++u1)
      for (std::uint64_t v1 = 0; v1 < lim; ++v1)
        for (std::uint64_t u2 = 0; u2 < lim; ++u2)
          for (std::uint64_t v2 = 0; v2 < lim; ++v2) {
            const int p1 = static_cast<int>(rng.next_below(4));
            const int p2 = static_cast<int>(rng.next_below(4));
            const PauliElement g = element(n, u1, v1, p1);
            const PauliElement h = element(n, u2, v2, p2);
            const CMatrix lhs = pauli::to_dense(pauli::multiply(g, h));
            const CMatrix rhs = pauli::to_dense(g) * pauli::to_dense(h);
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
          }
  }
}

TEST_CASE("commutation sign against dense products, n = 3 sample") {
  Rng rng(9);
  for (int t = 0; t < 200; ++t) {
    const PauliElement g = element(3, rng.next_below(8), rng.next_below(8),
                                   static_cast<int>(rng.next_below(4)));
    const PauliElement h = element(3, rng.next_below(8), rng.next_below(8),
                                   static_cast<int>(rng.next_below(4)));
    const double sign = pauli::symplectic_product(g, h) ? -1.0 : 1.0;
    const CMatrix gh = pauli::to_dense(g) * pauli::to_dense(h);
    const CMatrix hg = pauli::to_dense(h) * pauli::to_dense(g);
    CHECK((gh - sign * hg).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("flatten is a homomorphism") {
  Rng rng(21);
  for (int t = 0; t < 100; ++t) {
    const PauliElement g = element(4, rng.next_below(16), rng.next_below(16));
    const PauliElement h = element(4, rng.next_below(16), rng.next_below(16));
    CHECK(pauli::flatten(pauli::multiply(g, h)) ==
          pauli::flatten(g) + pauli::flatten(h));
  }
}

TEST_CASE("dense matches the reference construction") {
  Rng rng(23);
  for (int n = 1; n <= 3; ++n) {
    for (int t = 0; t < 60; ++t) {
      const std::uint64_t lim = std::uint64_t(1) << n;
      PauliElement g = element(n, rng.next_below(lim), rng.next_below(lim),
                               static_cast<int>(rng.next_below(4)));
      // the reference multiplies X and Z per qubit without phase tracking,
      // which matches the normal form exactly
      CHECK(max_diff(pauli::to_dense(g), reference_dense(g)) < 1e-15);
    }
  }
}

TEST_CASE("hermitian predicate") {
  CHECK(pauli::is_hermitian(element(1, 1, 0)));
  CHECK(pauli::is_hermitian(element(1, 0, 1)));
  CHECK_FALSE(pauli::is_hermitian(element(1, 1, 1)));      // XZ is not
  CHECK(pauli::is_hermitian(element(1, 1, 1, 1)));         // iXZ is
  CHECK(pauli::is_hermitian(pauli::hermitian_element(
      BitVector::from_bits({1, 1}), BitVector::from_bits({1, 0}))));
}

TEST_CASE("capacity guard") {
  CHECK_THROWS_AS(pauli::to_dense(element(13, 0, 0)), CapacityError);
}
