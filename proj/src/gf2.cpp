#include "cssqkd/gf2.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace cssqkd::gf2 {

std::string BitVector::to_hex() const {
  static const char* digits = "0123456789abcdef";
  const int ndigits = (len_ + 3) / 4;
  const int pad = ndigits * 4 - len_;
  std::vector<int> nibbles(static_cast<std::size_t>(ndigits), 0);
  for (int i = 0; i < len_; ++i) {
    if (!bit(i)) continue;
    const int pos = pad + i;
    nibbles[static_cast<std::size_t>(pos / 4)] |= 8 >> (pos % 4);
  }
  std::string s;
  s.reserve(static_cast<std::size_t>(ndigits));
  for (int nib : nibbles) s.push_back(digits[nib]);
  return s;
}

BitVector BitVector::parse_hex(const std::string& hex, int len) {
  const int ndigits = (len + 3) / 4;
  if (static_cast<int>(hex.size()) != ndigits)
    throw ParameterError("hex string has wrong length for " +
                         std::to_string(len) + " bits");
  BitVector v(len);
  const int pad = ndigits * 4 - len;
  for (int d = 0; d < ndigits; ++d) {
    const char c = static_cast<char>(std::tolower(hex[static_cast<std::size_t>(d)]));
    int nib;
    if (c >= '0' && c <= '9')
      nib = c - '0';
    else if (c >= 'a' && c <= 'f')
      nib = c - 'a' + 10;
    else
      throw ParameterError("invalid hex digit");
    for (int b = 0; b < 4; ++b) {
      const int pos = d * 4 + b;
      const bool bitval = (nib >> (3 - b)) & 1;
      if (pos < pad) {
        if (bitval) throw ParameterError("hex value exceeds bit length");
        continue;
      }
      v.set(pos - pad, bitval);
    }
  }
  return v;
}

BitMatrix BitMatrix::from_rows(
    std::initializer_list<std::initializer_list<int>> rows) {
  const int nr = static_cast<int>(rows.size());
  const int nc = nr ? static_cast<int>(rows.begin()->size()) : 0;
  BitMatrix m(nr, nc);
  int r = 0;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != nc)
      throw DimensionError("ragged initializer");
    int c = 0;
    for (int v : row) m.set(r, c++, v != 0);
    ++r;
  }
  return m;
}

BitMatrix matmul(const BitMatrix& a, const BitMatrix& b) {
  if (a.cols() != b.rows())
    throw DimensionError("matmul: inner dimensions differ");
  BitMatrix out(a.rows(), b.cols());
  // xor row m of b into row i of out for every set a(i,m)
  for (int i = 0; i < a.rows(); ++i) {
    for (int m = 0; m < a.cols(); ++m) {
      if (!a.get(i, m)) continue;
      for (std::size_t w = 0; w < out.words_per_row(); ++w)
        out.word(i, static_cast<int>(w)) ^= b.word(m, static_cast<int>(w));
    }
  }
  return out;
}

BitVector mul_vec(const BitMatrix& a, const BitVector& v) {
  if (a.cols() != v.size())
    throw DimensionError("mul_vec: dimensions differ");
  BitVector out(a.rows());
  const auto& vw = v.words();
  for (int i = 0; i < a.rows(); ++i) {
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < a.words_per_row(); ++w)
      acc ^= a.word(i, static_cast<int>(w)) & vw[w];
    out.set(i, __builtin_parityll(acc));
  }
  return out;
}

BitMatrix transpose(const BitMatrix& a) {
  BitMatrix out(a.cols(), a.rows());
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c)
      if (a.get(r, c)) out.set(c, r, 1);
  return out;
}

std::optional<BitMatrix> try_inverse(const BitMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("inverse: matrix not square");
  const int n = a.rows();
  BitMatrix work = a;
  BitMatrix inv = BitMatrix::identity(n);
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r) {
      if (work.get(r, col)) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) return std::nullopt;
    work.swap_rows(col, pivot);
    inv.swap_rows(col, pivot);
    for (int r = 0; r < n; ++r) {
      if (r != col && work.get(r, col)) {
        work.xor_row(r, col);
        inv.xor_row(r, col);
      }
    }
  }
  return inv;
}

BitMatrix inverse(const BitMatrix& a) {
  auto inv = try_inverse(a);
  if (!inv) throw SingularError("matrix is singular over GF(2)");
  return *inv;
}

int rank(const BitMatrix& a) {
  BitMatrix work = a;
  int r = 0;
  for (int col = 0; col < work.cols() && r < work.rows(); ++col) {
    int pivot = -1;
    for (int i = r; i < work.rows(); ++i) {
      if (work.get(i, col)) {
        pivot = i;
        break;
      }
    }
    if (pivot < 0) continue;
    work.swap_rows(r, pivot);
    for (int i = 0; i < work.rows(); ++i)
      if (i != r && work.get(i, col)) work.xor_row(i, r);
    ++r;
  }
  return r;
}

BitMatrix row_slice(const BitMatrix& a, int from, int to) {
  if (from < 0 || to <= from || to > a.rows())
    throw DimensionError("row_slice: range out of bounds");
  BitMatrix out(to - from, a.cols());
  for (int r = from; r < to; ++r)
    for (std::size_t w = 0; w < a.words_per_row(); ++w)
      out.word(r - from, static_cast<int>(w)) = a.word(r, static_cast<int>(w));
  return out;
}

BitMatrix sample_matrix(int n, bool invertible, Rng& rng) {
  if (n < 1) throw DimensionError("sample_matrix: n must be >= 1");
  for (;;) {
    BitMatrix m(n, n);
    for (int r = 0; r < n; ++r) {
      for (std::size_t w = 0; w < m.words_per_row(); ++w)
        m.word(r, static_cast<int>(w)) = rng.next_u64();
      // clear bits past column n-1
      const int tail = n % 64;
      if (tail)
        m.word(r, static_cast<int>(m.words_per_row()) - 1) &=
            (std::uint64_t(1) << tail) - 1;
    }
    if (!invertible || rank(m) == n) return m;
  }
}

double invertible_fraction(int n) {
  double p = 1.0;
  for (int i = 1; i <= n; ++i) p *= 1.0 - std::pow(2.0, -i);
  return p;
}

}  // namespace cssqkd::gf2
