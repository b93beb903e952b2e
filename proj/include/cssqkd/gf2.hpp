#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "cssqkd/errors.hpp"
#include "cssqkd/rng.hpp"

namespace cssqkd::gf2 {

/// Vector over the two-element field, bit-packed into 64-bit words.
/// Entry i lives in word i/64 at bit i%64. Addition is XOR.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(int len)
      : len_(len), words_((static_cast<std::size_t>(len) + 63) / 64, 0) {
    if (len < 1) throw DimensionError("BitVector length must be >= 1");
  }

  static BitVector zeros(int len) { return BitVector(len); }

  static BitVector basis(int len, int i) {
    BitVector v(len);
    v.set(i, 1);
    return v;
  }

  static BitVector from_bits(std::initializer_list<int> bits) {
    BitVector v(static_cast<int>(bits.size()));
    int i = 0;
    for (int b : bits) v.set(i++, b != 0);
    return v;
  }

  static BitVector random(int len, Rng& rng) {
    BitVector v(len);
    for (auto& w : v.words_) w = rng.next_u64();
    v.mask_tail();
    return v;
  }

  int size() const { return len_; }

  bool bit(int i) const {
    check_index(i);
    return (words_[static_cast<std::size_t>(i) / 64] >> (i % 64)) & 1u;
  }

  void set(int i, bool value) {
    check_index(i);
    const std::uint64_t m = std::uint64_t(1) << (i % 64);
    if (value)
      words_[static_cast<std::size_t>(i) / 64] |= m;
    else
      words_[static_cast<std::size_t>(i) / 64] &= ~m;
  }

  BitVector& operator^=(const BitVector& o) {
    check_same_len(o);
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
    return *this;
  }

  friend BitVector operator+(BitVector a, const BitVector& b) {
    a ^= b;
    return a;
  }

  /// Inner product mod 2.
  int dot(const BitVector& o) const {
    check_same_len(o);
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < words_.size(); ++w)
      acc ^= words_[w] & o.words_[w];
    return __builtin_parityll(acc);
  }

  int weight() const {
    int c = 0;
    for (auto w : words_) c += __builtin_popcountll(w);
    return c;
  }

  bool is_zero() const {
    for (auto w : words_) {
      if (w) return false;
    }
    return true;
  }

  bool operator==(const BitVector& o) const {
    return len_ == o.len_ && words_ == o.words_;
  }
  bool operator!=(const BitVector& o) const { return !(*this == o); }

  /// Basis index with entry 0 as the most significant bit; requires len <= 63.
  std::uint64_t to_index() const {
    if (len_ > 63) throw CapacityError("to_index requires length <= 63");
    std::uint64_t x = 0;
    for (int i = 0; i < len_; ++i) x = (x << 1) | (bit(i) ? 1u : 0u);
    return x;
  }

  static BitVector from_index(int len, std::uint64_t x) {
    BitVector v(len);
    for (int i = 0; i < len; ++i)
      v.set(i, (x >> (len - 1 - i)) & 1u);
    return v;
  }

  BitVector concat(const BitVector& o) const {
    BitVector v(len_ + o.len_);
    for (int i = 0; i < len_; ++i) v.set(i, bit(i));
    for (int i = 0; i < o.len_; ++i) v.set(len_ + i, o.bit(i));
    return v;
  }

  BitVector slice(int from, int to) const {
    if (from < 0 || to <= from || to > len_)
      throw DimensionError("BitVector slice out of range");
    BitVector v(to - from);
    for (int i = from; i < to; ++i) v.set(i - from, bit(i));
    return v;
  }

  std::string to_string() const {
    std::string s(static_cast<std::size_t>(len_), '0');
    for (int i = 0; i < len_; ++i)
      if (bit(i)) s[static_cast<std::size_t>(i)] = '1';
    return s;
  }

  /// Hex encoding of the bit string read left to right as a big-endian
  /// integer, zero-padded to ceil(len/4) digits.
  std::string to_hex() const;
  static BitVector parse_hex(const std::string& hex, int len);

  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  void check_index(int i) const {
    if (i < 0 || i >= len_) throw DimensionError("BitVector index out of range");
  }
  void check_same_len(const BitVector& o) const {
    if (len_ != o.len_) throw DimensionError("BitVector length mismatch");
  }
  void mask_tail() {
    const int tail = len_ % 64;
    if (tail) words_.back() &= (std::uint64_t(1) << tail) - 1;
  }

  int len_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Dense matrix over the two-element field, rows bit-packed. The packing is
/// internal; the contract is entrywise semantics only.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(int rows, int cols)
      : rows_(rows),
        cols_(cols),
        words_per_row_((static_cast<std::size_t>(cols) + 63) / 64),
        words_(static_cast<std::size_t>(rows) * words_per_row_, 0) {
    if (rows < 1 || cols < 1)
      throw DimensionError("BitMatrix shape must be >= 1x1");
  }

  static BitMatrix identity(int n) {
    BitMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
  }

  static BitMatrix zeros(int rows, int cols) { return BitMatrix(rows, cols); }

  static BitMatrix from_rows(std::initializer_list<std::initializer_list<int>> rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  bool get(int r, int c) const {
    check(r, c);
    return (word(r, c / 64) >> (c % 64)) & 1u;
  }

  void set(int r, int c, bool value) {
    check(r, c);
    const std::uint64_t m = std::uint64_t(1) << (c % 64);
    if (value)
      word(r, c / 64) |= m;
    else
      word(r, c / 64) &= ~m;
  }

  BitVector row(int r) const {
    BitVector v(cols_);
    for (int c = 0; c < cols_; ++c) v.set(c, get(r, c));
    return v;
  }

  void set_row(int r, const BitVector& v) {
    if (v.size() != cols_) throw DimensionError("row length mismatch");
    for (int c = 0; c < cols_; ++c) set(r, c, v.bit(c));
  }

  void xor_row(int dst, int src) {
    for (std::size_t w = 0; w < words_per_row_; ++w)
      word(dst, static_cast<int>(w)) ^= word(src, static_cast<int>(w));
  }

  void swap_rows(int a, int b) {
    if (a == b) return;
    for (std::size_t w = 0; w < words_per_row_; ++w)
      std::swap(word(a, static_cast<int>(w)), word(b, static_cast<int>(w)));
  }

  bool operator==(const BitMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && words_ == o.words_;
  }
  bool operator!=(const BitMatrix& o) const { return !(*this == o); }

  bool is_zero() const {
    for (auto w : words_) {
      if (w) return false;
    }
    return true;
  }

  std::uint64_t& word(int r, int w) {
    return words_[static_cast<std::size_t>(r) * words_per_row_ +
                  static_cast<std::size_t>(w)];
  }
  const std::uint64_t& word(int r, int w) const {
    return words_[static_cast<std::size_t>(r) * words_per_row_ +
                  static_cast<std::size_t>(w)];
  }
  std::size_t words_per_row() const { return words_per_row_; }

 private:
  void check(int r, int c) const {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
      throw DimensionError("BitMatrix index out of range");
  }

  int rows_ = 0;
  int cols_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Matrix product over GF(2). Shapes must conform.
BitMatrix matmul(const BitMatrix& a, const BitMatrix& b);

/// Matrix-vector product over GF(2): returns a * v.
BitVector mul_vec(const BitMatrix& a, const BitVector& v);

BitMatrix transpose(const BitMatrix& a);

/// Gauss-Jordan inverse. Pivot on the first nonzero entry of each column,
/// lowest row index first, so the elimination order is reproducible.
/// Returns nullopt when the matrix is singular.
std::optional<BitMatrix> try_inverse(const BitMatrix& a);

/// As try_inverse, but throws SingularError on rank deficiency.
BitMatrix inverse(const BitMatrix& a);

/// Row-echelon pivot count.
int rank(const BitMatrix& a);

/// Rows [from, to) copied in order, all columns.
BitMatrix row_slice(const BitMatrix& a, int from, int to);

/// Entrywise-uniform random matrix; with `invertible` set, rejection-samples
/// until full rank, which is the uniform distribution on invertible matrices.
BitMatrix sample_matrix(int n, bool invertible, Rng& rng);

/// Fraction of n x n matrices over GF(2) that are invertible,
/// prod_{i=1..n} (1 - 2^-i).
double invertible_fraction(int n);

}  // namespace cssqkd::gf2
