#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cssqkd/gf2.hpp"

namespace cssqkd::css {

inline constexpr std::uint64_t kDefaultBallCap = std::uint64_t(1) << 24;

/// Code parameters: n data qubits, k syndrome bits per basis, error radius r.
/// Key length is n - 2k.
struct ProtocolParams {
  int n = 1;
  int k = 0;
  int r = 0;

  /// Shape constraints: n >= 1, k >= 1, 2k < n, 0 <= r <= n.
  void validate() const;

  /// True when 2 n h(r/n) < 2k (the window under which the closed-form
  /// security levels are meaningful; r = 0 satisfies it vacuously).
  bool entropy_window_ok() const;

  int key_length() const { return n - 2 * k; }
};

/// -p log2 p - (1-p) log2 (1-p), with the limit value 0 at p in {0, 1}.
double binary_entropy(double p);

/// Parity-check and key-extraction rows derived from an invertible matrix:
/// the first k rows of L check bit flips, rows [k, 2k) of (L^-1)^T check
/// phase flips, and rows [2k, n) of (L^-1)^T extract the key. Row blocks of
/// L and (L^-1)^T are mutually orthogonal, which yields the CSS condition
/// P1 * P2^T = 0 and P1 * M^T = 0.
struct CssCode {
  gf2::BitMatrix L;
  gf2::BitMatrix L_inv_T;
  gf2::BitMatrix P1;             // k x n
  gf2::BitMatrix P2;             // k x n
  gf2::BitMatrix key_extractor;  // (n - 2k) x n
};

CssCode build_css(const gf2::BitMatrix& L, const ProtocolParams& params);

/// Convenience: sample an invertible L and build the code.
CssCode sample_css(const ProtocolParams& params, Rng& rng);

/// Bit-flip and phase-flip labels of one channel use.
struct ErrorPattern {
  gf2::BitVector alpha;  // bit flips
  gf2::BitVector beta;   // phase flips
};

/// All length-n vectors of Hamming weight <= r. Enumeration order is weight,
/// then lexicographic on the bit string.
class HammingBall {
 public:
  HammingBall(int n, int r);

  int n() const { return n_; }
  int r() const { return r_; }

  /// sum_{i=0..r} C(n, i); n <= 62 so the count fits a 64-bit integer.
  std::uint64_t volume() const;

  bool contains(const gf2::BitVector& v) const;

  /// Materializes the ball. Throws CapacityError beyond `cap`.
  std::vector<gf2::BitVector> enumerate(std::uint64_t cap = kDefaultBallCap) const;

  /// Uniform sample by unranking a uniform index.
  gf2::BitVector sample(Rng& rng) const;

 private:
  int n_;
  int r_;
};

std::uint64_t hamming_ball_volume(int n, int r);

/// Membership filter onto an accepted-error set: the value itself when it
/// lies in the ball, otherwise the distinguished abort value (nullopt).
std::optional<gf2::BitVector> error_filter(const gf2::BitVector& x,
                                           const HammingBall& ball);
std::optional<gf2::BitVector> error_filter(
    const gf2::BitVector& x, const std::vector<gf2::BitVector>& set);

/// P * e over GF(2).
gf2::BitVector syndrome(const gf2::BitMatrix& P, const gf2::BitVector& e);

/// Unique decoding inside the radius-r ball: returns the single ball member
/// whose syndrome matches `s`, or nullopt when no member or more than one
/// matches.
std::optional<gf2::BitVector> decode_in_ball(
    const gf2::BitMatrix& P, const gf2::BitVector& s, int n, int r,
    std::uint64_t cap = kDefaultBallCap);

}  // namespace cssqkd::css
