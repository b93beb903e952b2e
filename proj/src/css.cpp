#include "cssqkd/css.hpp"

#include <cmath>

namespace cssqkd::css {

void ProtocolParams::validate() const {
  if (n < 1) throw ParameterError("params: n must be >= 1");
  if (k < 1) throw ParameterError("params: k must be >= 1");
  if (2 * k >= n) throw ParameterError("params: 2k < n is required");
  if (r < 0 || r > n) throw ParameterError("params: 0 <= r <= n is required");
}

bool ProtocolParams::entropy_window_ok() const {
  if (r == 0) return true;
  return 2.0 * n * binary_entropy(static_cast<double>(r) / n) < 2.0 * k;
}

double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw DomainError("binary_entropy: p outside [0,1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

CssCode build_css(const gf2::BitMatrix& L, const ProtocolParams& params) {
  params.validate();
  if (L.rows() != params.n || L.cols() != params.n)
    throw ParameterError("build_css: L shape does not match params");
  gf2::BitMatrix L_inv_T = gf2::transpose(gf2::inverse(L));
  CssCode code{L,
               L_inv_T,
               gf2::row_slice(L, 0, params.k),
               gf2::row_slice(L_inv_T, params.k, 2 * params.k),
               gf2::row_slice(L_inv_T, 2 * params.k, params.n)};
  return code;
}

CssCode sample_css(const ProtocolParams& params, Rng& rng) {
  params.validate();
  return build_css(gf2::sample_matrix(params.n, /*invertible=*/true, rng),
                   params);
}

HammingBall::HammingBall(int n, int r) : n_(n), r_(r) {
  if (n < 1 || n > 62) throw CapacityError("HammingBall: n must be in [1, 62]");
  if (r < 0 || r > n) throw DomainError("HammingBall: 0 <= r <= n required");
}

std::uint64_t HammingBall::volume() const {
  std::uint64_t total = 0;
  std::uint64_t binom = 1;  // C(n, 0)
  for (int i = 0; i <= r_; ++i) {
    total += binom;
    binom = binom * static_cast<std::uint64_t>(n_ - i) /
            static_cast<std::uint64_t>(i + 1);
  }
  return total;
}

bool HammingBall::contains(const gf2::BitVector& v) const {
  return v.size() == n_ && v.weight() <= r_;
}

std::vector<gf2::BitVector> HammingBall::enumerate(std::uint64_t cap) const {
  const std::uint64_t vol = volume();
  if (vol > cap) throw CapacityError("HammingBall: volume exceeds cap");
  std::vector<gf2::BitVector> out;
  out.reserve(vol);
  for (int w = 0; w <= r_; ++w) {
    if (w == 0) {
      out.push_back(gf2::BitVector(n_));
      continue;
    }
    // Ascending integers of fixed popcount enumerate the weight class in
    // lexicographic bit-string order under the MSB-first index convention.
    std::uint64_t x = (std::uint64_t(1) << w) - 1;
    const std::uint64_t end = std::uint64_t(1) << n_;
    while (x < end) {
      out.push_back(gf2::BitVector::from_index(n_, x));
      const std::uint64_t c = x & (~x + 1);
      const std::uint64_t rr = x + c;
      x = (((rr ^ x) >> 2) / c) | rr;
    }
  }
  return out;
}

gf2::BitVector HammingBall::sample(Rng& rng) const {
  std::uint64_t idx = rng.next_below(volume());
  // Unrank: find the weight class, then the combination within it.
  std::uint64_t binom = 1;
  int w = 0;
  while (idx >= binom) {
    idx -= binom;
    binom = binom * static_cast<std::uint64_t>(n_ - w) /
            static_cast<std::uint64_t>(w + 1);
    ++w;
  }
  gf2::BitVector v(n_);
  // idx-th combination of w positions out of n, lexicographic on the string.
  int remaining = w;
  for (int i = 0; i < n_ && remaining > 0; ++i) {
    // combinations that leave position i clear
    std::uint64_t skip = 1;
    const int left = n_ - i - 1;
    for (int j = 0; j < remaining; ++j)
      skip = skip * static_cast<std::uint64_t>(left - j) /
             static_cast<std::uint64_t>(j + 1);
    if (idx < skip) continue;
    idx -= skip;
    v.set(i, 1);
    --remaining;
  }
  return v;
}

std::uint64_t hamming_ball_volume(int n, int r) {
  return HammingBall(n, r).volume();
}

std::optional<gf2::BitVector> error_filter(const gf2::BitVector& x,
                                           const HammingBall& ball) {
  if (x.size() != ball.n())
    throw DimensionError("error_filter: length mismatch");
  if (ball.contains(x)) return x;
  return std::nullopt;
}

std::optional<gf2::BitVector> error_filter(
    const gf2::BitVector& x, const std::vector<gf2::BitVector>& set) {
  for (const auto& s : set)
    if (s == x) return x;
  return std::nullopt;
}

gf2::BitVector syndrome(const gf2::BitMatrix& P, const gf2::BitVector& e) {
  return gf2::mul_vec(P, e);
}

std::optional<gf2::BitVector> decode_in_ball(const gf2::BitMatrix& P,
                                             const gf2::BitVector& s, int n,
                                             int r, std::uint64_t cap) {
  if (P.cols() != n || P.rows() != s.size())
    throw DimensionError("decode_in_ball: shapes do not conform");
  const HammingBall ball(n, r);
  if (ball.volume() > cap)
    throw CapacityError("decode_in_ball: ball volume exceeds cap");
  std::optional<gf2::BitVector> found;
  for (const auto& e : ball.enumerate(cap)) {
    if (gf2::mul_vec(P, e) != s) continue;
    if (found) return std::nullopt;  // ambiguous
    found = e;
  }
  return found;
}

}  // namespace cssqkd::css
