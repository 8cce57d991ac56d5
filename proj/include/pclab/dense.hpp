// Dense right-multiplication tables for small pc groups: elements are
// mixed-radix indices, one lookup per generator multiplication. Built once
// per group from the collector and used by the search loops.
#pragma once

#include "pclab/presentation.hpp"

namespace pclab {

class DenseGroup {
 public:
  explicit DenseGroup(const PcPresentation& P) : P_(&P), n_(P.ngens), p_(P.prime) {
    order_ = 1;
    for (int k = 0; k < n_; ++k) {
      if (order_ > (long long)(1 << 26))
        throw PresentationError("group too large for dense tables");
      order_ *= p_;
    }
    pw_.assign((size_t)n_ + 1, 1);
    for (int k = n_ - 1; k >= 0; --k) pw_[k] = pw_[k + 1] * p_;
    mul_gen_.assign((size_t)order_ * std::max(1, n_), 0);
    Vec v((size_t)n_, 0);
    for (long long u = 0; u < order_; ++u) {
      decode(u, v);
      for (int g = 0; g < n_; ++g) {
        Vec w = v;
        mul_syllable(P, w, g, 1);
        mul_gen_[(size_t)u * n_ + g] = (int32_t)encode(w);
      }
    }
    inv_.assign((size_t)order_, 0);
    for (long long u = 0; u < order_; ++u) {
      decode(u, v);
      inv_[(size_t)u] = (int32_t)encode(inverse(P, v));
    }
  }

  long long order() const { return order_; }
  int ngens() const { return n_; }
  int prime() const { return p_; }

  long long encode(const Vec& v) const {
    long long idx = 0;
    for (int k = 0; k < n_; ++k) idx += (long long)v[k] * pw_[k + 1];
    return idx;
  }
  void decode(long long idx, Vec& v) const {
    for (int k = 0; k < n_; ++k) {
      v[k] = (uint8_t)(idx / pw_[k + 1]);
      idx %= pw_[k + 1];
    }
  }
  Vec decode(long long idx) const {
    Vec v((size_t)n_, 0);
    decode(idx, v);
    return v;
  }

  long long mul_gen(long long u, int g) const { return mul_gen_[(size_t)u * n_ + g]; }
  long long mul_gen_pow(long long u, int g, int e) const {
    for (int t = 0; t < e; ++t) u = mul_gen(u, g);
    return u;
  }
  long long mul(long long u, long long v) const {
    for (int k = 0; k < n_ && v; ++k) {
      long long e = v / pw_[k + 1];
      v %= pw_[k + 1];
      for (long long t = 0; t < e; ++t) u = mul_gen(u, k);
    }
    return u;
  }
  long long inv(long long u) const { return inv_[(size_t)u]; }
  long long pow_p(long long u) const {
    long long r = u;
    for (int t = 1; t < p_; ++t) r = mul(r, u);
    return r;
  }
  long long comm(long long a, long long b) const {
    return mul(mul(mul(inv(a), inv(b)), a), b);
  }
  // product of the relation vector under images (ascending generators)
  long long eval_under(const Vec& rhs, const std::vector<long long>& img) const {
    long long r = 0;
    for (size_t k = 0; k < rhs.size(); ++k)
      for (int t = 0; t < (int)rhs[k]; ++t) r = mul(r, img[k]);
    return r;
  }

 private:
  const PcPresentation* P_;
  int n_, p_;
  long long order_ = 1;
  std::vector<long long> pw_;
  std::vector<int32_t> mul_gen_;
  std::vector<int32_t> inv_;
};

}  // namespace pclab
