#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nilfourier/algebra.hpp"
#include "nilfourier/phi.hpp"

namespace nilfourier::testing {

/// Independent BCH oracle: the Dynkin series by explicit word enumeration,
/// log(e^a e^b) = sum_{k>=1} (-1)^{k-1}/k sum_{(p_i,q_i) != (0,0)}
///   [a^(p_1) b^(q_1) ... a^(p_k) b^(q_k)] / ((sum_i p_i+q_i) prod_i p_i! q_i!)
/// with right-nested brackets. Words of weight above the nilpotency step
/// vanish, so truncating the enumeration there is exact up to roundoff.
inline Vec dynkin_bch(const StructureConstants& sc, const Vec& a, const Vec& b) {
  const int n = sc.dim();
  const int maxw = sc.step();
  Vec total = Vec::Zero(n);

  std::vector<bool> word;  // true = letter a, false = letter b
  Vec tmp(n), acc(n);
  auto word_bracket = [&]() -> const Vec& {
    int len = int(word.size());
    acc = word[size_t(len - 1)] ? a : b;
    for (int i = len - 2; i >= 0; --i) {
      sc.bracket(word[size_t(i)] ? a : b, acc, tmp);
      acc.swap(tmp);
    }
    return acc;
  };

  struct Block {
    int p, q;
  };
  std::vector<Block> blocks;
  const double factorial[9] = {1, 1, 2, 6, 24, 120, 720, 5040, 40320};

  std::function<void(int)> walk = [&](int used) {
    if (!blocks.empty()) {
      int k = int(blocks.size());
      double denom = double(used) * double(k);
      for (const Block& bl : blocks) denom *= factorial[bl.p] * factorial[bl.q];
      double coeff = ((k % 2) ? 1.0 : -1.0) / denom;
      word.clear();
      for (const Block& bl : blocks) {
        for (int i = 0; i < bl.p; ++i) word.push_back(true);
        for (int i = 0; i < bl.q; ++i) word.push_back(false);
      }
      int len = int(word.size());
      // right-nested brackets ending in [x, x] vanish identically
      bool trivially_zero = len >= 2 && word[size_t(len - 1)] == word[size_t(len - 2)];
      if (!trivially_zero) {
        if (len == 1)
          total += coeff * (word[0] ? a : b);
        else
          total += coeff * word_bracket();
      }
    }
    for (int p = 0; used + p <= maxw; ++p)
      for (int q = (p == 0) ? 1 : 0; used + p + q <= maxw; ++q) {
        blocks.push_back({p, q});
        walk(used + p + q);
        blocks.pop_back();
      }
  };
  walk(0);
  return total;
}

/// Deterministic random vector in [-hw, hw]^n from the counter RNG.
inline Vec rand_vec(int n, std::uint64_t seed, std::uint64_t idx, double hw = 2.0) {
  Vec v(n);
  for (int d = 0; d < n; ++d)
    v[d] = rng_uniform(seed, 0x7E57ull, idx * 64 + std::uint64_t(d), -hw, hw);
  return v;
}

}  // namespace nilfourier::testing
