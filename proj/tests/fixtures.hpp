#pragma once

#include "hkreduce/errors.hpp"
#include "hkreduce/quiver.hpp"
#include "hkreduce/reduction.hpp"

#include <random>

namespace fixtures {

using namespace hkreduce;

inline QuiverProblem jordan(cplx zeta_C = 1.0, int v = 1, int w = 1) {
  return QuiverProblem({1, {{1, 1}}}, {{v}, {w}}, {{0.5}, {zeta_C}});
}

inline QuiverProblem a1(cplx zeta_C) { return QuiverProblem({1, {}}, {{1}, {2}}, {{0.5}, {zeta_C}}); }

inline Vec solved(const QuiverProblem& p, std::uint64_t seed = 7) {
  std::mt19937_64 rng(seed);
  return solve_moment(p, p.pack(p.random_point(rng))).x;
}

inline Vec random_vec(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vec v(n);
  for (int k = 0; k < n; ++k) v(k) = normal(rng);
  return v;
}

inline Mat random_antisymmetric(int n, std::mt19937_64& rng) {
  Mat m(n, n);
  std::normal_distribution<double> normal;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = normal(rng);
  return m - m.transpose();
}

}  // namespace fixtures
