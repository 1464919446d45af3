#pragma once

// Exact references for the universal integer code and log-binomials.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <random>

#include "graphsim/structure.hpp"

namespace graphsim::oracle {

namespace mp = boost::multiprecision;

// Iterated-log definition evaluated in long double.
inline double universal_reference(unsigned long long n) {
  long double bits = std::log2(2.865064L);
  long double t = std::log2(static_cast<long double>(n));
  while (t > 0) {
    bits += t;
    t = std::log2(t);
  }
  return static_cast<double>(bits);
}

inline double exact_log_binomial(std::int64_t n, std::int64_t k) {
  mp::cpp_int value = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    value *= n - k + i;
    value /= i;
  }
  mp::cpp_bin_float_100 f(value);
  return static_cast<double>(mp::log2(f));
}

inline Shape random_shape(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind_pick(0, 3);
  std::uniform_int_distribution<std::uint64_t> size(1, 60);
  Shape s;
  s.kind = kAllKinds[kind_pick(rng)];
  s.nodes[0] = size(rng);
  if (node_slots(s.kind) == 2) s.nodes[1] = size(rng);
  for (std::size_t j = 0; j < edge_slots(s.kind); ++j) {
    std::uniform_int_distribution<std::uint64_t> e(0, s.edge_max(j));
    s.edges[j] = e(rng);
  }
  return s;
}

}  // namespace graphsim::oracle
