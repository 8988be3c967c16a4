#pragma once

#include <cstdint>
#include <random>

namespace gssl {

/// Portable seeded generator.
///
/// Built on std::mt19937_64, whose output sequence is fixed by the C++ standard.
/// The distributions are implemented here (the standard library's are not
/// portable across implementations):
///   uniform()  = (next >> 11) * 2^-53
///   normal()   = Box-Muller, cos branch only: sqrt(-2 ln(1 - u1)) cos(2 pi u2)
///   below(n)   = rejection sampling on the top bits
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  double normal();
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace gssl
