#include "bwf/rng.hpp"

#include <cmath>

#include "bwf/stats.hpp"

namespace bwf {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
  std::uint64_t z = mix64(master + kGolden);
  z = mix64(z ^ (stream + 0xD1B54A32D192ED03ULL));
  z = mix64(z ^ (index + 0x8CB92BA72F3D8DD7ULL));
  return z;
}

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
    : state_(derive_seed(seed, stream, index)) {}

std::uint64_t StreamRng::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double StreamRng::uniform() {
  // 53 mantissa bits mapped to the open interval (0, 1).
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double StreamRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double StreamRng::normal() { return normal_quantile(uniform()); }

double StreamRng::chi_square(int p) {
  // chi^2_p = -2 sum_{i<p/2} log(u_i) + (p odd ? Z^2 : 0); consumes exactly
  // floor(p/2) + (p % 2) uniforms.
  double sum = 0.0;
  for (int i = 0; i < p / 2; ++i) sum += -2.0 * std::log(uniform());
  if (p % 2 == 1) {
    const double z = normal();
    sum += z * z;
  }
  return sum;
}

}  // namespace bwf
