#pragma once

#include <cstdint>
#include <random>

namespace ssc {

/// SplitMix64 finalizer; used to decorrelate (seed, stream) pairs.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Engine for trial `stream` of an experiment seeded with `seed`. Every
/// stochastic routine derives its engine this way so that results do not
/// depend on scheduling.
inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
  return std::mt19937_64{mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL))};
}

}  // namespace ssc
