#ifndef CREW_SEEDS_HPP_
#define CREW_SEEDS_HPP_

#include <cstdint>
#include <string_view>

namespace crew {

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Derives an independent seed for a named stream (e.g. "instance", "delays")
// and an index within that stream from one master seed.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                          std::uint64_t index = 0);

// 64-bit FNV-1a, used for config hashes.
std::uint64_t fnv1a64(std::string_view text);

}  // namespace crew

#endif  // CREW_SEEDS_HPP_
