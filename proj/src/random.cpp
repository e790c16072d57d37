#include "algcon/random.hpp"

namespace algcon {

std::uint64_t mix64(std::uint64_t v) noexcept {
  v += 0x9e3779b97f4a7c15ULL;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
  return v ^ (v >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : key_(mix64(mix64(seed) ^ (stream_id * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL))),
      engine_(key_) {}

RandomStream RandomStream::split(std::uint64_t id) const { return RandomStream(key_, id + 1); }

double RandomStream::normal() { return normal_(engine_); }

}  // namespace algcon
