#include "cogbench/rng.hpp"

namespace cogbench {

std::uint64_t hash64(std::initializer_list<std::uint64_t> words) noexcept {
  std::uint64_t h = 0x6A09E667F3BCC908ULL;
  for (std::uint64_t w : words) h = mix64(h ^ w) + kGolden;
  return h;
}

RepStreams rep_streams(std::uint64_t master_seed, int radio_id, int scenario_id,
                       int rep) noexcept {
  const Stream base(hash64({master_seed, static_cast<std::uint64_t>(radio_id),
                            static_cast<std::uint64_t>(scenario_id),
                            static_cast<std::uint64_t>(rep)}));
  return {base.derive(static_cast<std::uint64_t>(StreamTag::kEnvironment)),
          base.derive(static_cast<std::uint64_t>(StreamTag::kPolicy)),
          base.derive(static_cast<std::uint64_t>(StreamTag::kRadio))};
}

}  // namespace cogbench
