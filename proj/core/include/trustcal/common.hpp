#pragma once

#include <cstdint>
#include <string_view>

namespace trustcal {

using Points = std::int64_t;

// The human's per-round blind decision about the robot's findings.
enum class TrustAction { Integrate, Discard };

// Trust calibration cue polarity: Repair raises trust, Dampen lowers it.
enum class CueKind { Repair, Dampen };

std::string_view to_string(TrustAction action);
std::string_view to_string(CueKind kind);
TrustAction parse_trust_action(std::string_view text);
CueKind parse_cue_kind(std::string_view text);

// Integrate maps to 1, Discard to 0.
inline double action_value(TrustAction action) {
  return action == TrustAction::Integrate ? 1.0 : 0.0;
}

// splitmix64 finalizer; used to derive independent per-entity seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix_seed(master ^ mix_seed(stream + 1));
}

}  // namespace trustcal
