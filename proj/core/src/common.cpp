#include "trustcal/common.hpp"

#include <string>

#include "trustcal/errors.hpp"

namespace trustcal {

std::string_view to_string(TrustAction action) {
  return action == TrustAction::Integrate ? "integrate" : "discard";
}

std::string_view to_string(CueKind kind) { return kind == CueKind::Repair ? "repair" : "dampen"; }

TrustAction parse_trust_action(std::string_view text) {
  if (text == "integrate" || text == "Integrate") return TrustAction::Integrate;
  if (text == "discard" || text == "Discard") return TrustAction::Discard;
  throw DomainError("unknown trust action: " + std::string(text));
}

CueKind parse_cue_kind(std::string_view text) {
  if (text == "repair" || text == "Repair") return CueKind::Repair;
  if (text == "dampen" || text == "Dampen") return CueKind::Dampen;
  throw DomainError("unknown cue kind: " + std::string(text));
}

}  // namespace trustcal
