#include "pairjudge/types.hpp"

#include <string_view>

namespace pairjudge {

const char* to_string(FinishState state) {
    switch (state) {
        case FinishState::Stopped: return "stopped";
        case FinishState::Truncated: return "truncated";
        case FinishState::Unknown: return "unknown";
    }
    return "unknown";
}

std::optional<FinishState> finish_state_from_string(std::string_view name) {
    if (name == "stopped" || name == "stop") return FinishState::Stopped;
    if (name == "truncated" || name == "length") return FinishState::Truncated;
    if (name == "unknown") return FinishState::Unknown;
    return std::nullopt;
}

}  // namespace pairjudge
