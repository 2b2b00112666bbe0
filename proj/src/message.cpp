#include "mathgen/message.hpp"

namespace mathgen {

std::string_view role_name(Role role) {
    switch (role) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "user";
}

}  // namespace mathgen
