#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mathgen {

enum class Role { System, User, Assistant };

std::string_view role_name(Role role);

struct Message {
    Role role;
    std::string content;

    bool operator==(const Message&) const = default;
};

}  // namespace mathgen
