#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "argplan/clock.hpp"

namespace argplan {

enum class ChatRole { System, User, Assistant };

std::string_view role_name(ChatRole role);
std::optional<ChatRole> parse_role(std::string_view name);

struct ChatMessage {
  ChatRole role = ChatRole::User;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

/// One entry of a stored refine conversation.
struct ChatTurn {
  ChatRole role = ChatRole::User;
  std::string content;
  Timestamp timestamp{};

  bool operator==(const ChatTurn&) const = default;
};

}  // namespace argplan
