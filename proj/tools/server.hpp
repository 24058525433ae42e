#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "procaware/session.hpp"

namespace procaware::tool {

/// Blocks until the server stops. Returns false when the port cannot be bound.
bool serve_http(SessionManager& sessions, std::string const& host, int port,
                std::optional<std::filesystem::path> const& ui_dir);

}  // namespace procaware::tool
