#pragma once

// JSON conversions shared by the serializers. Private to the core library.

#include "json.hpp"

#include "adalogn/tlg.hpp"

namespace adalogn::detail {

using ojson = nlohmann::ordered_json;

ojson tlg_to_json(const Tlg& g);
/// Parses without validating.
Tlg tlg_from_json(const nlohmann::json& doc);
/// Parses and throws TlgError listing every violation.
Tlg tlg_from_json_checked(const nlohmann::json& doc);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace adalogn::detail
