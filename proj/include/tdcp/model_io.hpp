#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "tdcp/model.hpp"
#include "tdcp/network.hpp"

namespace tdcp {

inline constexpr int kModelFormatVersion = 1;
inline constexpr int kNetworkFormatVersion = 1;

nlohmann::json network_to_json(const Network& net);
Network network_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& j);

std::string model_to_string(const Model& model);
Model model_from_string(const std::string& text);

Model read_model_file(const std::filesystem::path& path);
void write_model_file(const Model& model, const std::filesystem::path& path);

}  // namespace tdcp
