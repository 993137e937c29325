#pragma once

#include <filesystem>

#include "json.hpp"
#include "hbd/problem.hpp"

namespace hbd {

MixedIntegerProgram mip_from_json(const nlohmann::json& j);
nlohmann::json mip_to_json(const MixedIntegerProgram& mip);

MixedIntegerProgram load_mip(const std::filesystem::path& path);
void save_mip(const std::filesystem::path& path, const MixedIntegerProgram& mip);

nlohmann::json assignment_to_json(const Assignment& a);

}  // namespace hbd
