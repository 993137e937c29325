#pragma once

#include <string>

#include "hbd/problem.hpp"
#include "hbd/problem_io.hpp"

inline hbd::MixedIntegerProgram small_case(const std::string& name) {
    return hbd::load_mip(std::string(HBD_DATA_DIR) + "/" + name + ".json");
}
