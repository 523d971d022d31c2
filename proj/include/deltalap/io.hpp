#pragma once

#include <string>
#include <string_view>

namespace deltalap {

// write to a temporary sibling, then rename over the target
void write_file_atomic(const std::string& path, std::string_view bytes);

std::string read_file(const std::string& path);

}  // namespace deltalap
