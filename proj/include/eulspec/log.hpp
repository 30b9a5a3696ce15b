#pragma once

#include <string>

namespace eulspec {

void set_quiet(bool quiet);
bool quiet();

void log_info(const std::string& msg);
void log_warning(const std::string& msg);

}  // namespace eulspec
