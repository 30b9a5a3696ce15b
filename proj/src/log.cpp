#include "eulspec/log.hpp"

#include <atomic>
#include <iostream>

namespace eulspec {
namespace {
std::atomic<bool> g_quiet{false};
}

void set_quiet(bool q) { g_quiet = q; }
bool quiet() { return g_quiet; }

void log_info(const std::string& msg) {
  if (!g_quiet) std::cerr << "[info] " << msg << '\n';
}

void log_warning(const std::string& msg) { std::cerr << "[warn] " << msg << '\n'; }

}  // namespace eulspec
