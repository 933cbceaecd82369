#include <charconv>
#include <fstream>

#include "cli/commands.hpp"
#include "tvnet/errors.hpp"

namespace tvnet::cli {

std::vector<std::pair<std::string, std::string>> read_header_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view body(line);
    if (body.starts_with("# "))
      body.remove_prefix(2);
    else if (body.starts_with('#'))
      body.remove_prefix(1);
    const auto eq = body.find('=');
    // CSV rows carry no '='; a key never contains ','.
    if (eq == std::string_view::npos || eq == 0 || body.substr(0, eq).find(',') != std::string_view::npos) continue;
    entries.emplace_back(std::string(body.substr(0, eq)), std::string(body.substr(eq + 1)));
  }
  return entries;
}

std::string shortest(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace tvnet::cli
