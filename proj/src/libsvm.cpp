#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string_view>

#include "tvnet/errors.hpp"
#include "tvnet/problems.hpp"

namespace tvnet {
namespace {

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_index(std::string_view s, long& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

struct SparseRow {
  std::vector<std::pair<std::size_t, double>> entries;
  int label;
};

}  // namespace

RelabelMap parse_relabel(const std::string& text) {
  RelabelMap map;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    double raw = 0.0, mapped = 0.0;
    if (colon == std::string::npos || !parse_double(std::string_view(item).substr(0, colon), raw) ||
        !parse_double(std::string_view(item).substr(colon + 1), mapped) || (mapped != 1.0 && mapped != -1.0))
      throw ConfigError("relabel entries look like 'raw:+1' or 'raw:-1', got '" + item + "'");
    map[raw] = static_cast<int>(mapped);
  }
  return map;
}

Dataset parse_libsvm(std::istream& in, const LibsvmOptions& opts) {
  std::vector<SparseRow> rows;
  std::size_t max_index = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream tokens(line);
    std::string tok;
    if (!(tokens >> tok)) continue;

    double raw = 0.0;
    if (!parse_double(tok, raw)) throw ParseError(line_no, "bad label '" + tok + "'");
    int label = 0;
    if (opts.relabel != nullptr) {
      auto it = opts.relabel->find(raw);
      if (it == opts.relabel->end()) continue;
      label = it->second;
    } else if (raw == 1.0 || raw == -1.0) {
      label = static_cast<int>(raw);
    } else {
      throw ParseError(line_no, "label '" + tok + "' is not +1/-1 and no relabel map was given");
    }

    SparseRow row{{}, label};
    while (tokens >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) throw ParseError(line_no, "expected idx:val, got '" + tok + "'");
      long idx = 0;
      if (!parse_index(std::string_view(tok).substr(0, colon), idx) || idx <= 0)
        throw ParseError(line_no, "feature index must be a positive integer, got '" + tok.substr(0, colon) + "'");
      double val = 0.0;
      if (!parse_double(std::string_view(tok).substr(colon + 1), val) || !std::isfinite(val))
        throw ParseError(line_no, "bad feature value in '" + tok + "'");
      row.entries.emplace_back(static_cast<std::size_t>(idx), val);
      max_index = std::max(max_index, static_cast<std::size_t>(idx));
    }
    rows.push_back(std::move(row));
  }

  Dataset data;
  data.dim = std::max(max_index, opts.min_dim);
  data.features.assign(rows.size() * data.dim, 0.0);
  data.labels.reserve(rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (auto [idx, val] : rows[j].entries) data.features[j * data.dim + idx - 1] = val;
    data.labels.push_back(rows[j].label);
  }
  return data;
}

Dataset load_libsvm(const std::string& path, const LibsvmOptions& opts) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset '" + path + "'");
  return parse_libsvm(in, opts);
}

}  // namespace tvnet
