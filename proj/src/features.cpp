#include "ucca/features.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ucca/io.hpp"

namespace ucca {

namespace {

double parse_double(const std::string& field, const std::string& where) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || end != field.data() + field.size()) {
    throw FormatError(where + ": '" + field + "' is not a number");
  }
  return v;
}

}  // namespace

PretrainedTable load_pretrained(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open pretrained embeddings '" + path + "'");
  PretrainedTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    std::vector<std::string> rest;
    for (std::string f; fields >> f;) rest.push_back(f);
    const std::string where = path + ":" + std::to_string(line_no);
    if (line_no == 1 && rest.size() == 1) continue;  // "count dim" header
    if (rest.empty()) throw FormatError(where + ": word without a vector");
    if (table.dim == 0) {
      table.dim = static_cast<int>(rest.size());
      table.vectors.emplace_back(static_cast<std::size_t>(table.dim), 0.0);
    }
    if (static_cast<int>(rest.size()) != table.dim) {
      throw FormatError(where + ": expected " + std::to_string(table.dim) + " values, found " +
                        std::to_string(rest.size()));
    }
    if (table.words.contains(word)) continue;  // first occurrence wins
    nn::Vec v;
    for (const auto& f : rest) v.push_back(parse_double(f, where));
    table.words.add(word);
    table.vectors.push_back(std::move(v));
  }
  if (table.dim == 0) throw FormatError("pretrained embeddings '" + path + "' contain no vectors");
  return table;
}

std::vector<std::vector<nn::Vec>> read_external_features(const std::string& path, int* dim) {
  std::vector<std::vector<nn::Vec>> out;
  int width = -1;
  int line_no = 0;
  for (const std::string& line : read_lines(path)) {
    ++line_no;
    const std::string where = path + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("vectors") || !j["vectors"].is_array()) {
      throw FormatError(where + ": expected {\"vectors\": [[...], ...]}");
    }
    std::vector<nn::Vec> sentence;
    for (const auto& v : j["vectors"]) {
      if (!v.is_array()) throw FormatError(where + ": every vector must be an array");
      nn::Vec row;
      for (const auto& x : v) {
        if (!x.is_number()) throw FormatError(where + ": vector entries must be numbers");
        row.push_back(x.get<double>());
      }
      if (width < 0) width = static_cast<int>(row.size());
      if (static_cast<int>(row.size()) != width) {
        throw FormatError(where + ": vector width " + std::to_string(row.size()) + " differs from " +
                          std::to_string(width));
      }
      sentence.push_back(std::move(row));
    }
    out.push_back(std::move(sentence));
  }
  if (dim) *dim = std::max(width, 0);
  return out;
}

}  // namespace ucca
