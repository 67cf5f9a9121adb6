#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ocecal/error.hpp"
#include "ocecal/taskgen.hpp"

namespace ocecal {
namespace {

using nlohmann::json;

constexpr const char* kFormatName = "oce-rcps-dataset";
constexpr int kFormatVersion = 1;

nlohmann::ordered_json params_to_json(const GeneratorParams& p) {
  return nlohmann::ordered_json{{"m", p.m},
              {"rho", p.rho},
              {"difficulty_a", p.difficulty_a},
              {"difficulty_b", p.difficulty_b},
              {"sharpness", p.sharpness}};
}

GeneratorParams params_from_json(const json& j, std::size_t line) {
  GeneratorParams p;
  for (const auto& [key, value] : j.items()) {
    if (key == "m") {
      p.m = value.get<std::size_t>();
    } else if (key == "rho") {
      p.rho = value.get<double>();
    } else if (key == "difficulty_a") {
      p.difficulty_a = value.get<double>();
    } else if (key == "difficulty_b") {
      p.difficulty_b = value.get<double>();
    } else if (key == "sharpness") {
      p.sharpness = value.get<double>();
    } else {
      throw DataError(line, fmt::format("unknown generator parameter '{}'", key));
    }
  }
  return p;
}

json parse_line(const std::string& text, std::size_t line) {
  try {
    auto j = json::parse(text);
    if (!j.is_object()) throw DataError(line, "expected a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw DataError(line, fmt::format("malformed JSON: {}", e.what()));
  }
}

const json& field(const json& obj, const char* name, std::size_t line) {
  const auto it = obj.find(name);
  if (it == obj.end()) throw DataError(line, fmt::format("missing field '{}'", name));
  return *it;
}

ScoredExample parse_example(const json& j, std::size_t m, std::size_t line,
                            const ReadOptions& options) {
  for (const auto& [key, value] : j.items()) {
    if (key != "scores" && key != "truth") {
      throw DataError(line, fmt::format("unexpected field '{}'", key));
    }
  }
  const auto& scores = field(j, "scores", line);
  const auto& truth = field(j, "truth", line);
  if (!scores.is_array() || !truth.is_array()) {
    throw DataError(line, "'scores' and 'truth' must be arrays");
  }
  if (scores.size() != m) {
    throw DataError(line, fmt::format("{} scores but the header declares m = {}", scores.size(), m));
  }

  ScoredExample ex;
  ex.scores.reserve(m);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!scores[i].is_number()) throw DataError(line, fmt::format("score {} is not a number", i));
    const double s = scores[i].get<double>();
    if (!(s >= 0.0 && s <= 1.0)) {
      throw DataError(line, fmt::format("score {} = {} is outside [0,1]", i, s));
    }
    ex.scores.push_back(s);
  }
  for (const auto& y : truth) {
    if (!y.is_number_unsigned()) {
      throw DataError(line, "truth entries must be nonnegative integers");
    }
    const auto idx = y.get<std::uint64_t>();
    if (idx >= m) {
      throw DataError(line, fmt::format("truth index {} is out of range for m = {}", idx, m));
    }
    ex.truth.push_back(static_cast<std::uint32_t>(idx));
  }
  std::sort(ex.truth.begin(), ex.truth.end());
  if (std::adjacent_find(ex.truth.begin(), ex.truth.end()) != ex.truth.end()) {
    throw DataError(line, "duplicate truth index");
  }
  if (options.require_truth && ex.truth.empty()) {
    throw DataError(line, "empty truth set (the FNR loss needs at least one positive)");
  }
  return ex;
}

}  // namespace

Dataset read_dataset(std::istream& in, const ReadOptions& options) {
  std::string text;
  if (!std::getline(in, text)) throw DataError(1, "missing dataset header");

  Dataset data;
  std::size_t declared_count = 0;
  {
    const auto header = parse_line(text, 1);
    try {
      if (field(header, "format", 1) != kFormatName) {
        throw DataError(1, fmt::format("format must be \"{}\"", kFormatName));
      }
      if (field(header, "version", 1) != kFormatVersion) {
        throw DataError(1, fmt::format("unsupported version (expected {})", kFormatVersion));
      }
      data.m = field(header, "m", 1).get<std::size_t>();
      declared_count = field(header, "count", 1).get<std::size_t>();
      if (const auto it = header.find("seed"); it != header.end() && !it->is_null()) {
        data.seed = it->get<std::uint64_t>();
      }
      if (const auto it = header.find("params"); it != header.end() && !it->is_null()) {
        data.params = params_from_json(*it, 1);
      }
    } catch (const json::exception& e) {
      throw DataError(1, fmt::format("bad header field: {}", e.what()));
    }
    if (data.m == 0) throw DataError(1, "header declares m = 0");
  }

  std::size_t line = 1;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) throw DataError(line, "blank line");
    const auto j = parse_line(text, line);
    try {
      data.examples.push_back(parse_example(j, data.m, line, options));
    } catch (const json::exception& e) {
      throw DataError(line, e.what());
    }
  }
  if (data.examples.size() != declared_count) {
    throw DataError(0, fmt::format("header declares count = {} but {} examples follow",
                                   declared_count, data.examples.size()));
  }
  return data;
}

Dataset read_dataset(const std::filesystem::path& path, const ReadOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError(0, fmt::format("cannot open '{}'", path.string()));
  try {
    return read_dataset(in, options);
  } catch (const DataError& e) {
    throw DataError(e.line(), e.detail(), path.string());
  }
}

void write_dataset(std::ostream& out, const Dataset& data) {
  nlohmann::ordered_json header = {{"format", kFormatName},
                 {"version", kFormatVersion},
                 {"m", data.m},
                 {"count", data.examples.size()},
                 {"seed", nullptr},
                 {"params", nullptr}};
  if (data.seed) header["seed"] = *data.seed;
  if (data.params) header["params"] = params_to_json(*data.params);
  out << header.dump() << '\n';

  fmt::memory_buffer buf;
  for (const auto& ex : data.examples) {
    buf.clear();
    fmt::format_to(std::back_inserter(buf), "{{\"scores\":[");
    for (std::size_t i = 0; i < ex.scores.size(); ++i) {
      fmt::format_to(std::back_inserter(buf), "{}{:.9g}", i ? "," : "", ex.scores[i]);
    }
    fmt::format_to(std::back_inserter(buf), "],\"truth\":[");
    for (std::size_t i = 0; i < ex.truth.size(); ++i) {
      fmt::format_to(std::back_inserter(buf), "{}{}", i ? "," : "", ex.truth[i]);
    }
    fmt::format_to(std::back_inserter(buf), "]}}\n");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
}

void write_dataset(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(0, fmt::format("cannot write '{}'", path.string()));
  write_dataset(out, data);
  if (!out) throw DataError(0, fmt::format("write to '{}' failed", path.string()));
}

}  // namespace ocecal
