#include "hdlrt/scenario_config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <optional>

namespace hdlrt {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(trim(s.substr(start)));
      break;
    }
    parts.push_back(trim(s.substr(start, pos - start)));
    start = pos + 1;
  }
  return parts;
}

long parse_long(const std::string& s, std::size_t line) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("expected an integer, got '" + s + "'", line);
  }
  return v;
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("expected a number, got '" + s + "'", line);
  }
  return v;
}

std::vector<long> parse_long_list(const std::string& s, std::size_t line) {
  std::vector<long> out;
  for (const std::string& item : split(s, ',')) out.push_back(parse_long(item, line));
  return out;
}

// One key=value pair per entry inside an alt_params segment.
std::map<std::string, double> parse_param_map(const std::string& segment, std::size_t line) {
  std::map<std::string, double> params;
  for (const std::string& item : split(segment, ',')) {
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("alt_params entry '" + item + "' is not key=value", line);
    }
    params[trim(item.substr(0, eq))] = parse_double(trim(item.substr(eq + 1)), line);
  }
  return params;
}

double take(std::map<std::string, double>& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  const double v = it->second;
  params.erase(it);
  return v;
}

AlternativeConstruction build_construction(const std::string& family, const std::string& segment,
                                           std::size_t line) {
  auto params = parse_param_map(segment, line);
  AlternativeConstruction out;
  if (family == "diag_spike") {
    DiagSpike c;
    c.value = take(params, "v", 1.0);
    c.count = static_cast<long>(take(params, "count", -1.0));
    out = c;
  } else if (family == "equicorrelated") {
    Equicorrelated c;
    c.a = take(params, "a", 0.0);
    c.b = take(params, "b", 1.0);
    c.mean_shift = take(params, "mean", 0.0);
    out = c;
  } else if (family == "scaled_identity") {
    ScaledIdentity c;
    c.c = take(params, "c", 1.0);
    out = c;
  } else if (family == "banded") {
    Banded c;
    c.diag = take(params, "diag", 1.0);
    c.off = take(params, "off", 0.0);
    c.bandwidth = static_cast<long>(take(params, "bandwidth", 0.0));
    auto it = params.find("half_mean");
    if (it != params.end()) {
      c.half_mean = it->second;
      params.erase(it);
    }
    out = c;
  } else {
    throw ConfigError("unknown alternative '" + family + "'", line);
  }
  if (!params.empty()) {
    throw ConfigError("unknown alt_params key '" + params.begin()->first + "' for " + family,
                      line);
  }
  return out;
}

struct RawBlock {
  std::map<std::string, std::pair<std::string, std::size_t>> entries;  // key -> (value, line)
  std::size_t first_line = 0;
};

Scenario block_to_scenario(RawBlock& block, std::size_t index) {
  auto take_entry = [&](const char* key) -> std::optional<std::pair<std::string, std::size_t>> {
    auto it = block.entries.find(key);
    if (it == block.entries.end()) return std::nullopt;
    auto v = it->second;
    block.entries.erase(it);
    return v;
  };

  Scenario s;
  if (auto id = take_entry("id")) {
    s.id = id->first;
  } else {
    s.id = "s" + std::to_string(index + 1);
  }
  auto kind = take_entry("kind");
  if (!kind) throw ConfigError("scenario block is missing 'kind'", block.first_line);
  try {
    s.kind = test_kind_from_string(kind->first);
  } catch (const DomainError& e) {
    throw ConfigError(e.what(), kind->second);
  }

  auto n = take_entry("n");
  if (!n) throw ConfigError("scenario block is missing 'n'", block.first_line);
  s.sizes = parse_long_list(n->first, n->second);

  if (auto blocks = take_entry("blocks")) {
    s.partition = parse_long_list(blocks->first, blocks->second);
  }
  if (auto p = take_entry("p")) {
    s.p = parse_long(p->first, p->second);
  } else if (!s.partition.empty()) {
    s.p = 0;
    for (long b : s.partition) s.p += b;
  } else {
    throw ConfigError("scenario block is missing 'p'", block.first_line);
  }

  std::string family = "none";
  std::size_t family_line = block.first_line;
  if (auto alt = take_entry("alternative")) {
    family = alt->first;
    family_line = alt->second;
  }
  auto alt_params = take_entry("alt_params");
  if (family != "none") {
    AlternativeSpec spec;
    const std::string segments = alt_params ? alt_params->first : "";
    const std::size_t line = alt_params ? alt_params->second : family_line;
    for (const std::string& segment : split(segments, ';')) {
      spec.per_group.push_back(build_construction(family, segment, line));
    }
    s.alternative = std::move(spec);
  } else if (alt_params) {
    throw ConfigError("alt_params given without an alternative", alt_params->second);
  }

  if (auto it = take_entry("iterations")) s.iterations = parse_long(it->first, it->second);
  if (auto sd = take_entry("seed")) {
    s.seed = static_cast<std::uint64_t>(parse_long(sd->first, sd->second));
  }
  if (auto al = take_entry("alpha")) s.alpha = parse_double(al->first, al->second);
  if (auto rho = take_entry("rho")) {
    if (rho->first == "pooled") {
      s.rho_convention = RhoConvention::pooled;
    } else if (rho->first == "group") {
      s.rho_convention = RhoConvention::per_group;
    } else {
      throw ConfigError("rho must be 'pooled' or 'group', got '" + rho->first + "'", rho->second);
    }
  }

  if (!block.entries.empty()) {
    const auto& bad = *block.entries.begin();
    throw ConfigError("unknown key '" + bad.first + "'", bad.second.second);
  }

  if (s.iterations < 1) throw ConfigError("iterations must be >= 1", block.first_line);
  if (!(s.alpha > 0.0 && s.alpha <= 1.0)) {
    throw ConfigError("alpha must lie in (0, 1]", block.first_line);
  }
  return s;
}

}  // namespace

std::vector<Scenario> parse_scenarios(std::istream& in) {
  std::vector<RawBlock> blocks;
  RawBlock current;
  std::string line;
  std::size_t line_no = 0;
  auto flush = [&]() {
    if (!current.entries.empty()) blocks.push_back(std::move(current));
    current = RawBlock{};
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string content = trim(line);
    if (content.empty()) {
      flush();
      continue;
    }
    if (content[0] == '#') continue;
    const std::size_t eq = content.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected key=value, got '" + content + "'", line_no);
    }
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    if (current.entries.empty()) current.first_line = line_no;
    if (!current.entries.emplace(key, std::make_pair(value, line_no)).second) {
      throw ConfigError("duplicate key '" + key + "'", line_no);
    }
  }
  flush();

  if (blocks.empty()) throw EmptyInput("config contains no scenario blocks");
  std::vector<Scenario> scenarios;
  scenarios.reserve(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    scenarios.push_back(block_to_scenario(blocks[i], i));
  }
  return scenarios;
}

std::vector<Scenario> parse_scenarios_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw EmptyInput("cannot open '" + path + "'");
  return parse_scenarios(in);
}

}  // namespace hdlrt
