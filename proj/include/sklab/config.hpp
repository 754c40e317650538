#pragma once

// INI-style experiment configs:
//
//   [disorder]
//   kind = two_point
//   p = 0.5
//   [model]
//   beta = 1.0
//   [study]
//   name = variance_scaling
//   N_list = 4, 6, 8
//
// '#' or ';' starts a comment. Lists are comma separated; holder pairs are
// written s:t.

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sklab/errors.hpp"
#include "sklab/experiments.hpp"

namespace sklab {

struct ConfigEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;    // 0 for command-line overrides
  int column = 0;  // column of the value
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline const std::vector<std::string>& section_keys(std::string_view section) {
  static const std::vector<std::string> disorder{"kind", "p", "coeffs", "function", "base", "n", "k"};
  static const std::vector<std::string> model{"beta", "field_r"};
  static const std::vector<std::string> study{"name",   "N_list",  "replicas", "seed",  "t_grid",
                                              "lambda_grid", "c_const", "K_const", "pairs", "lambda0"};
  static const std::vector<std::string> none;
  if (section == "disorder") return disorder;
  if (section == "model") return model;
  if (section == "study") return study;
  return none;
}

inline bool known_key(std::string_view section, std::string_view key) {
  for (const auto& k : section_keys(section)) {
    if (k == key) return true;
  }
  return false;
}

[[noreturn]] inline void value_error(const ConfigEntry& e, const std::string& what) {
  if (e.line > 0) throw ParseError(e.line, e.column, e.key + ": " + what);
  throw ValidationError(e.key, what);
}

inline double to_double(const ConfigEntry& e, std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    value_error(e, "expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

template <class Int>
Int to_int(const ConfigEntry& e, std::string_view s) {
  s = trim(s);
  Int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    value_error(e, "expected an integer, got '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::vector<double> to_double_list(const ConfigEntry& e) {
  std::vector<double> out;
  for (auto item : split_list(e.value)) out.push_back(to_double(e, item));
  return out;
}

inline void apply_entry(ExperimentConfig& c, const ConfigEntry& e) {
  const std::string& k = e.key;
  if (e.section == "disorder") {
    DisorderFragment& d = c.disorder;
    if (k == "kind") d.kind = e.value;
    else if (k == "p") d.p = to_double(e, e.value);
    else if (k == "coeffs") d.coeffs = to_double_list(e);
    else if (k == "function") d.function = e.value;
    else if (k == "base") d.base = e.value;
    else if (k == "n") d.n = to_double(e, e.value);
    else if (k == "k") d.k = to_int<int>(e, e.value);
  } else if (e.section == "model") {
    if (k == "beta") c.beta = to_double(e, e.value);
    else if (k == "field_r") c.field_r = to_double(e, e.value);
  } else if (e.section == "study") {
    if (k == "name") {
      const auto s = parse_study_name(e.value);
      if (!s) value_error(e, "unknown study '" + e.value + "'");
      c.study = *s;
    } else if (k == "N_list") {
      c.n_list.clear();
      for (auto item : split_list(e.value)) c.n_list.push_back(to_int<int>(e, item));
    } else if (k == "replicas") {
      c.replicas = to_int<int>(e, e.value);
    } else if (k == "seed") {
      c.seed = to_int<std::uint64_t>(e, e.value);
    } else if (k == "t_grid") {
      c.t_grid = to_double_list(e);
    } else if (k == "lambda_grid") {
      c.lambda_grid = to_double_list(e);
    } else if (k == "c_const") {
      c.c_const = to_double(e, e.value);
    } else if (k == "K_const") {
      c.K_const = to_double(e, e.value);
    } else if (k == "lambda0") {
      c.lambda0 = to_double(e, e.value);
    } else if (k == "pairs") {
      c.holder_pairs.clear();
      for (auto item : split_list(e.value)) {
        const auto colon = item.find(':');
        if (colon == std::string_view::npos) value_error(e, "pairs are written s:t");
        c.holder_pairs.emplace_back(to_double(e, item.substr(0, colon)),
                                    to_double(e, item.substr(colon + 1)));
      }
    }
  }
}

}  // namespace detail

/// Lexes config text into entries, rejecting unknown sections and keys.
inline std::vector<ConfigEntry> lex_config(std::string_view text) {
  std::vector<ConfigEntry> out;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const std::string_view body = detail::trim(line);
    if (body.empty()) continue;
    const int body_col = static_cast<int>(body.data() - raw.data()) + 1;
    if (body.front() == '[') {
      if (body.back() != ']') throw ParseError(line_no, body_col, "unterminated section header");
      section = std::string(detail::trim(body.substr(1, body.size() - 2)));
      if (detail::section_keys(section).empty()) {
        throw ParseError(line_no, body_col + 1, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, body_col, "expected key = value");
    const std::string key(detail::trim(body.substr(0, eq)));
    if (key.empty()) throw ParseError(line_no, body_col, "missing key before '='");
    if (section.empty()) throw ParseError(line_no, body_col, "key '" + key + "' outside any section");
    if (!detail::known_key(section, key)) {
      throw ParseError(line_no, body_col, "unknown key '" + key + "' in [" + section + "]");
    }
    const std::string_view value_part = body.substr(eq + 1);
    const std::string_view value = detail::trim(value_part);
    const int value_col = value.empty() ? body_col + static_cast<int>(eq) + 1
                                        : static_cast<int>(value.data() - raw.data()) + 1;
    out.push_back({section, key, std::string(value), line_no, value_col});
  }
  return out;
}

/// "key=value" or "section.key=value"; bare keys resolve to their unique section.
inline ConfigEntry parse_override(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) throw ValidationError(std::string(text), "override must be key=value");
  std::string key(detail::trim(text.substr(0, eq)));
  const std::string value(detail::trim(text.substr(eq + 1)));
  std::string section;
  if (const auto dot = key.find('.'); dot != std::string::npos) {
    section = key.substr(0, dot);
    key = key.substr(dot + 1);
    if (!detail::known_key(section, key)) throw ValidationError(key, "unknown key in [" + section + "]");
  } else {
    for (const char* s : {"disorder", "model", "study"}) {
      if (detail::known_key(s, key)) section = s;
    }
    if (key == "study") {
      section = "study";
      key = "name";
    }
    if (section.empty()) throw ValidationError(key, "unknown config key");
  }
  return {section, key, value, 0, 0};
}

/// Parses, applies overrides on top, fills defaults and validates, including
/// construction of the disorder law.
inline ExperimentConfig parse_config(std::string_view text, std::span<const std::string> overrides = {}) {
  std::vector<ConfigEntry> entries = lex_config(text);
  for (const auto& o : overrides) entries.push_back(parse_override(o));
  ExperimentConfig c;
  for (const auto& e : entries) detail::apply_entry(c, e);
  validate(c);
  (void)build_spec(c.disorder);
  return c;
}

/// Canonical text form; parse_config(to_config_text(c)) == c.
inline std::string to_config_text(const ExperimentConfig& c) {
  auto list = [](const auto& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) s += ", ";
      if constexpr (std::is_same_v<std::decay_t<decltype(xs[i])>, int>) {
        s += std::to_string(xs[i]);
      } else {
        s += format_double(xs[i]);
      }
    }
    return s;
  };
  const DisorderFragment& d = c.disorder;
  std::string out = "[disorder]\nkind = " + d.kind + "\n";
  if (d.p) out += "p = " + format_double(*d.p) + "\n";
  if (!d.coeffs.empty()) out += "coeffs = " + list(d.coeffs) + "\n";
  if (!d.function.empty()) out += "function = " + d.function + "\n";
  if (!d.base.empty()) out += "base = " + d.base + "\n";
  if (d.n) out += "n = " + format_double(*d.n) + "\n";
  if (d.k) out += "k = " + std::to_string(*d.k) + "\n";
  out += "[model]\nbeta = " + format_double(c.beta) + "\nfield_r = " + format_double(c.field_r) + "\n";
  out += "[study]\nname = " + std::string(study_name(c.study)) + "\n";
  out += "N_list = " + list(c.n_list) + "\n";
  out += "replicas = " + std::to_string(c.replicas) + "\n";
  out += "seed = " + std::to_string(c.seed) + "\n";
  if (!c.t_grid.empty()) out += "t_grid = " + list(c.t_grid) + "\n";
  if (!c.lambda_grid.empty()) out += "lambda_grid = " + list(c.lambda_grid) + "\n";
  out += "c_const = " + format_double(c.c_const) + "\nK_const = " + format_double(c.K_const) + "\n";
  out += "pairs = ";
  for (std::size_t i = 0; i < c.holder_pairs.size(); ++i) {
    if (i) out += ", ";
    out += format_double(c.holder_pairs[i].first) + ":" + format_double(c.holder_pairs[i].second);
  }
  out += "\n";
  if (c.lambda0) out += "lambda0 = " + format_double(*c.lambda0) + "\n";
  return out;
}

}  // namespace sklab
