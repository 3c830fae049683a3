#include "dcplan/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dcplan/errors.hpp"

namespace dcplan {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_identifier(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

}  // namespace

double parse_double(std::string_view text, int line, std::string_view key) {
  text = trim(text);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw ConfigError("expected a finite number, got '" + std::string(text) + "'", line,
                      std::string(key));
  }
  return value;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

ConfigDocument ConfigDocument::parse(std::string_view text) {
  ConfigDocument doc;
  std::string section;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
      const auto name = trim(line.substr(1, line.size() - 2));
      if (!valid_identifier(name)) throw ConfigError("invalid section name '" + std::string(name) + "'", line_no);
      section = std::string(name);
      doc.section_headers_.emplace_back(section, line_no);
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (!valid_identifier(key)) throw ConfigError("invalid key name", line_no, std::string(key));
    for (const auto& e : doc.entries_) {
      if (e.section == section && e.key == key) {
        throw ConfigError("duplicate key (first defined on line " + std::to_string(e.line) + ")", line_no,
                          std::string(key));
      }
    }
    doc.entries_.push_back({section, std::string(key), std::string(value), line_no});
  }
  doc.consumed_.assign(doc.entries_.size(), false);
  return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse(buffer.str());
}

std::vector<std::string> ConfigDocument::sections() const {
  std::vector<std::string> out;
  for (const auto& [name, line] : section_headers_) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  }
  return out;
}

bool ConfigDocument::has_section(std::string_view section) const {
  return std::any_of(section_headers_.begin(), section_headers_.end(),
                     [&](const auto& h) { return h.first == section; });
}

int ConfigDocument::section_line(std::string_view section) const {
  for (const auto& [name, line] : section_headers_) {
    if (name == section) return line;
  }
  return 0;
}

const ConfigDocument::Entry* ConfigDocument::find(std::string_view section, std::string_view key) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].section == section && entries_[i].key == key) {
      consumed_[i] = true;
      return &entries_[i];
    }
  }
  return nullptr;
}

std::optional<std::string> ConfigDocument::get_string(std::string_view section, std::string_view key) {
  const auto* e = find(section, key);
  if (!e) return std::nullopt;
  return e->value;
}

std::optional<double> ConfigDocument::get_double(std::string_view section, std::string_view key) {
  const auto* e = find(section, key);
  if (!e) return std::nullopt;
  return parse_double(e->value, e->line, e->key);
}

std::optional<long long> ConfigDocument::get_int(std::string_view section, std::string_view key) {
  const auto* e = find(section, key);
  if (!e) return std::nullopt;
  long long value = 0;
  const auto* end = e->value.data() + e->value.size();
  auto [ptr, ec] = std::from_chars(e->value.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    // Accept integral values written in exponent form, e.g. 8e5.
    const double d = parse_double(e->value, e->line, e->key);
    if (d != std::floor(d) || std::abs(d) > 9e15) {
      throw ConfigError("expected an integer, got '" + e->value + "'", e->line, e->key);
    }
    return static_cast<long long>(d);
  }
  return value;
}

std::optional<bool> ConfigDocument::get_bool(std::string_view section, std::string_view key) {
  const auto* e = find(section, key);
  if (!e) return std::nullopt;
  if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
  if (e->value == "false" || e->value == "0" || e->value == "no") return false;
  throw ConfigError("expected a boolean, got '" + e->value + "'", e->line, e->key);
}

std::optional<std::vector<std::string>> ConfigDocument::get_list(std::string_view section,
                                                                 std::string_view key) {
  const auto* e = find(section, key);
  if (!e) return std::nullopt;
  return split_list(e->value);
}

std::optional<std::vector<double>> ConfigDocument::get_double_list(std::string_view section,
                                                                   std::string_view key) {
  const auto* e = find(section, key);
  if (!e) return std::nullopt;
  std::vector<double> out;
  for (const auto& item : split_list(e->value)) out.push_back(parse_double(item, e->line, e->key));
  return out;
}

void ConfigDocument::reject_unconsumed() const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!consumed_[i]) {
      const auto& e = entries_[i];
      const std::string where = e.section.empty() ? "top level" : "section [" + e.section + "]";
      throw ConfigError("unknown key in " + where, e.line, e.key);
    }
  }
}

}  // namespace dcplan
