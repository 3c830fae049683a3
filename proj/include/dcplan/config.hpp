#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dcplan {

/// Line-oriented key/value configuration:
///
///     # comment
///     schema_version = 1
///     [hardware]
///     gpus_per_rack = 72          # trailing comments allowed
///     [model.custom]
///     layers = 4
///
/// Keys before the first section header live in section "". Every getter
/// marks the entry as consumed; `reject_unconsumed` then flags anything the
/// caller never asked for, so typos surface as errors with a line number.
class ConfigDocument {
 public:
  struct Entry {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
  };

  static ConfigDocument parse(std::string_view text);
  static ConfigDocument load(const std::filesystem::path& path);

  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<std::string> sections() const;
  bool has_section(std::string_view section) const;
  /// Line of the first `[section]` header, 0 when absent.
  int section_line(std::string_view section) const;

  std::optional<std::string> get_string(std::string_view section, std::string_view key);
  std::optional<double> get_double(std::string_view section, std::string_view key);
  std::optional<long long> get_int(std::string_view section, std::string_view key);
  std::optional<bool> get_bool(std::string_view section, std::string_view key);
  std::optional<std::vector<std::string>> get_list(std::string_view section, std::string_view key);
  std::optional<std::vector<double>> get_double_list(std::string_view section, std::string_view key);

  void reject_unconsumed() const;

 private:
  const Entry* find(std::string_view section, std::string_view key);

  std::vector<Entry> entries_;
  std::vector<bool> consumed_;
  std::vector<std::pair<std::string, int>> section_headers_;
};

double parse_double(std::string_view text, int line = 0, std::string_view key = {});
std::vector<std::string> split_list(std::string_view text);

}  // namespace dcplan
