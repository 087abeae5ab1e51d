#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "superlap/grid.hpp"
#include "superlap/measure.hpp"

namespace superlap {

/// Raw `key = value` entry with the line it came from (0 for overrides).
struct ConfigEntry {
  std::string value;
  int line = 0;
};

/// Parsed INI-style file: sections [domain], [measure], [problem], [command].
/// Keys are stored as "section.key".
class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text, const std::string& origin = "<config>");
  static ConfigFile load(const std::filesystem::path& path);

  /// Applies "section.key=value"; scalar fields only.
  void set(const std::string& assignment);

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  std::string str(const std::string& key, const std::string& fallback) const;
  double num(const std::string& key, double fallback) const;
  int integer(const std::string& key, int fallback) const;
  std::vector<double> list(const std::string& key, const std::vector<double>& fallback) const;
  std::optional<double> maybe_num(const std::string& key) const;

  /// "origin:line: message" for diagnostics about a key.
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;
  const std::map<std::string, ConfigEntry>& entries() const { return entries_; }
  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
  std::map<std::string, ConfigEntry> entries_;
};

struct LambdaSpec {
  double value = 0.0;
  std::optional<double> factor_of_lambda1;  // "auto: 0.9*lambda1"
};

struct RunConfig {
  ConfigFile file;
  int dim = 1;
  std::array<double, 4> box{0.0, 1.0, 0.0, 1.0};
  int cells = 64;  // per axis
  MaskSpec mask;
  double p = 2.0;
  LambdaSpec lambda;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "out";

  Domain domain() const;
  ValidatedMeasure measure() const;
  /// Command option with the [command] section prefix added.
  double opt(const std::string& key, double fallback) const { return file.num("command." + key, fallback); }
  int opt_int(const std::string& key, int fallback) const { return file.integer("command." + key, fallback); }
  std::vector<double> opt_list(const std::string& key, const std::vector<double>& fallback) const {
    return file.list("command." + key, fallback);
  }
};

/// Interprets domain and problem fields; measure errors surface from measure().
RunConfig interpret(ConfigFile file);

LambdaSpec parse_lambda(const std::string& text);

/// Signed measure for a named preset (C1, C2, C3, C5, serie1, serie2, function,
/// custom) together with its s_bar and optional s_sharp.
struct PresetMeasure {
  SpectralMeasure measure;
  double s_bar = 1.0;
  std::optional<double> s_sharp;
};
PresetMeasure preset_measure(const ConfigFile& file);

}  // namespace superlap
