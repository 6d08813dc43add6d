// Key-value run configuration for the spdelab command line.
#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spdelab/spdelab.h"

namespace spdelab_cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KeyInfo {
  const char* name;
  const char* fallback;
  const char* help;
};

/// Every accepted key, in echo order.
const std::vector<KeyInfo>& known_keys();

const std::vector<std::string>& preset_names();

/// Flat string map. Each value remembers where it was last set so that
/// validation errors can point at the offending line.
class RunConfig {
 public:
  RunConfig();

  void set(std::string_view key, std::string_view value, std::string origin);
  const std::string& get(std::string_view key) const;
  const std::string& origin(std::string_view key) const;

  /// `key = value` lines in key order; loadable by load_file.
  std::string echo() const;

 private:
  struct Entry {
    std::string value;
    std::string origin;
  };
  std::map<std::string, Entry, std::less<>> entries_;
};

void load_file(RunConfig& config, const std::filesystem::path& path);
void apply_override(RunConfig& config, std::string_view assignment);
void apply_preset(RunConfig& config, std::string_view name);

/// Typed view of a RunConfig. params() points into the owned level arrays,
/// so a Settings object must outlive any use of the returned struct.
class Settings {
 public:
  Settings(const RunConfig& config, spdelab_study_kind kind);
  Settings(const Settings&) = delete;
  Settings& operator=(const Settings&) = delete;

  const spdelab_params& params() const { return params_; }
  const std::vector<spdelab_variant>& variants() const { return variants_; }
  std::size_t snapshots() const { return snapshots_; }
  std::size_t sample_index() const { return sample_index_; }
  const std::vector<double>& check_lags() const { return check_lags_; }
  /// Empty means the default ladder 0, P/2, P, ..., 32P.
  const std::vector<std::size_t>& padding_list() const { return padding_list_; }

 private:
  spdelab_params params_{};
  std::vector<double> time_levels_;
  std::vector<std::size_t> space_levels_;
  std::vector<std::string> labels_;
  std::vector<spdelab_variant> variants_;
  std::size_t snapshots_ = 0;
  std::size_t sample_index_ = 0;
  std::vector<double> check_lags_;
  std::vector<std::size_t> padding_list_;
};

}  // namespace spdelab_cli
