#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace spdelab_cli {

namespace {

const std::vector<KeyInfo> kKeys = {
    {"samples", "100", "Monte Carlo samples per study"},
    {"seed", "20240601", "master seed; per-sample streams derive from it"},
    {"workers", "1", "worker threads (SPDELAB_WORKERS overrides the file)"},
    {"q", "2", "field smoothness, at least 2"},
    {"quad_tol", "1e-10", "absolute covariance quadrature tolerance"},
    {"padding_mode", "tapered", "tapered | covariance | zero"},
    {"padding", "auto", "embedding padding M, or auto"},
    {"padding_target", "1e-10", "rho_minus target for automatic padding"},
    {"rho_limit", "1e-6", "largest accepted rho_minus"},
    {"gamma", "1", "noise regularity"},
    {"eps_q", "0.1", "extra eigenvalue decay"},
    {"modes", "auto", "noise modes J, or auto"},
    {"orthonormal_basis", "false", "use sqrt(2) sin(j pi x) instead of sin(j pi x)"},
    {"drift", "allen_cahn", "allen_cahn | zero | affine"},
    {"drift_a", "0", "affine drift constant"},
    {"drift_b", "0", "affine drift slope"},
    {"coupling", "half_one_minus_sq", "zero | half_linear | half_one_minus_sq"},
    {"eps_a", "1e-3", "diffusion scale epsilon"},
    {"T", "0.1", "final time"},
    {"random_field", "true", "false gives a = eps_a"},
    {"u0_frequency", "2", "u0 = sin(f pi x)"},
    {"ref_cells", "64", "cells of the reference mesh"},
    {"dt_ref", "1e-5", "reference time step"},
    {"time_levels", "4e-3,2e-3,1e-3,5e-4", "coarse steps of the time study"},
    {"space_levels", "8,16,32", "coarse cell counts of the space study"},
    {"snapshots", "50", "evolve: snapshot intervals over [0, T]"},
    {"variants", "deterministic|q=2", "evolve: variants separated by |"},
    {"sample_index", "0", "sample drawn by sample-field and evolve"},
    {"check_lags", "grid", "covariance-check lags, or grid"},
    {"padding_list", "auto", "padding-check M values, or auto"},
};

const std::vector<std::string> kPresets = {"time-desk",  "time-full", "space-desk",
                                           "space-full", "evolve-coefficient",    "evolve-noise"};

std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void bad_value(const RunConfig& c, std::string_view key, std::string_view what) {
  std::ostringstream msg;
  msg << c.origin(key) << ": key '" << key << "': " << what << " (got '" << c.get(key) << "')";
  throw ConfigError(msg.str());
}

bool parse_double(const std::string& text, double& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_size(const std::string& text, std::size_t& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && !text.empty();
}

class Reader {
 public:
  explicit Reader(const RunConfig& c) : c_(c) {}

  double real(std::string_view key) const {
    double v = 0.0;
    if (!parse_double(c_.get(key), v)) bad_value(c_, key, "expected a number");
    return v;
  }
  double positive(std::string_view key) const {
    const double v = real(key);
    if (!(v > 0.0)) bad_value(c_, key, "must be positive");
    return v;
  }
  std::size_t count(std::string_view key) const {
    std::size_t v = 0;
    if (!parse_size(c_.get(key), v)) bad_value(c_, key, "expected a non-negative integer");
    return v;
  }
  std::size_t positive_count(std::string_view key) const {
    const std::size_t v = count(key);
    if (v == 0) bad_value(c_, key, "must be at least 1");
    return v;
  }
  bool flag(std::string_view key) const {
    const std::string& v = c_.get(key);
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    bad_value(c_, key, "expected true or false");
  }
  std::vector<double> reals(std::string_view key) const {
    std::vector<double> out;
    for (const auto& item : split(c_.get(key), ',')) {
      double v = 0.0;
      if (!parse_double(item, v)) bad_value(c_, key, "expected a comma-separated list of numbers");
      out.push_back(v);
    }
    return out;
  }
  std::vector<std::size_t> counts(std::string_view key) const {
    std::vector<std::size_t> out;
    for (const auto& item : split(c_.get(key), ',')) {
      std::size_t v = 0;
      if (!parse_size(item, v)) bad_value(c_, key, "expected a comma-separated list of integers");
      out.push_back(v);
    }
    return out;
  }
  template <std::size_t N>
  int choice(std::string_view key, const std::pair<const char*, int> (&options)[N]) const {
    for (const auto& [name, value] : options)
      if (c_.get(key) == name) return value;
    std::string allowed;
    for (const auto& [name, value] : options) allowed += (allowed.empty() ? "" : ", ") + std::string(name);
    bad_value(c_, key, "expected one of " + allowed);
  }
  bool is(std::string_view key, std::string_view word) const { return c_.get(key) == word; }

 private:
  const RunConfig& c_;
};

constexpr std::pair<const char*, int> kCouplings[] = {
    {"zero", SPDELAB_G_ZERO},
    {"half_linear", SPDELAB_G_HALF_LINEAR},
    {"half_one_minus_sq", SPDELAB_G_HALF_ONE_MINUS_SQ},
};

constexpr std::pair<const char*, int> kDrifts[] = {
    {"allen_cahn", SPDELAB_DRIFT_ALLEN_CAHN},
    {"zero", SPDELAB_DRIFT_ZERO},
    {"affine", SPDELAB_DRIFT_AFFINE},
};

constexpr std::pair<const char*, int> kPaddingModes[] = {
    {"tapered", SPDELAB_PADDING_TAPERED},
    {"covariance", SPDELAB_PADDING_COVARIANCE},
    {"zero", SPDELAB_PADDING_ZERO},
};

}  // namespace

const std::vector<KeyInfo>& known_keys() { return kKeys; }

const std::vector<std::string>& preset_names() { return kPresets; }

RunConfig::RunConfig() {
  for (const auto& k : kKeys) entries_[k.name] = {k.fallback, "default"};
}

void RunConfig::set(std::string_view key, std::string_view value, std::string origin) {
  auto it = entries_.find(key);
  if (it == entries_.end())
    throw ConfigError(origin + ": unknown key '" + std::string(key) + "'");
  const std::string v = trim(value);
  if (v.empty()) throw ConfigError(origin + ": key '" + std::string(key) + "' has no value");
  it->second = {v, std::move(origin)};
}

const std::string& RunConfig::get(std::string_view key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("unknown key '" + std::string(key) + "'");
  return it->second.value;
}

const std::string& RunConfig::origin(std::string_view key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("unknown key '" + std::string(key) + "'");
  return it->second.origin;
}

std::string RunConfig::echo() const {
  std::ostringstream out;
  for (const auto& k : kKeys) out << k.name << " = " << get(k.name) << '\n';
  return out.str();
}

void load_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(number);
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    config.set(trim(std::string_view(body).substr(0, eq)),
               std::string_view(body).substr(eq + 1), where);
  }
}

void apply_override(RunConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  const std::string where = "--set " + std::string(assignment);
  if (eq == std::string_view::npos) throw ConfigError(where + ": expected key=value");
  config.set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1), where);
}

void apply_preset(RunConfig& c, std::string_view name) {
  const std::string where = "preset " + std::string(name);
  auto put = [&](const char* key, const char* value) { c.set(key, value, where); };
  if (name == "time-desk") {
    put("samples", "100");
    put("ref_cells", "64");
    put("dt_ref", "1e-5");
    put("time_levels", "4e-3,2e-3,1e-3,5e-4");
  } else if (name == "time-full") {
    put("samples", "100");
    put("ref_cells", "128");
    put("dt_ref", "1e-6");
    put("time_levels", "1e-2,5e-3,2.5e-3,1.25e-3,6.25e-4");
  } else if (name == "space-desk") {
    put("samples", "100");
    put("ref_cells", "256");
    put("dt_ref", "1e-5");
    put("space_levels", "16,32,64,128");
  } else if (name == "space-full") {
    put("samples", "100");
    put("ref_cells", "512");
    put("dt_ref", "1e-6");
    put("space_levels", "16,32,64,128,256");
  } else if (name == "evolve-coefficient") {
    put("ref_cells", "128");
    put("dt_ref", "1e-5");
    put("T", "0.1");
    put("eps_a", "1e-2");
    put("coupling", "zero");
    put("u0_frequency", "4");
    put("snapshots", "100");
    put("variants", "deterministic|q=0.1|q=2");
  } else if (name == "evolve-noise") {
    put("ref_cells", "128");
    put("dt_ref", "1e-4");
    put("T", "4");
    put("q", "2");
    put("eps_a", "1e-5");
    put("coupling", "half_one_minus_sq");
    put("u0_frequency", "4");
    put("snapshots", "100");
    put("variants", "deterministic|gamma=0.5|gamma=1");
  } else {
    std::string known;
    for (const auto& p : kPresets) known += (known.empty() ? "" : ", ") + p;
    throw ConfigError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
  }
}

Settings::Settings(const RunConfig& c, spdelab_study_kind kind) {
  const Reader r(c);
  spdelab_params_init(&params_);
  params_.kind = kind;
  params_.samples = r.positive_count("samples");
  params_.master_seed = r.count("seed");
  params_.workers = r.positive_count("workers");

  params_.q = r.real("q");
  if (!(params_.q >= 2.0)) bad_value(c, "q", "q must be at least 2");
  params_.quad_tol = r.positive("quad_tol");
  params_.padding_mode = r.choice("padding_mode", kPaddingModes);
  params_.auto_padding = r.is("padding", "auto") ? 1 : 0;
  if (!params_.auto_padding) params_.padding = r.count("padding");
  params_.padding_target = r.positive("padding_target");
  params_.rho_limit = r.positive("rho_limit");

  params_.gamma = r.positive("gamma");
  params_.eps_q = r.positive("eps_q");
  params_.modes = r.is("modes", "auto") ? 0 : r.positive_count("modes");
  params_.orthonormal_basis = r.flag("orthonormal_basis") ? 1 : 0;

  params_.drift = r.choice("drift", kDrifts);
  params_.drift_a = r.real("drift_a");
  params_.drift_b = r.real("drift_b");
  params_.coupling = r.choice("coupling", kCouplings);
  params_.eps_a = r.positive("eps_a");
  params_.T = r.positive("T");
  params_.random_field = r.flag("random_field") ? 1 : 0;
  params_.u0_frequency = static_cast<int>(r.count("u0_frequency"));

  params_.ref_cells = r.positive_count("ref_cells");
  params_.dt_ref = r.positive("dt_ref");
  if (kind == SPDELAB_STUDY_TIME) {
    time_levels_ = r.reals("time_levels");
    params_.time_levels = time_levels_.data();
    params_.n_time_levels = time_levels_.size();
  } else if (kind == SPDELAB_STUDY_SPACE) {
    space_levels_ = r.counts("space_levels");
    params_.space_levels = space_levels_.data();
    params_.n_space_levels = space_levels_.size();
  }

  snapshots_ = r.positive_count("snapshots");
  sample_index_ = r.count("sample_index");

  if (kind == SPDELAB_STUDY_EVOLVE) {
    const auto items = split(c.get("variants"), '|');
    labels_.reserve(items.size());
    for (const auto& item : items) {
      spdelab_variant v{};
      std::string label;
      if (item == "deterministic") {
        v.deterministic = 1;
        label = item;
      } else {
        for (const auto& field : split(item, ',')) {
          const auto eq = field.find('=');
          if (eq == std::string::npos) bad_value(c, "variants", "expected name=value in '" + item + "'");
          const std::string name = trim(field.substr(0, eq));
          const std::string value = trim(field.substr(eq + 1));
          double x = 0.0;
          if (name == "coupling") {
            bool found = false;
            for (const auto& [n, code] : kCouplings)
              if (value == n) {
                v.has_coupling = 1;
                v.coupling = code;
                found = true;
              }
            if (!found) bad_value(c, "variants", "unknown coupling '" + value + "'");
          } else if (!parse_double(value, x) || !(x > 0.0)) {
            bad_value(c, "variants", "'" + field + "' needs a positive number");
          } else if (name == "q") {
            v.has_q = 1;
            v.q = x;
          } else if (name == "gamma") {
            v.has_gamma = 1;
            v.gamma = x;
          } else if (name == "eps_a") {
            v.has_eps_a = 1;
            v.eps_a = x;
          } else {
            bad_value(c, "variants", "unknown variant setting '" + name + "'");
          }
          label += (label.empty() ? "" : "_") + name + value;
        }
      }
      if (std::find(labels_.begin(), labels_.end(), label) != labels_.end())
        bad_value(c, "variants", "duplicate variant '" + label + "'");
      labels_.push_back(label);
      variants_.push_back(v);
    }
    for (std::size_t i = 0; i < variants_.size(); ++i) variants_[i].label = labels_[i].c_str();
  }

  if (r.is("check_lags", "grid")) {
    for (std::size_t k = 0; k <= params_.ref_cells; ++k)
      check_lags_.push_back(static_cast<double>(k) / static_cast<double>(params_.ref_cells));
  } else {
    check_lags_ = r.reals("check_lags");
    for (double x : check_lags_)
      if (!(x >= 0.0)) bad_value(c, "check_lags", "lags must be non-negative");
  }
  if (!r.is("padding_list", "auto")) padding_list_ = r.counts("padding_list");
}

}  // namespace spdelab_cli
