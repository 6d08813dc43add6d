#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "run_config.hpp"
#include "spdelab/spdelab.h"

namespace fs = std::filesystem;

namespace spdelab_cli {

namespace {

class LibraryError : public std::runtime_error {
 public:
  explicit LibraryError(spdelab_status s)
      : std::runtime_error(std::string(spdelab_status_name(s)) + ": " + spdelab_last_error()),
        status(s) {}
  spdelab_status status;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void check(spdelab_status s) {
  if (s != SPDELAB_OK) throw LibraryError(s);
}

int exit_for(spdelab_status s) {
  switch (s) {
    case SPDELAB_OK:
      return kExitOk;
    case SPDELAB_ERR_INVALID_ARGUMENT:
      return kExitConfig;
    case SPDELAB_ERR_QUADRATURE:
    case SPDELAB_ERR_SINGULAR:
    case SPDELAB_ERR_EMBEDDING:
      return kExitNumerical;
    case SPDELAB_ERR_DIVERGENCE:
      return kExitDivergence;
    case SPDELAB_ERR_IO:
      return kExitIo;
    case SPDELAB_ERR_INTERNAL:
      break;
  }
  return kExitInternal;
}

template <class T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
using StudyHandle = std::unique_ptr<spdelab_study, Deleter<spdelab_study, spdelab_study_destroy>>;
using TableHandle = std::unique_ptr<spdelab_error_table,
                                    Deleter<spdelab_error_table, spdelab_error_table_destroy>>;
using FieldHandle = std::unique_ptr<spdelab_field, Deleter<spdelab_field, spdelab_field_destroy>>;
using EvolutionHandle =
    std::unique_ptr<spdelab_evolution, Deleter<spdelab_evolution, spdelab_evolution_destroy>>;

struct Invocation {
  std::string command;
  std::vector<std::string> presets;
  std::string config_path;
  std::vector<std::string> sets;
  std::string run_dir;
  std::string out_root = "runs";
  bool print_config = false;
};

std::string utc_stamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

fs::path make_run_dir(const Invocation& inv, std::uint64_t seed) {
  std::error_code ec;
  if (!inv.run_dir.empty()) {
    fs::create_directories(inv.run_dir, ec);
    if (ec) throw IoError("cannot create run directory " + inv.run_dir + ": " + ec.message());
    return inv.run_dir;
  }
  fs::create_directories(inv.out_root, ec);
  if (ec) throw IoError("cannot create output root " + inv.out_root + ": " + ec.message());
  const std::string base = utc_stamp() + "-seed" + std::to_string(seed) + "-" + inv.command;
  for (int n = 0;; ++n) {
    fs::path dir = fs::path(inv.out_root) / (n == 0 ? base : base + "-" + std::to_string(n));
    if (fs::create_directory(dir, ec)) return dir;
    if (ec) throw IoError("cannot create run directory " + dir.string() + ": " + ec.message());
  }
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

void close_output(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

// Key-value metadata followed by the effective configuration.
class Meta {
 public:
  template <class T>
  Meta& add(const std::string& key, const T& value) {
    body_ << key << " = " << value << '\n';
    return *this;
  }

  void write(const fs::path& path, const Invocation& inv, const RunConfig& config) const {
    auto out = open_output(path);
    out << "command = " << inv.command << '\n';
    out << "library_version = " << spdelab_version() << '\n';
    out << "reproduce = spdelab " << inv.command << " --config config.txt\n";
    out << body_.str();
    out << "# effective configuration\n" << config.echo();
    close_output(out, path);
  }

 private:
  std::ostringstream body_{[] {
    std::ostringstream s;
    s << std::setprecision(17);
    return s;
  }()};
};

void write_config(const fs::path& dir, const RunConfig& config) {
  const fs::path path = dir / "config.txt";
  auto out = open_output(path);
  out << config.echo();
  close_output(out, path);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void run_covariance_check(const Invocation& inv, const RunConfig& config, std::ostream& out) {
  const Settings s(config, SPDELAB_STUDY_TIME);
  const auto& p = s.params();
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = make_run_dir(inv, p.master_seed);
  write_config(dir, config);

  const fs::path csv = dir / "covariance_check.csv";
  auto file = open_output(csv);
  file << "x,quadrature,closed_form,difference\n";
  double worst = 0.0;
  for (double x : s.check_lags()) {
    double quad = 0.0, exact = 0.0;
    check(spdelab_covariance_eval(p.q, p.quad_tol, x, &quad));
    check(spdelab_covariance_closed_form(p.q, x, &exact));
    file << x << ',' << quad << ',' << exact << ',' << quad - exact << '\n';
    worst = std::max(worst, std::abs(quad - exact));
  }
  close_output(file, csv);

  Meta().add("lags", s.check_lags().size())
      .add("max_abs_difference", worst)
      .add("wall_seconds", seconds_since(t0))
      .write(dir / "meta_covariance_check.txt", inv, config);
  out << "lags checked: " << s.check_lags().size() << "\nmax |quadrature - closed form|: "
      << worst << "\nrun directory: " << dir.string() << '\n';
}

void run_padding_check(const Invocation& inv, const RunConfig& config, std::ostream& out) {
  const Settings s(config, SPDELAB_STUDY_TIME);
  const auto& p = s.params();
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t P = p.ref_cells + 1;
  std::vector<std::size_t> list = s.padding_list();
  if (list.empty())
    for (std::size_t k = 0; k <= 64; ++k) list.push_back(k * P / 2);
  const fs::path dir = make_run_dir(inv, p.master_seed);
  write_config(dir, config);

  std::vector<double> rho(list.size());
  check(spdelab_padding_diagnostic(p.q, p.quad_tol, P, p.padding_mode, list.data(), list.size(),
                                   rho.data()));
  const fs::path csv = dir / "padding_check.csv";
  auto file = open_output(csv);
  file << "M,rho_minus\n";
  for (std::size_t i = 0; i < list.size(); ++i) file << list[i] << ',' << rho[i] << '\n';
  close_output(file, csv);

  Meta meta;
  meta.add("P", P);
  out << "P = " << P << "\n      M  rho_minus\n";
  for (std::size_t i = 0; i < list.size(); ++i)
    out << std::setw(7) << list[i] << "  " << std::setprecision(3) << std::scientific << rho[i]
        << std::defaultfloat << '\n';
  {
    std::size_t M = 0;
    double best = 0.0;
    check(spdelab_padding_select(p.q, p.quad_tol, P, p.padding_mode, p.padding_target, &M,
                                 &best));
    meta.add("selected_M", M)
        .add("selected_rho_minus", best)
        .add("target_met", best <= p.padding_target ? "true" : "false");
    out << "selected M = " << M << " (rho_minus " << best << ", target " << p.padding_target
        << (best <= p.padding_target ? " met" : " not met") << ")\n";
  }
  meta.add("wall_seconds", seconds_since(t0)).write(dir / "meta_padding_check.txt", inv, config);
  out << "run directory: " << dir.string() << '\n';
}

void run_sample_field(const Invocation& inv, const RunConfig& config, std::ostream& out) {
  const Settings s(config, SPDELAB_STUDY_TIME);
  const auto& p = s.params();
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = make_run_dir(inv, p.master_seed);
  write_config(dir, config);

  spdelab_field* raw = nullptr;
  check(spdelab_field_sample(&p, s.sample_index(), &raw));
  FieldHandle field(raw);
  const fs::path csv = dir / ("sample_field_" + std::to_string(s.sample_index()) + ".csv");
  check(spdelab_field_write_csv(field.get(), csv.c_str()));
  double a_min = 0.0, a_max = 0.0, rho = 0.0;
  std::size_t M = 0;
  check(spdelab_field_info(field.get(), &a_min, &a_max, &M, &rho));

  Meta().add("sample_index", s.sample_index())
      .add("nodes", spdelab_field_size(field.get()))
      .add("padding", M)
      .add("rho_minus", rho)
      .add("a_min", a_min)
      .add("a_max", a_max)
      .add("wall_seconds", seconds_since(t0))
      .write(dir / "meta_sample_field.txt", inv, config);
  out << "sample " << s.sample_index() << ": a in [" << a_min << ", " << a_max << "], M = " << M
      << ", rho_minus = " << rho << "\nrun directory: " << dir.string() << '\n';
}

void run_study(const Invocation& inv, const RunConfig& config, spdelab_study_kind kind,
               std::ostream& out) {
  const Settings s(config, kind);
  const auto& p = s.params();
  spdelab_study* raw_study = nullptr;
  check(spdelab_study_create(&p, &raw_study));
  StudyHandle study(raw_study);
  const fs::path dir = make_run_dir(inv, p.master_seed);
  write_config(dir, config);

  spdelab_error_table* raw_table = nullptr;
  check(spdelab_study_run(study.get(), 0, &raw_table));
  TableHandle table(raw_table);

  const std::string tag = kind == SPDELAB_STUDY_TIME ? "converge_time" : "converge_space";
  check(spdelab_error_table_write_csv(table.get(), (dir / ("errors_" + tag + ".csv")).c_str()));
  spdelab_table_meta m{};
  check(spdelab_error_table_meta(table.get(), &m));

  Meta meta;
  meta.add("samples", m.samples)
      .add("master_seed", m.master_seed)
      .add("workers", p.workers)
      .add("modes", m.modes)
      .add("padding", m.padding)
      .add("rho_minus_max", m.rho_minus_max)
      .add("a_min_observed", m.a_min_observed)
      .add("a_max_observed", m.a_max_observed)
      .add("wall_seconds", m.wall_seconds);

  out << (kind == SPDELAB_STUDY_TIME ? "         dt" : "          h")
      << "      u_error   order\n";
  double order_sum = 0.0;
  std::size_t orders = 0;
  for (std::size_t i = 0; i < spdelab_error_table_rows(table.get()); ++i) {
    double param = 0.0, err = 0.0, order = 0.0;
    int has = 0;
    check(spdelab_error_table_row(table.get(), i, &param, &err, &order, &has));
    out << std::scientific << std::setprecision(4) << std::setw(11) << param << "  "
        << std::setw(11) << err << "   ";
    if (has) {
      out << std::fixed << std::setprecision(3) << order;
      order_sum += order;
      ++orders;
    } else {
      out << "--";
    }
    out << std::defaultfloat << '\n';
  }
  if (orders > 0) {
    meta.add("mean_order", order_sum / static_cast<double>(orders));
    out << "mean order: " << std::setprecision(4) << order_sum / static_cast<double>(orders)
        << '\n';
  }
  meta.write(dir / ("meta_" + tag + ".txt"), inv, config);
  out << std::defaultfloat << "samples " << m.samples << ", J = " << m.modes << ", M = "
      << m.padding << ", wall " << std::setprecision(3) << m.wall_seconds
      << " s\nrun directory: " << dir.string() << '\n';
}

void run_evolve(const Invocation& inv, const RunConfig& config, std::ostream& out) {
  const Settings s(config, SPDELAB_STUDY_EVOLVE);
  const auto& p = s.params();
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = make_run_dir(inv, p.master_seed);
  write_config(dir, config);

  spdelab_evolution* raw = nullptr;
  check(spdelab_evolve_run(&p, s.variants().data(), s.variants().size(), s.snapshots(),
                           s.sample_index(), &raw));
  EvolutionHandle evo(raw);

  Meta meta;
  meta.add("sample_index", s.sample_index()).add("snapshots", s.snapshots());
  for (std::size_t v = 0; v < spdelab_evolution_count(evo.get()); ++v) {
    const std::string label = spdelab_evolution_label(evo.get(), v);
    const fs::path csv = dir / ("field_" + label + ".csv");
    check(spdelab_evolution_write_csv(evo.get(), v, csv.c_str()));
    std::size_t snaps = 0, nodes = 0, modes = 0, M = 0;
    double rho = 0.0;
    check(spdelab_evolution_info(evo.get(), v, &snaps, &nodes, &modes, &M, &rho));
    meta.add(label + ".modes", modes).add(label + ".padding", M).add(label + ".rho_minus", rho);
    out << label << ": " << snaps << " snapshots x " << nodes << " nodes -> " << csv.string()
        << '\n';
  }
  meta.add("wall_seconds", seconds_since(t0)).write(dir / "meta_evolve.txt", inv, config);
  out << "run directory: " << dir.string() << '\n';
}

RunConfig build_config(const Invocation& inv) {
  RunConfig config;
  for (const auto& name : inv.presets) apply_preset(config, name);
  if (!inv.config_path.empty()) load_file(config, inv.config_path);
  if (const char* env = std::getenv("SPDELAB_WORKERS"); env != nullptr && *env != '\0')
    config.set("workers", env, "environment SPDELAB_WORKERS");
  for (const auto& assignment : inv.sets) apply_override(config, assignment);
  return config;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monte Carlo convergence studies for a stochastic Allen-Cahn equation with a "
               "log-normal diffusion coefficient."};
  app.name("spdelab");
  app.require_subcommand(0, 1);
  app.footer(
      "Configuration order: defaults, presets, --config file, SPDELAB_WORKERS, --set.\n"
      "Exit codes: 0 ok, 1 internal, 2 usage, 3 config, 4 file, 5 divergence, 6 numerical.");

  bool list_keys = false;
  bool version = false;
  app.add_flag("--list-keys", list_keys, "List configuration keys with defaults");
  app.add_flag("--version", version, "Print the library version");

  Invocation inv;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"sample-field", "Draw one coefficient field on the reference mesh"},
      {"padding-check", "Tabulate rho_minus against the embedding padding"},
      {"covariance-check", "Compare the covariance quadrature with the Bessel closed form"},
      {"converge-time", "Strong error table under time-step refinement"},
      {"converge-space", "Strong error table under mesh refinement"},
      {"evolve", "Single-sample trajectories written as t,x,u snapshots"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", inv.config_path, "key = value config file");
    sub->add_option("-p,--preset", inv.presets, "Named preset, applied before the file")
        ->allow_extra_args(false);
    sub->add_option("-s,--set", inv.sets, "key=value override")->allow_extra_args(false);
    sub->add_option("--run-dir", inv.run_dir, "Exact output directory");
    sub->add_option("--out", inv.out_root, "Parent of timestamped run directories")
        ->capture_default_str();
    sub->add_flag("--print-config", inv.print_config, "Print the effective config and exit");
    sub->callback([&inv, sub] { inv.command = sub->get_name(); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "spdelab: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  if (version) {
    out << spdelab_version() << '\n';
    return kExitOk;
  }
  if (list_keys) {
    for (const auto& k : known_keys())
      out << std::left << std::setw(18) << k.name << std::setw(22) << k.fallback << k.help
          << '\n';
    out << "presets:";
    for (const auto& p : preset_names()) out << ' ' << p;
    out << '\n';
    return kExitOk;
  }
  if (inv.command.empty()) {
    err << "spdelab: a subcommand is required\n\n" << app.help();
    return kExitUsage;
  }

  try {
    const RunConfig config = build_config(inv);
    if (inv.print_config) {
      const spdelab_study_kind kind = inv.command == "converge-space" ? SPDELAB_STUDY_SPACE
                                      : inv.command == "evolve"       ? SPDELAB_STUDY_EVOLVE
                                                                      : SPDELAB_STUDY_TIME;
      const Settings validated(config, kind);
      out << config.echo();
      return kExitOk;
    }
    if (inv.command == "covariance-check") run_covariance_check(inv, config, out);
    else if (inv.command == "padding-check") run_padding_check(inv, config, out);
    else if (inv.command == "sample-field") run_sample_field(inv, config, out);
    else if (inv.command == "converge-time") run_study(inv, config, SPDELAB_STUDY_TIME, out);
    else if (inv.command == "converge-space") run_study(inv, config, SPDELAB_STUDY_SPACE, out);
    else run_evolve(inv, config, out);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "spdelab: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "spdelab: " << e.what() << '\n';
    return kExitIo;
  } catch (const LibraryError& e) {
    err << "spdelab: " << e.what() << '\n';
    return exit_for(e.status);
  } catch (const std::exception& e) {
    err << "spdelab: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace spdelab_cli
