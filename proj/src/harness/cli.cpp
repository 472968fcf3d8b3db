#include "rmtx/harness/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "rmtx/harness/experiment.hpp"
#include "rmtx/harness/output.hpp"
#include "rmtx/text.hpp"

namespace rmtx {

namespace {

struct EnsembleOptions {
  ExperimentConfig cfg;
  std::string pipeline;
  std::string threads = "auto";
  std::string format = "csv";
  std::size_t realizations = 0;
  unsigned subsystem_bits = 0;
  std::string config_file;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Expands a flat `key = value` file into `--key value` arguments. Lines
/// starting with '#' or ';' are comments; boolean keys take true/false.
std::vector<std::string> config_arguments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config file " + path);
  std::vector<std::string> args;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument("config line without '=': " + line);
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty() || key == "config") throw InvalidArgument("bad config key in line: " + line);
    if (key == "plot" || key == "tw-dense") {
      if (value == "true" || value == "1") args.push_back("--" + key);
      else if (value != "false" && value != "0") throw InvalidArgument(key + " takes true or false");
      continue;
    }
    args.push_back("--" + key);
    args.push_back(value);
  }
  return args;
}

/// Command line with every `--config FILE` replaced by the file's contents,
/// placed right after the subcommand so explicit flags (parsed later) win.
/// Returned in the reversed order CLI11 expects.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> head;
  std::vector<std::string> tail;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (i == 1) {
      head.push_back(a);
      continue;
    }
    std::string file;
    if (a == "--config" && i + 1 < argc) {
      file = argv[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      file = a.substr(9);
    } else {
      tail.push_back(a);
      continue;
    }
    const std::vector<std::string> extra = config_arguments(file);
    head.insert(head.end(), extra.begin(), extra.end());
  }
  head.insert(head.end(), tail.begin(), tail.end());
  return {head.rbegin(), head.rend()};
}

std::size_t parse_threads(const std::string& s) {
  if (s == "auto") return 0;
  std::size_t pos = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || v == 0) throw InvalidArgument("--threads takes a positive integer or 'auto'");
  return v;
}

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw InvalidArgument("--format takes csv or json");
}

CLI::App* add_ensemble_command(CLI::App& app, const std::string& name, const std::string& help,
                               EnsembleKind kind, EnsembleOptions& o) {
  CLI::App* sub = app.add_subcommand(name, help);
  o.cfg.ensemble.kind = kind;
  EnsembleSpec& e = o.cfg.ensemble;
  sub->add_option("--config", o.config_file, "Flat key = value file; command-line flags override it");
  sub->add_option("--alpha", e.alpha, "Decay parameter")->capture_default_str();
  sub->add_option("--N", e.dot_size, "Dot spins N")->capture_default_str();
  sub->add_option("--L", e.chain_length, "Outside spins L")->capture_default_str();
  if (kind == EnsembleKind::Ultrametric) sub->add_option("--J", e.coupling, "Coupling J")->capture_default_str();
  if (kind == EnsembleKind::QuantumSun) {
    sub->add_option("--gamma", e.gamma, "Dot prefactor")->capture_default_str();
    sub->add_option("--epsilon", e.epsilon, "Coupling exponent jitter")->capture_default_str();
  }
  sub->add_option("--realizations", o.realizations, "Independent draws (default depends on pipeline)");
  sub->add_option("--states", o.cfg.states_per_realization, "Mid-spectrum states per realization")
      ->capture_default_str();
  sub->add_option("--pipeline", o.pipeline,
                  "Comma list of: eigvec-components, schmidt-density, max-eig, min-eig, spacing-ratios, "
                  "tw-large-d");
  sub->add_option("--seed", e.seed, "Master seed")->capture_default_str();
  sub->add_option("--threads", o.threads, "Worker threads or 'auto'")->capture_default_str();
  sub->add_option("--out", o.cfg.output_dir, "Output directory")->capture_default_str();
  sub->add_option("--format", o.format, "csv or json")->capture_default_str();
  sub->add_flag("--plot", o.cfg.plot, "Also write SVG figures");
  sub->add_option("--subsystem-bits", o.subsystem_bits, "Tensor factors in subsystem 1");
  if (kind == EnsembleKind::Goe || kind == EnsembleKind::Wishart) {
    sub->add_option("--dim", o.cfg.dim, "Matrix size (default 2^(N+L), or 2^((N+L)/2) for wishart)");
  }
  if (kind == EnsembleKind::Wishart) {
    sub->add_flag("--tw-dense", o.cfg.tw_dense, "tw-large-d: dense Gaussian matrix and Lanczos");
  }
  return sub;
}

int run_ensemble(CLI::App& sub, EnsembleOptions& o) {
  ExperimentConfig& cfg = o.cfg;
  const EnsembleKind kind = cfg.ensemble.kind;
  if (!o.pipeline.empty()) {
    cfg.pipelines = parse_pipelines(o.pipeline);
  } else if (kind == EnsembleKind::Wishart) {
    cfg.pipelines = {Pipeline::MinEig};
  } else {
    cfg.pipelines = {Pipeline::SchmidtDensity};
  }
  cfg.threads = parse_threads(o.threads);
  cfg.format = parse_format(o.format);
  if (sub.count("--subsystem-bits") > 0) cfg.subsystem_bits = o.subsystem_bits;
  cfg.realizations = o.realizations > 0 ? o.realizations : default_realizations(kind, cfg.pipelines);
  cfg.validate();

  const ExperimentResult res = run_experiment(cfg);
  const std::vector<std::filesystem::path> files = write_results(res, cfg.format);
  std::cout << "config_hash " << res.config_hash << "\n";
  for (const Aggregate& a : res.aggregates) {
    std::cout << a.name << " samples=" << a.sample_count;
    for (const auto& [k, v] : a.stats) std::cout << ' ' << k << '=' << format_double(v);
    std::cout << '\n';
  }
  for (const auto& p : files) std::cout << "wrote " << p.string() << '\n';
  std::cerr << "wall time " << res.wall_time << " s\n";
  return 0;
}

struct LawsOptions {
  std::string law = "mp";
  unsigned moments = 0;
  double lo = 0.0;
  double hi = 4.0;
  std::size_t points = 401;
  std::map<std::string, double> params;
  std::string out;
};

int run_laws(CLI::App& sub, LawsOptions& o) {
  const LawId id = parse_law_id(o.law);
  std::map<std::string, double> params;
  for (const char* key : {"b", "xi", "loc", "scale", "D", "n"}) {
    if (sub.count(std::string("--") + key) > 0) params[key] = o.params[key];
  }
  if (o.moments > 0) {
    std::ostringstream line;
    line.precision(12);
    for (unsigned k = 1; k <= o.moments; ++k) {
      double m = 0.0;
      if (id == LawId::MarchenkoPastur) {
        m = mp_moment(k);
      } else if (id == LawId::LambdaMin) {
        if (params.count("D") == 0) throw InvalidArgument("lmin moments need --D");
        m = lmin_moment(k, static_cast<int>(params["D"]));
      } else {
        throw InvalidArgument("--moments is available for mp and lmin");
      }
      if (k > 1) line << ',';
      line << m;
    }
    std::cout << line.str() << '\n';
    return 0;
  }
  if (o.points < 2 || !(o.hi > o.lo)) throw InvalidArgument("grid needs hi > lo and at least 2 points");
  const LawCurve curve = tabulate(id, linspace(o.lo, o.hi, o.points), params);
  if (o.out.empty()) {
    write_law_csv(curve, std::cout);
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw IoError("cannot open " + o.out);
    write_law_csv(curve, f);
  }
  return 0;
}

struct FitOptions {
  std::string input;
  std::string law = "gev";
  std::uint64_t seed = 0;
  std::size_t bins = 2000;
};

std::vector<double> read_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<double> xs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const std::string field = line.substr(0, line.find(','));
    try {
      std::size_t pos = 0;
      const double v = std::stod(field, &pos);
      xs.push_back(v);
    } catch (const std::exception&) {
      // Header row.
    }
  }
  return xs;
}

int run_fit(FitOptions& o) {
  const std::vector<double> xs = read_values(o.input);
  nlohmann::json rec;
  rec["n"] = xs.size();
  rec["seed"] = o.seed;
  rec["law"] = o.law;
  if (o.law == "gev") {
    const GevFit f = fit_gev(xs);
    rec["parameters"] = {{"location", f.location}, {"scale", f.scale}, {"shape", f.shape}};
    rec["nll"] = f.neg_log_likelihood;
    rec["warnings"] = f.warnings;
  } else if (o.law == "ghd") {
    const GhdFit f = fit_ghd(xs, o.bins);
    rec["parameters"] = {{"b", f.b}, {"xi", f.xi}, {"a", f.a}, {"c", f.c}, {"input_scale", f.input_scale}};
    rec["nll"] = f.neg_log_likelihood;
    rec["normal_nll"] = f.normal_neg_log_likelihood;
  } else {
    throw InvalidArgument("fit --law takes gev or ghd");
  }
  std::cout << rec.dump(1) << '\n';
  return 0;
}

struct TableOptions {
  int dim = 64;
  std::size_t realizations = 600000;
  std::uint64_t seed = 0;
  std::string threads = "auto";
  std::string out;
};

int run_table1(TableOptions& o) {
  const MomentTable t = table1(o.dim, o.realizations, o.seed, parse_threads(o.threads));
  write_table_csv(t, std::cout);
  if (!o.out.empty()) {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw IoError("cannot open " + o.out);
    write_table_csv(t, f);
  }
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Random-matrix experiments on ultrametric, quantum sun, GOE and Wishart ensembles"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  EnsembleOptions um, qsm, goe, wishart;
  CLI::App* um_cmd = add_ensemble_command(app, "um", "Ultrametric ensemble", EnsembleKind::Ultrametric, um);
  CLI::App* qsm_cmd = add_ensemble_command(app, "qsm", "Quantum sun model", EnsembleKind::QuantumSun, qsm);
  CLI::App* goe_cmd = add_ensemble_command(app, "goe", "Gaussian orthogonal ensemble", EnsembleKind::Goe, goe);
  CLI::App* wishart_cmd =
      add_ensemble_command(app, "wishart", "Trace-normalized Wishart ensemble", EnsembleKind::Wishart, wishart);

  LawsOptions laws;
  CLI::App* laws_cmd = app.add_subcommand("laws", "Tabulate a reference law or print its moments");
  laws_cmd->add_option("--law", laws.law, "mp, porter-thomas, eigvec-marginal, normal, ghd, gev, lmin, tw1")
      ->capture_default_str();
  laws_cmd->add_option("--moments", laws.moments, "Print moments 1..k instead of a table");
  laws_cmd->add_option("--lo", laws.lo, "Grid start")->capture_default_str();
  laws_cmd->add_option("--hi", laws.hi, "Grid end")->capture_default_str();
  laws_cmd->add_option("--points", laws.points, "Grid points")->capture_default_str();
  for (const char* key : {"b", "xi", "loc", "scale", "D", "n"}) {
    laws_cmd->add_option(std::string("--") + key, laws.params[key], std::string("Law parameter ") + key);
  }
  laws_cmd->add_option("--out", laws.out, "CSV file (default stdout)");

  FitOptions fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Maximum-likelihood fit of samples read from a file");
  fit_cmd->add_option("--input", fit.input, "One value per line (first CSV column)")->required();
  fit_cmd->add_option("--law", fit.law, "gev or ghd")->capture_default_str();
  fit_cmd->add_option("--seed", fit.seed, "Recorded in the output")->capture_default_str();
  fit_cmd->add_option("--bins", fit.bins, "GHD likelihood bins")->capture_default_str();

  TableOptions table;
  CLI::App* table_cmd = app.add_subcommand("table1", "Moments of the smallest Schmidt eigenvalue");
  table_cmd->add_option("--dim", table.dim, "Subsystem dimension D")->capture_default_str();
  table_cmd->add_option("--realizations", table.realizations, "Wishart Monte-Carlo draws (0: exact only)")
      ->capture_default_str();
  table_cmd->add_option("--seed", table.seed, "Master seed")->capture_default_str();
  table_cmd->add_option("--threads", table.threads, "Worker threads or 'auto'")->capture_default_str();
  table_cmd->add_option("--out", table.out, "Also write the table to this CSV file");

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    CLI::App* failed = &app;
    for (CLI::App* sub : app.get_subcommands()) failed = sub;
    std::cerr << failed->help();
    return 2;
  }

  try {
    if (um_cmd->parsed()) return run_ensemble(*um_cmd, um);
    if (qsm_cmd->parsed()) return run_ensemble(*qsm_cmd, qsm);
    if (goe_cmd->parsed()) return run_ensemble(*goe_cmd, goe);
    if (wishart_cmd->parsed()) return run_ensemble(*wishart_cmd, wishart);
    if (laws_cmd->parsed()) return run_laws(*laws_cmd, laws);
    if (fit_cmd->parsed()) return run_fit(fit);
    if (table_cmd->parsed()) return run_table1(table);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ResourceLimit& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace rmtx
