#include "rmtx/harness/output.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "rmtx/harness/plot.hpp"
#include "rmtx/text.hpp"

namespace rmtx {

using nlohmann::json;

namespace {

constexpr const char* kSchema = "v1";

// JSON has no literal for non-finite numbers; they travel as strings.
json num(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double to_num(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
    throw IoError("bad number in results document: " + s);
  }
  return j.get<double>();
}

json num_array(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(num(x));
  return a;
}

std::vector<double> to_num_array(const json& j) {
  std::vector<double> out;
  out.reserve(j.size());
  for (const json& x : j) out.push_back(to_num(x));
  return out;
}

json num_map(const std::map<std::string, double>& m) {
  json o = json::object();
  for (const auto& [k, v] : m) o[k] = num(v);
  return o;
}

std::map<std::string, double> to_num_map(const json& j) {
  std::map<std::string, double> m;
  for (auto it = j.begin(); it != j.end(); ++it) m[it.key()] = to_num(it.value());
  return m;
}

/// The settings that determine the numbers produced. Thread count, output
/// location, format and plotting are left out.
json config_to_json(const ExperimentConfig& c) {
  const EnsembleSpec& e = c.ensemble;
  json pipelines = json::array();
  for (Pipeline p : c.pipelines) pipelines.push_back(std::string(to_string(p)));
  return json{
      {"ensemble",
       {{"kind", std::string(to_string(e.kind))},
        {"N", e.dot_size},
        {"L", e.chain_length},
        {"alpha", num(e.alpha)},
        {"J", num(e.coupling)},
        {"gamma", num(e.gamma)},
        {"epsilon", num(e.epsilon)},
        {"field_center", num(e.field_center)},
        {"field_halfwidth", num(e.field_halfwidth)},
        {"seed", e.seed}}},
      {"realizations", c.realizations},
      {"states", c.states_per_realization},
      {"subsystem_bits", c.subsystem_bits ? json(*c.subsystem_bits) : json(nullptr)},
      {"dim", c.dim},
      {"pipelines", pipelines},
      {"tw_dense", c.tw_dense},
      {"max_component_samples", c.max_component_samples},
  };
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  const json& e = j.at("ensemble");
  c.ensemble.kind = parse_ensemble_kind(e.at("kind").get<std::string>());
  c.ensemble.dot_size = e.at("N").get<unsigned>();
  c.ensemble.chain_length = e.at("L").get<unsigned>();
  c.ensemble.alpha = to_num(e.at("alpha"));
  c.ensemble.coupling = to_num(e.at("J"));
  c.ensemble.gamma = to_num(e.at("gamma"));
  c.ensemble.epsilon = to_num(e.at("epsilon"));
  c.ensemble.field_center = to_num(e.at("field_center"));
  c.ensemble.field_halfwidth = to_num(e.at("field_halfwidth"));
  c.ensemble.seed = e.at("seed").get<std::uint64_t>();
  c.realizations = j.at("realizations").get<std::size_t>();
  c.states_per_realization = j.at("states").get<std::size_t>();
  if (!j.at("subsystem_bits").is_null()) c.subsystem_bits = j.at("subsystem_bits").get<unsigned>();
  c.dim = j.at("dim").get<std::size_t>();
  c.pipelines.clear();
  for (const json& p : j.at("pipelines")) c.pipelines.push_back(parse_pipeline(p.get<std::string>()));
  c.tw_dense = j.at("tw_dense").get<bool>();
  c.max_component_samples = j.at("max_component_samples").get<std::size_t>();
  return c;
}

json distribution_to_json(const EmpiricalDistribution& d) {
  return json{{"edges", num_array(d.bin_edges)},
              {"density", num_array(d.density)},
              {"counts", d.counts},
              {"sample_count", d.sample_count},
              {"outside", d.outside},
              {"samples", num_array(d.samples)}};
}

EmpiricalDistribution distribution_from_json(const json& j) {
  EmpiricalDistribution d;
  d.bin_edges = to_num_array(j.at("edges"));
  d.density = to_num_array(j.at("density"));
  d.counts = j.at("counts").get<std::vector<std::uint64_t>>();
  d.sample_count = j.at("sample_count").get<std::uint64_t>();
  d.outside = j.at("outside").get<std::uint64_t>();
  d.samples = to_num_array(j.at("samples"));
  return d;
}

json curve_to_json(const LawCurve& c) {
  return json{{"law", std::string(to_string(c.law))},
              {"parameters", num_map(c.parameters)},
              {"grid", num_array(c.grid)},
              {"density", num_array(c.density)}};
}

LawCurve curve_from_json(const json& j) {
  LawCurve c;
  c.law = parse_law_id(j.at("law").get<std::string>());
  c.parameters = to_num_map(j.at("parameters"));
  c.grid = to_num_array(j.at("grid"));
  c.density = to_num_array(j.at("density"));
  return c;
}

json gev_to_json(const GevFit& f) {
  return json{{"location", num(f.location)},
              {"scale", num(f.scale)},
              {"shape", num(f.shape)},
              {"neg_log_likelihood", num(f.neg_log_likelihood)},
              {"sample_count", f.sample_count},
              {"starts", f.starts},
              {"converged_starts", f.converged_starts},
              {"warnings", f.warnings}};
}

GevFit gev_from_json(const json& j) {
  GevFit f;
  f.location = to_num(j.at("location"));
  f.scale = to_num(j.at("scale"));
  f.shape = to_num(j.at("shape"));
  f.neg_log_likelihood = to_num(j.at("neg_log_likelihood"));
  f.sample_count = j.at("sample_count").get<std::size_t>();
  f.starts = j.at("starts").get<std::size_t>();
  f.converged_starts = j.at("converged_starts").get<std::size_t>();
  f.warnings = j.at("warnings").get<std::vector<std::string>>();
  return f;
}

json ghd_to_json(const GhdFit& f) {
  return json{{"b", num(f.b)},
              {"xi", num(f.xi)},
              {"a", num(f.a)},
              {"c", num(f.c)},
              {"neg_log_likelihood", num(f.neg_log_likelihood)},
              {"normal_neg_log_likelihood", num(f.normal_neg_log_likelihood)},
              {"sample_count", f.sample_count},
              {"input_scale", num(f.input_scale)},
              {"converged", f.converged}};
}

GhdFit ghd_from_json(const json& j) {
  GhdFit f;
  f.b = to_num(j.at("b"));
  f.xi = to_num(j.at("xi"));
  f.a = to_num(j.at("a"));
  f.c = to_num(j.at("c"));
  f.neg_log_likelihood = to_num(j.at("neg_log_likelihood"));
  f.normal_neg_log_likelihood = to_num(j.at("normal_neg_log_likelihood"));
  f.sample_count = j.at("sample_count").get<std::uint64_t>();
  f.input_scale = to_num(j.at("input_scale"));
  f.converged = j.at("converged").get<bool>();
  return f;
}

std::string provenance(const ExperimentResult& res) {
  return "# rmtx " + res.version + " config_hash=" + res.config_hash + " seed=" + std::to_string(res.seed);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

std::string law_tag(const LawCurve& c) { return std::string(to_string(c.law)); }

std::string plot_legend_title(const ExperimentResult& res, const Aggregate& a) {
  return std::string(to_string(res.config.ensemble.kind)) + " " + a.name + " (n=" +
         std::to_string(a.sample_count) + ")";
}

}  // namespace

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string canon = config_to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_results_json(const ExperimentResult& res, std::ostream& out) {
  json aggs = json::array();
  for (const Aggregate& a : res.aggregates) {
    json overlays = json::array();
    for (const LawCurve& c : a.overlays) overlays.push_back(curve_to_json(c));
    aggs.push_back(json{{"name", a.name},
                        {"sample_count", a.sample_count},
                        {"values", num_array(a.values)},
                        {"histogram", distribution_to_json(a.histogram)},
                        {"stats", num_map(a.stats)},
                        {"overlays", overlays}});
  }
  json doc{{"schema", kSchema},
           {"version", res.version},
           {"config_hash", res.config_hash},
           {"seed", res.seed},
           {"config", config_to_json(res.config)},
           {"aggregates", aggs},
           {"gev", res.gev ? gev_to_json(*res.gev) : json(nullptr)},
           {"ghd", res.ghd ? ghd_to_json(*res.ghd) : json(nullptr)}};
  out << doc.dump(1) << '\n';
}

ExperimentResult read_results_json(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed results document: ") + e.what());
  }
  if (doc.value("schema", "") != kSchema) throw IoError("unsupported results schema");
  try {
    ExperimentResult res;
    res.version = doc.at("version").get<std::string>();
    res.config_hash = doc.at("config_hash").get<std::string>();
    res.seed = doc.at("seed").get<std::uint64_t>();
    res.config = config_from_json(doc.at("config"));
    for (const json& j : doc.at("aggregates")) {
      Aggregate a;
      a.name = j.at("name").get<std::string>();
      a.sample_count = j.at("sample_count").get<std::uint64_t>();
      a.values = to_num_array(j.at("values"));
      a.histogram = distribution_from_json(j.at("histogram"));
      a.stats = to_num_map(j.at("stats"));
      for (const json& c : j.at("overlays")) a.overlays.push_back(curve_from_json(c));
      res.aggregates.push_back(std::move(a));
    }
    if (!doc.at("gev").is_null()) res.gev = gev_from_json(doc.at("gev"));
    if (!doc.at("ghd").is_null()) res.ghd = ghd_from_json(doc.at("ghd"));
    return res;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed results document: ") + e.what());
  }
}

std::vector<std::filesystem::path> write_results(const ExperimentResult& res, OutputFormat format) {
  namespace fs = std::filesystem;
  const fs::path dir = res.config.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  const std::string stem = std::string(to_string(res.config.ensemble.kind)) + "_" + res.config_hash;
  std::vector<fs::path> written;

  if (format == OutputFormat::Json) {
    const fs::path path = dir / (stem + ".json");
    std::ofstream out = open_out(path);
    write_results_json(res, out);
    check_written(out, path);
    written.push_back(path);
  } else {
    const std::string prov = provenance(res);
    for (const Aggregate& a : res.aggregates) {
      const fs::path hist_path = dir / (stem + "_" + a.name + ".csv");
      std::ofstream out = open_out(hist_path);
      out << prov << " samples=" << a.sample_count << '\n';
      out << "bin_lo,bin_hi,count,density\n";
      const EmpiricalDistribution& h = a.histogram;
      for (std::size_t i = 0; i < h.bins(); ++i) {
        out << format_double(h.bin_edges[i]) << ',' << format_double(h.bin_edges[i + 1]) << ','
            << h.counts[i] << ',' << format_double(h.density[i]) << '\n';
      }
      check_written(out, hist_path);
      written.push_back(hist_path);

      const fs::path values_path = dir / (stem + "_" + a.name + "_values.csv");
      std::ofstream vout = open_out(values_path);
      vout << prov << " samples=" << a.sample_count << '\n' << "value\n";
      for (double v : a.values) vout << format_double(v) << '\n';
      check_written(vout, values_path);
      written.push_back(values_path);

      for (const LawCurve& c : a.overlays) {
        const fs::path law_path = dir / (stem + "_" + a.name + "_law_" + law_tag(c) + ".csv");
        std::ofstream lout = open_out(law_path);
        lout << prov;
        for (const auto& [k, v] : c.parameters) lout << ' ' << k << '=' << format_double(v);
        lout << '\n';
        write_law_csv(c, lout);
        check_written(lout, law_path);
        written.push_back(law_path);
      }
    }

    const fs::path summary_path = dir / (stem + "_summary.csv");
    std::ofstream out = open_out(summary_path);
    out << prov << '\n' << "aggregate,key,value\n";
    for (const Aggregate& a : res.aggregates) {
      out << a.name << ",sample_count," << a.sample_count << '\n';
      for (const auto& [k, v] : a.stats) out << a.name << ',' << k << ',' << format_double(v) << '\n';
    }
    if (res.gev) {
      out << "gev_fit,location," << format_double(res.gev->location) << '\n'
          << "gev_fit,scale," << format_double(res.gev->scale) << '\n'
          << "gev_fit,shape," << format_double(res.gev->shape) << '\n'
          << "gev_fit,neg_log_likelihood," << format_double(res.gev->neg_log_likelihood) << '\n'
          << "gev_fit,sample_count," << res.gev->sample_count << '\n';
    }
    if (res.ghd) {
      out << "ghd_fit,b," << format_double(res.ghd->b) << '\n'
          << "ghd_fit,xi," << format_double(res.ghd->xi) << '\n'
          << "ghd_fit,a," << format_double(res.ghd->a) << '\n'
          << "ghd_fit,c," << format_double(res.ghd->c) << '\n'
          << "ghd_fit,neg_log_likelihood," << format_double(res.ghd->neg_log_likelihood) << '\n'
          << "ghd_fit,normal_neg_log_likelihood," << format_double(res.ghd->normal_neg_log_likelihood) << '\n'
          << "ghd_fit,sample_count," << res.ghd->sample_count << '\n';
    }
    check_written(out, summary_path);
    written.push_back(summary_path);
  }

  if (res.config.plot) {
    for (const Aggregate& a : res.aggregates) {
      if (a.histogram.bins() == 0) continue;
      PlotLabels labels;
      labels.title = plot_legend_title(res, a);
      labels.x_label = a.name;
      labels.y_label = "density";
      labels.provenance = provenance(res).substr(2);
      for (const PlotStyle style : {PlotStyle::Linear, PlotStyle::LogY}) {
        const std::string suffix = style == PlotStyle::Linear ? ".svg" : "_logy.svg";
        const fs::path path = dir / (stem + "_" + a.name + suffix);
        emit_plot(a.histogram, a.overlays, style, path, labels);
        written.push_back(path);
      }
    }
  }
  return written;
}

void write_table_csv(const MomentTable& table, std::ostream& out) {
  out << "# rmtx " << RMTX_VERSION << " D=" << table.dim << '\n';
  out << "k,analytical";
  for (const std::string& c : table.column_names) out << ',' << c;
  out << '\n';
  for (const MomentRow& row : table.rows) {
    out << row.k << ',' << format_double(row.analytical);
    for (const std::string& c : table.column_names) {
      const auto it = row.columns.find(c);
      out << ',' << (it == row.columns.end() ? std::string() : format_double(it->second));
    }
    out << '\n';
  }
}

}  // namespace rmtx
