#include "rmtx/harness/experiment.hpp"

#include <dlfcn.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <thread>

#include "rmtx/harness/output.hpp"
#include "rmtx/harness/parallel.hpp"
#include "rmtx/simd/kernels.hpp"
#include "rmtx/spectra.hpp"

namespace rmtx {

std::string_view to_string(Pipeline p) {
  switch (p) {
    case Pipeline::EigvecComponents: return "eigvec-components";
    case Pipeline::SchmidtDensity: return "schmidt-density";
    case Pipeline::MaxEig: return "max-eig";
    case Pipeline::MinEig: return "min-eig";
    case Pipeline::SpacingRatios: return "spacing-ratios";
    case Pipeline::TwLargeD: return "tw-large-d";
  }
  return "unknown";
}

Pipeline parse_pipeline(std::string_view name) {
  for (Pipeline p : {Pipeline::EigvecComponents, Pipeline::SchmidtDensity, Pipeline::MaxEig,
                     Pipeline::MinEig, Pipeline::SpacingRatios, Pipeline::TwLargeD}) {
    if (to_string(p) == name) return p;
  }
  throw InvalidArgument("unknown pipeline: " + std::string(name));
}

std::vector<Pipeline> parse_pipelines(std::string_view list) {
  std::vector<Pipeline> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const std::size_t comma = std::min(list.find(',', pos), list.size());
    const std::string_view item = list.substr(pos, comma - pos);
    if (!item.empty()) {
      const Pipeline p = parse_pipeline(item);
      if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    }
    pos = comma + 1;
  }
  if (out.empty()) throw InvalidArgument("no pipeline given");
  return out;
}

// ---------------------------------------------------------------------------

std::pair<std::size_t, std::size_t> ExperimentConfig::bipartition() const {
  const unsigned total = ensemble.log2_dimension();
  const unsigned bits = subsystem_bits.value_or(total / 2);
  return {std::size_t{1} << bits, std::size_t{1} << (total - bits)};
}

std::size_t ExperimentConfig::matrix_dim() const {
  if (dim != 0) return dim;
  const unsigned total = ensemble.log2_dimension();
  if (ensemble.kind == EnsembleKind::Wishart) return std::size_t{1} << (total / 2);
  return std::size_t{1} << total;
}

bool ExperimentConfig::has(Pipeline p) const {
  return std::find(pipelines.begin(), pipelines.end(), p) != pipelines.end();
}

namespace {

bool is_hamiltonian(EnsembleKind k) { return k != EnsembleKind::Wishart; }

}  // namespace

void ExperimentConfig::validate() const {
  ensemble.validate();
  if (realizations == 0) throw InvalidArgument("realizations must be positive");
  if (pipelines.empty()) throw InvalidArgument("no pipeline selected");
  const EnsembleKind kind = ensemble.kind;
  for (Pipeline p : pipelines) {
    const bool wishart_ok = p == Pipeline::SchmidtDensity || p == Pipeline::MaxEig ||
                            p == Pipeline::MinEig || p == Pipeline::TwLargeD;
    if (kind == EnsembleKind::Wishart && !wishart_ok) {
      throw InvalidArgument("pipeline " + std::string(to_string(p)) + " needs a Hamiltonian ensemble");
    }
    if (kind != EnsembleKind::Wishart && p == Pipeline::TwLargeD) {
      throw InvalidArgument("tw-large-d runs on the wishart ensemble");
    }
  }
  if (kind == EnsembleKind::Wishart && has(Pipeline::TwLargeD) && pipelines.size() > 1) {
    throw InvalidArgument("tw-large-d cannot be combined with other pipelines");
  }
  if (is_hamiltonian(kind)) {
    const std::size_t order = kind == EnsembleKind::Goe ? matrix_dim() : ensemble.dimension();
    if (order > (std::size_t{1} << kDefaultMaxLog2Order)) {
      throw ResourceLimit("dense diagonalization refused above order 2^" +
                          std::to_string(kDefaultMaxLog2Order));
    }
    if (states_per_realization == 0 || states_per_realization > order) {
      throw InvalidArgument("states must lie in [1, order]");
    }
    const unsigned total = kind == EnsembleKind::Goe
                               ? static_cast<unsigned>(std::llround(std::log2(static_cast<double>(order))))
                               : ensemble.log2_dimension();
    if (kind == EnsembleKind::Goe && (std::size_t{1} << total) != order &&
        (has(Pipeline::SchmidtDensity) || has(Pipeline::MaxEig) || has(Pipeline::MinEig))) {
      throw InvalidArgument("Schmidt pipelines need a power-of-two GOE order");
    }
    if (subsystem_bits && *subsystem_bits > total) throw InvalidArgument("subsystem bits exceed N + L");
    if (has(Pipeline::SchmidtDensity)) {
      const auto [d1, d2] = bipartition();
      if (kind != EnsembleKind::Goe && d1 != d2) {
        throw InvalidArgument("schmidt-density needs a square bipartition");
      }
    }
  } else if (matrix_dim() == 0) {
    throw InvalidArgument("wishart dimension must be positive");
  }
}

const Aggregate* ExperimentResult::find(std::string_view name) const {
  for (const Aggregate& a : aggregates) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

const Aggregate& ExperimentResult::at(std::string_view name) const {
  const Aggregate* a = find(name);
  if (a == nullptr) throw InvalidArgument("no aggregate named " + std::string(name));
  return *a;
}

std::size_t default_realizations(EnsembleKind kind, const std::vector<Pipeline>& p) {
  if (std::find(p.begin(), p.end(), Pipeline::TwLargeD) != p.end()) return 30000;
  if (kind == EnsembleKind::Wishart) return 600000;
  return 200;
}

void pin_blas_single_thread() {
  using SetThreads = void (*)(int);
  for (const char* name : {"openblas_set_num_threads", "goto_set_num_threads"}) {
    if (void* sym = ::dlsym(RTLD_DEFAULT, name)) {
      reinterpret_cast<SetThreads>(sym)(1);
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// Per-realization work

namespace {

constexpr double kComponentRange = 10.0;
constexpr std::size_t kComponentBins = 4000;

struct Partial {
  std::vector<double> schmidt_rescaled;
  std::vector<double> lambda_max;
  std::vector<double> lambda_min;
  std::vector<double> spacing_ratios;
  std::vector<double> tw_rescaled;
  std::vector<double> components;  // capped raw sample
  BinnedCounts component_counts;
  double mean_spacing_ratio = 0.0;
  std::size_t component_total = 0;
};

struct Context {
  const ExperimentConfig& cfg;
  std::size_t d1 = 0;
  std::size_t d2 = 0;
  std::size_t order = 0;
  std::size_t component_cap_per_realization = 0;
};

void record_schmidt(const Context& ctx, const SchmidtSpectrum& s, Partial& out) {
  const ExperimentConfig& cfg = ctx.cfg;
  if (cfg.has(Pipeline::SchmidtDensity)) {
    const double d = static_cast<double>(s.values.size());
    for (double v : s.values) out.schmidt_rescaled.push_back(d * v);
  }
  if (cfg.has(Pipeline::MaxEig)) out.lambda_max.push_back(s.max());
  if (cfg.has(Pipeline::MinEig)) out.lambda_min.push_back(s.min());
}

DenseSymmetricMatrix build_hamiltonian(const ExperimentConfig& cfg, std::size_t order, Rng& rng) {
  switch (cfg.ensemble.kind) {
    case EnsembleKind::Goe: return sample_goe(order, rng);
    case EnsembleKind::Ultrametric: return build_ultrametric(cfg.ensemble, rng);
    case EnsembleKind::QuantumSun: return build_qsm(cfg.ensemble, rng).to_dense();
    case EnsembleKind::Wishart: break;
  }
  throw InvalidArgument("not a Hamiltonian ensemble");
}

Partial run_hamiltonian(const Context& ctx, Rng& rng) {
  const ExperimentConfig& cfg = ctx.cfg;
  Partial out;
  const DenseSymmetricMatrix h = build_hamiltonian(cfg, ctx.order, rng);
  if (cfg.has(Pipeline::SpacingRatios)) {
    const std::vector<double> ev = full_eigh(h, false).eigenvalues;
    // Central half of the spectrum.
    const std::size_t lo = ctx.order / 4;
    const std::size_t hi = ctx.order - ctx.order / 4;
    out.spacing_ratios = spacing_ratios(std::span<const double>(ev).subspan(lo, hi - lo));
  }
  const bool need_states = cfg.has(Pipeline::EigvecComponents) || cfg.has(Pipeline::SchmidtDensity) ||
                           cfg.has(Pipeline::MaxEig) || cfg.has(Pipeline::MinEig);
  if (!need_states) return out;

  const IndexWindow w = mid_spectrum_window(ctx.order, cfg.states_per_realization);
  const EigenSystem es = eigh_window(h, w.first, w.count);
  const double root_d = std::sqrt(static_cast<double>(ctx.order));
  if (cfg.has(Pipeline::EigvecComponents)) {
    out.component_counts = BinnedCounts(-kComponentRange, kComponentRange, kComponentBins);
  }
  for (std::size_t k = 0; k < es.count(); ++k) {
    const std::span<const double> v = es.vector(k);
    if (cfg.has(Pipeline::EigvecComponents)) {
      for (double x : v) {
        const double c = root_d * x;
        out.component_counts.add(c);
        if (out.components.size() < ctx.component_cap_per_realization) out.components.push_back(c);
      }
    }
    if (cfg.has(Pipeline::SchmidtDensity) || cfg.has(Pipeline::MaxEig) || cfg.has(Pipeline::MinEig)) {
      record_schmidt(ctx, schmidt_spectrum(v, ctx.d1, ctx.d2), out);
    }
  }
  return out;
}

double tw_dense_lambda_max(std::size_t d, Rng& rng, double& trace) {
  std::normal_distribution<double> normal;
  std::vector<double> g(d * d);
  for (double& x : g) x = normal(rng);
  std::vector<double> w(d * d);
  simd::kernels().gram_rows(g.data(), d, d, w.data());
  DenseSymmetricMatrix m(d);
  trace = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    trace += w[i * d + i];
    for (std::size_t j = i; j < d; ++j) m.ref(i, j) = w[i * d + j];
  }
  return extreme_eigenvalue(m, Extreme::Max);
}

Partial run_wishart(const Context& ctx, Rng& rng) {
  const ExperimentConfig& cfg = ctx.cfg;
  Partial out;
  const std::size_t d = ctx.order;
  if (cfg.has(Pipeline::TwLargeD)) {
    double lambda = 0.0;
    double trace = 0.0;
    if (cfg.tw_dense) {
      lambda = tw_dense_lambda_max(d, rng, trace);
    } else {
      const WishartBidiagonal b = sample_wishart_bidiagonal(d, d, rng);
      lambda = wishart_lambda_max(b);
      trace = b.trace();
    }
    const CenterScale cs = johnstone_center_scale(static_cast<int>(d));
    out.tw_rescaled.push_back((lambda / trace - cs.center) / cs.scale);
    return out;
  }
  record_schmidt(ctx, sample_trace_wishart(d, rng), out);
  return out;
}

void append(std::vector<double>& dst, const std::vector<double>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

struct Merged {
  Partial data;
  std::vector<double> spacing_means;
};

void merge_into(Merged& m, Partial&& p, std::size_t component_cap) {
  append(m.data.schmidt_rescaled, p.schmidt_rescaled);
  append(m.data.lambda_max, p.lambda_max);
  append(m.data.lambda_min, p.lambda_min);
  append(m.data.tw_rescaled, p.tw_rescaled);
  if (!p.spacing_ratios.empty()) {
    append(m.data.spacing_ratios, p.spacing_ratios);
    double s = 0.0;
    for (double r : p.spacing_ratios) s += r;
    m.spacing_means.push_back(s / static_cast<double>(p.spacing_ratios.size()));
  }
  if (p.component_counts.bins() > 0) m.data.component_counts.merge(p.component_counts);
  const std::size_t room = component_cap - std::min(component_cap, m.data.components.size());
  m.data.components.insert(m.data.components.end(), p.components.begin(),
                           p.components.begin() + static_cast<std::ptrdiff_t>(std::min(room, p.components.size())));
}

// ---------------------------------------------------------------------------
// Post-processing

Aggregate make_aggregate(std::string name, std::vector<double> values, std::size_t bins = 0,
                         std::optional<std::pair<double, double>> range = {}) {
  Aggregate a;
  a.name = std::move(name);
  a.sample_count = values.size();
  if (!values.empty()) a.histogram = histogram(values, bins, range, false);
  a.values = std::move(values);
  return a;
}

/// Largest deviation between the histogram and the bin-averaged MP density,
/// over bins lying inside [lo, hi].
double mp_sup_error(const EmpiricalDistribution& h, double lo, double hi) {
  double worst = 0.0;
  for (std::size_t i = 0; i < h.bins(); ++i) {
    const double a = h.bin_edges[i];
    const double b = h.bin_edges[i + 1];
    if (a < lo || b > hi) continue;
    const double expected = (mp_cdf(b) - mp_cdf(a)) / (b - a);
    worst = std::max(worst, std::abs(h.density[i] - expected));
  }
  return worst;
}

void finish_schmidt_density(Aggregate& a) {
  if (a.values.empty()) return;
  a.histogram = histogram(a.values, 200, std::make_pair(0.0, std::max(4.0, *std::max_element(a.values.begin(), a.values.end()))), false);
  a.stats["ks_vs_mp"] = ks_distance(a.values, [](double x) { return mp_cdf(x); });
  const EmpiricalDistribution fine = histogram(a.values, 100, std::make_pair(0.0, 4.0), false);
  a.stats["mp_sup_error_0.2_3.8"] = mp_sup_error(fine, 0.2, 3.8);
  for (unsigned k = 1; k <= 12; ++k) {
    a.stats["root_moment_" + std::to_string(k)] = empirical_root_moment(a.values, k);
    a.stats["mp_root_moment_" + std::to_string(k)] = std::pow(mp_moment(k), 1.0 / k);
  }
  std::vector<double> grid = linspace(0.0, 4.0, 401);
  grid.front() = 1e-3;
  a.overlays.push_back(tabulate(LawId::MarchenkoPastur, grid));
}

void finish_lambda_max(Aggregate& a, int dim, std::optional<GevFit>& gev) {
  if (a.values.empty()) return;
  a.stats["mean"] = sample_mean(a.values);
  const CenterScale cs = johnstone_center_scale(dim);
  const std::vector<double> rescaled = center_rescale(a.values, cs.center, cs.scale);
  a.stats["ks_vs_tw1_johnstone"] = ks_distance(rescaled, [](double s) { return tracy_widom_f1_cdf(s); });
  if (a.values.size() >= 3) {
    const GevFit fit = fit_gev(a.values);
    a.stats["gev_location"] = fit.location;
    a.stats["gev_scale"] = fit.scale;
    a.stats["gev_shape"] = fit.shape;
    a.stats["gev_nll"] = fit.neg_log_likelihood;
    const auto [lo, hi] = std::minmax_element(a.values.begin(), a.values.end());
    a.overlays.push_back(tabulate(LawId::Gev, linspace(*lo, *hi, 400),
                                  {{"loc", fit.location}, {"scale", fit.scale}, {"xi", fit.shape}}));
    gev = fit;
  }
}

void finish_lambda_min(Aggregate& a, int dim) {
  if (a.values.empty()) return;
  for (unsigned k = 1; k <= 5; ++k) {
    long double acc = 0.0L;
    for (double v : a.values) acc += std::pow(static_cast<long double>(v), static_cast<int>(k));
    const double mc = static_cast<double>(acc / static_cast<long double>(a.values.size()));
    a.stats["moment_" + std::to_string(k)] = mc;
    a.stats["exact_moment_" + std::to_string(k)] = lmin_moment(k, dim);
  }
  const double hi = 1.0 / dim;
  std::vector<double> grid = linspace(0.0, std::min(hi, *std::max_element(a.values.begin(), a.values.end()) * 1.2), 300);
  grid.front() = grid[1] * 1e-3;
  a.overlays.push_back(tabulate(LawId::LambdaMin, grid, {{"D", static_cast<double>(dim)}}));
}

void finish_tw(Aggregate& a) {
  if (a.values.empty()) return;
  a.stats["ks_vs_tw1"] = ks_distance(a.values, [](double s) { return tracy_widom_f1_cdf(s); });
  a.stats["mean"] = sample_mean(a.values);
  if (a.values.size() > 1) a.stats["variance"] = sample_variance(a.values);
  a.overlays.push_back(tabulate(LawId::TracyWidom1, linspace(-6.0, 5.0, 400)));
}

void finish_components(Aggregate& a, const BinnedCounts& counts, std::optional<GhdFit>& ghd) {
  a.sample_count = counts.total();
  a.histogram = counts.to_distribution();
  const double rms = std::sqrt(counts.sum_squares() / static_cast<double>(counts.total()));
  a.stats["rms"] = rms;
  a.stats["outside_range"] = static_cast<double>(counts.outside());
  if (!a.values.empty()) {
    a.stats["ks_vs_normal"] = ks_distance(a.values, [](double x) { return normal_cdf(x); });
    std::vector<double> intensity(a.values.size());
    for (std::size_t i = 0; i < intensity.size(); ++i) intensity[i] = a.values[i] * a.values[i];
    a.stats["ks_intensity_vs_porter_thomas"] =
        ks_distance(intensity, [](double y) { return porter_thomas_cdf(y); });
  }
  const GhdFit fit = fit_ghd(counts, rms);
  a.stats["ghd_b"] = fit.b;
  a.stats["ghd_xi"] = fit.xi;
  a.stats["ghd_nll"] = fit.neg_log_likelihood;
  a.stats["normal_nll"] = fit.normal_neg_log_likelihood;
  const std::vector<double> grid = linspace(-6.0, 6.0, 481);
  a.overlays.push_back(tabulate(LawId::Ghd, grid, {{"b", fit.b}, {"xi", fit.xi}}));
  a.overlays.push_back(tabulate(LawId::Normal, grid));
  ghd = fit;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  pin_blas_single_thread();
  const auto t0 = std::chrono::steady_clock::now();

  ExperimentResult res;
  res.config = cfg;
  res.config_hash = config_hash(cfg);
  res.version = RMTX_VERSION;
  res.seed = cfg.ensemble.seed;

  Context ctx{cfg};
  const bool hamiltonian = is_hamiltonian(cfg.ensemble.kind);
  ctx.order = hamiltonian && cfg.ensemble.kind != EnsembleKind::Goe ? cfg.ensemble.dimension()
                                                                     : cfg.matrix_dim();
  if (hamiltonian) {
    if (cfg.ensemble.kind == EnsembleKind::Goe) {
      const unsigned total = static_cast<unsigned>(std::llround(std::log2(static_cast<double>(ctx.order))));
      const unsigned bits = cfg.subsystem_bits.value_or(total / 2);
      ctx.d1 = std::size_t{1} << bits;
      ctx.d2 = ctx.order / ctx.d1;
    } else {
      std::tie(ctx.d1, ctx.d2) = cfg.bipartition();
    }
  } else {
    ctx.d1 = ctx.d2 = ctx.order;
  }
  ctx.component_cap_per_realization = cfg.max_component_samples;

  const std::size_t threads =
      cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
  const std::size_t batch = hamiltonian ? std::max<std::size_t>(threads, 16) : 4096;
  const std::uint64_t seed = cfg.ensemble.seed;

  Merged merged;
  auto work = [&](std::size_t i) {
    Rng rng = make_stream(seed, i);
    return hamiltonian ? run_hamiltonian(ctx, rng) : run_wishart(ctx, rng);
  };
  auto sink = [&](Partial&& p) { merge_into(merged, std::move(p), cfg.max_component_samples); };
  parallel_ordered(cfg.realizations, threads, batch, work, sink, seed);

  const int schmidt_dim = static_cast<int>(std::min(ctx.d1, ctx.d2));
  Partial& m = merged.data;
  if (cfg.has(Pipeline::EigvecComponents)) {
    Aggregate a;
    a.name = "eigvec_components";
    a.values = std::move(m.components);
    finish_components(a, m.component_counts, res.ghd);
    res.aggregates.push_back(std::move(a));
  }
  if (cfg.has(Pipeline::SchmidtDensity)) {
    Aggregate a = make_aggregate("schmidt_rescaled", std::move(m.schmidt_rescaled));
    finish_schmidt_density(a);
    res.aggregates.push_back(std::move(a));
  }
  if (cfg.has(Pipeline::MaxEig)) {
    Aggregate a = make_aggregate("lambda_max", std::move(m.lambda_max));
    finish_lambda_max(a, schmidt_dim, res.gev);
    res.aggregates.push_back(std::move(a));
  }
  if (cfg.has(Pipeline::MinEig)) {
    Aggregate a = make_aggregate("lambda_min", std::move(m.lambda_min));
    finish_lambda_min(a, schmidt_dim);
    res.aggregates.push_back(std::move(a));
  }
  if (cfg.has(Pipeline::SpacingRatios)) {
    Aggregate a = make_aggregate("spacing_ratios", std::move(m.spacing_ratios), 0, std::make_pair(0.0, 1.0));
    if (!a.values.empty()) a.stats["mean"] = sample_mean(a.values);
    res.aggregates.push_back(std::move(a));
  }
  if (cfg.has(Pipeline::TwLargeD)) {
    Aggregate a = make_aggregate("tw_rescaled", std::move(m.tw_rescaled));
    finish_tw(a);
    res.aggregates.push_back(std::move(a));
  }
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// ---------------------------------------------------------------------------

void MomentTable::add_column(const std::string& name, const std::vector<double>& lambda_min) {
  if (lambda_min.empty()) throw InvalidArgument("add_column: no samples");
  column_names.push_back(name);
  for (MomentRow& row : rows) {
    long double acc = 0.0L;
    for (double v : lambda_min) acc += std::pow(static_cast<long double>(v), static_cast<int>(row.k));
    row.columns[name] = static_cast<double>(acc / static_cast<long double>(lambda_min.size()));
  }
}

MomentTable table1(int dim, std::size_t realizations, std::uint64_t seed, std::size_t threads) {
  if (dim < 2) throw InvalidArgument("table1: D must be at least 2");
  MomentTable t;
  t.dim = dim;
  for (unsigned k = 1; k <= 5; ++k) t.rows.push_back({k, lmin_moment(k, dim), {}});
  if (realizations > 0) {
    ExperimentConfig cfg;
    cfg.ensemble.kind = EnsembleKind::Wishart;
    cfg.ensemble.seed = seed;
    cfg.dim = static_cast<std::size_t>(dim);
    cfg.realizations = realizations;
    cfg.pipelines = {Pipeline::MinEig};
    cfg.threads = threads;
    const ExperimentResult r = run_experiment(cfg);
    t.add_column("wishart_mc", r.at("lambda_min").values);
  }
  return t;
}

}  // namespace rmtx
