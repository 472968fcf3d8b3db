#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rmtx/ensembles.hpp"
#include "rmtx/errors.hpp"
#include "rmtx/laws.hpp"
#include "rmtx/stats.hpp"

namespace rmtx {

enum class Pipeline {
  EigvecComponents,
  SchmidtDensity,
  MaxEig,
  MinEig,
  SpacingRatios,
  TwLargeD,
};

[[nodiscard]] std::string_view to_string(Pipeline p);
[[nodiscard]] Pipeline parse_pipeline(std::string_view name);
/// Comma-separated list of pipeline names.
[[nodiscard]] std::vector<Pipeline> parse_pipelines(std::string_view list);

enum class OutputFormat { Csv, Json };

struct ExperimentConfig {
  EnsembleSpec ensemble;
  std::size_t realizations = 200;
  std::size_t states_per_realization = 300;
  /// Number of leading (slowest) tensor factors in subsystem 1; by default
  /// floor(log2 D / 2).
  std::optional<unsigned> subsystem_bits;
  /// Matrix size for GOE (order) and Wishart (d); 0 derives it from N + L.
  std::size_t dim = 0;
  std::vector<Pipeline> pipelines = {Pipeline::SchmidtDensity};
  /// TW_LargeD: explicit Gaussian matrix plus Lanczos instead of the
  /// bidiagonal model.
  bool tw_dense = false;
  /// Cap on raw eigenvector components kept for KS tests (histogram counts
  /// always cover every component).
  std::size_t max_component_samples = 2'000'000;

  std::string output_dir = "out";
  std::size_t threads = 0;  // 0 = hardware concurrency
  OutputFormat format = OutputFormat::Csv;
  bool plot = false;

  /// Dimensions (d1, d2) of the bipartition of Hamiltonian eigenstates.
  [[nodiscard]] std::pair<std::size_t, std::size_t> bipartition() const;
  /// Matrix size for GOE and Wishart.
  [[nodiscard]] std::size_t matrix_dim() const;
  [[nodiscard]] bool has(Pipeline p) const;
  /// Throws InvalidArgument on inconsistent settings.
  void validate() const;
};

/// One aggregated output series.
struct Aggregate {
  std::string name;
  std::uint64_t sample_count = 0;
  std::vector<double> values;  // raw values; may be capped
  EmpiricalDistribution histogram;
  std::map<std::string, double> stats;
  std::vector<LawCurve> overlays;
};

struct ExperimentResult {
  std::string config_hash;
  std::string version;
  std::uint64_t seed = 0;
  ExperimentConfig config;
  std::vector<Aggregate> aggregates;
  std::optional<GevFit> gev;
  std::optional<GhdFit> ghd;
  /// Not persisted, so repeated runs stay byte-identical.
  double wall_time = 0.0;

  [[nodiscard]] const Aggregate* find(std::string_view name) const;
  [[nodiscard]] const Aggregate& at(std::string_view name) const;
};

/// A realization threw; carries its index and derived seed for a repro run.
class RealizationFailure : public Error {
 public:
  RealizationFailure(std::size_t index, std::uint64_t seed, const std::string& what)
      : Error("realization " + std::to_string(index) + " (seed " + std::to_string(seed) +
              ") failed: " + what),
        index_(index),
        seed_(seed) {}
  [[nodiscard]] std::size_t index() const noexcept { return index_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::size_t index_;
  std::uint64_t seed_;
};

/// Runs `realizations` independent draws in a thread pool. Realization i uses
/// the generator seeded with split_seed(seed, i); partial results merge in
/// index order, so the result does not depend on thread count or schedule.
[[nodiscard]] ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Default realization count for an ensemble and pipeline set.
[[nodiscard]] std::size_t default_realizations(EnsembleKind kind, const std::vector<Pipeline>& p);

/// Limits BLAS/LAPACK to one internal thread so results do not depend on its
/// scheduling; parallelism comes from the realization pool.
void pin_blas_single_thread();

struct MomentRow {
  unsigned k = 0;
  double analytical = 0.0;
  std::map<std::string, double> columns;
};

struct MomentTable {
  int dim = 0;
  std::vector<MomentRow> rows;
  std::vector<std::string> column_names;

  /// Adds a column of Monte-Carlo moments from smallest-eigenvalue samples.
  void add_column(const std::string& name, const std::vector<double>& lambda_min);
};

/// Moments k = 1..5 of the smallest Schmidt eigenvalue: the exact formula, and
/// a trace-normalized Wishart Monte-Carlo column when realizations > 0.
[[nodiscard]] MomentTable table1(int dim, std::size_t realizations, std::uint64_t seed = 0,
                                 std::size_t threads = 0);

}  // namespace rmtx
