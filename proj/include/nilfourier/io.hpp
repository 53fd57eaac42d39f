#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "nilfourier/catalog.hpp"

namespace nilfourier {

using Json = nlohmann::json;

/// Shortest round-trip decimal formatting; keeps CSV bodies byte-stable.
std::string format_double(double v);

/// Deterministic CSV assembly: '#'-prefixed metadata lines, one header row,
/// '.' decimal separator, ',' field separator, '\n' line endings.
class CsvWriter {
 public:
  void meta(const std::string& line);    // written as "# line"
  void header(const std::string& cols);  // comma separated column names
  void cell(double v);
  void cell(std::int64_t v);
  void cell(const std::string& v);
  void end_row();
  void raw(const std::string& lines);  // pre-formatted rows, newline-terminated
  const std::string& str() const { return body_; }
  void save(const std::filesystem::path& p) const;

 private:
  std::string body_;
  bool row_open_ = false;
};

/// Algebra definition file: {"name", "dim", "brackets": [[i, j, [c...]], ...]}
/// listing only nonzero upper-triangular brackets with 0-based indices.
/// Optional "flag": n x n row-major list of flag vectors (deepest first); the
/// refined lower-central-series flag is used when absent.
std::shared_ptr<const StructureConstants> load_algebra_json(const Json& j, Mat* flag_out);
std::shared_ptr<const StructureConstants> load_algebra_file(const std::filesystem::path& p,
                                                            Mat* flag_out);

/// Chart file: {"k", "embedMatrix": k x n row-major, "densityMode":
/// "pfaffian", optional "referenceLambda", "complementIndices"}.
DualChart load_chart_json(const Json& j, int dim);
DualChart load_chart_file(const std::filesystem::path& p, int dim);

/// Bundle from user files; reference grids must come from the run config.
GroupBundle load_group_files(const std::filesystem::path& algebra,
                             const std::filesystem::path& chart);

GridSpec grid_from_json(const Json& j);
Json grid_to_json(const GridSpec& g);

/// Sampled-function CSV: first line "# nilfourier-phi-v1 {json}" carrying the
/// grid and support, then "i0,...,re,im" rows for every grid point in C
/// order.
void save_phi_csv(const SampledGroupFunction& phi, const std::filesystem::path& p);
SampledGroupFunction load_phi_csv(const std::filesystem::path& p);

/// Kernel tensor dump: flat little-endian complex128 array, C order over
/// (lambda, x1, x), with a JSON sidecar describing the shapes.
void save_kernel_binary(const KernelTensor& kt, const std::filesystem::path& bin,
                        const std::filesystem::path& sidecar);

/// Sidecar alone, for runs that stream the binary from per-lambda payloads.
void save_kernel_sidecar(const LambdaSet& lambdas, const GridSpec& xgrid,
                         const GridSpec& eta_grid, std::int64_t samples_total,
                         std::int64_t samples_out_of_box, const std::filesystem::path& sidecar);

/// Batch run configuration (group, test function, grids, thresholds).
struct RunConfig {
  std::string group;               // preset name, or empty when files are used
  std::string algebra_file;
  std::string chart_file;
  PhiSpec phi;
  std::string phi_csv;             // overrides the family when set
  std::optional<GridSpec> g_grid, x_grid, lambda_grid;
  double epsilon = 1e-8;           // vanishing-scan threshold, relative
  double sv_tol = 1e-8;            // invertibility probe threshold
  int workers = 1;
  std::string output_dir = "out";
  std::uint64_t fingerprint = 0;   // stable hash of the canonical config text

  Json canonical;                  // the parsed config after defaulting
};

RunConfig parse_run_config(const Json& j);
RunConfig load_run_config(const std::filesystem::path& p);

/// Applies a dotted-path override ("phi.seed=7", "grids.lambda.axes.0.points=65")
/// to a config object; values parse as JSON with a string fallback.
void apply_override(Json& j, const std::string& assignment);

std::uint64_t fnv1a64(const std::string& s);

}  // namespace nilfourier
