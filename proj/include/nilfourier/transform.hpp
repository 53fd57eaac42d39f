#pragma once

#include <string>
#include <vector>

#include "nilfourier/induced.hpp"
#include "nilfourier/phi.hpp"

namespace nilfourier {

/// Evaluation points on the dual chart. Either an explicit list or a full
/// tensor grid; grid-structured sets carry a mask for non-generic points
/// (zero Plancherel density), which are skipped by the operator computations
/// and excluded from integrals and adjacency logic.
struct LambdaSet {
  std::vector<Vec> points;
  std::vector<char> masked;  // parallel to points
  GridSpec grid;             // valid iff grid_structured
  bool grid_structured = false;

  std::int64_t size() const { return std::int64_t(points.size()); }

  static LambdaSet from_points(std::vector<Vec> pts);
  /// Flattens the grid (C order) and masks points flagged non-generic by the
  /// chart's Plancherel density.
  static LambdaSet from_grid(const GridSpec& g, const StructureConstants& sc,
                             const DualChart& chart);
  /// Uniformly spaced points on a segment (1-dim charts), no grid structure.
  static LambdaSet segment(double lo, double hi, int count);
};

/// Discretized operator phi_hat(pi_lambda) on L2 of the X-grid. Entries have
/// the X quadrature weights baked in: (M f)(x1) = sum_x M(x1, x) f(x).
struct OperatorMatrix {
  Vec lambda;
  CMat mat;
  GridSpec xgrid;
};

/// Squared Hilbert-Schmidt norm of the operator the matrix represents on the
/// weighted grid space: sum w_x1 |M(x1,x)|^2 / w_x.
double hs_norm_sq(const OperatorMatrix& op);

/// phi_hat(pi_lambda) = integral of phi(g) pi_lambda(g) dg assembled by
/// trapezoid quadrature over phi's grid and the action on the X-grid; all
/// lambdas share one sweep (the factorization work is lambda-independent).
/// Masked lambdas produce zero matrices.
std::vector<OperatorMatrix> group_fourier_direct(const SampledGroupFunction& phi,
                                                 const RepFamily& family, const GridSpec& xgrid,
                                                 const LambdaSet& lambdas, int workers = 1);

/// Kernel family K(lambda, x1, x) of the integral operator realization,
/// computed per (x1, x) pair by resampling phi along the slice
/// h -> s(x1)^{-1} h s(x) over an enlarged H-grid and evaluating the
/// m-dimensional Fourier integral in the <l, log h> phase with exact
/// separable phase factors. Entries are kernel VALUES (no weights).
struct KernelTensor {
  LambdaSet lambdas;
  GridSpec xgrid;
  std::vector<CMat> k;   // per lambda, (x1, x)
  GridSpec eta_grid;     // enlarged H-grid used for the slices
  std::int64_t samples_total = 0;
  std::int64_t samples_out_of_box = 0;  // slice left phi's box; read as 0

  double hs_norm(std::int64_t lambda_index) const;
};

KernelTensor kernel_tensor(const SampledGroupFunction& phi, const RepFamily& family,
                           const LambdaSet& lambdas, const GridSpec& xgrid, int workers = 1);

/// M(x1, x) = K(lambda, x1, x) * w_x for a lambda already on the tensor's
/// set (no interpolation across lambda).
OperatorMatrix operator_from_kernel(const KernelTensor& kt, std::int64_t lambda_index);
OperatorMatrix operator_from_kernel(const KernelTensor& kt, const Vec& lambda);

struct PlancherelResult {
  double ratio = 0.0;          // ||phi||^2 / P(phi)
  double l2_norm_sq = 0.0;
  double integral = 0.0;       // P(phi) = integral of ||phi_hat||_HS^2 R dlambda
  Vec per_lambda_hs_sq;
  Vec per_lambda_density;
  double tail_fraction = 0.0;  // estimated mass beyond the lambda window
  bool tail_warning = false;
  bool degenerate = false;     // P = 0 (zero function)
};

/// P(phi) by quadrature over a grid-structured lambda set; the ratio is the
/// group's Plancherel constant and must not depend on phi. The tail estimate
/// is 8x the boundary-shell share of the integral (a decay-scale heuristic);
/// the warning fires at 1%.
PlancherelResult plancherel_check(const SampledGroupFunction& phi, const RepFamily& family,
                                  const LambdaSet& lambdas, const GridSpec& xgrid,
                                  int workers = 1);

struct VanishingReport {
  Vec hs_norms;                 // per lambda
  std::vector<char> below_eps;  // per lambda (masked points never count)
  double eps_abs = 0.0;
  double k_norm_max = 0.0;
  double measure_estimate = 0.0;  // R-weighted measure of cells vanishing across all corners
  double total_measure = 0.0;     // R-weighted measure of the whole unmasked window
  double resolution = 0.0;        // max lambda spacing
  std::string verdict;            // "zero function" | "consistent" | "inconsistent"
};

/// Scans the kernel tensor for the vanishing set {lambda : ||K(lambda)||_HS
/// < eps} with eps = eps_rel * max_lambda ||K(lambda)||_HS. A point exactly
/// at eps counts as non-vanishing. The measure estimate counts only grid
/// cells all of whose corners vanish: isolated zeros of a continuous
/// function carry no measure at grid resolution.
VanishingReport pw_scan(const KernelTensor& kt, const StructureConstants& sc,
                        const DualChart& chart, double eps_rel = 1e-8);

/// Same scan from precomputed per-lambda kernel norms (the resumable path).
VanishingReport pw_scan_norms(const LambdaSet& lambdas, const Vec& hs_norms,
                              const StructureConstants& sc, const DualChart& chart,
                              double eps_rel = 1e-8);

/// The enlarged H-grid the kernel slices are sampled on (lambda-independent).
GridSpec kernel_slice_grid(const SampledGroupFunction& phi, const CosetGeometry& geo,
                           const GridSpec& xgrid);

struct SingularValueRow {
  Vec lambda;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  int rank = 0;
  bool near_singular = false;  // sigma_min < tol * sigma_max
  bool masked = false;
};

/// Singular values of each operator in the weighted inner product;
/// exploratory evidence for invertibility, not a proof.
std::vector<SingularValueRow> invertibility_probe(const std::vector<OperatorMatrix>& ops,
                                                  const LambdaSet& lambdas, double tol = 1e-8);

/// Group convolution (phi1 * phi2)(g) = integral phi1(g') phi2(g'^-1 g) dg'
/// by direct quadrature. Both functions must share the grid; throws
/// InputError naming the required box when the product support overflows it.
SampledGroupFunction convolve(const SampledGroupFunction& phi1, const SampledGroupFunction& phi2,
                              const CosetGeometry& geo, int workers = 1);

/// Value of phi at a group element: Malcev coordinates + cubic interpolation,
/// zero outside the grid box.
Complex eval_phi(const SampledGroupFunction& phi, const CosetGeometry& geo,
                 const GroupElement& g, std::int64_t* out_of_box = nullptr);

}  // namespace nilfourier
