#pragma once

#include <optional>
#include <vector>

#include "nilfourier/algebra.hpp"

namespace nilfourier {

/// B_l(X, Y) = <l, [X, Y]> evaluated on the basis; exactly skew.
Mat skew_form(const StructureConstants& sc, const LinearFunctional& l);

/// Rank of a skew matrix via singular values, threshold 1e-8 * ||B||.
int skew_rank(const Mat& b, double rel_tol = 1e-8);

/// Orthonormal basis of the radical {v : Bv = 0} of a skew form restricted to
/// span(sub): returns vectors in the ambient space.
Mat skew_radical(const Mat& b, const Mat& sub, double rel_tol = 1e-8);

/// Pfaffian by recursive expansion along the first row. Pf of the empty
/// matrix is 1; odd dimensions give 0. Throws InputError when the input is
/// not skew (residual above 1e-12 relative to the largest entry).
double pfaffian(const Mat& b);

/// Polarizing subalgebra data for a functional l: h = sum of radicals of B_l
/// restricted to the members of a full flag of ideals.
struct Polarization {
  Mat h_basis;        // n x m, flag-adapted, deepest flag coordinate first
  Mat complement;     // n x (n-m) coexponential basis, flag order
  LinearFunctional l;
  Mat flag;           // the flag it was built from
  std::vector<int> h_flag_indices;     // flag positions (0-based) carrying h
  std::vector<int> comp_flag_indices;  // flag positions carrying the complement

  int dim_h() const { return int(h_basis.cols()); }
  int dim_x() const { return int(complement.cols()); }

  /// Max of the three defining residuals: closure of h under the bracket,
  /// <l,[h,h]> = 0, and m = n - rank(B_l)/2 (dimension law reported as 0/1).
  double invariant_residual(const StructureConstants& sc) const;
};

/// Vergne construction h = sum_j rad(B_l | g_j) over a full flag of ideals.
/// Throws InternalError("flag is not an ideal flag...") when the flag check
/// fails, InternalError when the result violates the polarization invariants.
Polarization vergne_polarization(const StructureConstants& sc, const LinearFunctional& l,
                                 const Mat& flag);

/// Chart over the generic stratum of the dual: lambda in R^k is embedded as
/// l(lambda) = embed * lambda, and the Plancherel density is the Pfaffian of
/// B_l restricted to a fixed complement of the generic radical.
struct DualChart {
  int k = 0;
  Mat embed;                           // n x k
  std::vector<int> pfaff_complement;   // basis indices spanning the fixed complement
  Vec reference_lambda;                // a chart-generic point

  LinearFunctional at(const Vec& lambda) const {
    if (lambda.size() != k) throw InputError("chart: lambda has wrong dimension");
    return LinearFunctional{embed * lambda};
  }
};

struct DensityValue {
  double r = 0.0;
  bool non_generic = false;  // radical dimension differs from k at this lambda
};

/// R(lambda) = |Pf(B restricted to the chart's fixed complement)|; zero with
/// a warning flag on the non-generic set.
DensityValue plancherel_density(const StructureConstants& sc, const DualChart& chart,
                                const Vec& lambda);

/// Picks the complement indices for a chart at its reference point: the first
/// subset of input basis vectors (in order) completing the radical of B.
std::vector<int> choose_pfaff_complement(const StructureConstants& sc, const DualChart& chart);

}  // namespace nilfourier
