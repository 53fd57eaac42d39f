#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nilfourier/transform.hpp"

namespace nilfourier {

/// Closed-form description of pi_lambda(g) on sampled functions over the
/// X-grid: [pi(g) f](xi) = exp(i (const_phase + xi_phase . xi)) f(xi + shift).
struct OracleAction {
  double const_phase = 0.0;
  Vec xi_phase;  // length n-m
  Vec shift;     // length n-m
};

/// Applies an oracle action on a sampled X-grid function with the same
/// interpolation rules as InducedRep::act.
CVec apply_oracle(const OracleAction& a, const GridSpec& xgrid, const CVec& f);

/// A curated group preset: structure constants, a fixed flag of ideals, the
/// dual chart of the generic stratum, reference grids, and (for heisenberg
/// and the abelian presets) an independently derived closed form of the
/// induced representation. Everything is validated at load time.
struct GroupBundle {
  std::string name;
  std::shared_ptr<const StructureConstants> sc;
  Mat flag;
  DualChart chart;
  RepFamily family;
  bool has_oracle = false;

  GridSpec g_grid;              // reference grid over G (Malcev coordinates)
  GridSpec x_grid;              // reference X-grid
  GridSpec lambda_grid;         // default lambda window (vanishing scans)
  GridSpec lambda_plancherel;   // lambda window for Plancherel sums
  GridSpec x_plancherel;        // wide X-grid for Plancherel sums
  std::vector<Vec> route_lambdas;  // evaluation points for route comparisons

  InducedRep rep_at(const Vec& lambda) const { return family.at(lambda); }
  const CosetGeometry& geometry() const { return *family.geo; }

  /// Closed-form action of pi_lambda(g), available for heisenberg and the
  /// abelian presets; throws InputError("no oracle ...") otherwise.
  OracleAction oracle(const Vec& lambda, const GroupElement& g) const;
};

const std::vector<std::string>& catalog_names();

/// Returns the validated bundle; unknown names raise InputError listing the
/// available presets.
GroupBundle get_group(const std::string& name);

/// Assembles and validates a bundle from parts (used by the preset table and
/// the JSON loaders): checks the flag, builds the Vergne polarization and
/// geometry, verifies the chart dimension against the maximal orbit
/// dimension, and fills in the chart's Pfaffian complement if empty.
GroupBundle make_bundle(std::string name, std::shared_ptr<const StructureConstants> sc,
                        Mat flag, DualChart chart);

}  // namespace nilfourier
