#pragma once

#include <string>
#include <vector>

#include "arnold/ermakov.hpp"
#include "arnold/lsode.hpp"
#include "arnold/propagate.hpp"
#include "arnold/symmetry.hpp"
#include "arnold/transform.hpp"

/// Verification suites shared by the acceptance runner and the CLI
/// `verify-*` actions. Every suite returns named metrics compared against a
/// tolerance; the defaults are the acceptance configurations.
namespace arnold::checks {

struct Metric {
  std::string key;
  double value = 0.0;
  double tol = 0.0;
  std::string unit = "1";
  /// Pass when value >= tol instead of value < tol.
  bool at_least = false;

  bool pass() const;
};

struct Report {
  int id = 0;
  std::string name;
  std::vector<Metric> metrics;

  bool pass() const;
  /// Metric with the largest value/tol ratio (smallest for at_least metrics).
  const Metric& worst() const;
};

struct NamedSystem {
  std::string name;
  LsodeSystem system;
};

/// HO(w) for w in {0.5, 1, 2}, damped free particles g in {0.5, 1} and the
/// Caldirola-Kanai oscillator (g = 0.3, w = 1).
std::vector<NamedSystem> reference_systems();
/// HO(1) and Caldirola-Kanai (0.3, 1).
std::vector<NamedSystem> quantum_systems();

struct CanonicityParams {
  std::vector<NamedSystem> systems = reference_systems();
  double t0 = 0.0;
  Interval span{-1.0, 3.0};
  int samples = 400;
  double tol_canonicity = 1e-10;
  double tol_wronskian = 1e-8;
};
Report canonicity(const CanonicityParams& p = {});

struct StraighteningParams {
  std::vector<NamedSystem> systems = reference_systems();
  double t0 = 0.0;
  Interval span{-1.0, 3.0};
  /// Initial (x, v) at t0 of the classical trajectories.
  std::vector<std::pair<double, double>> initial{{1.0, 0.0}, {0.0, 1.0}, {-0.7, 1.3}};
  int samples = 200;
  double tol = 1e-9;
};
Report straightening(const StraighteningParams& p = {});

struct UnitarityParams {
  std::vector<NamedSystem> systems = quantum_systems();
  Interval span{-1.5, 2.5};
  Grid grid{-12.0, 12.0, 1024};
  /// Nodes of the kappa grid. It covers the image of `grid` but is not node
  /// aligned with it, so the map goes through interpolation.
  std::size_t kappa_nodes = 1537;
  int pairs = 5;
  unsigned seed = 7;
  /// Times as fractions of the right edge of T (or of the span end).
  std::vector<double> fractions{0.2, 0.5, 0.9};
  double tol = 1e-6;
};
Report qat_unitarity(const UnitarityParams& p = {});

struct TransportParams {
  std::vector<NamedSystem> systems = quantum_systems();
  Interval span{-0.5, 2.5};
  Grid grid{-12.0, 12.0, 1024};
  GaussianParams initial{1.0, 0.5, 0.4};
  double t_max = 1.0;
  double dt = 1e-3;
  int samples = 5;
  double tol = 1e-3;
};
Report transport(const TransportParams& p = {});

struct GaugedParams {
  TdqhSystem system{TimeFn::constant(1.0), TimeFn::constant(0.3), TimeFn::constant(1.0)};
  Interval span{-0.5, 1.5};
  Grid x_grid{-12.0, 12.0, 1024};
  Grid kappa_grid{-16.0, 16.0, 1024};
  GaussianParams initial{1.0, 0.5, 0.4};
  std::vector<double> times{0.3, 0.6, 0.9};
  double dt = 1e-3;
  double tol = 5e-4;
};
Report gauged(const GaugedParams& p = {});

struct MaslovParams {
  double omega = 1.0;
  std::vector<int> branches{1, 2};
  /// Sample time inside branch k: k pi/w - offset.
  double offset = 0.2;
  Grid grid{-10.0, 10.0, 801};
  GaussianParams initial{1.0, 0.6, -0.4};
  double tol = 1e-6;
};
Report maslov(const MaslovParams& p = {});

struct ErmakovParams {
  double tol_ratio = 1e-6;
  double tol_superpose = 1e-8;
  double tol_linear = 1e-6;
  double tol_fixed = 1e-9;
};
Report ermakov(const ErmakovParams& p = {});

struct QaepParams {
  LsodeSystem target = LsodeSystem::harmonic(1.0);
  LsodeSystem source = LsodeSystem::harmonic(2.0);
  Interval target_span{-1.5, 1.5};
  Interval source_span{-0.7, 0.7};
  std::vector<double> times{-0.3, 0.1, 0.3};
  Grid grid{-10.0, 10.0, 801};
  double tol = 1e-6;
};
Report qaep(const QaepParams& p = {});

struct SymmetryParams {
  Grid grid{-12.0, 12.0, 1024};
  double dt = 1e-3;
  double tol_commutator = 1e-6;
  double tol_drift = 1e-4;
  double tol_decomposition = 1e-5;
  double min_ratio = 10.0;
};
Report symmetry(const SymmetryParams& p = {});

struct OracleParams {
  Grid grid{-20.0, 20.0, 801};
  int steps = 100;
  double dt = 1e-2;
  double tol_norm_step = 1e-10;
  double tol_unit_norm = 1e-8;
  double tol_residual = 1e-6;
};
Report oracle_health(const OracleParams& p = {});

/// All ten acceptance suites at their default configuration.
std::vector<Report> run_all();

}  // namespace arnold::checks
