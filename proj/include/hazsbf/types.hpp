#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hazsbf {

// A covariate channel is either constant in time, Z(t) = value, or a shifted
// time scale, Z(t) = offset + t (age/duration style data).
struct CovariateChannel {
  enum class Kind { Constant, TimeOffset };
  Kind kind = Kind::Constant;
  double param = 0.0;  // constant value or time offset

  static CovariateChannel constant(double v) { return {Kind::Constant, v}; }
  static CovariateChannel time_offset(double a) { return {Kind::TimeOffset, a}; }

  bool moves() const { return kind == Kind::TimeOffset; }
  double at(double s) const { return moves() ? param + s : param; }
};

// One subject: at-risk on (entry, exit], event indicator, d covariate channels.
struct SurvivalRecord {
  double entry_time = 0.0;
  double exit_time = 0.0;
  bool event = false;
  std::vector<CovariateChannel> covariates;

  double exposure() const { return exit_time - entry_time; }
};

struct DimensionGrid {
  double lo = 0.0;
  double hi = 1.0;
  int n_points = 3;

  double step() const { return (hi - lo) / (n_points - 1); }
  double point(int i) const { return lo + step() * i; }
  // Trapezoid quadrature weight of node i.
  double trap_weight(int i) const {
    return (i == 0 || i == n_points - 1) ? 0.5 * step() : step();
  }
};

// Grid over [0,T] x prod_j [lo_j, hi_j]; dims[0] is the time axis.
struct EvaluationGrid {
  std::vector<DimensionGrid> dims;

  int n_dims() const { return static_cast<int>(dims.size()); }
  int covariate_dim() const { return n_dims() - 1; }
  double horizon() const { return dims[0].hi; }
};

// Linear interpolation of a curve sampled on a dimension grid. Throws
// std::out_of_range outside [lo, hi]; exact at the nodes.
double interpolate(const DimensionGrid& g, const std::vector<double>& values, double x);

enum class Estimator {
  LocalConstantSbf,
  LocalLinearSbf,
  LocalConstantClassic,
  LocalLinearClassic,
};

enum class Norming { ExposureWeighted, Uniform };

enum class KernelFamily { Epanechnikov };

struct KernelSpec {
  KernelFamily family = KernelFamily::Epanechnikov;
};

struct FitConfig {
  std::vector<double> bandwidth;  // one entry broadcasts to every dimension
  KernelSpec kernel;
  Estimator estimator = Estimator::LocalConstantSbf;
  double tolerance = 1e-4;
  double tol_offset = 1e-4;
  int max_iterations = 500;
  Norming norming = Norming::ExposureWeighted;
  int quadrature_order = 16;
  int threads = 0;  // 0 = auto

  double bandwidth_for(int dim) const {
    return bandwidth.size() == 1 ? bandwidth[0] : bandwidth.at(dim);
  }
};

// Throws std::invalid_argument when grid or config invariants fail
// (bandwidth must fit, grids must be ascending with >= 3 points, ...).
void check_grid(const EvaluationGrid& grid);
void check_fit_config(const FitConfig& config, const EvaluationGrid& grid);

struct Dataset {
  std::vector<SurvivalRecord> records;
  int dim = 0;  // number of covariate channels per record

  int n() const { return static_cast<int>(records.size()); }
};

struct ValidationSummary {
  int n_clipped = 0;
  int n_dropped = 0;
};

struct ValidatedDataset {
  Dataset data;
  ValidationSummary summary;
};

// Clips records to the study window [0, T], drops records whose at-risk
// interval falls entirely outside of it, and rejects structurally invalid
// input (empty data, entry >= exit, covariate dimension mismatch, constant
// covariate outside its declared domain).
ValidatedDataset validate_dataset(const Dataset& dataset, const EvaluationGrid& grid);

// Converged additive fit: hazard(x) = intercept + sum_k components[k](x_k).
// Local linear fits additionally carry derivative curves holding the raw
// (x - X)/h regression coefficients; slope per unit x is -derivative/h.
struct AdditiveFit {
  EvaluationGrid grid;
  double intercept = 0.0;
  std::vector<std::vector<double>> components;
  std::vector<std::vector<double>> derivatives;          // empty for LC
  std::vector<std::vector<double>> centering_weights;    // exposure or ones
  std::vector<std::vector<std::uint8_t>> supported;      // per-dim node masks
  std::vector<double> bandwidth;
  Estimator estimator = Estimator::LocalConstantSbf;
  Norming norming = Norming::ExposureWeighted;
  int iterations_used = 0;
  bool converged = false;
  bool diverged = false;
  double final_criterion = 0.0;
};

// Additive hazard at x = (t, z_1, ..., z_d); error outside the grid domain.
double evaluate_fit(const AdditiveFit& fit, const std::vector<double>& x);

std::string estimator_name(Estimator e);

}  // namespace hazsbf
