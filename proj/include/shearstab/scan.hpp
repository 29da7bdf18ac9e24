#pragma once
// Parameter sweeps over (nu, k, lambda): norm ratios for the resolvent
// estimate families, power-law exponent fits, CSV/JSON reports.

#include <iosfwd>
#include <string>
#include <vector>

#include "shearstab/resolvent.hpp"

namespace shearstab {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// ordinary least squares on (log x, log y); throws on <3 points or
// degenerate abscissae
FitResult fit_exponent(const std::vector<std::pair<double, double>>& xy);

struct ScanRow {
  double nu = 0.0;
  int k = 0;
  std::string bound_id;
  double sup_ratio = 0.0;
  double argmax_lambda = 0.0;
  int n_grid = 0;
  bool failed = false;
};

struct ScanFit {
  std::string bound_id;
  int k = 0;
  double residual_exponent = 0.0;
  double lo = -0.08, hi = 0.08;  // admissible range
  bool pass = false;
  double r2 = 0.0;
  bool available = false;
};

struct ScanReport {
  std::string profile_id;
  std::vector<double> nu_grid;
  std::vector<int> k_grid;
  std::string lambda_policy;
  std::vector<ScanRow> rows;
  std::vector<ScanFit> fits;
};

struct ScanOptions {
  int lambda_points = 64;
  int jobs = 1;
  int min_n = 129;
  bool sweep_o_term = false;  // also sweep |o| up to eps1 (nu k^2)^(1/3)
  double eps1 = 0.01;
};

// registered bound ids, in report order
const std::vector<std::string>& bound_catalog();

ScanReport scan(const std::string& preset, double preset_param,
                const std::vector<std::string>& bound_ids,
                const std::vector<double>& nu_grid,
                const std::vector<int>& k_grid, const ScanOptions& opts = {});

void write_scan_csv(const ScanReport& r, std::ostream& os);
void write_fit_json(const ScanReport& r, std::ostream& os);

}  // namespace shearstab
