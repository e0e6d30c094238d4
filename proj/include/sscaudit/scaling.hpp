#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sscaudit/metrics.hpp"
#include "sscaudit/model_client.hpp"

namespace ssc {

struct ScalingRow {
  double scale = 0;
  double s_symt = 0, s_full = 0, s_symv = 0;
  double tos = 0, cos = 0, fos = 0, ssc = 0;
  Ci tos_ci;  // carried for the divergence test, not part of the CSV
};

struct ScalingCurve {
  std::vector<ScalingRow> rows;  // ascending scale
  SimFamily family;
  std::string items_hash;
  std::uint64_t seed = 0;
};

// Sweeps the simulated family across the grid: per point, instantiate the
// sim at that scale (seed derived from (seed, scale)), evaluate the three
// protocol conditions over the items, compute metrics. Grid must be strictly
// increasing with at least 5 points (InvalidGrid).
ScalingCurve run_scaling(const std::vector<double>& grid, const SimFamily& family,
                         const std::vector<EvaluationItem>& items, std::uint64_t seed,
                         int bootstrap_b = 200);

enum class DivergenceVerdict { diverging, flat, converging };
std::string verdict_name(DivergenceVerdict v);

struct DivergenceResult {
  DivergenceVerdict verdict = DivergenceVerdict::flat;
  double rho = 0;               // Spearman rank correlation of (scale, tos)
  double range = 0;             // tos(last) - tos(first)
  double pooled_halfwidth = 0;  // mean bootstrap CI half-width across rows
};

// diverging: rho >= 0.9 and range > 2 * pooled half-width; converging is the
// mirror image; everything else reads flat. Input row order is irrelevant.
DivergenceResult check_divergence(const ScalingCurve& curve);

// header exactly: scale,s_symt,s_full,s_symv,tos,cos,fos,ssc
std::string curve_to_csv(const ScalingCurve& curve);

}  // namespace ssc
