#include "sscaudit/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sscaudit/errors.hpp"
#include "sscaudit/rng.hpp"
#include "sscaudit/runner.hpp"
#include "sscaudit/sha256.hpp"

namespace ssc {

namespace {

std::vector<double> ranks(const std::vector<double>& values) {
  std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> out(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) out[order[k]] = avg;
    i = j + 1;
  }
  return out;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0;  // a constant series correlates with nothing
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

std::string verdict_name(DivergenceVerdict v) {
  switch (v) {
    case DivergenceVerdict::diverging: return "diverging";
    case DivergenceVerdict::flat: return "flat";
    case DivergenceVerdict::converging: return "converging";
  }
  throw Error("unreachable verdict");
}

ScalingCurve run_scaling(const std::vector<double>& grid, const SimFamily& family,
                         const std::vector<EvaluationItem>& items, std::uint64_t seed,
                         int bootstrap_b) {
  if (grid.size() < 5) throw InvalidGrid("grid needs at least 5 points");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw InvalidGrid("grid must be strictly increasing");
  }

  auto index = std::make_shared<const ItemIndex>(make_item_index(items));
  Sha256 hasher;
  for (const auto& item : items) {
    hasher.update(item.id);
    hasher.update("\n");
    hasher.update(item.gold);
    hasher.update("\n");
  }

  ScalingCurve curve;
  curve.family = family;
  curve.seed = seed;
  curve.items_hash = hasher.hex_digest();
  for (double scale : grid) {
    std::uint64_t point_seed = mix64(seed, static_cast<std::uint64_t>(std::llround(scale)));
    auto client = make_scaled_sim(scale, family, point_seed, index);
    RunOptions options;
    options.conditions = {Condition::Full, Condition::SymT, Condition::SymV};
    RunOutput run = run_protocol(items, *client, options);
    ConditionScores scores = build_condition_scores(items, run.transcripts);
    MetricReport report = analyze_scores(scores, bootstrap_b, mix64(point_seed, 0xb007));

    ScalingRow row;
    row.scale = scale;
    row.s_symt = report.s_symt;
    row.s_full = report.s_full;
    row.s_symv = report.s_symv;
    row.tos = report.tos;
    row.cos = report.cos;
    row.fos = report.fos;
    row.ssc = report.ssc;
    row.tos_ci = report.ci.at("tos");
    curve.rows.push_back(row);
  }
  return curve;
}

DivergenceResult check_divergence(const ScalingCurve& curve) {
  if (curve.rows.size() < 5) throw TooFewPoints("divergence check needs at least 5 rows");
  std::vector<ScalingRow> rows = curve.rows;
  std::sort(rows.begin(), rows.end(),
            [](const ScalingRow& a, const ScalingRow& b) { return a.scale < b.scale; });

  std::vector<double> scales, tos;
  double halfwidth_sum = 0;
  for (const auto& r : rows) {
    scales.push_back(r.scale);
    tos.push_back(r.tos);
    halfwidth_sum += (r.tos_ci.hi - r.tos_ci.lo) / 2.0;
  }
  DivergenceResult out;
  out.rho = pearson(ranks(scales), ranks(tos));
  out.range = tos.back() - tos.front();
  out.pooled_halfwidth = halfwidth_sum / static_cast<double>(rows.size());

  double separation = 2.0 * out.pooled_halfwidth;
  if (out.rho >= 0.9 && out.range > separation) {
    out.verdict = DivergenceVerdict::diverging;
  } else if (out.rho <= -0.9 && -out.range > separation) {
    out.verdict = DivergenceVerdict::converging;
  } else {
    out.verdict = DivergenceVerdict::flat;
  }
  return out;
}

std::string curve_to_csv(const ScalingCurve& curve) {
  std::string out = "scale,s_symt,s_full,s_symv,tos,cos,fos,ssc\n";
  char buf[256];
  for (const auto& r : curve.rows) {
    std::snprintf(buf, sizeof(buf), "%g,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", r.scale,
                  r.s_symt, r.s_full, r.s_symv, r.tos, r.cos, r.fos, r.ssc);
    out += buf;
  }
  return out;
}

}  // namespace ssc
