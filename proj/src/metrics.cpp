#include "sscaudit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sscaudit/errors.hpp"
#include "sscaudit/rng.hpp"

namespace ssc {

namespace {

struct Means {
  double full = 0, symt = 0, symv = 0;
  std::optional<double> textonly, basetext;
};

struct PointMetrics {
  double tos = 0, cos = 0, fos = 0, ssc = 0;
  std::optional<double> mg, ml, ml_raw;
};

PointMetrics metrics_from_means(const Means& m) {
  PointMetrics p;
  p.tos = m.symt - m.full;
  p.cos = m.symt - m.symv;
  p.fos = m.full - m.symv;
  p.ssc = std::max({p.tos, p.cos, std::fabs(p.fos)});
  if (m.textonly) {
    p.mg = m.full - *m.textonly;
    if (m.basetext) {
      p.ml_raw = *m.textonly - *m.basetext;
      p.ml = std::max(0.0, *p.ml_raw);
    }
  }
  return p;
}

double mean_of(const std::vector<int>& v, const std::vector<int>& idx) {
  long long sum = 0;
  for (int i : idx) sum += v[i];
  return static_cast<double>(sum) / static_cast<double>(idx.size());
}

double percentile(std::vector<double>& sorted, double p) {
  double pos = p * static_cast<double>(sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (sorted[lo + 1] - sorted[lo]) * frac;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

std::string diagnosis_name(Diagnosis d) {
  switch (d) {
    case Diagnosis::compliant: return "compliant";
    case Diagnosis::positive_collapse: return "positive_collapse";
    case Diagnosis::negative_collapse: return "negative_collapse";
    case Diagnosis::toll_dominant: return "toll_dominant";
    case Diagnosis::curse_dominant: return "curse_dominant";
    case Diagnosis::indeterminate: return "indeterminate";
  }
  throw Error("unreachable diagnosis");
}

MetricReport compute_metrics(const ConditionScores& scores) {
  for (Condition c : kProtocolConditions) {
    if (!scores.has(c))
      throw MissingCondition("condition " + condition_name(c) + " missing from scores");
  }
  Means m;
  m.full = scores.mean(Condition::Full);
  m.symt = scores.mean(Condition::SymT);
  m.symv = scores.mean(Condition::SymV);
  if (scores.has(Condition::TextOnly)) m.textonly = scores.mean(Condition::TextOnly);
  if (scores.has(Condition::BaseText)) m.basetext = scores.mean(Condition::BaseText);
  PointMetrics p = metrics_from_means(m);

  MetricReport r;
  r.s_full = m.full;
  r.s_symt = m.symt;
  r.s_symv = m.symv;
  r.s_textonly = m.textonly;
  r.s_basetext = m.basetext;
  r.tos = p.tos;
  r.cos = p.cos;
  r.fos = p.fos;
  r.ssc = p.ssc;
  r.mg = p.mg;
  r.ml = p.ml;
  r.ml_raw = p.ml_raw;
  r.n_items = scores.n();
  r.n_failed = scores.n_failed;
  r.model_id = scores.model_id;
  r.base_model_id = scores.base_model_id;
  return r;
}

std::map<std::string, Ci> bootstrap_ci(const ConditionScores& scores, int b,
                                       std::uint64_t seed) {
  int n = scores.n();
  if (n < 10) throw TooFewItems("bootstrap needs at least 10 items, got " + std::to_string(n));
  if (b < 100) throw InvalidParams("bootstrap needs at least 100 replicates");
  for (Condition c : kProtocolConditions) {
    if (!scores.has(c))
      throw MissingCondition("condition " + condition_name(c) + " missing from scores");
  }

  bool has_textonly = scores.has(Condition::TextOnly);
  bool has_basetext = scores.has(Condition::BaseText);
  std::map<std::string, std::vector<double>> samples;

  Rng rng(seed);
  std::vector<int> idx(n);
  for (int rep = 0; rep < b; ++rep) {
    for (int i = 0; i < n; ++i) idx[i] = static_cast<int>(rng.uniform_below(n));
    Means m;
    m.full = mean_of(scores.scores.at(Condition::Full), idx);
    m.symt = mean_of(scores.scores.at(Condition::SymT), idx);
    m.symv = mean_of(scores.scores.at(Condition::SymV), idx);
    if (has_textonly) m.textonly = mean_of(scores.scores.at(Condition::TextOnly), idx);
    if (has_basetext) m.basetext = mean_of(scores.scores.at(Condition::BaseText), idx);
    PointMetrics p = metrics_from_means(m);
    samples["tos"].push_back(p.tos);
    samples["cos"].push_back(p.cos);
    samples["fos"].push_back(p.fos);
    samples["ssc"].push_back(p.ssc);
    if (p.mg) samples["mg"].push_back(*p.mg);
    if (p.ml) samples["ml"].push_back(*p.ml);
  }

  std::map<std::string, Ci> out;
  for (auto& [name, values] : samples) {
    std::sort(values.begin(), values.end());
    out[name] = {percentile(values, 0.025), percentile(values, 0.975)};
  }
  return out;
}

Diagnosis diagnose(const MetricReport& report) {
  auto ci = [&](const char* name) -> const Ci& { return report.ci.at(name); };
  if (report.ci.count("fos")) {
    if (ci("fos").lo > 0) return Diagnosis::positive_collapse;
    if (ci("fos").hi < 0) return Diagnosis::negative_collapse;
  }
  if (report.ci.count("tos") && ci("tos").lo > 0) return Diagnosis::toll_dominant;
  if (report.ci.count("cos") && ci("cos").lo > 0) return Diagnosis::curse_dominant;
  if (report.ssc <= 1e-9) return Diagnosis::compliant;
  return Diagnosis::indeterminate;
}

MetricReport analyze_scores(const ConditionScores& scores, int b, std::uint64_t seed) {
  MetricReport r = compute_metrics(scores);
  r.ci = bootstrap_ci(scores, b, seed);
  r.bootstrap_b = b;
  r.bootstrap_seed = seed;
  r.diagnosis = diagnose(r);
  return r;
}

nlohmann::json report_to_json(const MetricReport& r) {
  nlohmann::json j;
  j["s_full"] = r.s_full;
  j["s_symt"] = r.s_symt;
  j["s_symv"] = r.s_symv;
  if (r.s_textonly) j["s_textonly"] = *r.s_textonly;
  if (r.s_basetext) j["s_basetext"] = *r.s_basetext;
  j["tos"] = r.tos;
  j["cos"] = r.cos;
  j["fos"] = r.fos;
  j["ssc"] = r.ssc;
  if (r.mg) j["mg"] = *r.mg;
  if (r.ml) j["ml"] = *r.ml;
  if (r.ml_raw) j["ml_raw"] = *r.ml_raw;
  nlohmann::json ci = nlohmann::json::object();
  for (const auto& [name, interval] : r.ci) ci[name] = {interval.lo, interval.hi};
  j["ci"] = ci;
  j["diagnosis"] = diagnosis_name(r.diagnosis);
  j["n_items"] = r.n_items;
  j["n_failed"] = r.n_failed;
  j["bootstrap"] = {{"b", r.bootstrap_b}, {"seed", r.bootstrap_seed}};
  j["model_id"] = r.model_id;
  if (r.base_model_id) j["base_model_id"] = *r.base_model_id;
  return j;
}

std::string report_to_markdown(const MetricReport& r) {
  std::string md;
  md += "# Modality translation report\n\n";
  md += "model: `" + r.model_id + "`";
  if (r.base_model_id) md += " (base: `" + *r.base_model_id + "`)";
  md += ", n_items: " + std::to_string(r.n_items);
  if (r.n_failed > 0) md += ", unanswered: " + std::to_string(r.n_failed);
  md += "\n\n";

  md += "| condition | accuracy |\n|---|---|\n";
  md += "| full | " + fmt(r.s_full) + " |\n";
  md += "| symt | " + fmt(r.s_symt) + " |\n";
  md += "| symv | " + fmt(r.s_symv) + " |\n";
  if (r.s_textonly) md += "| textonly | " + fmt(*r.s_textonly) + " |\n";
  if (r.s_basetext) md += "| basetext | " + fmt(*r.s_basetext) + " |\n";
  md += "\n| metric | value | pct pts | 95% CI |\n|---|---|---|---|\n";
  auto row = [&](const char* name, double v) {
    md += std::string("| ") + name + " | " + fmt(v) + " | " + fmt(v * 100.0) + " | ";
    auto it = r.ci.find(name);
    if (it != r.ci.end())
      md += "[" + fmt(it->second.lo) + ", " + fmt(it->second.hi) + "] |\n";
    else
      md += "- |\n";
  };
  row("tos", r.tos);
  row("cos", r.cos);
  row("fos", r.fos);
  row("ssc", r.ssc);
  if (r.mg) row("mg", *r.mg);
  if (r.ml) row("ml", *r.ml);
  if (r.ml_raw) md += "| ml_raw | " + fmt(*r.ml_raw) + " | " + fmt(*r.ml_raw * 100.0) + " | - |\n";

  md += "\ndiagnosis: **" + diagnosis_name(r.diagnosis) + "**\n";
  md += "\nbootstrap: B=" + std::to_string(r.bootstrap_b) +
        ", seed=" + std::to_string(r.bootstrap_seed) + "\n";
  return md;
}

}  // namespace ssc
