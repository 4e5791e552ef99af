#include "latchbench/metrics/report.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <set>

namespace latchbench::metrics {

namespace {

using judge::Verdict;

struct Cell {
  std::vector<const Verdict*> verdicts;
};

ReportRow summarize(const std::vector<const Verdict*>& vs) {
  ReportRow row;
  std::size_t refusals = 0, pi_true = 0, pi_total = 0, counted = 0;
  for (const auto* v : vs) {
    if (v->judge_error) {
      ++row.judge_errors;
      continue;
    }
    ++counted;
    row.successes += v->final_success;
    refusals += v->refusal;
    row.backend_errors += v->backend_error;
    row.parse_failures += v->parse_failure;
    if (v->pi_adherent) {
      ++pi_total;
      pi_true += *v->pi_adherent;
    }
  }
  row.n = counted;
  if (counted > 0) {
    row.apa = static_cast<double>(row.successes) / static_cast<double>(counted);
    row.refusal_rate = static_cast<double>(refusals) / static_cast<double>(counted);
  }
  if (pi_total > 0) {
    row.pi_rate = static_cast<double>(pi_true) / static_cast<double>(pi_total);
    row.grounding_gap = *row.pi_rate - row.apa;
  }
  return row;
}

std::string strategy_kind(const std::vector<const Verdict*>& vs) {
  return vs.empty() ? "" : std::string(strategy::to_string(vs.front()->strategy));
}

OutcomeVector outcomes_of(const std::map<std::string, const Verdict*>& by_traj, const std::vector<std::string>& keys,
                          const std::string& label) {
  OutcomeVector v;
  v.strategy = label;
  for (const auto& k : keys) {
    v.keys.push_back(k);
    v.outcomes.push_back(by_traj.at(k)->final_success ? 1 : 0);
  }
  return v;
}

std::vector<CurvePoint> curve_points(const std::vector<const Verdict*>& vs) {
  std::map<long long, std::pair<std::size_t, std::size_t>> groups;  // x * 1000 -> (successes, n)
  for (const auto* v : vs) {
    if (v->judge_error) continue;
    auto& g = groups[std::llround(v->critical_fraction * 1000.0)];
    g.first += v->final_success;
    ++g.second;
  }
  std::vector<CurvePoint> out;
  for (const auto& [x, g] : groups) {
    out.push_back({static_cast<double>(x) / 1000.0, static_cast<double>(g.first) / static_cast<double>(g.second)});
  }
  return out;
}

NamedFit make_fit(std::string family, std::string strategy, const std::vector<const Verdict*>& vs) {
  NamedFit f{std::move(family), std::move(strategy), curve_points(vs), std::nullopt, {}};
  try {
    f.fit = fit_attention_curve(f.points);
  } catch (const DomainError& e) {
    f.error = e.what();
  }
  return f;
}

std::string fmt_p(double p) { return std::isnan(p) ? std::string("degenerate") : fmt::format("{:.6g}", p); }

json row_json(const ReportRow& r) {
  json j = {{"model_pair", r.model_pair},
            {"tier", r.tier},
            {"strategy", r.strategy},
            {"kind", r.kind},
            {"granularity", r.granularity ? json(*r.granularity) : json(nullptr)},
            {"n", r.n},
            {"successes", r.successes},
            {"apa", r.apa},
            {"lift", r.lift ? json(*r.lift) : json(nullptr)},
            {"lift_note", r.lift_note},
            {"refusal_rate", r.refusal_rate},
            {"pi_rate", r.pi_rate ? json(*r.pi_rate) : json(nullptr)},
            {"grounding_gap", r.grounding_gap ? json(*r.grounding_gap) : json(nullptr)},
            {"judge_errors", r.judge_errors},
            {"backend_errors", r.backend_errors},
            {"parse_failures", r.parse_failures},
            {"significance_note", r.significance_note}};
  if (r.significance) {
    const auto& s = *r.significance;
    j["significance"] = {
        {"paired_t_test",
         {{"t", s.t_test.degenerate ? json(nullptr) : json(s.t_test.t)},
          {"df", s.t_test.df},
          {"p_value", s.t_test.degenerate ? json(nullptr) : json(s.t_test.p_value)},
          {"degenerate", s.t_test.degenerate}}},
        {"mcnemar_exact", {{"p_value", s.mcnemar_p}, {"b", s.b}, {"c", s.c}}},
        {"n_pairs", s.n}};
  } else {
    j["significance"] = nullptr;
  }
  return j;
}

}  // namespace

MetricsReport aggregate_report(const std::vector<Verdict>& verdicts, const ReportConfig& config) {
  MetricsReport report;
  report.experiment_id = config.experiment_id;

  std::set<std::string> labels_present;
  for (const auto& v : verdicts) labels_present.insert(v.label);
  for (const auto& s : config.strategies) {
    if (!labels_present.contains(s)) throw DomainError(fmt::format("no verdicts for configured strategy '{}'", s));
  }

  // (model_pair, tier) -> label -> trajectory_id -> verdict
  std::map<std::pair<std::string, std::string>, std::map<std::string, std::map<std::string, const Verdict*>>> cells;
  std::map<std::string, std::vector<const Verdict*>> by_label;
  std::map<std::pair<std::string, std::string>, std::vector<const Verdict*>> by_family_label;
  for (const auto& v : verdicts) {
    cells[{v.model_pair, v.tier}][v.label][v.trajectory_id] = &v;
    by_label[v.label].push_back(&v);
    by_family_label[{v.model_pair, v.label}].push_back(&v);
    report.judge_errors += v.judge_error.has_value();
    report.backend_errors += v.backend_error;
  }

  for (const auto& [mt, labels] : cells) {
    const auto base_it = labels.find(config.baseline);
    for (const auto& [label, by_traj] : labels) {
      std::vector<const Verdict*> vs;
      for (const auto& [_, v] : by_traj) vs.push_back(v);
      auto row = summarize(vs);
      row.model_pair = mt.first;
      row.tier = mt.second;
      row.strategy = label;
      row.kind = strategy_kind(vs);
      row.granularity = vs.front()->granularity;
      if (label == config.baseline) {
        row.lift_note = "baseline";
      } else if (base_it == labels.end()) {
        row.lift_note = "no baseline";
      } else {
        std::vector<const Verdict*> base_vs;
        for (const auto& [_, v] : base_it->second) base_vs.push_back(v);
        const auto base_row = summarize(base_vs);
        if (base_row.n == 0 || row.n == 0) {
          row.lift_note = "no baseline";
        } else {
          try {
            row.lift = resilience_lift(row.apa, base_row.apa);
          } catch (const DomainError& e) {
            row.lift_note = e.what();
          }
        }
        // Pair on trajectories both strategies judged without judge errors.
        std::vector<std::string> keys;
        for (const auto& [traj, v] : by_traj) {
          auto other = base_it->second.find(traj);
          if (other != base_it->second.end() && !v->judge_error && !other->second->judge_error) keys.push_back(traj);
        }
        if (keys.size() >= 2) {
          row.significance = paired_significance(outcomes_of(by_traj, keys, label),
                                                 outcomes_of(base_it->second, keys, config.baseline));
          if (row.significance->t_test.degenerate) row.significance_note = "t-test degenerate (zero variance)";
        } else {
          row.significance_note = "fewer than two aligned pairs";
        }
      }
      report.rows.push_back(std::move(row));
    }
  }

  for (const auto& [label, vs] : by_label) {
    auto row = summarize(vs);
    row.model_pair = "*";
    row.tier = "*";
    row.strategy = label;
    row.kind = strategy_kind(vs);
    row.granularity = vs.front()->granularity;
    report.strategy_totals.push_back(std::move(row));
  }

  for (const auto& [fl, vs] : by_family_label) report.curve_fits.push_back(make_fit(fl.first, fl.second, vs));
  for (const auto& [label, vs] : by_label) report.curve_fits.push_back(make_fit("pooled", label, vs));
  return report;
}

json to_json(const MetricsReport& r) {
  json rows = json::array(), totals = json::array(), fits = json::array();
  for (const auto& row : r.rows) rows.push_back(row_json(row));
  for (const auto& row : r.strategy_totals) totals.push_back(row_json(row));
  for (const auto& f : r.curve_fits) {
    json pts = json::array();
    for (const auto& p : f.points) pts.push_back({{"x", p.x}, {"apa", p.apa}});
    json j = {{"family", f.family}, {"strategy", f.strategy}, {"error", f.error}, {"points", pts}};
    if (f.fit) {
      j["alpha_hat"] = f.fit->alpha_hat;
      j["gamma_hat"] = f.fit->gamma_hat;
      j["residual_sse"] = f.fit->residual_sse;
      j["implies_p_outside_unit_interval"] = f.fit->out_of_range;
    }
    if (f.family == "pooled") j["note"] = "pooled across model pairs; pooling is a reporting choice";
    fits.push_back(std::move(j));
  }
  return {{"experiment_id", r.experiment_id},
          {"rows", rows},
          {"strategy_totals", totals},
          {"curve_fits", fits},
          {"judge_errors", r.judge_errors},
          {"backend_errors", r.backend_errors}};
}

std::string report_csv(const MetricsReport& r) {
  std::string out = "model_pair,tier,strategy,apa,n,lift,t_p,mcnemar_p\n";
  for (const auto& row : r.rows) {
    std::string lift = row.lift ? fmt::format("{:.6f}", *row.lift) : (row.lift_note == "baseline" ? "" : row.lift_note);
    std::string t_p, mc_p;
    if (row.significance) {
      t_p = row.significance->t_test.degenerate ? "degenerate" : fmt_p(row.significance->t_test.p_value);
      mc_p = fmt_p(row.significance->mcnemar_p);
    }
    out += fmt::format("{},{},{},{:.6f},{},{},{},{}\n", row.model_pair, row.tier, row.strategy, row.apa, row.n, lift,
                       t_p, mc_p);
  }
  return out;
}

std::string curve_points_csv(const MetricsReport& r) {
  std::string out = "x,apa,strategy\n";
  for (const auto& f : r.curve_fits) {
    if (f.family != "pooled") continue;
    for (const auto& p : f.points) out += fmt::format("{:.3f},{:.6f},{}\n", p.x, p.apa, f.strategy);
  }
  return out;
}

void write_report(const MetricsReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text_atomic(dir / "report.json", to_json(r).dump(2) + "\n");
  write_text_atomic(dir / "report.csv", report_csv(r));
  write_text_atomic(dir / "curve_points.csv", curve_points_csv(r));
}

std::string format_report(const MetricsReport& r) {
  std::string out = fmt::format("experiment {}\n", r.experiment_id);
  out += fmt::format("{:<14} {:<13} {:<26} {:>8} {:>6} {:>12} {:>8} {:>8} {:>8}\n", "model_pair", "tier", "strategy",
                     "APA", "n", "lift", "PI", "refusal", "gap");
  auto line = [&](const ReportRow& row) {
    std::string lift = row.lift ? fmt::format("{:+.2f}%", *row.lift * 100.0) : row.lift_note;
    out += fmt::format("{:<14} {:<13} {:<26} {:>7.2f}% {:>6} {:>12} {:>8} {:>7.2f}% {:>8}\n", row.model_pair, row.tier,
                       row.strategy, row.apa * 100.0, row.n, lift,
                       row.pi_rate ? fmt::format("{:.2f}%", *row.pi_rate * 100.0) : "-", row.refusal_rate * 100.0,
                       row.grounding_gap ? fmt::format("{:.2f}%", *row.grounding_gap * 100.0) : "-");
  };
  for (const auto& row : r.rows) line(row);
  out += "totals\n";
  for (const auto& row : r.strategy_totals) line(row);
  out += fmt::format("judge errors: {}  backend errors: {}\n", r.judge_errors, r.backend_errors);
  return out;
}

}  // namespace latchbench::metrics
