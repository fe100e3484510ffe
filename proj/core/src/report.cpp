#include "stancelab/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "json_util.hpp"
#include "stancelab/errors.hpp"
#include "stancelab/plot.hpp"
#include "stancelab/stats.hpp"

namespace stancelab {

namespace {

namespace fs = std::filesystem;

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory " + dir);
}

int method_rank(const std::string& m) {
  static const std::map<std::string, int> kRank = {
      {"random", 0}, {"majority", 1}, {"icl", 2},     {"orpo", 3},
      {"sft", 4},    {"grpo", 5},     {"sft+grpo", 6}};
  auto it = kRank.find(m);
  return it == kRank.end() ? 7 : it->second;
}

int dataset_rank(const std::string& d) {
  if (d.rfind("smartvote", 0) == 0) return 0;
  if (d.rfind("wom", 0) == 0) return 1;
  if (d.rfind("anes", 0) == 0) return 2;
  return 3;
}

int group_rank(const std::string& g) {
  if (g == "Left") return 0;
  if (g == "Center") return 1;
  if (g == "Right") return 2;
  return 3;
}

int bias_rank(const std::string& b) {
  if (b == "progressive") return 0;
  if (b == "default") return 1;
  if (b == "conservative") return 2;
  return 3;
}

std::string group_color(const std::string& group) {
  if (group == "Left") return "#3b6fb6";
  if (group == "Center") return "#b051a8";
  if (group == "Right") return "#c2423f";
  return palette_color(7 + static_cast<std::size_t>(group.size()));
}

template <typename T, typename Rank>
void sort_by_rank(std::vector<T>& items, Rank rank) {
  std::stable_sort(items.begin(), items.end(), [&](const T& a, const T& b) {
    const int ra = rank(a), rb = rank(b);
    return ra != rb ? ra < rb : a < b;
  });
}

// Resume runs can append the same rows twice; keep the first occurrence.
std::vector<ResultRow> dedup_rows(const std::vector<ResultRow>& rows) {
  std::vector<ResultRow> out;
  std::set<std::tuple<std::string, std::string, int>> seen;
  for (const auto& r : rows) {
    if (seen.insert({r.config_hash, r.unit_id, r.run_index}).second) out.push_back(r);
  }
  return out;
}

// Store rows label datasets by (dataset, scheme); the column label stays the
// bare dataset name unless several schemes of it coexist in the store.
std::string slice_label(const std::string& dataset, const std::string& scheme,
                        const std::map<std::string, std::set<std::string>>& schemes) {
  auto it = schemes.find(dataset);
  if (it != schemes.end() && it->second.size() > 1 && !scheme.empty()) {
    return dataset + "/" + scheme;
  }
  return dataset;
}

std::map<std::string, std::set<std::string>> schemes_by_dataset(
    const std::vector<ResultRow>& rows) {
  std::map<std::string, std::set<std::string>> out;
  for (const auto& r : rows) out[r.dataset].insert(r.scheme);
  return out;
}

// Per-run across-unit means of one metric, in run-index order.
std::vector<double> run_means(const std::vector<const ResultRow*>& slice,
                              double ResultRow::* metric) {
  std::map<int, std::vector<double>> by_run;
  for (const auto* r : slice) by_run[r->run_index].push_back(r->*metric);
  std::vector<double> out;
  out.reserve(by_run.size());
  for (const auto& [run, values] : by_run) out.push_back(mean(values));
  return out;
}

using SliceMap = std::map<std::pair<std::string, std::string>, std::vector<const ResultRow*>>;

SliceMap slices_by_label_method(const std::vector<ResultRow>& rows) {
  const auto schemes = schemes_by_dataset(rows);
  SliceMap out;
  for (const auto& r : rows) {
    if (r.status != "ok") continue;
    out[{slice_label(r.dataset, r.scheme, schemes), r.method}].push_back(&r);
  }
  return out;
}

struct CellStat {
  double mean = 0.0;
  double std = 0.0;
  int n_runs = 0;
};

CellStat cell_stat_percent(const std::vector<const ResultRow*>& slice,
                           double ResultRow::* metric) {
  const auto means = run_means(slice, metric);
  CellStat s;
  s.n_runs = static_cast<int>(means.size());
  s.mean = mean(means) * 100.0;
  s.std = means.size() > 1 ? sample_stddev(means) * 100.0 : 0.0;
  return s;
}

ReportFiles score_table(const std::vector<ResultRow>& raw_rows,
                        const std::vector<ReferenceScore>& reference,
                        const std::string& out_dir, const std::string& layout,
                        double ResultRow::* metric, const std::string& metric_name) {
  const auto rows = dedup_rows(raw_rows);
  const auto slices = slices_by_label_method(rows);
  if (slices.empty()) throw MetricError(layout + ": no usable result rows");
  ensure_dir(out_dir);

  std::vector<std::string> labels, methods;
  for (const auto& [key, slice] : slices) {
    if (std::find(labels.begin(), labels.end(), key.first) == labels.end())
      labels.push_back(key.first);
    if (std::find(methods.begin(), methods.end(), key.second) == methods.end())
      methods.push_back(key.second);
  }
  sort_by_rank(labels, dataset_rank);
  sort_by_rank(methods, method_rank);

  std::vector<std::string> header = {"source", "method"};
  for (const auto& l : labels) {
    header.push_back(l + "_mean");
    header.push_back(l + "_std");
  }

  std::vector<std::vector<std::string>> csv_rows;
  detail::Json jrows = detail::Json::array();

  for (const auto& m : methods) {
    std::vector<std::string> line = {"computed", method_display_name(m)};
    detail::Json jrow = {{"source", "computed"},
                         {"method", m},
                         {"display", method_display_name(m)},
                         {"cells", detail::Json::object()}};
    for (const auto& l : labels) {
      auto it = slices.find({l, m});
      if (it == slices.end()) {
        line.push_back("");
        line.push_back("");
        jrow["cells"][l] = nullptr;
        continue;
      }
      const auto stat = cell_stat_percent(it->second, metric);
      line.push_back(format_double(stat.mean));
      line.push_back(format_double(stat.std));
      jrow["cells"][l] = {{"mean", stat.mean}, {"std", stat.std}, {"n_runs", stat.n_runs}};
    }
    csv_rows.push_back(line);
    jrows.push_back(jrow);
  }

  // Published side-by-side rows (rendered verbatim, never recomputed).
  std::vector<const ReferenceScore*> refs;
  for (const auto& r : reference) {
    if (r.metric == metric_name) refs.push_back(&r);
  }
  std::stable_sort(refs.begin(), refs.end(),
                   [](const ReferenceScore* a, const ReferenceScore* b) {
                     if (a->model != b->model) return a->model < b->model;
                     const int ra = method_rank(a->method), rb = method_rank(b->method);
                     return ra != rb ? ra < rb : a->method < b->method;
                   });
  std::map<std::pair<std::string, std::string>, detail::Json> ref_rows;  // model, method
  std::vector<std::pair<std::string, std::string>> ref_order;
  for (const auto* r : refs) {
    const std::pair<std::string, std::string> key{r->model, r->method};
    if (!ref_rows.count(key)) {
      ref_order.push_back(key);
      ref_rows[key] = {{"source", "reference:" + r->model},
                       {"method", r->method},
                       {"display", method_display_name(r->method)},
                       {"cells", detail::Json::object()}};
    }
    ref_rows[key]["cells"][r->dataset] = {{"mean", r->mean}, {"std", r->std}};
  }
  for (const auto& key : ref_order) {
    const auto& jrow = ref_rows[key];
    std::vector<std::string> line = {"reference:" + key.first,
                                     method_display_name(key.second)};
    for (const auto& l : labels) {
      const std::string base = l.substr(0, l.find('/'));
      const auto& cells = jrow["cells"];
      auto it = cells.find(base);
      if (it == cells.end()) it = cells.find(l);
      if (it == cells.end()) {
        line.push_back("");
        line.push_back("");
      } else {
        line.push_back(format_double((*it)["mean"].get<double>()));
        line.push_back(format_double((*it)["std"].get<double>()));
      }
    }
    csv_rows.push_back(line);
    jrows.push_back(jrow);
  }

  const std::string csv_path = join_path(out_dir, layout + ".csv");
  const std::string json_path = join_path(out_dir, layout + ".json");
  write_csv_file(csv_path, header, csv_rows);
  detail::Json doc = {{"layout", layout},
                      {"metric", metric_name},
                      {"scale", "percent"},
                      {"datasets", labels},
                      {"rows", jrows}};
  detail::write_text_file(json_path, doc.dump(2) + "\n");
  return {{csv_path, json_path}};
}

}  // namespace

std::string method_display_name(const std::string& method) {
  static const std::map<std::string, std::string> kNames = {
      {"random", "random"}, {"majority", "majority"}, {"icl", "icl"},
      {"orpo", "ORPO"},     {"sft", "SFT"},           {"grpo", "GRPO"},
      {"sft+grpo", "SFT+GRPO"}};
  auto it = kNames.find(method);
  return it == kNames.end() ? method : it->second;
}

std::vector<ReferenceScore> load_reference_scores(const std::string& path) {
  const auto doc = detail::load_json_file(path);
  const auto& arr = doc.is_array() ? doc : detail::require(doc, "scores", path);
  if (!arr.is_array()) throw DataError(path + ": expected an array of scores");
  std::vector<ReferenceScore> out;
  for (const auto& j : arr) {
    ReferenceScore s;
    s.model = detail::require(j, "model", path).get<std::string>();
    s.method = detail::require(j, "method", path).get<std::string>();
    s.dataset = detail::require(j, "dataset", path).get<std::string>();
    s.metric = detail::require(j, "metric", path).get<std::string>();
    s.mean = detail::require(j, "mean", path).get<double>();
    s.std = j.value("std", 0.0);
    out.push_back(std::move(s));
  }
  return out;
}

ReportFiles report_table3(const std::vector<ResultRow>& rows,
                          const std::vector<ReferenceScore>& reference,
                          const std::string& out_dir) {
  return score_table(rows, reference, out_dir, "table3", &ResultRow::macro_f1, "macro_f1");
}

ReportFiles report_table4(const std::vector<ResultRow>& rows,
                          const std::vector<ReferenceScore>& reference,
                          const std::string& out_dir) {
  return score_table(rows, reference, out_dir, "table4", &ResultRow::accuracy, "accuracy");
}

ReportFiles report_table8(const std::vector<ResultRow>& raw_rows,
                          const std::string& out_dir) {
  const auto rows = dedup_rows(raw_rows);
  const auto slices = slices_by_label_method(rows);
  if (slices.empty()) throw MetricError("table8: no usable result rows");
  const std::string treatment = "sft+grpo";

  std::vector<std::string> labels, baselines;
  for (const auto& [key, slice] : slices) {
    if (std::find(labels.begin(), labels.end(), key.first) == labels.end())
      labels.push_back(key.first);
    if (key.second != treatment &&
        std::find(baselines.begin(), baselines.end(), key.second) == baselines.end())
      baselines.push_back(key.second);
  }
  sort_by_rank(labels, dataset_rank);
  sort_by_rank(baselines, method_rank);

  struct TestRow {
    std::string label, baseline;
    bool computed = false;
    double p = 0.0, d = 0.0;
  };
  std::vector<TestRow> tests;
  for (const auto& b : baselines) {
    for (const auto& l : labels) {
      TestRow t{l, b, false, 0.0, 0.0};
      auto it_t = slices.find({l, treatment});
      auto it_b = slices.find({l, b});
      if (it_t != slices.end() && it_b != slices.end()) {
        const auto a = run_means(it_t->second, &ResultRow::macro_f1);
        const auto c = run_means(it_b->second, &ResultRow::macro_f1);
        if (a.size() >= 2 || c.size() >= 2) {
          t.computed = true;
          t.p = welch_one_tailed(a, c).p;
          t.d = cohens_d(a, c);
        }
      }
      tests.push_back(t);
    }
  }
  const int m = static_cast<int>(
      std::count_if(tests.begin(), tests.end(), [](const TestRow& t) { return t.computed; }));
  if (m == 0) throw MetricError("table8: no comparable (treatment, baseline) pairs");
  const double threshold = bonferroni_threshold(m);

  ensure_dir(out_dir);
  std::vector<std::vector<std::string>> csv_rows;
  detail::Json jrows = detail::Json::array();
  for (const auto& t : tests) {
    std::string tier = "missing";
    if (t.computed) {
      tier = t.p < threshold ? "bonferroni" : t.p < 0.05 ? "uncorrected" : "none";
    }
    csv_rows.push_back({t.label, method_display_name(t.baseline),
                        t.computed ? format_double(t.p) : "",
                        t.computed ? format_double(t.d) : "", tier});
    detail::Json j = {{"dataset", t.label},
                      {"baseline", t.baseline},
                      {"significance", tier}};
    if (t.computed) {
      j["p_value"] = t.p;
      j["cohens_d"] = t.d;
    } else {
      j["p_value"] = nullptr;
      j["cohens_d"] = nullptr;
    }
    jrows.push_back(j);
  }

  const std::string csv_path = join_path(out_dir, "table8.csv");
  const std::string json_path = join_path(out_dir, "table8.json");
  write_csv_file(csv_path, {"dataset", "baseline", "p_value", "cohens_d", "significance"},
                 csv_rows);
  detail::Json doc = {{"layout", "table8"},
                      {"metric", "macro_f1"},
                      {"treatment", treatment},
                      {"test", "welch_one_tailed_upper"},
                      {"alpha", 0.05},
                      {"m", m},
                      {"bonferroni_threshold", threshold},
                      {"rows", jrows}};
  detail::write_text_file(json_path, doc.dump(2) + "\n");
  return {{csv_path, json_path}};
}

std::vector<RegressionPoint> regression_points(const std::vector<ResultRow>& raw_rows,
                                               const std::string& dataset,
                                               const std::string& scheme,
                                               const std::string& method) {
  const auto rows = dedup_rows(raw_rows);
  std::map<std::string, std::vector<const ResultRow*>> by_unit;
  for (const auto& r : rows) {
    if (r.status != "ok" || r.dataset != dataset || r.method != method) continue;
    if (!scheme.empty() && r.scheme != scheme) continue;
    by_unit[r.unit_id].push_back(&r);
  }
  std::vector<RegressionPoint> out;
  for (const auto& [unit, unit_rows] : by_unit) {
    RegressionPoint p;
    p.unit_id = unit;
    std::vector<double> f1s, accs;
    for (const auto* r : unit_rows) {
      f1s.push_back(r->macro_f1);
      accs.push_back(r->accuracy);
    }
    p.macro_f1 = mean(f1s);
    p.accuracy = mean(accs);
    p.neutral_base_rate = unit_rows.front()->neutral_base_rate;
    out.push_back(std::move(p));
  }
  return out;
}

ReportFiles report_table11(const std::vector<RegressionPoint>& points,
                           const std::string& out_dir) {
  if (points.size() < 3) throw MetricError("table11: need at least 3 points");
  std::vector<double> xs, f1s, accs;
  for (const auto& p : points) {
    xs.push_back(p.neutral_base_rate);
    f1s.push_back(p.macro_f1);
    accs.push_back(p.accuracy);
  }
  const RegressionResult rf = ols_regression(xs, f1s);
  const RegressionResult ra = ols_regression(xs, accs);

  ensure_dir(out_dir);
  auto csv_line = [](const std::string& name, const RegressionResult& r) {
    return std::vector<std::string>{
        name,
        std::to_string(r.n),
        format_double(r.intercept),
        format_double(r.slope),
        format_double(r.stderr_slope),
        format_double(r.ci95_low),
        format_double(r.ci95_high),
        format_double(r.r),
        format_double(r.r_squared),
        format_double(r.p),
        format_double(r.rmse)};
  };
  auto json_row = [](const std::string& name, const RegressionResult& r) {
    return detail::Json{{"metric", name},
                        {"n", r.n},
                        {"intercept", r.intercept},
                        {"slope", r.slope},
                        {"slope_se", r.stderr_slope},
                        {"ci95_low", r.ci95_low},
                        {"ci95_high", r.ci95_high},
                        {"r", r.r},
                        {"r_squared", r.r_squared},
                        {"p_value", r.p},
                        {"rmse", r.rmse}};
  };

  const std::string csv_path = join_path(out_dir, "table11.csv");
  const std::string json_path = join_path(out_dir, "table11.json");
  write_csv_file(csv_path,
                 {"metric", "n", "intercept", "slope", "slope_se", "ci95_low", "ci95_high",
                  "r", "r_squared", "p_value", "rmse"},
                 {csv_line("macro_f1", rf), csv_line("accuracy", ra)});

  detail::Json jpoints = detail::Json::array();
  for (const auto& p : points) {
    jpoints.push_back({{"unit_id", p.unit_id},
                       {"neutral_base_rate", p.neutral_base_rate},
                       {"macro_f1", p.macro_f1},
                       {"accuracy", p.accuracy}});
  }
  detail::Json doc = {{"layout", "table11"},
                      {"scale", "fraction"},
                      {"x", "neutral_base_rate"},
                      {"rows", {json_row("macro_f1", rf), json_row("accuracy", ra)}},
                      {"points", jpoints}};
  detail::write_text_file(json_path, doc.dump(2) + "\n");
  return {{csv_path, json_path}};
}

// ---------------------------------------------------------------------------
// Figures

ReportFiles report_fig2(const std::vector<SpacePointRecord>& points,
                        const std::string& out_dir) {
  if (points.empty()) throw MetricError("fig2: no points");
  ensure_dir(out_dir);

  PlotStyle style;
  style.title = "Political space";
  style.x_label = "PC1";
  style.y_label = "PC2";
  Figure fig(style);

  std::map<std::string, const SpacePointRecord*> human, agent;
  for (const auto& p : points) {
    if (p.kind == "population") fig.add_point(p.x, p.y, "#c8c8c8", 1.6);
  }
  for (const auto& p : points) {
    if (p.kind == "human") human[p.unit_id] = &p;
    if (p.kind == "agent") agent[p.unit_id] = &p;
  }
  for (const auto& [unit, h] : human) {
    auto it = agent.find(unit);
    if (it != agent.end()) fig.add_line(h->x, h->y, it->second->x, it->second->y,
                                        "#555555", 1.0);
  }
  std::set<std::string> groups_seen;
  for (const auto& p : points) {
    if (p.kind == "human") {
      fig.add_point(p.x, p.y, group_color(p.group), 5.0);
      groups_seen.insert(p.group);
    } else if (p.kind == "agent") {
      fig.add_point(p.x, p.y, "#d4a017", 5.0);
    } else if (p.kind == "inverted") {
      fig.add_point(p.x, p.y, blend_color(group_color(p.group), "#ffffff", 0.45), 3.5);
    }
  }

  // group-mean displacement arrows, human -> human + mean(agent - human)
  std::map<std::string, std::vector<std::pair<double, double>>> deltas;
  std::map<std::string, std::vector<std::pair<double, double>>> origins;
  for (const auto& [unit, h] : human) {
    auto it = agent.find(unit);
    if (it == agent.end()) continue;
    deltas[h->group].push_back({it->second->x - h->x, it->second->y - h->y});
    origins[h->group].push_back({h->x, h->y});
  }
  for (const auto& [group, ds] : deltas) {
    double ox = 0, oy = 0, dx = 0, dy = 0;
    for (const auto& [x, y] : origins[group]) {
      ox += x;
      oy += y;
    }
    for (const auto& [x, y] : ds) {
      dx += x;
      dy += y;
    }
    const double n = static_cast<double>(ds.size());
    fig.add_arrow(ox / n, oy / n, ox / n + dx / n, oy / n + dy / n, group_color(group), 3.0);
  }

  std::vector<std::string> group_list(groups_seen.begin(), groups_seen.end());
  sort_by_rank(group_list, group_rank);
  for (const auto& g : group_list) fig.add_legend(g, group_color(g));
  if (!agent.empty()) fig.add_legend("agent", "#d4a017");

  const std::string svg = join_path(out_dir, "fig2.svg");
  const std::string png = join_path(out_dir, "fig2.png");
  const std::string csv = join_path(out_dir, "fig2.csv");
  fig.write_svg(svg);
  fig.write_png(png);
  std::vector<std::vector<std::string>> csv_rows;
  for (const auto& p : points) {
    csv_rows.push_back({p.unit_id, p.kind, format_double(p.x), format_double(p.y), p.group});
  }
  write_csv_file(csv, {"unit_id", "kind", "x", "y", "group"}, csv_rows);
  return {{svg, png, csv}};
}

ReportFiles report_fig3(const std::vector<ResultRow>& raw_rows, const Dataset& dataset,
                        const std::string& out_dir) {
  const auto rows = dedup_rows(raw_rows);
  const std::string dataset_id = survey_name(dataset.survey);
  std::map<std::string, std::string> unit_group;
  for (const auto& u : dataset.units) unit_group[u.unit_id] = group_name(u.group);

  // per (group, method): per-unit mean F1 across runs
  std::map<std::pair<std::string, std::string>, std::map<std::string, std::vector<double>>>
      cells;
  std::set<std::string> method_set, group_set;
  for (const auto& r : rows) {
    if (r.status != "ok" || r.dataset != dataset_id) continue;
    auto it = unit_group.find(r.unit_id);
    if (it == unit_group.end()) continue;
    cells[{it->second, r.method}][r.unit_id].push_back(r.macro_f1);
    method_set.insert(r.method);
    group_set.insert(it->second);
  }
  if (cells.empty()) throw MetricError("fig3: no matching result rows");

  std::vector<std::string> methods(method_set.begin(), method_set.end());
  std::vector<std::string> groups(group_set.begin(), group_set.end());
  sort_by_rank(methods, method_rank);
  sort_by_rank(groups, group_rank);

  PlotStyle style;
  style.title = "Macro-F1 by group and method";
  style.y_label = "Macro-F1 (%)";
  style.show_x_ticks = false;
  Figure fig(style);

  const double nm = static_cast<double>(methods.size());
  double top = 0.0;
  std::vector<std::vector<std::string>> csv_rows;
  struct Bar {
    double x, mean, std;
    std::string color;
  };
  std::vector<Bar> bars;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t m = 0; m < methods.size(); ++m) {
      const double x = static_cast<double>(g) * (nm + 1.0) + static_cast<double>(m);
      auto it = cells.find({groups[g], methods[m]});
      if (it == cells.end()) {
        csv_rows.push_back({groups[g], method_display_name(methods[m]), "", "", "0"});
        continue;
      }
      std::vector<double> unit_means;
      for (const auto& [unit, f1s] : it->second) unit_means.push_back(mean(f1s) * 100.0);
      const double m_val = mean(unit_means);
      const double s_val = unit_means.size() > 1 ? sample_stddev(unit_means) : 0.0;
      bars.push_back({x, m_val, s_val, palette_color(m)});
      top = std::max(top, m_val + s_val);
      csv_rows.push_back({groups[g], method_display_name(methods[m]), format_double(m_val),
                          format_double(s_val), std::to_string(unit_means.size())});
    }
  }
  const double y_max = std::max(top * 1.2, 10.0);
  fig.set_y_range(0.0, y_max);
  fig.set_x_range(-1.0, static_cast<double>(groups.size()) * (nm + 1.0));
  for (const auto& b : bars) {
    fig.add_bar(b.x, 0.84, 0.0, b.mean, b.color);
    if (b.std > 0.0) fig.add_error_bar(b.x, b.mean, b.std, "#333333");
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double center = static_cast<double>(g) * (nm + 1.0) + (nm - 1.0) / 2.0;
    fig.add_text(center, y_max * 0.96, groups[g], group_color(groups[g]));
  }
  for (std::size_t m = 0; m < methods.size(); ++m) {
    fig.add_legend(method_display_name(methods[m]), palette_color(m));
  }

  const std::string svg = join_path(out_dir, "fig3.svg");
  const std::string png = join_path(out_dir, "fig3.png");
  const std::string csv = join_path(out_dir, "fig3.csv");
  ensure_dir(out_dir);
  fig.write_svg(svg);
  fig.write_png(png);
  write_csv_file(csv, {"group", "method", "mean_f1_pct", "std_f1_pct", "n_units"}, csv_rows);
  return {{svg, png, csv}};
}

ReportFiles report_fig4(const std::vector<ResultRow>& raw_rows, const std::string& dataset,
                        const std::string& scheme, const std::string& method,
                        const std::string& out_dir) {
  const auto rows = dedup_rows(raw_rows);
  std::vector<const ResultRow*> slice;
  for (const auto& r : rows) {
    if (r.status != "ok" || r.dataset != dataset || r.method != method) continue;
    if (!scheme.empty() && r.scheme != scheme) continue;
    slice.push_back(&r);
  }
  if (slice.empty()) throw MetricError("fig4: no matching result rows");
  ensure_dir(out_dir);
  ReportFiles files;

  {  // recall by class
    const Stance classes[] = {Stance::Yes, Stance::No, Stance::Neutral};
    PlotStyle style;
    style.title = "Recall by class";
    style.y_label = "Recall";
    style.show_x_ticks = false;
    Figure fig(style);
    fig.set_y_range(0.0, 1.12);
    fig.set_x_range(-0.8, 2.8);
    std::vector<std::vector<std::string>> csv_rows;
    for (std::size_t i = 0; i < 3; ++i) {
      std::vector<double> values;
      for (const auto* r : slice) {
        auto it = r->per_class_recall.find(classes[i]);
        if (it != r->per_class_recall.end()) values.push_back(it->second);
      }
      const std::string& label = stance_label(classes[i]);
      if (values.empty()) {
        csv_rows.push_back({label, "", "", "0"});
        continue;
      }
      const double m = mean(values);
      const double s = values.size() > 1 ? sample_stddev(values) : 0.0;
      const double x = static_cast<double>(i);
      fig.add_bar(x, 0.7, 0.0, m, palette_color(i));
      if (s > 0.0) fig.add_error_bar(x, m, s, "#333333");
      fig.add_text(x, 1.06, label);
      csv_rows.push_back(
          {label, format_double(m), format_double(s), std::to_string(values.size())});
    }
    const std::string svg = join_path(out_dir, "fig4_recall.svg");
    const std::string png = join_path(out_dir, "fig4_recall.png");
    const std::string csv = join_path(out_dir, "fig4_recall.csv");
    fig.write_svg(svg);
    fig.write_png(png);
    write_csv_file(csv, {"class", "mean_recall", "std_recall", "n_rows"}, csv_rows);
    files.paths.insert(files.paths.end(), {svg, png, csv});
  }

  {  // F1 vs neutral base rate with fitted line
    const auto points = regression_points(rows, dataset, scheme, method);
    if (points.size() < 3) throw MetricError("fig4: need at least 3 units for regression");
    std::vector<double> xs, ys;
    for (const auto& p : points) {
      xs.push_back(p.neutral_base_rate);
      ys.push_back(p.macro_f1);
    }
    const RegressionResult reg = ols_regression(xs, ys);
    PlotStyle style;
    style.title = "Macro-F1 vs neutral base rate";
    style.x_label = "Neutral base rate";
    style.y_label = "Macro-F1";
    Figure fig(style);
    for (const auto& p : points) fig.add_point(p.neutral_base_rate, p.macro_f1, "#4269d0");
    const double x0 = *std::min_element(xs.begin(), xs.end());
    const double x1 = *std::max_element(xs.begin(), xs.end());
    fig.add_line(x0, reg.intercept + reg.slope * x0, x1, reg.intercept + reg.slope * x1,
                 "#c2423f", 2.0);
    char note[96];
    std::snprintf(note, sizeof note, "slope=%.4g  p=%.4g  r=%.3g", reg.slope, reg.p, reg.r);
    const double y_top = *std::max_element(ys.begin(), ys.end());
    fig.add_text((x0 + x1) / 2.0, y_top, note);

    const std::string svg = join_path(out_dir, "fig4_regression.svg");
    const std::string png = join_path(out_dir, "fig4_regression.png");
    const std::string csv = join_path(out_dir, "fig4_regression.csv");
    fig.write_svg(svg);
    fig.write_png(png);
    std::vector<std::vector<std::string>> csv_rows;
    for (const auto& p : points) {
      csv_rows.push_back({p.unit_id, format_double(p.neutral_base_rate),
                          format_double(p.macro_f1), format_double(p.accuracy)});
    }
    write_csv_file(csv, {"unit_id", "neutral_base_rate", "macro_f1", "accuracy"}, csv_rows);
    files.paths.insert(files.paths.end(), {svg, png, csv});
  }
  return files;
}

ReportFiles report_fig5(const BiasReport& report, const std::string& out_dir) {
  if (report.cells.empty()) throw MetricError("fig5: empty bias report");
  ensure_dir(out_dir);

  std::set<std::string> bias_set, group_set;
  std::map<std::pair<std::string, std::string>, std::vector<double>> cell_values;
  for (const auto& c : report.cells) {
    bias_set.insert(c.bias);
    group_set.insert(c.group);
    cell_values[{c.bias, c.group}].push_back(c.mean_macro_f1 * 100.0);
  }
  std::vector<std::string> biases(bias_set.begin(), bias_set.end());
  std::vector<std::string> groups(group_set.begin(), group_set.end());
  sort_by_rank(biases, bias_rank);
  sort_by_rank(groups, group_rank);

  PlotStyle style;
  style.title = "Macro-F1 by SFT-corpus bias";
  style.y_label = "Macro-F1 (%)";
  style.show_x_ticks = false;
  Figure fig(style);

  const double ng = static_cast<double>(groups.size());
  double top = 0.0;
  struct Bar {
    double x, mean, std;
    std::string color;
  };
  std::vector<Bar> bars;
  std::vector<std::vector<std::string>> csv_rows;
  for (std::size_t b = 0; b < biases.size(); ++b) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const double x = static_cast<double>(b) * (ng + 1.0) + static_cast<double>(g);
      auto it = cell_values.find({biases[b], groups[g]});
      if (it == cell_values.end()) {
        csv_rows.push_back({biases[b], groups[g], "", "", "0"});
        continue;
      }
      const double m = mean(it->second);
      const double s = it->second.size() > 1 ? sample_stddev(it->second) : 0.0;
      bars.push_back({x, m, s, group_color(groups[g])});
      top = std::max(top, m + s);
      csv_rows.push_back({biases[b], groups[g], format_double(m), format_double(s),
                          std::to_string(it->second.size())});
    }
  }
  const double y_max = std::max(top * 1.2, 10.0);
  fig.set_y_range(0.0, y_max);
  fig.set_x_range(-1.0, static_cast<double>(biases.size()) * (ng + 1.0));
  for (const auto& bar : bars) {
    fig.add_bar(bar.x, 0.84, 0.0, bar.mean, bar.color);
    if (bar.std > 0.0) fig.add_error_bar(bar.x, bar.mean, bar.std, "#333333");
  }
  for (std::size_t b = 0; b < biases.size(); ++b) {
    const double center = static_cast<double>(b) * (ng + 1.0) + (ng - 1.0) / 2.0;
    fig.add_text(center, y_max * 0.96, biases[b]);
  }
  for (const auto& g : groups) fig.add_legend(g, group_color(g));

  const std::string svg = join_path(out_dir, "fig5.svg");
  const std::string png = join_path(out_dir, "fig5.png");
  const std::string csv = join_path(out_dir, "fig5.csv");
  fig.write_svg(svg);
  fig.write_png(png);
  write_csv_file(csv, {"bias", "group", "mean_f1_pct", "std_f1_pct", "n_units"}, csv_rows);
  return {{svg, png, csv}};
}

ReportFiles report_fig6(const BiasReport& report, const std::string& out_dir) {
  if (report.displacements.empty()) throw MetricError("fig6: no displacement vectors");
  ensure_dir(out_dir);

  PlotStyle style;
  style.title = "Group-mean agent displacement";
  style.x_label = "PC1";
  style.y_label = "PC2";
  Figure fig(style);

  double extent = 0.0;
  for (const auto& d : report.displacements) {
    extent = std::max({extent, std::abs(d.dx), std::abs(d.dy)});
  }
  extent = std::max(extent * 1.25, 1e-6);
  fig.set_x_range(-extent, extent);
  fig.set_y_range(-extent, extent);
  fig.add_line(-extent, 0.0, extent, 0.0, "#bbbbbb", 1.0);
  fig.add_line(0.0, -extent, 0.0, extent, "#bbbbbb", 1.0);

  auto arrow_color = [](const BiasDisplacement& d) {
    const std::string base = group_color(d.group);
    if (d.bias == "progressive") return blend_color(base, "#ffffff", 0.4);
    if (d.bias == "conservative") return blend_color(base, "#000000", 0.35);
    return base;
  };
  std::vector<const BiasDisplacement*> ordered;
  for (const auto& d : report.displacements) ordered.push_back(&d);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const BiasDisplacement* a, const BiasDisplacement* b) {
                     if (bias_rank(a->bias) != bias_rank(b->bias))
                       return bias_rank(a->bias) < bias_rank(b->bias);
                     return group_rank(a->group) < group_rank(b->group);
                   });
  std::vector<std::vector<std::string>> csv_rows;
  for (const auto* d : ordered) {
    fig.add_arrow(0.0, 0.0, d->dx, d->dy, arrow_color(*d), 2.5);
    fig.add_legend(d->group + " (" + d->bias + ")", arrow_color(*d));
    csv_rows.push_back({d->bias, d->group, format_double(d->dx), format_double(d->dy)});
  }

  const std::string svg = join_path(out_dir, "fig6.svg");
  const std::string png = join_path(out_dir, "fig6.png");
  const std::string csv = join_path(out_dir, "fig6.csv");
  fig.write_svg(svg);
  fig.write_png(png);
  write_csv_file(csv, {"bias", "group", "dx", "dy"}, csv_rows);
  return {{svg, png, csv}};
}

ReportFiles report_fig7(const std::vector<InversionRow>& rows, const std::string& out_dir) {
  if (rows.empty()) throw MetricError("fig7: no inversion rows");
  ensure_dir(out_dir);
  std::vector<InversionRow> ordered = rows;
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const InversionRow& a, const InversionRow& b) { return a.pc1 < b.pc1; });

  PlotStyle style;
  style.title = "F1 before and after inversion";
  style.x_label = "PC1";
  style.y_label = "Macro-F1 (%)";
  Figure fig(style);

  std::vector<std::vector<std::string>> csv_rows;
  for (const auto& r : ordered) {
    const double orig = r.f1_original * 100.0;
    const double inv = r.f1_inverted * 100.0;
    const double delta = inv - orig;
    const std::string color =
        std::abs(delta) < 0.05 ? "#888888" : delta > 0 ? "#3ca951" : "#c2423f";
    fig.add_point(r.pc1, orig, "#4269d0", 4.5);
    fig.add_arrow(r.pc1, orig, r.pc1, inv, color, 2.0);
    csv_rows.push_back({r.unit_id, format_double(r.pc1), format_double(orig),
                        format_double(inv), format_double(delta)});
  }
  fig.add_legend("original", "#4269d0");
  fig.add_legend("improved", "#3ca951");
  fig.add_legend("declined", "#c2423f");

  const std::string svg = join_path(out_dir, "fig7.svg");
  const std::string png = join_path(out_dir, "fig7.png");
  const std::string csv = join_path(out_dir, "fig7.csv");
  fig.write_svg(svg);
  fig.write_png(png);
  write_csv_file(
      csv, {"unit_id", "pc1", "f1_original_pct", "f1_inverted_pct", "delta_pct"}, csv_rows);
  return {{svg, png, csv}};
}

SchemeSummary scheme_summary(const SchemeOutcome& outcome) {
  SchemeSummary s;
  s.scheme = outcome.scheme;
  s.labels = outcome.confusion.labels;
  s.confusion = outcome.confusion.counts;
  s.regression = outcome.regression;
  s.aggregate = outcome.aggregate;
  return s;
}

ReportFiles report_fig10(const std::vector<SchemeSummary>& summaries,
                         const std::string& out_dir) {
  if (summaries.empty()) throw MetricError("fig10: no scheme summaries");
  ensure_dir(out_dir);
  ReportFiles files;
  std::vector<std::vector<std::string>> csv_rows;
  detail::Json jschemes = detail::Json::array();

  for (const auto& s : summaries) {
    const std::size_t n = s.labels.size();
    if (s.confusion.size() != n) throw DataError("fig10: confusion shape mismatch");
    const std::size_t cols = n + 1;  // trailing unresolved column

    PlotStyle style;
    style.width = 720;
    style.height = 560;
    style.title = "Confusion (" + s.scheme + ")";
    style.x_label = "predicted";
    style.y_label = "truth";
    style.show_x_ticks = false;
    style.show_y_ticks = false;
    Figure fig(style);
    fig.set_x_range(-1.3, static_cast<double>(cols) + 0.1);
    fig.set_y_range(-0.3, static_cast<double>(n) + 0.9);

    for (std::size_t t = 0; t < n; ++t) {
      if (s.confusion[t].size() != cols) throw DataError("fig10: confusion shape mismatch");
      long row_total = 0;
      for (long c : s.confusion[t]) row_total += c;
      const double y0 = static_cast<double>(n - 1 - t);
      for (std::size_t p = 0; p < cols; ++p) {
        const long count = s.confusion[t][p];
        const double frac =
            row_total > 0 ? static_cast<double>(count) / static_cast<double>(row_total) : 0.0;
        const double x0 = static_cast<double>(p);
        fig.add_cell(x0 + 0.03, y0 + 0.03, x0 + 0.97, y0 + 0.97,
                     blend_color("#f8f9fc", "#2b4d9e", frac));
        fig.add_text(x0 + 0.5, y0 + 0.5, std::to_string(count),
                     frac > 0.55 ? "#ffffff" : "#222222");
        const std::string pred_label =
            p < n ? stance_label(s.labels[p]) : std::string("unresolved");
        csv_rows.push_back({s.scheme, stance_label(s.labels[t]), pred_label,
                            std::to_string(count), format_double(frac)});
      }
      fig.add_text(-0.7, y0 + 0.5, stance_label(s.labels[t]));
    }
    for (std::size_t p = 0; p < cols; ++p) {
      const std::string pred_label =
          p < n ? stance_label(s.labels[p]) : std::string("unresolved");
      fig.add_text(static_cast<double>(p) + 0.5, static_cast<double>(n) + 0.45, pred_label);
    }

    const std::string svg = join_path(out_dir, "fig10_" + s.scheme + ".svg");
    const std::string png = join_path(out_dir, "fig10_" + s.scheme + ".png");
    fig.write_svg(svg);
    fig.write_png(png);
    files.paths.insert(files.paths.end(), {svg, png});

    detail::Json jlabels = detail::Json::array();
    for (const auto& l : s.labels) jlabels.push_back(stance_label(l));
    jschemes.push_back(
        {{"scheme", s.scheme},
         {"labels", jlabels},
         {"confusion", s.confusion},
         {"regression",
          {{"n", s.regression.n},
           {"intercept", s.regression.intercept},
           {"slope", s.regression.slope},
           {"slope_se", s.regression.stderr_slope},
           {"ci95_low", s.regression.ci95_low},
           {"ci95_high", s.regression.ci95_high},
           {"r", s.regression.r},
           {"r_squared", s.regression.r_squared},
           {"p_value", s.regression.p},
           {"rmse", s.regression.rmse}}},
         {"aggregate",
          {{"mean_macro_f1", s.aggregate.mean_macro_f1},
           {"std_macro_f1", s.aggregate.std_macro_f1},
           {"mean_accuracy", s.aggregate.mean_accuracy},
           {"std_accuracy", s.aggregate.std_accuracy},
           {"n_units", s.aggregate.n_units},
           {"n_runs", s.aggregate.n_runs}}}});
  }

  const std::string csv = join_path(out_dir, "fig10.csv");
  const std::string json_path = join_path(out_dir, "fig10.json");
  write_csv_file(csv, {"scheme", "truth", "pred", "count", "row_fraction"}, csv_rows);
  detail::Json doc = {{"layout", "fig10"}, {"schemes", jschemes}};
  detail::write_text_file(json_path, doc.dump(2) + "\n");
  files.paths.push_back(csv);
  files.paths.push_back(json_path);
  return files;
}

ReportFiles report_fig11(const std::vector<TrainsizeRow>& rows, const std::string& out_dir) {
  if (rows.empty()) throw MetricError("fig11: no ablation rows");
  ensure_dir(out_dir);

  std::map<std::string, std::vector<const TrainsizeRow*>> by_unit;
  for (const auto& r : rows) by_unit[r.unit_id].push_back(&r);

  PlotStyle style;
  style.title = "Macro-F1 vs train fraction";
  style.x_label = "Train fraction";
  style.y_label = "Macro-F1 (%)";
  Figure fig(style);

  std::vector<std::vector<std::string>> csv_rows;
  std::size_t idx = 0;
  for (auto& [unit, unit_rows] : by_unit) {
    std::stable_sort(unit_rows.begin(), unit_rows.end(),
                     [](const TrainsizeRow* a, const TrainsizeRow* b) {
                       return a->fraction < b->fraction;
                     });
    std::vector<double> xs, ys;
    const std::string color = palette_color(idx);
    for (const auto* r : unit_rows) {
      xs.push_back(r->fraction);
      ys.push_back(r->mean_macro_f1 * 100.0);
      if (r->std_macro_f1 > 0.0) {
        fig.add_error_bar(r->fraction, r->mean_macro_f1 * 100.0, r->std_macro_f1 * 100.0,
                          color);
      }
      csv_rows.push_back({unit, format_double(r->fraction),
                          format_double(r->mean_macro_f1 * 100.0),
                          format_double(r->std_macro_f1 * 100.0)});
    }
    if (xs.size() >= 2) {
      fig.add_polyline(xs, ys, color, 2.0);
    } else if (xs.size() == 1) {
      fig.add_point(xs[0], ys[0], color, 4.0);
    }
    fig.add_legend(unit, color);
    ++idx;
  }

  const std::string svg = join_path(out_dir, "fig11.svg");
  const std::string png = join_path(out_dir, "fig11.png");
  const std::string csv = join_path(out_dir, "fig11.csv");
  fig.write_svg(svg);
  fig.write_png(png);
  write_csv_file(csv, {"unit_id", "fraction", "mean_f1_pct", "std_f1_pct"}, csv_rows);
  return {{svg, png, csv}};
}

// ---------------------------------------------------------------------------
// Round-trips for experiment outputs

void save_space_points(const std::vector<SpacePointRecord>& points, const std::string& path) {
  detail::Json arr = detail::Json::array();
  for (const auto& p : points) {
    arr.push_back({{"unit_id", p.unit_id},
                   {"kind", p.kind},
                   {"x", p.x},
                   {"y", p.y},
                   {"group", p.group}});
  }
  detail::write_text_file(path, arr.dump(2) + "\n");
}

std::vector<SpacePointRecord> load_space_points(const std::string& path) {
  const auto doc = detail::load_json_file(path);
  if (!doc.is_array()) throw DataError(path + ": expected an array");
  std::vector<SpacePointRecord> out;
  for (const auto& j : doc) {
    SpacePointRecord p;
    p.unit_id = detail::require(j, "unit_id", path).get<std::string>();
    p.kind = detail::require(j, "kind", path).get<std::string>();
    p.x = detail::require(j, "x", path).get<double>();
    p.y = detail::require(j, "y", path).get<double>();
    p.group = j.value("group", "");
    out.push_back(std::move(p));
  }
  return out;
}

void save_bias_report(const BiasReport& report, const std::string& path) {
  detail::Json cells = detail::Json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"bias", c.bias},
                     {"unit_id", c.unit_id},
                     {"group", c.group},
                     {"mean_macro_f1", c.mean_macro_f1}});
  }
  detail::Json displacements = detail::Json::array();
  for (const auto& d : report.displacements) {
    displacements.push_back(
        {{"bias", d.bias}, {"group", d.group}, {"dx", d.dx}, {"dy", d.dy}});
  }
  detail::Json doc = {{"cells", cells}, {"displacements", displacements}};
  detail::write_text_file(path, doc.dump(2) + "\n");
}

BiasReport load_bias_report(const std::string& path) {
  const auto doc = detail::load_json_file(path);
  BiasReport report;
  for (const auto& j : detail::require(doc, "cells", path)) {
    BiasCell c;
    c.bias = detail::require(j, "bias", path).get<std::string>();
    c.unit_id = detail::require(j, "unit_id", path).get<std::string>();
    c.group = detail::require(j, "group", path).get<std::string>();
    c.mean_macro_f1 = detail::require(j, "mean_macro_f1", path).get<double>();
    report.cells.push_back(std::move(c));
  }
  for (const auto& j : detail::require(doc, "displacements", path)) {
    BiasDisplacement d;
    d.bias = detail::require(j, "bias", path).get<std::string>();
    d.group = detail::require(j, "group", path).get<std::string>();
    d.dx = detail::require(j, "dx", path).get<double>();
    d.dy = detail::require(j, "dy", path).get<double>();
    report.displacements.push_back(std::move(d));
  }
  return report;
}

void save_inversion_rows(const std::vector<InversionRow>& rows, const std::string& path) {
  detail::Json arr = detail::Json::array();
  for (const auto& r : rows) {
    arr.push_back({{"unit_id", r.unit_id},
                   {"pc1", r.pc1},
                   {"f1_original", r.f1_original},
                   {"f1_inverted", r.f1_inverted}});
  }
  detail::write_text_file(path, arr.dump(2) + "\n");
}

std::vector<InversionRow> load_inversion_rows(const std::string& path) {
  const auto doc = detail::load_json_file(path);
  if (!doc.is_array()) throw DataError(path + ": expected an array");
  std::vector<InversionRow> out;
  for (const auto& j : doc) {
    InversionRow r;
    r.unit_id = detail::require(j, "unit_id", path).get<std::string>();
    r.pc1 = detail::require(j, "pc1", path).get<double>();
    r.f1_original = detail::require(j, "f1_original", path).get<double>();
    r.f1_inverted = detail::require(j, "f1_inverted", path).get<double>();
    out.push_back(std::move(r));
  }
  return out;
}

void save_trainsize_rows(const std::vector<TrainsizeRow>& rows, const std::string& path) {
  detail::Json arr = detail::Json::array();
  for (const auto& r : rows) {
    arr.push_back({{"unit_id", r.unit_id},
                   {"fraction", r.fraction},
                   {"mean_macro_f1", r.mean_macro_f1},
                   {"std_macro_f1", r.std_macro_f1}});
  }
  detail::write_text_file(path, arr.dump(2) + "\n");
}

std::vector<TrainsizeRow> load_trainsize_rows(const std::string& path) {
  const auto doc = detail::load_json_file(path);
  if (!doc.is_array()) throw DataError(path + ": expected an array");
  std::vector<TrainsizeRow> out;
  for (const auto& j : doc) {
    TrainsizeRow r;
    r.unit_id = detail::require(j, "unit_id", path).get<std::string>();
    r.fraction = detail::require(j, "fraction", path).get<double>();
    r.mean_macro_f1 = detail::require(j, "mean_macro_f1", path).get<double>();
    r.std_macro_f1 = j.value("std_macro_f1", 0.0);
    out.push_back(std::move(r));
  }
  return out;
}

void save_scheme_summaries(const std::vector<SchemeSummary>& summaries,
                           const std::string& path) {
  detail::Json arr = detail::Json::array();
  for (const auto& s : summaries) {
    detail::Json jlabels = detail::Json::array();
    for (const auto& l : s.labels) jlabels.push_back(stance_label(l));
    arr.push_back({{"scheme", s.scheme},
                   {"labels", jlabels},
                   {"confusion", s.confusion},
                   {"regression",
                    {{"n", s.regression.n},
                     {"intercept", s.regression.intercept},
                     {"slope", s.regression.slope},
                     {"slope_se", s.regression.stderr_slope},
                     {"ci95_low", s.regression.ci95_low},
                     {"ci95_high", s.regression.ci95_high},
                     {"r", s.regression.r},
                     {"r_squared", s.regression.r_squared},
                     {"p_value", s.regression.p},
                     {"rmse", s.regression.rmse}}},
                   {"aggregate",
                    {{"mean_macro_f1", s.aggregate.mean_macro_f1},
                     {"std_macro_f1", s.aggregate.std_macro_f1},
                     {"mean_accuracy", s.aggregate.mean_accuracy},
                     {"std_accuracy", s.aggregate.std_accuracy},
                     {"n_units", s.aggregate.n_units},
                     {"n_runs", s.aggregate.n_runs}}}});
  }
  detail::write_text_file(path, arr.dump(2) + "\n");
}

std::vector<SchemeSummary> load_scheme_summaries(const std::string& path) {
  const auto doc = detail::load_json_file(path);
  if (!doc.is_array()) throw DataError(path + ": expected an array");
  std::vector<SchemeSummary> out;
  for (const auto& j : doc) {
    SchemeSummary s;
    s.scheme = detail::require(j, "scheme", path).get<std::string>();
    for (const auto& l : detail::require(j, "labels", path)) {
      const auto stance = stance_from_label(l.get<std::string>());
      if (!stance) throw DataError(path + ": unknown label " + l.get<std::string>());
      s.labels.push_back(*stance);
    }
    s.confusion =
        detail::require(j, "confusion", path).get<std::vector<std::vector<long>>>();
    const auto& reg = detail::require(j, "regression", path);
    s.regression.n = detail::require(reg, "n", path).get<std::size_t>();
    s.regression.intercept = detail::require(reg, "intercept", path).get<double>();
    s.regression.slope = detail::require(reg, "slope", path).get<double>();
    s.regression.stderr_slope = detail::require(reg, "slope_se", path).get<double>();
    s.regression.ci95_low = detail::require(reg, "ci95_low", path).get<double>();
    s.regression.ci95_high = detail::require(reg, "ci95_high", path).get<double>();
    s.regression.r = detail::require(reg, "r", path).get<double>();
    s.regression.r_squared = detail::require(reg, "r_squared", path).get<double>();
    s.regression.p = detail::require(reg, "p_value", path).get<double>();
    s.regression.rmse = detail::require(reg, "rmse", path).get<double>();
    const auto& agg = detail::require(j, "aggregate", path);
    s.aggregate.mean_macro_f1 = detail::require(agg, "mean_macro_f1", path).get<double>();
    s.aggregate.std_macro_f1 = detail::require(agg, "std_macro_f1", path).get<double>();
    s.aggregate.mean_accuracy = detail::require(agg, "mean_accuracy", path).get<double>();
    s.aggregate.std_accuracy = detail::require(agg, "std_accuracy", path).get<double>();
    s.aggregate.n_units = detail::require(agg, "n_units", path).get<int>();
    s.aggregate.n_runs = detail::require(agg, "n_runs", path).get<int>();
    out.push_back(std::move(s));
  }
  return out;
}

void save_regression_points(const std::vector<RegressionPoint>& points,
                            const std::string& path) {
  detail::Json arr = detail::Json::array();
  for (const auto& p : points) {
    arr.push_back({{"unit_id", p.unit_id},
                   {"neutral_base_rate", p.neutral_base_rate},
                   {"macro_f1", p.macro_f1},
                   {"accuracy", p.accuracy}});
  }
  detail::write_text_file(path, arr.dump(2) + "\n");
}

std::vector<RegressionPoint> load_regression_points(const std::string& path) {
  const auto doc = detail::load_json_file(path);
  const auto& arr = doc.is_array() ? doc : detail::require(doc, "points", path);
  if (!arr.is_array()) throw DataError(path + ": expected an array of points");
  std::vector<RegressionPoint> out;
  for (const auto& j : arr) {
    RegressionPoint p;
    p.unit_id = detail::require(j, "unit_id", path).get<std::string>();
    p.neutral_base_rate = detail::require(j, "neutral_base_rate", path).get<double>();
    p.macro_f1 = detail::require(j, "macro_f1", path).get<double>();
    p.accuracy = detail::require(j, "accuracy", path).get<double>();
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace stancelab
