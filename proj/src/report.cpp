// Copyright 2026 The nvlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "nvlab/report.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

#include "nvlab/error.hpp"
#include "nvlab/human_reference.hpp"

namespace nvlab {
namespace {

using TrajList = std::vector<const Trajectory*>;

struct Item {
  const Trajectory* t;
  std::string agent;
  std::string run_id;
};

std::string num(double v, int digits = 4) {
  if (std::abs(v) < 0.5 * std::pow(10.0, -digits)) v = 0.0;
  return fmt::format("{:.{}f}", v, digits);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : width_(header.size()) { row(header); }
  void row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw Error("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << csv_field(cells[i]);
    }
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::size_t width_;
  std::ostringstream out_;
};

class Markdown {
 public:
  void heading(const std::string& text) { out_ << "\n## " << text << "\n\n"; }
  void para(const std::string& text) { out_ << text << "\n\n"; }
  void table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    if (rows.empty()) {
      out_ << "_no data_\n\n";
      return;
    }
    const auto line = [&](const std::vector<std::string>& cells) {
      out_ << '|';
      for (const auto& c : cells) out_ << ' ' << c << " |";
      out_ << '\n';
    };
    line(header);
    out_ << '|';
    for (std::size_t i = 0; i < header.size(); ++i) out_ << "---|";
    out_ << '\n';
    for (const auto& r : rows) line(r);
    out_ << '\n';
  }
  std::ostringstream& raw() { return out_; }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

std::string join_runs(const std::set<std::string>& ids) {
  std::string out = "runs:";
  bool first = true;
  for (const auto& id : ids) {
    if (!first) out += ';';
    out += id;
    first = false;
  }
  return out;
}

std::string describe(Experiment e, DemandKind k, const std::string& agent) {
  return fmt::format("{}/{}/{}", to_string(e), to_string(k), agent);
}

template <typename Key>
struct Groups {
  std::map<Key, TrajList> trajs;
  std::map<Key, std::set<std::string>> runs;
  void add(const Key& k, const Item& it) {
    trajs[k].push_back(it.t);
    runs[k].insert(it.run_id);
  }
};

// Every trajectory in `list` must share the first one's scenario.
const ScenarioConfig& common_scenario(const TrajList& list, const std::string& cell) {
  const ScenarioConfig& sc = list.front()->scenario;
  for (const Trajectory* t : list) {
    if (!(t->scenario == sc)) throw Error("incompatible scenarios in report cell " + cell);
  }
  return sc;
}

double mean_order(const TrajList& list) {
  long long sum = 0;
  std::size_t n = 0;
  for (const Trajectory* t : list) {
    for (const auto& r : t->rounds) {
      sum += r.order;
      ++n;
    }
  }
  return n ? double(sum) / double(n) : 0.0;
}

std::string human_label() { return "Humans"; }

}  // namespace

ReportBundle build_report(const std::vector<ReportInput>& runs, const ReportOptions& options) {
  ReportBundle bundle;
  std::vector<Item> items;
  std::set<std::string> run_ids;
  for (const auto& run : runs) {
    run_ids.insert(run.run_id);
    for (const auto& t : run.trajectories) {
      if (t.rounds.empty() || (!t.complete && !options.include_incomplete)) {
        ++bundle.excluded_incomplete;
        continue;
      }
      items.push_back({&t, t.agent.label(), run.run_id});
    }
  }
  const HumanBenchmarks& humans = human_benchmarks();
  const auto human_row_here = [&](Experiment e, DemandKind k) {
    return options.compare_humans && e == humans.experiment && k == humans.distribution;
  };

  // (experiment, distribution) pairs present, plus the human pair when asked.
  std::set<std::pair<Experiment, DemandKind>> pairs;
  for (const auto& it : items) pairs.insert({it.t->scenario.experiment, it.t->scenario.demand.kind()});
  if (options.compare_humans) pairs.insert({humans.experiment, humans.distribution});

  Markdown md;
  md.raw() << "# nvlab report\n\n";
  md.para("Runs: " + (run_ids.empty() ? std::string("none") : join_runs(run_ids).substr(5)));
  md.para(fmt::format("Trajectories used: {}. Incomplete trajectories excluded: {}.", items.size(),
                      bundle.excluded_incomplete));
  const std::string orientation =
      options.mas_orientation == MasOrientation::kAdjustment ? "adjustment" : "printed";

  // Bias table.
  {
    using Key = std::tuple<Experiment, DemandKind, std::string, Margin>;
    Groups<Key> g;
    for (const auto& it : items) {
      const auto& sc = it.t->scenario;
      g.add({sc.experiment, sc.demand.kind(), it.agent, sc.margin}, it);
    }
    Csv csv({"experiment", "distribution", "agent", "margin", "mean_order", "optimal", "order_bias",
             "normalized_bias_pct", "pe_optimal_over_actual_pct", "orders", "source"});
    std::vector<std::vector<std::string>> md_rows;
    const auto emit = [&](Experiment e, DemandKind k, const std::string& agent, Margin m,
                          const BiasStats& b, const ScenarioConfig& sc, const std::string& source) {
      const auto pe = profit_efficiency(b.mean_order, sc);
      const std::string pe_text = pe.undefined ? "undefined" : num(pe.percent);
      csv.row({std::string(to_string(e)), std::string(to_string(k)), agent, std::string(to_string(m)),
               num(b.mean_order), std::to_string(b.optimal), num(b.order_bias), num(b.normalized_bias),
               pe_text, std::to_string(b.orders), source});
      md_rows.push_back({std::string(to_string(e)), std::string(to_string(k)), agent,
                         std::string(to_string(m)), num(b.mean_order, 2), std::to_string(b.optimal),
                         fmt::format("{:+.2f}", b.order_bias), fmt::format("{:+.2f}%", b.normalized_bias),
                         pe.undefined ? "undefined" : num(pe.percent, 2)});
    };
    for (const auto& [e, k] : pairs) {
      for (const auto& [key, list] : g.trajs) {
        if (std::get<0>(key) != e || std::get<1>(key) != k) continue;
        const auto& agent = std::get<2>(key);
        const auto& sc = common_scenario(list, describe(e, k, agent));
        emit(e, k, agent, std::get<3>(key), bias_stats(list), sc, join_runs(g.runs[key]));
      }
      if (human_row_here(e, k)) {
        for (const Margin m : {Margin::kHigh, Margin::kLow}) {
          const auto sc = make_scenario(e, k, m);
          auto b = bias_from_mean(m == Margin::kHigh ? humans.mean_order_high : humans.mean_order_low,
                                  optimal_quantity(sc));
          emit(e, k, human_label(), m, b, sc, humans.source);
        }
      }
    }
    bundle.files["table3_bias.csv"] = csv.str();
    md.heading("Order bias (mean order minus optimal)");
    md.table({"Exp", "Distribution", "Agent", "Margin", "Mean order", "q*", "Deviation", "NB",
              "PE (optimal over actual)"},
             md_rows);
  }

  // MAS table.
  {
    using Key = std::tuple<Experiment, DemandKind, std::string, OrderCondition, Margin>;
    Groups<Key> g;
    for (const auto& it : items) {
      const auto& sc = it.t->scenario;
      g.add({sc.experiment, sc.demand.kind(), it.agent, it.t->order_condition, sc.margin}, it);
    }
    Csv csv({"experiment", "distribution", "agent", "order_condition", "margin", "anchor", "mean_order",
             "optimal", "mas", "mas_undefined", "orientation", "source"});
    std::vector<std::vector<std::string>> md_rows;
    for (const auto& [e, k] : pairs) {
      for (const auto& [key, list] : g.trajs) {
        if (std::get<0>(key) != e || std::get<1>(key) != k) continue;
        const auto& agent = std::get<2>(key);
        const auto& sc = common_scenario(list, describe(e, k, agent));
        const double q = mean_order(list);
        const int q_star = optimal_quantity(sc);
        const auto a = mas(q, sc.demand.mean(), q_star, sc.margin, options.mas_orientation);
        const std::string oc(to_string(std::get<3>(key)));
        csv.row({std::string(to_string(e)), std::string(to_string(k)), agent, oc,
                 std::string(to_string(sc.margin)), num(a.anchor), num(q), std::to_string(q_star),
                 a.undefined ? "" : num(a.mas), a.undefined ? "1" : "0", orientation,
                 join_runs(g.runs[key])});
        md_rows.push_back({std::string(to_string(e)), std::string(to_string(k)), agent, oc,
                           std::string(to_string(sc.margin)), a.undefined ? "undefined" : num(a.mas, 2)});
      }
      if (human_row_here(e, k)) {
        for (const auto& [oc, pair] : humans.mas) {
          for (const Margin m : {Margin::kHigh, Margin::kLow}) {
            const auto sc = make_scenario(e, k, m);
            const double value = m == Margin::kHigh ? pair.first : pair.second;
            csv.row({std::string(to_string(e)), std::string(to_string(k)), human_label(),
                     std::string(to_string(oc)), std::string(to_string(m)), num(sc.demand.mean()), "",
                     std::to_string(optimal_quantity(sc)), num(value), "0", "adjustment", humans.source});
            md_rows.push_back({std::string(to_string(e)), std::string(to_string(k)), human_label(),
                               std::string(to_string(oc)), std::string(to_string(m)), num(value, 2)});
          }
        }
      }
    }
    bundle.files["table4_mas.csv"] = csv.str();
    md.heading("Mean adjustment score (" + orientation + " orientation)");
    md.table({"Exp", "Distribution", "Agent", "Order", "Margin", "MAS"}, md_rows);
  }

  // Risk-neutral table.
  {
    using Key = std::tuple<DemandKind, std::string, Margin>;
    Groups<Key> g;
    for (const auto& it : items) {
      const auto& sc = it.t->scenario;
      if (sc.experiment != Experiment::kRiskNeutral) continue;
      g.add({sc.demand.kind(), it.agent, sc.margin}, it);
    }
    Csv csv({"distribution", "agent", "margin", "mean_order", "optimal", "normalized_bias_pct", "cell",
             "source"});
    std::vector<std::vector<std::string>> md_rows;
    for (const auto& [key, list] : g.trajs) {
      const auto& [k, agent, m] = key;
      common_scenario(list, describe(Experiment::kRiskNeutral, k, agent));
      const auto b = bias_stats(list);
      const std::string cell = fmt::format("{:.2f} | {} ({:+.2f}%)", b.mean_order, b.optimal, b.normalized_bias);
      csv.row({std::string(to_string(k)), agent, std::string(to_string(m)), num(b.mean_order),
               std::to_string(b.optimal), num(b.normalized_bias), cell, join_runs(g.runs[key])});
      md_rows.push_back({std::string(to_string(k)), agent, std::string(to_string(m)), cell});
    }
    bundle.files["table5_risk_neutral.csv"] = csv.str();
    md.heading("Risk-neutral ordering (mean | q* (NB))");
    md.table({"Distribution", "Agent", "Margin", "Mean | q* (NB)"}, md_rows);
  }

  // Learning tables.
  for (const auto& [exp, name] : {std::pair{Experiment::kBaseline, "table6a_learning_e1.csv"},
                                  std::pair{Experiment::kFormula, "table6b_learning_e2.csv"}}) {
    using Key = std::tuple<DemandKind, std::string, Margin>;
    Groups<Key> g;
    for (const auto& it : items) {
      const auto& sc = it.t->scenario;
      if (sc.experiment != exp) continue;
      g.add({sc.demand.kind(), it.agent, sc.margin}, it);
    }
    Csv csv({"distribution", "agent", "margin", "convergence_slope", "efficiency_slope", "delta_r2",
             "r2_early", "r2_late", "r2_zero_variance", "pe_undefined_rounds", "trajectories",
             "slope_mode", "source"});
    std::vector<std::vector<std::string>> md_rows;
    for (const auto& [key, list] : g.trajs) {
      const auto& [k, agent, m] = key;
      common_scenario(list, describe(exp, k, agent));
      const auto s = learning_stats(list, options.pooled_slopes, options.learning);
      std::string flag = s.early_degenerate && s.late_degenerate ? "early+late"
                         : s.early_degenerate                    ? "early"
                         : s.late_degenerate                     ? "late"
                                                                 : "";
      csv.row({std::string(to_string(k)), agent, std::string(to_string(m)), num(s.convergence_slope),
               num(s.efficiency_slope), num(s.delta_r2), num(s.r2_early), num(s.r2_late), flag,
               std::to_string(s.efficiency_undefined_rounds), std::to_string(list.size()),
               options.pooled_slopes ? "pooled" : "per-trajectory-mean", join_runs(g.runs[key])});
      md_rows.push_back({std::string(to_string(exp)), std::string(to_string(k)), agent,
                         std::string(to_string(m)), fmt::format("{:+.3f}", s.convergence_slope),
                         fmt::format("{:+.3f}", s.efficiency_slope), fmt::format("{:+.3f}", s.delta_r2)});
    }
    bundle.files[name] = csv.str();
    md.heading(fmt::format("Learning metrics, {}", to_string(exp)));
    md.table({"Exp", "Distribution", "Agent", "Margin", "Convergence", "Efficiency", "ΔR²"}, md_rows);
  }

  // Quartile table and the per-round adjustment shares.
  {
    using Key = std::tuple<Experiment, DemandKind, std::string, OrderCondition>;
    Groups<Key> g;
    for (const auto& it : items) {
      const auto& sc = it.t->scenario;
      g.add({sc.experiment, sc.demand.kind(), it.agent, it.t->order_condition}, it);
    }
    Csv csv({"experiment", "distribution", "agent", "order_condition", "quartile", "events",
             "no_change_pct", "toward_pct", "away_pct", "mean_magnitude", "abs_error_from",
             "abs_error_to", "source"});
    Csv by_round({"experiment", "distribution", "agent", "order_condition", "block", "margin", "round",
                  "events", "no_change_pct", "toward_pct", "away_pct", "mean_magnitude"});
    std::vector<std::vector<std::string>> md_rows;
    const auto md_share = [](double v) { return fmt::format("{:.1f}%", v); };
    for (const auto& [e, k] : pairs) {
      for (const auto& [key, list] : g.trajs) {
        if (std::get<0>(key) != e || std::get<1>(key) != k) continue;
        const auto& agent = std::get<2>(key);
        const std::string oc(to_string(std::get<3>(key)));
        std::vector<AdjustmentEvent> pool;
        std::map<std::pair<int, int>, std::vector<AdjustmentEvent>> rounds;  // (block, round)
        std::map<int, Margin> block_margin;
        for (const Trajectory* t : list) {
          for (const auto& ev : classify_adjustments(*t)) {
            pool.push_back(ev);
            rounds[{t->key.block_index, ev.round_index}].push_back(ev);
          }
          block_margin[t->key.block_index] = t->scenario.margin;
        }
        for (const auto& [br, evs] : rounds) {
          const auto s = direction_shares(evs);
          by_round.row({std::string(to_string(e)), std::string(to_string(k)), agent, oc,
                        std::to_string(br.first), std::string(to_string(block_margin[br.first])),
                        std::to_string(br.second), std::to_string(s.events), num(s.no_change),
                        num(s.toward), num(s.away), num(s.mean_magnitude)});
        }
        if (pool.size() < 4) continue;
        std::vector<double> errors;
        for (const auto& ev : pool) errors.push_back(std::abs(ev.prior_error));
        const auto cuts = quartile_thresholds(errors);
        assign_quartiles(pool, cuts);
        for (int q = 1; q <= 4; ++q) {
          std::vector<AdjustmentEvent> in;
          for (const auto& ev : pool) {
            if (ev.quartile == q) in.push_back(ev);
          }
          const auto s = direction_shares(in);
          const std::string from = q == 1 ? "0" : num(cuts.cuts[q - 2]);
          const std::string to = q == 4 ? "" : num(cuts.cuts[q - 1]);
          csv.row({std::string(to_string(e)), std::string(to_string(k)), agent, oc,
                   "Q" + std::to_string(q), std::to_string(s.events), num(s.no_change), num(s.toward),
                   num(s.away), num(s.mean_magnitude), from, to, join_runs(g.runs[key])});
          if (q == 1 || q == 4) {
            md_rows.push_back({std::string(to_string(e)), std::string(to_string(k)), agent, oc,
                               "Q" + std::to_string(q), md_share(s.no_change), md_share(s.toward),
                               md_share(s.away)});
          }
        }
      }
      if (human_row_here(e, k)) {
        for (const auto& [oc, quarts] : humans.quartiles) {
          for (const auto& [q, s] : quarts) {
            csv.row({std::string(to_string(e)), std::string(to_string(k)), human_label(),
                     std::string(to_string(oc)), "Q" + std::to_string(q), "", num(s.no_change),
                     num(s.toward), num(s.away), "", "", "", humans.source});
            md_rows.push_back({std::string(to_string(e)), std::string(to_string(k)), human_label(),
                               std::string(to_string(oc)), "Q" + std::to_string(q),
                               md_share(s.no_change), md_share(s.toward), md_share(s.away)});
          }
        }
      }
    }
    bundle.files["table7_quartiles.csv"] = csv.str();
    bundle.files["fig345_adjustment_by_round.csv"] = by_round.str();
    md.heading("Adjustment direction by prior error quartile");
    md.table({"Exp", "Distribution", "Agent", "Order", "Quartile", "No change", "Toward", "Away"}, md_rows);
  }

  // Per-round trajectories.
  {
    Csv csv({"run_id", "trajectory", "experiment", "distribution", "agent", "order_condition",
             "repetition", "block", "margin", "round", "order", "demand", "profit", "cumulative_profit",
             "optimal", "anchor"});
    for (const auto& it : items) {
      const auto& sc = it.t->scenario;
      const std::string q_star = std::to_string(optimal_quantity(sc));
      const std::string anchor = num(sc.demand.mean());
      for (const auto& r : it.t->rounds) {
        csv.row({it.run_id, it.t->key.id(), std::string(to_string(sc.experiment)),
                 std::string(to_string(sc.demand.kind())), it.agent,
                 std::string(to_string(it.t->order_condition)), std::to_string(it.t->key.repetition),
                 std::to_string(it.t->key.block_index), std::string(to_string(sc.margin)),
                 std::to_string(r.round_index), std::to_string(r.order), std::to_string(r.demand),
                 format_number(r.profit), format_number(r.cumulative_profit), q_star, anchor});
      }
    }
    bundle.files["fig1_trajectories.csv"] = csv.str();
  }

  // Word frequencies of rationales, per agent.
  {
    std::map<std::string, std::vector<std::string>> texts;
    for (const auto& it : items) {
      for (const auto& r : it.t->rounds) texts[it.agent].push_back(r.rationale);
    }
    Csv csv({"agent", "term", "count"});
    std::vector<std::vector<std::string>> md_rows;
    for (const auto& [agent, list] : texts) {
      const auto freq = word_frequencies(list, options.stopwords);
      for (std::size_t i = 0; i < freq.size(); ++i) {
        csv.row({agent, freq[i].first, std::to_string(freq[i].second)});
        if (i < 10) md_rows.push_back({agent, freq[i].first, std::to_string(freq[i].second)});
      }
    }
    bundle.files["fig2_word_frequencies.csv"] = csv.str();
    md.heading("Most frequent rationale terms");
    md.table({"Agent", "Term", "Count"}, md_rows);
  }

  if (options.compare_humans) {
    md.para("Rows labelled " + human_label() + " are reference values from " + humans.source + ".");
  }
  bundle.files["summary.md"] = md.str();
  return bundle;
}

void write_report(const ReportBundle& bundle, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : bundle.files) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw Error("cannot write " + (dir / name).string());
  }
}

std::vector<std::map<std::string, std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          cell += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        cells.push_back(std::move(cell));
        cell.clear();
      } else {
        cell += c;
      }
    }
    cells.push_back(std::move(cell));
    rows.push_back(std::move(cells));
  }
  std::vector<std::map<std::string, std::string>> out;
  if (rows.empty()) return out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    std::map<std::string, std::string> m;
    for (std::size_t i = 0; i < rows[0].size() && i < rows[r].size(); ++i) m[rows[0][i]] = rows[r][i];
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace nvlab
