#include "drcp/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

namespace drcp {

namespace {

using nlohmann::json;

const std::set<std::string>& known_fields() {
  static const std::set<std::string> fields = {
      "name",   "instance",   "mode",       "schedule",   "s",         "d",
      "eps0",   "r",          "y0",         "eps1",       "eps2",      "eps3",
      "eps4",   "eps5",       "eps6",       "alpha0",     "t_cap",     "outer_cap",
      "output_dir", "seed",   "grid_n",     "refine_tol", "dedupe_tol", "projection_tol",
      "max_sweeps", "trace_stride"};
  return fields;
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("field '") + key + "' has the wrong type");
  }
}

GraphSchedule single_node_schedule() { return GraphSchedule(1, {{}}, 1); }

int resolve_d(const RunConfig& cfg, const GraphSchedule& sched) {
  if (cfg.d == "auto") return std::max(1, union_diameter(sched, sched.window()));
  if (cfg.d == "m-1") return std::max(1, sched.agents() - 1);
  return std::stoi(cfg.d);
}

void ensure_dir(const std::filesystem::path& dir) { std::filesystem::create_directories(dir); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

double max_pairwise(const std::vector<Vec>& pts) {
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
  return d;
}

Vec mean_of(const std::vector<Vec>& pts) {
  Vec s = Vec::Zero(pts.front().size());
  for (const auto& p : pts) s += p;
  return s / static_cast<double>(pts.size());
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known_fields().count(key)) throw ValidationError("unknown field '" + key + "'");
  }

  RunConfig cfg;
  read(j, "name", cfg.name);
  read(j, "instance", cfg.instance);
  if (j.contains("mode")) {
    std::string mode;
    read(j, "mode", mode);
    if (mode == "cutting_surface") {
      cfg.mode = RunMode::CuttingSurface;
    } else if (mode == "dpg") {
      cfg.mode = RunMode::Dpg;
    } else {
      throw ValidationError("field 'mode' must be \"cutting_surface\" or \"dpg\"");
    }
  }
  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    if (s.is_string()) {
      if (s.get<std::string>() != "default6") throw ValidationError("field 'schedule' must be \"default6\" or edge lists");
      cfg.schedule.clear();
    } else {
      std::vector<std::vector<std::array<int, 2>>> raw;
      read(j, "schedule", raw);
      for (const auto& slot : raw) {
        std::vector<Edge> edges;
        for (const auto& e : slot) edges.push_back({e[0], e[1]});
        cfg.schedule.push_back(std::move(edges));
      }
      if (cfg.schedule.empty()) throw ValidationError("field 'schedule' must list at least one slot");
    }
  }
  read(j, "s", cfg.s);
  if (j.contains("d")) {
    const json& d = j.at("d");
    if (d.is_number_integer()) {
      cfg.d = std::to_string(d.get<int>());
    } else if (d.is_string()) {
      cfg.d = d.get<std::string>();
    } else {
      throw ValidationError("field 'd' must be \"auto\", \"m-1\" or an integer");
    }
  }
  if (j.contains("eps0")) {
    if (j.at("eps0").is_number()) {
      cfg.eps0 = {j.at("eps0").get<double>()};
    } else {
      read(j, "eps0", cfg.eps0);
    }
  }
  read(j, "r", cfg.r);
  read(j, "y0", cfg.y0);
  read(j, "eps1", cfg.eps1);
  read(j, "eps2", cfg.eps2);
  read(j, "eps3", cfg.eps3);
  read(j, "eps4", cfg.eps4);
  read(j, "eps5", cfg.eps5);
  read(j, "eps6", cfg.eps6);
  read(j, "alpha0", cfg.alpha0);
  read(j, "t_cap", cfg.t_cap);
  read(j, "outer_cap", cfg.outer_cap);
  read(j, "output_dir", cfg.output_dir);
  read(j, "seed", cfg.seed);
  read(j, "grid_n", cfg.grid_n);
  read(j, "refine_tol", cfg.refine_tol);
  read(j, "dedupe_tol", cfg.dedupe_tol);
  read(j, "projection_tol", cfg.projection_tol);
  read(j, "max_sweeps", cfg.max_sweeps);
  read(j, "trace_stride", cfg.trace_stride);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open " + path.string());
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str());
}

std::vector<std::string> validate_config(const RunConfig& cfg) {
  auto positive = [](const char* field, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string("field '") + field + "' must be positive");
  };
  ProblemInstance inst;
  try {
    inst = instance_by_name(cfg.instance);
  } catch (const std::exception&) {
    throw ValidationError("field 'instance' names an unknown instance: " + cfg.instance);
  }
  if (!(cfg.r > 1.0) || !std::isfinite(cfg.r)) throw ValidationError("field 'r' must be greater than 1");
  if (cfg.eps0.empty() || (cfg.eps0.size() != 1 && cfg.eps0.size() != static_cast<std::size_t>(inst.m))) {
    throw ValidationError("field 'eps0' needs one value or one per agent");
  }
  for (double e : cfg.eps0) positive("eps0", e);
  positive("eps1", cfg.eps1);
  positive("eps2", cfg.eps2);
  positive("eps3", cfg.eps3);
  positive("eps4", cfg.eps4);
  positive("eps5", cfg.eps5);
  positive("eps6", cfg.eps6);
  positive("alpha0", cfg.alpha0);
  positive("refine_tol", cfg.refine_tol);
  positive("projection_tol", cfg.projection_tol);
  if (!(cfg.dedupe_tol >= 0.0)) throw ValidationError("field 'dedupe_tol' must be nonnegative");
  if (cfg.t_cap < 1) throw ValidationError("field 't_cap' must be at least 1");
  if (cfg.outer_cap < 1) throw ValidationError("field 'outer_cap' must be at least 1");
  if (cfg.grid_n < 3) throw ValidationError("field 'grid_n' must be at least 3");
  if (cfg.max_sweeps < 1) throw ValidationError("field 'max_sweeps' must be at least 1");
  if (cfg.trace_stride < 1) throw ValidationError("field 'trace_stride' must be at least 1");
  if (cfg.s < 0) throw ValidationError("field 's' must be positive");
  if (cfg.d != "auto" && cfg.d != "m-1") {
    std::size_t used = 0;
    int d = 0;
    try {
      d = std::stoi(cfg.d, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != cfg.d.size() || d < 1) throw ValidationError("field 'd' must be \"auto\", \"m-1\" or a positive integer");
  }
  if (!cfg.y0.empty()) {
    if (cfg.y0.size() != static_cast<std::size_t>(inst.m)) throw ValidationError("field 'y0' needs one list per agent");
    for (std::size_t i = 0; i < cfg.y0.size(); ++i) {
      for (double y : cfg.y0[i]) {
        if (!inst.constraints[i].uncertainty.contains(y)) {
          throw ValidationError("field 'y0' has a value outside agent " + std::to_string(i) + "'s uncertainty interval");
        }
      }
    }
  }

  try {
    (void)resolve(cfg);
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    throw ValidationError(std::string("field 'schedule': ") + e.what());
  }

  std::vector<std::string> warnings;
  const double eps0_min = *std::min_element(cfg.eps0.begin(), cfg.eps0.end());
  if (eps0_min < 1e-7) warnings.push_back("eps0 below 1e-7 is near the attainable precision");
  if (cfg.r > 1e3) warnings.push_back("r above 1e3 shrinks eps faster than the DPG can resolve");
  const double inner = std::max({cfg.eps1, cfg.eps2, cfg.eps3});
  const double outer = std::min({cfg.eps4, cfg.eps5, cfg.eps6});
  if (10.0 * inner > outer) warnings.push_back("max(eps1, eps2, eps3) should be at least 10x below min(eps4, eps5, eps6)");
  return warnings;
}

ResolvedRun resolve(const RunConfig& cfg) {
  ProblemInstance inst = instance_by_name(cfg.instance);
  GraphSchedule sched = [&] {
    if (!cfg.schedule.empty()) {
      const int window = cfg.s > 0 ? cfg.s : static_cast<int>(cfg.schedule.size());
      return GraphSchedule(inst.m, cfg.schedule, window);
    }
    GraphSchedule built = inst.m == 6 ? default_schedule6() : single_node_schedule();
    if (built.agents() != inst.m) throw ValidationError("field 'schedule' is required for this instance");
    if (cfg.s > 0) return GraphSchedule(inst.m, [&] {
                      std::vector<std::vector<Edge>> sets;
                      for (int t = 0; t < built.period(); ++t) sets.push_back(built.edges_at(t));
                      return sets;
                    }(), cfg.s);
    return built;
  }();
  if (sched.agents() != inst.m) throw ValidationError("field 'schedule' does not match the instance size");
  if (!is_ujsc(sched, sched.window())) throw ValidationError("field 'schedule' is not jointly strongly connected over S slots");

  CuttingSurfaceConfig cut;
  cut.eps0 = cfg.eps0;
  cut.r = cfg.r;
  cut.y0 = cfg.y0;
  cut.alg2 = {cfg.eps4, cfg.eps5, cfg.eps6};
  cut.dpg.tol = {cfg.eps1, cfg.eps2, cfg.eps3};
  cut.dpg.alpha0 = cfg.alpha0;
  cut.dpg.slot_cap = cfg.t_cap;
  cut.dpg.diameter = resolve_d(cfg, sched);
  cut.dpg.projection = {cfg.projection_tol, cfg.max_sweeps};
  cut.llp.grid_n = cfg.grid_n;
  cut.llp.refine_tol = cfg.refine_tol;
  cut.outer_cap = cfg.outer_cap;
  cut.dedupe_tol = cfg.dedupe_tol;
  return {std::move(inst), std::move(sched), std::move(cut)};
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"section5", "dpg_solvable", "dpg_unsolvable",
                                                 "sweep_eps0", "sweep_r", "fig9_single_agent"};
  return names;
}

std::vector<RunConfig> preset_configs(std::string_view name, const RunConfig& base) {
  auto with = [&](auto edit) {
    RunConfig c = base;
    edit(c);
    return c;
  };
  auto fmt = [](double v) {
    std::ostringstream s;
    s << v;
    return s.str();
  };
  if (name == "section5") {
    return {with([](RunConfig& c) { c.name = "section5"; })};
  }
  if (name == "dpg_solvable" || name == "dpg_unsolvable") {
    const double eps = name == "dpg_solvable" ? 0.1 : 5.0;
    return {with([&](RunConfig& c) {
      c.name = std::string(name);
      c.mode = RunMode::Dpg;
      c.eps0 = {eps};
      c.y0.assign(6, {1.0});
      if (c.trace_stride == 1) c.trace_stride = 10;
    })};
  }
  if (name == "sweep_eps0") {
    std::vector<RunConfig> out;
    for (double e : {1e-4, 1e-2, 1.0, 1e2, 1e4, 1e5}) {
      out.push_back(with([&](RunConfig& c) {
        c.name = "eps0_" + fmt(e);
        c.eps0 = {e};
        c.r = 2.0;
      }));
    }
    return out;
  }
  if (name == "sweep_r") {
    std::vector<RunConfig> out;
    for (double r : {1.5, 2.0, 5.0, 10.0, 100.0, 1000.0}) {
      out.push_back(with([&](RunConfig& c) {
        c.name = "r_" + fmt(r);
        c.eps0 = {100.0};
        c.r = r;
      }));
    }
    return out;
  }
  if (name == "fig9_single_agent") {
    return {with([](RunConfig& c) {
      c.name = "fig9_single_agent";
      c.instance = "fig9";
      c.eps0 = {0.2};
      c.r = 2.0;
    })};
  }
  throw ValidationError("unknown preset '" + std::string(name) + "'");
}

Vec centralized_oracle(const ProblemInstance& inst, std::span<const double> eps,
                       std::span<const std::vector<double>> cuts) {
  std::vector<ConvexSetDescriptor> sets;
  sets.push_back(ConvexSetDescriptor::box(inst.box));
  for (int i = 0; i < inst.m; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    for (double y : cuts[ii]) {
      sets.push_back(ConvexSetDescriptor::sublevel(inst.constraints[ii].at(y), -eps[ii]));
    }
  }
  if (sets.size() > 1 && !feasibility_probe(sets, 0.0, 200000).interior()) {
    // A strict interior point may not exist on the boundary of feasibility;
    // fall back to a plain violation check before giving up.
    const FeasibilityVerdict v = feasibility_probe(sets, -1e-9, 200000);
    if (!v.interior()) throw Infeasible("centralized_oracle: the ADRCP feasible set looks empty");
  }

  const ProjectionOptions popts{1e-13, 100000};
  auto project = [&](const Vec& p) { return project_intersection(p, sets, popts).point; };
  auto objective = [&](const Vec& x) { return evaluate_global_objective(inst, x); };
  auto gradient = [&](const Vec& x) {
    Vec g = Vec::Zero(inst.n);
    for (const auto& f : inst.costs) g += f.subgradient(x);
    return g;
  };

  Vec x = project(inst.box.center());
  double step = 1.0;
  for (int it = 0; it < 200000; ++it) {
    const Vec g = gradient(x);
    const double fx = objective(x);
    Vec next;
    // Armijo backtracking on the projected-gradient path.
    for (;;) {
      next = project(x - step * g);
      const Vec d = next - x;
      if (objective(next) <= fx + g.dot(d) + d.squaredNorm() / (2.0 * step) || step < 1e-12) break;
      step *= 0.5;
    }
    const double moved = (next - x).norm();
    x = std::move(next);
    if (moved < 1e-10) return x;
    step = std::min(1.0, 2.0 * step);
  }
  throw NoConvergence("centralized_oracle: projected gradient did not settle");
}

std::string render_svg(const ChartSpec& spec, const std::vector<Series>& series) {
  constexpr double W = 640, H = 400, L = 70, R = 150, T = 40, B = 50;
  auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
  auto usable = [&](double xv, double yv) {
    if (!std::isfinite(xv) || !std::isfinite(yv)) return false;
    if (spec.log_x && xv <= 0) return false;
    if (spec.log_y && yv <= 0) return false;
    return true;
  };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      if (!usable(s.x[k], s.y[k])) continue;
      x0 = std::min(x0, tx(s.x[k]));
      x1 = std::max(x1, tx(s.x[k]));
      y0 = std::min(y0, ty(s.y[k]));
      y1 = std::max(y1, ty(s.y[k]));
    }
  }
  if (!std::isfinite(x0)) {
    x0 = 0;
    x1 = 1;
    y0 = 0;
    y1 = 1;
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };
  auto label = [](double v, bool log) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", log ? std::pow(10.0, v) : v);
    return std::string(buf);
  };
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << spec.title << "</text>\n";
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << L << "\" y=\"" << H - B + 15 << "\" text-anchor=\"start\">" << label(x0, spec.log_x) << "</text>\n";
  o << "<text x=\"" << W - R << "\" y=\"" << H - B + 15 << "\" text-anchor=\"end\">" << label(x1, spec.log_x) << "</text>\n";
  o << "<text x=\"" << L - 5 << "\" y=\"" << H - B << "\" text-anchor=\"end\">" << label(y0, spec.log_y) << "</text>\n";
  o << "<text x=\"" << L - 5 << "\" y=\"" << T + 10 << "\" text-anchor=\"end\">" << label(y1, spec.log_y) << "</text>\n";
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">" << spec.x_label
    << (spec.log_x ? " (log)" : "") << "</text>\n";
  o << "<text x=\"15\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
    << (T + H - B) / 2 << ")\">" << spec.y_label << (spec.log_y ? " (log)" : "") << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = colors[s % std::size(colors)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < series[s].x.size() && k < series[s].y.size(); ++k) {
      if (!usable(series[s].x[k], series[s].y[k])) continue;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(series[s].x[k]), py(series[s].y[k]));
      o << buf;
    }
    o << "\"/>\n";
    const double ly = T + 15 + 18.0 * static_cast<double>(s);
    o << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - R + 30 << "\" y2=\"" << ly - 4
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << W - R + 35 << "\" y=\"" << ly << "\">" << series[s].name << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

namespace {

void write_cutting_surface_files(const RunConfig& cfg, const ResolvedRun& rr, const RunReport& rep,
                                 const std::filesystem::path& dir, ExecutionResult& res) {
  const int m = rr.inst.m;
  const int n = rr.inst.n;
  {
    std::ostringstream o;
    o << "k,dpg_reason,slots";
    for (int i = 0; i < m; ++i) o << ",cut_" << i;
    for (int i = 0; i < m; ++i) o << ",eps_" << i;
    for (int i = 0; i < m; ++i) o << ",cuts_size_" << i;
    o << ",objective_sum,objective_at_mean,max_residual,terminated\n";
    for (const auto& rec : rep.history) {
      std::vector<std::string> kinds(static_cast<std::size_t>(m), "none");
      for (const auto& e : rec.events) {
        if (e.agent < 0) {
          std::fill(kinds.begin(), kinds.end(), to_string(e.kind));
        } else {
          kinds[static_cast<std::size_t>(e.agent)] = to_string(e.kind);
        }
      }
      o << rec.k << ',' << (rec.dpg_verdict == DpgOutcome::Verdict::Solved ? "solved" : to_string(rec.dpg_reason))
        << ',' << rec.slots;
      for (const auto& kd : kinds) o << ',' << kd;
      for (double e : rec.eps) o << ',' << format_double(e);
      for (std::size_t s : rec.cut_sizes) o << ',' << s;
      o << ',' << format_double(rec.objective_sum) << ',' << format_double(rec.objective_at_mean) << ','
        << format_double(rec.max_residual) << ',' << (rec.terminated ? 1 : 0) << '\n';
    }
    write_text(dir / "iterations.csv", o.str());
    res.files.push_back(dir / "iterations.csv");
  }
  {
    std::ostringstream o;
    o << "agent";
    for (int c = 0; c < n; ++c) o << ",z_" << c;
    o << ",residual,cut_set\n";
    for (int i = 0; i < m; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      o << i;
      for (int c = 0; c < n; ++c) o << ',' << format_double(rep.final_candidates[ii][c]);
      o << ',' << format_double(rep.final_residuals[ii]) << ',';
      const auto& cuts = rep.final_cut_sets[ii];
      for (std::size_t c = 0; c < cuts.size(); ++c) o << (c ? ";" : "") << format_double(cuts[c]);
      o << '\n';
    }
    write_text(dir / "candidates.csv", o.str());
    res.files.push_back(dir / "candidates.csv");
  }
  {
    double final_obj = std::numeric_limits<double>::infinity();
    if (!rep.history.empty()) final_obj = rep.history.back().objective_at_mean;
    double max_res = -std::numeric_limits<double>::infinity();
    for (double r : rep.final_residuals) max_res = std::max(max_res, r);
    std::ostringstream o;
    o << "name,instance,terminated,iterations,solvability_cuts,feasibility_cuts,optimality_cuts,total_slots,"
         "objective_at_mean,max_residual,max_candidate_distance\n";
    o << cfg.name << ',' << cfg.instance << ',' << (rep.terminated ? 1 : 0) << ',' << rep.iterations << ','
      << rep.cut_counts.solvability << ',' << rep.cut_counts.feasibility << ',' << rep.cut_counts.optimality << ','
      << rep.total_slots << ',' << format_double(final_obj) << ',' << format_double(max_res) << ','
      << format_double(max_pairwise(rep.final_candidates)) << '\n';
    write_text(dir / "summary.csv", o.str());
    res.files.push_back(dir / "summary.csv");
  }
  {
    Series s{"F(mean z)", {}, {}};
    Series sum{"sum f_i(z_i)", {}, {}};
    for (const auto& rec : rep.history) {
      s.x.push_back(rec.k);
      s.y.push_back(rec.objective_at_mean);
      sum.x.push_back(rec.k);
      sum.y.push_back(rec.objective_sum);
    }
    write_text(dir / "objective.svg", render_svg({"Objective vs outer iteration", "k", "F", false, false}, {s, sum}));
    res.files.push_back(dir / "objective.svg");
  }
}

ExecutionResult execute_cutting_surface(const RunConfig& cfg, const ResolvedRun& rr,
                                        const std::filesystem::path& dir, bool quiet) {
  ExecutionResult res;
  auto progress = [&](const IterationRecord& rec) {
    if (quiet) return;
    std::cout << "k=" << rec.k << " eps0=" << rec.eps.front() << " dpg="
              << (rec.dpg_verdict == DpgOutcome::Verdict::Solved ? "solved" : to_string(rec.dpg_reason))
              << " slots=" << rec.slots << " F=" << format_double(rec.objective_at_mean);
    for (const auto& e : rec.events) std::cout << ' ' << to_string(e.kind) << (e.agent >= 0 ? "@" + std::to_string(e.agent) : "");
    std::cout << (rec.terminated ? " terminated" : "") << std::endl;
  };
  try {
    RunReport rep = run(rr.inst, rr.sched, rr.cutting, progress);
    write_cutting_surface_files(cfg, rr, rep, dir, res);
    res.warnings.insert(res.warnings.end(), rep.warnings.begin(), rep.warnings.end());
    res.report = std::move(rep);
  } catch (const IterationCapExceeded& e) {
    write_cutting_surface_files(cfg, rr, e.report(), dir, res);
    throw;
  }
  return res;
}

ExecutionResult execute_dpg(const RunConfig& cfg, const ResolvedRun& rr, const std::filesystem::path& dir,
                            bool quiet) {
  ExecutionResult res;
  const int m = rr.inst.m;
  const int n = rr.inst.n;
  std::vector<double> eps(static_cast<std::size_t>(m));
  std::vector<std::vector<double>> cuts(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    eps[ii] = cfg.eps0.size() == 1 ? cfg.eps0[0] : cfg.eps0[ii];
    if (!cfg.y0.empty()) cuts[ii] = cfg.y0[ii];
  }
  std::optional<Vec> oracle;
  try {
    oracle = centralized_oracle(rr.inst, eps, cuts);
  } catch (const Infeasible&) {
    if (!quiet) std::cout << "centralized oracle: infeasible ADRCP" << std::endl;
  }

  std::ostringstream trace;
  trace << "slot,agent";
  for (int c = 0; c < n; ++c) trace << ",x_" << c;
  trace << ",disagreement,h,e1,e2,e3\n";
  std::vector<std::int64_t> sampled;
  std::vector<std::vector<Vec>> xs;
  const SlotObserver observer = [&](const SlotView& v) {
    if (v.t % cfg.trace_stride != 0) return;
    Vec mean = Vec::Zero(v.states.front().size());
    for (const auto& s : v.states) mean += s;
    mean /= static_cast<double>(m);
    sampled.push_back(v.t);
    xs.emplace_back();
    for (int i = 0; i < m; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      const Vec& th = v.states[ii];
      trace << v.t << ',' << i;
      for (int c = 0; c < n; ++c) trace << ',' << format_double(th[c]);
      const auto& k = v.counters[ii];
      trace << ',' << format_double((th - mean).norm()) << ',' << k.h << ',' << k.consensus << ','
            << k.displacement << ',' << k.value << '\n';
      xs.back().push_back(th.head(n));
    }
    if (!quiet && v.t % 10000 == 0) std::cout << "slot " << v.t << std::endl;
  };
  const DpgOutcome out = run_dpg(rr.inst, eps, cuts, rr.sched, rr.cutting.dpg, observer);
  write_text(dir / "dpg_trace.csv", trace.str());
  res.files.push_back(dir / "dpg_trace.csv");

  {
    std::ostringstream o;
    o << "agent,verdict,reason,slots";
    for (int c = 0; c < n; ++c) o << ",x_" << c;
    o << ",oracle_distance\n";
    for (int i = 0; i < m; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      o << i << ',' << (out.solved() ? "solved" : "unsolvable") << ',' << to_string(out.reason) << ','
        << out.slots_used;
      for (int c = 0; c < n; ++c) o << ',' << (out.x.empty() ? std::string("nan") : format_double(out.x[ii][c]));
      const double dist = oracle && !out.x.empty() ? (out.x[ii] - *oracle).norm() : std::numeric_limits<double>::quiet_NaN();
      o << ',' << format_double(dist) << '\n';
    }
    write_text(dir / "dpg_summary.csv", o.str());
    res.files.push_back(dir / "dpg_summary.csv");
  }

  if (!xs.empty()) {
    const Vec ref = oracle ? *oracle : mean_of(xs.back());
    std::vector<Series> series;
    for (int i = 0; i < m; ++i) {
      Series s{"agent " + std::to_string(i + 1), {}, {}};
      for (std::size_t k = 0; k < xs.size(); ++k) {
        s.x.push_back(static_cast<double>(sampled[k]) + 1.0);
        s.y.push_back((xs[k][static_cast<std::size_t>(i)] - ref).norm());
      }
      series.push_back(std::move(s));
    }
    const std::string ylabel = oracle ? "|x_i(t) - x_oracle|" : "|x_i(t) - mean x(T)|";
    write_text(dir / "dpg_error.svg", render_svg({"DPG trajectory", "t + 1", ylabel, true, true}, series));
    res.files.push_back(dir / "dpg_error.svg");
  }
  res.outcome = out;
  return res;
}

}  // namespace

ExecutionResult execute(const RunConfig& cfg, const std::filesystem::path& out_dir, bool quiet) {
  std::vector<std::string> warnings = validate_config(cfg);
  const ResolvedRun rr = resolve(cfg);
  ensure_dir(out_dir);
  ExecutionResult res = cfg.mode == RunMode::Dpg ? execute_dpg(cfg, rr, out_dir, quiet)
                                                 : execute_cutting_surface(cfg, rr, out_dir, quiet);
  warnings.insert(warnings.end(), res.warnings.begin(), res.warnings.end());
  res.warnings = std::move(warnings);
  return res;
}

std::vector<ExecutionResult> execute_preset(std::string_view name, const RunConfig& base,
                                            const std::filesystem::path& out_dir, bool quiet) {
  const std::vector<RunConfig> configs = preset_configs(name, base);
  const bool sweep = name == "sweep_eps0" || name == "sweep_r";
  std::vector<ExecutionResult> results;
  if (!sweep) {
    results.push_back(execute(configs.front(), out_dir, quiet));
    return results;
  }

  ensure_dir(out_dir);
  std::ostringstream o;
  o << "parameter,value,terminated,iterations,solvability_cuts,feasibility_cuts,optimality_cuts,total_slots,"
       "objective_at_mean\n";
  const std::string param = name == "sweep_eps0" ? "eps0" : "r";
  Series solv{"solvability", {}, {}}, feas{"feasibility", {}, {}}, opt{"optimality", {}, {}}, iters{"iterations", {}, {}};
  for (const auto& cfg : configs) {
    const double value = param == "eps0" ? cfg.eps0.front() : cfg.r;
    if (!quiet) std::cout << "== " << cfg.name << std::endl;
    RunReport rep;
    try {
      ExecutionResult r = execute(cfg, out_dir / cfg.name, quiet);
      rep = *r.report;
      results.push_back(std::move(r));
    } catch (const IterationCapExceeded& e) {
      rep = e.report();
      ExecutionResult r;
      r.report = rep;
      r.warnings.push_back(cfg.name + ": " + e.what());
      results.push_back(std::move(r));
    }
    const double final_obj = rep.history.empty() ? std::numeric_limits<double>::infinity()
                                                 : rep.history.back().objective_at_mean;
    o << param << ',' << format_double(value) << ',' << (rep.terminated ? 1 : 0) << ',' << rep.iterations << ','
      << rep.cut_counts.solvability << ',' << rep.cut_counts.feasibility << ',' << rep.cut_counts.optimality << ','
      << rep.total_slots << ',' << format_double(final_obj) << '\n';
    for (Series* s : {&solv, &feas, &opt, &iters}) s->x.push_back(value);
    solv.y.push_back(rep.cut_counts.solvability);
    feas.y.push_back(rep.cut_counts.feasibility);
    opt.y.push_back(rep.cut_counts.optimality);
    iters.y.push_back(rep.iterations);
  }
  write_text(out_dir / "sweep.csv", o.str());
  write_text(out_dir / "sweep.svg",
             render_svg({"Cut counts vs " + param, param, "count", true, false}, {solv, feas, opt, iters}));
  return results;
}

}  // namespace drcp
