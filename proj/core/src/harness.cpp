#include "bro/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <json.hpp>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "bro/error.hpp"

namespace bro {
namespace {

constexpr std::size_t kTruthInnerDraws = 200000;

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string format_decision(const Decision& x) {
  std::string s;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) s += ';';
    s += g9(x[i]);
  }
  return s;
}

std::string cell(const std::optional<double>& v) { return v ? g9(*v) : std::string(); }
std::string cell(const std::optional<Decision>& v) { return v ? format_decision(*v) : std::string(); }

nlohmann::json decision_json(const std::optional<Decision>& x) {
  if (!x) return nullptr;
  return std::vector<double>(x->data(), x->data() + x->size());
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

// Shared, read-only state of one run.
struct Context {
  Context(Command c, const ExperimentConfig& config)
      : command(c),
        cfg(config),
        problem(build_problem(config)),
        prior(build_prior(config, problem.family)),
        seed(*config.seed),
        root(*config.seed),
        hash(config.hash_hex()) {}

  Command command;
  const ExperimentConfig& cfg;
  Problem problem;
  PriorSpec prior;
  std::uint64_t seed;
  Stream root;
  std::string hash;

  [[nodiscard]] RunRecord record(std::size_t n, std::optional<std::size_t> rep, const RiskSpec& spec) const {
    RunRecord r;
    r.command = std::string(to_string(command));
    r.seed = seed;
    r.config_hash = hash;
    r.n = n;
    r.rep = rep;
    r.spec = spec.to_string();
    return r;
  }

  [[nodiscard]] double true_H(const Decision& x) const {
    return H_eval(problem, x, problem.theta_c, std::max(cfg.inner_m, kTruthInnerDraws), root.split("truth"));
  }

  [[nodiscard]] AsymptoticParams asymptotics_at(const Decision& x) const {
    GradientOptions opts;
    opts.inner_m = std::max(cfg.inner_m, kTruthInnerDraws);
    opts.inner = root.split("gradient");
    return sigma_x(problem, x, problem.theta_c, opts);
  }

  [[nodiscard]] Decision true_solution() const {
    if (problem.known_optimum) return *problem.known_optimum;
    OptimizerConfig oc = cfg.optimizer;
    oc.refine_rounds = std::max<std::size_t>(oc.refine_rounds, 8);
    oc.nm_budget = std::max<std::size_t>(oc.nm_budget, 5000);
    oc.tol_x = std::min(oc.tol_x, 1e-9);
    oc.keep_trace = false;
    return minimize([this](const Decision& x) { return true_H(x); }, problem.decision_box, oc).x_star;
  }

  [[nodiscard]] std::vector<double> data(std::size_t n, std::size_t rep) const {
    Stream s = root.split({n, rep}).split("data");
    return sample(problem.family, problem.theta_c, n, s);
  }

  [[nodiscard]] BroObjective objective(const PosteriorState& post, std::size_t n, std::size_t rep) const {
    return BroObjective(problem, post, cfg.outer_m, cfg.inner_m, root.split({n, rep}).split("posterior"));
  }
};

struct Task {
  std::size_t n;
  std::size_t rep;
};

std::vector<Task> tasks_of(const ExperimentConfig& cfg) {
  std::vector<Task> t;
  for (auto n : cfg.n_list) {
    for (std::size_t r = 0; r < cfg.replications; ++r) t.push_back({n, r});
  }
  return t;
}

template <class Fn>
std::vector<RunRecord> run_tasks(const Context& ctx, Fn&& per_task) {
  const auto tasks = tasks_of(ctx.cfg);
  std::vector<std::vector<RunRecord>> buffers(tasks.size());
  parallel_for(tasks.size(), ctx.cfg.workers, [&](std::size_t i) { buffers[i] = per_task(tasks[i]); });
  std::vector<RunRecord> rows;
  for (auto& b : buffers) std::move(b.begin(), b.end(), std::back_inserter(rows));
  return rows;
}

void run_consistency(const Context& ctx, ExperimentOutput& out) {
  const auto& cfg = ctx.cfg;
  const auto x_opt = ctx.true_solution();
  const double true_min = ctx.true_H(x_opt);
  const std::vector<Decision> optimum{x_opt};
  const auto grid = make_grid(ctx.problem.decision_box, cfg.optimizer.grid_points);
  std::vector<double> truth;
  for (const auto& x : cfg.x_list) truth.push_back(ctx.true_H(x));

  out.rows = run_tasks(ctx, [&](const Task& t) {
    const auto post = posterior_update(ctx.prior, ctx.data(t.n, t.rep));
    const auto obj = ctx.objective(post, t.n, t.rep);
    const auto ns = std::sqrt(static_cast<double>(t.n));

    // Grid scan shared by all specs.
    std::vector<std::vector<double>> grid_values(cfg.specs.size(), std::vector<double>(grid.size()));
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto v = obj.evaluate(cfg.specs, grid[g]);
      for (std::size_t s = 0; s < cfg.specs.size(); ++s) grid_values[s][g] = v[s];
    }
    struct SpecSolve {
      Decision x_star;
      double min_value;
      double deviation;
    };
    std::vector<SpecSolve> solves;
    for (std::size_t s = 0; s < cfg.specs.size(); ++s) {
      const auto set = argmin_set(grid, grid_values[s], cfg.optimizer.tol_f);
      solves.push_back({set.front(), *std::min_element(grid_values[s].begin(), grid_values[s].end()),
                        solution_deviation(set, optimum)});
    }

    std::vector<RunRecord> rows;
    const auto emit = [&](std::optional<std::size_t> xi) {
      const auto vals = xi ? obj.evaluate(cfg.specs, cfg.x_list[*xi]) : std::vector<double>{};
      for (std::size_t s = 0; s < cfg.specs.size(); ++s) {
        auto r = ctx.record(t.n, t.rep, cfg.specs[s]);
        if (xi) {
          r.x = cfg.x_list[*xi];
          r.objective = vals[s];
          r.true_value = truth[*xi];
          r.scaled_error = ns * (vals[s] - truth[*xi]);
        }
        r.x_star = solves[s].x_star;
        r.min_value = solves[s].min_value;
        r.true_min = true_min;
        r.deviation = solves[s].deviation;
        rows.push_back(std::move(r));
      }
    };
    if (cfg.x_list.empty()) emit(std::nullopt);
    for (std::size_t i = 0; i < cfg.x_list.size(); ++i) emit(i);
    return rows;
  });
}

// Pointwise rows: objective, truth and scaled error for every (x, spec).
std::vector<RunRecord> pointwise_rows(const Context& ctx, const std::vector<double>& truth, const Task& t,
                                      const std::vector<AsymptoticParams>* asym) {
  const auto& cfg = ctx.cfg;
  const auto post = posterior_update(ctx.prior, ctx.data(t.n, t.rep));
  const auto obj = ctx.objective(post, t.n, t.rep);
  const auto ns = std::sqrt(static_cast<double>(t.n));
  std::vector<RunRecord> rows;
  for (std::size_t i = 0; i < cfg.x_list.size(); ++i) {
    const auto vals = obj.evaluate(cfg.specs, cfg.x_list[i]);
    for (std::size_t s = 0; s < cfg.specs.size(); ++s) {
      auto r = ctx.record(t.n, t.rep, cfg.specs[s]);
      r.x = cfg.x_list[i];
      r.objective = vals[s];
      r.true_value = truth[i];
      r.scaled_error = ns * (vals[s] - truth[i]);
      if (asym) {
        const auto ci = confidence_interval(cfg.specs[s], vals[s], (*asym)[i].sigma_x, t.n, cfg.beta);
        r.ci_lo = ci.lo;
        r.ci_hi = ci.hi;
        r.covered = ci.contains(truth[i]) ? 1.0 : 0.0;
      }
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

void require_pointwise(const ExperimentConfig& cfg, std::string_view what) {
  if (cfg.x_list.empty()) throw ConfigError(std::string(what) + ": experiment.x_list must not be empty");
}

void run_normality(const Context& ctx, ExperimentOutput& out) {
  const auto& cfg = ctx.cfg;
  require_pointwise(cfg, "normality");
  if (cfg.replications < 100) throw ConfigError("normality: experiment.replications must be >= 100");
  std::vector<double> truth;
  std::vector<AsymptoticParams> asym;
  for (const auto& x : cfg.x_list) {
    truth.push_back(ctx.true_H(x));
    asym.push_back(ctx.asymptotics_at(x));
  }
  out.rows = run_tasks(ctx, [&](const Task& t) { return pointwise_rows(ctx, truth, t, nullptr); });

  // Rows are ordered (n, rep, x, spec).
  const std::size_t per_rep = cfg.x_list.size() * cfg.specs.size();
  for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
    for (std::size_t i = 0; i < cfg.x_list.size(); ++i) {
      for (std::size_t s = 0; s < cfg.specs.size(); ++s) {
        std::vector<double> errs;
        for (std::size_t r = 0; r < cfg.replications; ++r) {
          const auto& row = out.rows[(ni * cfg.replications + r) * per_rep + i * cfg.specs.size() + s];
          errs.push_back(*row.scaled_error);
        }
        const double sx = asym[i].sigma_x;
        if (!(sx > 0.0)) throw ConfigError("normality: sigma_x is zero at x = " + format_decision(cfg.x_list[i]));
        out.reports.push_back({cfg.specs[s].to_string(), cfg.x_list[i], cfg.n_list[ni], sx,
                               normality_diagnostic(errs, limit_mean(cfg.specs[s], sx), sx)});
      }
    }
  }
}

void run_coverage(const Context& ctx, ExperimentOutput& out) {
  const auto& cfg = ctx.cfg;
  require_pointwise(cfg, "coverage");
  std::vector<double> truth;
  std::vector<AsymptoticParams> asym;
  for (const auto& x : cfg.x_list) {
    truth.push_back(ctx.true_H(x));
    asym.push_back(ctx.asymptotics_at(x));
  }
  out.rows = run_tasks(ctx, [&](const Task& t) { return pointwise_rows(ctx, truth, t, &asym); });

  const std::size_t per_rep = cfg.x_list.size() * cfg.specs.size();
  std::vector<RunRecord> summary;
  for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
    for (std::size_t i = 0; i < cfg.x_list.size(); ++i) {
      for (std::size_t s = 0; s < cfg.specs.size(); ++s) {
        double hits = 0.0;
        for (std::size_t r = 0; r < cfg.replications; ++r) {
          hits += *out.rows[(ni * cfg.replications + r) * per_rep + i * cfg.specs.size() + s].covered;
        }
        auto row = ctx.record(cfg.n_list[ni], std::nullopt, cfg.specs[s]);
        row.row_kind = "summary";
        row.x = cfg.x_list[i];
        row.true_value = truth[i];
        row.covered = hits / static_cast<double>(cfg.replications);
        summary.push_back(std::move(row));
      }
    }
  }
  std::move(summary.begin(), summary.end(), std::back_inserter(out.rows));
}

void run_optimal_value(const Context& ctx, ExperimentOutput& out) {
  const auto& cfg = ctx.cfg;
  if (!ctx.problem.singleton_solution) {
    throw ConfigError("optimal-value: problem '" + ctx.problem.name +
                      "' does not have a singleton solution set at theta_c; the limit law is only checked for "
                      "singleton solution sets");
  }
  const auto x_opt = ctx.true_solution();
  const double true_min = ctx.true_H(x_opt);
  const auto asym = ctx.asymptotics_at(x_opt);
  OptimizerConfig oc = cfg.optimizer;
  oc.keep_trace = false;

  out.rows = run_tasks(ctx, [&](const Task& t) {
    const auto post = posterior_update(ctx.prior, ctx.data(t.n, t.rep));
    const auto obj = ctx.objective(post, t.n, t.rep);
    const auto ns = std::sqrt(static_cast<double>(t.n));
    std::vector<RunRecord> rows;
    for (const auto& spec : cfg.specs) {
      const auto res = minimize([&](const Decision& x) { return obj(spec, x); }, ctx.problem.decision_box, oc);
      auto r = ctx.record(t.n, t.rep, spec);
      r.objective = res.value;
      r.x_star = res.x_star;
      r.min_value = res.value;
      r.true_min = true_min;
      r.scaled_error = ns * (res.value - true_min);
      r.deviation = (res.x_star - x_opt).norm();
      rows.push_back(std::move(r));
    }
    return rows;
  });

  if (cfg.replications >= 30 && asym.sigma_x > 0.0) {
    const std::size_t k = cfg.specs.size();
    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
      for (std::size_t s = 0; s < k; ++s) {
        std::vector<double> errs;
        for (std::size_t r = 0; r < cfg.replications; ++r) {
          errs.push_back(*out.rows[(ni * cfg.replications + r) * k + s].scaled_error);
        }
        out.reports.push_back({cfg.specs[s].to_string(), x_opt, cfg.n_list[ni], asym.sigma_x,
                               normality_diagnostic(errs, limit_mean(cfg.specs[s], asym.sigma_x), asym.sigma_x)});
      }
    }
  }
}

void run_solve(const Context& ctx, ExperimentOutput& out) {
  const auto& cfg = ctx.cfg;
  const std::size_t n_cfg = cfg.n_list.front();
  const auto data = cfg.data_file.empty() ? ctx.data(n_cfg, 0) : read_samples(cfg.data_file);
  const std::size_t n = data.size();
  const auto post = posterior_update(ctx.prior, data);
  const auto obj = ctx.objective(post, n, 0);
  const auto x_opt = ctx.problem.singleton_solution ? std::optional<Decision>(ctx.true_solution()) : std::nullopt;
  const std::optional<double> true_min = x_opt ? std::optional<double>(ctx.true_H(*x_opt)) : std::nullopt;
  for (const auto& spec : cfg.specs) {
    auto res = minimize([&](const Decision& x) { return obj(spec, x); }, ctx.problem.decision_box, cfg.optimizer);
    auto r = ctx.record(n, 0, spec);
    r.objective = res.value;
    r.true_value = ctx.true_H(res.x_star);
    r.x_star = res.x_star;
    r.min_value = res.value;
    r.true_min = true_min;
    if (x_opt) r.deviation = (res.x_star - *x_opt).norm();
    out.rows.push_back(std::move(r));
    out.solves.push_back(std::move(res));
  }
}

nlohmann::json report_json(const LabeledReport& l) {
  return {{"spec", l.spec},
          {"x", decision_json(l.x)},
          {"n", l.n},
          {"sigma_x", l.sigma_x},
          {"report", nlohmann::json::parse(l.report.to_json())},
          {"ks_threshold_95", ks_threshold_95(l.report.replications)}};
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write '" + p.string() + "'");
  f << text;
}

}  // namespace

std::string_view to_string(Command c) noexcept {
  switch (c) {
    case Command::Consistency: return "consistency";
    case Command::Normality: return "normality";
    case Command::Coverage: return "coverage";
    case Command::OptimalValue: return "optimal-value";
    case Command::Solve: return "solve";
    case Command::RiskEval: return "risk-eval";
  }
  return "unknown";
}

std::optional<Command> parse_command(std::string_view name) noexcept {
  for (auto c : {Command::Consistency, Command::Normality, Command::Coverage, Command::OptimalValue, Command::Solve,
                 Command::RiskEval}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

std::string RunRecord::csv_header() {
  return "command,seed,config_hash,row_kind,n,rep,spec,x,objective,true_value,scaled_error,ci_lo,ci_hi,covered,"
         "x_star,min_value,true_min,deviation";
}

std::string RunRecord::csv_row() const {
  std::string s;
  s.reserve(256);
  s += command + ',' + std::to_string(seed) + ',' + config_hash + ',' + row_kind + ',' + std::to_string(n) + ',';
  s += (rep ? std::to_string(*rep) : std::string()) + ',' + spec + ',' + cell(x) + ',';
  s += cell(objective) + ',' + cell(true_value) + ',' + cell(scaled_error) + ',' + cell(ci_lo) + ',' + cell(ci_hi) +
       ',' + cell(covered) + ',';
  s += cell(x_star) + ',' + cell(min_value) + ',' + cell(true_min) + ',' + cell(deviation);
  return s;
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

ExperimentOutput run_experiment(Command command, const ExperimentConfig& cfg) {
  if (command == Command::RiskEval) throw ConfigError("risk-eval takes a sample file, not an experiment config");
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const Context ctx(command, cfg);
  ExperimentOutput out;
  out.command = command;
  out.config_hash = ctx.hash;
  out.seed = ctx.seed;
  switch (command) {
    case Command::Consistency: run_consistency(ctx, out); break;
    case Command::Normality: run_normality(ctx, out); break;
    case Command::Coverage: run_coverage(ctx, out); break;
    case Command::OptimalValue: run_optimal_value(ctx, out); break;
    case Command::Solve: run_solve(ctx, out); break;
    case Command::RiskEval: break;
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

ExperimentOutput run_risk_eval(std::span<const RiskSpec> specs, std::span<const double> samples) {
  if (specs.empty()) throw InputError("risk-eval: at least one risk spec is required");
  std::string key;
  for (const auto& s : specs) key += s.to_string() + '\n';
  for (double v : samples) key += g9(v) + '\n';
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(key)));

  ExperimentOutput out;
  out.command = Command::RiskEval;
  out.config_hash = hash;
  for (const auto& s : specs) {
    RunRecord r;
    r.command = "risk-eval";
    r.config_hash = hash;
    r.n = samples.size();
    r.spec = s.to_string();
    r.objective = apply_risk(s, samples);
    out.rows.push_back(std::move(r));
  }
  return out;
}

std::vector<ConsistencySummary> summarize_consistency(const ExperimentOutput& out) {
  struct Cell {
    std::vector<double> abs_error, deviation, abs_min_error;
  };
  std::map<std::pair<std::size_t, std::string>, Cell> cells;
  std::vector<std::pair<std::size_t, std::string>> order;
  std::set<std::tuple<std::size_t, std::size_t, std::string>> solved;
  for (const auto& r : out.rows) {
    const auto key = std::make_pair(r.n, r.spec);
    auto [it, fresh] = cells.try_emplace(key);
    if (fresh) order.push_back(key);
    if (r.objective && r.true_value) it->second.abs_error.push_back(std::abs(*r.objective - *r.true_value));
    // Solve columns repeat across the x rows of one replication.
    if (r.deviation && solved.emplace(r.n, r.rep.value_or(0), r.spec).second) {
      it->second.deviation.push_back(*r.deviation);
      it->second.abs_min_error.push_back(std::abs(*r.min_value - *r.true_min));
    }
  }
  std::vector<ConsistencySummary> res;
  for (const auto& key : order) {
    const auto& c = cells.at(key);
    res.push_back({key.second, key.first, median(c.abs_error), median(c.deviation), median(c.abs_min_error)});
  }
  return res;
}

std::vector<CoverageSummary> summarize_coverage(const ExperimentOutput& out) {
  std::vector<CoverageSummary> res;
  for (const auto& r : out.rows) {
    if (r.row_kind == "summary" && r.covered) res.push_back({r.spec, r.n, r.x, *r.covered});
  }
  return res;
}

std::vector<double> read_samples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open sample file '" + path.string() + "'");
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end != tok.c_str() + tok.size()) {
        throw InputError(path.string() + ":" + std::to_string(lineno) + ": not a number: '" + tok + "'");
      }
      out.push_back(v);
    }
  }
  return out;
}

OutputFiles write_outputs(const ExperimentOutput& out, const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string stem = std::string(to_string(out.command)) + "_" + out.config_hash;
  OutputFiles files;
  files.csv = dir / (stem + ".csv");
  files.summary = dir / "summary.json";

  std::string csv = RunRecord::csv_header() + '\n';
  for (const auto& r : out.rows) csv += r.csv_row() + '\n';
  write_text(files.csv, csv);

  nlohmann::json summary{{"command", to_string(out.command)},
                         {"config_hash", out.config_hash},
                         {"seed", out.seed},
                         {"rows", out.rows.size()},
                         {"csv", files.csv.filename().string()},
                         {"wall_seconds", out.wall_seconds}};
  if (out.command != Command::RiskEval) summary["config"] = nlohmann::json::parse(cfg.canonical());

  if (!out.reports.empty()) {
    nlohmann::json reports = nlohmann::json::array();
    std::string report_csv = "spec,x,n,sigma_x," + NormalityReport::csv_header() + '\n';
    for (const auto& l : out.reports) {
      reports.push_back(report_json(l));
      report_csv += l.spec + ',' + cell(l.x) + ',' + std::to_string(l.n) + ',' + g9(l.sigma_x) + ',' +
                    l.report.csv_row() + '\n';
    }
    files.report_json = dir / (stem + "_normality.json");
    write_text(*files.report_json, reports.dump(2) + '\n');
    write_text(dir / (stem + "_normality.csv"), report_csv);
    summary["reports"] = reports;
  }

  if (!out.solves.empty()) {
    nlohmann::json solves = nlohmann::json::array();
    std::string trace_csv = "spec,eval,x,value\n";
    bool any_trace = false;
    for (std::size_t s = 0; s < out.solves.size(); ++s) {
      const auto& res = out.solves[s];
      const auto& spec = out.rows[s].spec;
      solves.push_back({{"spec", spec},
                        {"x_star", decision_json(res.x_star)},
                        {"value", res.value},
                        {"evaluations", res.evaluations},
                        {"status", to_string(res.status)}});
      for (std::size_t k = 0; k < res.trace.size(); ++k) {
        any_trace = true;
        trace_csv += spec + ',' + std::to_string(k) + ',' + format_decision(res.trace[k].x) + ',' +
                     g9(res.trace[k].value) + '\n';
      }
    }
    files.report_json = dir / (stem + "_result.json");
    write_text(*files.report_json, solves.dump(2) + '\n');
    if (any_trace) {
      files.trace_csv = dir / (stem + "_trace.csv");
      write_text(*files.trace_csv, trace_csv);
    }
    summary["solves"] = solves;
  }

  if (out.command == Command::Consistency) {
    nlohmann::json med = nlohmann::json::array();
    for (const auto& c : summarize_consistency(out)) {
      med.push_back({{"spec", c.spec},
                     {"n", c.n},
                     {"median_abs_error", c.median_abs_error},
                     {"median_deviation", c.median_deviation},
                     {"median_abs_min_error", c.median_abs_min_error}});
    }
    summary["medians"] = med;
  }
  if (out.command == Command::Coverage) {
    nlohmann::json cov = nlohmann::json::array();
    for (const auto& c : summarize_coverage(out)) {
      cov.push_back({{"spec", c.spec}, {"n", c.n}, {"x", decision_json(c.x)}, {"coverage", c.coverage}});
    }
    summary["coverage"] = cov;
  }
  write_text(files.summary, summary.dump(2) + '\n');
  return files;
}

}  // namespace bro
