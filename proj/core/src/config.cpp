#include "bro/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "bro/error.hpp"
#include "bro/rng.hpp"

namespace bro {
namespace {

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& what) const {
    std::string where = origin_;
    if (node.IsDefined() && node.Mark().line >= 0) where += ":" + std::to_string(node.Mark().line + 1);
    throw ConfigError(where + ": " + what);
  }

  void check_keys(const YAML::Node& section, const std::string& name, const std::set<std::string>& allowed) const {
    if (!section.IsMap()) fail(section, "section '" + name + "' must be a mapping");
    for (const auto& kv : section) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.contains(key)) fail(kv.first, "unknown key '" + key + "' in section '" + name + "'");
    }
  }

  template <class T>
  T get(const YAML::Node& node, const std::string& field) const {
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, "field '" + field + "' has the wrong type");
    }
  }

  // Scalar or sequence of scalars.
  std::vector<double> doubles(const YAML::Node& node, const std::string& field) const {
    if (node.IsScalar()) return {get<double>(node, field)};
    if (!node.IsSequence()) fail(node, "field '" + field + "' must be a number or a list of numbers");
    std::vector<double> out;
    for (const auto& v : node) out.push_back(get<double>(v, field));
    return out;
  }

  std::size_t positive_count(const YAML::Node& node, const std::string& field) const {
    const auto v = get<long long>(node, field);
    if (v <= 0) fail(node, "field '" + field + "' must be a positive integer");
    return static_cast<std::size_t>(v);
  }

 private:
  std::string origin_;
};

nlohmann::json decision_json(const Decision& x) { return std::vector<double>(x.data(), x.data() + x.size()); }

}  // namespace

ExperimentConfig parse_config(std::string_view text, std::string_view origin) {
  const Reader rd{std::string(origin)};
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(std::string(origin) + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  ExperimentConfig cfg;
  if (root.IsNull()) return cfg;
  rd.check_keys(root, "<top level>", {"problem", "prior", "risk", "experiment", "optimizer"});

  try {
    if (const auto s = root["problem"]) {
      rd.check_keys(s, "problem",
                    {"name", "c", "p", "theta_c", "x_min", "x_max", "family", "payoff", "risk_aversion", "analytic"});
      auto& pc = cfg.problem;
      if (s["name"]) pc.name = rd.get<std::string>(s["name"], "problem.name");
      if (s["c"]) pc.c = rd.get<double>(s["c"], "problem.c");
      if (s["p"]) pc.p = rd.get<double>(s["p"], "problem.p");
      if (s["theta_c"]) pc.theta_c = rd.doubles(s["theta_c"], "problem.theta_c");
      if (s["x_min"]) pc.x_min = rd.doubles(s["x_min"], "problem.x_min");
      if (s["x_max"]) pc.x_max = rd.doubles(s["x_max"], "problem.x_max");
      if (s["risk_aversion"]) pc.risk_aversion = rd.get<double>(s["risk_aversion"], "problem.risk_aversion");
      if (s["analytic"]) pc.analytic = rd.get<bool>(s["analytic"], "problem.analytic");
      if (const auto f = s["family"]) {
        rd.check_keys(f, "problem.family", {"kind", "sigma2", "shape", "support"});
        FamilyConfig fc;
        if (!f["kind"]) rd.fail(f, "field 'problem.family.kind' is required");
        fc.kind = rd.get<std::string>(f["kind"], "problem.family.kind");
        if (f["sigma2"]) fc.sigma2 = rd.get<double>(f["sigma2"], "problem.family.sigma2");
        if (f["shape"]) fc.shape = rd.get<double>(f["shape"], "problem.family.shape");
        if (f["support"]) fc.support = rd.doubles(f["support"], "problem.family.support");
        pc.family = fc;
      }
      if (const auto t = s["payoff"]) {
        if (!t.IsSequence()) rd.fail(t, "field 'problem.payoff' must be a list of rows");
        for (const auto& row : t) pc.payoff.push_back(rd.doubles(row, "problem.payoff"));
      }
    }

    if (const auto s = root["prior"]) {
      rd.check_keys(s, "prior", {"kind", "alpha0", "beta0", "mu0", "sigma0_2", "alpha"});
      auto& pr = cfg.prior;
      if (s["kind"]) pr.kind = rd.get<std::string>(s["kind"], "prior.kind");
      if (s["alpha0"]) pr.alpha0 = rd.get<double>(s["alpha0"], "prior.alpha0");
      if (s["beta0"]) pr.beta0 = rd.get<double>(s["beta0"], "prior.beta0");
      if (s["mu0"]) pr.mu0 = rd.get<double>(s["mu0"], "prior.mu0");
      if (s["sigma0_2"]) pr.sigma0_2 = rd.get<double>(s["sigma0_2"], "prior.sigma0_2");
      if (s["alpha"]) pr.alpha = rd.doubles(s["alpha"], "prior.alpha");
    }

    if (const auto s = root["risk"]) {
      rd.check_keys(s, "risk", {"specs"});
      if (const auto l = s["specs"]) {
        if (!l.IsSequence()) rd.fail(l, "field 'risk.specs' must be a list");
        for (const auto& v : l) {
          try {
            cfg.specs.push_back(RiskSpec::parse(rd.get<std::string>(v, "risk.specs")));
          } catch (const Error& e) {
            rd.fail(v, std::string("field 'risk.specs': ") + e.what());
          }
        }
      }
    }

    if (const auto s = root["experiment"]) {
      rd.check_keys(s, "experiment",
                    {"n_list", "replications", "outer_m", "inner_m", "x_list", "seed", "beta", "workers",
                     "output_dir", "data_file"});
      if (const auto l = s["n_list"]) {
        if (!l.IsSequence()) rd.fail(l, "field 'experiment.n_list' must be a list");
        for (const auto& v : l) cfg.n_list.push_back(rd.positive_count(v, "experiment.n_list"));
      }
      if (s["replications"]) cfg.replications = rd.positive_count(s["replications"], "experiment.replications");
      if (s["outer_m"]) cfg.outer_m = rd.positive_count(s["outer_m"], "experiment.outer_m");
      if (s["inner_m"]) cfg.inner_m = rd.positive_count(s["inner_m"], "experiment.inner_m");
      if (s["workers"]) cfg.workers = rd.positive_count(s["workers"], "experiment.workers");
      if (s["seed"]) cfg.seed = rd.get<std::uint64_t>(s["seed"], "experiment.seed");
      if (s["beta"]) cfg.beta = rd.get<double>(s["beta"], "experiment.beta");
      if (s["output_dir"]) cfg.output_dir = rd.get<std::string>(s["output_dir"], "experiment.output_dir");
      if (s["data_file"]) cfg.data_file = rd.get<std::string>(s["data_file"], "experiment.data_file");
      if (const auto l = s["x_list"]) {
        if (!l.IsSequence()) rd.fail(l, "field 'experiment.x_list' must be a list");
        for (const auto& v : l) {
          const auto xs = rd.doubles(v, "experiment.x_list");
          cfg.x_list.push_back(Eigen::Map<const Decision>(xs.data(), static_cast<Eigen::Index>(xs.size())));
        }
      }
    }

    if (const auto s = root["optimizer"]) {
      rd.check_keys(s, "optimizer",
                    {"method", "grid_points", "refine_rounds", "nm_budget", "tol_x", "tol_f", "trace"});
      auto& oc = cfg.optimizer;
      if (const auto m = s["method"]) {
        const auto name = rd.get<std::string>(m, "optimizer.method");
        if (name == "auto") oc.method = OptimizerMethod::Auto;
        else if (name == "grid_refine") oc.method = OptimizerMethod::GridRefine;
        else if (name == "nelder_mead") oc.method = OptimizerMethod::NelderMead;
        else rd.fail(m, "field 'optimizer.method' must be auto, grid_refine or nelder_mead");
      }
      if (s["grid_points"]) oc.grid_points = rd.positive_count(s["grid_points"], "optimizer.grid_points");
      if (s["refine_rounds"]) oc.refine_rounds = rd.get<std::size_t>(s["refine_rounds"], "optimizer.refine_rounds");
      if (s["nm_budget"]) oc.nm_budget = rd.positive_count(s["nm_budget"], "optimizer.nm_budget");
      if (s["tol_x"]) oc.tol_x = rd.get<double>(s["tol_x"], "optimizer.tol_x");
      if (s["tol_f"]) oc.tol_f = rd.get<double>(s["tol_f"], "optimizer.tol_f");
      if (s["trace"]) oc.keep_trace = rd.get<bool>(s["trace"], "optimizer.trace");
      if (oc.grid_points < 3) rd.fail(s["grid_points"], "field 'optimizer.grid_points' must be >= 3");
    }
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string(origin) + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

void ExperimentConfig::validate() const {
  if (!seed) throw ConfigError("experiment.seed is required (set it in the config or pass --seed)");
  if (n_list.empty()) throw ConfigError("experiment.n_list must contain at least one sample size");
  if (specs.empty()) throw ConfigError("risk.specs must contain at least one risk functional");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("experiment.beta must lie in (0, 1)");
  try {
    optimizer.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  const auto problem = build_problem(*this);
  for (std::size_t i = 0; i < x_list.size(); ++i) {
    if (!problem.decision_box.contains(x_list[i])) {
      throw ConfigError("experiment.x_list[" + std::to_string(i) + "] lies outside the decision box");
    }
  }
  build_prior(*this, problem.family);
}

std::string ExperimentConfig::canonical() const {
  nlohmann::json j;
  auto& pj = j["problem"];
  pj["name"] = problem.name;
  pj["c"] = problem.c;
  pj["p"] = problem.p;
  pj["theta_c"] = problem.theta_c;
  pj["x_min"] = problem.x_min;
  pj["x_max"] = problem.x_max;
  pj["payoff"] = problem.payoff;
  pj["risk_aversion"] = problem.risk_aversion;
  pj["analytic"] = problem.analytic;
  if (problem.family) {
    pj["family"] = {{"kind", problem.family->kind},
                    {"sigma2", problem.family->sigma2},
                    {"shape", problem.family->shape},
                    {"support", problem.family->support}};
  }
  j["prior"] = {{"kind", prior.kind},       {"alpha0", prior.alpha0},     {"beta0", prior.beta0},
                {"mu0", prior.mu0},         {"sigma0_2", prior.sigma0_2}, {"alpha", prior.alpha}};
  auto& specs_j = j["risk"]["specs"];
  specs_j = nlohmann::json::array();
  for (const auto& s : specs) specs_j.push_back(s.to_string());
  auto& ej = j["experiment"];
  ej["n_list"] = n_list;
  ej["replications"] = replications;
  ej["outer_m"] = outer_m;
  ej["inner_m"] = inner_m;
  ej["x_list"] = nlohmann::json::array();
  for (const auto& x : x_list) ej["x_list"].push_back(decision_json(x));
  ej["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  ej["beta"] = beta;
  ej["data_file"] = data_file;
  j["optimizer"] = {{"method", to_string(optimizer.method)}, {"grid_points", optimizer.grid_points},
                    {"refine_rounds", optimizer.refine_rounds}, {"nm_budget", optimizer.nm_budget},
                    {"tol_x", optimizer.tol_x},                 {"tol_f", optimizer.tol_f},
                    {"trace", optimizer.keep_trace}};
  return j.dump();
}

std::string ExperimentConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical())));
  return buf;
}

namespace {

void require_family(const ProblemConfig& pc, std::string_view kind) {
  if (pc.family && pc.family->kind != kind) {
    throw ConfigError("problem '" + pc.name + "' requires family kind '" + std::string(kind) + "', got '" +
                      pc.family->kind + "'");
  }
}

double scalar(const std::vector<double>& v, double fallback, const char* field) {
  if (v.empty()) return fallback;
  if (v.size() != 1) throw ConfigError(std::string(field) + " must be a single number for this problem");
  return v.front();
}

Box box_from(const ProblemConfig& pc, std::size_t d, double lo, double hi) {
  Box b;
  for (std::size_t i = 0; i < d; ++i) {
    const double l = pc.x_min.empty() ? lo : pc.x_min.size() == 1 ? pc.x_min[0] : pc.x_min.at(i);
    const double h = pc.x_max.empty() ? hi : pc.x_max.size() == 1 ? pc.x_max[0] : pc.x_max.at(i);
    b.bounds.push_back({l, h});
  }
  if ((pc.x_min.size() > 1 && pc.x_min.size() != d) || (pc.x_max.size() > 1 && pc.x_max.size() != d)) {
    throw ConfigError("problem.x_min / x_max must have one entry or one per decision coordinate");
  }
  return b;
}

}  // namespace

Problem build_problem(const ExperimentConfig& cfg) {
  const auto& pc = cfg.problem;
  try {
    Problem pr = [&] {
      if (pc.name == "newsvendor_exp") {
        require_family(pc, "exponential_rate");
        const auto b = box_from(pc, 1, 0.0, 4.0);
        return newsvendor_exponential(pc.c, pc.p, scalar(pc.theta_c, 1.0, "problem.theta_c"), b.bounds[0]);
      }
      if (pc.name == "linear_normal") {
        require_family(pc, "normal_known_var");
        const double sigma2 = pc.family ? pc.family->sigma2 : 1.0;
        const auto b = box_from(pc, 1, -1.0, 1.0);
        return linear_normal(sigma2, scalar(pc.theta_c, 0.0, "problem.theta_c"), b.bounds[0]);
      }
      if (pc.name == "discrete_portfolio") {
        require_family(pc, "finite_discrete");
        std::vector<double> support = pc.family && !pc.family->support.empty() ? pc.family->support
                                                                                  : std::vector<double>{0.0, 1.0, 2.0};
        std::vector<std::vector<double>> rows =
            pc.payoff.empty() ? std::vector<std::vector<double>>{{0.6, 1.2}, {0.4, -1.0}, {-0.5, 0.9}} : pc.payoff;
        const auto d = rows.front().size();
        Matrix payoff(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (rows[i].size() != d) throw ConfigError("problem.payoff rows must have equal length");
          for (std::size_t k = 0; k < d; ++k) payoff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
        }
        const auto l = support.size();
        std::vector<double> tc = pc.theta_c.empty() ? std::vector<double>(l, 1.0 / static_cast<double>(l)) : pc.theta_c;
        return discrete_portfolio(std::move(support), std::move(payoff), pc.risk_aversion,
                                  Eigen::Map<const Vector>(tc.data(), static_cast<Eigen::Index>(tc.size())),
                                  box_from(pc, d, 0.0, 1.0));
      }
      throw ConfigError("problem.name '" + pc.name +
                        "' is not a builtin (newsvendor_exp, linear_normal, discrete_portfolio)");
    }();
    if (!pc.analytic) pr = pr.without_closed_forms();
    return pr;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
}

PriorSpec build_prior(const ExperimentConfig& cfg, const ObservationFamily& family) {
  const auto& pr = cfg.prior;
  try {
    const std::string kind = !pr.kind.empty()                                        ? pr.kind
                             : std::holds_alternative<ExponentialRate>(family.kind()) ? "gamma"
                             : std::holds_alternative<NormalKnownVar>(family.kind())  ? "normal"
                             : std::holds_alternative<WeibullKnownShape>(family.kind())
                                 ? "inv_gamma"
                                 : "dirichlet";
    if (kind == "gamma") return PriorSpec({GammaHyper{pr.alpha0, pr.beta0}}, family);
    if (kind == "normal") return PriorSpec({NormalHyper{pr.mu0, pr.sigma0_2}}, family);
    if (kind == "inv_gamma") return PriorSpec({InvGammaHyper{pr.alpha0, pr.beta0}}, family);
    if (kind == "dirichlet") {
      auto alpha = pr.alpha.empty() ? std::vector<double>(family.param_dim(), 1.0) : pr.alpha;
      return PriorSpec({DirichletHyper{std::move(alpha)}}, family);
    }
    throw ConfigError("prior.kind '" + kind + "' must be gamma, normal, inv_gamma or dirichlet");
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("prior: ") + e.what());
  }
}

}  // namespace bro
