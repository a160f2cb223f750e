#include "bro/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <string>

#include "bro/error.hpp"

namespace bro {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

bool positive(double v) { return v > 0.0 && std::isfinite(v); }


}  // namespace

PriorSpec::PriorSpec(Hyperparameters hyper, ObservationFamily family)
    : hyper_(std::move(hyper)), family_(std::move(family)) {
  const auto& k = family_.kind();
  std::visit(Overloaded{
                 [&](const GammaHyper& h) {
                   if (!positive(h.shape) || !positive(h.rate)) throw DomainError("gamma prior: shape and rate must be positive");
                   if (!std::holds_alternative<ExponentialRate>(k)) throw DomainError("gamma prior pairs only with exponential_rate");
                 },
                 [&](const NormalHyper& h) {
                   if (!std::isfinite(h.mean) || !positive(h.var)) throw DomainError("normal prior: variance must be positive");
                   if (!std::holds_alternative<NormalKnownVar>(k)) throw DomainError("normal prior pairs only with normal_known_var");
                 },
                 [&](const InvGammaHyper& h) {
                   if (!positive(h.shape) || !positive(h.scale)) throw DomainError("inv_gamma prior: shape and scale must be positive");
                   if (!std::holds_alternative<WeibullKnownShape>(k)) throw DomainError("inv_gamma prior pairs only with weibull_known_shape");
                 },
                 [&](const DirichletHyper& h) {
                   if (!std::holds_alternative<FiniteDiscrete>(k)) throw DomainError("dirichlet prior pairs only with finite_discrete");
                   if (h.alpha.size() != family_.param_dim()) throw DomainError("dirichlet prior: alpha length must match the support");
                   if (!std::all_of(h.alpha.begin(), h.alpha.end(), positive)) throw DomainError("dirichlet prior: components must be positive");
                 },
             },
             hyper_);
}

std::string_view PriorSpec::kind_name() const noexcept {
  return std::visit(Overloaded{
                        [](const GammaHyper&) { return std::string_view("gamma"); },
                        [](const NormalHyper&) { return std::string_view("normal"); },
                        [](const InvGammaHyper&) { return std::string_view("inv_gamma"); },
                        [](const DirichletHyper&) { return std::string_view("dirichlet"); },
                    },
                    hyper_);
}

PosteriorState::PosteriorState(PriorSpec prior) : prior_(std::move(prior)), hyper_(prior_.hyper()) {
  if (prior_.family().is_discrete()) counts_.assign(prior_.family().param_dim(), 0);
}

PosteriorState PosteriorState::absorb(std::span<const double> data) const {
  PosteriorState next = *this;
  const auto& family = prior_.family();
  for (double xi : data) {
    std::visit(Overloaded{
                   [&](const ExponentialRate&) {
                     if (!(xi >= 0.0) || !std::isfinite(xi)) throw DataError("exponential observation must be finite and >= 0");
                     next.sum_.add(xi);
                   },
                   [&](const NormalKnownVar&) {
                     if (!std::isfinite(xi)) throw DataError("normal observation must be finite");
                     next.sum_.add(xi);
                   },
                   [&](const WeibullKnownShape& f) {
                     if (!(xi >= 0.0) || !std::isfinite(xi)) throw DataError("weibull observation must be finite and >= 0");
                     next.sum_.add(std::pow(xi, f.shape));
                   },
                   [&](const FiniteDiscrete& f) {
                     if (!(xi >= 0.0) || std::floor(xi) != xi || xi >= static_cast<double>(f.support.size())) {
                       throw DataError("discrete observation must be a category index in [0, " +
                                       std::to_string(f.support.size()) + ")");
                     }
                     ++next.counts_[static_cast<std::size_t>(xi)];
                   },
               },
               family.kind());
  }
  next.n_ += data.size();
  next.refresh();
  return next;
}

void PosteriorState::refresh() {
  const auto n = static_cast<double>(n_);
  const auto& family = prior_.family();
  hyper_ = std::visit(
      Overloaded{
          [&](const GammaHyper& h) -> Hyperparameters { return GammaHyper{h.shape + n, sum_.value(h.rate)}; },
          [&](const NormalHyper& h) -> Hyperparameters {
            const double sigma2 = std::get<NormalKnownVar>(family.kind()).sigma2;
            const double var = 1.0 / (1.0 / h.var + n / sigma2);
            return NormalHyper{var * (h.mean / h.var + sum_.value() / sigma2), var};
          },
          [&](const InvGammaHyper& h) -> Hyperparameters { return InvGammaHyper{h.shape + n, sum_.value(h.scale)}; },
          [&](const DirichletHyper& h) -> Hyperparameters {
            DirichletHyper out = h;
            for (std::size_t i = 0; i < out.alpha.size(); ++i) out.alpha[i] += static_cast<double>(counts_[i]);
            return out;
          },
      },
      prior_.hyper());
}

PosteriorState posterior_update(const PriorSpec& prior, std::span<const double> data) {
  return PosteriorState(prior).absorb(data);
}

namespace {

nlohmann::json hyper_json(const Hyperparameters& h) {
  return std::visit(Overloaded{
                        [](const GammaHyper& g) { return nlohmann::json{{"shape", g.shape}, {"rate", g.rate}}; },
                        [](const NormalHyper& g) { return nlohmann::json{{"mean", g.mean}, {"var", g.var}}; },
                        [](const InvGammaHyper& g) { return nlohmann::json{{"shape", g.shape}, {"scale", g.scale}}; },
                        [](const DirichletHyper& g) { return nlohmann::json{{"alpha", g.alpha}}; },
                    },
                    h);
}

nlohmann::json family_json(const ObservationFamily& f) {
  nlohmann::json j{{"kind", f.name()}};
  std::visit(Overloaded{
                 [&](const NormalKnownVar& k) { j["sigma2"] = k.sigma2; },
                 [&](const WeibullKnownShape& k) { j["shape"] = k.shape; },
                 [&](const FiniteDiscrete& k) { j["support"] = k.support; },
                 [](const ExponentialRate&) {},
             },
             f.kind());
  return j;
}

}  // namespace

std::string PosteriorState::to_json() const {
  nlohmann::json j;
  j["kind"] = prior_.kind_name();
  j["family"] = family_json(family());
  j["prior"] = hyper_json(prior_.hyper());
  j["hyperparameters"] = hyper_json(hyper_);
  j["n"] = n_;
  j["sum_partials"] = sum_.partials();
  j["counts"] = counts_;
  return j.dump();
}

PosteriorState PosteriorState::from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const auto& fj = j.at("family");
    const auto fkind = fj.at("kind").get<std::string>();
    const ObservationFamily family =
        fkind == "exponential_rate"      ? ObservationFamily::exponential_rate()
        : fkind == "normal_known_var"    ? ObservationFamily::normal_known_var(fj.at("sigma2").get<double>())
        : fkind == "weibull_known_shape" ? ObservationFamily::weibull_known_shape(fj.at("shape").get<double>())
        : fkind == "finite_discrete"
            ? ObservationFamily::finite_discrete(fj.at("support").get<std::vector<double>>())
            : throw InputError("posterior json: unknown family kind '" + fkind + "'");

    const auto kind = j.at("kind").get<std::string>();
    const auto& pj = j.at("prior");
    Hyperparameters prior_h =
        kind == "gamma"       ? Hyperparameters(GammaHyper{pj.at("shape"), pj.at("rate")})
        : kind == "normal"    ? Hyperparameters(NormalHyper{pj.at("mean"), pj.at("var")})
        : kind == "inv_gamma" ? Hyperparameters(InvGammaHyper{pj.at("shape"), pj.at("scale")})
        : kind == "dirichlet" ? Hyperparameters(DirichletHyper{pj.at("alpha").get<std::vector<double>>()})
                              : throw InputError("posterior json: unknown prior kind '" + kind + "'");

    PosteriorState state(PriorSpec(std::move(prior_h), family));
    state.n_ = j.at("n").get<std::size_t>();
    for (double p : j.at("sum_partials").get<std::vector<double>>()) state.sum_.add(p);
    if (family.is_discrete()) {
      state.counts_ = j.at("counts").get<std::vector<std::size_t>>();
      if (state.counts_.size() != family.param_dim()) throw InputError("posterior json: counts length mismatch");
    }
    state.refresh();
    if (hyper_json(state.hyper_) != j.at("hyperparameters")) {
      throw InputError("posterior json: hyperparameters do not match the sufficient statistics");
    }
    return state;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("posterior json: ") + e.what());
  }
}

std::vector<ParamPoint> posterior_sample(const PosteriorState& post, std::size_t m, Stream& rng) {
  if (m == 0) throw InputError("posterior_sample: m must be >= 1");
  const auto& family = post.family();
  const ParamPoint proto = [&] {
    if (family.is_discrete()) {
      const auto l = static_cast<Eigen::Index>(family.param_dim());
      return ParamPoint::for_family(family, Vector::Constant(l, 1.0 / static_cast<double>(l)));
    }
    return ParamPoint::for_family(family, 1.0);
  }();
  const auto& bounds = proto.bounds();
  const auto clamp = [&](double v, std::size_t i) { return std::clamp(v, bounds[i].lo, bounds[i].hi); };

  std::vector<ParamPoint> out;
  out.reserve(m);
  std::visit(Overloaded{
                 [&](const GammaHyper& h) {
                   for (std::size_t j = 0; j < m; ++j) {
                     out.push_back(proto.with_theta(Vector::Constant(1, clamp(rng.gamma(h.shape) / h.rate, 0))));
                   }
                 },
                 [&](const NormalHyper& h) {
                   const double sd = std::sqrt(h.var);
                   for (std::size_t j = 0; j < m; ++j) {
                     out.push_back(proto.with_theta(Vector::Constant(1, clamp(h.mean + sd * rng.normal(), 0))));
                   }
                 },
                 [&](const InvGammaHyper& h) {
                   for (std::size_t j = 0; j < m; ++j) {
                     out.push_back(proto.with_theta(Vector::Constant(1, clamp(h.scale / rng.gamma(h.shape), 0))));
                   }
                 },
                 [&](const DirichletHyper& h) {
                   const auto l = static_cast<Eigen::Index>(h.alpha.size());
                   Vector g(l);
                   for (std::size_t j = 0; j < m; ++j) {
                     for (Eigen::Index i = 0; i < l; ++i) g[i] = rng.gamma(h.alpha[static_cast<std::size_t>(i)]);
                     out.push_back(proto.with_theta(g / g.sum()));
                   }
                 },
             },
             post.hyper());
  return out;
}

PosteriorMoments posterior_moments(const PosteriorState& post) {
  return std::visit(
      Overloaded{
          [](const GammaHyper& h) {
            return PosteriorMoments{Vector::Constant(1, h.shape / h.rate),
                                    Matrix::Constant(1, 1, h.shape / (h.rate * h.rate))};
          },
          [](const NormalHyper& h) {
            return PosteriorMoments{Vector::Constant(1, h.mean), Matrix::Constant(1, 1, h.var)};
          },
          [](const InvGammaHyper& h) {
            if (!(h.shape > 2.0)) {
              throw MomentUndefinedError("inv_gamma posterior: variance needs shape > 2, got " +
                                         std::to_string(h.shape));
            }
            const double a1 = h.shape - 1.0;
            return PosteriorMoments{Vector::Constant(1, h.scale / a1),
                                    Matrix::Constant(1, 1, h.scale * h.scale / (a1 * a1 * (h.shape - 2.0)))};
          },
          [](const DirichletHyper& h) {
            const auto l = static_cast<Eigen::Index>(h.alpha.size());
            const Vector a = Eigen::Map<const Vector>(h.alpha.data(), l);
            const double a0 = a.sum();
            const Vector mean = a / a0;
            Matrix cov = -(mean * mean.transpose()) / (a0 + 1.0);
            cov.diagonal() += mean / (a0 + 1.0);
            return PosteriorMoments{mean, cov};
          },
      },
      post.hyper());
}

SecondMomentTerms a41_terms(const PosteriorState& post, const ParamPoint& theta_c) {
  if (post.n() == 0) throw InputError("second-moment diagnostic needs at least one observation");
  validate_parameter(post.family(), theta_c);
  const auto mom = posterior_moments(post);
  const auto n = static_cast<double>(post.n());
  return {n * (mom.mean - theta_c.theta()).squaredNorm(), n * mom.cov.trace()};
}

double a41_diagnostic(const PosteriorState& post, const ParamPoint& theta_c) {
  return a41_terms(post, theta_c).total();
}

}  // namespace bro
