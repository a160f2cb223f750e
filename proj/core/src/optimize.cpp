#include "bro/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bro/error.hpp"

namespace bro {
namespace {

void require_box(const Box& box) {
  if (box.dim() == 0) throw InputError("optimizer: box has no coordinates");
  for (const auto& b : box.bounds) {
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.lo <= b.hi)) {
      throw InputError("optimizer: box must be nonempty and bounded");
    }
  }
}

class Counter {
 public:
  Counter(const ObjectiveFn& f, bool keep_trace) : f_(f), keep_trace_(keep_trace) {}

  double operator()(const Decision& x) {
    const double v = f_(x);
    ++evaluations;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    if (keep_trace_) trace.push_back({x, v});
    return v;
  }

  std::size_t evaluations = 0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::vector<TraceEntry> trace;

 private:
  const ObjectiveFn& f_;
  bool keep_trace_;
};

SolveResult grid_refine(const ObjectiveFn& f, const Box& box, const OptimizerConfig& cfg) {
  Counter eval(f, cfg.keep_trace);
  Box current = box;
  Decision best_x;
  double best = std::numeric_limits<double>::infinity();
  bool flat = false;

  for (std::size_t round = 0; round <= cfg.refine_rounds; ++round) {
    for (const auto& x : make_grid(current, cfg.grid_points)) {
      const double v = eval(x);
      if (v < best) {
        best = v;
        best_x = x;
      }
    }
    if (round == 0 && eval.hi - eval.lo <= cfg.tol_f) {
      flat = true;
      break;
    }
    for (std::size_t i = 0; i < current.dim(); ++i) {
      const double half = current.bounds[i].width() / 8.0;
      const auto& outer = box.bounds[i];
      double lo = best_x[static_cast<Eigen::Index>(i)] - half;
      double hi = best_x[static_cast<Eigen::Index>(i)] + half;
      if (lo < outer.lo) {
        hi += outer.lo - lo;
        lo = outer.lo;
      }
      if (hi > outer.hi) {
        lo -= hi - outer.hi;
        hi = outer.hi;
      }
      current.bounds[i] = {std::max(lo, outer.lo), std::min(hi, outer.hi)};
    }
  }
  return {best_x, best, eval.evaluations, flat ? SolveStatus::Flat : SolveStatus::Converged, std::move(eval.trace)};
}

SolveResult nelder_mead(const ObjectiveFn& f, const Box& box, const OptimizerConfig& cfg) {
  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  Counter eval(f, cfg.keep_trace);
  const auto d = static_cast<Eigen::Index>(box.dim());
  std::vector<Decision> simplex;
  std::vector<double> fv;
  const Decision start = box.center();
  simplex.push_back(start);
  for (Eigen::Index i = 0; i < d; ++i) {
    Decision v = start;
    const double step = 0.25 * box.bounds[static_cast<std::size_t>(i)].width();
    v[i] += step > 0.0 ? step : 1.0;
    simplex.push_back(box.clip(v));
  }
  for (const auto& v : simplex) fv.push_back(eval(v));

  std::vector<std::size_t> order(simplex.size());
  bool converged = false;
  while (eval.evaluations < cfg.nm_budget) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];

    double diameter = 0.0;
    for (const auto& v : simplex) diameter = std::max(diameter, (v - simplex[best]).lpNorm<Eigen::Infinity>());
    if (diameter <= cfg.tol_x && fv[worst] - fv[best] <= cfg.tol_f) {
      converged = true;
      break;
    }

    Decision centroid = Decision::Zero(d);
    for (std::size_t k = 0; k < simplex.size(); ++k) {
      if (k != worst) centroid += simplex[k];
    }
    centroid /= static_cast<double>(d);

    const Decision xr = box.clip(centroid + kReflect * (centroid - simplex[worst]));
    const double fr = eval(xr);
    if (fr < fv[best]) {
      const Decision xe = box.clip(centroid + kExpand * (centroid - simplex[worst]));
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        fv[worst] = fe;
      } else {
        simplex[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      simplex[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    const Decision xc = outside ? box.clip(centroid + kContract * (xr - centroid))
                                : box.clip(centroid + kContract * (simplex[worst] - centroid));
    const double fc = eval(xc);
    if (fc < (outside ? fr : fv[worst])) {
      simplex[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    for (std::size_t k = 0; k < simplex.size(); ++k) {
      if (k == best) continue;
      simplex[k] = box.clip(simplex[best] + kShrink * (simplex[k] - simplex[best]));
      fv[k] = eval(simplex[k]);
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  SolveStatus status = converged ? SolveStatus::Converged : SolveStatus::NotConverged;
  if (eval.hi - eval.lo <= cfg.tol_f) status = SolveStatus::Flat;
  return {simplex[best], fv[best], eval.evaluations, status, std::move(eval.trace)};
}

}  // namespace

void OptimizerConfig::validate() const {
  if (grid_points < 3) throw InputError("optimizer: grid_points must be >= 3");
  if (nm_budget == 0) throw InputError("optimizer: nm_budget must be positive");
  if (!(tol_x > 0.0) || !(tol_f >= 0.0)) throw InputError("optimizer: tolerances must be positive");
}

std::string_view to_string(SolveStatus s) noexcept {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::NotConverged: return "not_converged";
    case SolveStatus::Flat: return "flat";
  }
  return "unknown";
}

std::string_view to_string(OptimizerMethod m) noexcept {
  switch (m) {
    case OptimizerMethod::Auto: return "auto";
    case OptimizerMethod::GridRefine: return "grid_refine";
    case OptimizerMethod::NelderMead: return "nelder_mead";
  }
  return "unknown";
}

SolveResult minimize(const ObjectiveFn& objective, const Box& box, const OptimizerConfig& cfg) {
  require_box(box);
  cfg.validate();
  auto method = cfg.method;
  if (method == OptimizerMethod::Auto) method = box.dim() == 1 ? OptimizerMethod::GridRefine : OptimizerMethod::NelderMead;
  return method == OptimizerMethod::GridRefine ? grid_refine(objective, box, cfg) : nelder_mead(objective, box, cfg);
}

std::vector<Decision> make_grid(const Box& box, std::size_t points) {
  require_box(box);
  if (points < 2) throw InputError("make_grid: need at least two points per coordinate");
  const auto d = box.dim();
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= points;

  std::vector<Decision> grid;
  grid.reserve(total);
  std::vector<std::size_t> idx(d, 0);
  const double last = static_cast<double>(points - 1);
  for (std::size_t k = 0; k < total; ++k) {
    Decision x(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      const auto& b = box.bounds[i];
      // lo + width * i / (N - 1) puts round fractions of the box on exact values.
      x[static_cast<Eigen::Index>(i)] =
          idx[i] + 1 == points ? b.hi : b.lo + b.width() * static_cast<double>(idx[i]) / last;
    }
    grid.push_back(std::move(x));
    for (std::size_t i = 0; i < d; ++i) {
      if (++idx[i] < points) break;
      idx[i] = 0;
    }
  }
  return grid;
}

std::vector<Decision> argmin_set(std::span<const Decision> grid, std::span<const double> values, double tol_f) {
  if (grid.empty() || grid.size() != values.size()) throw InputError("argmin_set: grid and values must match");
  const double best = *std::min_element(values.begin(), values.end());
  std::vector<Decision> out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (values[i] <= best + tol_f) out.push_back(grid[i]);
  }
  return out;
}

std::vector<Decision> argmin_set(const ObjectiveFn& objective, const Box& box, std::size_t grid_points,
                                 double tol_f) {
  if (grid_points < 3) throw InputError("argmin_set: grid_points must be >= 3");
  const auto grid = make_grid(box, grid_points);
  std::vector<double> values;
  values.reserve(grid.size());
  for (const auto& x : grid) values.push_back(objective(x));
  return argmin_set(grid, values, tol_f);
}

double solution_deviation(std::span<const Decision> a, std::span<const Decision> b) {
  if (a.empty() || b.empty()) throw InputError("solution_deviation: sets must be nonempty");
  double sup = 0.0;
  for (const auto& p : a) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& q : b) nearest = std::min(nearest, (p - q).norm());
    sup = std::max(sup, nearest);
  }
  return sup;
}

}  // namespace bro
