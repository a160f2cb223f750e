#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "bro/objective.hpp"

namespace bro {

enum class OptimizerMethod { Auto, GridRefine, NelderMead };

struct OptimizerConfig {
  /// Auto picks GridRefine for d = 1 and NelderMead otherwise.
  OptimizerMethod method = OptimizerMethod::Auto;
  std::size_t grid_points = 101;
  std::size_t refine_rounds = 3;
  std::size_t nm_budget = 500;
  double tol_x = 1e-6;
  double tol_f = 1e-9;
  bool keep_trace = false;

  /// Throws InputError when a count or tolerance is out of range.
  void validate() const;
};

enum class SolveStatus { Converged, NotConverged, Flat };

std::string_view to_string(SolveStatus s) noexcept;
std::string_view to_string(OptimizerMethod m) noexcept;

struct TraceEntry {
  Decision x;
  double value = 0.0;
};

struct SolveResult {
  Decision x_star;
  double value = 0.0;
  std::size_t evaluations = 0;
  SolveStatus status = SolveStatus::Converged;
  std::vector<TraceEntry> trace;
};

using ObjectiveFn = std::function<double(const Decision&)>;

/// Minimizes a deterministic objective over a compact box.
///
/// GridRefine evaluates a tensor grid, then repeatedly shrinks the box by a
/// factor of 4 around the incumbent (staying inside the original box).
/// NelderMead runs the standard simplex with every trial point clipped to
/// the box; running out of budget yields SolveStatus::NotConverged with the
/// best point seen. A constant objective yields SolveStatus::Flat.
SolveResult minimize(const ObjectiveFn& objective, const Box& box, const OptimizerConfig& cfg = {});

/// Tensor grid with `points` nodes per coordinate, endpoints included.
std::vector<Decision> make_grid(const Box& box, std::size_t points);

/// Grid points whose value is within tol_f of the grid minimum.
std::vector<Decision> argmin_set(const ObjectiveFn& objective, const Box& box, std::size_t grid_points,
                                 double tol_f);

/// Same selection on precomputed values (values[i] belongs to grid[i]).
std::vector<Decision> argmin_set(std::span<const Decision> grid, std::span<const double> values, double tol_f);

/// sup over a in A of the Euclidean distance from a to B.
double solution_deviation(std::span<const Decision> a, std::span<const Decision> b);

}  // namespace bro
