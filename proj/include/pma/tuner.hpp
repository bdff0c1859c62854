#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "pma/errors.hpp"
#include "pma/stability.hpp"
#include "pma/types.hpp"

namespace pma {

using Gains8 = GainVector<double>;

struct Firefly {
  Gains8 s = Gains8::Zero();
  double objective = 0.0;
  double brightness = 0.0;
  bool feasible = false;
};

struct FaConfig {
  int n = 20;
  int max_generations = 100;
  double beta0 = 1.0;
  std::optional<double> gamma_fa;  // defaults to 1 / |upper - lower|^2
  double alpha = 0.05;             // in units of the box width per dimension
  double alpha_decay = 0.97;       // per generation
  double lambda_tradeoff = 1.0;
  double penalty = 1e3;
  Gains8 lower = Gains8::Zero();
  Gains8 upper = Gains8::Ones();
  std::uint64_t rng_seed = 1;
  int threads = 1;

  void validate() const;
  double length_scale_gamma() const;
};

struct GenerationStats {
  int generation = 0;
  double best_h = 0.0;  // best feasible objective so far, +inf before the first
  double mean_h = 0.0;
  int feasible_count = 0;
};

struct TuneResult {
  Firefly best;
  std::vector<GenerationStats> history;
  std::size_t evaluations = 0;  // plant evaluations performed
  std::size_t gate_passes = 0;  // gate-passing candidates encountered
  std::vector<Firefly> population;  // final evaluated population
};

class ExhaustedBudgetError : public Error {
 public:
  explicit ExhaustedBudgetError(Firefly best_infeasible)
      : Error(ErrorKind::kExhaustedBudget, "no feasible candidate found within the budget"),
        best_infeasible_(best_infeasible) {}

  const Firefly& best_infeasible() const noexcept { return best_infeasible_; }

 private:
  Firefly best_infeasible_;
};

using Evaluator = std::function<double(const Gains8&)>;
using Gate = std::function<StabilityReport<double>(const Gains8&)>;

inline constexpr double kBrightnessFloor = 1e-12;

double brightness_of(double objective);

/// Mean absolute tracking error plus lambda times the maximum.
double objective(std::span<const double> xd, std::span<const double> x, double lambda_tradeoff);

double distance(const Gains8& si, const Gains8& sj);

double attractiveness(double beta0, double gamma_fa, double r);

/// Moves si toward sj; alpha is the effective (already annealed) weight.
Gains8 move(const Gains8& si, const Gains8& sj, const FaConfig& config, double alpha,
            std::mt19937_64& rng);

/// Constrained firefly search. Candidates failing `gate` are never passed to
/// `evaluate` and receive config.penalty as objective.
TuneResult run(const FaConfig& config, const Evaluator& evaluate, const Gate& gate);

}  // namespace pma
