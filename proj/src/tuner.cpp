#include "pma/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

namespace pma {

void FaConfig::validate() const {
  if (n < 2) throw ConfigError("fa: population size must be >= 2");
  if (max_generations < 1) throw ConfigError("fa: max_generations must be >= 1");
  if (!(beta0 > 0)) throw ConfigError("fa: beta0 must be > 0");
  if (gamma_fa && !(*gamma_fa > 0)) throw ConfigError("fa: gamma must be > 0");
  if (!(alpha >= 0)) throw ConfigError("fa: alpha must be >= 0");
  if (!(alpha_decay > 0 && alpha_decay <= 1)) throw ConfigError("fa: alpha_decay must be in (0, 1]");
  if (!(penalty > 0)) throw ConfigError("fa: penalty must be > 0");
  if (!(lower.array() < upper.array()).all()) throw ConfigError("fa: lower bounds must be < upper");
  if (threads < 1) throw ConfigError("fa: threads must be >= 1");
}

double FaConfig::length_scale_gamma() const {
  if (gamma_fa) return *gamma_fa;
  return 1.0 / (upper - lower).squaredNorm();
}

double brightness_of(double objective) { return 1.0 / (objective + kBrightnessFloor); }

double objective(std::span<const double> xd, std::span<const double> x, double lambda_tradeoff) {
  if (xd.empty() || xd.size() != x.size())
    throw DomainError("objective: need equally sized, non-empty samples");
  double sum = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < xd.size(); ++i) {
    const double e = std::abs(xd[i] - x[i]);
    sum += e;
    peak = std::max(peak, e);
  }
  return sum / double(xd.size()) + lambda_tradeoff * peak;
}

double distance(const Gains8& si, const Gains8& sj) { return (si - sj).norm(); }

double attractiveness(double beta0, double gamma_fa, double r) {
  return beta0 * std::exp(-gamma_fa * r * r);
}

Gains8 move(const Gains8& si, const Gains8& sj, const FaConfig& config, double alpha,
            std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double beta =
      attractiveness(config.beta0, config.length_scale_gamma(), distance(si, sj));
  const Gains8 width = config.upper - config.lower;
  Gains8 out;
  for (int k = 0; k < kGainDim; ++k) {
    const double delta = normal(rng);
    const double v = si(k) + beta * (sj(k) - si(k)) + alpha * width(k) * (delta - 0.5);
    out(k) = std::clamp(v, config.lower(k), config.upper(k));
  }
  return out;
}

namespace {

void evaluate_population(std::vector<Firefly>& pop, const FaConfig& config,
                         const Evaluator& evaluate, const Gate& gate, TuneResult& result) {
  std::vector<char> feasible(pop.size(), 0);
  for (std::size_t i = 0; i < pop.size(); ++i) feasible[i] = gate(pop[i].s).feasible ? 1 : 0;

  std::vector<double> h(pop.size(), config.penalty);
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < pop.size(); ++i)
    if (feasible[i]) todo.push_back(i);

  if (config.threads <= 1) {
    for (std::size_t i : todo) h[i] = evaluate(pop[i].s);
  } else {
    // Evaluations are independent; results land by index so ordering is irrelevant.
    for (std::size_t begin = 0; begin < todo.size(); begin += std::size_t(config.threads)) {
      const std::size_t end = std::min(todo.size(), begin + std::size_t(config.threads));
      std::vector<std::future<double>> jobs;
      for (std::size_t k = begin; k < end; ++k)
        jobs.push_back(std::async(std::launch::async, evaluate, pop[todo[k]].s));
      for (std::size_t k = begin; k < end; ++k) h[todo[k]] = jobs[k - begin].get();
    }
  }

  result.gate_passes += todo.size();
  result.evaluations += todo.size();
  for (std::size_t i = 0; i < pop.size(); ++i) {
    pop[i].feasible = feasible[i] != 0;
    pop[i].objective = std::isfinite(h[i]) ? h[i] : config.penalty;
    pop[i].brightness = brightness_of(pop[i].objective);
  }
}

}  // namespace

TuneResult run(const FaConfig& config, const Evaluator& evaluate, const Gate& gate) {
  config.validate();
  TuneResult result;

  std::vector<std::mt19937_64> rngs;
  rngs.reserve(std::size_t(config.n));
  for (int i = 0; i < config.n; ++i) {
    std::seed_seq seq{std::uint32_t(config.rng_seed), std::uint32_t(config.rng_seed >> 32),
                      std::uint32_t(i)};
    rngs.emplace_back(seq);
  }

  std::vector<Firefly> pop(std::size_t(config.n));
  for (int i = 0; i < config.n; ++i) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < kGainDim; ++k)
      pop[i].s(k) = config.lower(k) + unit(rngs[i]) * (config.upper(k) - config.lower(k));
  }

  std::optional<Firefly> best;
  std::optional<Firefly> best_infeasible;
  double alpha = config.alpha;

  for (int gen = 0; gen < config.max_generations; ++gen) {
    evaluate_population(pop, config, evaluate, gate, result);

    GenerationStats stats;
    stats.generation = gen;
    double sum = 0.0;
    for (const auto& f : pop) {
      sum += f.objective;
      if (f.feasible) {
        ++stats.feasible_count;
        if (!best || f.objective < best->objective) best = f;
      } else if (!best_infeasible || f.objective < best_infeasible->objective) {
        best_infeasible = f;
      }
    }
    stats.mean_h = sum / double(pop.size());
    stats.best_h = best ? best->objective : std::numeric_limits<double>::infinity();
    result.history.push_back(stats);

    if (gen + 1 == config.max_generations) break;

    // Synchronous update against the generation-start snapshot.
    const std::vector<Firefly> snapshot = pop;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      for (std::size_t j = 0; j < pop.size(); ++j) {
        if (snapshot[i].brightness < snapshot[j].brightness)
          pop[i].s = move(pop[i].s, snapshot[j].s, config, alpha, rngs[i]);
      }
    }
    alpha *= config.alpha_decay;
  }

  result.population = pop;
  if (!best) throw ExhaustedBudgetError(best_infeasible.value_or(pop.front()));
  result.best = *best;
  return result;
}

}  // namespace pma
