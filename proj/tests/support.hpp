#pragma once

#include "cbde/draws.hpp"
#include "cbde/evolution.hpp"
#include "cbde/experiment.hpp"

#include "trace_oracle.hpp"

#include <string>
#include <vector>

namespace cbde::support {

inline FitnessOracle table_oracle(const std::map<std::string, double>& aucs) {
  return [&aucs](const FeatureMask& m) {
    Evaluation e;
    e.model.coefficients = Vector::Zero(static_cast<Index>(m.popcount()));
    e.auc = aucs.at(m.to_string());
    return e;
  };
}

struct TraceOutcome {
  std::vector<std::string> masks;
  std::vector<double> fitness;
  std::size_t crossover_consumed = 0;
  std::size_t index_consumed = 0;
};

/// Runs one library generation on a scripted scenario.
inline TraceOutcome run_scenario(const oracle::TraceScenario& s) {
  Population pop;
  pop.n_features = s.n_features;
  for (std::size_t i = 0; i < s.masks.size(); ++i) {
    Individual ind;
    ind.key = i;
    ind.mask = FeatureMask::from_string(s.masks[i]);
    pop.members.push_back(std::move(ind));
  }
  const auto stub = table_oracle(s.aucs);
  evaluate(pop, stub);
  OperatorParams params;
  params.mf = s.mf;
  params.cr = s.cr;
  ScriptedDraws index_draws(s.index_draws);
  ScriptedDraws cross_draws(s.crossover_draws);
  const auto out = evolve_island(pop, stub, 1, params, index_draws, cross_draws);
  TraceOutcome r;
  for (const auto& m : out.members) {
    r.masks.push_back(m.mask.to_string());
    r.fitness.push_back(*m.fitness);
  }
  r.crossover_consumed = cross_draws.consumed();
  r.index_consumed = index_draws.consumed();
  return r;
}

/// Small synthetic train/test pair.
inline PreparedData synthetic_data(std::size_t samples, std::size_t features, std::size_t informative,
                                   std::uint64_t seed, double noise = 0.1) {
  ExperimentConfig cfg;
  cfg.format = DatasetFormat::Synthetic;
  cfg.synthetic.n_samples = samples;
  cfg.synthetic.n_features = features;
  cfg.synthetic.n_informative = informative;
  cfg.synthetic.noise = noise;
  cfg.synthetic.seed = seed;
  cfg.split_seed = seed + 1;
  return prepare_data(cfg);
}

}  // namespace cbde::support
