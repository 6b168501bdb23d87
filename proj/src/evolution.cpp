#include "cbde/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

namespace cbde {

namespace {

void require_same_length(const FeatureMask& a, const FeatureMask& b) {
  if (a.size() != b.size()) throw std::invalid_argument("feature masks differ in length");
}

// Index into [0, n) \ excluded (excluded sorted ascending, all < n).
std::size_t pick_excluding(double u, std::size_t n, std::vector<std::size_t> excluded) {
  std::sort(excluded.begin(), excluded.end());
  std::size_t idx = index_from_draw(u, n - excluded.size());
  for (const auto e : excluded) {
    if (idx >= e) ++idx;
  }
  return idx;
}

}  // namespace

std::size_t Population::best_index() const {
  if (members.empty()) throw std::logic_error("best of an empty population");
  std::size_t best = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (!members[i].evaluated()) throw std::logic_error("best of a population with unevaluated members");
    if (*members[i].fitness > *members[best].fitness) best = i;
  }
  return best;
}

void check_population(const Population& pop) {
  std::unordered_set<std::uint64_t> keys;
  for (const auto& m : pop.members) {
    if (!keys.insert(m.key).second) throw std::invalid_argument("duplicate key " + std::to_string(m.key));
    if (m.mask.size() != pop.n_features) throw std::invalid_argument("mask length differs from N");
  }
}

void OperatorParams::validate() const {
  if (!(mf > 0.0 && mf <= 1.0)) throw std::invalid_argument("MF must lie in (0, 1]");
  if (!(cr > 0.0 && cr <= 1.0)) throw std::invalid_argument("CR must lie in (0, 1]");
  if (mode == DrawMode::Chaotic && !chaos) throw std::invalid_argument("chaotic mode requires a chaos state");
  if (mode == DrawMode::Random && chaos) throw std::invalid_argument("random mode must not carry a chaos state");
}

double fitness_score(double auc, std::size_t cardinality, std::size_t n_features) {
  if (cardinality < 1 || cardinality > n_features) {
    throw std::invalid_argument("cardinality " + std::to_string(cardinality) + " outside [1, " +
                                std::to_string(n_features) + "]");
  }
  return auc * (1.0 - static_cast<double>(cardinality) / static_cast<double>(n_features));
}

std::vector<FeatureMask> init_masks(std::size_t ps, std::size_t n_features, DrawSource& source) {
  if (n_features < 1) throw std::invalid_argument("N must be at least 1");
  std::vector<FeatureMask> masks;
  masks.reserve(ps);
  for (std::size_t i = 0; i < ps; ++i) {
    FeatureMask m(n_features);
    for (std::size_t j = 0; j < n_features; ++j) m.set(j, source.draw() < 0.5);
    masks.push_back(repair(std::move(m), source));
  }
  return masks;
}

Population init_population(std::size_t ps, std::size_t n_features, DrawSource& source) {
  if (ps < 4) throw std::invalid_argument("population size must be at least 4");
  Population pop;
  pop.n_features = n_features;
  auto masks = init_masks(ps, n_features, source);
  for (std::size_t i = 0; i < ps; ++i) {
    Individual ind;
    ind.key = i;
    ind.mask = std::move(masks[i]);
    pop.members.push_back(std::move(ind));
  }
  return pop;
}

FeatureMask mutate(const FeatureMask& best, const FeatureMask& s1, const FeatureMask& s2, double mf) {
  require_same_length(best, s1);
  require_same_length(best, s2);
  FeatureMask out(best.size());
  for (std::size_t j = 0; j < best.size(); ++j) {
    const double v = best[j] + mf * (static_cast<double>(s1[j]) - static_cast<double>(s2[j]));
    out.set(j, v >= 0.5);
  }
  return out;
}

FeatureMask mutate_sigmoid(const FeatureMask& best, const FeatureMask& s1, const FeatureMask& s2, double mf,
                           DrawSource& draws) {
  require_same_length(best, s1);
  require_same_length(best, s2);
  FeatureMask out(best.size());
  for (std::size_t j = 0; j < best.size(); ++j) {
    const double v = best[j] + mf * (static_cast<double>(s1[j]) - static_cast<double>(s2[j]));
    const double p = 1.0 / (1.0 + std::exp(-10.0 * (v - 0.5)));
    out.set(j, draws.draw() < p);
  }
  return out;
}

FeatureMask crossover(const FeatureMask& parent, const FeatureMask& mutant, double cr, DrawSource& draws,
                      std::size_t forced_index) {
  require_same_length(parent, mutant);
  if (forced_index >= parent.size()) throw std::out_of_range("forced crossover index out of range");
  FeatureMask trial(parent.size());
  for (std::size_t j = 0; j < parent.size(); ++j) {
    const double u = draws.draw();
    trial.set(j, (u < cr || j == forced_index) ? mutant[j] : parent[j]);
  }
  return trial;
}

const Individual& select(const Individual& parent, const Individual& trial) {
  if (!parent.evaluated() || !trial.evaluated()) throw std::logic_error("selection needs evaluated individuals");
  return *parent.fitness > *trial.fitness ? parent : trial;
}

FeatureMask repair(FeatureMask mask, DrawSource& draws) {
  if (mask.size() == 0 || mask.popcount() > 0) return mask;
  mask.set(index_from_draw(draws.draw(), mask.size()));
  return mask;
}

FitnessOracle make_lr_oracle(const Dataset& shard, const TrainConfig& config) {
  return [&shard, config](const FeatureMask& mask) {
    const Dataset reduced = project(shard, mask);
    Evaluation e;
    e.model = train_lr(reduced, config);
    e.auc = auc(predict_scores(e.model, reduced), reduced.labels);
    return e;
  };
}

void evaluate(Population& pop, const FitnessOracle& oracle) {
  for (auto& member : pop.members) {
    if (member.evaluated()) continue;
    if (member.mask.size() != pop.n_features) {
      throw EvaluationError(member.key, "mask length differs from N");
    }
    Evaluation e;
    try {
      e = oracle(member.mask);
    } catch (const std::exception& ex) {
      throw EvaluationError(member.key, ex.what());
    }
    const double f = fitness_score(e.auc, member.mask.popcount(), pop.n_features);
    member.coef = std::move(e.model);
    member.auc = e.auc;
    member.fitness = f;
  }
}

Population evaluate(Population pop, const Dataset& shard, const TrainConfig& config) {
  evaluate(pop, make_lr_oracle(shard, config));
  return pop;
}

Population evolve_island(Population local, const FitnessOracle& oracle, int generations, const OperatorParams& params,
                         DrawSource& index_draws, DrawSource& crossover_draws) {
  const std::size_t n = local.size();
  if (n < 4) throw std::invalid_argument("island population needs at least 4 members");
  if (!(params.mf > 0.0 && params.mf <= 1.0)) throw std::invalid_argument("MF must lie in (0, 1]");
  if (!(params.cr > 0.0 && params.cr <= 1.0)) throw std::invalid_argument("CR must lie in (0, 1]");
  const std::size_t n_features = local.n_features;

  for (int gen = 0; gen < generations; ++gen) {
    const FeatureMask best = local.members[local.best_index()].mask;

    Population offspring;
    offspring.n_features = n_features;
    offspring.members.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t s1 = pick_excluding(index_draws.draw(), n, {i});
      const std::size_t s2 = pick_excluding(index_draws.draw(), n, {i, s1});
      const FeatureMask mutant =
          params.binarization == Binarization::Threshold
              ? mutate(best, local.members[s1].mask, local.members[s2].mask, params.mf)
              : mutate_sigmoid(best, local.members[s1].mask, local.members[s2].mask, params.mf, crossover_draws);
      const std::size_t forced = index_from_draw(index_draws.draw(), n_features);
      Individual child;
      child.key = local.members[i].key;
      child.mask = repair(crossover(local.members[i].mask, mutant, params.cr, crossover_draws, forced), crossover_draws);
      offspring.members.push_back(std::move(child));
    }

    evaluate(offspring, oracle);

    for (std::size_t i = 0; i < n; ++i) {
      if (&select(local.members[i], offspring.members[i]) == &offspring.members[i]) {
        local.members[i] = std::move(offspring.members[i]);
      }
    }
  }
  return local;
}

Population evolve_island(Population local, const Dataset& shard, int generations, OperatorParams& params,
                         const TrainConfig& lr_config, Rng& rng) {
  params.validate();
  const auto oracle = make_lr_oracle(shard, lr_config);
  UniformDraws index_draws(rng);
  if (params.mode == DrawMode::Chaotic) {
    ChaosDraws chaos(*params.chaos);
    auto out = evolve_island(std::move(local), oracle, generations, params, index_draws, chaos);
    params.chaos = chaos.state();
    return out;
  }
  return evolve_island(std::move(local), oracle, generations, params, index_draws, index_draws);
}

}  // namespace cbde
