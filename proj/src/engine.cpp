#include "cbde/engine.hpp"

#include "cbde/rng.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <numeric>
#include <set>
#include <thread>

namespace cbde {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Stream tags for derive_seed.
enum : std::uint64_t { kInitStream = 1, kShardStream = 2, kIslandChaosStream = 3, kRoundStream = 4 };

double open_unit_draw(Rng& rng) {
  double u = 0.0;
  while (u <= 0.0) u = uniform01(rng);
  return u;
}

bool ranks_before(const Individual& a, const Individual& b) {
  if (*a.fitness != *b.fitness) return *a.fitness > *b.fitness;
  const auto ca = a.mask.popcount();
  const auto cb = b.mask.popcount();
  if (ca != cb) return ca < cb;
  return a.key < b.key;
}

class IslandError : public std::runtime_error {
 public:
  IslandError(std::size_t island, const std::string& what)
      : std::runtime_error("island " + std::to_string(island) + ": " + what) {}
};

}  // namespace

std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::BDE:
      return "bde";
    case Variant::CBDE_LM:
      return "cbde-lm";
    case Variant::CBDE_TM:
      return "cbde-tm";
  }
  return "bde";
}

Variant parse_variant(std::string_view name) {
  if (name == "bde") return Variant::BDE;
  if (name == "cbde-lm") return Variant::CBDE_LM;
  if (name == "cbde-tm") return Variant::CBDE_TM;
  throw ConfigError("variant", "unknown variant '" + std::string(name) + "' (expected bde, cbde-lm or cbde-tm)");
}

void EngineConfig::validate() const {
  if (lps < 4) throw ConfigError("lps", "must be at least 4");
  if (lps >= ps) throw ConfigError("lps", "must be smaller than ps");
  if (k_islands < 1) throw ConfigError("k_islands", "must be at least 1");
  if (mMig < 1) throw ConfigError("mMig", "must be at least 1");
  if (mGen < 0) throw ConfigError("mGen", "must be non-negative");
  if (!(mf > 0.0 && mf <= 1.0)) throw ConfigError("MF", "must lie in (0, 1]");
  if (!(cr > 0.0 && cr <= 1.0)) throw ConfigError("CR", "must lie in (0, 1]");
  if (!(lw >= 0.0 && lw <= 4.0)) throw ConfigError("lw", "must lie in [0, 4]");
  if (!(tw >= 0.0 && tw <= 2.0)) throw ConfigError("tw", "must lie in [0, 2]");
  if (!(lr.learning_rate > 0.0)) throw ConfigError("learning_rate", "must be positive");
  if (lr.max_iters < 0) throw ConfigError("max_iters", "must be non-negative");
  if (!(lr.tolerance >= 0.0)) throw ConfigError("tolerance", "must be non-negative");
  if (!(lr.l2 >= 0.0)) throw ConfigError("l2", "must be non-negative");
}

std::optional<ChaosMap> EngineConfig::chaos_map() const {
  switch (variant) {
    case Variant::CBDE_LM:
      return ChaosMap::logistic(lw);
    case Variant::CBDE_TM:
      return ChaosMap::tent(tw);
    case Variant::BDE:
      break;
  }
  return std::nullopt;
}

OperatorParams EngineConfig::operator_params() const {
  OperatorParams p;
  p.mf = mf;
  p.cr = cr;
  p.mode = variant == Variant::BDE ? DrawMode::Random : DrawMode::Chaotic;
  p.binarization = binarization;
  return p;
}

const Individual& RunReport::best() const {
  const auto& m = final_population.members;
  if (m.empty()) throw std::logic_error("report has an empty population");
  return *std::min_element(m.begin(), m.end(), ranks_before);
}

double RunReport::test_auc_of(std::uint64_t key) const {
  for (const auto& t : test_aucs) {
    if (t.key == key) return t.auc;
  }
  throw std::out_of_range("no test AUC for key " + std::to_string(key));
}

Population migrate(const std::vector<Population>& islands, std::size_t ps, bool dedup) {
  std::vector<Individual> pool;
  std::size_t n_features = 0;
  for (const auto& isl : islands) {
    n_features = isl.n_features;
    for (const auto& m : isl.members) {
      if (!m.evaluated()) throw std::logic_error("migration needs evaluated individuals");
      pool.push_back(m);
    }
  }
  if (pool.size() < ps) {
    throw std::invalid_argument("migration pool holds " + std::to_string(pool.size()) + " members, fewer than ps = " +
                                std::to_string(ps));
  }
  std::stable_sort(pool.begin(), pool.end(), ranks_before);

  Population next;
  next.n_features = n_features;
  if (dedup) {
    std::set<FeatureMask> seen;
    std::vector<Individual> repeats;
    for (auto& m : pool) {
      if (next.members.size() == ps) break;
      if (seen.insert(m.mask).second) {
        next.members.push_back(std::move(m));
      } else {
        repeats.push_back(std::move(m));
      }
    }
    // Too few distinct masks: top up with the best repeats.
    for (std::size_t r = 0; next.members.size() < ps; ++r) next.members.push_back(std::move(repeats[r]));
  } else {
    next.members.assign(std::make_move_iterator(pool.begin()),
                        std::make_move_iterator(pool.begin() + static_cast<std::ptrdiff_t>(ps)));
  }
  for (std::size_t i = 0; i < next.members.size(); ++i) next.members[i].key = i;
  return next;
}

std::vector<KeyedAuc> evaluate_test(const Population& pop, const Dataset& test) {
  std::vector<KeyedAuc> out;
  out.reserve(pop.size());
  for (const auto& m : pop.members) {
    if (!m.coef) throw std::invalid_argument("individual " + std::to_string(m.key) + " has no trained model");
    if (static_cast<Index>(m.mask.popcount()) != m.coef->n_features()) {
      throw std::invalid_argument("individual " + std::to_string(m.key) +
                                  ": mask cardinality does not match coefficient count");
    }
    const Dataset reduced = project(test, m.mask);
    out.push_back({m.key, auc(predict_scores(*m.coef, reduced), reduced.labels)});
  }
  return out;
}

RunReport run(const EngineConfig& config, const Dataset& train, const Dataset& test) {
  config.validate();
  validate(train, true);
  validate(test, true);
  if (test.n_features() != train.n_features()) throw DataError("train and test column counts differ");

  const auto t_start = Clock::now();
  const auto n_features = static_cast<std::size_t>(train.n_features());
  const std::size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  const auto chaos_map = config.chaos_map();
  std::atomic<std::size_t> trainings{0};

  auto counted = [&trainings](FitnessOracle inner) -> FitnessOracle {
    return [&trainings, inner = std::move(inner)](const FeatureMask& m) {
      ++trainings;
      return inner(m);
    };
  };

  RunReport report;
  report.config = config;
  report.n_features = n_features;

  // Initial population, evaluated on the whole training set.
  Rng init_rng(derive_seed(config.master_seed, {kInitStream}));
  Population global;
  if (chaos_map) {
    ChaosDraws draws(seed_state(*chaos_map, open_unit_draw(init_rng)));
    global = init_population(config.ps, n_features, draws);
  } else {
    UniformDraws draws(init_rng);
    global = init_population(config.ps, n_features, draws);
  }
  evaluate(global, counted(make_lr_oracle(train, config.lr)));

  const auto shards = shard(train, config.k_islands, derive_seed(config.master_seed, {kShardStream}));

  // One crossover chaos stream per island, carried across rounds.
  std::vector<std::optional<ChaosState>> island_chaos(config.k_islands);
  if (chaos_map) {
    for (std::size_t s = 0; s < config.k_islands; ++s) {
      Rng r(derive_seed(config.master_seed, {kIslandChaosStream, s}));
      island_chaos[s] = seed_state(*chaos_map, open_unit_draw(r));
    }
  }

  for (int round = 0; round < config.mMig; ++round) {
    const auto t_round = Clock::now();
    std::vector<Population> evolved(config.k_islands);
    std::vector<double> island_secs(config.k_islands, 0.0);

    detail::parallel_for(config.k_islands, threads, [&](std::size_t s) {
      const auto t_island = Clock::now();
      try {
        Rng rng(derive_seed(config.master_seed, {kRoundStream, static_cast<std::uint64_t>(round), s}));
        std::vector<std::size_t> picks(config.ps);
        std::iota(picks.begin(), picks.end(), std::size_t{0});
        for (std::size_t i = 0; i < config.lps; ++i) {
          std::swap(picks[i], picks[i + uniform_index(rng, config.ps - i)]);
        }
        Population local;
        local.n_features = n_features;
        for (std::size_t i = 0; i < config.lps; ++i) {
          // Re-evaluated on this island's shard below.
          Individual ind;
          ind.key = global.members[picks[i]].key;
          ind.mask = global.members[picks[i]].mask;
          local.members.push_back(std::move(ind));
        }
        const auto oracle = counted(make_lr_oracle(shards[s].subset, config.lr));
        evaluate(local, oracle);

        OperatorParams params = config.operator_params();
        UniformDraws index_draws(rng);
        if (chaos_map) {
          ChaosDraws chaos(*island_chaos[s]);
          evolved[s] = evolve_island(std::move(local), oracle, config.mGen, params, index_draws, chaos);
          island_chaos[s] = chaos.state();
        } else {
          evolved[s] = evolve_island(std::move(local), oracle, config.mGen, params, index_draws, index_draws);
        }
      } catch (const std::exception& e) {
        throw IslandError(s, e.what());
      }
      island_secs[s] = seconds_since(t_island);
    });

    std::vector<Population> pool;
    pool.reserve(config.k_islands + 1);
    pool.push_back(std::move(global));
    for (auto& p : evolved) pool.push_back(std::move(p));
    global = migrate(pool, config.ps, config.dedup);

    MigrationRecord rec;
    rec.migration_index = round;
    const auto& best = global.members[global.best_index()];
    rec.best_fitness = *best.fitness;
    rec.best_mask = best.mask;
    if (config.keep_snapshots) rec.population_snapshot = global;
    report.migrations.push_back(std::move(rec));
    report.timings.migration_seconds.push_back(seconds_since(t_round));
    report.timings.island_seconds.push_back(std::move(island_secs));
  }

  if (config.retrain_on_full_train) {
    Population refit = global;
    for (auto& m : refit.members) m.invalidate();
    evaluate(refit, counted(make_lr_oracle(train, config.lr)));
    report.test_aucs = evaluate_test(refit, test);
  } else {
    report.test_aucs = evaluate_test(global, test);
  }
  report.final_population = std::move(global);
  report.lr_trainings = trainings.load();
  report.timings.total_seconds = seconds_since(t_start);
  return report;
}

}  // namespace cbde
