#pragma once

#include "cbde/chaos.hpp"
#include "cbde/classifier.hpp"
#include "cbde/dataset.hpp"
#include "cbde/draws.hpp"
#include "cbde/mask.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cbde {

/// One candidate subset plus the outcome of its train-and-update phase.
/// coef, auc and fitness are set together or not at all.
struct Individual {
  std::uint64_t key = 0;
  FeatureMask mask;
  std::optional<LRModel> coef;
  std::optional<double> auc;
  std::optional<double> fitness;

  bool evaluated() const noexcept { return fitness.has_value(); }
  void invalidate() noexcept {
    coef.reset();
    auc.reset();
    fitness.reset();
  }
};

struct Population {
  std::vector<Individual> members;
  std::size_t n_features = 0;

  std::size_t size() const noexcept { return members.size(); }
  /// Position of the highest-fitness member (first on ties). Requires an
  /// evaluated, nonempty population.
  std::size_t best_index() const;
  double best_fitness() const { return *members[best_index()].fitness; }
};

/// Throws std::invalid_argument on duplicate keys or mismatched mask lengths.
void check_population(const Population& pop);

enum class DrawMode { Random, Chaotic };

/// How the real-valued mutant becomes a bit vector.
enum class Binarization {
  Threshold,  // bit = 1 iff v >= 0.5
  Sigmoid,    // bit = 1 iff draw < 1 / (1 + exp(-10 (v - 0.5)))
};

struct OperatorParams {
  double mf = 0.2;
  double cr = 0.9;
  DrawMode mode = DrawMode::Random;
  std::optional<ChaosState> chaos;  // required in chaotic mode, forbidden otherwise
  Binarization binarization = Binarization::Threshold;

  void validate() const;
};

/// Multiplicative objective: auc * (1 - cardinality / N).
double fitness_score(double auc, std::size_t cardinality, std::size_t n_features);

/// ps masks of length N, bit set iff the next draw is < 0.5, individual-major.
/// An all-zero mask is repaired right after its N draws using the same source.
std::vector<FeatureMask> init_masks(std::size_t ps, std::size_t n_features, DrawSource& source);

/// Unevaluated population with keys 0..ps-1. Requires ps >= 4.
Population init_population(std::size_t ps, std::size_t n_features, DrawSource& source);

/// DE/best/1 mutation v = best + MF (s1 - s2), binarized at 0.5.
FeatureMask mutate(const FeatureMask& best, const FeatureMask& s1, const FeatureMask& s2, double mf);

/// Same mutant vector, binarized stochastically through a steep sigmoid; one
/// draw per bit.
FeatureMask mutate_sigmoid(const FeatureMask& best, const FeatureMask& s1, const FeatureMask& s2, double mf,
                           DrawSource& draws);

/// Binomial crossover: bit j comes from the mutant when draw_j < CR or
/// j == forced_index. Always consumes exactly N draws.
FeatureMask crossover(const FeatureMask& parent, const FeatureMask& mutant, double cr, DrawSource& draws,
                      std::size_t forced_index);

/// Parent survives only when strictly fitter; ties go to the trial.
const Individual& select(const Individual& parent, const Individual& trial);

/// Nonempty masks pass through untouched (no draw consumed); an empty mask
/// gets bit floor(draw * N) set.
FeatureMask repair(FeatureMask mask, DrawSource& draws);

/// Outcome of one train-and-update call.
struct Evaluation {
  LRModel model;
  double auc = 0.0;
};

/// Maps a nonempty mask to its trained model and AUC.
using FitnessOracle = std::function<Evaluation(const FeatureMask&)>;

/// Projects `shard`, trains LR, and scores AUC on the same rows. The shard is
/// captured by reference and must outlive the oracle.
FitnessOracle make_lr_oracle(const Dataset& shard, const TrainConfig& config);

/// Raised when an individual's train-and-update fails.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(std::uint64_t key, const std::string& what)
      : std::runtime_error("individual " + std::to_string(key) + ": " + what), key_(key) {}
  std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
};

/// Train-and-update phase over every unevaluated member.
void evaluate(Population& pop, const FitnessOracle& oracle);
Population evaluate(Population pop, const Dataset& shard, const TrainConfig& config);

/// Runs mGen DE/best/1/bin generations. `index_draws` picks s1, s2 and the
/// forced crossover index; `crossover_draws` feeds crossover, sigmoid
/// binarization and repair.
Population evolve_island(Population local, const FitnessOracle& oracle, int generations, const OperatorParams& params,
                         DrawSource& index_draws, DrawSource& crossover_draws);

/// Convenience form: index draws come from `rng`; crossover draws come from
/// `rng` in random mode or from params.chaos in chaotic mode, in which case
/// params.chaos is advanced past every consumed value.
Population evolve_island(Population local, const Dataset& shard, int generations, OperatorParams& params,
                         const TrainConfig& lr_config, Rng& rng);

}  // namespace cbde
