#include "cbde/report.hpp"

#include <fstream>

namespace cbde {

using nlohmann::json;

namespace {

std::string_view to_string(Binarization b) {
  return b == Binarization::Threshold ? "threshold" : "sigmoid";
}

Binarization parse_binarization(const std::string& s) {
  if (s == "threshold") return Binarization::Threshold;
  if (s == "sigmoid") return Binarization::Sigmoid;
  throw ConfigError("binarization", "unknown binarization '" + s + "'");
}

json member_json(const Individual& m, std::optional<double> test_auc) {
  json j{{"key", m.key}, {"mask", m.mask.to_hex()}, {"popcount", m.mask.popcount()}};
  j["fitness"] = m.fitness ? json(*m.fitness) : json(nullptr);
  j["train_auc"] = m.auc ? json(*m.auc) : json(nullptr);
  if (test_auc) j["test_auc"] = *test_auc;
  if (m.coef) {
    j["intercept"] = m.coef->intercept;
    j["coefficients"] = std::vector<double>(m.coef->coefficients.begin(), m.coef->coefficients.end());
  }
  return j;
}

Individual member_from_json(const json& j, std::size_t n, const TrainConfig& lr) {
  Individual m;
  m.key = j.at("key").get<std::uint64_t>();
  m.mask = FeatureMask::from_hex(j.at("mask").get<std::string>(), n);
  if (!j.at("fitness").is_null()) m.fitness = j.at("fitness").get<double>();
  if (!j.at("train_auc").is_null()) m.auc = j.at("train_auc").get<double>();
  if (j.contains("coefficients")) {
    LRModel model;
    const auto c = j.at("coefficients").get<std::vector<double>>();
    model.coefficients = Eigen::Map<const Vector>(c.data(), static_cast<Index>(c.size()));
    model.intercept = j.at("intercept").get<double>();
    model.config = lr;
    m.coef = std::move(model);
  }
  return m;
}

}  // namespace

json to_json(const EngineConfig& c) {
  return json{{"ps", c.ps},
              {"lps", c.lps},
              {"k_islands", c.k_islands},
              {"mMig", c.mMig},
              {"mGen", c.mGen},
              {"MF", c.mf},
              {"CR", c.cr},
              {"variant", std::string(to_string(c.variant))},
              {"master_seed", c.master_seed},
              {"lw", c.lw},
              {"tw", c.tw},
              {"binarization", std::string(to_string(c.binarization))},
              {"learning_rate", c.lr.learning_rate},
              {"max_iters", c.lr.max_iters},
              {"tolerance", c.lr.tolerance},
              {"l2", c.lr.l2},
              {"dedup", c.dedup},
              {"retrain_on_full_train", c.retrain_on_full_train},
              {"keep_snapshots", c.keep_snapshots}};
}

EngineConfig engine_config_from_json(const json& j) {
  EngineConfig c;
  c.ps = j.at("ps").get<std::size_t>();
  c.lps = j.at("lps").get<std::size_t>();
  c.k_islands = j.at("k_islands").get<std::size_t>();
  c.mMig = j.at("mMig").get<int>();
  c.mGen = j.at("mGen").get<int>();
  c.mf = j.at("MF").get<double>();
  c.cr = j.at("CR").get<double>();
  c.variant = parse_variant(j.at("variant").get<std::string>());
  c.master_seed = j.at("master_seed").get<std::uint64_t>();
  c.lw = j.at("lw").get<double>();
  c.tw = j.at("tw").get<double>();
  c.binarization = parse_binarization(j.at("binarization").get<std::string>());
  c.lr.learning_rate = j.at("learning_rate").get<double>();
  c.lr.max_iters = j.at("max_iters").get<int>();
  c.lr.tolerance = j.at("tolerance").get<double>();
  c.lr.l2 = j.at("l2").get<double>();
  c.dedup = j.at("dedup").get<bool>();
  c.retrain_on_full_train = j.at("retrain_on_full_train").get<bool>();
  c.keep_snapshots = j.at("keep_snapshots").get<bool>();
  return c;
}

json to_json(const RunReport& r) {
  json j;
  j["config"] = to_json(r.config);
  j["n_features"] = r.n_features;
  j["provenance"] = r.provenance;
  j["experiment"] = r.experiment;

  json migrations = json::array();
  for (const auto& m : r.migrations) {
    json mj{{"index", m.migration_index},
            {"best_fitness", m.best_fitness},
            {"best_mask", m.best_mask.to_hex()},
            {"best_popcount", m.best_mask.popcount()}};
    if (m.population_snapshot) {
      json snap = json::array();
      for (const auto& ind : m.population_snapshot->members) snap.push_back(member_json(ind, std::nullopt));
      mj["population_snapshot"] = std::move(snap);
    }
    migrations.push_back(std::move(mj));
  }
  j["migrations"] = std::move(migrations);

  json pop = json::array();
  for (std::size_t i = 0; i < r.final_population.members.size(); ++i) {
    const auto& m = r.final_population.members[i];
    pop.push_back(member_json(m, i < r.test_aucs.size() ? std::optional(r.test_aucs[i].auc) : std::nullopt));
  }
  j["final_population"] = std::move(pop);
  j["lr_trainings"] = r.lr_trainings;
  j["timings"] = json{{"total_seconds", r.timings.total_seconds},
                      {"migration_seconds", r.timings.migration_seconds},
                      {"island_seconds", r.timings.island_seconds}};
  return j;
}

RunReport report_from_json(const json& j) {
  RunReport r;
  r.config = engine_config_from_json(j.at("config"));
  r.n_features = j.at("n_features").get<std::size_t>();
  r.provenance = j.at("provenance").get<std::map<std::string, std::string>>();
  if (j.contains("experiment")) r.experiment = j.at("experiment").get<std::map<std::string, std::string>>();
  for (const auto& mj : j.at("migrations")) {
    MigrationRecord m;
    m.migration_index = mj.at("index").get<int>();
    m.best_fitness = mj.at("best_fitness").get<double>();
    m.best_mask = FeatureMask::from_hex(mj.at("best_mask").get<std::string>(), r.n_features);
    if (mj.contains("population_snapshot")) {
      Population snap;
      snap.n_features = r.n_features;
      for (const auto& ij : mj.at("population_snapshot")) {
        snap.members.push_back(member_from_json(ij, r.n_features, r.config.lr));
      }
      m.population_snapshot = std::move(snap);
    }
    r.migrations.push_back(std::move(m));
  }
  r.final_population.n_features = r.n_features;
  for (const auto& ij : j.at("final_population")) {
    auto m = member_from_json(ij, r.n_features, r.config.lr);
    if (ij.contains("test_auc")) r.test_aucs.push_back({m.key, ij.at("test_auc").get<double>()});
    r.final_population.members.push_back(std::move(m));
  }
  r.lr_trainings = j.at("lr_trainings").get<std::size_t>();
  const auto& t = j.at("timings");
  r.timings.total_seconds = t.at("total_seconds").get<double>();
  r.timings.migration_seconds = t.at("migration_seconds").get<std::vector<double>>();
  r.timings.island_seconds = t.at("island_seconds").get<std::vector<std::vector<double>>>();
  return r;
}

json without_timings(json report) {
  report.erase("timings");
  return report;
}

void write_report(const RunReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(report).dump(2) << '\n';
  if (!out) throw std::runtime_error("write failure on " + path.string());
}

RunReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return report_from_json(json::parse(in));
}

}  // namespace cbde
