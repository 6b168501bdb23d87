#include "cbde/experiment.hpp"

#include "cbde/report.hpp"
#include "cbde/rng.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

namespace cbde {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError(key, "'" + value + "' is not a valid number");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(key, "'" + value + "' is not a boolean");
}

std::string real_str(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string_view format_name(DatasetFormat f) {
  switch (f) {
    case DatasetFormat::Csv:
      return "csv";
    case DatasetFormat::Libsvm:
      return "libsvm";
    case DatasetFormat::Synthetic:
      return "synthetic";
  }
  return "synthetic";
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double standard_normal(Rng& rng) {
  double u1 = 0.0;
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failure on " + path.string());
}

// Runs `body`, mapping ConfigError to exit 2 and anything else to exit 1.
int guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["dataset.format"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      if (v == "csv") {
        c.format = DatasetFormat::Csv;
      } else if (v == "libsvm") {
        c.format = DatasetFormat::Libsvm;
      } else if (v == "synthetic") {
        c.format = DatasetFormat::Synthetic;
      } else {
        throw ConfigError(k, "expected csv, libsvm or synthetic");
      }
    };
    t["dataset.path"] = [](ExperimentConfig& c, const std::string&, const std::string& v) { c.dataset_path = v; };
    t["dataset.label"] = [](ExperimentConfig& c, const std::string&, const std::string& v) { c.label_column = v; };
    t["dataset.n_features"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      if (v == "auto") {
        c.libsvm_features.reset();
      } else {
        c.libsvm_features = parse_number<Index>(k, v);
      }
    };
    t["synthetic.n_samples"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.synthetic.n_samples = parse_number<std::size_t>(k, v);
    };
    t["synthetic.n_features"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.synthetic.n_features = parse_number<std::size_t>(k, v);
    };
    t["synthetic.n_informative"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.synthetic.n_informative = parse_number<std::size_t>(k, v);
    };
    t["synthetic.noise"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.synthetic.noise = parse_number<double>(k, v);
    };
    t["synthetic.seed"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.synthetic.seed = parse_number<std::uint64_t>(k, v);
    };
    t["split.test_fraction"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.test_fraction = parse_number<double>(k, v);
    };
    t["split.seed"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.split_seed = parse_number<std::uint64_t>(k, v);
    };
    t["engine.ps"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.engine.ps = parse_number<std::size_t>(k, v);
    };
    t["engine.lps"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.engine.lps = parse_number<std::size_t>(k, v);
    };
    t["engine.k_islands"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.engine.k_islands = parse_number<std::size_t>(k, v);
    };
    t["engine.mMig"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.engine.mMig = parse_number<int>(k, v);
    };
    t["engine.mGen"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.engine.mGen = parse_number<int>(k, v);
    };
    t["engine.MF"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.engine.mf = parse_number<double>(k, v);
    };
    t["engine.CR"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.engine.cr = parse_number<double>(k, v);
    };
    t["engine.variant"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      try {
        c.engine.variant = parse_variant(v);
      } catch (const ConfigError&) {
        throw ConfigError(k, "expected bde, cbde-lm or cbde-tm");
      }
    };
    t["engine.threads"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.engine.threads = v == "auto" ? 0 : parse_number<std::size_t>(k, v);
    };
    t["engine.lw"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.engine.lw = parse_number<double>(k, v);
    };
    t["engine.tw"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.engine.tw = parse_number<double>(k, v);
    };
    t["engine.binarization"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      if (v == "threshold") {
        c.engine.binarization = Binarization::Threshold;
      } else if (v == "sigmoid") {
        c.engine.binarization = Binarization::Sigmoid;
      } else {
        throw ConfigError(k, "expected threshold or sigmoid");
      }
    };
    t["engine.learning_rate"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.engine.lr.learning_rate = parse_number<double>(k, v);
    };
    t["engine.max_iters"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.engine.lr.max_iters = parse_number<int>(k, v);
    };
    t["engine.tolerance"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.engine.lr.tolerance = parse_number<double>(k, v);
    };
    t["engine.l2"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.engine.lr.l2 = parse_number<double>(k, v);
    };
    t["engine.dedup"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.engine.dedup = parse_bool(k, v);
    };
    t["engine.retrain_on_full_train"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.engine.retrain_on_full_train = parse_bool(k, v);
    };
    t["engine.keep_snapshots"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.engine.keep_snapshots = parse_bool(k, v);
    };
    t["battery.n_runs"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.n_runs = parse_number<std::size_t>(k, v);
    };
    t["battery.base_seed"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.base_seed = parse_number<std::uint64_t>(k, v);
    };
    t["battery.parallel_runs"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.parallel_runs = parse_bool(k, v);
    };
    t["output.dir"] = [](ExperimentConfig& c, const std::string&, const std::string& v) { c.output_dir = v; };
    return t;
  }();
  return table;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (n_samples < 4) throw ConfigError("synthetic.n_samples", "must be at least 4");
  if (n_features < 1) throw ConfigError("synthetic.n_features", "must be at least 1");
  if (n_informative < 1 || n_informative > n_features) {
    throw ConfigError("synthetic.n_informative", "must lie in [1, n_features]");
  }
  if (!(noise >= 0.0)) throw ConfigError("synthetic.noise", "must be non-negative");
}

SyntheticData synthesize(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, {0x5e7}));
  const auto n = static_cast<Index>(spec.n_samples);
  const auto p = static_cast<Index>(spec.n_features);

  std::vector<std::size_t> columns(spec.n_features);
  for (std::size_t j = 0; j < columns.size(); ++j) columns[j] = j;
  shuffle(columns, rng);
  std::vector<std::size_t> informative(columns.begin(),
                                       columns.begin() + static_cast<std::ptrdiff_t>(spec.n_informative));
  std::sort(informative.begin(), informative.end());

  Vector weights = Vector::Zero(p);
  for (const auto j : informative) {
    const double magnitude = 0.5 + uniform01(rng);
    weights[static_cast<Index>(j)] = uniform01(rng) < 0.5 ? -magnitude : magnitude;
  }

  SyntheticData out;
  out.informative = informative;
  out.data.features.resize(n, p);
  out.data.labels.resize(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) out.data.features(i, j) = standard_normal(rng);
    const double logit = out.data.features.row(i).dot(weights) + spec.noise * standard_normal(rng);
    out.data.labels[i] = logit > 0.0 ? 1 : 0;
  }
  for (Index j = 0; j < p; ++j) out.data.feature_names.push_back("x" + std::to_string(j));
  return out;
}

void ExperimentConfig::validate() const {
  if (format != DatasetFormat::Synthetic && dataset_path.empty()) {
    throw ConfigError("dataset.path", "required for csv and libsvm datasets");
  }
  if (format == DatasetFormat::Synthetic) synthetic.validate();
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("split.test_fraction", "must lie in (0, 1)");
  try {
    engine.validate();
  } catch (const ConfigError& e) {
    throw ConfigError("engine." + e.field(), std::string(e.what()).substr(e.field().size() + 2));
  }
  if (n_runs < 1) throw ConfigError("battery.n_runs", "must be at least 1");
}

std::map<std::string, std::string> ExperimentConfig::to_map() const {
  std::map<std::string, std::string> m;
  m["dataset.format"] = std::string(format_name(format));
  if (format != DatasetFormat::Synthetic) m["dataset.path"] = dataset_path.string();
  if (format == DatasetFormat::Csv) m["dataset.label"] = label_column;
  if (format == DatasetFormat::Libsvm) {
    m["dataset.n_features"] = libsvm_features ? std::to_string(*libsvm_features) : "auto";
  }
  if (format == DatasetFormat::Synthetic) {
    m["synthetic.n_samples"] = std::to_string(synthetic.n_samples);
    m["synthetic.n_features"] = std::to_string(synthetic.n_features);
    m["synthetic.n_informative"] = std::to_string(synthetic.n_informative);
    m["synthetic.noise"] = real_str(synthetic.noise);
    m["synthetic.seed"] = std::to_string(synthetic.seed);
  }
  m["split.test_fraction"] = real_str(test_fraction);
  m["split.seed"] = std::to_string(split_seed);
  m["engine.ps"] = std::to_string(engine.ps);
  m["engine.lps"] = std::to_string(engine.lps);
  m["engine.k_islands"] = std::to_string(engine.k_islands);
  m["engine.mMig"] = std::to_string(engine.mMig);
  m["engine.mGen"] = std::to_string(engine.mGen);
  m["engine.MF"] = real_str(engine.mf);
  m["engine.CR"] = real_str(engine.cr);
  m["engine.variant"] = std::string(to_string(engine.variant));
  m["engine.threads"] = engine.threads ? std::to_string(engine.threads) : "auto";
  m["engine.lw"] = real_str(engine.lw);
  m["engine.tw"] = real_str(engine.tw);
  m["engine.binarization"] = engine.binarization == Binarization::Threshold ? "threshold" : "sigmoid";
  m["engine.learning_rate"] = real_str(engine.lr.learning_rate);
  m["engine.max_iters"] = std::to_string(engine.lr.max_iters);
  m["engine.tolerance"] = real_str(engine.lr.tolerance);
  m["engine.l2"] = real_str(engine.lr.l2);
  m["engine.dedup"] = engine.dedup ? "true" : "false";
  m["engine.retrain_on_full_train"] = engine.retrain_on_full_train ? "true" : "false";
  m["engine.keep_snapshots"] = engine.keep_snapshots ? "true" : "false";
  m["battery.n_runs"] = std::to_string(n_runs);
  m["battery.base_seed"] = std::to_string(base_seed);
  m["battery.parallel_runs"] = parallel_runs ? "true" : "false";
  m["output.dir"] = output_dir.string();
  return m;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  std::set<std::string> seen;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(key, "unknown key");
    if (!seen.insert(key).second) throw ConfigError(key, "given more than once");
    it->second(c, key, value);
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_config(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [k, v] : config.to_map()) out += k + " = " + v + '\n';
  return out;
}

PreparedData prepare_data(const ExperimentConfig& config) {
  Dataset raw;
  PreparedData out;
  out.provenance["dataset.format"] = std::string(format_name(config.format));
  switch (config.format) {
    case DatasetFormat::Csv: {
      const std::string bytes = read_bytes(config.dataset_path);
      LabelColumn label = config.label_column;
      if (!config.label_column.empty() && config.label_column.front() == '#') {
        label = parse_number<std::size_t>("dataset.label", config.label_column.substr(1));
      }
      raw = parse_csv(bytes, label);
      out.provenance["dataset.path"] = config.dataset_path.string();
      out.provenance["dataset.hash"] = fnv1a_hex(bytes);
      break;
    }
    case DatasetFormat::Libsvm: {
      const std::string bytes = read_bytes(config.dataset_path);
      raw = parse_libsvm(bytes, config.libsvm_features);
      out.provenance["dataset.path"] = config.dataset_path.string();
      out.provenance["dataset.hash"] = fnv1a_hex(bytes);
      break;
    }
    case DatasetFormat::Synthetic: {
      raw = synthesize(config.synthetic).data;
      out.provenance["dataset.hash"] = fnv1a_hex(format_csv(raw));
      break;
    }
  }
  out.provenance["dataset.rows"] = std::to_string(raw.rows());
  out.provenance["dataset.n_features"] = std::to_string(raw.n_features());
  auto split = stratified_split(raw, config.test_fraction, config.split_seed);
  auto standardized = standardize(split.train, split.test);
  out.train = std::move(standardized.train);
  out.test = std::move(standardized.test);
  return out;
}

std::vector<RunReport> run_battery(const ExperimentConfig& config, const PreparedData& data) {
  std::vector<RunReport> reports(config.n_runs);
  const std::size_t budget =
      config.engine.threads ? config.engine.threads : std::max(1u, std::thread::hardware_concurrency());
  auto one_run = [&](std::size_t r, std::size_t engine_threads) {
    EngineConfig ec = config.engine;
    ec.master_seed = config.base_seed + r;
    ec.threads = engine_threads;
    try {
      reports[r] = run(ec, data.train, data.test);
    } catch (const std::exception& e) {
      throw std::runtime_error("run " + std::to_string(r) + ": " + e.what());
    }
    reports[r].provenance = data.provenance;
    reports[r].provenance["run_index"] = std::to_string(r);
    ExperimentConfig echo = config;
    echo.base_seed = ec.master_seed;
    echo.n_runs = 1;
    reports[r].experiment = echo.to_map();
  };
  if (config.parallel_runs) {
    detail::parallel_for(config.n_runs, budget, [&](std::size_t r) { one_run(r, 1); });
  } else {
    for (std::size_t r = 0; r < config.n_runs; ++r) one_run(r, budget);
  }
  return reports;
}

int cmd_run(const ExperimentConfig& config) {
  return guarded([&] {
    config.validate();
    const auto data = prepare_data(config);
    const auto reports = run_battery(config, data);
    std::filesystem::create_directories(config.output_dir);
    for (std::size_t r = 0; r < reports.size(); ++r) {
      char name[32];
      std::snprintf(name, sizeof name, "run_%03zu.json", r);
      write_report(reports[r], config.output_dir / name);
    }
    const auto summary = summarize(reports);
    write_text(config.output_dir / "summary.json", to_json(summary).dump(2) + '\n');
    write_text(config.output_dir / "summary.csv", comparison_csv(std::span(&summary, 1), {}));
  });
}

std::vector<RunReport> read_battery(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.starts_with("run_") && name.ends_with(".json")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no run_*.json reports in " + dir.string());
  std::vector<RunReport> runs;
  for (const auto& f : files) runs.push_back(read_report(f));
  return runs;
}

int cmd_compare(const std::vector<std::filesystem::path>& report_dirs, const std::filesystem::path& out_dir) {
  return guarded([&] {
    if (report_dirs.empty()) throw std::runtime_error("compare needs at least one report directory");
    std::vector<BatterySummary> summaries;
    std::optional<std::string> dataset;
    for (const auto& dir : report_dirs) {
      const auto runs = read_battery(dir);
      for (const auto& r : runs) {
        const auto it = r.provenance.find("dataset.hash");
        const std::string hash = it == r.provenance.end() ? "" : it->second;
        if (!dataset) dataset = hash;
        if (*dataset != hash) throw std::runtime_error("batteries were run on different datasets");
      }
      summaries.push_back(summarize(runs));
      if (summaries.front().runs != summaries.back().runs) {
        throw std::runtime_error("batteries differ in run count");
      }
    }
    std::vector<Comparison> comparisons;
    for (std::size_t i = 0; i < summaries.size(); ++i) {
      for (std::size_t j = i + 1; j < summaries.size(); ++j) {
        comparisons.push_back(compare_batteries(summaries[i], summaries[j]));
      }
    }
    std::filesystem::create_directories(out_dir);
    write_text(out_dir / "comparison.csv", comparison_csv(summaries, comparisons));
    write_text(out_dir / "comparison.json", comparison_json(summaries, comparisons).dump(2) + '\n');
  });
}

std::vector<BenchRow> bench(const ExperimentConfig& config, const std::vector<std::size_t>& thread_counts) {
  if (std::find(thread_counts.begin(), thread_counts.end(), std::size_t{1}) == thread_counts.end()) {
    throw ConfigError("threads", "bench thread counts must include 1");
  }
  const auto data = prepare_data(config);
  std::map<std::size_t, std::pair<double, std::vector<nlohmann::json>>> results;
  for (const auto t : thread_counts) {
    if (results.contains(t)) continue;
    ExperimentConfig c = config;
    c.engine.threads = t;
    c.parallel_runs = false;
    const auto t0 = std::chrono::steady_clock::now();
    const auto reports = run_battery(c, data);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::vector<nlohmann::json> stripped;
    for (const auto& r : reports) stripped.push_back(without_timings(to_json(r)));
    results[t] = {secs, std::move(stripped)};
  }
  std::vector<BenchRow> rows;
  const auto& [seq_secs, seq_json] = results.at(1);
  for (const auto t : thread_counts) {
    const auto& [secs, js] = results.at(t);
    // Config echoes differ only in engine.threads; compare everything else.
    bool same = js.size() == seq_json.size();
    for (std::size_t i = 0; same && i < js.size(); ++i) {
      auto a = js[i];
      auto b = seq_json[i];
      a["experiment"].erase("engine.threads");
      b["experiment"].erase("engine.threads");
      same = a == b;
    }
    rows.push_back({t, secs, speedup(seq_secs, secs), same});
  }
  return rows;
}

int cmd_bench(const ExperimentConfig& config, const std::vector<std::size_t>& thread_counts) {
  return guarded([&] {
    config.validate();
    const auto rows = bench(config, thread_counts);
    std::string csv = "threads,seconds,speedup,speedup_2dp,identical\n";
    for (const auto& r : rows) {
      csv += std::to_string(r.threads) + ',' + real_str(r.seconds) + ',' + real_str(r.speedup) + ',' +
             format_speedup(r.speedup) + ',' +
             (r.identical ? "true" : "false") + '\n';
    }
    std::filesystem::create_directories(config.output_dir);
    write_text(config.output_dir / "speedup.csv", csv);
    std::cout << csv;
  });
}

int cmd_synth(const SyntheticSpec& spec, const std::filesystem::path& out_path) {
  return guarded([&] {
    const auto s = synthesize(spec);
    if (out_path.has_parent_path()) std::filesystem::create_directories(out_path.parent_path());
    write_csv(s.data, out_path, "label");
    std::string sidecar;
    for (const auto j : s.informative) sidecar += std::to_string(j) + '\n';
    write_text(out_path.string() + ".informative", sidecar);
  });
}

}  // namespace cbde
