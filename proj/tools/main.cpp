// Command-line harness: dataset generation, training, evaluation, variant
// comparison, sensitivity sweeps, premise verification, and filter/basis dumps.
// Exit codes: 0 ok, 2 config error, 3 data error, 4 numerical divergence.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "hwgnn/checkpoint.hpp"
#include "hwgnn/io.hpp"
#include "hwgnn/metrics.hpp"
#include "hwgnn/rng.hpp"
#include "hwgnn/spectral.hpp"
#include "hwgnn/synth.hpp"
#include "hwgnn/train.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace hwgnn;

namespace {

struct RunConfig {
  TrainConfig train;
  std::string precision = "f64";
  std::string edges, features, labels;
  std::string out_dir = "run";
};

json config_to_json(const RunConfig& c) {
  json j;
  j["basis"] = to_string(c.train.model.basis);
  j["S"] = c.train.model.window_count;
  j["K"] = c.train.model.order;
  j["blocks"] = c.train.model.blocks;
  j["hidden"] = c.train.model.hidden;
  j["mlp_hidden"] = c.train.model.mlp_hidden;
  j["lambda_f"] = c.train.model.lambda_f;
  j["alpha"] = c.train.model.alpha;
  j["gamma"] = c.train.model.gamma;
  j["variant"] = to_string(c.train.model.variant);
  j["homophily_aware"] = c.train.model.homophily_aware;
  j["activation"] = to_string(c.train.model.activation);
  j["coeff_mode"] = to_string(c.train.model.coeff_mode);
  j["sigma_init"] = c.train.model.sigma_init;
  j["clip_scale"] = c.train.model.clip_scale;
  j["lr"] = c.train.lr;
  j["weight_decay"] = c.train.weight_decay;
  j["filter_lr_scale"] = c.train.filter_lr_scale;
  j["max_epochs"] = c.train.max_epochs;
  j["patience"] = c.train.patience;
  j["seed"] = c.train.seed;
  j["precision"] = c.precision;
  j["edges"] = c.edges;
  j["features"] = c.features;
  j["labels"] = c.labels;
  j["out_dir"] = c.out_dir;
  return j;
}

void apply_config_json(RunConfig& c, const json& j) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    try {
      if (key == "basis")
        c.train.model.basis = basis_kind_from_string(it->get<std::string>());
      else if (key == "S")
        c.train.model.window_count = it->get<int>();
      else if (key == "K")
        c.train.model.order = it->get<int>();
      else if (key == "blocks")
        c.train.model.blocks = it->get<int>();
      else if (key == "hidden")
        c.train.model.hidden = it->get<int>();
      else if (key == "mlp_hidden")
        c.train.model.mlp_hidden = it->get<int>();
      else if (key == "lambda_f")
        c.train.model.lambda_f = it->get<double>();
      else if (key == "alpha")
        c.train.model.alpha = it->get<double>();
      else if (key == "gamma")
        c.train.model.gamma = it->get<double>();
      else if (key == "variant")
        c.train.model.variant = variant_from_string(it->get<std::string>());
      else if (key == "homophily_aware")
        c.train.model.homophily_aware = it->get<bool>();
      else if (key == "activation")
        c.train.model.activation = activation_from_string(it->get<std::string>());
      else if (key == "coeff_mode")
        c.train.model.coeff_mode = coeff_mode_from_string(it->get<std::string>());
      else if (key == "sigma_init")
        c.train.model.sigma_init = it->get<double>();
      else if (key == "clip_scale")
        c.train.model.clip_scale = it->get<double>();
      else if (key == "lr")
        c.train.lr = it->get<double>();
      else if (key == "weight_decay")
        c.train.weight_decay = it->get<double>();
      else if (key == "filter_lr_scale")
        c.train.filter_lr_scale = it->get<double>();
      else if (key == "max_epochs")
        c.train.max_epochs = it->get<int>();
      else if (key == "patience")
        c.train.patience = it->get<int>();
      else if (key == "seed")
        c.train.seed = it->get<std::uint64_t>();
      else if (key == "precision")
        c.precision = it->get<std::string>();
      else if (key == "edges")
        c.edges = it->get<std::string>();
      else if (key == "features")
        c.features = it->get<std::string>();
      else if (key == "labels")
        c.labels = it->get<std::string>();
      else if (key == "out_dir")
        c.out_dir = it->get<std::string>();
      else
        throw ConfigError("unknown config key: " + key);
    } catch (const json::exception& e) {
      throw ConfigError("bad value for config key `" + key + "`: " + e.what());
    }
  }
  if (c.precision != "f64" && c.precision != "f32")
    throw ConfigError("precision must be f64 or f32");
}

json load_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot write: " + path);
  os << content;
  if (!os) throw DataError("write failed: " + path);
}

// Attaches the shared config/override options of the training-like
// subcommands; returns a callback that assembles the final RunConfig.
std::function<RunConfig()> add_config_options(CLI::App* cmd) {
  auto config_path = std::make_shared<std::string>();
  auto overrides = std::make_shared<std::vector<std::pair<std::string, std::string>>>();
  cmd->add_option("--config", *config_path, "JSON config file (flat keys)");

  auto track = [overrides](const std::string& key) {
    return [overrides, key](const std::string& value) {
      overrides->emplace_back(key, value);
    };
  };
  // every key is reachable as --some_key or --some-key
  auto names = [](const std::string& key) {
    std::string hyphen = key;
    for (char& c : hyphen)
      if (c == '_') c = '-';
    return hyphen == key ? "--" + key : "--" + key + ",--" + hyphen;
  };
  for (const char* key : {"basis", "variant", "activation", "coeff_mode", "precision", "edges",
                          "features", "labels", "out_dir"})
    cmd->add_option_function<std::string>(names(key), track(key));
  for (const char* key : {"S", "K", "blocks", "hidden", "mlp_hidden", "max_epochs", "patience"})
    cmd->add_option_function<std::string>(names(key), track(key))->check(CLI::Number);
  for (const char* key : {"lambda_f", "alpha", "gamma", "lr", "weight_decay", "sigma_init",
                          "filter_lr_scale", "clip_scale"})
    cmd->add_option_function<std::string>(names(key), track(key))->check(CLI::Number);
  cmd->add_option_function<std::string>("--seed", track("seed"))->check(CLI::Number);
  cmd->add_option_function<std::string>(names("homophily_aware"), track("homophily_aware"));

  return [config_path, overrides] {
    RunConfig cfg;
    if (!config_path->empty()) apply_config_json(cfg, load_json_file(*config_path));
    for (const auto& [key, value] : *overrides) {
      json j;
      // numbers/bools arrive as strings from the command line
      try {
        j[key] = json::parse(value);
      } catch (const json::exception&) {
        j[key] = value;
      }
      apply_config_json(cfg, j);
    }
    cfg.train.model.validate();
    return cfg;
  };
}

Graph load_configured_graph(const RunConfig& cfg) {
  if (cfg.edges.empty() || cfg.features.empty() || cfg.labels.empty())
    throw ConfigError("edges/features/labels paths are required");
  return load_graph(cfg.edges, cfg.features, cfg.labels);
}

json metrics_to_json(const RunConfig& cfg, const MetricsReport& m, int best_epoch) {
  json j;
  j["config"] = config_to_json(cfg);
  j["seed"] = cfg.train.seed;
  j["best_epoch"] = best_epoch;
  j["accuracy"] = m.accuracy;
  j["macro_f1"] = m.macro_f1;
  j["per_class"] = json::array();
  for (int c = 0; c < 2; ++c)
    j["per_class"].push_back({{"precision", m.per_class[c].precision},
                              {"recall", m.per_class[c].recall},
                              {"f1", m.per_class[c].f1}});
  j["confusion"] = {{m.confusion[0][0], m.confusion[0][1]},
                    {m.confusion[1][0], m.confusion[1][1]}};
  j["wall_clock_s"] = m.wall_clock_s;
  return j;
}

json banks_to_json(const std::vector<WindowBank>& banks) {
  json out = json::array();
  for (const auto& bank : banks) {
    json b;
    b["omega"] = json::array();
    b["sigma"] = json::array();
    for (const auto& w : bank.windows) {
      b["omega"].push_back(w.omega);
      b["sigma"].push_back(w.sigma);
    }
    b["weights"] = std::vector<double>(bank.weights.data(), bank.weights.data() + bank.weights.size());
    b["mass"] = std::vector<double>(bank.mass.data(), bank.mass.data() + bank.mass.size());
    json coeffs = json::array();
    for (int s = 0; s < bank.coeffs.rows(); ++s)
      coeffs.push_back(std::vector<double>(bank.coeffs.row(s).data(),
                                           bank.coeffs.row(s).data() + bank.coeffs.cols()));
    b["coeffs"] = coeffs;
    out.push_back(b);
  }
  return out;
}

std::string curve_csv(const std::vector<EpochStats>& curve) {
  std::string out = "epoch,train_loss,val_loss,train_f1,val_f1\n";
  char buf[160];
  for (const auto& st : curve) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", st.epoch, st.train_loss,
                  st.val_loss, st.train_f1, st.val_f1);
    out += buf;
  }
  return out;
}

struct RunOutput {
  TrainResult run;
  std::vector<std::pair<std::string, Mat>> params;
};

RunOutput run_training(const Graph& g, const RunConfig& cfg) {
  if (cfg.precision == "f32") {
    auto trained = train_model<float>(g, cfg.train);
    return RunOutput{trained.run, export_params(trained.model.params())};
  }
  auto trained = train_model<double>(g, cfg.train);
  return RunOutput{trained.run, export_params(trained.model.params())};
}

void write_run_outputs(const RunConfig& cfg, const RunOutput& out) {
  fs::create_directories(cfg.out_dir);
  save_checkpoint((fs::path(cfg.out_dir) / "checkpoint.bin").string(), out.params);

  json manifest;
  manifest["config"] = config_to_json(cfg);
  manifest["h"] = out.run.homophily;
  manifest["omega_bar"] = out.run.omega_bar;
  manifest["best_epoch"] = out.run.best_epoch;
  manifest["epochs_run"] = out.run.curve.size();
  manifest["omega_hat"] = out.run.omega_hat;
  manifest["center_deviation"] = out.run.center_deviation;
  manifest["banks"] = banks_to_json(out.run.banks);
  manifest["metrics"] = {{"accuracy", out.run.test.accuracy},
                         {"macro_f1", out.run.test.macro_f1},
                         {"wall_clock_s", out.run.wall_clock_s}};
  manifest["checkpoint"] = "checkpoint.bin";
  write_text_file((fs::path(cfg.out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");

  write_text_file((fs::path(cfg.out_dir) / "metrics.json").string(),
                  metrics_to_json(cfg, out.run.test, out.run.best_epoch).dump(2) + "\n");
  write_text_file((fs::path(cfg.out_dir) / "curve.csv").string(), curve_csv(out.run.curve));
}

// ---- subcommand implementations ----

int cmd_gen(const SBMSpec& spec, const std::string& out_prefix, bool text_features) {
  Graph g = generate_sbm(spec);
  fs::path p(out_prefix);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  save_graph(out_prefix, g, text_features);
  double h = homophily_ratio(g);
  std::printf("generated n=%d |E|=%zu homophily=%.4f -> %s.{edges.txt,features.%s,labels.txt}\n",
              g.n, g.edges.size(), h, out_prefix.c_str(), text_features ? "csv" : "bin");
  return 0;
}

int cmd_train(const RunConfig& cfg) {
  Graph g = load_configured_graph(cfg);
  RunOutput out = run_training(g, cfg);
  write_run_outputs(cfg, out);
  std::printf("train done: best_epoch=%d val peak at %.4f test macro_f1=%.4f acc=%.4f (%.1fs)\n",
              out.run.best_epoch,
              out.run.curve[static_cast<size_t>(out.run.best_epoch)].val_f1,
              out.run.test.macro_f1, out.run.test.accuracy, out.run.wall_clock_s);
  return 0;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& manifest_path,
             const std::string& edges, const std::string& features, const std::string& labels,
             const std::string& mask_name, const std::string& out_path) {
  json manifest = load_json_file(manifest_path);
  RunConfig cfg;
  apply_config_json(cfg, manifest.at("config"));
  cfg.edges = edges.empty() ? cfg.edges : edges;
  cfg.features = features.empty() ? cfg.features : features;
  cfg.labels = labels.empty() ? cfg.labels : labels;
  Graph g = load_configured_graph(cfg);
  double h = manifest.at("h").get<double>();

  HWModel<double> model(cfg.train.model, g.feature_dim(), split_seed(cfg.train.seed, "init"));
  import_params(model.params(), load_checkpoint(checkpoint_path));
  auto t0 = std::chrono::steady_clock::now();
  Mat probs = model.predict(build_laplacian(g), g.features, h);
  const std::vector<int>* mask = &g.test_mask;
  if (mask_name == "train") mask = &g.train_mask;
  else if (mask_name == "val") mask = &g.val_mask;
  else if (mask_name != "test") throw ConfigError("mask must be train/val/test");
  MetricsReport m = compute_metrics(probs, g.labels, *mask);
  m.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_text_file(out_path, metrics_to_json(cfg, m, manifest.at("best_epoch").get<int>()).dump(2) + "\n");
  std::printf("eval %s: macro_f1=%.4f acc=%.4f\n", mask_name.c_str(), m.macro_f1, m.accuracy);
  return 0;
}

// Variant token: <basis>:<windowed|plain|nohom>
RunConfig variant_config(RunConfig base, const std::string& token) {
  auto colon = token.find(':');
  if (colon == std::string::npos) throw ConfigError("variant must look like basis:mode, got " + token);
  base.train.model.basis = basis_kind_from_string(token.substr(0, colon));
  std::string mode = token.substr(colon + 1);
  if (mode == "windowed") {
    base.train.model.variant = Variant::windowed;
  } else if (mode == "plain") {
    base.train.model.variant = Variant::plain;
  } else if (mode == "nohom") {
    base.train.model.variant = Variant::windowed;
    base.train.model.homophily_aware = false;
    base.train.model.lambda_f = 0.0;
  } else {
    throw ConfigError("unknown variant mode: " + mode);
  }
  return base;
}

int cmd_compare(const RunConfig& base, const std::vector<std::string>& variants, int seeds,
                const std::string& out_path) {
  Graph g = load_configured_graph(base);
  std::string csv = "variant,seed,macro_f1,accuracy,best_epoch\n";
  std::printf("%-22s %10s %10s\n", "variant", "median_f1", "median_acc");
  std::vector<std::pair<std::string, double>> medians;
  for (const auto& token : variants) {
    std::vector<double> f1s, accs;
    for (int s = 0; s < seeds; ++s) {
      RunConfig cfg = variant_config(base, token);
      cfg.train.seed = split_seed(base.train.seed, "compare:" + token, static_cast<std::uint64_t>(s));
      RunOutput out = run_training(g, cfg);
      f1s.push_back(out.run.test.macro_f1);
      accs.push_back(out.run.test.accuracy);
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s,%d,%.6f,%.6f,%d\n", token.c_str(), s,
                    out.run.test.macro_f1, out.run.test.accuracy, out.run.best_epoch);
      csv += buf;
    }
    auto med = [](std::vector<double> v) {
      std::sort(v.begin(), v.end());
      return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
    };
    std::printf("%-22s %10.4f %10.4f\n", token.c_str(), med(f1s), med(accs));
    medians.emplace_back(token, med(f1s));
  }
  write_text_file(out_path, csv);
  return 0;
}

struct GridAxis {
  std::string name;  // S, K or lambda_f
  std::vector<double> values;
};

std::vector<GridAxis> parse_grid(const std::string& spec) {
  std::vector<GridAxis> axes;
  std::istringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ';')) {
    auto eq = part.find('=');
    if (eq == std::string::npos) throw ConfigError("grid axis must look like name=values: " + part);
    GridAxis axis;
    axis.name = part.substr(0, eq);
    if (axis.name != "S" && axis.name != "K" && axis.name != "lambda_f")
      throw ConfigError("grid axis must be S, K or lambda_f");
    std::string vals = part.substr(eq + 1);
    auto colon = vals.find(':');
    if (colon != std::string::npos) {
      int lo = std::stoi(vals.substr(0, colon));
      int hi = std::stoi(vals.substr(colon + 1));
      for (int v = lo; v <= hi; ++v) axis.values.push_back(v);
    } else {
      std::istringstream vs(vals);
      std::string tok;
      while (std::getline(vs, tok, ',')) axis.values.push_back(std::stod(tok));
    }
    if (axis.values.empty()) throw ConfigError("empty grid axis: " + part);
    axes.push_back(std::move(axis));
  }
  if (axes.empty()) throw ConfigError("empty grid");
  return axes;
}

int cmd_sweep(const RunConfig& base, const std::string& grid_spec, int seeds,
              const std::string& out_path) {
  auto axes = parse_grid(grid_spec);
  Graph g = load_configured_graph(base);

  fs::path p(out_path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(out_path, std::ios::trunc);
  if (!os) throw DataError("cannot write: " + out_path);
  os << "S,K,lambda_f,seed,macro_f1,accuracy,best_epoch\n" << std::flush;

  std::vector<size_t> index(axes.size(), 0);
  bool done = false;
  while (!done) {
    RunConfig cfg = base;
    std::string point_tag = "sweep";
    for (size_t a = 0; a < axes.size(); ++a) {
      double v = axes[a].values[index[a]];
      if (axes[a].name == "S") cfg.train.model.window_count = static_cast<int>(v);
      if (axes[a].name == "K") cfg.train.model.order = static_cast<int>(v);
      if (axes[a].name == "lambda_f") cfg.train.model.lambda_f = v;
      point_tag += ":" + axes[a].name + "=" + std::to_string(v);
    }
    for (int s = 0; s < seeds; ++s) {
      cfg.train.seed = split_seed(base.train.seed, point_tag, static_cast<std::uint64_t>(s));
      RunOutput out = run_training(g, cfg);
      char buf[200];
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%d,%.6f,%.6f,%d\n",
                    cfg.train.model.window_count, cfg.train.model.order,
                    cfg.train.model.lambda_f, s, out.run.test.macro_f1, out.run.test.accuracy,
                    out.run.best_epoch);
      os << buf << std::flush;  // partial results survive interruption
    }
    // advance the cartesian product
    for (size_t a = 0;; ++a) {
      if (a == axes.size()) {
        done = true;
        break;
      }
      if (++index[a] < axes[a].values.size()) break;
      index[a] = 0;
    }
  }
  std::printf("sweep written to %s\n", out_path.c_str());
  return 0;
}

int cmd_premise(const std::vector<double>& h_values, int n, double mean_degree, int seeds,
                std::uint64_t master_seed, const std::string& out_path) {
  if (n > kOracleSizeCap) throw ConfigError("premise graphs must fit the spectral oracle cap");
  std::string csv = "h,energy_share,h_measured\n";
  std::printf("%6s %14s %12s\n", "h", "energy_share", "h_measured");
  for (double h : h_values) {
    std::vector<double> shares, measured;
    for (int s = 0; s < seeds; ++s) {
      SBMSpec spec;
      spec.n = n;
      spec.mean_degree = mean_degree;
      spec.homophily = h;
      spec.seed = split_seed(master_seed, "premise", static_cast<std::uint64_t>(s));
      auto pts = premise_check({h}, spec);
      shares.push_back(pts[0].high_freq_share);
      measured.push_back(pts[0].h_measured);
    }
    std::sort(shares.begin(), shares.end());
    std::sort(measured.begin(), measured.end());
    double med_share = shares[shares.size() / 2];
    double med_h = measured[measured.size() / 2];
    char buf[120];
    std::snprintf(buf, sizeof buf, "%.3f,%.8f,%.6f\n", h, med_share, med_h);
    csv += buf;
    std::printf("%6.3f %14.6f %12.4f\n", h, med_share, med_h);
  }
  write_text_file(out_path, csv);
  return 0;
}

int cmd_dump_filter(const std::string& checkpoint_path, const std::string& manifest_path,
                    int block, int points, const std::string& out_path) {
  json manifest = load_json_file(manifest_path);
  RunConfig cfg;
  apply_config_json(cfg, manifest.at("config"));
  double h = manifest.at("h").get<double>();

  auto params = load_checkpoint(checkpoint_path);
  int input_dim = 0;
  for (const auto& [name, m] : params)
    if (name == "proj.w") input_dim = static_cast<int>(m.rows());
  if (input_dim == 0) throw DataError("checkpoint has no proj.w entry");

  HWModel<double> model(cfg.train.model, input_dim, split_seed(cfg.train.seed, "init"));
  import_params(model.params(), params);
  auto banks = model.window_banks(h);
  if (block < 0 || block >= static_cast<int>(banks.size()))
    throw ConfigError("block index out of range");
  const WindowBank& bank = banks[static_cast<size_t>(block)];

  PolyBasis basis(cfg.train.model.basis, cfg.train.model.order);
  Vec grid = Vec::LinSpaced(points, 0.0, 2.0);
  auto [per_window, combined] = effective_response(bank, basis, grid);

  std::string csv = "lambda";
  for (int s = 0; s < bank.coeffs.rows(); ++s) csv += ",g" + std::to_string(s + 1);
  csv += ",combined\n";
  char buf[64];
  for (int i = 0; i < grid.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.8f", grid[i]);
    csv += buf;
    for (int s = 0; s < per_window.rows(); ++s) {
      std::snprintf(buf, sizeof buf, ",%.10g", per_window(s, i));
      csv += buf;
    }
    std::snprintf(buf, sizeof buf, ",%.10g\n", combined[i]);
    csv += buf;
  }
  write_text_file(out_path, csv);

  json side;
  side["block"] = block;
  side["h"] = h;
  side["omega_bar"] = manifest.at("omega_bar");
  side["omega"] = json::array();
  side["sigma"] = json::array();
  for (const auto& w : bank.windows) {
    side["omega"].push_back(w.omega);
    side["sigma"].push_back(w.sigma);
  }
  side["weights"] =
      std::vector<double>(bank.weights.data(), bank.weights.data() + bank.weights.size());
  std::string side_path = out_path;
  auto dot = side_path.rfind('.');
  side_path = (dot == std::string::npos ? side_path : side_path.substr(0, dot)) + ".json";
  write_text_file(side_path, side.dump(2) + "\n");
  std::printf("filter dump: %s (+ %s)\n", out_path.c_str(), side_path.c_str());
  return 0;
}

int cmd_dump_basis(const std::string& basis_name, int order, int points,
                   const std::string& out_path) {
  PolyBasis basis(basis_kind_from_string(basis_name), order);
  Vec grid = Vec::LinSpaced(points, 0.0, 2.0);
  std::string csv = "lambda";
  for (int k = 0; k <= order; ++k) csv += ",P" + std::to_string(k);
  csv += "\n";
  char buf[64];
  for (int i = 0; i < grid.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.8f", grid[i]);
    csv += buf;
    for (int k = 0; k <= order; ++k) {
      std::snprintf(buf, sizeof buf, ",%.10g", basis.eval(k, grid[i]));
      csv += buf;
    }
    csv += "\n";
  }
  write_text_file(out_path, csv);
  std::printf("basis table: %s\n", out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Homophily-aware Gaussian-window spectral GNN"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic homophily-controlled graph");
  SBMSpec spec;
  std::string gen_out = "data/synth";
  bool text_features = false;
  gen->add_option("--n", spec.n, "node count");
  gen->add_option("--bot-frac", spec.bot_fraction, "class-1 fraction");
  gen->add_option("--homophily", spec.homophily, "target homophily h*");
  gen->add_option("--mean-degree", spec.mean_degree, "mean degree");
  gen->add_option("--feat-dim", spec.feature_dim, "feature dimension");
  gen->add_option("--mu", spec.mu, "feature signal strength");
  gen->add_option("--seed", spec.seed, "seed");
  gen->add_option("--out", gen_out, "output prefix");
  gen->add_flag("--text-features", text_features, "write features as CSV instead of binary");

  // train
  auto* train = app.add_subcommand("train", "Train a model and write checkpoint + metrics");
  auto train_cfg = add_config_options(train);

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
  std::string ev_ckpt, ev_manifest, ev_edges, ev_features, ev_labels, ev_mask = "test",
                                                                      ev_out = "eval_metrics.json";
  eval->add_option("--checkpoint", ev_ckpt)->required();
  eval->add_option("--manifest", ev_manifest)->required();
  eval->add_option("--edges", ev_edges);
  eval->add_option("--features", ev_features);
  eval->add_option("--labels", ev_labels);
  eval->add_option("--mask", ev_mask, "train|val|test");
  eval->add_option("--out", ev_out);

  // compare
  auto* compare = app.add_subcommand("compare", "Train variants with shared seeds");
  auto compare_cfg = add_config_options(compare);
  std::vector<std::string> variants{"bernstein:windowed", "bernstein:plain"};
  int compare_seeds = 5;
  std::string compare_out = "compare.csv";
  compare->add_option("--variants", variants, "basis:mode tokens (mode: windowed|plain|nohom)")
      ->delimiter(',');
  compare->add_option("--seeds", compare_seeds);
  compare->add_option("--out", compare_out);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Grid sweep over S, K or lambda_f");
  auto sweep_cfg = add_config_options(sweep);
  std::string grid_spec = "S=1:6;K=1:6";
  int sweep_seeds = 1;
  std::string sweep_out = "sweep.csv";
  sweep->add_option("--grid", grid_spec, "e.g. S=1:6;K=1:6 or lambda_f=0,0.1,0.3");
  sweep->add_option("--seeds", sweep_seeds);
  sweep->add_option("--out", sweep_out);

  // premise
  auto* premise = app.add_subcommand("premise", "Homophily vs spectral-energy verification");
  std::vector<double> h_values{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int premise_n = 500, premise_seeds = 5;
  double premise_degree = 10.0;
  std::uint64_t premise_seed = 1;
  std::string premise_out = "premise.csv";
  premise->add_option("--h-values", h_values)->delimiter(',');
  premise->add_option("--n", premise_n);
  premise->add_option("--mean-degree", premise_degree);
  premise->add_option("--seeds", premise_seeds);
  premise->add_option("--seed", premise_seed);
  premise->add_option("--out", premise_out);

  // dump-filter
  auto* dumpf = app.add_subcommand("dump-filter", "Dump learned filter responses");
  std::string df_ckpt, df_manifest, df_out = "filter.csv";
  int df_block = 0, df_points = 201;
  dumpf->add_option("--checkpoint", df_ckpt)->required();
  dumpf->add_option("--manifest", df_manifest)->required();
  dumpf->add_option("--block", df_block);
  dumpf->add_option("--points", df_points);
  dumpf->add_option("--out", df_out);

  // dump-basis
  auto* dumpb = app.add_subcommand("dump-basis", "Dump pointwise basis tables");
  std::string db_basis = "bernstein", db_out = "basis.csv";
  int db_order = 4, db_points = 201;
  dumpb->add_option("--basis", db_basis);
  dumpb->add_option("--order", db_order);
  dumpb->add_option("--points", db_points);
  dumpb->add_option("--out", db_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage problems are config errors
  }

  try {
    if (gen->parsed()) return cmd_gen(spec, gen_out, text_features);
    if (train->parsed()) return cmd_train(train_cfg());
    if (eval->parsed())
      return cmd_eval(ev_ckpt, ev_manifest, ev_edges, ev_features, ev_labels, ev_mask, ev_out);
    if (compare->parsed()) return cmd_compare(compare_cfg(), variants, compare_seeds, compare_out);
    if (sweep->parsed()) return cmd_sweep(sweep_cfg(), grid_spec, sweep_seeds, sweep_out);
    if (premise->parsed())
      return cmd_premise(h_values, premise_n, premise_degree, premise_seeds, premise_seed,
                         premise_out);
    if (dumpf->parsed()) return cmd_dump_filter(df_ckpt, df_manifest, df_block, df_points, df_out);
    if (dumpb->parsed()) return cmd_dump_basis(db_basis, db_order, db_points, db_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
