#include "commands.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>

#include "glnn/bench.hpp"
#include "glnn/metrics.hpp"

namespace glnn::cli {

namespace fs = std::filesystem;

void apply_overrides(ExperimentConfig& cfg, const Overrides& o) {
  if (o.seed) cfg.seeds = {*o.seed};
  if (o.setting) {
    try {
      cfg.spec.setting = parse_setting(*o.setting);
    } catch (const Error& e) {
      throw ConfigError(std::string("--setting: ") + e.what());
    }
  }
  if (o.ind_rate) {
    if (!(*o.ind_rate >= 0.0 && *o.ind_rate <= 0.9)) throw ConfigError("--ind-rate must lie in [0, 0.9]");
    cfg.spec.ind_rate = *o.ind_rate;
  }
  if (o.lambda) {
    if (!(*o.lambda >= 0.0 && *o.lambda <= 1.0)) throw ConfigError("--lambda must lie in [0, 1]");
    cfg.spec.student.lambda = *o.lambda;
  }
  if (o.width_mult) {
    if (*o.width_mult < 1) throw ConfigError("--width-mult must be a positive integer");
    cfg.spec.student.width_mult = *o.width_mult;
  }
  if (o.output_dir) cfg.output_dir = *o.output_dir;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

fs::path ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

void write_trace(const TrainTrace& t, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "epoch,loss,val_acc\n";
  char buf[80];
  for (std::size_t e = 0; e < t.loss.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", e, t.loss[e], t.val_acc[e]);
    out << buf;
  }
}

void log_report(std::ostream& log, std::uint64_t seed, const EvalReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "seed %llu %-6s %-5s tran %.4f", static_cast<unsigned long long>(seed),
                r.role.c_str(), r.arch.c_str(), r.acc_tran);
  log << buf;
  if (r.acc_ind) {
    std::snprintf(buf, sizeof buf, " ind %.4f prod %.4f", *r.acc_ind, r.acc_prod);
    log << buf;
  }
  if (r.cut_loss) {
    std::snprintf(buf, sizeof buf, " cut %.4f", *r.cut_loss);
    log << buf;
  }
  log << '\n';
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

void cmd_train_teacher(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  const Graph base = cfg.dataset.load();
  for (std::uint64_t seed : cfg.seeds) {
    const fs::path dir = ensure_dir(cfg.seed_dir(seed));
    const Graph g = experiment_graph(base, cfg.spec, seed);
    const NodeSplit split = experiment_split(g, cfg.spec, seed);
    save_split(split, dir / "split.json");

    const auto start = std::chrono::steady_clock::now();
    const TrainedTeacher t = train_teacher(g, split, cfg.spec.setting, cfg.spec.teacher, SeedStream(seed));
    const double elapsed = seconds_since(start);
    save_checkpoint(t.model, dir / "teacher.ckpt.json");
    write_trace(t.trace, dir / "teacher_trace.csv");
    save_soft_targets(teacher_soft_targets(t.model, g, split, cfg.spec.setting), dir / "soft_targets.csv");

    EvalReport r = evaluate(t.model, g, split, cfg.spec.setting);
    r.seed = seed;
    r.train_time_s = elapsed;
    write_text(dir / "teacher_report.json", r.to_json());
    log_report(log, seed, r);
  }
}

void cmd_distill(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  const Graph base = cfg.dataset.load();
  const DistillConfig dc = cfg.spec.resolved_student();
  for (std::uint64_t seed : cfg.seeds) {
    const fs::path dir = cfg.seed_dir(seed);
    if (!fs::exists(dir / "teacher.ckpt.json"))
      throw IoError("no teacher checkpoint in " + dir.string() + "; run train-teacher first");
    const Model teacher = load_checkpoint(dir / "teacher.ckpt.json");
    if (teacher.setting != dc.setting)
      throw ProtocolError(std::string("teacher checkpoint was trained for the ") + to_string(teacher.setting) +
                          " setting; refusing to distill a " + to_string(dc.setting) + " student from it");
    const Graph g = experiment_graph(base, cfg.spec, seed);
    const NodeSplit split = load_split(dir / "split.json");
    const SeedStream seeds(seed);

    for (const char* role : {"glnn", "mlp"}) {
      const auto start = std::chrono::steady_clock::now();
      const StudentResult s = std::string(role) == "glnn" ? train_glnn(teacher, g, split, dc, seeds)
                                                          : train_plain_mlp(g, split, dc, seeds);
      const double elapsed = seconds_since(start);
      save_checkpoint(s.model, dir / (std::string(role) + ".ckpt.json"));
      EvalReport r = evaluate(s.model, g, split, dc.setting);
      r.seed = seed;
      r.train_time_s = elapsed;
      write_text(dir / (std::string(role) + "_report.json"), r.to_json());
      log_report(log, seed, r);
    }
  }
}

void cmd_eval(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  const Graph base = cfg.dataset.load();
  std::vector<MetricRecord> records;
  for (std::uint64_t seed : cfg.seeds) {
    const fs::path dir = cfg.seed_dir(seed);
    const Graph g = experiment_graph(base, cfg.spec, seed);
    const NodeSplit split = load_split(dir / "split.json");
    nlohmann::ordered_json reports = nlohmann::ordered_json::array();
    for (const char* name : {"teacher", "mlp", "glnn"}) {
      const fs::path ckpt = dir / (std::string(name) + ".ckpt.json");
      if (!fs::exists(ckpt)) continue;
      const Model m = load_checkpoint(ckpt);
      EvalReport r = evaluate(m, g, split, m.setting);
      r.seed = seed;
      reports.push_back(nlohmann::ordered_json::parse(r.to_json(false)));
      log_report(log, seed, r);
      const std::string model = r.role == "teacher" ? r.arch : r.role;
      records.push_back({cfg.dataset.name, model, seed, "acc_tran", r.acc_tran});
      if (r.acc_ind) records.push_back({cfg.dataset.name, model, seed, "acc_ind", *r.acc_ind});
      records.push_back({cfg.dataset.name, model, seed, "acc_prod", r.acc_prod});
      if (r.cut_loss) records.push_back({cfg.dataset.name, model, seed, "cut_loss", *r.cut_loss});
    }
    if (reports.empty()) throw IoError("no checkpoints found in " + dir.string());
    write_text(dir / "eval.json", reports.dump(2));
  }
  const auto means = summarize_metrics(records);
  write_metric_csv(records, means, ensure_dir(cfg.output_root()) / "eval_metrics.csv");
  for (const auto& m : means)
    if (m.dataset == "all") log << "mean " << m.model << ' ' << m.metric << ' ' << m.mean << '\n';
}

void cmd_bench(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  const fs::path root = ensure_dir(cfg.output_root());
  const std::uint64_t seed = cfg.seeds.front();
  const Graph g = experiment_graph(cfg.dataset.load(), cfg.spec, seed);
  const Graph bench_graph = cfg.bench.graph ? cfg.bench.graph->load() : g;
  if (bench_graph.feature_dim() != g.feature_dim())
    throw ShapeError("bench graph has " + std::to_string(bench_graph.feature_dim()) +
                     " features but the training graph has " + std::to_string(g.feature_dim()));
  const NodeSplit split = experiment_split(g, cfg.spec, seed);
  const SeedStream seeds(seed);
  const BenchConfig& bc = cfg.bench;

  BenchOptions opts;
  opts.n_nodes = bc.nodes;
  opts.repetitions = bc.repetitions;
  opts.warmups = bc.warmups;
  opts.seed = seed;

  std::vector<LatencyReport> reports;
  for (int L : bc.layers) {
    ExperimentSpec spec = cfg.spec;
    spec.teacher.num_layers = static_cast<std::size_t>(L);
    spec.student_layers = static_cast<std::size_t>(L);
    const TrainedTeacher t = train_teacher(g, split, spec.setting, spec.teacher, seeds);
    const double teacher_acc = evaluate(t.model, g, split, spec.setting).acc_prod;
    std::vector<std::optional<std::size_t>> fanouts{std::nullopt};
    if (bc.fanout) fanouts.push_back(bc.fanout);
    for (const auto& fanout : fanouts) {
      BenchOptions o = opts;
      o.fanout = fanout;
      o.tag = std::string(to_string(t.model.arch)) + (fanout ? "-sampled" : "");
      reports.push_back(bench_inference(t.model, bench_graph, o));
      reports.back().accuracy = teacher_acc;
    }
    for (std::size_t w : bc.width_mults) {
      spec.student.width_mult = w;
      const StudentResult s = train_glnn(t.model, g, split, spec.resolved_student(), seeds);
      BenchOptions o = opts;
      o.tag = "glnn";
      o.width_mult = w;
      reports.push_back(bench_inference(s.model, bench_graph, o));
      reports.back().accuracy = evaluate(s.model, g, split, spec.setting).acc_prod;
    }
  }
  emit_report(reports, root / "bench.csv", bc.svg);
  for (const auto& r : reports) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-14s L=%d w=%zu median %.3f ms (IQR %.3f) fetches %llu", r.model.c_str(),
                  r.layers, r.width_mult, r.median_ms(), r.iqr_ms(),
                  static_cast<unsigned long long>(r.total_fetches_distinct()));
    log << buf << '\n';
  }

  const auto sample = sample_nodes(bench_graph.num_nodes(), std::min(bc.nodes, bench_graph.num_nodes()), seed);
  const auto curve = fetch_curve(bench_graph, 1, bc.fetch_curve_max_layers, sample);
  const auto cost = simulate_fetch_cost(curve, bc.cost);
  std::ofstream out(root / "fetch_curve.csv");
  if (!out) throw IoError("cannot write " + (root / "fetch_curve.csv").string());
  out << "L,mean_distinct,mean_multiset,memory_us,disk_us\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", curve[i].layers, curve[i].mean_distinct,
                  curve[i].mean_multiset, cost[i].memory_us, cost[i].disk_us);
    out << buf;
  }
}

void cmd_ablate(const ExperimentConfig& cfg, AblationAxis axis, std::ostream& log) {
  cfg.validate();
  const fs::path root = ensure_dir(cfg.output_root());
  const Graph g = cfg.dataset.load();
  const auto rows = run_ablation(g, cfg.spec, axis, cfg.seeds, cfg.ablation);
  write_ablation_csv(rows, root / ("ablation_" + std::string(to_string(axis)) + ".csv"));

  std::map<std::pair<std::string, std::string>, std::pair<double, int>> means;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& r : rows) {
    auto key = std::make_pair(r.value, r.model);
    auto [it, fresh] = means.emplace(key, std::make_pair(0.0, 0));
    if (fresh) order.push_back(key);
    it->second.first += r.report.acc_prod;
    ++it->second.second;
  }
  for (const auto& key : order) {
    char buf[120];
    std::snprintf(buf, sizeof buf, "%s=%s %-6s acc %.4f", to_string(axis), key.first.c_str(), key.second.c_str(),
                  means[key].first / means[key].second);
    log << buf << '\n';
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distil graph neural networks into graph-free MLPs"};
  app.require_subcommand(1);
  std::string config_path;
  Overrides o;
  std::string axis_name;
  bool extended_split = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "YAML experiment config")->required();
    sub->add_option("--seed", o.seed, "Run a single seed instead of the config's list");
    sub->add_option("--setting", o.setting, "tran or ind");
    sub->add_option("--ind-rate", o.ind_rate, "Inductive share of the test set");
    sub->add_option("--lambda", o.lambda, "Label-loss weight in [0, 1]");
    sub->add_option("--width-mult", o.width_mult, "Student hidden width multiplier");
    sub->add_option("-o,--output", o.output_dir, "Output directory (relative paths honour GLNN_OUTPUT_ROOT)");
  };
  CLI::App* train = app.add_subcommand("train-teacher", "Train the GNN teacher and export soft targets");
  CLI::App* distill = app.add_subcommand("distill", "Train a GLNN (and the plain MLP baseline) from a teacher");
  CLI::App* eval = app.add_subcommand("eval", "Evaluate saved checkpoints");
  CLI::App* bench = app.add_subcommand("bench", "Measure inference latency and neighbour-fetch costs");
  CLI::App* ablate = app.add_subcommand("ablate", "Sweep one axis: noise, split_rate or teacher");
  for (CLI::App* sub : {train, distill, eval, bench, ablate}) add_common(sub);
  ablate->add_option("--axis", axis_name, "noise | split_rate | teacher")->required();
  ablate->add_flag("--extended-split", extended_split, "Split-rate axis up to 90:10");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kUsage;
  }

  ExperimentConfig cfg;
  AblationAxis axis = AblationAxis::noise;
  try {
    cfg = load_config(config_path);
    apply_overrides(cfg, o);
    if (extended_split) cfg.ablation.extended_split = true;
    if (ablate->parsed()) axis = parse_axis(axis_name);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (train->parsed()) cmd_train_teacher(cfg, out);
    else if (distill->parsed()) cmd_distill(cfg, out);
    else if (eval->parsed()) cmd_eval(cfg, out);
    else if (bench->parsed()) cmd_bench(cfg, out);
    else cmd_ablate(cfg, axis, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kSuccess;
}

}  // namespace glnn::cli
