#include "config.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace glnn::cli {

Graph DatasetSource::load() const {
  if (path) return load_graph(DatasetFiles::in_directory(*path));
  return generate_sbm(sbm);
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ConfigError("config: seeds must not be empty");
  if (dataset.path && !std::filesystem::is_directory(*dataset.path))
    throw IoError("dataset directory " + dataset.path->string() + " does not exist");
  if (!dataset.path) dataset.sbm.validate();
  spec.teacher.validate();
  spec.resolved_student().validate();
  if (!(spec.ind_rate >= 0.0 && spec.ind_rate <= 0.9)) throw ConfigError("config: ind_rate must lie in [0, 0.9]");
  if (!(spec.noise_alpha >= 0.0 && spec.noise_alpha <= 1.0)) throw ConfigError("config: noise must lie in [0, 1]");
  if (bench.repetitions < 5) throw ConfigError("config: bench.repetitions must be >= 5");
}

std::filesystem::path ExperimentConfig::output_root() const {
  if (output_dir.is_relative()) {
    if (const char* root = std::getenv("GLNN_OUTPUT_ROOT"); root && *root)
      return std::filesystem::path(root) / output_dir;
  }
  return output_dir;
}

std::filesystem::path ExperimentConfig::seed_dir(std::uint64_t seed) const {
  return output_root() / ("seed" + std::to_string(seed));
}

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& msg) const {
    std::ostringstream os;
    os << source_;
    if (node && node.Mark().line >= 0) os << ":" << node.Mark().line + 1;
    os << ": field '" << field << "': " << msg;
    throw ConfigError(os.str());
  }

  void require_map(const YAML::Node& node, const std::string& field) const {
    if (!node.IsMap()) fail(node, field, "expected a mapping");
  }

  void check_keys(const YAML::Node& map, const std::string& prefix, std::set<std::string> allowed) const {
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, prefix + key, "unknown key");
    }
  }

  template <class T>
  void read(const YAML::Node& map, const std::string& prefix, const char* key, T& out) const {
    const YAML::Node node = map[key];
    if (!node) return;
    try {
      out = node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, prefix + key, "cannot convert '" + scalar(node) + "'");
    }
  }

  template <class T>
  void read(const YAML::Node& map, const std::string& prefix, const char* key, std::optional<T>& out) const {
    const YAML::Node node = map[key];
    if (!node || node.IsNull()) return;
    T value{};
    read(map, prefix, key, value);
    out = value;
  }

  template <class T>
  void read_list(const YAML::Node& map, const std::string& prefix, const char* key, std::vector<T>& out) const {
    const YAML::Node node = map[key];
    if (!node) return;
    if (!node.IsSequence()) fail(node, prefix + key, "expected a list");
    out.clear();
    for (const auto& item : node) {
      try {
        out.push_back(item.as<T>());
      } catch (const YAML::Exception&) {
        fail(item, prefix + key, "cannot convert '" + scalar(item) + "'");
      }
    }
  }

  template <class F>
  void guarded(const YAML::Node& node, const std::string& field, F&& f) const {
    try {
      f();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      fail(node, field, e.what());
    }
  }

 private:
  static std::string scalar(const YAML::Node& n) { return n.IsScalar() ? n.Scalar() : "<non-scalar>"; }
  std::string source_;
};

void read_dataset(const Reader& r, const YAML::Node& node, DatasetSource& ds, const std::string& prefix) {
  r.require_map(node, prefix);
  r.check_keys(node, prefix + ".", {"name", "path", "sbm"});
  r.read(node, prefix + ".", "name", ds.name);
  std::optional<std::string> path;
  r.read(node, prefix + ".", "path", path);
  if (path) ds.path = *path;
  if (const YAML::Node sbm = node["sbm"]) {
    const std::string p = prefix + ".sbm.";
    r.require_map(sbm, prefix + ".sbm");
    r.check_keys(sbm, p, {"n_per_block", "num_blocks", "p_in", "p_out", "feat_dim", "feat_separation", "seed"});
    r.read(sbm, p, "n_per_block", ds.sbm.n_per_block);
    r.read(sbm, p, "num_blocks", ds.sbm.num_blocks);
    r.read(sbm, p, "p_in", ds.sbm.p_in);
    r.read(sbm, p, "p_out", ds.sbm.p_out);
    r.read(sbm, p, "feat_dim", ds.sbm.feat_dim);
    r.read(sbm, p, "feat_separation", ds.sbm.feat_separation);
    r.read(sbm, p, "seed", ds.sbm.seed);
    r.guarded(sbm, prefix + ".sbm", [&] { ds.sbm.validate(); });
  }
  if (ds.path && node["sbm"]) r.fail(node, prefix, "give either path or sbm, not both");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source_name) {
  const Reader r(source_name);
  YAML::Node loaded;
  try {
    loaded = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source_name + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  const YAML::Node root = loaded;
  ExperimentConfig cfg;
  if (root.IsNull()) return cfg;
  r.require_map(root, "<root>");
  r.check_keys(root, "", {"dataset", "teacher", "student", "setting", "ind_rate", "labels_per_class",
                          "val_fraction", "noise", "seeds", "output_dir", "bench", "ablation"});

  if (const YAML::Node ds = root["dataset"]) read_dataset(r, ds, cfg.dataset, "dataset");

  ExperimentSpec& spec = cfg.spec;
  if (const YAML::Node t = root["teacher"]) {
    r.require_map(t, "teacher");
    r.check_keys(t, "teacher.", {"arch", "layers", "hidden", "lr", "weight_decay", "dropout", "power_iterations",
                                 "teleport", "max_epochs", "patience"});
    std::string arch = "sage";
    r.read(t, "teacher.", "arch", arch);
    r.guarded(t["arch"], "teacher.arch", [&] { spec.teacher = TeacherHparams::defaults(parse_arch(arch)); });
    r.read(t, "teacher.", "layers", spec.teacher.num_layers);
    r.read(t, "teacher.", "hidden", spec.teacher.hidden_dim);
    r.read(t, "teacher.", "lr", spec.teacher.lr);
    r.read(t, "teacher.", "weight_decay", spec.teacher.weight_decay);
    r.read(t, "teacher.", "dropout", spec.teacher.dropout);
    r.read(t, "teacher.", "power_iterations", spec.teacher.power_iterations);
    r.read(t, "teacher.", "teleport", spec.teacher.teleport);
    r.read(t, "teacher.", "max_epochs", spec.teacher.max_epochs);
    r.read(t, "teacher.", "patience", spec.teacher.patience);
    r.guarded(t, "teacher", [&] { spec.teacher.validate(); });
  }

  if (const YAML::Node s = root["student"]) {
    r.require_map(s, "student");
    r.check_keys(s, "student.", {"layers", "hidden", "width_mult", "lr", "weight_decay", "dropout", "norm",
                                 "max_epochs", "patience", "lambda", "kl_direction", "search"});
    StudentHparams& hp = spec.student.student;
    r.read(s, "student.", "layers", spec.student_layers);
    r.read(s, "student.", "hidden", spec.student_hidden);
    r.read(s, "student.", "width_mult", spec.student.width_mult);
    r.read(s, "student.", "lr", hp.lr);
    r.read(s, "student.", "weight_decay", hp.weight_decay);
    r.read(s, "student.", "dropout", hp.dropout);
    r.read(s, "student.", "max_epochs", hp.max_epochs);
    r.read(s, "student.", "patience", hp.patience);
    r.read(s, "student.", "lambda", spec.student.lambda);
    r.read(s, "student.", "search", spec.student.search);
    std::string norm = "none";
    r.read(s, "student.", "norm", norm);
    if (norm == "batchnorm") hp.norm = Norm::batchnorm;
    else if (norm != "none") r.fail(s["norm"], "student.norm", "expected none or batchnorm");
    std::string dir = "forward";
    r.read(s, "student.", "kl_direction", dir);
    if (dir == "reverse") spec.student.kl_direction = KlDirection::student_to_target;
    else if (dir != "forward") r.fail(s["kl_direction"], "student.kl_direction", "expected forward or reverse");
    r.guarded(s, "student", [&] { spec.resolved_student().validate(); });
  }

  if (const YAML::Node n = root["setting"]) {
    std::string text;
    r.read(root, "", "setting", text);
    r.guarded(n, "setting", [&] { spec.setting = parse_setting(text); });
  }
  r.read(root, "", "ind_rate", spec.ind_rate);
  r.read(root, "", "labels_per_class", spec.labels_per_class);
  r.read(root, "", "val_fraction", spec.val_fraction);
  r.read(root, "", "noise", spec.noise_alpha);
  r.read_list(root, "", "seeds", cfg.seeds);
  if (root["seeds"] && cfg.seeds.empty()) r.fail(root["seeds"], "seeds", "must not be empty");
  std::string out = cfg.output_dir.string();
  r.read(root, "", "output_dir", out);
  cfg.output_dir = out;

  if (const YAML::Node b = root["bench"]) {
    r.require_map(b, "bench");
    r.check_keys(b, "bench.", {"nodes", "repetitions", "warmups", "fanout", "layers", "width_mults", "graph",
                               "fetch_curve_max_layers", "memory_us", "disk_us", "hop_barrier", "svg"});
    BenchConfig& bc = cfg.bench;
    r.read(b, "bench.", "nodes", bc.nodes);
    r.read(b, "bench.", "repetitions", bc.repetitions);
    r.read(b, "bench.", "warmups", bc.warmups);
    r.read(b, "bench.", "fanout", bc.fanout);
    r.read_list(b, "bench.", "layers", bc.layers);
    r.read_list(b, "bench.", "width_mults", bc.width_mults);
    r.read(b, "bench.", "fetch_curve_max_layers", bc.fetch_curve_max_layers);
    r.read(b, "bench.", "memory_us", bc.cost.memory_us);
    r.read(b, "bench.", "disk_us", bc.cost.disk_us);
    r.read(b, "bench.", "hop_barrier", bc.cost.hop_barrier);
    r.read(b, "bench.", "svg", bc.svg);
    if (const YAML::Node g = b["graph"]) {
      DatasetSource ds;
      read_dataset(r, g, ds, "bench.graph");
      bc.graph = ds;
    }
    if (bc.repetitions < 5) r.fail(b["repetitions"], "bench.repetitions", "must be >= 5");
    for (int L : bc.layers)
      if (L < 1) r.fail(b["layers"], "bench.layers", "layer counts must be >= 1");
  }

  if (const YAML::Node a = root["ablation"]) {
    r.require_map(a, "ablation");
    r.check_keys(a, "ablation.", {"extended_split"});
    r.read(a, "ablation.", "extended_split", cfg.ablation.extended_split);
  }

  if (!(spec.ind_rate >= 0.0 && spec.ind_rate <= 0.9)) r.fail(root["ind_rate"], "ind_rate", "must lie in [0, 0.9]");
  if (!(spec.noise_alpha >= 0.0 && spec.noise_alpha <= 1.0)) r.fail(root["noise"], "noise", "must lie in [0, 1]");
  if (!(spec.val_fraction >= 0.0 && spec.val_fraction < 1.0))
    r.fail(root["val_fraction"], "val_fraction", "must lie in [0, 1)");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

}  // namespace glnn::cli
