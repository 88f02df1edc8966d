#include "glnn/model.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "glnn/error.hpp"

namespace glnn {

using nlohmann::json;

const char* to_string(Arch a) noexcept {
  switch (a) {
    case Arch::mlp: return "mlp";
    case Arch::sage: return "sage";
    case Arch::gcn: return "gcn";
    case Arch::appnp: return "appnp";
  }
  return "?";
}

Arch parse_arch(std::string_view text) {
  if (text == "mlp") return Arch::mlp;
  if (text == "sage") return Arch::sage;
  if (text == "gcn") return Arch::gcn;
  if (text == "appnp") return Arch::appnp;
  throw DomainError("unknown architecture '" + std::string(text) + "'");
}

bool uses_graph(Arch a) noexcept { return a != Arch::mlp; }

int Model::receptive_field() const {
  return std::visit(
      [](const auto& p) -> int {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MlpParams>) return 0;
        else if constexpr (std::is_same_v<T, SageParams>) return static_cast<int>(p.num_layers());
        else return p.power_iterations;
      },
      params);
}

std::size_t Model::num_classes() const {
  return std::visit(
      [](const auto& p) -> std::size_t {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, AppnpParams>) return p.predictor.out_dim();
        else return p.layers.back().out_dim();
      },
      params);
}

Tensor predict_logits(const Model& m, const Graph& g) {
  return std::visit(
      [&](const auto& p) -> Tensor {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MlpParams>) return mlp_forward(p, g.features());
        else if constexpr (std::is_same_v<T, SageParams>) return sage_forward(p, g);
        else return appnp_forward(p, g);
      },
      m.params);
}

Tensor predict_logits(const Model& m, const Graph& g, const Tensor& features,
                      std::span<const std::size_t> degrees) {
  return std::visit(
      [&](const auto& p) -> Tensor {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MlpParams>) return mlp_forward(p, features);
        else if constexpr (std::is_same_v<T, SageParams>) return sage_forward(p, g, features, degrees);
        else return appnp_forward(p, g, features, degrees);
      },
      m.params);
}

// ---- checkpoints ----------------------------------------------------------------

namespace {

constexpr int kCheckpointVersion = 1;

json tensor_json(const std::string& name, const Tensor& t) {
  return json{{"name", name}, {"rows", t.rows()}, {"cols", t.cols()}, {"data", t.values()}};
}

json vector_json(const std::string& name, const std::vector<double>& v) {
  return json{{"name", name}, {"rows", 1}, {"cols", v.size()}, {"data", v}};
}

void add_linear(json& tensors, const std::string& prefix, const Linear& l) {
  tensors.push_back(tensor_json(prefix + ".weight", l.weight));
  tensors.push_back(tensor_json(prefix + ".bias", l.bias));
}

void add_mlp(json& tensors, json& config, const std::string& prefix, const MlpParams& p) {
  config[prefix + "hidden_dim"] = p.hidden_dim;
  config[prefix + "dropout"] = p.dropout_rate;
  config[prefix + "norm"] = p.norm == Norm::batchnorm ? "batchnorm" : "none";
  config[prefix + "num_layers"] = p.layers.size();
  for (std::size_t l = 0; l < p.layers.size(); ++l)
    add_linear(tensors, prefix + "layers." + std::to_string(l), p.layers[l]);
  for (std::size_t l = 0; l < p.norms.size(); ++l) {
    const auto base = prefix + "norms." + std::to_string(l);
    tensors.push_back(tensor_json(base + ".gamma", p.norms[l].gamma));
    tensors.push_back(tensor_json(base + ".beta", p.norms[l].beta));
    tensors.push_back(vector_json(base + ".running_mean", p.norms[l].running_mean));
    tensors.push_back(vector_json(base + ".running_var", p.norms[l].running_var));
  }
}

class TensorTable {
 public:
  explicit TensorTable(const json& tensors) {
    for (const auto& t : tensors) entries_.emplace(t.at("name").get<std::string>(), &t);
  }
  Tensor take(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ProtocolError("checkpoint lacks tensor '" + name + "'");
    const json& t = *it->second;
    return Tensor(t.at("rows").get<std::size_t>(), t.at("cols").get<std::size_t>(),
                  t.at("data").get<std::vector<double>>());
  }
  Linear linear(const std::string& prefix) const {
    return Linear{take(prefix + ".weight"), take(prefix + ".bias")};
  }

 private:
  std::map<std::string, const json*> entries_;
};

MlpParams read_mlp(const TensorTable& table, const json& config, const std::string& prefix) {
  MlpParams p;
  p.hidden_dim = config.at(prefix + "hidden_dim").get<std::size_t>();
  p.dropout_rate = config.at(prefix + "dropout").get<double>();
  p.norm = config.at(prefix + "norm").get<std::string>() == "batchnorm" ? Norm::batchnorm : Norm::none;
  const auto n = config.at(prefix + "num_layers").get<std::size_t>();
  for (std::size_t l = 0; l < n; ++l) p.layers.push_back(table.linear(prefix + "layers." + std::to_string(l)));
  if (p.norm == Norm::batchnorm) {
    for (std::size_t l = 0; l + 1 < n; ++l) {
      const auto base = prefix + "norms." + std::to_string(l);
      BatchNorm bn;
      bn.gamma = table.take(base + ".gamma");
      bn.beta = table.take(base + ".beta");
      bn.running_mean = table.take(base + ".running_mean").values();
      bn.running_var = table.take(base + ".running_var").values();
      p.norms.push_back(std::move(bn));
    }
  }
  p.validate();
  return p;
}

}  // namespace

std::string checkpoint_to_string(const Model& m) {
  json tensors = json::array();
  json config = json::object();
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MlpParams>) {
          add_mlp(tensors, config, "", p);
        } else if constexpr (std::is_same_v<T, SageParams>) {
          config["hidden_dim"] = p.hidden_dim;
          config["dropout"] = p.dropout_rate;
          config["num_layers"] = p.layers.size();
          for (std::size_t l = 0; l < p.layers.size(); ++l)
            add_linear(tensors, "layers." + std::to_string(l), p.layers[l]);
        } else {
          config["power_iterations"] = p.power_iterations;
          config["teleport"] = p.teleport;
          add_mlp(tensors, config, "predictor.", p.predictor);
        }
      },
      m.params);
  json j{{"format", "glnn-checkpoint"},
         {"version", kCheckpointVersion},
         {"arch", to_string(m.arch)},
         {"role", m.role},
         {"setting", to_string(m.setting)},
         {"trained", m.trained},
         {"config", config},
         {"tensors", tensors}};
  return j.dump();
}

Model checkpoint_from_string(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != "glnn-checkpoint")
      throw ProtocolError("not a glnn checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion)
      throw ProtocolError("unsupported checkpoint version " + j.at("version").dump());
    Model m;
    m.arch = parse_arch(j.at("arch").get<std::string>());
    m.role = j.value("role", "");
    m.setting = parse_setting(j.at("setting").get<std::string>());
    m.trained = j.at("trained").get<bool>();
    const json& config = j.at("config");
    const TensorTable table(j.at("tensors"));
    switch (m.arch) {
      case Arch::mlp: m.params = read_mlp(table, config, ""); break;
      case Arch::sage:
      case Arch::gcn: {
        SageParams p;
        p.hidden_dim = config.at("hidden_dim").get<std::size_t>();
        p.dropout_rate = config.at("dropout").get<double>();
        const auto n = config.at("num_layers").get<std::size_t>();
        for (std::size_t l = 0; l < n; ++l) p.layers.push_back(table.linear("layers." + std::to_string(l)));
        p.validate();
        m.params = std::move(p);
        break;
      }
      case Arch::appnp: {
        AppnpParams p;
        p.power_iterations = config.at("power_iterations").get<int>();
        p.teleport = config.at("teleport").get<double>();
        p.predictor = read_mlp(table, config, "predictor.");
        p.validate();
        m.params = std::move(p);
        break;
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Model& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << checkpoint_to_string(m) << '\n';
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_string(ss.str());
}

}  // namespace glnn
