#include "glnn/distill.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <numeric>

#include "glnn/error.hpp"
#include "glnn/metrics.hpp"

namespace glnn {

void StudentHparams::validate() const {
  if (num_layers < 1) throw DomainError("student needs at least one layer");
  if (hidden_dim < 1) throw DomainError("student hidden_dim must be positive");
  if (!(lr > 0.0)) throw DomainError("student lr must be positive");
  if (!(weight_decay >= 0.0)) throw DomainError("student weight_decay must be non-negative");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw DomainError("student dropout outside [0, 1)");
  if (max_epochs < 1 || patience < 1) throw DomainError("student epochs and patience must be positive");
}

void DistillConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("lambda must lie in [0, 1]");
  if (width_mult < 1) throw DomainError("width_mult must be a positive integer");
  student.validate();
}

LossValue distill_objective(const Tensor& logits, std::span<const NodeId> labeled,
                            std::span<const Label> labels, std::span<const NodeId> distill_rows,
                            const Tensor& targets, double lambda, KlDirection direction) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("lambda must lie in [0, 1]");
  if (lambda == 1.0) return cross_entropy(logits, labeled, labels);
  if (lambda == 0.0) return kl_soft_targets(logits, distill_rows, targets, direction);
  LossValue ce = cross_entropy(logits, labeled, labels);
  const LossValue kl = kl_soft_targets(logits, distill_rows, targets, direction);
  LossValue out;
  out.value = lambda * ce.value + (1.0 - lambda) * kl.value;
  out.grad = std::move(ce.grad);
  auto g = out.grad.data();
  for (double& v : g) v *= lambda;
  axpy(g, kl.grad.data(), 1.0 - lambda);
  return out;
}

LossValue distill_objective(const Tensor& logits, std::span<const NodeId> labeled,
                            std::span<const Label> labels, std::span<const NodeId> distill_rows,
                            const SoftTargets& z, double lambda, KlDirection direction) {
  const Tensor targets = lambda == 1.0 ? Tensor() : z.gather(distill_rows);
  return distill_objective(logits, labeled, labels, distill_rows, targets, lambda, direction);
}

StudentView make_student_view(const Graph& g, const NodeSplit& split, Setting setting) {
  split.validate(g.num_nodes());
  StudentView view;
  if (setting == Setting::transductive) {
    view.visible = Graph::features_only(g.features().detached(),
                                        std::vector<Label>(g.labels().begin(), g.labels().end()),
                                        g.num_classes());
    view.to_global.resize(g.num_nodes());
    std::iota(view.to_global.begin(), view.to_global.end(), NodeId{0});
    view.labeled = split.labeled;
    view.val = split.val;
  } else {
    const SubgraphPair pair = partition_inductive(g, split);
    const Graph& obs = pair.g_obs;
    view.visible = Graph::features_only(obs.features().detached(),
                                        std::vector<Label>(obs.labels().begin(), obs.labels().end()),
                                        obs.num_classes());
    view.to_global = pair.obs_to_global;
    view.labeled = pair.to_obs(split.labeled);
    view.val = pair.to_obs(split.val);
  }
  for (NodeId v : view.labeled) view.labeled_y.push_back(view.visible.labels()[v]);
  view.distill.resize(view.visible.num_nodes());
  std::iota(view.distill.begin(), view.distill.end(), NodeId{0});
  return view;
}

std::vector<NodeId> distillation_nodes(const Graph& g, const NodeSplit& split, Setting setting) {
  split.validate(g.num_nodes());
  std::vector<NodeId> out;
  if (setting == Setting::transductive) {
    out.resize(g.num_nodes());
    std::iota(out.begin(), out.end(), NodeId{0});
    return out;
  }
  std::vector<char> inductive(g.num_nodes(), 0);
  for (NodeId v : split.test_ind) inductive[v] = 1;
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (!inductive[v]) out.push_back(v);
  return out;
}

SoftTargets teacher_soft_targets(const Model& teacher, const Graph& g, const NodeSplit& split,
                                 Setting setting) {
  if (!teacher.trained) throw ProtocolError("soft targets requested from an untrained teacher");
  if (teacher.setting != setting)
    throw ProtocolError(std::string("teacher was trained for the ") + to_string(teacher.setting) +
                        " setting, not " + to_string(setting));
  if (setting == Setting::transductive) {
    const auto nodes = distillation_nodes(g, split, setting);
    return predict_soft_targets(teacher, g, nodes);
  }
  const SubgraphPair pair = partition_inductive(g, split);
  std::vector<NodeId> local(pair.g_obs.num_nodes());
  std::iota(local.begin(), local.end(), NodeId{0});
  return predict_soft_targets(teacher, pair.g_obs, local, pair.obs_to_global);
}

namespace {

Model init_student(const StudentView& view, const StudentHparams& hp, std::size_t width_mult,
                   const SeedStream& seeds) {
  Rng init_rng = seeds.rng("student/init");
  Model m;
  m.arch = Arch::mlp;
  m.params = MlpParams::init(view.visible.feature_dim(), hp.hidden_dim * width_mult,
                             view.visible.num_classes(), hp.num_layers, hp.dropout, hp.norm, init_rng);
  return m;
}

FitOptions fit_options(const StudentHparams& hp) {
  FitOptions opts;
  opts.adam.lr = hp.lr;
  opts.adam.weight_decay = hp.weight_decay;
  opts.max_epochs = hp.max_epochs;
  opts.patience = hp.patience;
  return opts;
}

/// One student run on `view` with `objective` over the visible rows.
StudentResult run_student(const StudentView& view, const StudentHparams& hp, const DistillConfig& cfg,
                          const Objective& objective, const SeedStream& seeds, const std::string& role) {
  StudentResult r{init_student(view, hp, cfg.width_mult, seeds), {}, hp};
  r.model.role = role;
  Rng dropout_rng = seeds.rng("student/dropout");
  // An MLP scores each row independently, so validation only needs the val rows.
  const Tensor val_x = gather_rows(view.visible.features(), view.val);
  std::vector<Label> val_y;
  for (NodeId v : view.val) val_y.push_back(view.visible.labels()[v]);
  std::vector<NodeId> val_rows(view.val.size());
  std::iota(val_rows.begin(), val_rows.end(), NodeId{0});
  r.trace = fit(
      r.model, view.visible, objective,
      [&](const Model& m) { return accuracy(mlp_forward(std::get<MlpParams>(m.params), val_x), val_y, val_rows); },
      fit_options(hp), dropout_rng);
  r.model.setting = cfg.setting;
  return r;
}

/// The student hyperparameter grid: lr x weight decay x dropout.
std::vector<StudentHparams> search_grid(const StudentHparams& base) {
  std::vector<StudentHparams> grid;
  for (double lr : {0.01, 0.005, 0.001})
    for (double wd : {0.0, 0.001, 0.002, 0.005, 0.01})
      for (double dropout : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6}) {
        StudentHparams hp = base;
        hp.lr = lr;
        hp.weight_decay = wd;
        hp.dropout = dropout;
        grid.push_back(hp);
      }
  return grid;
}

StudentResult train_with_optional_search(const StudentView& view, const DistillConfig& cfg,
                                         const Objective& objective, const SeedStream& seeds,
                                         const std::string& role) {
  if (!cfg.search) return run_student(view, cfg.student, cfg, objective, seeds, role);
  std::optional<StudentResult> best;
  for (const StudentHparams& hp : search_grid(cfg.student)) {
    StudentResult r = run_student(view, hp, cfg, objective, seeds, role);
    if (!best || r.trace.best_val_acc > best->trace.best_val_acc) best = std::move(r);
  }
  return std::move(*best);
}

}  // namespace

StudentResult train_glnn(const Graph& g, const NodeSplit& split, const SoftTargets& z,
                         const DistillConfig& cfg, const SeedStream& seeds) {
  cfg.validate();
  const StudentView view = make_student_view(g, split, cfg.setting);
  Tensor targets;
  if (cfg.lambda < 1.0) {
    if (z.num_classes() != view.visible.num_classes())
      throw ShapeError("soft targets have " + std::to_string(z.num_classes()) + " classes, graph has " +
                       std::to_string(view.visible.num_classes()));
    std::vector<NodeId> global(view.distill.size());
    for (std::size_t i = 0; i < view.distill.size(); ++i) global[i] = view.to_global[view.distill[i]];
    targets = z.gather(global);
  }
  const Objective objective = [&](const Tensor& logits) {
    return distill_objective(logits, view.labeled, view.labeled_y, view.distill, targets, cfg.lambda,
                             cfg.kl_direction);
  };
  return train_with_optional_search(view, cfg, objective, seeds, "glnn");
}

StudentResult train_glnn(const Model& teacher, const Graph& g, const NodeSplit& split,
                         const DistillConfig& cfg, const SeedStream& seeds) {
  cfg.validate();
  const SoftTargets z = teacher_soft_targets(teacher, g, split, cfg.setting);
  return train_glnn(g, split, z, cfg, seeds);
}

StudentResult train_plain_mlp(const Graph& g, const NodeSplit& split, const DistillConfig& cfg,
                              const SeedStream& seeds) {
  cfg.validate();
  const StudentView view = make_student_view(g, split, cfg.setting);
  const Objective objective = [&](const Tensor& logits) {
    return cross_entropy(logits, view.labeled, view.labeled_y);
  };
  return train_with_optional_search(view, cfg, objective, seeds, "mlp");
}

double production_accuracy(double acc_ind, double acc_tran, double ind_rate) {
  if (!(ind_rate >= 0.0 && ind_rate <= 1.0)) throw DomainError("ind_rate must lie in [0, 1]");
  return ind_rate * acc_ind + (1.0 - ind_rate) * acc_tran;
}

// ---- evaluation -------------------------------------------------------------------

EvalReport evaluate(const Model& m, const Graph& g, const NodeSplit& split, Setting setting) {
  if (!m.trained) throw ProtocolError("cannot evaluate an untrained model");
  if (m.setting != setting)
    throw ProtocolError(std::string("model was trained for the ") + to_string(m.setting) +
                        " setting, not " + to_string(setting));
  split.validate(g.num_nodes());
  EvalReport r;
  r.arch = to_string(m.arch);
  r.role = m.role;
  r.setting = setting;
  r.ind_rate = split.ind_rate;

  const Tensor full_logits = predict_logits(m, g);
  if (setting == Setting::transductive) {
    std::vector<NodeId> test = split.test_obs;
    test.insert(test.end(), split.test_ind.begin(), split.test_ind.end());
    r.acc_tran = accuracy(full_logits, g.labels(), test);
    r.acc_prod = r.acc_tran;
  } else {
    const SubgraphPair pair = partition_inductive(g, split);
    const Tensor obs_logits = predict_logits(m, pair.g_obs);
    r.acc_tran = accuracy(obs_logits, pair.g_obs.labels(), pair.to_obs(split.test_obs));
    if (!split.test_ind.empty()) {
      r.acc_ind = accuracy(full_logits, g.labels(), split.test_ind);
      r.acc_prod = production_accuracy(*r.acc_ind, r.acc_tran, split.ind_rate);
    } else {
      r.acc_prod = r.acc_tran;
    }
  }
  if (g.has_adjacency() && g.num_edges() > 0) r.cut_loss = cut_loss(softmax_rows(full_logits), g);
  return r;
}

std::string EvalReport::to_json(bool include_timing) const {
  nlohmann::ordered_json j;
  j["arch"] = arch;
  j["role"] = role;
  j["setting"] = to_string(setting);
  j["seed"] = seed;
  j["acc_tran"] = acc_tran;
  j["acc_ind"] = acc_ind ? nlohmann::ordered_json(*acc_ind) : nlohmann::ordered_json(nullptr);
  j["acc_prod"] = acc_prod;
  j["ind_rate"] = ind_rate;
  j["cut_loss"] = cut_loss ? nlohmann::ordered_json(*cut_loss) : nlohmann::ordered_json(nullptr);
  if (include_timing) j["train_time_s"] = train_time_s;
  return j.dump(2);
}

EvalReport EvalReport::from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    EvalReport r;
    r.arch = j.at("arch").get<std::string>();
    r.role = j.value("role", "");
    r.setting = parse_setting(j.at("setting").get<std::string>());
    r.seed = j.at("seed").get<std::uint64_t>();
    r.acc_tran = j.at("acc_tran").get<double>();
    if (!j.at("acc_ind").is_null()) r.acc_ind = j.at("acc_ind").get<double>();
    r.acc_prod = j.at("acc_prod").get<double>();
    r.ind_rate = j.value("ind_rate", 0.0);
    if (j.contains("cut_loss") && !j.at("cut_loss").is_null()) r.cut_loss = j.at("cut_loss").get<double>();
    r.train_time_s = j.value("train_time_s", 0.0);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed report: ") + e.what());
  }
}

}  // namespace glnn
