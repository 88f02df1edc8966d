#include "glnn/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include "glnn/dataset.hpp"
#include "glnn/error.hpp"

namespace glnn {

DistillConfig ExperimentSpec::resolved_student() const {
  DistillConfig cfg = student;
  cfg.setting = setting;
  cfg.student.num_layers = student_layers.value_or(teacher.num_layers);
  cfg.student.hidden_dim = student_hidden.value_or(teacher.hidden_dim);
  return cfg;
}

Graph experiment_graph(const Graph& g, const ExperimentSpec& spec, std::uint64_t seed) {
  if (spec.noise_alpha == 0.0) return g;
  const SeedStream seeds(seed);
  return g.with_features(add_feature_noise(g.features(), spec.noise_alpha, seeds.seed_for("noise")));
}

NodeSplit experiment_split(const Graph& g, const ExperimentSpec& spec, std::uint64_t seed) {
  const SeedStream seeds(seed);
  const double rate = spec.setting == Setting::inductive ? spec.ind_rate : 0.0;
  return make_split(g, spec.labels_per_class, spec.val_fraction, rate, seeds.seed_for("split"));
}

namespace {

template <class F>
auto timed(double& seconds, F&& f) {
  const auto start = std::chrono::steady_clock::now();
  auto out = f();
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace

PipelineResult run_pipeline(const Graph& g0, const ExperimentSpec& spec, std::uint64_t seed) {
  const SeedStream seeds(seed);
  const Graph g = experiment_graph(g0, spec, seed);
  PipelineResult r;
  r.split = experiment_split(g, spec, seed);
  const DistillConfig cfg = spec.resolved_student();

  double t_teacher = 0, t_mlp = 0, t_glnn = 0;
  r.teacher = timed(t_teacher, [&] { return train_teacher(g, r.split, spec.setting, spec.teacher, seeds); });
  r.mlp = timed(t_mlp, [&] { return train_plain_mlp(g, r.split, cfg, seeds); });
  r.glnn = timed(t_glnn, [&] { return train_glnn(r.teacher.model, g, r.split, cfg, seeds); });

  r.teacher_eval = evaluate(r.teacher.model, g, r.split, spec.setting);
  r.mlp_eval = evaluate(r.mlp.model, g, r.split, spec.setting);
  r.glnn_eval = evaluate(r.glnn.model, g, r.split, spec.setting);
  r.teacher_eval.train_time_s = t_teacher;
  r.mlp_eval.train_time_s = t_mlp;
  r.glnn_eval.train_time_s = t_glnn;
  for (EvalReport* e : {&r.teacher_eval, &r.mlp_eval, &r.glnn_eval}) e->seed = seed;
  return r;
}

const char* to_string(AblationAxis a) noexcept {
  switch (a) {
    case AblationAxis::noise: return "noise";
    case AblationAxis::split_rate: return "split_rate";
    case AblationAxis::teacher: return "teacher";
  }
  return "?";
}

AblationAxis parse_axis(std::string_view text) {
  if (text == "noise") return AblationAxis::noise;
  if (text == "split_rate" || text == "split") return AblationAxis::split_rate;
  if (text == "teacher") return AblationAxis::teacher;
  throw DomainError("unknown ablation axis '" + std::string(text) + "' (expected noise, split_rate or teacher)");
}

std::vector<std::string> axis_values(AblationAxis axis, const AblationOptions& opts) {
  std::vector<std::string> out;
  char buf[16];
  switch (axis) {
    case AblationAxis::noise:
      for (int i = 0; i <= 10; ++i) {
        std::snprintf(buf, sizeof buf, "%.1f", i / 10.0);
        out.emplace_back(buf);
      }
      break;
    case AblationAxis::split_rate:
      for (int i = 1; i <= (opts.extended_split ? 9 : 5); ++i) {
        std::snprintf(buf, sizeof buf, "%.1f", i / 10.0);
        out.emplace_back(buf);
      }
      break;
    case AblationAxis::teacher: out = {"sage", "gcn", "appnp"}; break;
  }
  return out;
}

std::vector<AblationRow> run_ablation(const Graph& g, const ExperimentSpec& base, AblationAxis axis,
                                      std::span<const std::uint64_t> seeds, const AblationOptions& opts) {
  if (seeds.empty()) throw DomainError("ablation needs at least one seed");
  std::vector<AblationRow> rows;
  for (const std::string& value : axis_values(axis, opts)) {
    ExperimentSpec spec = base;
    switch (axis) {
      case AblationAxis::noise: spec.noise_alpha = std::stod(value); break;
      case AblationAxis::split_rate:
        spec.setting = Setting::inductive;
        spec.ind_rate = std::stod(value);
        break;
      case AblationAxis::teacher: {
        TeacherHparams hp = TeacherHparams::defaults(parse_arch(value));
        hp.max_epochs = base.teacher.max_epochs;
        hp.patience = base.teacher.patience;
        spec.teacher = hp;
        break;
      }
    }
    for (std::uint64_t seed : seeds) {
      const PipelineResult r = run_pipeline(g, spec, seed);
      for (const EvalReport* e : {&r.teacher_eval, &r.mlp_eval, &r.glnn_eval})
        rows.push_back({to_string(axis), value, seed, e->role == "teacher" ? e->arch : e->role, *e});
    }
  }
  return rows;
}

void write_ablation_csv(std::span<const AblationRow> rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  auto num = [](std::optional<double> v) {
    if (!v) return std::string();
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", *v);
    return std::string(buf);
  };
  out << "axis,value,seed,model,setting,acc_tran,acc_ind,acc_prod,cut_loss\n";
  for (const auto& r : rows)
    out << r.axis << ',' << r.value << ',' << r.seed << ',' << r.model << ',' << to_string(r.report.setting) << ','
        << num(r.report.acc_tran) << ',' << num(r.report.acc_ind) << ',' << num(r.report.acc_prod) << ','
        << num(r.report.cut_loss) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace glnn
