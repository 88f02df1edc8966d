// End-to-end acceptance suite. Prints one PASS / FAIL / SKIP line per
// criterion followed by a summary line. Exit status is 1 when a criterion
// fails, unless --report is given (used by ctest, which records the lines
// without turning a measured shortfall into a harness failure).

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "glnn/bench.hpp"
#include "glnn/dataset.hpp"
#include "glnn/distill.hpp"
#include "glnn/experiment.hpp"
#include "glnn/loss.hpp"
#include "glnn/metrics.hpp"
#include "glnn/optim.hpp"
#include "glnn/train.hpp"
#include "support.hpp"

namespace glnn {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

enum class Status { pass, fail, skip };

struct Outcome {
  Status status = Status::pass;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) status = Status::fail;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void info(const std::string& what) { notes.push_back("     " + what); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Shared settings -----------------------------------------------------------

constexpr double kSeparation = 1.4;
const std::vector<std::uint64_t> kSeeds{0, 1, 2, 3, 4};

Graph desk_sbm(std::uint64_t seed) {
  SbmConfig cfg;  // 2 x 500 nodes, p_in 0.05, p_out 0.005, D = 16
  cfg.feat_separation = kSeparation;
  cfg.seed = seed;
  return generate_sbm(cfg);
}

Graph large_sbm() {
  SbmConfig cfg;
  cfg.n_per_block = 50000;
  cfg.p_in = 1.8e-4;
  cfg.p_out = 2e-5;
  cfg.feat_separation = kSeparation;
  return generate_sbm(cfg);
}

std::vector<std::size_t> iota_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

std::vector<Label> labels_at(const Graph& g, std::span<const NodeId> rows) {
  std::vector<Label> y;
  for (NodeId v : rows) y.push_back(g.labels()[v]);
  return y;
}

// 1. Gradient correctness -----------------------------------------------------

LossClosure model_closure(Model& m, const Graph& g, std::function<LossValue(const Tensor&)> loss) {
  return [&m, &g, loss](bool want_grads) {
    Rng drop(0);
    ForwardCache cache;
    const Tensor logits = forward_train(m, g, drop, cache);
    const LossValue l = loss(logits);
    if (want_grads) {
      zero_grad(m);
      backward(m, g, cache, l.grad);
    }
    return l.value;
  };
}

Outcome gradient_correctness() {
  Outcome o;
  const auto start = Clock::now();
  const Graph g = testing::random_graph(20, 0.2, 8, 3, 11);
  const auto rows = iota_rows(20);
  const auto y = labels_at(g, rows);
  Rng rng(11);
  const Tensor z = softmax_rows(testing::random_tensor(20, 3, rng));
  GradCheckOptions opts;
  opts.h = 1e-4;
  opts.samples = 1u << 20;  // every coordinate

  struct Case {
    const char* name;
    Arch arch;
    bool kl;
  };
  for (const Case c : {Case{"2-layer MLP + CE", Arch::mlp, false}, Case{"2-layer MLP + KL", Arch::mlp, true},
                       Case{"2-layer SAGE + CE", Arch::sage, false}}) {
    Model m;
    m.arch = c.arch;
    if (c.arch == Arch::mlp) m.params = MlpParams::init(8, 16, 3, 2, 0.0, Norm::none, rng);
    else m.params = SageParams::init(8, 16, 3, 2, 0.0, rng);
    const auto params = parameters(m);
    const LossClosure loss = model_closure(m, g, [&](const Tensor& t) {
      return c.kl ? kl_soft_targets(t, rows, z) : cross_entropy(t, rows, y);
    });
    const GradCheckResult r = grad_check(loss, params, opts);
    o.require(r.max_rel_error < 1e-4,
              fmt("%s: max rel err %.2e over %zu coords (< 1e-4)", c.name, r.max_rel_error, r.coords_checked));
  }
  const double elapsed = seconds_since(start);
  o.require(elapsed < 10.0, fmt("runtime %.2f s (< 10 s)", elapsed));
  return o;
}

// 2. Objective reduction ------------------------------------------------------

Outcome objective_reduction() {
  Outcome o;
  const Graph g = desk_sbm(0);
  const SeedStream seeds(0);
  const NodeSplit split = make_split(g, 20, 0.1, 0.0, seeds.seed_for("split"));
  const TrainedTeacher teacher = train_teacher(g, split, Setting::transductive, TeacherHparams{}, seeds);
  const SoftTargets z = teacher_soft_targets(teacher.model, g, split, Setting::transductive);
  const StudentView view = make_student_view(g, split, Setting::transductive);
  const Tensor z_rows = z.gather(view.distill);

  const StudentHparams hp;
  FitOptions fo;
  fo.adam.lr = hp.lr;
  fo.adam.weight_decay = hp.weight_decay;
  fo.max_epochs = 50;
  fo.patience = 50;
  const Validator validator = [&](const Model& m) {
    return accuracy(predict_logits(m, view.visible), view.visible.labels(), view.val);
  };

  auto run = [&](const Objective& objective) {
    Rng init = seeds.rng("student/init");
    Model m;
    m.arch = Arch::mlp;
    m.params = MlpParams::init(g.feature_dim(), hp.hidden_dim, g.num_classes(), hp.num_layers, hp.dropout,
                               hp.norm, init);
    Rng dropout = seeds.rng("student/dropout");
    return fit(m, view.visible, objective, validator, fo, dropout).loss;
  };

  for (const double lambda : {1.0, 0.0}) {
    const auto ours = run([&](const Tensor& t) {
      return distill_objective(t, view.labeled, view.labeled_y, view.distill, z, lambda);
    });
    const auto reference = run([&](const Tensor& t) {
      return lambda == 1.0 ? cross_entropy(t, view.labeled, view.labeled_y)
                           : kl_soft_targets(t, view.distill, z_rows);
    });
    double worst = ours.size() == reference.size() ? 0.0 : INFINITY;
    for (std::size_t e = 0; e < std::min(ours.size(), reference.size()); ++e)
      worst = std::max(worst, std::abs(ours[e] - reference[e]));
    o.require(ours.size() == 50 && worst <= 1e-12,
              fmt("lambda=%.0f vs %s: %zu epochs, max |diff| %.1e (<= 1e-12)", lambda,
                  lambda == 1.0 ? "cross_entropy" : "kl_soft_targets", ours.size(), worst));
  }
  return o;
}

// 3 and 4. Desk-scale comparison and cut loss ----------------------------------

struct DeskRun {
  EvalReport sage, mlp, glnn;
};

std::vector<DeskRun> desk_runs;
double desk_seconds = 0.0;

const std::vector<DeskRun>& ensure_desk_runs() {
  if (!desk_runs.empty()) return desk_runs;
  const auto start = Clock::now();
  for (std::uint64_t seed : kSeeds) {
    const PipelineResult r = run_pipeline(desk_sbm(seed), ExperimentSpec{}, seed);
    desk_runs.push_back({r.teacher_eval, r.mlp_eval, r.glnn_eval});
  }
  desk_seconds = seconds_since(start);
  return desk_runs;
}

Outcome desk_comparison() {
  Outcome o;
  const auto& runs = ensure_desk_runs();
  double sage = 0, mlp = 0, glnn = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    o.info(fmt("seed %zu: SAGE %.2f  MLP %.2f  GLNN %.2f", i, 100 * runs[i].sage.acc_tran,
               100 * runs[i].mlp.acc_tran, 100 * runs[i].glnn.acc_tran));
    sage += runs[i].sage.acc_tran;
    mlp += runs[i].mlp.acc_tran;
    glnn += runs[i].glnn.acc_tran;
  }
  const double n = static_cast<double>(runs.size());
  sage = 100 * sage / n;
  mlp = 100 * mlp / n;
  glnn = 100 * glnn / n;
  o.info(fmt("mean: SAGE %.2f  MLP %.2f  GLNN %.2f (feature separation %.1f)", sage, mlp, glnn, kSeparation));
  o.require(mlp >= 70.0 && mlp <= 85.0, fmt("MLP mean %.2f in the calibrated 70-85 band", mlp));
  o.require(glnn >= mlp + 2.0, fmt("GLNN %.2f >= MLP + 2 = %.2f", glnn, mlp + 2.0));
  o.require(glnn >= sage - 2.0, fmt("GLNN %.2f >= SAGE - 2 = %.2f", glnn, sage - 2.0));
  o.require(desk_seconds < 180.0, fmt("runtime %.1f s (< 180 s)", desk_seconds));
  return o;
}

double dense_cut_loss(const Tensor& y, const Graph& g) {
  const auto a = testing::dense_adjacency(g);
  const std::size_t n = a.size();
  double num = 0, den = 0;
  for (std::size_t k = 0; k < y.cols(); ++k)
    for (std::size_t i = 0; i < n; ++i) {
      double deg = 0;
      for (std::size_t j = 0; j < n; ++j) {
        num += y(i, k) * a[i][j] * y(j, k);
        deg += a[i][j];
      }
      den += y(i, k) * deg * y(i, k);
    }
  return num / den;
}

Outcome cut_loss_ordering() {
  Outcome o;
  const auto& runs = ensure_desk_runs();
  int ordered = 0;
  double sage = 0, mlp = 0, glnn = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const double s = *runs[i].sage.cut_loss, m = *runs[i].mlp.cut_loss, gl = *runs[i].glnn.cut_loss;
    const bool ok = s > gl && gl > m;
    ordered += ok;
    sage += s;
    mlp += m;
    glnn += gl;
    o.info(fmt("seed %zu: SAGE %.6f  GLNN %.6f  MLP %.6f  %s", i, s, gl, m,
               ok ? "ordered" : (s > gl ? "GLNN <= MLP" : "SAGE <= GLNN")));
  }
  const double n = static_cast<double>(runs.size());
  o.info(fmt("mean: SAGE %.4f  GLNN %.4f  MLP %.4f   published: 0.9221 / 0.8986 / 0.7644", sage / n, glnn / n,
             mlp / n));
  o.require(ordered >= 4, fmt("SAGE > GLNN > MLP in %d/5 seeds (>= 4)", ordered));

  double worst = 0.0;
  int instances = 0;
  for (std::uint64_t seed = 0; instances < 100; ++seed) {
    const Graph g = testing::random_graph(20, 0.2, 1, 1, 1000 + seed);
    if (g.num_edges() == 0) continue;
    Rng rng(seed);
    const Tensor y = softmax_rows(testing::random_tensor(20, 3, rng, 2.0));
    worst = std::max(worst, std::abs(cut_loss(y, g) - dense_cut_loss(y, g)));
    ++instances;
  }
  o.require(worst <= 1e-12, fmt("dense-trace oracle on %d instances: max |diff| %.1e (<= 1e-12)", instances, worst));
  return o;
}

// 5. Inductive protocol -------------------------------------------------------

std::size_t crossing_edges(const Graph& g, const NodeSplit& split, const SubgraphPair& pair) {
  const std::set<NodeId> ind(split.test_ind.begin(), split.test_ind.end());
  std::size_t crossing = 0;
  // Every observed edge must join two observed nodes and exist in g.
  for (NodeId u = 0; u < pair.g_obs.num_nodes(); ++u)
    for (NodeId w : pair.g_obs.neighbors(u)) {
      const NodeId a = pair.obs_to_global[u], b = pair.obs_to_global[w];
      const auto nb = g.neighbors(a);
      crossing += ind.count(a) || ind.count(b) || std::find(nb.begin(), nb.end(), b) == nb.end();
    }
  for (NodeId u = 0; u < pair.g_ind.num_nodes(); ++u)
    for (NodeId w : pair.g_ind.neighbors(u))
      crossing += !ind.count(pair.ind_to_global[u]) || !ind.count(pair.ind_to_global[w]);
  for (NodeId v : pair.obs_to_global) crossing += ind.count(v);
  return crossing;
}

Outcome inductive_protocol() {
  Outcome o;
  const Graph g = desk_sbm(0);
  std::size_t total_crossing = 0;
  bool edges_conserved = true;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const NodeSplit split = make_split(g, 20, 0.1, 0.2, seed);
    const SubgraphPair pair = partition_inductive(g, split);
    total_crossing += crossing_edges(g, split, pair);
    // Edges of g with both ends on one side must all survive.
    std::size_t kept = 0;
    std::set<NodeId> ind(split.test_ind.begin(), split.test_ind.end());
    for (NodeId u = 0; u < g.num_nodes(); ++u)
      for (NodeId w : g.neighbors(u)) kept += u < w && ind.count(u) == ind.count(w);
    edges_conserved = edges_conserved && kept == pair.g_obs.num_edges() + pair.g_ind.num_edges();
  }
  o.require(total_crossing == 0 && edges_conserved,
            fmt("20 splits: %zu crossing edges, same-side edges %s", total_crossing,
                edges_conserved ? "all kept" : "LOST"));

  // Taint: poisoning what inductive nodes carry must not change training.
  SbmConfig cfg;
  cfg.n_per_block = 150;
  cfg.p_in = 0.06;
  cfg.p_out = 0.006;
  cfg.feat_separation = kSeparation;
  const Graph small = generate_sbm(cfg);
  const NodeSplit split = make_split(small, 20, 0.1, 0.2, 4);
  Tensor x = small.features().detached();
  std::vector<Label> y(small.labels().begin(), small.labels().end());
  for (NodeId v : split.test_ind) {
    for (double& f : x.row(v)) f = 1e6;
    y[v] = 1 - y[v];
  }
  const Graph poisoned = small.with_features(std::move(x)).with_labels(std::move(y));
  TeacherHparams hp;
  hp.max_epochs = 60;
  const SeedStream seeds(4);
  TrainedTeacher clean_t = train_teacher(small, split, Setting::inductive, hp, seeds);
  TrainedTeacher dirty_t = train_teacher(poisoned, split, Setting::inductive, hp, seeds);
  DistillConfig dc;
  dc.setting = Setting::inductive;
  dc.lambda = 0.3;
  dc.student.max_epochs = 60;
  StudentResult clean_s = train_glnn(clean_t.model, small, split, dc, seeds);
  StudentResult dirty_s = train_glnn(dirty_t.model, poisoned, split, dc, seeds);
  auto same = [](Model& a, Model& b) {
    const auto pa = parameters(a), pb = parameters(b);
    if (pa.size() != pb.size()) return false;
    for (std::size_t i = 0; i < pa.size(); ++i)
      if (!(*pa[i] == *pb[i])) return false;
    return true;
  };
  const SoftTargets zc = teacher_soft_targets(clean_t.model, small, split, Setting::inductive);
  const SoftTargets zd = teacher_soft_targets(dirty_t.model, poisoned, split, Setting::inductive);
  const bool taint_free = same(clean_t.model, dirty_t.model) && zc.nodes == zd.nodes && zc.probs == zd.probs &&
                          same(clean_s.model, dirty_s.model);
  o.require(taint_free, fmt("taint test: poisoned features and labels of %zu inductive nodes leave teacher, "
                            "soft targets and student bit-identical",
                            split.test_ind.size()));

  const double prod = production_accuracy(81.33, 78.78, 0.2);
  o.require(std::abs(prod - 79.29) <= 0.005, fmt("prod(ind 81.33, tran 78.78, 0.2) = %.4f (79.29 +- 0.005)", prod));
  return o;
}

// 6. Noise ablation -----------------------------------------------------------

Outcome noise_ablation() {
  Outcome o;
  ExperimentSpec spec;
  spec.setting = Setting::inductive;
  // model -> alpha -> mean accuracy on the inductive nodes (gated) and
  // production accuracy (reported).
  std::map<std::string, std::map<std::string, double>> ind, prod;
  const double n = static_cast<double>(kSeeds.size());
  for (std::uint64_t seed : kSeeds) {
    const std::vector<std::uint64_t> one{seed};
    for (const AblationRow& row : run_ablation(desk_sbm(seed), spec, AblationAxis::noise, one)) {
      ind[row.model][row.value] += *row.report.acc_ind / n;
      prod[row.model][row.value] += row.report.acc_prod / n;
    }
  }
  const auto alphas = axis_values(AblationAxis::noise);
  for (const auto* table : {&ind, &prod})
    for (const char* model : {"sage", "mlp", "glnn"}) {
      std::string line = std::string(table == &ind ? "ind  " : "prod ") + model + ":";
      for (const auto& a : alphas) line += fmt(" %.1f", 100 * table->at(model).at(a));
      o.info(line);
    }
  const double chance = 0.5;
  for (const char* model : {"mlp", "glnn"}) {
    const double at_one = ind[model]["1.0"];
    o.require(std::abs(at_one - chance) <= 0.10,
              fmt("%s at alpha=1: %.2f within 10 points of 1/K = 50", model, 100 * at_one));
  }
  for (const char* model : {"sage", "mlp", "glnn"}) {
    double worst_rise = 0.0;
    for (std::size_t i = 1; i < alphas.size(); ++i)
      worst_rise = std::max(worst_rise, ind[model][alphas[i]] - ind[model][alphas[i - 1]]);
    o.require(worst_rise <= 0.03, fmt("%s non-increasing in alpha: largest rise %.2f points (<= 3)", model,
                                      100 * worst_rise));
  }
  double worst_gap = INFINITY;
  for (const auto& a : alphas) worst_gap = std::min(worst_gap, ind["glnn"][a] - ind["mlp"][a]);
  o.require(worst_gap >= 0.0, fmt("GLNN >= MLP at every alpha: smallest margin %.2f points", 100 * worst_gap));
  o.info("inductive setting, ind_rate 0.2, 5 seeds; gates use accuracy on the inductive nodes");
  return o;
}

// 7. Latency ------------------------------------------------------------------

Outcome latency() {
  Outcome o;
  const auto build = Clock::now();
  const Graph big = large_sbm();
  const double degree = 2.0 * static_cast<double>(big.num_edges()) / static_cast<double>(big.num_nodes());
  o.info(fmt("large SBM: %zu nodes, average degree %.2f, built in %.1f s", big.num_nodes(), degree,
             seconds_since(build)));

  const auto sample = sample_nodes(big.num_nodes(), 100, 7);
  std::size_t mismatches = 0;
  for (NodeId v : sample)
    for (int L = 1; L <= 3; ++L) mismatches += count_fetches(big, v, L) != testing::bfs_fetch_oracle(big, v, L);
  o.require(mismatches == 0, fmt("distinct fetches vs BFS oracle on 100 nodes, L=1..3: %zu mismatches", mismatches));

  // Models are trained on the desk graph and deployed on the large one;
  // both come from the same generator, so the features are comparable.
  const Graph desk = desk_sbm(0);
  const SeedStream seeds(0);
  const NodeSplit split = make_split(desk, 20, 0.1, 0.0, seeds.seed_for("split"));
  BenchOptions bo;
  bo.n_nodes = 10;
  // Sub-millisecond timings need many repetitions for a stable median.
  bo.repetitions = 201;
  bo.warmups = 20;

  std::vector<double> layers, mlp_ms;
  for (int L = 1; L <= 5; ++L) {
    DistillConfig dc;
    dc.student.num_layers = static_cast<std::size_t>(L);
    const StudentResult mlp = train_plain_mlp(desk, split, dc, seeds);
    const LatencyReport r = bench_inference(mlp.model, big, bo);
    layers.push_back(L);
    mlp_ms.push_back(r.median_ms());
  }
  std::string times = "MLP median ms for L=1..5:";
  for (double t : mlp_ms) times += fmt(" %.4f", t);
  o.info(times);
  const GrowthFit fitted = fit_growth(layers, mlp_ms);
  o.require(fitted.linear_r2 > fitted.exp_r2,
            fmt("MLP time vs L: linear R^2 %.4f > exponential R^2 %.4f", fitted.linear_r2, fitted.exp_r2));

  TeacherHparams hp;
  hp.num_layers = 3;
  const TrainedTeacher sage = train_teacher(desk, split, Setting::transductive, hp, seeds);
  DistillConfig dc;
  dc.student.num_layers = 3;
  const StudentResult glnn = train_glnn(sage.model, desk, split, dc, seeds);
  bo.repetitions = 11;
  const LatencyReport rs = bench_inference(sage.model, big, bo);
  const LatencyReport rg = bench_inference(glnn.model, big, bo);
  const double ratio = rs.median_ms() / rg.median_ms();
  o.info(fmt("10 nodes: SAGE (3 layers, full neighbourhood) %.3f ms, GLNN %.4f ms, %llu distinct fetches",
             rs.median_ms(), rg.median_ms(), static_cast<unsigned long long>(rs.total_fetches_distinct())));
  o.require(ratio >= 10.0, fmt("GLNN speed-up %.1fx (>= 10x; published 146.55x / 273.98x on larger graphs)", ratio));
  return o;
}

// 8. Expressiveness counter ---------------------------------------------------

Outcome expressiveness() {
  Outcome o;
  for (const auto& [l, want] : {std::pair{1, 3ull}, std::pair{2, 27ull}}) {
    const auto got = equivalence_lower_bound(2, 3, l).exact;
    o.require(got == std::optional<std::uint64_t>(want),
              fmt("bound(2,3,%d) = %llu (%llu)", l, got ? static_cast<unsigned long long>(*got) : 0ull, want));
  }
  int violations = 0, cells = 0;
  for (std::uint64_t x = 2; x <= 10; ++x)
    for (std::uint64_t m = 3; m <= 6; ++m)
      for (int l = 1; l <= 4; ++l) {
        ++cells;
        const double here = equivalence_lower_bound(x, m, l).log10_count;
        if (x < 10 && !(equivalence_lower_bound(x + 1, m, l).log10_count > here)) ++violations;
        if (m < 6 && !(equivalence_lower_bound(x, m + 1, l).log10_count > here)) ++violations;
        if (l < 4 && !(equivalence_lower_bound(x, m, l + 1).log10_count > here)) ++violations;
      }
  o.require(violations == 0, fmt("monotone in X, m and L over %d grid cells: %d violations", cells, violations));
  return o;
}

// 9. Optional real data -------------------------------------------------------

Outcome cora_check() {
  Outcome o;
  const char* dir = std::getenv("GLNN_CORA_DIR");
  if (!dir || !*dir) {
    o.status = Status::skip;
    o.info("set GLNN_CORA_DIR to a directory with edges.txt, features.csv and labels.txt");
    return o;
  }
  const Graph g = load_graph(DatasetFiles::in_directory(dir));
  double sage = 0, mlp = 0, glnn = 0;
  for (std::uint64_t seed : kSeeds) {
    const PipelineResult r = run_pipeline(g, ExperimentSpec{}, seed);
    o.info(fmt("seed %llu: SAGE %.2f  MLP %.2f  GLNN %.2f", (unsigned long long)seed, 100 * r.teacher_eval.acc_tran,
               100 * r.mlp_eval.acc_tran, 100 * r.glnn_eval.acc_tran));
    sage += r.teacher_eval.acc_tran;
    mlp += r.mlp_eval.acc_tran;
    glnn += r.glnn_eval.acc_tran;
  }
  const double n = static_cast<double>(kSeeds.size());
  sage = 100 * sage / n;
  mlp = 100 * mlp / n;
  glnn = 100 * glnn / n;
  o.require(std::abs(sage - 80.52) <= 3.0, fmt("SAGE %.2f within 80.52 +- 3", sage));
  o.require(std::abs(mlp - 59.22) <= 3.0, fmt("MLP %.2f within 59.22 +- 3", mlp));
  o.require(glnn >= 75.0, fmt("GLNN %.2f >= 75", glnn));
  return o;
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "gradient correctness", gradient_correctness},
    {2, "objective reduction", objective_reduction},
    {3, "desk-scale SBM comparison", desk_comparison},
    {4, "cut-loss ordering", cut_loss_ordering},
    {5, "inductive protocol", inductive_protocol},
    {6, "noise ablation", noise_ablation},
    {7, "inference latency", latency},
    {8, "expressiveness counter", expressiveness},
    {9, "real-data check", cora_check},
};

}  // namespace
}  // namespace glnn

int main(int argc, char** argv) {
  CLI::App app{"GLNN acceptance suite"};
  std::vector<int> only;
  bool report = false;
  std::string log_path;
  app.add_option("--only", only, "Run only these criteria (1-9)")->check(CLI::Range(1, 9));
  app.add_flag("--report", report, "Exit 0 when every criterion ran, whatever its verdict");
  app.add_option("--log", log_path, "Also write the report to this file");
  CLI11_PARSE(app, argc, argv);

  std::FILE* log = log_path.empty() ? nullptr : std::fopen(log_path.c_str(), "w");
  if (!log_path.empty() && !log) {
    std::fprintf(stderr, "cannot write %s\n", log_path.c_str());
    return 2;
  }
  auto emit = [&](const std::string& line) {
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    if (log) {
      std::fprintf(log, "%s\n", line.c_str());
      std::fflush(log);
    }
  };

  int passed = 0, failed = 0, skipped = 0;
  for (const auto& c : glnn::kCriteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = glnn::Clock::now();
    glnn::Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.status = glnn::Status::fail;
      o.notes.push_back(std::string("FAIL error: ") + e.what());
    }
    const char* tag = o.status == glnn::Status::pass ? "PASS" : o.status == glnn::Status::fail ? "FAIL" : "SKIP";
    emit(glnn::fmt("%s  %d. %s (%.1f s)", tag, c.id, c.name, glnn::seconds_since(start)));
    for (const auto& note : o.notes) emit("        " + note);
    (o.status == glnn::Status::pass ? passed : o.status == glnn::Status::fail ? failed : skipped)++;
  }
  emit(glnn::fmt("acceptance: %d passed, %d failed, %d skipped", passed, failed, skipped));
  if (log) std::fclose(log);
  return failed == 0 || report ? 0 : 1;
}
