#include "pgnnff/evaluation.hpp"

#include <atomic>
#include <mutex>
#include <thread>

namespace pgnnff {

TrackingResult run_tracking_experiment(const Model& model,
                                       const ReferenceProfile& reference,
                                       const PlantConfig& plant_cfg) {
  const BasisMap map = make_basis(model.basis_kind, model.spec.ts);
  const std::vector<double> uff =
      generate_ff(model, map, model.spec, reference);
  ClosedLoopResult run =
      run_closed_loop(reference, &uff, plant_cfg, /*dither=*/false);
  run.tracking.model_id = model.id;
  return run.tracking;
}

std::vector<SweepRow> lambda_sweep(const Dataset& data, const BasisMap& map,
                                   const RegressorSpec& spec,
                                   const TrainingConfig& base,
                                   const std::vector<double>& lambdas,
                                   const std::vector<std::uint64_t>& seeds) {
  if (lambdas.empty() || seeds.empty())
    throw ConfigError("lambda_sweep: lambdas and seeds must be nonempty");
  const Vec anchor = base.theta_lip_ref.theta;
  std::vector<SweepRow> rows;
  rows.reserve(lambdas.size() * seeds.size());
  for (double lam : lambdas) {
    for (std::uint64_t seed : seeds) {
      TrainingConfig cfg = base;
      cfg.mode = lam > 0.0 ? TrainMode::Regularized : TrainMode::Unregularized;
      cfg.lambda_diag = Vec::Constant(map.n_out, lam);
      cfg.seed = seed;  // hidden init depends on the seed only, so runs at
                        // different lambdas share the same initialization
      const TrainResult res = train(data, map, spec, cfg);
      const auto& best = res.history.records[res.history.best_iteration];
      SweepRow row;
      row.lambda = lam;
      row.seed = seed;
      row.final_data_fit = best.data_fit;
      row.final_lip_dist2 = (res.params.theta_phy - anchor).squaredNorm();
      row.best_cost = best.total;
      row.best_iteration = res.history.best_iteration;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<TableCell> comparison_table(
    const Dataset& train_data, const std::vector<ReferenceProfile>& references,
    const std::vector<TrainMode>& modes, const std::vector<int>& nl_values,
    const std::vector<std::uint64_t>& seeds, const BasisMap& map,
    const RegressorSpec& spec, const TrainingConfig& base,
    const PlantConfig& plant_cfg, int threads) {
  if (modes.empty() || references.empty() || nl_values.empty() || seeds.empty())
    throw ConfigError("comparison_table: empty axis");

  struct Job {
    TrainMode mode;
    int n_l;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (TrainMode mode : modes)
    for (int nl : nl_values)
      for (std::uint64_t seed : seeds) jobs.push_back({mode, nl, seed});

  // One slot per (job, reference); workers fill disjoint slots, so the
  // assembled table is independent of scheduling.
  std::vector<TableCell> cells(jobs.size() * references.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto run_job = [&](std::size_t j) {
    const Job& job = jobs[j];
    TrainingConfig cfg = base;
    cfg.mode = job.mode;
    cfg.hidden_widths = {job.n_l};
    cfg.seed = job.seed;
    if (job.mode == TrainMode::Unregularized)
      cfg.lambda_diag = Vec::Zero(map.n_out);
    const TrainResult res = train(train_data, map, spec, cfg);
    Model model = Model::from_pgnn(res.params, res.input_scaling, map.name,
                                   spec, job.mode == TrainMode::PinnBaseline);
    model.id = to_string(job.mode) + "_nl" + std::to_string(job.n_l) + "_s" +
               std::to_string(job.seed);
    for (std::size_t r = 0; r < references.size(); ++r) {
      const TrackingResult tr =
          run_tracking_experiment(model, references[r], plant_cfg);
      TableCell cell;
      cell.mode = job.mode;
      cell.reference_id = references[r].id;
      cell.n_l = job.n_l;
      cell.seed = job.seed;
      cell.mae = tr.mae;
      cell.best_cost = res.history.records[res.history.best_iteration].total;
      cells[j * references.size() + r] = cell;
    }
  };

  auto worker = [&]() {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      try {
        run_job(j);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int n_workers =
      std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return cells;
}

}  // namespace pgnnff
