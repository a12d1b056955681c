#pragma once

#include <cstdint>
#include <vector>

#include "pgnnff/feedforward.hpp"
#include "pgnnff/plant.hpp"
#include "pgnnff/training.hpp"

namespace pgnnff {

/// generate_ff -> closed loop (dither off, encoder quantization as
/// configured) -> tracking error against the true plant output.
TrackingResult run_tracking_experiment(const Model& model,
                                       const ReferenceProfile& reference,
                                       const PlantConfig& plant_cfg);

struct SweepRow {
  double lambda = 0.0;
  std::uint64_t seed = 0;
  double final_data_fit = 0.0;   // data-fit term at the returned iterate
  double final_lip_dist2 = 0.0;  // ||theta_phy - theta_LIP||^2, ditto
  double best_cost = 0.0;
  long best_iteration = 0;
};

/// Drift-vs-fit study: one training run per (lambda, seed) with Lambda =
/// lambda * I, identical hidden initializations across lambdas per seed.
std::vector<SweepRow> lambda_sweep(const Dataset& data, const BasisMap& map,
                                   const RegressorSpec& spec,
                                   const TrainingConfig& base,
                                   const std::vector<double>& lambdas,
                                   const std::vector<std::uint64_t>& seeds);

struct TableCell {
  TrainMode mode = TrainMode::Regularized;
  std::string reference_id;
  int n_l = 16;
  std::uint64_t seed = 0;
  double mae = 0.0;
  double best_cost = 0.0;
};

/// MAE matrix over (mode x reference x n_l x seed): train once per
/// (mode, n_l, seed) on the training set, then run the tracking experiment
/// on every reference. Cells are ordered deterministically; independent
/// trainings may run on `threads` workers.
std::vector<TableCell> comparison_table(
    const Dataset& train_data, const std::vector<ReferenceProfile>& references,
    const std::vector<TrainMode>& modes, const std::vector<int>& nl_values,
    const std::vector<std::uint64_t>& seeds, const BasisMap& map,
    const RegressorSpec& spec, const TrainingConfig& base,
    const PlantConfig& plant_cfg, int threads = 1);

}  // namespace pgnnff
