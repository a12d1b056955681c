#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pgnnff/evaluation.hpp"
#include "pgnnff/model.hpp"
#include "pgnnff/tracking.hpp"
#include "pgnnff/training.hpp"
#include "pgnnff/trajectory.hpp"
#include "pgnnff/types.hpp"

namespace pgnnff {

/// 17 significant digits; identical inputs produce identical bytes.
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path,
                     const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

// CSV formats (headers are part of the interface):
//   dataset   t,u,y
//   reference t,r
//   ff        t,u_ff
//   history   iter,total_cost,data_fit,reg_term,theta_phy_0..k
//   tracking  t,r,y,e
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);
Dataset read_dataset_csv(const std::filesystem::path& path, double ts);

void write_reference_csv(const std::filesystem::path& path,
                         const ReferenceProfile& profile);
ReferenceProfile read_reference_csv(const std::filesystem::path& path,
                                    double ts);

void write_ff_csv(const std::filesystem::path& path,
                  const std::vector<double>& uff);
std::vector<double> read_ff_csv(const std::filesystem::path& path);

void write_history_csv(const std::filesystem::path& path,
                       const TrainingHistory& history);

void write_tracking_csv(const std::filesystem::path& path,
                        const ReferenceProfile& reference,
                        const TrackingResult& result);

void write_sweep_csv(const std::filesystem::path& path,
                     const std::vector<SweepRow>& rows);

void write_table_csv(const std::filesystem::path& path,
                     const std::vector<TableCell>& cells);
/// Aligned plain-text rendering of the comparison table.
std::string render_table_text(const std::vector<TableCell>& cells);

/// Model files. A LIP file has fields {theta, basis_kind, spec}; a PGNN file
/// has {theta_phy, nn, input_scaling, basis_kind, spec, predictor} plus an
/// optional config echo under "cfg".
void write_model_json(const std::filesystem::path& path, const Model& model,
                      const nlohmann::json* cfg_echo = nullptr);
Model read_model_json(const std::filesystem::path& path);

void write_json_file(const std::filesystem::path& path,
                     const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace pgnnff
