#pragma once

#include <string>

#include "pgnnff/basis.hpp"
#include "pgnnff/types.hpp"

namespace pgnnff {

enum class PredictorKind { Lip, Pgnn, NnOnly };

PredictorKind predictor_kind_from_string(const std::string& s);
std::string to_string(PredictorKind k);

/// Deployable identified inverse model: either a LIP parameter vector or a
/// PGNN (optionally NN-only, for the PINN-style baseline whose physical
/// model is not part of the predictor).
struct Model {
  PredictorKind kind = PredictorKind::Lip;
  LipParams lip;
  PGNNParams pgnn;
  Vec input_scaling;  // NN input scaling as stored in the model file
  std::string basis_kind = "clm";
  RegressorSpec spec;
  std::string id;

  static Model from_lip(LipParams p, const std::string& basis_kind,
                        const RegressorSpec& spec);
  static Model from_pgnn(PGNNParams p, Vec input_scaling,
                         const std::string& basis_kind,
                         const RegressorSpec& spec, bool nn_only = false);
};

double model_predict(const Model& model, const BasisMap& map,
                     const Regressor& phi);

}  // namespace pgnnff
