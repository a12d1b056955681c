#include "pgnnff/model.hpp"

#include "pgnnff/lip.hpp"
#include "pgnnff/nn.hpp"
#include "pgnnff/training.hpp"

namespace pgnnff {

PredictorKind predictor_kind_from_string(const std::string& s) {
  if (s == "lip") return PredictorKind::Lip;
  if (s == "pgnn") return PredictorKind::Pgnn;
  if (s == "nn_only") return PredictorKind::NnOnly;
  throw ConfigError("unknown predictor kind: '" + s + "'");
}

std::string to_string(PredictorKind k) {
  switch (k) {
    case PredictorKind::Lip: return "lip";
    case PredictorKind::Pgnn: return "pgnn";
    case PredictorKind::NnOnly: return "nn_only";
  }
  return "?";
}

Model Model::from_lip(LipParams p, const std::string& basis_kind,
                      const RegressorSpec& spec) {
  Model m;
  m.kind = PredictorKind::Lip;
  m.lip = std::move(p);
  m.basis_kind = basis_kind;
  m.spec = spec;
  m.id = "lip";
  return m;
}

Model Model::from_pgnn(PGNNParams p, Vec input_scaling,
                       const std::string& basis_kind,
                       const RegressorSpec& spec, bool nn_only) {
  Model m;
  m.kind = nn_only ? PredictorKind::NnOnly : PredictorKind::Pgnn;
  m.pgnn = std::move(p);
  m.input_scaling = std::move(input_scaling);
  m.basis_kind = basis_kind;
  m.spec = spec;
  m.id = to_string(m.kind);
  return m;
}

double model_predict(const Model& model, const BasisMap& map,
                     const Regressor& phi) {
  switch (model.kind) {
    case PredictorKind::Lip:
      return lip_predict(model.lip, map, phi);
    case PredictorKind::Pgnn:
      return pgnn_predict(model.pgnn, map, model.input_scaling, phi);
    case PredictorKind::NnOnly: {
      const Vec x =
          eval_basis(map, phi).cwiseProduct(model.input_scaling);
      return nn_forward(model.pgnn.nn, x);
    }
  }
  throw NumericalError("model_predict: invalid predictor kind");
}

}  // namespace pgnnff
