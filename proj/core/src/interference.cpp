#include "csda/interference.hpp"

#include <cmath>
#include <complex>

#include "csda/errors.hpp"
#include "csda/units.hpp"

namespace csda {

InterferenceModel interference_model_from_int(int id) {
  if (id == 1) return InterferenceModel::kModel1;
  if (id == 2) return InterferenceModel::kModel2;
  throw InvalidParameter("interference model must be 1 or 2, got " +
                         std::to_string(id));
}

InterferenceModel interference_model_from_string(const std::string& name) {
  if (name == "model1" || name == "1") return InterferenceModel::kModel1;
  if (name == "model2" || name == "2") return InterferenceModel::kModel2;
  throw InvalidParameter("unknown interference model '" + name +
                         "' (expected model1 or model2)");
}

std::string to_string(InterferenceModel model) {
  return model == InterferenceModel::kModel1 ? "model1" : "model2";
}

double InterferenceSpec::power_w() const { return from_db(power_dbw); }

void InterferenceSpec::validate() const {
  require(std::isfinite(power_dbw), "interference power must be finite dBW");
  require(p_alpha >= 0.0 && p_alpha <= 1.0, "p_alpha must be in [0, 1]");
}

int gate(const InterferenceSpec& spec, RngStream& rng) {
  spec.validate();
  return rng.bernoulli(spec.p_alpha) ? 1 : 0;
}

double effective_power_model1_w(const InterferenceSpec& spec, int alpha) {
  require(alpha == 0 || alpha == 1, "gate indicator must be 0 or 1");
  return alpha == 0 ? 0.0 : spec.power_w();
}

double effective_power_model2_w(const InterferenceSpec& spec, int alpha,
                                RngStream& rng) {
  require(alpha == 0 || alpha == 1, "gate indicator must be 0 or 1");
  const std::complex<double> z = rng.complex_normal();
  return alpha == 0 ? 0.0 : spec.power_w() * std::norm(z);
}

}  // namespace csda
