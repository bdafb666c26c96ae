#pragma once

#include <string>

#include "csda/rng.hpp"

namespace csda {

// Model 1 injects a constant-power tone whenever the Bernoulli gate is on.
// Model 2 passes the gated power through a fresh CN(0,1) draw, so the
// injected power is exponentially distributed and noise-like.
enum class InterferenceModel : int {
  kModel1 = 1,
  kModel2 = 2,
};

InterferenceModel interference_model_from_int(int id);
InterferenceModel interference_model_from_string(const std::string& name);
std::string to_string(InterferenceModel model);

struct InterferenceSpec {
  InterferenceModel model = InterferenceModel::kModel1;
  double power_dbw = -115.0;  // received interference power I
  double p_alpha = 0.5;       // Bernoulli gate probability

  double power_w() const;
  void validate() const;
};

// One Bernoulli(p_alpha) gate draw; consumes one u64. p_alpha = 1 models a
// continuously present interferer.
int gate(const InterferenceSpec& spec, RngStream& rng);

// I * alpha^2: either I or nothing.
double effective_power_model1_w(const InterferenceSpec& spec, int alpha);

// I * |alpha * z|^2 with z ~ CN(0,1); consumes two u64s. |z|^2 is unit-mean
// exponential, so the two models share E[power] = p_alpha * I.
double effective_power_model2_w(const InterferenceSpec& spec, int alpha,
                                RngStream& rng);

}  // namespace csda
