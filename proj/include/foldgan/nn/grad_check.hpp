#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "foldgan/nn/network.hpp"

namespace foldgan::nn {

struct GradCheckOptions {
  double tolerance = 1e-4;
  /// Entries probed per tensor; 0 probes every entry. Probed indices are
  /// drawn without replacement from `seed`.
  std::size_t max_entries_per_tensor = 0;
  std::uint64_t seed = 1;
  Mode mode = Mode::train_fixed_stats;
};

struct GradCheckEntry {
  std::string tensor;
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_error = 0.0;
  std::string worst_tensor;
  bool passed = false;
};

/// |a - n| / max(|a|, |n|, floor). The floor keeps entries whose true
/// gradient is zero from producing 0/0.
double relative_error(double analytic, double numeric, double floor = 1e-7);

/// Smallest derivative a central difference with step h can resolve on a
/// loss of this magnitude: 1e4 ulps of the loss over 2h, so one ulp of
/// rounding in the difference costs at most 1e-4 relative error. Never
/// below 1e-7.
double resolution_floor(double loss_magnitude, double h);

/// Central step for a parameter of value theta: 1e-5 * max(1, |theta|).
double central_step(double theta);

/// Compares the gradients already stored in `params` (Param::grad) with
/// central differences of `loss`, which must evaluate the objective at the
/// current parameter values.
GradCheckReport check_gradients(const std::vector<Param<double>*>& params, const std::function<double()>& loss,
                                 const GradCheckOptions& options);

/// Same for a free tensor (e.g. the network input).
GradCheckReport check_tensor_gradient(const std::string& name, Tensor<double>& x, const Tensor<double>& analytic,
                                      const std::function<double()>& loss, const GradCheckOptions& options);

/// Gradient check of a whole network on `input` using the scalar objective
/// <R, f(x)> for a fixed random projection R. Covers all parameters and the
/// input gradient.
GradCheckReport grad_check(Network<double>& network, const Tensor<double>& input, const GradCheckOptions& options);

/// Folds `part` into `total` (max error, pass flag, entries).
void merge_report(GradCheckReport& total, const GradCheckReport& part);

}  // namespace foldgan::nn
