#include "foldgan/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace foldgan::nn {

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

double resolution_floor(double loss_magnitude, double h) {
  return std::max(1e-7, 1e4 * std::numeric_limits<double>::epsilon() * loss_magnitude / (2.0 * h));
}

double central_step(double theta) { return 1e-5 * std::max(1.0, std::abs(theta)); }

namespace {

std::vector<std::size_t> probe_indices(std::size_t n, const GradCheckOptions& options, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (options.max_entries_per_tensor == 0 || options.max_entries_per_tensor >= n) return idx;
  rng.shuffle(idx.begin(), idx.end());
  idx.resize(options.max_entries_per_tensor);
  std::sort(idx.begin(), idx.end());
  return idx;
}

void probe(const std::string& name, Tensor<double>& values, const Tensor<double>& analytic,
           const std::function<double()>& loss, const GradCheckOptions& options, Rng& rng, GradCheckReport& report) {
  for (const std::size_t i : probe_indices(values.size(), options, rng)) {
    const double theta = values[i];
    const double h = central_step(theta);
    values[i] = theta + h;
    const double up = loss();
    values[i] = theta - h;
    const double down = loss();
    values[i] = theta;
    GradCheckEntry e{name, i, analytic[i], (up - down) / (2.0 * h), 0.0};
    e.rel_error = relative_error(e.analytic, e.numeric, resolution_floor(std::max(std::abs(up), std::abs(down)), h));
    if (report.entries.empty() || e.rel_error > report.max_rel_error) {
      report.max_rel_error = e.rel_error;
      report.worst_tensor = name;
    }
    report.entries.push_back(std::move(e));
  }
}

}  // namespace

void merge_report(GradCheckReport& total, const GradCheckReport& part) {
  if (part.entries.empty()) return;
  if (total.entries.empty() || part.max_rel_error > total.max_rel_error) {
    total.max_rel_error = part.max_rel_error;
    total.worst_tensor = part.worst_tensor;
  }
  total.entries.insert(total.entries.end(), part.entries.begin(), part.entries.end());
}

GradCheckReport check_gradients(const std::vector<Param<double>*>& params, const std::function<double()>& loss,
                                const GradCheckOptions& options) {
  GradCheckReport report;
  Rng rng(options.seed);
  for (auto* p : params) probe(p->name, p->value, p->grad, loss, options, rng, report);
  report.passed = report.max_rel_error < options.tolerance;
  return report;
}

GradCheckReport check_tensor_gradient(const std::string& name, Tensor<double>& x, const Tensor<double>& analytic,
                                      const std::function<double()>& loss, const GradCheckOptions& options) {
  GradCheckReport report;
  Rng rng(options.seed);
  probe(name, x, analytic, loss, options, rng, report);
  report.passed = report.max_rel_error < options.tolerance;
  return report;
}

GradCheckReport grad_check(Network<double>& network, const Tensor<double>& input, const GradCheckOptions& options) {
  Tensor<double> x = input;
  Tensor<double> y = network.forward(x, options.mode);
  Tensor<double> projection(y.shape());
  Rng rng(derive_seed(options.seed, 0x70726f6aULL));
  for (auto& v : projection.data()) v = rng.normal();

  network.zero_grad();
  const Tensor<double> dx = network.backward(projection, true);

  const auto loss = [&] { return dot(projection, network.forward(x, options.mode)); };

  GradCheckReport total;
  for (std::size_t li = 0; li < network.size(); ++li) {
    for (auto* p : network.layer(li).params()) {
      // Qualified name for the report only.
      const std::string saved = p->name;
      p->name = network.layer(li).name() + "." + saved;
      merge_report(total, check_gradients({p}, loss, options));
      p->name = saved;
    }
  }
  merge_report(total, check_tensor_gradient("input", x, dx, loss, options));
  total.passed = total.max_rel_error < options.tolerance;
  return total;
}

}  // namespace foldgan::nn
