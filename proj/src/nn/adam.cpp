#include "foldgan/nn/adam.hpp"

#include <cmath>

#include "foldgan/kernels/kernels.hpp"

namespace foldgan::nn {

template <typename T>
Adam<T>::Adam(const std::vector<Param<T>*>& params, AdamConfig config) : config_(config) {
  for (const auto* p : params) {
    m_.emplace_back(p->value.shape());
    v_.emplace_back(p->value.shape());
  }
}

template <typename T>
void Adam<T>::step(const std::vector<Param<T>*>& params) {
  if (params.size() != m_.size()) throw ShapeError("adam: parameter list differs from construction");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->grad.shape() != m_[i].shape())
      throw ShapeError("adam: gradient shape mismatch for " + params[i]->name);
    if (!kernels::all_finite<T>(params[i]->grad.data()))
      throw DivergedError("diverged: non-finite gradient in " + params[i]->name);
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    kernels::adam_update<T>(params[i]->value.data(), params[i]->grad.data(), m_[i].data(), v_[i].data(),
                            static_cast<T>(config_.lr), static_cast<T>(config_.beta1),
                            static_cast<T>(config_.beta2), static_cast<T>(config_.eps), static_cast<T>(bc1),
                            static_cast<T>(bc2));
  }
}

template class Adam<float>;
template class Adam<double>;

}  // namespace foldgan::nn
