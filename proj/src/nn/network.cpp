#include "foldgan/nn/network.hpp"

#include <stdexcept>

namespace foldgan::nn {

template <typename T>
Network<T>::Network(std::string name, Shape input_shape, std::vector<LayerSpec> specs, std::uint64_t seed)
    : name_(std::move(name)), input_shape_(std::move(input_shape)), specs_(std::move(specs)) {
  build(seed);
}

template <typename T>
void Network<T>::build(std::uint64_t seed) {
  layers_.clear();
  Shape shape = input_shape_;
  Rng rng(seed);
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    auto layer = make_layer<T>(specs_[i], shape);
    layer->set_name(name_ + "." + std::to_string(i) + "." + std::string(layer_kind_name(specs_[i].kind)));
    layer->init(rng);
    shape = layer->output_shape();
    layers_.push_back(std::move(layer));
  }
}

template <typename T>
Network<T>::Network(const Network& other)
    : name_(other.name_), input_shape_(other.input_shape_), specs_(other.specs_) {
  build(0);
  auto src = const_cast<Network&>(other).state();
  auto dst = state();
  for (std::size_t i = 0; i < src.size(); ++i) *dst[i].tensor = *src[i].tensor;
}

template <typename T>
Network<T>& Network<T>::operator=(const Network& other) {
  if (this != &other) {
    Network copy(other);
    *this = std::move(copy);
  }
  return *this;
}

template <typename T>
const Shape& Network<T>::output_shape() const {
  return layers_.empty() ? input_shape_ : layers_.back()->output_shape();
}

template <typename T>
Tensor<T> Network<T>::forward(const Tensor<T>& x, Mode mode) {
  if (x.rank() != input_shape_.size() + 1 || !std::equal(input_shape_.begin(), input_shape_.end(), x.shape().begin() + 1))
    throw ShapeError(name_ + ": expected per-sample input " + shape_string(input_shape_) + ", got " +
                     shape_string(x.shape()));
  Tensor<T> h = x;
  for (auto& layer : layers_) h = layer->forward(h, mode);
  return h;
}

template <typename T>
Tensor<T> Network<T>::backward(const Tensor<T>& dy, bool accumulate, std::size_t skip_last) {
  if (skip_last > layers_.size()) throw std::out_of_range("backward: skip_last exceeds layer count");
  Tensor<T> g = dy;
  for (std::size_t i = layers_.size() - skip_last; i-- > 0;) g = layers_[i]->backward(g, accumulate);
  return g;
}

template <typename T>
Tensor<T> Network<T>::backward_recording(const Tensor<T>& dy, std::vector<Tensor<T>>& output_grads, bool accumulate) {
  output_grads.assign(layers_.size(), Tensor<T>());
  Tensor<T> g = dy;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    output_grads[i] = g;
    g = layers_[i]->backward(g, accumulate);
  }
  return g;
}

template <typename T>
bool Network<T>::piecewise_linear() const {
  return std::all_of(layers_.begin(), layers_.end(), [](const auto& l) { return l->piecewise_linear(); });
}

template <typename T>
void Network<T>::accumulate_input_gradient_jvp(const Tensor<T>& direction, const std::vector<Tensor<T>>& output_grads) {
  accumulate_split_gradients(direction, 0, output_grads, false);
}

template <typename T>
void Network<T>::accumulate_split_gradients(const Tensor<T>& direction, std::size_t split,
                                            const std::vector<Tensor<T>>& output_grads, bool overwrite) {
  if (!piecewise_linear())
    throw std::logic_error(name_ + ": input-gradient JVP needs a piecewise-linear network");
  if (output_grads.size() != layers_.size()) throw std::invalid_argument(name_ + ": output gradients not recorded");
  // The input Jacobian is locally constant, so the output gradients carry no
  // tangent; only the weight-gradient terms x^T dy see the perturbed input.
  Tensor<T> t = direction;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    layers_[i]->accumulate_split_grad(t, output_grads[i], split, overwrite);
    if (i + 1 < layers_.size()) t = layers_[i]->tangent_forward(t, split);
  }
}

template <typename T>
void Network<T>::zero_grad() {
  for (auto* p : params()) p->grad.fill(T{0});
}

template <typename T>
std::vector<Param<T>*> Network<T>::params() {
  std::vector<Param<T>*> out;
  for (auto& layer : layers_)
    for (auto* p : layer->params()) out.push_back(p);
  return out;
}

template <typename T>
std::vector<StateRef<T>> Network<T>::state() {
  std::vector<StateRef<T>> out;
  for (auto& layer : layers_)
    for (auto* p : layer->params()) out.push_back({layer->name() + "." + p->name, &p->value});
  for (auto& layer : layers_)
    for (auto& b : layer->buffers()) out.push_back({layer->name() + "." + b.name, b.tensor});
  return out;
}

template <typename T>
std::size_t Network<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_)
    for (auto* p : layer->params()) n += p->value.size();
  return n;
}

template class Network<float>;
template class Network<double>;

}  // namespace foldgan::nn
