#ifndef MBT_NN_ACTIVATIONS_HPP_
#define MBT_NN_ACTIVATIONS_HPP_

#include <Eigen/Dense>

namespace mbt::nn {

// Vectorized activations shared by the tape and the inference path so both
// produce identical values. tanh goes through the logistic function, which
// Eigen vectorizes for double while std::tanh is scalar.
template <typename Derived>
Eigen::ArrayXXd SigmoidOf(const Eigen::ArrayBase<Derived>& x) {
  return x.logistic();
}

template <typename Derived>
Eigen::ArrayXXd TanhOf(const Eigen::ArrayBase<Derived>& x) {
  return 2.0 * (2.0 * x).logistic() - 1.0;
}

}  // namespace mbt::nn

#endif  // MBT_NN_ACTIVATIONS_HPP_
