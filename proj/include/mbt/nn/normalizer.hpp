#ifndef MBT_NN_NORMALIZER_HPP_
#define MBT_NN_NORMALIZER_HPP_

#include "mbt/nn/tape.hpp"

namespace mbt::nn {

// Running per-feature mean and variance, merged batch by batch.
class RunningNormalizer {
 public:
  explicit RunningNormalizer(int size = 0, double clip = 10.0, double eps = 1e-8);

  // Columns of `batch` are samples.
  void Update(const Matrix& batch);
  Matrix Normalize(const Matrix& x) const;

  int size() const { return static_cast<int>(mean_.size()); }
  double count() const { return count_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& var() const { return var_; }
  void Set(double count, Eigen::VectorXd mean, Eigen::VectorXd var);

 private:
  double clip_;
  double eps_;
  double count_ = 0.0;
  Eigen::VectorXd mean_;
  Eigen::VectorXd var_;
};

}  // namespace mbt::nn

#endif  // MBT_NN_NORMALIZER_HPP_
