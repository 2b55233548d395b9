#include "mbt/nn/normalizer.hpp"

#include "mbt/common/errors.hpp"

namespace mbt::nn {

RunningNormalizer::RunningNormalizer(int size, double clip, double eps)
    : clip_(clip), eps_(eps), mean_(Eigen::VectorXd::Zero(size)),
      var_(Eigen::VectorXd::Ones(size)) {}

void RunningNormalizer::Update(const Matrix& batch) {
  if (batch.rows() != size()) throw ShapeError("normalizer update: feature size mismatch");
  const double n = static_cast<double>(batch.cols());
  if (n == 0.0) return;
  const Eigen::VectorXd batch_mean = batch.rowwise().mean();
  const Eigen::VectorXd batch_var =
      (batch.colwise() - batch_mean).array().square().rowwise().sum() / n;
  if (count_ == 0.0) {
    count_ = n;
    mean_ = batch_mean;
    var_ = batch_var;
    return;
  }
  const double total = count_ + n;
  const Eigen::VectorXd delta = batch_mean - mean_;
  const Eigen::VectorXd m2 = var_ * count_ + batch_var * n +
                             delta.array().square().matrix() * (count_ * n / total);
  mean_ += delta * (n / total);
  var_ = m2 / total;
  count_ = total;
}

Matrix RunningNormalizer::Normalize(const Matrix& x) const {
  if (x.rows() != size()) throw ShapeError("normalizer input: feature size mismatch");
  const Eigen::ArrayXd inv = (var_.array() + eps_).rsqrt();
  Matrix out = ((x.colwise() - mean_).array().colwise() * inv).matrix();
  return out.cwiseMax(-clip_).cwiseMin(clip_);
}

void RunningNormalizer::Set(double count, Eigen::VectorXd mean, Eigen::VectorXd var) {
  if (mean.size() != var.size()) throw ShapeError("normalizer statistics size mismatch");
  count_ = count;
  mean_ = std::move(mean);
  var_ = std::move(var);
}

}  // namespace mbt::nn
