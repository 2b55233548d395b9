#ifndef MBT_NN_TAPE_HPP_
#define MBT_NN_TAPE_HPP_

#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace mbt::nn {

using Matrix = Eigen::MatrixXd;

// Trainable tensor with an accumulated gradient of the same shape.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, Matrix v)
      : name(std::move(n)), value(std::move(v)), grad(Matrix::Zero(value.rows(), value.cols())) {}
  void ZeroGrad() { grad.setZero(value.rows(), value.cols()); }
};

// Reverse-mode tape over dense matrices. Columns are usually batch entries.
// Nodes are appended in evaluation order, which is therefore a topological
// order; Backward visits each node once, in reverse.
class Tape {
 public:
  using Var = int;

  Var Constant(Matrix value);
  // Leaf bound to `p`. Repeated calls for the same parameter return the same
  // node; Backward adds that node's gradient into p->grad.
  Var Param(Parameter* p);

  Var MatMul(Var a, Var b);
  Var Add(Var a, Var b);
  Var Sub(Var a, Var b);
  Var Mul(Var a, Var b);                 // elementwise
  Var AddBias(Var x, Var bias);          // bias is a column, added to every column
  Var BroadcastCols(Var column, int cols);
  Var Scale(Var x, double s);
  Var AddScalar(Var x, double s);
  Var Sigmoid(Var x);
  Var Tanh(Var x);
  Var Exp(Var x);
  Var Log(Var x);
  Var Square(Var x);
  Var Min(Var a, Var b);                 // elementwise
  Var Clamp(Var x, double lo, double hi);
  Var RowSlice(Var x, int start, int rows);
  Var ConcatRows(const std::vector<Var>& parts);
  Var ConcatCols(const std::vector<Var>& parts);
  Var SumRows(Var x);                    // column sums, 1 x cols
  Var Sum(Var x);                        // 1 x 1
  Var Mean(Var x);                       // 1 x 1
  // Fused LSTM cell. weight is 4H x (in + H) with gate rows input, forget,
  // cell, output; bias is 4H x 1. Returns [h'; c'] stacked, 2H x batch.
  Var LstmCell(Var x, Var h, Var c, Var weight, Var bias);

  const Matrix& value(Var v) const { return nodes_[v].value; }
  // Gradient of the last Backward target with respect to v (zero matrix if
  // v did not influence it).
  Matrix grad(Var v) const;
  double scalar(Var v) const;

  // `loss` must be 1 x 1. Throws UsageError on a second call.
  void Backward(Var loss);

  void Clear();
  std::size_t size() const { return nodes_.size(); }

 private:
  enum class Op {
    kConstant, kParam, kMatMul, kAdd, kSub, kMul, kAddBias, kBroadcastCols,
    kScale, kAddScalar, kSigmoid, kTanh, kExp, kLog, kSquare, kMin, kClamp,
    kRowSlice, kConcatRows, kConcatCols, kSumRows, kSum, kMean, kLstmCell,
  };
  struct Node {
    Op op = Op::kConstant;
    int a = -1;
    int b = -1;
    std::vector<int> parts;
    std::vector<Matrix> aux;
    Matrix value;
    Matrix grad;
    double s0 = 0.0;
    double s1 = 0.0;
    int i0 = 0;
    Parameter* param = nullptr;
    bool needs_grad = false;
  };

  Var Push(Node node);
  void BackwardLstmCell(Node& n);
  Node Unary(Op op, Var x) const;
  void CheckSameShape(Var a, Var b, const char* op) const;
  void Accumulate(int target, const Matrix& g);

  std::vector<Node> nodes_;
  std::unordered_map<Parameter*, Var> param_nodes_;
  bool backward_done_ = false;
};

}  // namespace mbt::nn

#endif  // MBT_NN_TAPE_HPP_
