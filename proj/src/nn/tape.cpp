#include "mbt/nn/tape.hpp"

#include <cmath>
#include <string>

#include "mbt/common/errors.hpp"
#include "mbt/nn/activations.hpp"

namespace mbt::nn {
namespace {

std::string Shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

Tape::Var Tape::Push(Node node) {
  if (backward_done_) throw UsageError("tape already differentiated; call Clear first");
  if (node.op != Op::kConstant && node.op != Op::kParam) {
    node.needs_grad = (node.a >= 0 && nodes_[node.a].needs_grad) ||
                      (node.b >= 0 && nodes_[node.b].needs_grad);
    for (int p : node.parts) node.needs_grad = node.needs_grad || nodes_[p].needs_grad;
  }
  nodes_.push_back(std::move(node));
  return static_cast<Var>(nodes_.size()) - 1;
}

void Tape::CheckSameShape(Var a, Var b, const char* op) const {
  const Matrix& x = nodes_[a].value;
  const Matrix& y = nodes_[b].value;
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw ShapeError(std::string(op) + ": " + Shape(x) + " vs " + Shape(y));
  }
}

Tape::Node Tape::Unary(Op op, Var x) const {
  Node n;
  n.op = op;
  n.a = x;
  return n;
}

Tape::Var Tape::Constant(Matrix value) {
  Node n;
  n.op = Op::kConstant;
  n.value = std::move(value);
  return Push(std::move(n));
}

Tape::Var Tape::Param(Parameter* p) {
  auto it = param_nodes_.find(p);
  if (it != param_nodes_.end()) return it->second;
  Node n;
  n.op = Op::kParam;
  n.value = p->value;
  n.param = p;
  n.needs_grad = true;
  const Var v = Push(std::move(n));
  param_nodes_[p] = v;
  return v;
}

Tape::Var Tape::MatMul(Var a, Var b) {
  const Matrix& x = nodes_[a].value;
  const Matrix& y = nodes_[b].value;
  if (x.cols() != y.rows()) throw ShapeError("MatMul: " + Shape(x) + " * " + Shape(y));
  Node n = Unary(Op::kMatMul, a);
  n.b = b;
  n.value.noalias() = x * y;
  return Push(std::move(n));
}

Tape::Var Tape::Add(Var a, Var b) {
  CheckSameShape(a, b, "Add");
  Node n = Unary(Op::kAdd, a);
  n.b = b;
  n.value = nodes_[a].value + nodes_[b].value;
  return Push(std::move(n));
}

Tape::Var Tape::Sub(Var a, Var b) {
  CheckSameShape(a, b, "Sub");
  Node n = Unary(Op::kSub, a);
  n.b = b;
  n.value = nodes_[a].value - nodes_[b].value;
  return Push(std::move(n));
}

Tape::Var Tape::Mul(Var a, Var b) {
  CheckSameShape(a, b, "Mul");
  Node n = Unary(Op::kMul, a);
  n.b = b;
  n.value = nodes_[a].value.cwiseProduct(nodes_[b].value);
  return Push(std::move(n));
}

Tape::Var Tape::AddBias(Var x, Var bias) {
  const Matrix& m = nodes_[x].value;
  const Matrix& c = nodes_[bias].value;
  if (c.cols() != 1 || c.rows() != m.rows()) {
    throw ShapeError("AddBias: " + Shape(m) + " + " + Shape(c));
  }
  Node n = Unary(Op::kAddBias, x);
  n.b = bias;
  n.value = m.colwise() + c.col(0);
  return Push(std::move(n));
}

Tape::Var Tape::BroadcastCols(Var column, int cols) {
  const Matrix& c = nodes_[column].value;
  if (c.cols() != 1) throw ShapeError("BroadcastCols: input " + Shape(c));
  Node n = Unary(Op::kBroadcastCols, column);
  n.value = c.replicate(1, cols);
  return Push(std::move(n));
}

Tape::Var Tape::Scale(Var x, double s) {
  Node n = Unary(Op::kScale, x);
  n.s0 = s;
  n.value = nodes_[x].value * s;
  return Push(std::move(n));
}

Tape::Var Tape::AddScalar(Var x, double s) {
  Node n = Unary(Op::kAddScalar, x);
  n.value = nodes_[x].value.array() + s;
  return Push(std::move(n));
}

Tape::Var Tape::Sigmoid(Var x) {
  Node n = Unary(Op::kSigmoid, x);
  n.value = SigmoidOf(nodes_[x].value.array());
  return Push(std::move(n));
}

Tape::Var Tape::Tanh(Var x) {
  Node n = Unary(Op::kTanh, x);
  n.value = TanhOf(nodes_[x].value.array());
  return Push(std::move(n));
}

Tape::Var Tape::Exp(Var x) {
  Node n = Unary(Op::kExp, x);
  n.value = nodes_[x].value.array().exp();
  return Push(std::move(n));
}

Tape::Var Tape::Log(Var x) {
  Node n = Unary(Op::kLog, x);
  n.value = nodes_[x].value.array().log();
  return Push(std::move(n));
}

Tape::Var Tape::Square(Var x) {
  Node n = Unary(Op::kSquare, x);
  n.value = nodes_[x].value.array().square();
  return Push(std::move(n));
}

Tape::Var Tape::Min(Var a, Var b) {
  CheckSameShape(a, b, "Min");
  Node n = Unary(Op::kMin, a);
  n.b = b;
  n.value = nodes_[a].value.cwiseMin(nodes_[b].value);
  return Push(std::move(n));
}

Tape::Var Tape::Clamp(Var x, double lo, double hi) {
  Node n = Unary(Op::kClamp, x);
  n.s0 = lo;
  n.s1 = hi;
  n.value = nodes_[x].value.cwiseMax(lo).cwiseMin(hi);
  return Push(std::move(n));
}

Tape::Var Tape::RowSlice(Var x, int start, int rows) {
  const Matrix& m = nodes_[x].value;
  if (start < 0 || rows < 0 || start + rows > m.rows()) {
    throw ShapeError("RowSlice out of range for " + Shape(m));
  }
  Node n = Unary(Op::kRowSlice, x);
  n.i0 = start;
  n.value = m.middleRows(start, rows);
  return Push(std::move(n));
}

Tape::Var Tape::ConcatRows(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("ConcatRows: no inputs");
  const Eigen::Index cols = nodes_[parts[0]].value.cols();
  Eigen::Index rows = 0;
  for (Var p : parts) {
    if (nodes_[p].value.cols() != cols) throw ShapeError("ConcatRows: column mismatch");
    rows += nodes_[p].value.rows();
  }
  Node n;
  n.op = Op::kConcatRows;
  n.parts = parts;
  n.value.resize(rows, cols);
  Eigen::Index at = 0;
  for (Var p : parts) {
    n.value.middleRows(at, nodes_[p].value.rows()) = nodes_[p].value;
    at += nodes_[p].value.rows();
  }
  return Push(std::move(n));
}

Tape::Var Tape::ConcatCols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("ConcatCols: no inputs");
  const Eigen::Index rows = nodes_[parts[0]].value.rows();
  Eigen::Index cols = 0;
  for (Var p : parts) {
    if (nodes_[p].value.rows() != rows) throw ShapeError("ConcatCols: row mismatch");
    cols += nodes_[p].value.cols();
  }
  Node n;
  n.op = Op::kConcatCols;
  n.parts = parts;
  n.value.resize(rows, cols);
  Eigen::Index at = 0;
  for (Var p : parts) {
    n.value.middleCols(at, nodes_[p].value.cols()) = nodes_[p].value;
    at += nodes_[p].value.cols();
  }
  return Push(std::move(n));
}

Tape::Var Tape::SumRows(Var x) {
  Node n = Unary(Op::kSumRows, x);
  n.value = nodes_[x].value.colwise().sum();
  return Push(std::move(n));
}

Tape::Var Tape::Sum(Var x) {
  Node n = Unary(Op::kSum, x);
  n.value = Matrix::Constant(1, 1, nodes_[x].value.sum());
  return Push(std::move(n));
}

Tape::Var Tape::Mean(Var x) {
  const Matrix& m = nodes_[x].value;
  if (m.size() == 0) throw ShapeError("Mean of an empty matrix");
  Node n = Unary(Op::kMean, x);
  n.value = Matrix::Constant(1, 1, m.mean());
  return Push(std::move(n));
}

Tape::Var Tape::LstmCell(Var x, Var h, Var c, Var weight, Var bias) {
  const Matrix& xv = nodes_[x].value;
  const Matrix& hv = nodes_[h].value;
  const Matrix& cv = nodes_[c].value;
  const Matrix& w = nodes_[weight].value;
  const Matrix& b = nodes_[bias].value;
  const Eigen::Index hs = hv.rows();
  const Eigen::Index batch = xv.cols();
  if (w.rows() != 4 * hs || w.cols() != xv.rows() + hs || b.rows() != 4 * hs ||
      b.cols() != 1 || hv.cols() != batch || cv.rows() != hs || cv.cols() != batch) {
    throw ShapeError("LstmCell: x " + Shape(xv) + ", h " + Shape(hv) + ", c " + Shape(cv) +
                     ", weight " + Shape(w) + ", bias " + Shape(b));
  }
  Node n;
  n.op = Op::kLstmCell;
  n.parts = {x, h, c, weight, bias};
  Matrix stacked(xv.rows() + hs, batch);
  stacked << xv, hv;
  Matrix gates = w * stacked;
  gates.colwise() += b.col(0);
  gates.topRows(2 * hs) = SigmoidOf(gates.topRows(2 * hs).array());
  gates.middleRows(2 * hs, hs) = TanhOf(gates.middleRows(2 * hs, hs).array());
  gates.bottomRows(hs) = SigmoidOf(gates.bottomRows(hs).array());
  n.value.resize(2 * hs, batch);
  n.value.bottomRows(hs) = gates.topRows(hs).array() * gates.middleRows(2 * hs, hs).array() +
                           gates.middleRows(hs, hs).array() * cv.array();
  Matrix tanh_c = TanhOf(n.value.bottomRows(hs).array());
  n.value.topRows(hs) = gates.bottomRows(hs).array() * tanh_c.array();
  n.aux = {std::move(stacked), std::move(gates), std::move(tanh_c)};
  return Push(std::move(n));
}

void Tape::BackwardLstmCell(Node& n) {
  const int x = n.parts[0], h = n.parts[1], c = n.parts[2], w = n.parts[3], b = n.parts[4];
  const Matrix& stacked = n.aux[0];
  const Matrix& gates = n.aux[1];
  const Matrix& tanh_c = n.aux[2];
  const Eigen::Index hs = tanh_c.rows();
  const auto i = gates.topRows(hs).array();
  const auto f = gates.middleRows(hs, hs).array();
  const auto g = gates.middleRows(2 * hs, hs).array();
  const auto o = gates.bottomRows(hs).array();
  const auto dh = n.grad.topRows(hs).array();
  const Eigen::ArrayXXd dc =
      n.grad.bottomRows(hs).array() + dh * o * (1.0 - tanh_c.array().square());
  Matrix dz(4 * hs, tanh_c.cols());
  dz.topRows(hs) = dc * g * i * (1.0 - i);
  dz.middleRows(hs, hs) = dc * nodes_[c].value.array() * f * (1.0 - f);
  dz.middleRows(2 * hs, hs) = dc * i * (1.0 - g.square());
  dz.bottomRows(hs) = dh * tanh_c.array() * o * (1.0 - o);
  if (nodes_[w].needs_grad) Accumulate(w, dz * stacked.transpose());
  if (nodes_[b].needs_grad) Accumulate(b, dz.rowwise().sum());
  if (nodes_[c].needs_grad) Accumulate(c, (dc * f).matrix());
  if (nodes_[x].needs_grad || nodes_[h].needs_grad) {
    const Matrix dstacked = nodes_[w].value.transpose() * dz;
    const Eigen::Index in = nodes_[x].value.rows();
    if (nodes_[x].needs_grad) Accumulate(x, dstacked.topRows(in));
    if (nodes_[h].needs_grad) Accumulate(h, dstacked.bottomRows(hs));
  }
}

Matrix Tape::grad(Var v) const {
  const Node& n = nodes_[v];
  if (n.grad.size() == 0) return Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

double Tape::scalar(Var v) const {
  const Matrix& m = nodes_[v].value;
  if (m.size() != 1) throw ShapeError("scalar() of a " + Shape(m) + " node");
  return m(0, 0);
}

void Tape::Accumulate(int target, const Matrix& g) {
  Node& n = nodes_[target];
  if (!n.needs_grad) return;
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

void Tape::Backward(Var loss) {
  if (backward_done_) throw UsageError("Backward called twice on the same tape");
  if (nodes_[loss].value.size() != 1) throw ShapeError("Backward target must be 1x1");
  backward_done_ = true;
  nodes_[loss].grad = Matrix::Ones(1, 1);

  for (int k = loss; k >= 0; --k) {
    Node& n = nodes_[k];
    if (!n.needs_grad || n.grad.size() == 0) continue;
    const Matrix& g = n.grad;
    switch (n.op) {
      case Op::kConstant:
        break;
      case Op::kParam:
        n.param->grad += g;
        break;
      case Op::kMatMul:
        if (nodes_[n.a].needs_grad) Accumulate(n.a, g * nodes_[n.b].value.transpose());
        if (nodes_[n.b].needs_grad) Accumulate(n.b, nodes_[n.a].value.transpose() * g);
        break;
      case Op::kAdd:
        Accumulate(n.a, g);
        Accumulate(n.b, g);
        break;
      case Op::kSub:
        Accumulate(n.a, g);
        if (nodes_[n.b].needs_grad) Accumulate(n.b, -g);
        break;
      case Op::kMul:
        if (nodes_[n.a].needs_grad) Accumulate(n.a, g.cwiseProduct(nodes_[n.b].value));
        if (nodes_[n.b].needs_grad) Accumulate(n.b, g.cwiseProduct(nodes_[n.a].value));
        break;
      case Op::kAddBias:
        Accumulate(n.a, g);
        if (nodes_[n.b].needs_grad) Accumulate(n.b, g.rowwise().sum());
        break;
      case Op::kBroadcastCols:
        Accumulate(n.a, g.rowwise().sum());
        break;
      case Op::kScale:
        Accumulate(n.a, g * n.s0);
        break;
      case Op::kAddScalar:
        Accumulate(n.a, g);
        break;
      case Op::kSigmoid:
        Accumulate(n.a, g.array() * n.value.array() * (1.0 - n.value.array()));
        break;
      case Op::kTanh:
        Accumulate(n.a, g.array() * (1.0 - n.value.array().square()));
        break;
      case Op::kExp:
        Accumulate(n.a, g.cwiseProduct(n.value));
        break;
      case Op::kLog:
        Accumulate(n.a, g.cwiseQuotient(nodes_[n.a].value));
        break;
      case Op::kSquare:
        Accumulate(n.a, 2.0 * g.cwiseProduct(nodes_[n.a].value));
        break;
      case Op::kMin: {
        const Matrix& x = nodes_[n.a].value;
        const Matrix& y = nodes_[n.b].value;
        const Matrix take_a = (x.array() <= y.array()).cast<double>();
        if (nodes_[n.a].needs_grad) Accumulate(n.a, g.cwiseProduct(take_a));
        if (nodes_[n.b].needs_grad) {
          Accumulate(n.b, g.cwiseProduct((1.0 - take_a.array()).matrix()));
        }
        break;
      }
      case Op::kClamp: {
        const Matrix& x = nodes_[n.a].value;
        const Matrix pass = ((x.array() >= n.s0) && (x.array() <= n.s1)).cast<double>();
        Accumulate(n.a, g.cwiseProduct(pass));
        break;
      }
      case Op::kRowSlice: {
        Node& in = nodes_[n.a];
        if (!in.needs_grad) break;
        if (in.grad.size() == 0) in.grad = Matrix::Zero(in.value.rows(), in.value.cols());
        in.grad.middleRows(n.i0, g.rows()) += g;
        break;
      }
      case Op::kConcatRows: {
        Eigen::Index at = 0;
        for (int p : n.parts) {
          const Eigen::Index r = nodes_[p].value.rows();
          if (nodes_[p].needs_grad) Accumulate(p, g.middleRows(at, r));
          at += r;
        }
        break;
      }
      case Op::kConcatCols: {
        Eigen::Index at = 0;
        for (int p : n.parts) {
          const Eigen::Index c = nodes_[p].value.cols();
          if (nodes_[p].needs_grad) Accumulate(p, g.middleCols(at, c));
          at += c;
        }
        break;
      }
      case Op::kSumRows:
        Accumulate(n.a, g.replicate(nodes_[n.a].value.rows(), 1));
        break;
      case Op::kSum:
        Accumulate(n.a, Matrix::Constant(nodes_[n.a].value.rows(),
                                         nodes_[n.a].value.cols(), g(0, 0)));
        break;
      case Op::kLstmCell:
        BackwardLstmCell(n);
        break;
      case Op::kMean: {
        const Matrix& x = nodes_[n.a].value;
        Accumulate(n.a, Matrix::Constant(x.rows(), x.cols(),
                                         g(0, 0) / static_cast<double>(x.size())));
        break;
      }
    }
  }
}

void Tape::Clear() {
  nodes_.clear();
  param_nodes_.clear();
  backward_done_ = false;
}

}  // namespace mbt::nn
