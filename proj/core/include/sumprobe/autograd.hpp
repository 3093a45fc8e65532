#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

// Tape-based reverse-mode autodiff over Eigen matrices. A Tape is built per
// forward pass; backward() walks the nodes in reverse creation order and
// accumulates gradients into the Parameters referenced by param().

namespace sumprobe::nn {

using Mat = Eigen::MatrixXd;

struct Parameter {
  std::string name;
  Mat value;
  Mat grad;

  Parameter() = default;
  Parameter(std::string n, Mat v)
      : name(std::move(n)), value(std::move(v)),
        grad(Mat::Zero(value.rows(), value.cols())) {}
  void zero_grad() { grad.setZero(); }
};

class Tape;

struct Expr {
  Tape* tape = nullptr;
  int idx = -1;

  bool valid() const { return tape != nullptr; }
  const Mat& value() const;
  const Mat& grad() const;
  double scalar() const { return value()(0, 0); }
};

class Tape {
 public:
  Expr constant(Mat value);
  Expr param(Parameter& p);

  // Runs reverse accumulation from a 1x1 loss node and adds parameter
  // gradients into their Parameter::grad buffers.
  void backward(Expr loss);

  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  friend struct Expr;
  friend Expr add(Expr a, Expr b);
  friend Expr sub(Expr a, Expr b);
  friend Expr neg(Expr a);
  friend Expr cmul(Expr a, Expr b);
  friend Expr scale(Expr a, double s);
  friend Expr matmul(Expr a, Expr b);
  friend Expr transpose(Expr a);
  friend Expr add_colwise(Expr m, Expr col);
  friend Expr tanh_(Expr a);
  friend Expr sigmoid_(Expr a);
  friend Expr relu_(Expr a);
  friend Expr log_(Expr a);
  friend Expr softmax_cols(Expr a);
  friend Expr masked_log_softmax_col(Expr scores, const std::vector<char>& masked);
  friend Expr sum_all(Expr a);
  friend Expr mean_all(Expr a);
  friend Expr mean_cols(Expr a);
  friend Expr max_over_cols(Expr a);
  friend Expr concat_rows(const std::vector<Expr>& parts);
  friend Expr concat_cols(const std::vector<Expr>& parts);
  friend Expr rows(Expr a, int start, int count);
  friend Expr cols(Expr a, int start, int count);
  friend Expr pick(Expr a, int row, int col);
  friend Expr dot(Expr a, Expr b);
  friend Expr layer_norm_col(Expr x, Expr gain, Expr bias, double eps);
  friend Expr bce_with_logits(Expr logits, const std::vector<double>& targets);
  friend Expr add_n(const std::vector<Expr>& terms);
  friend Expr embed_lookup(Expr table, const std::vector<int>& row_ids,
                           const Mat* fallback_cols);

  struct Node {
    Mat value;
    Mat grad;
    std::function<void(Tape&, const Mat&)> backprop;  // pushes grad to parents
    Parameter* parameter = nullptr;
  };

  Expr emit(Mat value, std::function<void(Tape&, const Mat&)> backprop);
  Mat& grad_of(int idx) { return nodes_[idx].grad; }

  std::vector<Node> nodes_;
};

Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr neg(Expr a);
Expr cmul(Expr a, Expr b);
Expr scale(Expr a, double s);
Expr matmul(Expr a, Expr b);
Expr transpose(Expr a);
Expr add_colwise(Expr m, Expr col);
Expr tanh_(Expr a);
Expr sigmoid_(Expr a);
Expr relu_(Expr a);
Expr log_(Expr a);
Expr softmax_cols(Expr a);
// log-softmax over the unmasked rows of a column vector; masked rows get a
// large negative log-probability and zero gradient
Expr masked_log_softmax_col(Expr scores, const std::vector<char>& masked);
Expr sum_all(Expr a);
Expr mean_all(Expr a);
Expr mean_cols(Expr a);
Expr max_over_cols(Expr a);
Expr concat_rows(const std::vector<Expr>& parts);
Expr concat_cols(const std::vector<Expr>& parts);
Expr rows(Expr a, int start, int count);
Expr cols(Expr a, int start, int count);
Expr pick(Expr a, int row, int col = 0);
Expr dot(Expr a, Expr b);
Expr layer_norm_col(Expr x, Expr gain, Expr bias, double eps = 1e-6);
// mean over entries of softplus(logit) - target * logit
Expr bce_with_logits(Expr logits, const std::vector<double>& targets);
Expr add_n(const std::vector<Expr>& terms);
// Gathers rows of a (|V| x d) table into a (d x T) matrix, one column per id.
// Ids of -1 take the corresponding column of fallback_cols with no gradient.
Expr embed_lookup(Expr table, const std::vector<int>& row_ids,
                  const Mat* fallback_cols = nullptr);

inline Expr affine(Expr w, Expr x, Expr b) { return add_colwise(matmul(w, x), b); }

}  // namespace sumprobe::nn
