#include "sumprobe/autograd.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sumprobe::nn {

const Mat& Expr::value() const { return tape->nodes_[idx].value; }
const Mat& Expr::grad() const { return tape->nodes_[idx].grad; }

Expr Tape::emit(Mat value, std::function<void(Tape&, const Mat&)> backprop) {
  Node node;
  node.value = std::move(value);
  node.backprop = std::move(backprop);
  nodes_.push_back(std::move(node));
  return Expr{this, static_cast<int>(nodes_.size()) - 1};
}

Expr Tape::constant(Mat value) { return emit(std::move(value), nullptr); }

Expr Tape::param(Parameter& p) {
  Expr e = emit(p.value, nullptr);
  nodes_[e.idx].parameter = &p;
  return e;
}

void Tape::backward(Expr loss) {
  if (loss.tape != this) throw std::invalid_argument("backward: foreign expression");
  if (loss.value().size() != 1) throw std::invalid_argument("backward: loss must be 1x1");
  for (auto& node : nodes_) node.grad = Mat::Zero(node.value.rows(), node.value.cols());
  nodes_[loss.idx].grad(0, 0) = 1.0;
  for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
    if (i > loss.idx) continue;
    Node& node = nodes_[i];
    if (node.backprop) node.backprop(*this, node.grad);
    if (node.parameter) node.parameter->grad += node.grad;
  }
}

namespace {

void check_same(const Expr& a, const Expr& b, const char* op) {
  if (a.tape != b.tape) throw std::invalid_argument(std::string(op) + ": mixed tapes");
}

}  // namespace

Expr add(Expr a, Expr b) {
  check_same(a, b, "add");
  return a.tape->emit(a.value() + b.value(), [a, b](Tape& t, const Mat& g) {
    t.grad_of(a.idx) += g;
    t.grad_of(b.idx) += g;
  });
}

Expr sub(Expr a, Expr b) {
  check_same(a, b, "sub");
  return a.tape->emit(a.value() - b.value(), [a, b](Tape& t, const Mat& g) {
    t.grad_of(a.idx) += g;
    t.grad_of(b.idx) -= g;
  });
}

Expr neg(Expr a) {
  return a.tape->emit(-a.value(),
                      [a](Tape& t, const Mat& g) { t.grad_of(a.idx) -= g; });
}

Expr cmul(Expr a, Expr b) {
  check_same(a, b, "cmul");
  return a.tape->emit(a.value().cwiseProduct(b.value()),
                      [a, b](Tape& t, const Mat& g) {
                        t.grad_of(a.idx) += g.cwiseProduct(b.value());
                        t.grad_of(b.idx) += g.cwiseProduct(a.value());
                      });
}

Expr scale(Expr a, double s) {
  return a.tape->emit(s * a.value(),
                      [a, s](Tape& t, const Mat& g) { t.grad_of(a.idx) += s * g; });
}

Expr matmul(Expr a, Expr b) {
  check_same(a, b, "matmul");
  return a.tape->emit(a.value() * b.value(), [a, b](Tape& t, const Mat& g) {
    t.grad_of(a.idx) += g * b.value().transpose();
    t.grad_of(b.idx) += a.value().transpose() * g;
  });
}

Expr transpose(Expr a) {
  return a.tape->emit(a.value().transpose(), [a](Tape& t, const Mat& g) {
    t.grad_of(a.idx) += g.transpose();
  });
}

Expr add_colwise(Expr m, Expr col) {
  check_same(m, col, "add_colwise");
  if (col.value().cols() != 1 || m.value().rows() != col.value().rows())
    throw std::invalid_argument("add_colwise: shape mismatch");
  Mat out = m.value();
  out.colwise() += Eigen::VectorXd(col.value().col(0));
  return m.tape->emit(std::move(out), [m, col](Tape& t, const Mat& g) {
    t.grad_of(m.idx) += g;
    t.grad_of(col.idx) += g.rowwise().sum();
  });
}

Expr tanh_(Expr a) {
  Mat y = a.value().array().tanh();
  return a.tape->emit(std::move(y), [a](Tape& t, const Mat& g) {
    Mat yy = a.value().array().tanh();
    t.grad_of(a.idx) += (g.array() * (1.0 - yy.array().square())).matrix();
  });
}

Expr sigmoid_(Expr a) {
  Mat y = (1.0 / (1.0 + (-a.value().array()).exp())).matrix();
  return a.tape->emit(std::move(y), [a](Tape& t, const Mat& g) {
    Mat yy = (1.0 / (1.0 + (-a.value().array()).exp())).matrix();
    t.grad_of(a.idx) += (g.array() * yy.array() * (1.0 - yy.array())).matrix();
  });
}

Expr relu_(Expr a) {
  Mat y = a.value().cwiseMax(0.0);
  return a.tape->emit(std::move(y), [a](Tape& t, const Mat& g) {
    t.grad_of(a.idx) +=
        (g.array() * (a.value().array() > 0.0).cast<double>()).matrix();
  });
}

Expr log_(Expr a) {
  Mat y = a.value().array().log();
  return a.tape->emit(std::move(y), [a](Tape& t, const Mat& g) {
    t.grad_of(a.idx) += (g.array() / a.value().array()).matrix();
  });
}

Expr softmax_cols(Expr a) {
  Mat y = a.value();
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    Eigen::ArrayXd col = y.col(j).array();
    col -= col.maxCoeff();
    col = col.exp();
    y.col(j) = (col / col.sum()).matrix();
  }
  Mat stored = y;
  return a.tape->emit(std::move(y), [a, stored](Tape& t, const Mat& g) {
    Mat dx(stored.rows(), stored.cols());
    for (Eigen::Index j = 0; j < stored.cols(); ++j) {
      double dotv = stored.col(j).dot(g.col(j));
      dx.col(j) = stored.col(j).cwiseProduct(g.col(j) - Mat::Constant(stored.rows(), 1, dotv));
    }
    t.grad_of(a.idx) += dx;
  });
}

Expr masked_log_softmax_col(Expr scores, const std::vector<char>& masked) {
  const Mat& x = scores.value();
  if (x.cols() != 1) throw std::invalid_argument("masked_log_softmax_col: column vector expected");
  if (static_cast<Eigen::Index>(masked.size()) != x.rows())
    throw std::invalid_argument("masked_log_softmax_col: mask size mismatch");
  double maxv = -std::numeric_limits<double>::infinity();
  int live = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (!masked[i]) {
      maxv = std::max(maxv, x(i, 0));
      ++live;
    }
  }
  if (live == 0) throw std::invalid_argument("masked_log_softmax_col: everything masked");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    if (!masked[i]) sum += std::exp(x(i, 0) - maxv);
  double lse = maxv + std::log(sum);
  Mat y(x.rows(), 1);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    y(i, 0) = masked[i] ? -1e30 : x(i, 0) - lse;
  Mat probs(x.rows(), 1);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    probs(i, 0) = masked[i] ? 0.0 : std::exp(y(i, 0));
  return scores.tape->emit(std::move(y), [scores, probs, masked](Tape& t, const Mat& g) {
    double gsum = 0.0;
    for (Eigen::Index i = 0; i < g.rows(); ++i)
      if (!masked[i]) gsum += g(i, 0);
    Mat dx = Mat::Zero(g.rows(), 1);
    for (Eigen::Index i = 0; i < g.rows(); ++i)
      if (!masked[i]) dx(i, 0) = g(i, 0) - probs(i, 0) * gsum;
    t.grad_of(scores.idx) += dx;
  });
}

Expr sum_all(Expr a) {
  Mat y(1, 1);
  y(0, 0) = a.value().sum();
  return a.tape->emit(std::move(y), [a](Tape& t, const Mat& g) {
    t.grad_of(a.idx).array() += g(0, 0);
  });
}

Expr mean_all(Expr a) {
  const double n = static_cast<double>(a.value().size());
  Mat y(1, 1);
  y(0, 0) = a.value().sum() / n;
  return a.tape->emit(std::move(y), [a, n](Tape& t, const Mat& g) {
    t.grad_of(a.idx).array() += g(0, 0) / n;
  });
}

Expr mean_cols(Expr a) {
  const double n = static_cast<double>(a.value().cols());
  Mat y = a.value().rowwise().mean();
  return a.tape->emit(std::move(y), [a, n](Tape& t, const Mat& g) {
    t.grad_of(a.idx).colwise() += Eigen::VectorXd(g.col(0) / n);
  });
}

Expr max_over_cols(Expr a) {
  const Mat& x = a.value();
  Mat y(x.rows(), 1);
  std::vector<Eigen::Index> argmax(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Eigen::Index j;
    y(i, 0) = x.row(i).maxCoeff(&j);
    argmax[i] = j;
  }
  return a.tape->emit(std::move(y), [a, argmax](Tape& t, const Mat& g) {
    Mat& dx = t.grad_of(a.idx);
    for (Eigen::Index i = 0; i < g.rows(); ++i) dx(i, argmax[i]) += g(i, 0);
  });
}

Expr concat_rows(const std::vector<Expr>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: no parts");
  Eigen::Index rows = 0;
  const Eigen::Index cols = parts[0].value().cols();
  for (const Expr& p : parts) rows += p.value().rows();
  Mat y(rows, cols);
  Eigen::Index at = 0;
  for (const Expr& p : parts) {
    y.middleRows(at, p.value().rows()) = p.value();
    at += p.value().rows();
  }
  return parts[0].tape->emit(std::move(y), [parts](Tape& t, const Mat& g) {
    Eigen::Index at = 0;
    for (const Expr& p : parts) {
      t.grad_of(p.idx) += g.middleRows(at, p.value().rows());
      at += p.value().rows();
    }
  });
}

Expr concat_cols(const std::vector<Expr>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no parts");
  Eigen::Index cols = 0;
  const Eigen::Index rows = parts[0].value().rows();
  for (const Expr& p : parts) cols += p.value().cols();
  Mat y(rows, cols);
  Eigen::Index at = 0;
  for (const Expr& p : parts) {
    y.middleCols(at, p.value().cols()) = p.value();
    at += p.value().cols();
  }
  return parts[0].tape->emit(std::move(y), [parts](Tape& t, const Mat& g) {
    Eigen::Index at = 0;
    for (const Expr& p : parts) {
      t.grad_of(p.idx) += g.middleCols(at, p.value().cols());
      at += p.value().cols();
    }
  });
}

Expr rows(Expr a, int start, int count) {
  Mat y = a.value().middleRows(start, count);
  return a.tape->emit(std::move(y), [a, start, count](Tape& t, const Mat& g) {
    t.grad_of(a.idx).middleRows(start, count) += g;
  });
}

Expr cols(Expr a, int start, int count) {
  Mat y = a.value().middleCols(start, count);
  return a.tape->emit(std::move(y), [a, start, count](Tape& t, const Mat& g) {
    t.grad_of(a.idx).middleCols(start, count) += g;
  });
}

Expr pick(Expr a, int row, int col) {
  Mat y(1, 1);
  y(0, 0) = a.value()(row, col);
  return a.tape->emit(std::move(y), [a, row, col](Tape& t, const Mat& g) {
    t.grad_of(a.idx)(row, col) += g(0, 0);
  });
}

Expr dot(Expr a, Expr b) {
  check_same(a, b, "dot");
  Mat y(1, 1);
  y(0, 0) = a.value().col(0).dot(b.value().col(0));
  return a.tape->emit(std::move(y), [a, b](Tape& t, const Mat& g) {
    t.grad_of(a.idx) += g(0, 0) * b.value();
    t.grad_of(b.idx) += g(0, 0) * a.value();
  });
}

Expr layer_norm_col(Expr x, Expr gain, Expr bias, double eps) {
  const Mat& v = x.value();
  const Eigen::Index d = v.rows();
  Mat normed(d, v.cols());
  Mat y(d, v.cols());
  std::vector<double> inv_std(v.cols());
  std::vector<double> means(v.cols());
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    double mu = v.col(j).mean();
    double var = (v.col(j).array() - mu).square().mean();
    double is = 1.0 / std::sqrt(var + eps);
    means[j] = mu;
    inv_std[j] = is;
    normed.col(j) = ((v.col(j).array() - mu) * is).matrix();
    y.col(j) = normed.col(j).cwiseProduct(gain.value().col(0)) + bias.value().col(0);
  }
  return x.tape->emit(std::move(y),
                      [x, gain, bias, normed, inv_std](Tape& t, const Mat& g) {
    const Eigen::Index d = normed.rows();
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      Eigen::VectorXd dn = g.col(j).cwiseProduct(gain.value().col(0));
      double dn_mean = dn.mean();
      double dn_dot = dn.dot(normed.col(j)) / static_cast<double>(d);
      t.grad_of(x.idx).col(j) +=
          inv_std[j] * (dn.array() - dn_mean - normed.col(j).array() * dn_dot).matrix();
      t.grad_of(gain.idx).col(0) += g.col(j).cwiseProduct(normed.col(j));
      t.grad_of(bias.idx).col(0) += g.col(j);
    }
  });
}

Expr bce_with_logits(Expr logits, const std::vector<double>& targets) {
  const Mat& z = logits.value();
  if (z.cols() != 1 || static_cast<Eigen::Index>(targets.size()) != z.rows())
    throw std::invalid_argument("bce_with_logits: shape mismatch");
  const double n = static_cast<double>(z.rows());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    double x = z(i, 0);
    double softplus = x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    loss += softplus - targets[i] * x;
  }
  Mat y(1, 1);
  y(0, 0) = loss / n;
  return logits.tape->emit(std::move(y), [logits, targets, n](Tape& t, const Mat& g) {
    const Mat& z = logits.value();
    Mat dz(z.rows(), 1);
    for (Eigen::Index i = 0; i < z.rows(); ++i)
      dz(i, 0) = (1.0 / (1.0 + std::exp(-z(i, 0))) - targets[i]) / n;
    t.grad_of(logits.idx) += g(0, 0) * dz;
  });
}

Expr embed_lookup(Expr table, const std::vector<int>& row_ids,
                  const Mat* fallback_cols) {
  const Mat& v = table.value();
  const Eigen::Index d = v.cols();
  Mat y(d, static_cast<Eigen::Index>(row_ids.size()));
  for (size_t t = 0; t < row_ids.size(); ++t) {
    int id = row_ids[t];
    if (id >= 0) {
      y.col(t) = v.row(id).transpose();
    } else {
      if (!fallback_cols)
        throw std::invalid_argument("embed_lookup: -1 id without fallback");
      y.col(t) = fallback_cols->col(t);
    }
  }
  return table.tape->emit(std::move(y), [table, row_ids](Tape& t, const Mat& g) {
    Mat& dv = t.grad_of(table.idx);
    for (size_t i = 0; i < row_ids.size(); ++i)
      if (row_ids[i] >= 0) dv.row(row_ids[i]) += g.col(i).transpose();
  });
}

Expr add_n(const std::vector<Expr>& terms) {
  if (terms.empty()) throw std::invalid_argument("add_n: no terms");
  Expr acc = terms[0];
  for (size_t i = 1; i < terms.size(); ++i) acc = add(acc, terms[i]);
  return acc;
}

}  // namespace sumprobe::nn
