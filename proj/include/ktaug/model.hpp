#pragma once

// Compact DKT predictor.
//
// Input encoding: interaction (q, r) looks up row 2q + r of the embedding table.
// The first step consumes a learned start vector instead, so step t sees only
// interactions 1..t-1. With x_t the input at step t, h_0 = c_0 = 0, and the gate
// pre-activations stacked in the order (input, forget, cell, output):
//
//   a_t = W_input x_t + W_recurrent h_{t-1} + bias
//   i_t = sigmoid(a_t[0:H])      f_t = sigmoid(a_t[H:2H])
//   g_t = tanh(a_t[2H:3H])       o_t = sigmoid(a_t[3H:4H])
//   c_t = f_t * c_{t-1} + i_t * g_t
//   h_t = o_t * tanh(c_t)
//   P_t = sigmoid(W_out^T h_t + b_out)        (one probability per question)
//   p_t = P_t[Q_t]
//
// Everything is templated on the scalar type so gradient checks can run in extended
// precision with the same code path used for training.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "ktaug/core.hpp"
#include "ktaug/losses.hpp"

namespace ktaug {

struct ModelDims {
  std::size_t num_questions = 0;
  std::size_t embed_dim = 32;
  std::size_t hidden_dim = 32;

  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

template <typename Scalar>
struct DktParams {
  ModelDims dims;
  Mat<Scalar> embedding;    // 2Q x E
  Vec<Scalar> start;        // E
  Mat<Scalar> w_input;      // 4H x E
  Mat<Scalar> w_recurrent;  // 4H x H
  Vec<Scalar> bias;         // 4H
  Mat<Scalar> w_out;        // H x Q
  Vec<Scalar> b_out;        // Q

  static DktParams zeros(const ModelDims& d) {
    if (d.num_questions == 0 || d.embed_dim == 0 || d.hidden_dim == 0)
      throw std::invalid_argument("DktParams: dimensions must be positive");
    const auto Q = static_cast<Eigen::Index>(d.num_questions);
    const auto E = static_cast<Eigen::Index>(d.embed_dim);
    const auto H = static_cast<Eigen::Index>(d.hidden_dim);
    DktParams p;
    p.dims = d;
    p.embedding = Mat<Scalar>::Zero(2 * Q, E);
    p.start = Vec<Scalar>::Zero(E);
    p.w_input = Mat<Scalar>::Zero(4 * H, E);
    p.w_recurrent = Mat<Scalar>::Zero(4 * H, H);
    p.bias = Vec<Scalar>::Zero(4 * H);
    p.w_out = Mat<Scalar>::Zero(H, Q);
    p.b_out = Vec<Scalar>::Zero(Q);
    return p;
  }

  // Visits every tensor with its checkpoint name, in a fixed order.
  template <typename F>
  void for_each(F&& f) {
    f("embedding", embedding);
    f("start", start);
    f("w_input", w_input);
    f("w_recurrent", w_recurrent);
    f("bias", bias);
    f("w_out", w_out);
    f("b_out", b_out);
  }
  template <typename F>
  void for_each(F&& f) const {
    f("embedding", embedding);
    f("start", start);
    f("w_input", w_input);
    f("w_recurrent", w_recurrent);
    f("bias", bias);
    f("w_out", w_out);
    f("b_out", b_out);
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for_each([&](const char*, const auto& t) { n += static_cast<std::size_t>(t.size()); });
    return n;
  }

  bool all_finite() const {
    bool ok = true;
    for_each([&](const char*, const auto& t) { ok = ok && t.allFinite(); });
    return ok;
  }

  template <typename Other>
  DktParams<Other> cast() const {
    DktParams<Other> o;
    o.dims = dims;
    o.embedding = embedding.template cast<Other>();
    o.start = start.template cast<Other>();
    o.w_input = w_input.template cast<Other>();
    o.w_recurrent = w_recurrent.template cast<Other>();
    o.bias = bias.template cast<Other>();
    o.w_out = w_out.template cast<Other>();
    o.b_out = b_out.template cast<Other>();
    return o;
  }

  DktParams& operator+=(const DktParams& o) {
    embedding += o.embedding;
    start += o.start;
    w_input += o.w_input;
    w_recurrent += o.w_recurrent;
    bias += o.bias;
    w_out += o.w_out;
    b_out += o.b_out;
    return *this;
  }

  DktParams& operator*=(Scalar s) {
    for_each([&](const char*, auto& t) { t *= s; });
    return *this;
  }
};

// Gradients share the parameter layout.
template <typename Scalar>
using GradientSet = DktParams<Scalar>;

// Uniform Xavier initialisation: U[-sqrt(6 / (rows + cols)), +sqrt(6 / (rows + cols))] per
// weight matrix (the start vector counts as a 1 x E matrix); biases zero.
template <typename Scalar>
DktParams<Scalar> xavier_init(const ModelDims& dims, std::uint64_t seed) {
  auto p = DktParams<Scalar>::zeros(dims);
  std::mt19937_64 rng(seed);
  auto fill = [&](auto& m, double fan_sum) {
    const double bound = std::sqrt(6.0 / fan_sum);
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = static_cast<Scalar>(u(rng));
  };
  fill(p.embedding, double(p.embedding.rows() + p.embedding.cols()));
  fill(p.start, double(1 + p.start.size()));
  fill(p.w_input, double(p.w_input.rows() + p.w_input.cols()));
  fill(p.w_recurrent, double(p.w_recurrent.rows() + p.w_recurrent.cols()));
  fill(p.w_out, double(p.w_out.rows() + p.w_out.cols()));
  return p;
}

// Column-per-sequence padded view of a batch. Positions past a sequence's length hold
// question 0 / response 0 and never influence that sequence's real positions.
struct Batch {
  Eigen::Index max_len = 0;
  std::vector<std::size_t> lengths;
  Eigen::MatrixXi questions;  // max_len x B
  Eigen::MatrixXi responses;  // max_len x B

  Eigen::Index size() const { return static_cast<Eigen::Index>(lengths.size()); }
};

inline Batch make_batch(std::span<const InteractionSequence* const> seqs) {
  Batch b;
  for (const auto* s : seqs) b.max_len = std::max<Eigen::Index>(b.max_len, Eigen::Index(s->size()));
  const auto B = static_cast<Eigen::Index>(seqs.size());
  b.questions = Eigen::MatrixXi::Zero(b.max_len, B);
  b.responses = Eigen::MatrixXi::Zero(b.max_len, B);
  for (Eigen::Index j = 0; j < B; ++j) {
    const auto& s = *seqs[static_cast<std::size_t>(j)];
    b.lengths.push_back(s.size());
    for (std::size_t t = 0; t < s.size(); ++t) {
      b.questions(Eigen::Index(t), j) = static_cast<int>(s.interactions[t].question);
      b.responses(Eigen::Index(t), j) = s.interactions[t].response;
    }
  }
  return b;
}

inline Batch make_batch(const std::vector<InteractionSequence>& seqs) {
  std::vector<const InteractionSequence*> ptrs;
  for (const auto& s : seqs) ptrs.push_back(&s);
  return make_batch(ptrs);
}

template <typename Scalar>
struct ForwardPass {
  Mat<Scalar> probs;              // max_len x B, p_t per sequence
  std::vector<Mat<Scalar>> full;  // per step: Q x B
  std::vector<Mat<Scalar>> inputs, gates, cells, hiddens;
};

namespace detail {

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& x) {
  using S = typename Derived::Scalar;
  return (S(1) + (-x).exp()).inverse();
}

inline Eigen::Index interaction_row(int question, int response) {
  return 2 * Eigen::Index(question) + Eigen::Index(response);
}

}  // namespace detail

template <typename Scalar>
ForwardPass<Scalar> forward(const DktParams<Scalar>& params, const Batch& batch) {
  const auto H = static_cast<Eigen::Index>(params.dims.hidden_dim);
  const auto E = static_cast<Eigen::Index>(params.dims.embed_dim);
  const auto Q = static_cast<Eigen::Index>(params.dims.num_questions);
  const Eigen::Index B = batch.size();
  const Eigen::Index T = batch.max_len;

  ForwardPass<Scalar> fp;
  fp.probs = Mat<Scalar>::Zero(T, B);
  fp.full.reserve(std::size_t(T));
  fp.inputs.reserve(std::size_t(T));
  fp.gates.reserve(std::size_t(T));
  fp.cells.reserve(std::size_t(T));
  fp.hiddens.reserve(std::size_t(T));

  Mat<Scalar> h = Mat<Scalar>::Zero(H, B);
  Mat<Scalar> c = Mat<Scalar>::Zero(H, B);
  for (Eigen::Index t = 0; t < T; ++t) {
    Mat<Scalar> x(E, B);
    for (Eigen::Index j = 0; j < B; ++j) {
      if (t == 0) {
        x.col(j) = params.start;
      } else {
        const int q = batch.questions(t - 1, j);
        const int r = batch.responses(t - 1, j);
        if (q < 0 || q >= Q || (r != 0 && r != 1))
          throw std::invalid_argument("forward: interaction outside the model catalog");
        x.col(j) = params.embedding.row(detail::interaction_row(q, r)).transpose();
      }
    }
    Mat<Scalar> a = params.w_input * x + params.w_recurrent * h;
    a.colwise() += params.bias;
    a.topRows(2 * H) = detail::sigmoid(a.topRows(2 * H).array()).matrix();
    a.middleRows(2 * H, H) = a.middleRows(2 * H, H).array().tanh().matrix();
    a.bottomRows(H) = detail::sigmoid(a.bottomRows(H).array()).matrix();

    c = (a.middleRows(H, H).array() * c.array() + a.topRows(H).array() * a.middleRows(2 * H, H).array())
            .matrix();
    h = (a.bottomRows(H).array() * c.array().tanh()).matrix();

    Mat<Scalar> z = params.w_out.transpose() * h;
    z.colwise() += params.b_out;
    Mat<Scalar> P = detail::sigmoid(z.array()).matrix();
    for (Eigen::Index j = 0; j < B; ++j) {
      const int q = batch.questions(t, j);
      if (q < 0 || q >= Q) throw std::invalid_argument("forward: question outside the model catalog");
      fp.probs(t, j) = P(q, j);
    }
    fp.inputs.push_back(std::move(x));
    fp.gates.push_back(std::move(a));
    fp.cells.push_back(c);
    fp.hiddens.push_back(h);
    fp.full.push_back(std::move(P));
  }
  return fp;
}

// Reverse-mode pass. d_probs (max_len x B) is dL/dp_t; d_full, when given, adds dL/dP_t for
// every question. Gradients are accumulated into `grads`.
template <typename Scalar>
void backward(const DktParams<Scalar>& params, const Batch& batch, const ForwardPass<Scalar>& fp,
              const Mat<Scalar>& d_probs, const std::type_identity_t<std::vector<Mat<Scalar>>>* d_full,
              GradientSet<Scalar>& grads) {
  const auto H = static_cast<Eigen::Index>(params.dims.hidden_dim);
  const auto Q = static_cast<Eigen::Index>(params.dims.num_questions);
  const Eigen::Index B = batch.size();
  const Eigen::Index T = batch.max_len;
  if (d_probs.rows() != T || d_probs.cols() != B)
    throw std::invalid_argument("backward: gradient shape differs from the batch");

  Mat<Scalar> dh_next = Mat<Scalar>::Zero(H, B);
  Mat<Scalar> dc_next = Mat<Scalar>::Zero(H, B);
  Mat<Scalar> dz(Q, B);
  Mat<Scalar> da(4 * H, B);
  for (Eigen::Index t = T - 1; t >= 0; --t) {
    const auto st = std::size_t(t);
    if (d_full) dz = (*d_full)[st];
    else dz.setZero();
    for (Eigen::Index j = 0; j < B; ++j) dz(batch.questions(t, j), j) += d_probs(t, j);
    const auto& P = fp.full[st];
    dz.array() *= P.array() * (Scalar(1) - P.array());

    const auto& h = fp.hiddens[st];
    grads.w_out.noalias() += h * dz.transpose();
    grads.b_out += dz.rowwise().sum();
    Mat<Scalar> dh = params.w_out * dz + dh_next;

    const auto& a = fp.gates[st];
    const auto i = a.topRows(H).array();
    const auto f = a.middleRows(H, H).array();
    const auto g = a.middleRows(2 * H, H).array();
    const auto o = a.bottomRows(H).array();
    const auto& c = fp.cells[st];
    const Mat<Scalar> c_prev = t > 0 ? fp.cells[st - 1] : Mat<Scalar>::Zero(H, B);
    const Mat<Scalar> h_prev = t > 0 ? fp.hiddens[st - 1] : Mat<Scalar>::Zero(H, B);
    const auto tanh_c = c.array().tanh().eval();

    const auto d_o = (dh.array() * tanh_c).eval();
    const auto dc = (dc_next.array() + dh.array() * o * (Scalar(1) - tanh_c.square())).eval();
    da.topRows(H) = (dc * g * i * (Scalar(1) - i)).matrix();
    da.middleRows(H, H) = (dc * c_prev.array() * f * (Scalar(1) - f)).matrix();
    da.middleRows(2 * H, H) = (dc * i * (Scalar(1) - g.square())).matrix();
    da.bottomRows(H) = (d_o * o * (Scalar(1) - o)).matrix();
    dc_next = (dc * f).matrix();

    const auto& x = fp.inputs[st];
    grads.w_input.noalias() += da * x.transpose();
    grads.w_recurrent.noalias() += da * h_prev.transpose();
    grads.bias += da.rowwise().sum();
    const Mat<Scalar> dx = params.w_input.transpose() * da;
    dh_next.noalias() = params.w_recurrent.transpose() * da;

    for (Eigen::Index j = 0; j < B; ++j) {
      if (t == 0) {
        grads.start += dx.col(j);
      } else {
        const auto row = detail::interaction_row(batch.questions(t - 1, j), batch.responses(t - 1, j));
        grads.embedding.row(row) += dx.col(j).transpose();
      }
    }
  }
}

template <typename Scalar>
struct SequencePrediction {
  Vec<Scalar> probs;  // T
  Mat<Scalar> full;   // T x Q
};

// Single-sequence forward returning the trace and the full probability matrix.
template <typename Scalar>
SequencePrediction<Scalar> predict(const DktParams<Scalar>& params, const InteractionSequence& seq) {
  const InteractionSequence* ptr = &seq;
  const Batch batch = make_batch(std::span<const InteractionSequence* const>(&ptr, 1));
  const auto fp = forward(params, batch);
  SequencePrediction<Scalar> out;
  out.probs = fp.probs.col(0);
  out.full.resize(batch.max_len, static_cast<Eigen::Index>(params.dims.num_questions));
  for (Eigen::Index t = 0; t < batch.max_len; ++t) out.full.row(t) = fp.full[std::size_t(t)].col(0).transpose();
  return out;
}

}  // namespace ktaug
