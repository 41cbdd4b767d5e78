#include "pathlift/tensor.hpp"

#include "pathlift/errors.hpp"

#include <array>
#include <cmath>
#include <random>

namespace pathlift {

namespace {

std::size_t ipow(int base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

// Applies `m` to slot `slot` (0-based over upper then lower slots).
std::vector<double> apply_to_slot(const std::vector<double>& in, int rank, int dim, int slot, const Matrix& m) {
  const std::size_t stride = ipow(dim, rank - 1 - slot);
  const std::size_t block = stride * static_cast<std::size_t>(dim);
  std::vector<double> out(in.size(), 0.0);
  for (std::size_t outer = 0; outer < in.size(); outer += block) {
    for (std::size_t inner = 0; inner < stride; ++inner) {
      const std::size_t base = outer + inner;
      for (int a = 0; a < dim; ++a) {
        double acc = 0.0;
        for (int b = 0; b < dim; ++b) acc += m(a, b) * in[base + static_cast<std::size_t>(b) * stride];
        out[base + static_cast<std::size_t>(a) * stride] = acc;
      }
    }
  }
  return out;
}

void require_square(const Matrix& m, int dim, const char* what) {
  if (m.rows() != dim || m.cols() != dim) {
    throw ValidationError(std::string(what) + ": expected a " + std::to_string(dim) + "x" + std::to_string(dim) +
                          " matrix");
  }
}

// Slot-wise transport without the full-mode validation.
TensorComponents transport_raw(const TensorTransportRule& rule, const TensorComponents& in, double t, double s) {
  if (in.dim() != rule.dim()) {
    throw ValidationError("tensor dimension " + std::to_string(in.dim()) + " does not match rule dimension " +
                          std::to_string(rule.dim()));
  }
  if (in.p() == 0 && in.q() == 0) {
    const double h = rule.mode() == ConsistencyMode::TensorProductOnly ? rule.scalar_factor(t, s) : 1.0;
    return TensorComponents::scalar(h * in.components()[0], in.dim(), t);
  }
  const Matrix v = in.p() > 0 ? rule.vector_matrix(t, s) : Matrix::Identity(in.dim(), in.dim());
  const Matrix c = in.q() > 0 ? rule.covector_matrix(t, s) : Matrix::Identity(in.dim(), in.dim());
  return apply_slot_matrices(in, v, c).with_anchor(t);
}

}  // namespace

// ---------------------------------------------------------------------------
// TensorComponents

TensorComponents::TensorComponents(int p, int q, int dim, double anchor, std::vector<double> components)
    : p_(p), q_(q), dim_(dim), anchor_(anchor), data_(std::move(components)) {
  if (p_ < 0 || q_ < 0) throw ValidationError("tensor ranks must be nonnegative");
  if (dim_ < 1) throw ValidationError("tensor dimension must be positive");
  if (data_.size() != ipow(dim_, p_ + q_)) {
    throw ValidationError("tensor of type (" + std::to_string(p_) + "," + std::to_string(q_) + ") in dimension " +
                          std::to_string(dim_) + " needs " + std::to_string(ipow(dim_, p_ + q_)) + " components, got " +
                          std::to_string(data_.size()));
  }
  for (double x : data_) {
    if (!std::isfinite(x)) throw ValidationError("tensor components must be finite");
  }
}

TensorComponents TensorComponents::zeros(int p, int q, int dim, double anchor) {
  return TensorComponents(p, q, dim, anchor, std::vector<double>(ipow(dim, p + q), 0.0));
}

TensorComponents TensorComponents::scalar(double value, int dim, double anchor) {
  return TensorComponents(0, 0, dim, anchor, {value});
}

TensorComponents TensorComponents::basis(int dim, std::span<const int> upper, std::span<const int> lower,
                                         double anchor) {
  auto t = zeros(static_cast<int>(upper.size()), static_cast<int>(lower.size()), dim, anchor);
  t.at(upper, lower) = 1.0;
  return t;
}

std::size_t TensorComponents::offset(std::span<const int> index) const {
  if (index.size() != static_cast<std::size_t>(p_ + q_)) throw ValidationError("wrong number of tensor indices");
  std::size_t off = 0;
  for (int i : index) {
    if (i < 0 || i >= dim_) throw ValidationError("tensor index out of range");
    off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
  }
  return off;
}

double TensorComponents::at(std::span<const int> upper, std::span<const int> lower) const {
  if (upper.size() != static_cast<std::size_t>(p_) || lower.size() != static_cast<std::size_t>(q_)) {
    throw ValidationError("wrong number of upper/lower tensor indices");
  }
  std::vector<int> idx(upper.begin(), upper.end());
  idx.insert(idx.end(), lower.begin(), lower.end());
  return data_[offset(idx)];
}

double& TensorComponents::at(std::span<const int> upper, std::span<const int> lower) {
  if (upper.size() != static_cast<std::size_t>(p_) || lower.size() != static_cast<std::size_t>(q_)) {
    throw ValidationError("wrong number of upper/lower tensor indices");
  }
  std::vector<int> idx(upper.begin(), upper.end());
  idx.insert(idx.end(), lower.begin(), lower.end());
  return data_[offset(idx)];
}

std::vector<int> TensorComponents::multi_index(std::size_t offset) const {
  std::vector<int> idx(static_cast<std::size_t>(p_ + q_), 0);
  for (int k = p_ + q_ - 1; k >= 0; --k) {
    idx[static_cast<std::size_t>(k)] = static_cast<int>(offset % static_cast<std::size_t>(dim_));
    offset /= static_cast<std::size_t>(dim_);
  }
  return idx;
}

TensorComponents TensorComponents::with_anchor(double anchor) const {
  TensorComponents t = *this;
  t.anchor_ = anchor;
  return t;
}

double max_deviation(const TensorComponents& a, const TensorComponents& b) {
  if (a.p() != b.p() || a.q() != b.q() || a.dim() != b.dim()) {
    throw ValidationError("cannot compare tensors of different type");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.components()[i] - b.components()[i]));
  return worst;
}

// ---------------------------------------------------------------------------
// Slot algebra

TensorComponents apply_slot_matrices(const TensorComponents& t, const Matrix& upper, const Matrix& lower) {
  const int rank = t.p() + t.q();
  std::vector<double> data = t.components();
  for (int slot = 0; slot < rank; ++slot) {
    const Matrix& m = slot < t.p() ? upper : lower;
    require_square(m, t.dim(), "slot matrix");
    data = apply_to_slot(data, rank, t.dim(), slot, m);
  }
  return TensorComponents(t.p(), t.q(), t.dim(), t.anchor(), std::move(data));
}

TensorComponents apply_slot_generators(const TensorComponents& t, const Matrix& upper, const Matrix& lower) {
  const int rank = t.p() + t.q();
  std::vector<double> sum(t.size(), 0.0);
  for (int slot = 0; slot < rank; ++slot) {
    const Matrix& m = slot < t.p() ? upper : lower;
    require_square(m, t.dim(), "slot matrix");
    const auto part = apply_to_slot(t.components(), rank, t.dim(), slot, m);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += part[i];
  }
  return TensorComponents(t.p(), t.q(), t.dim(), t.anchor(), std::move(sum));
}

TensorComponents contract(const TensorComponents& t, int upper, int lower) {
  if (t.p() < 1 || t.q() < 1) throw ValidationError("contraction needs at least one upper and one lower slot");
  if (upper < 0 || upper >= t.p() || lower < 0 || lower >= t.q()) {
    throw ValidationError("contraction slot out of range");
  }
  auto out = TensorComponents::zeros(t.p() - 1, t.q() - 1, t.dim(), t.anchor());
  const int lower_slot = t.p() + lower;
  for (std::size_t off = 0; off < t.size(); ++off) {
    const auto idx = t.multi_index(off);
    if (idx[static_cast<std::size_t>(upper)] != idx[static_cast<std::size_t>(lower_slot)]) continue;
    std::vector<int> reduced;
    reduced.reserve(idx.size() - 2);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (static_cast<int>(k) != upper && static_cast<int>(k) != lower_slot) reduced.push_back(idx[k]);
    }
    out.components()[out.offset(reduced)] += t.components()[off];
  }
  return out;
}

TensorComponents tensor_product(const TensorComponents& a, const TensorComponents& b) {
  if (a.dim() != b.dim()) throw ValidationError("tensor product of tensors of different dimension");
  if (a.anchor() != b.anchor()) throw ValidationError("tensor product of tensors anchored at different points");
  auto out = TensorComponents::zeros(a.p() + b.p(), a.q() + b.q(), a.dim(), a.anchor());
  for (std::size_t ia = 0; ia < a.size(); ++ia) {
    const auto ma = a.multi_index(ia);
    for (std::size_t ib = 0; ib < b.size(); ++ib) {
      const auto mb = b.multi_index(ib);
      std::vector<int> idx;
      idx.reserve(ma.size() + mb.size());
      idx.insert(idx.end(), ma.begin(), ma.begin() + a.p());
      idx.insert(idx.end(), mb.begin(), mb.begin() + b.p());
      idx.insert(idx.end(), ma.begin() + a.p(), ma.end());
      idx.insert(idx.end(), mb.begin() + b.p(), mb.end());
      out.components()[out.offset(idx)] = a.components()[ia] * b.components()[ib];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// TensorTransportRule

TensorTransportRule::TensorTransportRule(int dim, ConsistencyMode mode, TwoPointMatrixFn vector,
                                         TwoPointMatrixFn covector, ScalarFn f)
    : dim_(dim), mode_(mode), vector_(std::move(vector)), covector_(std::move(covector)), f_(std::move(f)) {
  if (dim_ < 1) throw ValidationError("rule dimension must be positive");
  if (!vector_ || !covector_) throw ValidationError("rule matrices must be provided");
}

TensorTransportRule TensorTransportRule::full(const TransportMatrixFamily& vectors) {
  return TensorTransportRule(
      vectors.rank(), ConsistencyMode::TensorProductAndContraction, [vectors](double t, double s) { return vectors(t, s); },
      [vectors](double t, double s) {
        return Matrix(checked_inverse(vectors(t, s), kGeneratorConditionCap, "transport matrix").transpose());
      },
      nullptr);
}

TensorTransportRule TensorTransportRule::full(int dim, TwoPointMatrixFn vector, TwoPointMatrixFn covector) {
  return TensorTransportRule(dim, ConsistencyMode::TensorProductAndContraction, std::move(vector), std::move(covector),
                             nullptr);
}

TensorTransportRule TensorTransportRule::tensor_product_only(int dim, TwoPointMatrixFn vector,
                                                             TwoPointMatrixFn covector, ScalarFn f) {
  if (!f) throw ValidationError("tensor-product-only rule needs a scalar function f");
  return TensorTransportRule(dim, ConsistencyMode::TensorProductOnly, std::move(vector), std::move(covector),
                             std::move(f));
}

TensorTransportRule TensorTransportRule::constant(ConsistencyMode mode, const Matrix& vector, const Matrix& covector,
                                                  ScalarFn f) {
  const int dim = static_cast<int>(vector.rows());
  require_square(vector, dim, "vector matrix");
  require_square(covector, dim, "covector matrix");
  auto v = [vector](double, double) { return vector; };
  auto c = [covector](double, double) { return covector; };
  if (mode == ConsistencyMode::TensorProductAndContraction) return full(dim, v, c);
  if (!f) f = [](double) { return 1.0; };
  return TensorTransportRule(dim, mode, v, c, std::move(f));
}

Matrix TensorTransportRule::vector_matrix(double t, double s) const {
  Matrix m = vector_(t, s);
  require_square(m, dim_, "vector matrix");
  return m;
}

Matrix TensorTransportRule::covector_matrix(double t, double s) const {
  Matrix m = covector_(t, s);
  require_square(m, dim_, "covector matrix");
  return m;
}

double TensorTransportRule::scalar_factor(double t, double s) const {
  if (!f_) return 1.0;
  const double ft = f_(t);
  const double fs = f_(s);
  if (ft == 0.0 || fs == 0.0) throw NumericalError("scalar transport function f vanishes");
  const double h = fs / ft;
  if (!std::isfinite(h)) throw NumericalError("scalar transport factor is not finite");
  return h;
}

TensorComponents transport_tensor(const TensorTransportRule& rule, const TensorComponents& in, double t, double s) {
  if (std::abs(in.anchor() - s) > 1e-12 * std::max(1.0, std::abs(s))) {
    throw ValidationError("tensor is anchored at " + std::to_string(in.anchor()) + ", not at s = " + std::to_string(s));
  }
  if (rule.mode() == ConsistencyMode::TensorProductAndContraction && in.p() > 0 && in.q() > 0) {
    const Matrix v = rule.vector_matrix(t, s);
    const Matrix c = rule.covector_matrix(t, s);
    const double dev = max_abs(v.transpose() * c - Matrix::Identity(rule.dim(), rule.dim()));
    if (dev > 1e-10 * std::max(1.0, max_abs(v) * max_abs(c))) {
      throw ValidationError("full-consistency rule: vector and covector matrices are not mutually inverse");
    }
  }
  return transport_raw(rule, in, t, s);
}

double scalar_transport(const TensorTransportRule& rule, double t, double s, double lambda) {
  if (rule.mode() == ConsistencyMode::TensorProductAndContraction) return lambda;
  return rule.scalar_factor(t, s) * lambda;
}

// ---------------------------------------------------------------------------
// Consistency diagnostics

ConsistencyReport check_consistency(const TensorTransportRule& rule, double t, double s, std::uint64_t seed,
                                    double tolerance) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const int dim = rule.dim();
  auto random_tensor = [&](int p, int q) {
    auto x = TensorComponents::zeros(p, q, dim, s);
    for (double& c : x.components()) c = unit(rng);
    return x;
  };
  auto finish = [tolerance](LawCheck& law) { law.pass = law.max_deviation <= tolerance; };

  ConsistencyReport report;
  report.product = {"tensor product consistency", 0.0, tolerance, true};
  report.contraction = {"contraction commutation", 0.0, tolerance, true};
  report.inverse = {"mutually inverse vector/covector matrices", 0.0, tolerance, true};
  report.scalar = {"scalar invariance", 0.0, tolerance, true};

  constexpr int kTypes[][4] = {{0, 0, 1, 0}, {1, 0, 0, 0}, {1, 0, 0, 1}, {1, 1, 1, 0},
                               {0, 1, 0, 1}, {2, 0, 0, 1}, {1, 1, 1, 1}, {0, 0, 0, 0}};
  for (const auto& ty : kTypes) {
    for (int rep = 0; rep < 3; ++rep) {
      const auto a = random_tensor(ty[0], ty[1]);
      const auto b = random_tensor(ty[2], ty[3]);
      const auto lhs = transport_raw(rule, tensor_product(a, b), t, s);
      const auto rhs = tensor_product(transport_raw(rule, a, t, s), transport_raw(rule, b, t, s));
      report.product.max_deviation = std::max(report.product.max_deviation, max_deviation(lhs, rhs));
    }
  }

  auto contraction_gap = [&](const TensorComponents& x) {
    double worst = 0.0;
    for (int a = 0; a < x.p(); ++a) {
      for (int b = 0; b < x.q(); ++b) {
        const auto lhs = transport_raw(rule, contract(x, a, b), t, s);
        const auto rhs = contract(transport_raw(rule, x, t, s), a, b);
        worst = std::max(worst, max_deviation(lhs, rhs));
      }
    }
    return worst;
  };
  // δ^i_j, every (1,1) basis tensor, then random mixed tensors.
  {
    auto delta = TensorComponents::zeros(1, 1, dim, s);
    for (int i = 0; i < dim; ++i) delta.at(std::array{i}, std::array{i}) = 1.0;
    report.contraction.max_deviation = contraction_gap(delta);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        const auto e = TensorComponents::basis(dim, std::array{i}, std::array{j}, s);
        report.contraction.max_deviation = std::max(report.contraction.max_deviation, contraction_gap(e));
      }
    for (const auto& [p, q] : {std::pair{2, 1}, std::pair{1, 2}, std::pair{2, 2}}) {
      report.contraction.max_deviation =
          std::max(report.contraction.max_deviation, contraction_gap(random_tensor(p, q)));
    }
  }

  const Matrix v = rule.vector_matrix(t, s);
  const Matrix c = rule.covector_matrix(t, s);
  report.inverse.max_deviation = max_abs(v.transpose() * c - Matrix::Identity(dim, dim));
  report.scalar.max_deviation = std::abs(transport_raw(rule, TensorComponents::scalar(1.0, dim, s), t, s).components()[0] - 1.0);

  finish(report.product);
  finish(report.contraction);
  finish(report.inverse);
  finish(report.scalar);
  return report;
}

}  // namespace pathlift
