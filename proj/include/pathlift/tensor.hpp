#pragma once

#include "pathlift/linalg.hpp"
#include "pathlift/transport.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace pathlift {

/// Components of a (p, q) tensor at a point γ(anchor) of a path.
///
/// Storage is dense and row-major over the multi-index (i₁…i_p; j₁…j_q):
/// contravariant slots first, the last covariant slot varying fastest.
/// Indices are zero based.
class TensorComponents {
 public:
  TensorComponents(int p, int q, int dim, double anchor, std::vector<double> components);

  static TensorComponents zeros(int p, int q, int dim, double anchor);
  static TensorComponents scalar(double value, int dim, double anchor);
  /// Basis tensor e_{i₁}⊗…⊗e_{i_p}⊗e^{j₁}⊗…⊗e^{j_q}.
  static TensorComponents basis(int dim, std::span<const int> upper, std::span<const int> lower, double anchor);

  int p() const { return p_; }
  int q() const { return q_; }
  int dim() const { return dim_; }
  double anchor() const { return anchor_; }
  std::size_t size() const { return data_.size(); }
  const std::vector<double>& components() const { return data_; }
  std::vector<double>& components() { return data_; }

  double at(std::span<const int> upper, std::span<const int> lower) const;
  double& at(std::span<const int> upper, std::span<const int> lower);

  /// Multi-index (upper then lower) of a flat offset.
  std::vector<int> multi_index(std::size_t offset) const;
  std::size_t offset(std::span<const int> index) const;

  TensorComponents with_anchor(double anchor) const;

 private:
  int p_, q_, dim_;
  double anchor_;
  std::vector<double> data_;
};

/// Max absolute component difference; throws on type mismatch.
double max_deviation(const TensorComponents& a, const TensorComponents& b);

enum class ConsistencyMode { TensorProductOnly, TensorProductAndContraction };

/// How a vector transport extends to every (p, q) tensor bundle.
///
/// The vector matrix V(t, s) transports contravariant slots, T'^k = V[k][i] T^i.
/// The covector matrix C(t, s) transports covariant slots, T'_l = C[l][j] T_j.
/// Scalars pick up h(t, s) = f(s) / f(t) in tensor-product-only mode. In
/// full mode C must equal V⁻ᵀ (so that VᵀC = I) and h ≡ 1.
class TensorTransportRule {
 public:
  using ScalarFn = std::function<double(double)>;

  /// Full consistency from a vector transport: C = V⁻ᵀ, h ≡ 1.
  static TensorTransportRule full(const TransportMatrixFamily& vectors);
  /// Full consistency with explicit factors (validated on use).
  static TensorTransportRule full(int dim, TwoPointMatrixFn vector, TwoPointMatrixFn covector);
  /// Consistent with ⊗ only; covectors and scalars transported independently.
  static TensorTransportRule tensor_product_only(int dim, TwoPointMatrixFn vector, TwoPointMatrixFn covector,
                                                 ScalarFn f);
  /// Constant matrices, handy for algebraic experiments. `f` is ignored in
  /// full mode and defaults to f ≡ 1 otherwise.
  static TensorTransportRule constant(ConsistencyMode mode, const Matrix& vector, const Matrix& covector,
                                     ScalarFn f = nullptr);

  int dim() const { return dim_; }
  ConsistencyMode mode() const { return mode_; }

  Matrix vector_matrix(double t, double s) const;
  Matrix covector_matrix(double t, double s) const;
  /// h(t, s) = f(s) / f(t); throws NumericalError when f vanishes.
  double scalar_factor(double t, double s) const;

 private:
  TensorTransportRule(int dim, ConsistencyMode mode, TwoPointMatrixFn vector, TwoPointMatrixFn covector, ScalarFn f);

  int dim_;
  ConsistencyMode mode_;
  TwoPointMatrixFn vector_;
  TwoPointMatrixFn covector_;
  ScalarFn f_;
};

/// Transports T (anchored at s) to t, one matrix factor per slot.
TensorComponents transport_tensor(const TensorTransportRule& rule, const TensorComponents& t_in, double t, double s);

/// h(t, s) λ.
double scalar_transport(const TensorTransportRule& rule, double t, double s, double lambda);

/// Trace over upper slot `upper` and lower slot `lower` (zero based).
TensorComponents contract(const TensorComponents& t, int upper, int lower);

/// (A ⊗ B) with A's upper slots, then B's upper slots, then A's lower slots,
/// then B's lower slots.
TensorComponents tensor_product(const TensorComponents& a, const TensorComponents& b);

/// Applies one n×n matrix to every slot of one variance of T, treating the
/// other variance's slots as passive. Used by transports and derivations.
TensorComponents apply_slot_matrices(const TensorComponents& t, const Matrix& upper, const Matrix& lower);

/// Sum over slots of the slot-wise action of the infinitesimal matrices
/// (derivation-style: one slot at a time, identity elsewhere).
TensorComponents apply_slot_generators(const TensorComponents& t, const Matrix& upper, const Matrix& lower);

struct LawCheck {
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

struct ConsistencyReport {
  LawCheck product;      // transport(A⊗B) = transport(A)⊗transport(B)
  LawCheck contraction;  // transport∘C = C∘transport
  LawCheck inverse;      // VᵀC = I
  LawCheck scalar;       // transport(λ) = λ
  bool all_pass() const { return product.pass && contraction.pass && inverse.pass && scalar.pass; }
};

/// Checks the rule at (t, s) on random tensors of rank ≤ (2, 2) plus every
/// (1, 1) basis tensor; deterministic for a given seed.
ConsistencyReport check_consistency(const TensorTransportRule& rule, double t, double s, std::uint64_t seed = 42,
                                    double tolerance = 1e-10);

}  // namespace pathlift
