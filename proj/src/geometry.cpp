#include "pathlift/geometry.hpp"

#include "pathlift/errors.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace pathlift {

// ---------------------------------------------------------------------------
// Chart

Chart::Chart(int dim, std::string name, std::vector<std::optional<Interval>> bounds,
             std::vector<std::optional<double>> periods)
    : dim_(dim), name_(std::move(name)), bounds_(std::move(bounds)), periods_(std::move(periods)) {
  if (dim_ < 1) throw ValidationError("chart dimension must be at least 1");
  if (bounds_.empty()) bounds_.resize(static_cast<std::size_t>(dim_));
  if (bounds_.size() != static_cast<std::size_t>(dim_)) {
    throw ValidationError("chart '" + name_ + "': expected one bound entry per axis");
  }
  for (const auto& b : bounds_) {
    if (b && !(b->lo < b->hi)) throw ValidationError("chart '" + name_ + "': empty coordinate box");
  }
  if (periods_.empty()) periods_.resize(static_cast<std::size_t>(dim_));
  if (periods_.size() != static_cast<std::size_t>(dim_)) {
    throw ValidationError("chart '" + name_ + "': expected one period entry per axis");
  }
  for (const auto& p : periods_) {
    if (p && !(*p > 0.0 && std::isfinite(*p))) throw ValidationError("chart '" + name_ + "': periods must be positive");
  }
}

Chart Chart::euclidean(int dim) { return Chart(dim, "R" + std::to_string(dim)); }

Chart Chart::unit_sphere() {
  return Chart(2, "sphere", {Interval{0.0, std::numbers::pi}, std::nullopt}, {std::nullopt, 2.0 * std::numbers::pi});
}

double Chart::coordinate_gap(const Vector& a, const Vector& b) const {
  if (a.size() != dim_ || b.size() != dim_) throw ValidationError("chart '" + name_ + "': point dimension mismatch");
  double gap = 0.0;
  for (int i = 0; i < dim_; ++i) {
    double d = std::abs(a[i] - b[i]);
    if (const auto& p = periods_[static_cast<std::size_t>(i)]) {
      d = std::fmod(d, *p);
      d = std::min(d, *p - d);
    }
    gap = std::max(gap, d);
  }
  return gap;
}

bool Chart::contains(const Vector& x) const {
  if (x.size() != dim_) return false;
  for (int i = 0; i < dim_; ++i) {
    if (!std::isfinite(x[i])) return false;
    const auto& b = bounds_[static_cast<std::size_t>(i)];
    if (b && !(x[i] > b->lo && x[i] < b->hi)) return false;
  }
  return true;
}

void Chart::require_contains(const Vector& x, const std::string& what) const {
  if (x.size() != dim_) {
    throw ValidationError(what + ": point has dimension " + std::to_string(x.size()) + ", chart '" + name_ +
                          "' has " + std::to_string(dim_));
  }
  if (!contains(x)) {
    std::ostringstream os;
    os << what << ": point (" << x.transpose() << ") lies outside chart '" << name_ << "'";
    throw ValidationError(os.str());
  }
}

// ---------------------------------------------------------------------------
// PathCurve

namespace {

// Not-a-knot cubic spline through uniform samples; fewer than four samples
// fall back to the interpolating polynomial.
class UniformSpline {
 public:
  UniformSpline(Interval domain, std::vector<Vector> samples)
      : domain_(domain), values_(std::move(samples)) {
    const auto n = values_.size();
    h_ = domain_.length() / static_cast<double>(n - 1);
    if (n < 4) return;
    const auto dim = values_.front().size();
    const auto ni = static_cast<int>(n);
    Eigen::SparseMatrix<double> a(ni, ni);
    std::vector<Eigen::Triplet<double>> entries;
    Matrix rhs = Matrix::Zero(ni, dim);
    entries.emplace_back(0, 0, 1.0);
    entries.emplace_back(0, 1, -2.0);
    entries.emplace_back(0, 2, 1.0);
    for (int i = 1; i + 1 < ni; ++i) {
      entries.emplace_back(i, i - 1, 1.0);
      entries.emplace_back(i, i, 4.0);
      entries.emplace_back(i, i + 1, 1.0);
      rhs.row(i) = (6.0 / (h_ * h_)) * (values_[i + 1] - 2.0 * values_[i] + values_[i - 1]).transpose();
    }
    entries.emplace_back(ni - 1, ni - 3, 1.0);
    entries.emplace_back(ni - 1, ni - 2, -2.0);
    entries.emplace_back(ni - 1, ni - 1, 1.0);
    a.setFromTriplets(entries.begin(), entries.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw NumericalError("spline system is singular");
    moments_ = lu.solve(rhs);
  }

  Vector position(double s) const { return evaluate(s, false); }
  Vector velocity(double s) const { return evaluate(s, true); }

 private:
  Vector evaluate(double s, bool derivative) const {
    const auto n = values_.size();
    if (n < 4) return lagrange(s, derivative);
    auto k = static_cast<std::ptrdiff_t>(std::floor((s - domain_.lo) / h_));
    k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(n) - 2);
    const double x0 = domain_.lo + h_ * static_cast<double>(k);
    const double a = x0 + h_ - s;
    const double b = s - x0;
    const Vector m0 = moments_.row(k).transpose();
    const Vector m1 = moments_.row(k + 1).transpose();
    const Vector c0 = values_[k] / h_ - m0 * h_ / 6.0;
    const Vector c1 = values_[k + 1] / h_ - m1 * h_ / 6.0;
    if (derivative) return -m0 * (a * a) / (2 * h_) + m1 * (b * b) / (2 * h_) - c0 + c1;
    return m0 * (a * a * a) / (6 * h_) + m1 * (b * b * b) / (6 * h_) + c0 * a + c1 * b;
  }

  Vector lagrange(double s, bool derivative) const {
    const auto n = values_.size();
    Vector out = Vector::Zero(values_.front().size());
    auto node = [&](std::size_t i) { return domain_.lo + h_ * static_cast<double>(i); };
    for (std::size_t i = 0; i < n; ++i) {
      double weight = 0.0;
      if (!derivative) {
        weight = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (j != i) weight *= (s - node(j)) / (node(i) - node(j));
        }
      } else {
        for (std::size_t m = 0; m < n; ++m) {
          if (m == i) continue;
          double term = 1.0 / (node(i) - node(m));
          for (std::size_t j = 0; j < n; ++j) {
            if (j != i && j != m) term *= (s - node(j)) / (node(i) - node(j));
          }
          weight += term;
        }
      }
      out += weight * values_[i];
    }
    return out;
  }

  Interval domain_;
  std::vector<Vector> values_;
  double h_ = 0.0;
  Matrix moments_;
};

// Centered difference of f at s with step h, one-sided second order when the
// centered stencil would leave the domain.
Vector difference(const std::function<Vector(double)>& f, const Interval& domain, double s, double h) {
  if (s - h >= domain.lo && s + h <= domain.hi) return (f(s + h) - f(s - h)) / (2 * h);
  if (s - h < domain.lo) return (-3.0 * f(s) + 4.0 * f(s + h) - f(s + 2 * h)) / (2 * h);
  return (3.0 * f(s) - 4.0 * f(s - h) + f(s - 2 * h)) / (2 * h);
}

}  // namespace

struct PathCurve::Impl {
  Chart chart;
  Interval domain;
  Representation representation;
  PointFn position;
  std::optional<PointFn> velocity;
  std::shared_ptr<const UniformSpline> spline;
};

PathCurve PathCurve::closed_form(Chart chart, Interval domain, PointFn position, std::optional<PointFn> velocity) {
  if (!(domain.lo < domain.hi) || !std::isfinite(domain.lo) || !std::isfinite(domain.hi)) {
    throw ValidationError("path domain must be a finite interval with lo < hi");
  }
  if (!position) throw ValidationError("path position function is empty");
  auto impl = std::make_shared<Impl>(Impl{std::move(chart), domain, Representation::ClosedForm, std::move(position),
                                          velocity && *velocity ? std::move(velocity) : std::nullopt, nullptr});
  PathCurve path(std::move(impl));
  // Validate the whole domain up front: bounds violations are hard errors.
  constexpr int kChecks = 129;
  for (int i = 0; i < kChecks; ++i) {
    const double s = domain.lo + domain.length() * i / (kChecks - 1);
    (void)path.position(s);
    const Vector v = path.velocity(s);
    if (!v.allFinite()) throw ValidationError("path velocity is not finite at s = " + std::to_string(s));
  }
  return path;
}

PathCurve PathCurve::sampled(Chart chart, Interval domain, std::vector<Vector> samples) {
  if (!(domain.lo < domain.hi) || !std::isfinite(domain.lo) || !std::isfinite(domain.hi)) {
    throw ValidationError("path domain must be a finite interval with lo < hi");
  }
  if (samples.size() < 2) throw ValidationError("a sampled path needs at least two samples");
  for (const auto& x : samples) chart.require_contains(x, "path sample");
  auto spline = std::make_shared<const UniformSpline>(domain, std::move(samples));
  auto impl = std::make_shared<Impl>(Impl{std::move(chart), domain, Representation::Sampled,
                                          [spline](double s) { return spline->position(s); },
                                          [spline](double s) { return spline->velocity(s); }, spline});
  PathCurve path(std::move(impl));
  constexpr int kChecks = 129;
  for (int i = 0; i < kChecks; ++i) (void)path.position(domain.lo + domain.length() * i / (kChecks - 1));
  return path;
}

const Chart& PathCurve::chart() const { return impl_->chart; }
const Interval& PathCurve::domain() const { return impl_->domain; }
PathCurve::Representation PathCurve::representation() const { return impl_->representation; }
bool PathCurve::has_analytic_velocity() const { return impl_->velocity.has_value(); }

Vector PathCurve::position(double s) const {
  const auto& d = impl_->domain;
  if (!d.contains(s, 1e-12 * std::max(1.0, d.length()))) {
    throw ValidationError("parameter " + std::to_string(s) + " outside path domain [" + std::to_string(d.lo) + ", " +
                          std::to_string(d.hi) + "]");
  }
  Vector x = impl_->position(s);
  impl_->chart.require_contains(x, "path position at s = " + std::to_string(s));
  return x;
}

Vector PathCurve::velocity(double s) const {
  if (impl_->velocity) {
    (void)position(s);
    return (*impl_->velocity)(s);
  }
  return difference([this](double u) { return position(u); }, impl_->domain, s, kFiniteDifferenceStep);
}

double PathCurve::velocity_consistency(int samples, double h) const {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double s = domain().lo + domain().length() * i / std::max(1, samples - 1);
    const Vector fd = difference([this](double u) { return position(u); }, domain(), s, h);
    worst = std::max(worst, max_abs(velocity(s) - fd));
  }
  return worst;
}

PathCurve make_path(const Chart& chart, Interval domain, const std::vector<Expression>& position,
                    const std::vector<Expression>& velocity) {
  const auto dim = static_cast<std::size_t>(chart.dim());
  if (position.size() != dim) {
    throw ValidationError("path has " + std::to_string(position.size()) + " coordinate expressions, chart dimension is " +
                          std::to_string(dim));
  }
  if (!velocity.empty() && velocity.size() != dim) {
    throw ValidationError("path velocity has wrong number of components");
  }
  auto only_s = [](const Expression& e) { return e.max_coord_index() == 0 && e.max_velocity_index() == 0; };
  for (const auto& e : position) {
    if (!only_s(e)) throw ValidationError("path expressions may only use the parameter s");
  }
  for (const auto& e : velocity) {
    if (!only_s(e)) throw ValidationError("path velocity expressions may only use the parameter s");
  }
  auto eval_all = [](const std::vector<Expression>& exprs) {
    return [exprs](double s) {
      Vector out(static_cast<Eigen::Index>(exprs.size()));
      for (std::size_t i = 0; i < exprs.size(); ++i) out[static_cast<Eigen::Index>(i)] = exprs[i].evaluate({.s = s});
      return out;
    };
  };
  std::optional<PathCurve::PointFn> vel;
  if (!velocity.empty()) vel = eval_all(velocity);
  auto path = PathCurve::closed_form(chart, domain, eval_all(position), std::move(vel));
  if (!velocity.empty()) {
    const double gap = path.velocity_consistency();
    if (gap > PathCurve::kDefaultFdTolerance) {
      throw ValidationError("path velocity disagrees with the derivative of the position by " + std::to_string(gap));
    }
  }
  return path;
}

// ---------------------------------------------------------------------------
// FrameField

FrameField::FrameField(PathCurve path, BasisFn basis, double cond_cap)
    : path_(std::move(path)), basis_(std::move(basis)), cond_cap_(cond_cap) {
  if (!basis_) throw ValidationError("frame basis function is empty");
}

FrameField FrameField::coordinate(PathCurve path) {
  const int n = path.chart().dim();
  return FrameField(std::move(path), [n](double) { return Matrix::Identity(n, n); });
}

Matrix FrameField::basis(double s) const {
  (void)path_.position(s);
  Matrix b = basis_(s);
  const int n = path_.chart().dim();
  if (b.rows() != n || b.cols() != n) throw ValidationError("frame basis has wrong shape");
  // Validates conditioning; the inverse itself is discarded.
  (void)checked_inverse(b, cond_cap_, "frame basis at s = " + std::to_string(s));
  return b;
}

Matrix frame_change_matrix(const FrameField& frame_a, const FrameField& frame_b, double s) {
  if (!frame_a.path().same_path(frame_b.path())) {
    throw ValidationError("frame_change_matrix: frames live on different paths");
  }
  return checked_solve(frame_a.basis(s), frame_b.basis(s), frame_a.cond_cap(), "frame change");
}

// ---------------------------------------------------------------------------
// Connections

Matrix Christoffel::contract_velocity(const Vector& v) const {
  if (v.size() != dim_) throw ValidationError("velocity dimension does not match connection");
  Matrix out = Matrix::Zero(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k) out(i, j) += (*this)(i, j, k) * v[k];
  return out;
}

ConnectionField::ConnectionField(Chart chart, CoefficientFn fn, std::string name)
    : chart_(std::move(chart)), fn_(std::move(fn)), name_(std::move(name)) {
  if (!fn_) throw ValidationError("connection coefficient function is empty");
}

ConnectionField ConnectionField::flat(int dim) {
  return ConnectionField(Chart::euclidean(dim), [dim](const Vector&) { return Christoffel(dim); }, "flat");
}

ConnectionField ConnectionField::unit_sphere() {
  return ConnectionField(
      Chart::unit_sphere(),
      [](const Vector& x) {
        const double theta = x[0];
        Christoffel g(2);
        g(0, 1, 1) = -std::sin(theta) * std::cos(theta);
        g(1, 0, 1) = std::cos(theta) / std::sin(theta);
        g(1, 1, 0) = g(1, 0, 1);
        return g;
      },
      "sphere");
}

Christoffel ConnectionField::coefficients(const Vector& x) const {
  chart_.require_contains(x, "connection '" + name_ + "'");
  Christoffel g = fn_(x);
  if (g.dim() != chart_.dim()) throw ValidationError("connection '" + name_ + "' returned wrong dimension");
  for (double c : g.data()) {
    if (!std::isfinite(c)) throw NumericalError("connection '" + name_ + "' is not finite at the queried point");
  }
  return g;
}

}  // namespace pathlift
