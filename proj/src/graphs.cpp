#include "ggames/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ggames/errors.hpp"
#include "ggames/rng.hpp"

namespace ggames {

namespace {

constexpr double kSymTol = 1e-12;

bool is_symmetric(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double s = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * s;
}

}  // namespace

// ---- InteractionMatrix ----

InteractionMatrix::InteractionMatrix(Eigen::MatrixXd entries, double scale)
    : entries_(std::move(entries)), scale_(scale) {
  if (entries_.rows() < 1 || entries_.rows() != entries_.cols()) throw ShapeError("interaction matrix must be square");
  if (!entries_.allFinite()) throw ArgumentError("interaction matrix entries must be finite");
  if (!(scale_ > 0.0) || !std::isfinite(scale_)) throw ArgumentError("interaction scale must be positive");
  if (!is_symmetric(entries_, kSymTol)) throw ArgumentError("interaction matrix must be symmetric");
  if (entries_.minCoeff() < -kSymTol || entries_.maxCoeff() > 1.0 + kSymTol)
    throw ArgumentError("interaction matrix entries must lie in [0, 1]");
}

InteractionMatrix InteractionMatrix::with_zero_diagonal() const {
  Eigen::MatrixXd e = entries_;
  e.diagonal().setZero();
  return InteractionMatrix(std::move(e), scale_);
}

// ---- StepKernel ----

std::vector<double> StepKernel::widths() const {
  std::vector<double> w(breaks.size() - 1);
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) w[k] = breaks[k + 1] - breaks[k];
  return w;
}

int StepKernel::block_of(double x) const {
  // Half-open blocks [b_k, b_{k+1}); x = 1 belongs to the last block.
  const auto it = std::upper_bound(breaks.begin() + 1, breaks.end() - 1, x);
  return static_cast<int>(it - breaks.begin()) - 1;
}

StepKernel StepKernel::uniform(Eigen::MatrixXd values) {
  const int k = static_cast<int>(values.rows());
  StepKernel s;
  s.breaks.resize(k + 1);
  for (int i = 0; i <= k; ++i) s.breaks[i] = static_cast<double>(i) / k;
  s.values = std::move(values);
  s.validate();
  return s;
}

void StepKernel::validate() const {
  if (values.rows() < 1 || values.rows() != values.cols()) throw ShapeError("step kernel values must be square");
  if (static_cast<Eigen::Index>(breaks.size()) != values.rows() + 1)
    throw ShapeError("step kernel needs K + 1 breakpoints");
  if (breaks.front() != 0.0 || breaks.back() != 1.0) throw ArgumentError("step kernel partition must span [0, 1]");
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k)
    if (!(breaks[k + 1] > breaks[k])) throw ArgumentError("step kernel breakpoints must increase");
  if (!values.allFinite()) throw ArgumentError("step kernel values must be finite");
}

StepKernel kernel_difference(const StepKernel& a, const StepKernel& b) {
  std::vector<double> br;
  br.reserve(a.breaks.size() + b.breaks.size());
  std::merge(a.breaks.begin(), a.breaks.end(), b.breaks.begin(), b.breaks.end(), std::back_inserter(br));
  std::vector<double> merged;
  for (double x : br)
    if (merged.empty() || x - merged.back() > 1e-15) merged.push_back(x);
  merged.back() = 1.0;
  const int k = static_cast<int>(merged.size()) - 1;
  StepKernel d;
  d.breaks = merged;
  d.values.resize(k, k);
  for (int i = 0; i < k; ++i) {
    const double x = 0.5 * (merged[i] + merged[i + 1]);
    for (int j = 0; j < k; ++j) {
      const double y = 0.5 * (merged[j] + merged[j + 1]);
      d.values(i, j) = a(x, y) - b(x, y);
    }
  }
  return d;
}

StepKernel merge_equal_blocks(const StepKernel& k) {
  const int n = k.blocks();
  std::vector<int> keep;  // first block of every run
  for (int i = 0; i < n; ++i)
    if (keep.empty() || k.values.row(i) != k.values.row(keep.back())) keep.push_back(i);
  StepKernel out;
  const int r = static_cast<int>(keep.size());
  out.values.resize(r, r);
  for (int a = 0; a < r; ++a) {
    out.breaks.push_back(k.breaks[keep[a]]);
    for (int b = 0; b < r; ++b) out.values(a, b) = k.values(keep[a], keep[b]);
  }
  out.breaks.push_back(1.0);
  return out;
}

// ---- Graphon ----

Graphon Graphon::constant(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("constant graphon needs p in [0, 1]");
  return Graphon(Kind::constant, p, StepKernel::uniform(Eigen::MatrixXd::Constant(1, 1, p)));
}

Graphon Graphon::product() { return Graphon(Kind::product, 0.0, {}); }

Graphon Graphon::minimum() { return Graphon(Kind::minimum, 0.0, {}); }

Graphon Graphon::stochastic_block(const std::vector<double>& proportions, Eigen::MatrixXd probabilities) {
  const int k = static_cast<int>(proportions.size());
  if (k < 1 || probabilities.rows() != k || probabilities.cols() != k)
    throw ShapeError("stochastic block model needs K proportions and a K x K matrix");
  if (std::abs(std::accumulate(proportions.begin(), proportions.end(), 0.0) - 1.0) > 1e-12)
    throw ArgumentError("block proportions must sum to 1");
  if (probabilities.minCoeff() < 0.0 || probabilities.maxCoeff() > 1.0)
    throw ArgumentError("block probabilities must lie in [0, 1]");
  StepKernel s;
  s.breaks.assign(1, 0.0);
  for (double p : proportions) {
    if (!(p > 0.0)) throw ArgumentError("block proportions must be positive");
    s.breaks.push_back(s.breaks.back() + p);
  }
  s.breaks.back() = 1.0;
  s.values = std::move(probabilities);
  return step(std::move(s));
}

Graphon Graphon::step(Eigen::MatrixXd values) { return step(StepKernel::uniform(std::move(values))); }

Graphon Graphon::step(StepKernel kernel) {
  kernel.validate();
  if (!is_symmetric(kernel.values, kSymTol)) throw ArgumentError("step graphon blocks must be symmetric");
  if (kernel.values.minCoeff() < 0.0) throw ArgumentError("step graphon blocks must be nonnegative");
  return Graphon(Kind::step, 0.0, std::move(kernel));
}

double Graphon::operator()(double x, double y) const {
  switch (kind_) {
    case Kind::constant: return p_;
    case Kind::product: return x * y;
    case Kind::minimum: return std::min(x, y);
    case Kind::step: return kernel_(x, y);
  }
  return 0.0;
}

std::optional<StepKernel> Graphon::as_step_kernel() const {
  if (kind_ == Kind::constant || kind_ == Kind::step) return kernel_;
  return std::nullopt;
}

Eigen::MatrixXd Graphon::discretize(int m) const {
  if (m < 1) throw ArgumentError("discretization resolution must be positive");
  Eigen::MatrixXd out(m, m);
  for (int j = 0; j < m; ++j) {
    const double y = (j + 0.5) / m;
    for (int i = 0; i < m; ++i) out(i, j) = (*this)((i + 0.5) / m, y);
  }
  return out;
}

std::string Graphon::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::constant: os << "constant(" << p_ << ")"; break;
    case Kind::product: os << "product"; break;
    case Kind::minimum: os << "minimum"; break;
    case Kind::step: os << "step(" << kernel_.blocks() << " blocks)"; break;
  }
  return os.str();
}

Graphon step_graphon(const InteractionMatrix& g) { return Graphon::step(g.effective()); }

InteractionMatrix discretize(const Graphon& w, int m) {
  // Step graphons built from scaled matrices may exceed 1; carry that in the scale.
  Eigen::MatrixXd v = w.discretize(m);
  const double s = std::max(1.0, v.maxCoeff());
  if (s > 1.0) v /= s;
  return InteractionMatrix(std::move(v), s);
}

// ---- aggregates ----

Profile local_aggregate(const InteractionMatrix& g, const Profile& a) {
  if (g.size() != a.players()) throw ShapeError("local_aggregate: matrix size differs from player count");
  const double c = g.scale() / g.size();
  return Profile(a.space(), c * (g.entries() * a.data()));
}

Profile apply_operator(const Graphon& w, const Profile& a) {
  const int n = a.players();
  return Profile(a.space(), (w.discretize(n) * a.data()) / n);
}

// ---- spectra ----

SpectralDecomposition spectrum(const Eigen::MatrixXd& symmetric) {
  if (!is_symmetric(symmetric, kSymTol)) throw ArgumentError("spectrum: matrix must be symmetric");
  const int n = static_cast<int>(symmetric.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric);
  if (es.info() != Eigen::Success) throw NumericError("spectrum: eigensolver failed", NAN);

  SpectralDecomposition out;
  out.source_n = n;
  out.eigenvalues = es.eigenvalues().reverse();
  out.eigenvectors = es.eigenvectors().rowwise().reverse();
  for (int k = 0; k < n; ++k) {
    auto col = out.eigenvectors.col(k);
    for (int i = 0; i < n; ++i) {
      if (std::abs(col[i]) > 1e-10) {
        if (col[i] < 0) col = -col;
        break;
      }
    }
  }
  // Order eigenvectors of (numerically) equal eigenvalues lexicographically.
  const double tie = 1e-12 * std::max(1.0, out.eigenvalues.cwiseAbs().maxCoeff());
  int start = 0;
  while (start < n) {
    int end = start + 1;
    while (end < n && out.eigenvalues[start] - out.eigenvalues[end] <= tie) ++end;
    if (end - start > 1) {
      std::vector<int> idx(end - start);
      std::iota(idx.begin(), idx.end(), start);
      const Eigen::MatrixXd& v = out.eigenvectors;
      std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        for (int i = 0; i < n; ++i) {
          if (v(i, a) < v(i, b) - 1e-12) return true;
          if (v(i, a) > v(i, b) + 1e-12) return false;
        }
        return a < b;
      });
      Eigen::MatrixXd block(n, end - start);
      for (int k = 0; k < end - start; ++k) block.col(k) = v.col(idx[k]);
      out.eigenvectors.middleCols(start, end - start) = block;
    }
    start = end;
  }
  return out;
}

SpectralDecomposition spectrum(const InteractionMatrix& g) { return spectrum(g.effective()); }

Eigen::VectorXd eigenvalues(const InteractionMatrix& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.effective(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("eigenvalues: eigensolver failed", NAN);
  return es.eigenvalues().reverse();
}

double power_norm(const Eigen::MatrixXd& a, double tol, int max_iters) {
  const int n = static_cast<int>(a.rows());
  if (n == 0) return 0.0;
  // Deterministic start with a positive bias so nonnegative kernels converge
  // to the Perron vector, plus a keyed perturbation for signed kernels.
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * (rng::uniform(rng::key(0x9a1, i)) - 0.5);
  v.normalize();
  double est = 0.0, increment = INFINITY;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXd av = a * v;
    const double nrm = av.norm();
    if (nrm == 0.0) return 0.0;
    increment = std::abs(nrm - est);
    if (increment <= tol * nrm) return nrm;
    est = nrm;
    v = av / nrm;
  }
  throw NumericError("power iteration did not converge", increment / std::max(est, 1e-300));
}

double graphon_lambda1(const Graphon& w, int m) {
  if (m < 2) throw ArgumentError("graphon_lambda1: resolution must be at least 2");
  return power_norm(w.discretize(m) / m);
}

double op_norm_diff(const Graphon& w1, const Graphon& w2, int m) {
  if (m < 1) throw ArgumentError("op_norm_diff: resolution must be positive");
  return kernel_op_norm(w1.discretize(m) - w2.discretize(m));
}

double kernel_op_norm(const Eigen::MatrixXd& block_values) {
  if (block_values.rows() != block_values.cols()) throw ShapeError("kernel_op_norm: values must be square");
  return power_norm(block_values / static_cast<double>(block_values.rows()));
}

}  // namespace ggames
