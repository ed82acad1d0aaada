#include <gtest/gtest.h>

#include <cmath>

#include "ggames/cut_norm.hpp"
#include "ggames/errors.hpp"
#include "ggames/graphs.hpp"
#include "ggames/sampling.hpp"
#include "support.hpp"

using namespace ggames;

namespace {
Eigen::MatrixXd swap2() {
  Eigen::MatrixXd g(2, 2);
  g << 0, 1, 1, 0;
  return g;
}

StepKernel random_step_kernel(rng::Stream& r, int max_blocks) {
  const int k = r.integer(1, max_blocks);
  std::vector<double> cuts(k - 1);
  for (auto& c : cuts) c = r.uniform(0.02, 0.98);
  std::sort(cuts.begin(), cuts.end());
  StepKernel s;
  s.breaks.push_back(0.0);
  for (double c : cuts)
    if (c - s.breaks.back() > 1e-3) s.breaks.push_back(c);
  s.breaks.push_back(1.0);
  const int kk = static_cast<int>(s.breaks.size()) - 1;
  s.values.resize(kk, kk);
  for (int i = 0; i < kk; ++i)
    for (int j = i; j < kk; ++j) s.values(i, j) = s.values(j, i) = r.uniform(-1.0, 1.0);
  return s;
}
}  // namespace

TEST(InteractionMatrix, Validation) {
  Eigen::MatrixXd a(2, 2);
  a << 0, 1, 0.5, 0;
  EXPECT_THROW(InteractionMatrix{a}, ArgumentError);
  a << 0, 2, 2, 0;
  EXPECT_THROW(InteractionMatrix{a}, ArgumentError);
  EXPECT_THROW(InteractionMatrix(swap2(), 0.0), ArgumentError);
  EXPECT_THROW(InteractionMatrix(Eigen::MatrixXd::Zero(2, 3)), ShapeError);
}

TEST(StepGraphon, BlockLookup) {
  const Graphon w = step_graphon(InteractionMatrix(swap2()));
  EXPECT_EQ(w(0.1, 0.6), 1.0);
  EXPECT_EQ(w(0.1, 0.2), 0.0);
  EXPECT_EQ(w(1.0, 0.0), 1.0);
}

TEST(StepGraphon, ConstantMatrixIsConstantGraphon) {
  const Graphon w = step_graphon(InteractionMatrix(Eigen::MatrixXd::Constant(3, 3, 0.4)));
  rng::Stream r(3);
  for (int k = 0; k < 50; ++k) EXPECT_DOUBLE_EQ(w(r.uniform(), r.uniform()), 0.4);
}

TEST(Graphon, SymmetryOnRandomPoints) {
  rng::Stream r(4);
  const InteractionMatrix g = fixtures::random_graph(7, r);
  Eigen::MatrixXd blocks(3, 3);
  blocks << 0.9, 0.1, 0.2, 0.1, 0.5, 0.3, 0.2, 0.3, 0.7;
  for (const Graphon& w : {Graphon::product(), Graphon::minimum(), Graphon::constant(0.3), step_graphon(g),
                           Graphon::stochastic_block({0.2, 0.5, 0.3}, blocks)}) {
    for (int k = 0; k < 200; ++k) {
      const double x = r.uniform(), y = r.uniform();
      EXPECT_EQ(w(x, y), w(y, x)) << w.describe();
      EXPECT_GE(w(x, y), 0.0);
      EXPECT_LE(w(x, y), 1.0);
    }
  }
}

TEST(ApplyOperator, ConstantKernel) {
  auto s = make_space(1.0, 3, 2);
  const Profile z = apply_operator(Graphon::constant(0.35), Profile::constant(s, 8, 1.0));
  EXPECT_NEAR((z.data().array() - 0.35).abs().maxCoeff(), 0.0, 1e-15);
  EXPECT_EQ(apply_operator(Graphon::product(), Profile::zeros(s, 8)).data().cwiseAbs().maxCoeff(), 0.0);
}

TEST(ApplyOperator, MatchesLocalAggregateOnAlignedSteps) {
  rng::Stream r(8);
  auto s = make_space(1.0, 4, 3);
  const InteractionMatrix g = fixtures::random_graph(5, r);
  const Profile a = fixtures::random_profile(s, 5, r);
  const Profile z_net = local_aggregate(g, a);
  const Profile z_graphon = apply_operator(step_graphon(g), step_embed(a, 20));
  EXPECT_LT((step_embed(z_net, 20).data() - z_graphon.data()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(LocalAggregate, Examples) {
  auto s = make_space(1.0, 2, 1);
  const Profile ones = Profile::constant(s, 2, 1.0);
  const Profile z = local_aggregate(InteractionMatrix(swap2()), ones);
  EXPECT_TRUE((z.data().array() == 0.5).all());
  EXPECT_EQ(local_aggregate(InteractionMatrix(Eigen::MatrixXd::Zero(2, 2)), ones).data().cwiseAbs().maxCoeff(), 0.0);
  const Profile z2 = local_aggregate(InteractionMatrix(swap2(), 2.0), ones);
  EXPECT_EQ(z2.data(), 2.0 * z.data());
  EXPECT_THROW(local_aggregate(InteractionMatrix(swap2()), Profile::constant(s, 3, 1.0)), ShapeError);
}

TEST(Spectrum, TwoByTwo) {
  const auto sd = spectrum(InteractionMatrix(swap2()));
  EXPECT_NEAR(sd.eigenvalues[0], 1.0, 1e-15);
  EXPECT_NEAR(sd.eigenvalues[1], -1.0, 1e-15);
  const double h = 1 / std::sqrt(2.0);
  EXPECT_NEAR(sd.eigenvectors(0, 0), h, 1e-15);
  EXPECT_NEAR(sd.eigenvectors(1, 0), h, 1e-15);
  EXPECT_NEAR(sd.eigenvectors(0, 1), h, 1e-15);
  EXPECT_NEAR(sd.eigenvectors(1, 1), -h, 1e-15);
}

TEST(Spectrum, ZeroMatrix) {
  const auto sd = spectrum(InteractionMatrix(Eigen::MatrixXd::Zero(4, 4)));
  EXPECT_EQ(sd.eigenvalues.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Spectrum, RejectsAsymmetric) {
  Eigen::MatrixXd a(2, 2);
  a << 0, 1, 0, 0;
  EXPECT_THROW(spectrum(a), ArgumentError);
}

TEST(Spectrum, InvariantsOnRandomMatrices) {
  rng::Stream r(12);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = r.integer(2, 40);
    const InteractionMatrix g(fixtures::random_graph(n, r).entries(), r.uniform(1.0, 3.0));
    const auto sd = spectrum(g);
    const Eigen::MatrixXd rec = sd.eigenvectors * sd.eigenvalues.asDiagonal() * sd.eigenvectors.transpose();
    EXPECT_LE((rec - g.effective()).norm(), 1e-8 * g.effective().norm());
    EXPECT_LE((sd.eigenvectors.transpose() * sd.eigenvectors - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(),
              1e-10);
    for (int k = 0; k + 1 < n; ++k) EXPECT_GE(sd.eigenvalues[k], sd.eigenvalues[k + 1]);
    for (int k = 0; k < n; ++k) {
      int i = 0;
      while (std::abs(sd.eigenvectors(i, k)) <= 1e-10) ++i;
      EXPECT_GT(sd.eigenvectors(i, k), 0.0);
    }
  }
}

TEST(Spectrum, MatchesStepGraphonEigenvalue) {
  rng::Stream r(13);
  const int n = 6, m = 60;
  const InteractionMatrix g = fixtures::random_graph(n, r);
  const double lam = spectrum(g).eigenvalues[0] / n;
  EXPECT_NEAR(graphon_lambda1(step_graphon(g), m), lam, 2.0 / m + 1e-6);
}

TEST(GraphonLambda1, AnalyticValues) {
  EXPECT_NEAR(graphon_lambda1(Graphon::constant(0.4), 64), 0.4, 1e-10);
  // Midpoint rule error for the eigenfunction x is O(1/m^2).
  EXPECT_NEAR(graphon_lambda1(Graphon::product(), 256), 1.0 / 3.0, 1e-5);
  EXPECT_EQ(graphon_lambda1(Graphon::constant(0.0), 16), 0.0);
  // min(x, y) has top eigenvalue 4 / pi^2.
  EXPECT_NEAR(graphon_lambda1(Graphon::minimum(), 512), 4.0 / (M_PI * M_PI), 1e-4);
  EXPECT_THROW(graphon_lambda1(Graphon::product(), 1), ArgumentError);
}

TEST(OpNormDiff, Examples) {
  EXPECT_EQ(op_norm_diff(Graphon::product(), Graphon::product(), 64), 0.0);
  EXPECT_NEAR(op_norm_diff(Graphon::constant(0.7), Graphon::constant(0.2), 32), 0.5, 1e-12);
}

TEST(CutNorm, Examples) {
  EXPECT_NEAR(cut_norm(Graphon::constant(0.3), CutNormMode::exact).value, 0.3, 1e-15);
  EXPECT_EQ(cut_norm(Graphon::constant(0.0), CutNormMode::exact).value, 0.0);
  const double a = 0.8;
  Eigen::MatrixXd v(2, 2);
  v << a, -a, -a, a;
  const auto res = cut_norm(StepKernel::uniform(v), CutNormMode::exact);
  EXPECT_NEAR(res.value, a / 4, 1e-15);
  EXPECT_FALSE(res.lower_bound);
}

TEST(CutNorm, ExactRefusesLargeKernels) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Ones(17, 17);
  v.diagonal() = Eigen::VectorXd::LinSpaced(17, 0.0, 1.0);
  EXPECT_THROW(cut_norm(StepKernel::uniform(v), CutNormMode::exact), CapabilityError);
  const auto h = cut_norm(StepKernel::uniform(v), CutNormMode::automatic);
  EXPECT_TRUE(h.lower_bound);
  EXPECT_EQ(h.blocks, 17);
  // All entries are nonnegative, so the whole square is optimal.
  EXPECT_NEAR(h.value, v.sum() / (17.0 * 17.0), 1e-12);
}

TEST(CutNorm, MergesEqualBlocks) {
  // A constant kernel on 40 blocks is one block.
  const auto r = cut_norm(StepKernel::uniform(Eigen::MatrixXd::Constant(40, 40, 0.25)), CutNormMode::exact);
  EXPECT_EQ(r.blocks, 1);
  EXPECT_NEAR(r.value, 0.25, 1e-15);
  Eigen::MatrixXd b(2, 2);
  b << 0.9, 0.2, 0.2, 0.4;
  const auto merged = merge_equal_blocks(StepKernel::uniform(coarsen(Graphon::step(b), 8, 8).entries()));
  ASSERT_EQ(merged.blocks(), 2);
  EXPECT_DOUBLE_EQ(merged.breaks[1], 0.5);
}

TEST(CutNorm, BruteForceOracle) {
  // Independent oracle: enumerate both subsets explicitly.
  rng::Stream r(21);
  for (int rep = 0; rep < 30; ++rep) {
    const StepKernel k = random_step_kernel(r, 6);
    const auto w = k.widths();
    const int b = k.blocks();
    double best = 0.0;
    for (int s1 = 0; s1 < (1 << b); ++s1)
      for (int s2 = 0; s2 < (1 << b); ++s2) {
        double sum = 0.0;
        for (int i = 0; i < b; ++i)
          for (int j = 0; j < b; ++j)
            if ((s1 >> i & 1) && (s2 >> j & 1)) sum += w[i] * w[j] * k.values(i, j);
        best = std::max(best, std::abs(sum));
      }
    EXPECT_NEAR(cut_norm(k, CutNormMode::exact).value, best, 1e-14);
  }
}

TEST(CutNorm, HeuristicIsLowerBound) {
  rng::Stream r(22);
  for (int rep = 0; rep < 50; ++rep) {
    const StepKernel k = random_step_kernel(r, 12);
    const double exact = cut_norm(k, CutNormMode::exact).value;
    const auto h = cut_norm(k, CutNormMode::heuristic, rep);
    EXPECT_TRUE(h.lower_bound);
    EXPECT_LE(h.value, exact + 1e-14);
    EXPECT_GE(h.value, 0.5 * exact);
  }
}

TEST(CutNorm, DifferenceOfStepGraphons) {
  Eigen::MatrixXd a(2, 2), b(3, 3);
  a << 0.5, 0.1, 0.1, 0.5;
  b.setConstant(0.3);
  const auto d = cut_norm_difference(Graphon::step(a), Graphon::step(b), CutNormMode::exact);
  EXPECT_EQ(d.blocks, 2);  // the refinement at 1/3 and 2/3 merges away
  // +0.2 on the diagonal halves, -0.2 off them: the checkerboard value a / 4.
  EXPECT_NEAR(d.value, 0.2 / 4, 1e-14);
}

TEST(NormSandwich, RandomStepKernels) {
  rng::Stream r(23);
  const int m = 480;
  for (int rep = 0; rep < 40; ++rep) {
    const StepKernel k = random_step_kernel(r, 12);
    Eigen::MatrixXd d(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) d(i, j) = k((i + 0.5) / m, (j + 0.5) / m);
    const double cut = cut_norm(k, CutNormMode::exact).value;
    const double op = step_kernel_op_norm(k);
    EXPECT_LE(cut, op + 1e-12);
    EXPECT_LE(op, std::sqrt(8 * cut) + 1e-12);
    // Midpoint discretization misplaces at most one row and column per break.
    EXPECT_NEAR(kernel_op_norm(d), op, 2.0 * k.blocks() / m);
  }
}

TEST(Sampling, WeightedExamples) {
  const auto full = sample_weighted(Graphon::constant(1.0), 5, 1);
  EXPECT_TRUE((full.matrix.entries().array() == 1.0).all());
  const auto empty = sample_weighted(Graphon::constant(0.0), 5, 1);
  EXPECT_EQ(empty.matrix.entries().cwiseAbs().maxCoeff(), 0.0);
  const auto g = sample_weighted(Graphon::product(), 30, 9);
  for (std::size_t i = 1; i < g.latent.size(); ++i) EXPECT_LE(g.latent[i - 1], g.latent[i]);
  EXPECT_DOUBLE_EQ(g.matrix.entries()(3, 3), g.latent[3] * g.latent[3]);
}

TEST(Sampling, WeightedMeanEntryMonteCarlo) {
  // For W(x, y) = xy the mean off-diagonal entry is E[x]E[y] = 1/4.
  const int reps = 2000, n = 6;
  double total = 0.0;
  int count = 0;
  for (int k = 0; k < reps; ++k) {
    const auto g = sample_weighted(Graphon::product(), n, 5000 + k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) {
          total += g.matrix.entries()(i, j);
          ++count;
        }
  }
  // Entries within a draw are correlated, so the standard error is bounded
  // using one effective observation per draw: Var(xy) = 1/9 - 1/16.
  const double se = std::sqrt((1.0 / 9 - 1.0 / 16) / reps);
  EXPECT_NEAR(total / count, 0.25, 4 * se);
}

TEST(Sampling, SimpleExamples) {
  const auto full = sample_simple(Graphon::constant(1.0), 6, 1.0, 3);
  Eigen::MatrixXd complete = Eigen::MatrixXd::Ones(6, 6);
  complete.diagonal().setZero();
  EXPECT_EQ(full.matrix.entries(), complete);
  EXPECT_EQ(sample_simple(Graphon::constant(0.0), 6, 1.0, 3).matrix.entries().sum(), 0.0);
  const auto sparse = sample_simple(Graphon::constant(1.0), 6, 0.25, 3);
  EXPECT_DOUBLE_EQ(sparse.matrix.scale(), 4.0);
  EXPECT_THROW(sample_simple(Graphon::constant(1.0), 6, 0.0, 3), ArgumentError);
}

TEST(Sampling, SimpleEdgeFrequencyMonteCarlo) {
  const double p = 0.6, kappa = 0.5;
  const int n = 40;
  const auto g = sample_simple(Graphon::constant(p), n, kappa, 77);
  const double pairs = n * (n - 1) / 2.0;
  const double freq = g.matrix.entries().sum() / 2 / pairs;
  const double q = p * kappa;
  EXPECT_NEAR(freq, q, 3 * std::sqrt(q * (1 - q) / pairs));
}

TEST(Sampling, Reproducible) {
  EXPECT_EQ(sample_weighted(Graphon::minimum(), 20, 5).matrix.entries(),
            sample_weighted(Graphon::minimum(), 20, 5).matrix.entries());
  EXPECT_EQ(sample_simple(Graphon::product(), 20, 0.7, 5).matrix.entries(),
            sample_simple(Graphon::product(), 20, 0.7, 5).matrix.entries());
  EXPECT_NE(sample_weighted(Graphon::minimum(), 20, 5).latent, sample_weighted(Graphon::minimum(), 20, 6).latent);
}

TEST(Sampling, CoarsenAlignedStepGraphon) {
  Eigen::MatrixXd b(2, 2);
  b << 0.9, 0.2, 0.2, 0.4;
  const InteractionMatrix g = coarsen(Graphon::step(b), 4, 16);
  Eigen::MatrixXd expected(4, 4);
  expected << 0.9, 0.9, 0.2, 0.2, 0.9, 0.9, 0.2, 0.2, 0.2, 0.2, 0.4, 0.4, 0.2, 0.2, 0.4, 0.4;
  EXPECT_LT((g.entries() - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SamplingBound, Formula) {
  const int n = 400;
  const double delta = 0.05, L = 1.0, K = 0.0;
  const auto b = sampling_bound(n, delta, L, K, 1.0);
  const double d = 1.0 / n + std::sqrt(8 * std::log(n / delta) / (n + 1));
  EXPECT_NEAR(b.rho, 2 * std::sqrt(L * L * d * d), 1e-14);
  EXPECT_NEAR(b.rho_prime, std::sqrt(4 * std::log(2 * n / delta) / n) + b.rho, 1e-14);
  EXPECT_EQ(sampling_bound(n, delta, 0, 0, 1).rho, 0.0);
  EXPECT_LT(sampling_bound(2 * n, delta, 1, 0.5, 1).rho, sampling_bound(n, delta, 1, 0.5, 1).rho);
  EXPECT_THROW(sampling_bound(n, 0.5, 1, 0, 1), ArgumentError);
  EXPECT_THROW(sampling_bound(10, 0.1, 1, 0, 1), ArgumentError);
}
