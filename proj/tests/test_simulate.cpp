#include <gtest/gtest.h>

#include <set>

#include "bdgm/simulate.hpp"

using namespace bdgm;

namespace {

SimSpec spec_of(long n, int p, DataType type, FamilyKind family) {
  SimSpec s;
  s.n = n;
  s.p = p;
  s.type = type;
  s.family.kind = family;
  return s;
}

}  // namespace

TEST(Precision, CircleAtFourNodes) {
  Matrix want(4, 4);
  want << 1.0, 0.5, 0.0, 0.4,
          0.5, 1.0, 0.5, 0.0,
          0.0, 0.5, 1.0, 0.5,
          0.4, 0.0, 0.5, 1.0;
  EXPECT_EQ(circle_precision(4), want);
}

TEST(Precision, Ar2AtFourNodes) {
  Matrix want(4, 4);
  want << 1.0, 0.5, 0.25, 0.0,
          0.5, 1.0, 0.5, 0.25,
          0.25, 0.5, 1.0, 0.5,
          0.0, 0.25, 0.5, 1.0;
  EXPECT_EQ(ar2_precision(4), want);
}

TEST(Precision, HubZeroPattern) {
  Rng rng(1);
  const SimOutput out = simulate_data(spec_of(10, 5, DataType::gaussian, FamilyKind::hub), rng);
  for (int i = 1; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) EXPECT_EQ(out.K(i, j), 0.0);
  for (int j = 1; j < 5; ++j) EXPECT_NE(out.K(0, j), 0.0);
  EXPECT_EQ(support_graph(out.K), out.graph);
  EXPECT_TRUE(is_positive_definite(out.K));
}

TEST(Gaussian, CovarianceIsInversePrecision) {
  Rng rng(2);
  const long n = 50000;
  const SimOutput out = simulate_data(spec_of(n, 3, DataType::gaussian, FamilyKind::circle), rng);
  const Matrix sigma = circle_precision(3).inverse();
  const Matrix& y = out.data.y;
  const Matrix cov = y.transpose() * y / static_cast<double>(n);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double se = std::sqrt((sigma(i, j) * sigma(i, j) + sigma(i, i) * sigma(j, j)) / n);
      EXPECT_NEAR(cov(i, j), sigma(i, j), 3 * se) << i << "," << j;
    }
  EXPECT_EQ(out.K, circle_precision(3));
}

TEST(Discrete, ValuesAreCategories) {
  Rng rng(3);
  auto s = spec_of(200, 4, DataType::discrete, FamilyKind::random);
  s.cut = 4;
  const SimOutput out = simulate_data(s, rng);
  for (int j = 0; j < 4; ++j) {
    std::set<double> seen(out.data.y.col(j).data(), out.data.y.col(j).data() + 200);
    EXPECT_EQ(seen, (std::set<double>{1, 2, 3, 4}));
    EXPECT_EQ(out.data.kinds[static_cast<std::size_t>(j)], VarKind::ordinal);
  }
}

TEST(Binary, ValuesAreZeroOne) {
  Rng rng(4);
  const SimOutput out = simulate_data(spec_of(50, 3, DataType::binary, FamilyKind::random), rng);
  for (double v : out.data.y.reshaped()) EXPECT_TRUE(v == 0.0 || v == 1.0);
}

TEST(Mixed, ColumnKinds) {
  Rng rng(5);
  const SimOutput out = simulate_data(spec_of(100, 5, DataType::mixed, FamilyKind::random), rng);
  const std::vector<VarKind> want{VarKind::count, VarKind::ordinal, VarKind::binary, VarKind::continuous,
                                  VarKind::continuous};
  EXPECT_EQ(out.data.kinds, want);
  for (double v : out.data.y.col(0)) EXPECT_EQ(v, std::round(v));
  for (double v : out.data.y.col(4)) EXPECT_GT(v, 0.0);
  EXPECT_NO_THROW(out.data.validate());
}

TEST(Transforms, MonotoneInTheLatentDraw) {
  Rng rng(6);
  for (auto type : {DataType::non_gaussian, DataType::discrete, DataType::mixed}) {
    const SimOutput out = simulate_data(spec_of(300, 5, type, FamilyKind::circle), rng);
    for (int j = 0; j < 5; ++j)
      for (long a = 0; a < 300; a += 7)
        for (long b = 0; b < 300; b += 11)
          if (out.latent(a, j) < out.latent(b, j)) {
            EXPECT_LE(out.data.y(a, j), out.data.y(b, j));
          }
  }
}

TEST(Simulate, SameSeedSameOutput) {
  Rng a(7), b(7);
  const auto s = spec_of(30, 6, DataType::mixed, FamilyKind::scale_free);
  const SimOutput x = simulate_data(s, a), y = simulate_data(s, b);
  EXPECT_EQ(x.data.y, y.data.y);
  EXPECT_EQ(x.graph, y.graph);
  EXPECT_EQ(x.K, y.K);
}

TEST(Simulate, SuppliedMatrices) {
  Rng rng(8);
  auto s = spec_of(10, 4, DataType::gaussian, FamilyKind::random);
  s.K = ar2_precision(4);
  s.sigma = Matrix::Identity(4, 4);
  EXPECT_THROW(simulate_data(s, rng), InputError);
  s.sigma = ar2_precision(4).inverse();
  const SimOutput out = simulate_data(s, rng);
  EXPECT_EQ(out.graph, generate_graph({FamilyKind::ar2}, 4, rng));
  s.K.reset();
  EXPECT_TRUE(simulate_data(s, rng).K.isApprox(ar2_precision(4), 1e-12));
  s.sigma = Matrix::Identity(3, 3);
  EXPECT_THROW(simulate_data(s, rng), InputError);
}

TEST(Simulate, InvalidSpecs) {
  Rng rng(9);
  EXPECT_THROW(simulate_data(spec_of(0, 4, DataType::gaussian, FamilyKind::random), rng), UsageError);
  EXPECT_THROW(simulate_data(spec_of(10, 1, DataType::gaussian, FamilyKind::random), rng), UsageError);
  EXPECT_THROW(parse_data_type("weird"), UsageError);
}

TEST(Missing, MaskKeepsAnObservedValuePerColumn) {
  Rng rng(10);
  MixedData d = MixedData::complete(Matrix::Ones(3, 4), std::vector<VarKind>(4, VarKind::continuous));
  mask_at_random(d, 0.95, rng);
  for (int j = 0; j < 4; ++j) EXPECT_FALSE((d.missing.col(j).array() != 0).all());
  MixedData e = MixedData::complete(Matrix::Ones(4000, 1), {VarKind::continuous});
  mask_at_random(e, 0.1, rng);
  const double frac = (e.missing.array() != 0).cast<double>().mean();
  EXPECT_NEAR(frac, 0.1, 3 * std::sqrt(0.09 / 4000));
  EXPECT_THROW(mask_at_random(e, 1.0, rng), UsageError);
}
