#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include <hankelscope/moments.hpp>

#include "oracles.hpp"

using namespace hankelscope;

namespace {

const double kPi2 = std::numbers::pi * std::numbers::pi;

ShadowDomain flat_top() { return ShadowDomain::polygon({{0, 1}, {0.5, 1}, {1, 0}}); }

ShadowDomain quarter_circle_polygon(int vertices, double radius = 1.0) {
  std::vector<ShadowPoint> v;
  for (int i = 0; i < vertices; ++i) {
    double t = std::numbers::pi / 2 * (1.0 - static_cast<double>(i) / (vertices - 1));
    v.push_back({radius * std::cos(t), radius * std::sin(t)});
  }
  v.front() = {0.0, radius};
  v.back() = {radius, 0.0};
  return ShadowDomain::polygon(v);
}

// Rectangle shadow split into `vertices` points along its boundary.
ShadowDomain rectangle_polygon(int vertices) {
  std::vector<ShadowPoint> v;
  int top = vertices / 2, side = vertices - top;
  for (int i = 0; i < top; ++i) v.push_back({static_cast<double>(i) / top, 1.0});
  for (int i = 0; i < side; ++i) v.push_back({1.0, 1.0 - static_cast<double>(i) / (side - 1)});
  return ShadowDomain::polygon(v);
}

std::filesystem::path temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("hankelscope_test_" + tag + "_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(LogMoment, BidiskExamples) {
  auto d = ShadowDomain::bidisk(1, 1);
  MomentTable t(d);
  EXPECT_NEAR(log_moment(d, {0, 0}, t), std::log(kPi2), 1e-15);
  EXPECT_NEAR(log_moment(d, {0, 0}, t), 2.28946, 5e-6);
  EXPECT_NEAR(log_moment(d, {3, 7}, t), std::log(kPi2) - std::log(32.0), 1e-14);
}

TEST(LogMoment, BallExamples) {
  auto d = ShadowDomain::ball(1);
  MomentTable t(d);
  EXPECT_NEAR(log_moment(d, {0, 0}, t), std::log(kPi2 / 2), 1e-14);
  EXPECT_NEAR(log_moment(d, {2, 3}, t), std::log(kPi2 / 420), 1e-14);
}

TEST(ClosedForm, Examples) {
  EXPECT_NEAR(closed_form_log_moment(ShadowDomain::bidisk(1, 1), {0, 0}), std::log(kPi2), 1e-15);
  // 1! 0! / 3! = 1/6
  EXPECT_NEAR(closed_form_log_moment(ShadowDomain::ball(1), {1, 0}), std::log(kPi2 / 6), 1e-14);
  EXPECT_NEAR(closed_form_log_moment(ShadowDomain::ball(2), {0, 0}), std::log(8 * kPi2), 1e-14);
  EXPECT_THROW(closed_form_log_moment(flat_top(), {0, 0}), UnsupportedError);
}

TEST(ClosedForm, PresetsAgreeWithBruteForceQuadrature) {
  struct Case {
    ShadowDomain d;
    std::function<double(double)> tau;  // written independently of profile_tau
    double x_max;
  };
  std::vector<Case> cases = {
      {ShadowDomain::bidisk(1, 1), [](double) { return 1.0; }, 1.0},
      {ShadowDomain::bidisk(0.7, 1.3), [](double) { return 1.3; }, 0.7},
      {ShadowDomain::ball(1), [](double x) { return std::sqrt(std::max(0.0, 1 - x * x)); }, 1.0},
      {ShadowDomain::ball(1.5), [](double x) { return std::sqrt(std::max(0.0, 2.25 - x * x)); }, 1.5},
      {ShadowDomain::egg(2, 4), [](double x) { return oracle::egg_profile_by_root(x, 2, 4); }, 1.0},
      {ShadowDomain::egg(3, 1.5), [](double x) { return oracle::egg_profile_by_root(x, 3, 1.5); }, 1.0},
      {ShadowDomain::egg(1, 1), [](double x) { return 1 - x; }, 1.0},
  };
  for (const auto& c : cases) {
    for (MultiIndex b : {MultiIndex{0, 0}, MultiIndex{1, 0}, MultiIndex{0, 3}, MultiIndex{4, 5},
                         MultiIndex{10, 2}}) {
      double bf = oracle::brute_force_moment(c.tau, c.x_max, b.a1, b.a2);
      double cf = std::exp(closed_form_log_moment(c.d, b));
      EXPECT_NEAR(cf / bf, 1.0, 1e-9) << c.d.canonical_text() << " beta=" << b;
    }
  }
}

TEST(ClosedForm, EggReducesToBallAtPEqualsQEqualsTwo) {
  for (int a = 0; a <= 40; a += 3)
    for (int b = 0; b <= 40; b += 5)
      EXPECT_NEAR(closed_form_log_moment(ShadowDomain::egg(2, 2), {a, b}), oracle::ball_log_moment(a, b), 1e-11);
}

TEST(PolygonQuadrature, RectangleIsExactBidisk) {
  auto d = ShadowDomain::polygon({{0, 1}, {1, 1}, {1, 0}});
  MomentTable t(d);
  for (int a = 0; a <= 120; a += 7)
    for (int b = 0; b <= 120; b += 11)
      EXPECT_NEAR(log_moment(d, {a, b}, t), oracle::bidisk_log_moment(a, b), 1e-12) << a << "," << b;
}

TEST(PolygonQuadrature, TriangleMatchesEggOneOne) {
  auto tri = ShadowDomain::polygon({{0, 1}, {1, 0}});
  auto egg = ShadowDomain::egg(1, 1);
  MomentTable t(tri);
  for (int a = 0; a <= 100; a += 9)
    for (int b = 0; b <= 100; b += 13)
      EXPECT_NEAR(log_moment(tri, {a, b}, t), closed_form_log_moment(egg, {a, b}), 1e-12) << a << "," << b;
}

TEST(PolygonQuadrature, FlatTopMatchesBruteForce) {
  auto d = flat_top();
  MomentTable t(d);
  auto tau = [](double x) { return x <= 0.5 ? 1.0 : 2.0 - 2.0 * x; };
  for (MultiIndex b : {MultiIndex{0, 0}, MultiIndex{3, 1}, MultiIndex{0, 12}, MultiIndex{9, 9}}) {
    double bf = oracle::brute_force_moment(tau, 1.0, b.a1, b.a2, {0.5});
    EXPECT_NEAR(std::exp(log_moment(d, b, t)) / bf, 1.0, 1e-10) << b;
  }
}

TEST(PolygonQuadrature, FineApproximationsOfPresets) {
  auto ball_poly = quarter_circle_polygon(256);
  auto rect_poly = rectangle_polygon(256);
  MomentTable tb(ball_poly), tr(rect_poly);
  double worst_ball = 0, worst_rect = 0;
  for (int total = 0; total <= 50; ++total) {
    for (int a = 0; a <= total; ++a) {
      int b = total - a;
      worst_ball = std::max(worst_ball, std::fabs(log_moment(ball_poly, {a, b}, tb) - oracle::ball_log_moment(a, b)));
      worst_rect = std::max(worst_rect, std::fabs(log_moment(rect_poly, {a, b}, tr) - oracle::bidisk_log_moment(a, b)));
    }
  }
  EXPECT_LE(worst_ball, 5e-4);
  EXPECT_LE(worst_rect, 1e-12);
  EXPECT_EQ(tb.quadrature_stats().max_nodes_per_segment, polygon_nodes_per_segment({50, 0}));
}

TEST(LogMoment, FiniteForAllIndices) {
  for (const auto& d : {ShadowDomain::bidisk(0.1, 0.2), ShadowDomain::ball(0.05), ShadowDomain::egg(2, 4, 0.1),
                        flat_top().scaled(0.05)}) {
    MomentTable t(d);
    for (int a = 0; a <= 300; a += 23)
      for (int b = 0; b <= 300; b += 29) EXPECT_TRUE(std::isfinite(log_moment(d, {a, b}, t)));
  }
}

TEST(LogMoment, LogConvexAlongEveryDirection) {
  for (const auto& d : {ShadowDomain::bidisk(1, 1), ShadowDomain::ball(1), ShadowDomain::egg(2, 4), flat_top()}) {
    MomentTable t(d);
    double worst = 0;
    for (int b1 = 0; b1 <= 60; ++b1)
      for (int b2 = 0; b1 + b2 <= 60; ++b2)
        for (int a1 = 0; a1 <= 6; ++a1)
          for (int a2 = 0; a1 + a2 <= 6; ++a2) {
            if (a1 == 0 && a2 == 0) continue;
            for (int sign : {1, -1}) {
              // directions (a1, a2) and (a1, -a2)
              int s2 = sign * a2;
              if (b1 < a1 || b2 - s2 < 0 || b2 + s2 < 0) continue;
              double deficit = log_moment(d, {b1 + a1, b2 + s2}, t) + log_moment(d, {b1 - a1, b2 - s2}, t) -
                               2 * log_moment(d, {b1, b2}, t);
              worst = std::min(worst, deficit);
            }
          }
    EXPECT_GE(worst, -1e-9) << d.canonical_text();
  }
}

TEST(LogMoment, DominatedByBoundingBidisk) {
  for (const auto& d : {ShadowDomain::ball(1), ShadowDomain::egg(2, 4), flat_top(), ShadowDomain::egg(3, 1.5, 2.0)}) {
    auto box = ShadowDomain::bidisk(d.r1_max(), d.r2_max());
    MomentTable t(d), tb(box);
    for (int a = 0; a <= 80; a += 4)
      for (int b = 0; b <= 80; b += 4) EXPECT_LE(log_moment(d, {a, b}, t), log_moment(box, {a, b}, tb) + 1e-9);
  }
}

TEST(LogMoment, ScalingLaw) {
  for (const auto& d : {ShadowDomain::bidisk(1, 0.5), ShadowDomain::ball(1), ShadowDomain::egg(2, 4), flat_top()}) {
    for (double c : {0.5, 2.0, 3.0}) {
      auto dc = d.scaled(c);
      MomentTable t(d), tc(dc);
      for (int a = 0; a <= 60; a += 6)
        for (int b = 0; b <= 60; b += 6) {
          double shift = log_moment(dc, {a, b}, tc) - log_moment(d, {a, b}, t);
          EXPECT_NEAR(shift, (2.0 * (a + b) + 4) * std::log(c), 1e-9) << d.canonical_text() << " c=" << c;
        }
    }
  }
}

TEST(LogMoment, Preconditions) {
  auto bad = ShadowDomain::polygon({{0, 1}, {0.5, 1.2}, {1, 0}});
  MomentTable t(bad);
  EXPECT_THROW(log_moment(bad, {0, 0}, t), PreconditionError);

  auto ball = ShadowDomain::ball(1);
  MomentTable other(ShadowDomain::ball(2));
  EXPECT_THROW(log_moment(ball, {0, 0}, other), PreconditionError);
  MomentTable tb(ball);
  EXPECT_THROW(log_moment(ball, {-1, 0}, tb), std::invalid_argument);
}

TEST(MonomialInner, Examples) {
  auto bid = ShadowDomain::bidisk(1, 1);
  MomentTable t(bid);
  EXPECT_NEAR(monomial_inner({1, 0}, {}, {1, 0}, {}, bid, t).real(), kPi2 / 2, 1e-13);
  EXPECT_EQ(monomial_inner({1, 0}, {}, {0, 1}, {}, bid, t), std::complex<double>(0, 0));
  EXPECT_NEAR(monomial_inner({2, 1}, {1, 1}, {1, 0}, {0, 0}, bid, t).real(), kPi2 / 6, 1e-13);
}

TEST(MonomialInner, VanishesForMismatchedGrades) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> e(0, 8);
  auto d = ShadowDomain::egg(2, 4);
  MomentTable t(d);
  int mismatched = 0;
  while (mismatched < 100) {
    MultiIndex a{e(rng), e(rng)}, b{e(rng), e(rng)}, c{e(rng), e(rng)}, dd{e(rng), e(rng)};
    if (grade_of(a, b) == grade_of(c, dd)) continue;
    ++mismatched;
    EXPECT_EQ(monomial_inner(a, b, c, dd, d, t), std::complex<double>(0, 0));
  }
}

TEST(MonomialInner, AgreesWithMonteCarlo) {
  struct Case {
    ShadowDomain d;
    MultiIndex a, b, c, dd;
  };
  std::vector<Case> cases = {
      {ShadowDomain::ball(1), {1, 0}, {}, {1, 0}, {}},
      {ShadowDomain::bidisk(1, 1), {2, 1}, {1, 1}, {1, 0}, {}},
      {ShadowDomain::egg(2, 4), {1, 0}, {}, {0, 1}, {}},
      {flat_top(), {1, 1}, {0, 1}, {1, 0}, {}},
      {ShadowDomain::ball(1), {2, 0}, {0, 1}, {1, 1}, {}},
  };
  std::mt19937_64 rng(99);
  const int samples = 400000;
  for (const auto& c : cases) {
    MomentTable t(c.d);
    const double R1 = c.d.r1_max(), R2 = c.d.r2_max();
    std::uniform_real_distribution<double> u1(-R1, R1), u2(-R2, R2);
    const double vol = 16 * R1 * R1 * R2 * R2;
    double s_re = 0, s_im = 0, q_re = 0, q_im = 0;
    for (int i = 0; i < samples; ++i) {
      std::complex<double> z1{u1(rng), u1(rng)}, z2{u2(rng), u2(rng)};
      double r1 = std::abs(z1), r2 = std::abs(z2);
      if (r1 > R1 || r2 >= profile_tau(c.d, r1)) continue;
      auto mono = [&](MultiIndex h, MultiIndex an) {
        return std::pow(z1, h.a1) * std::pow(z2, h.a2) * std::pow(std::conj(z1), an.a1) *
               std::pow(std::conj(z2), an.a2);
      };
      std::complex<double> g = mono(c.a, c.b) * std::conj(mono(c.c, c.dd));
      s_re += g.real();
      s_im += g.imag();
      q_re += g.real() * g.real();
      q_im += g.imag() * g.imag();
    }
    double m_re = s_re / samples, m_im = s_im / samples;
    double se_re = vol * std::sqrt((q_re / samples - m_re * m_re) / samples);
    double se_im = vol * std::sqrt((q_im / samples - m_im * m_im) / samples);
    auto exact = monomial_inner(c.a, c.b, c.c, c.dd, c.d, t);
    EXPECT_LE(std::fabs(vol * m_re - exact.real()), 3 * se_re) << c.d.canonical_text();
    EXPECT_LE(std::fabs(vol * m_im - exact.imag()), 3 * se_im) << c.d.canonical_text();
  }
}

TEST(WarmCache, CountsAndIdempotence) {
  auto d = ShadowDomain::bidisk(1, 1);
  MomentTable t(d);
  EXPECT_EQ(warm_cache(d, 0, t), 1u);
  EXPECT_EQ(warm_cache(d, 2, t), 6u);
  auto computed = t.computed_count();
  EXPECT_EQ(warm_cache(d, 2, t), 6u);
  EXPECT_EQ(t.computed_count(), computed);
  EXPECT_THROW(warm_cache(d, -1, t), std::invalid_argument);
}

TEST(MomentTable, SaveLoadRoundTripIsBitExact) {
  auto d = flat_top();
  MomentTable t(d);
  warm_cache(d, 30, t);
  std::stringstream ss;
  t.save(ss);
  MomentTable u(d);
  u.load(ss);
  ASSERT_EQ(u.size(), t.size());
  for (const auto& [beta, v] : t.entries()) EXPECT_EQ(*u.find(beta), v);
  EXPECT_EQ(u.computed_count(), 0u);
}

TEST(MomentTable, HeaderMismatchIsRejected) {
  std::stringstream ss("# domain 0000000000000000 version 1\n0 0 1.0\n");
  MomentTable t(ShadowDomain::ball(1));
  EXPECT_THROW(t.load(ss), CacheIoError);
  std::stringstream bad(t.header_line() + "\n0 0 notanumber\n");
  EXPECT_THROW(t.load(bad), CacheIoError);
}

TEST(MomentTable, BackingFileAppendsAndLoadsLazily) {
  auto dir = temp_dir("moments");
  auto d = ShadowDomain::egg(2, 4);
  auto path = dir / (d.identity_hash() + ".moments");
  {
    MomentTable t(d);
    t.attach_file(path);
    EXPECT_EQ(warm_cache(d, 3, t), 10u);
    EXPECT_EQ(t.flush(), 0u);  // already persisted by warm_cache
    log_moment(d, {9, 9}, t);
    EXPECT_EQ(t.flush(), 1u);
  }
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "# domain " + d.identity_hash() + " version 1");
  {
    MomentTable t(d);
    t.attach_file(path);
    EXPECT_EQ(t.size(), 11u);
    double v = log_moment(d, {9, 9}, t);
    EXPECT_EQ(v, closed_form_log_moment(d, {9, 9}));
    EXPECT_EQ(t.computed_count(), 0u);
  }
  std::filesystem::remove_all(dir);
}

TEST(MomentTable, ConcurrentReadersAndWriters) {
  auto d = flat_top();
  MomentTable t(d);
  std::vector<std::thread> pool;
  std::vector<std::vector<double>> results(4);
  for (int k = 0; k < 4; ++k) {
    pool.emplace_back([&, k] {
      for (int total = 0; total <= 40; ++total)
        for (int a = 0; a <= total; ++a) results[k].push_back(log_moment(d, {a, total - a}, t));
    });
  }
  for (auto& th : pool) th.join();
  for (int k = 1; k < 4; ++k) EXPECT_EQ(results[k], results[0]);
  EXPECT_EQ(t.size(), 41u * 42u / 2u);
}
