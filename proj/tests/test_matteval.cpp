#include "support.hpp"
#include "vmatte/matteval.hpp"

#include <doctest.h>

#include <cmath>

using namespace vmatte;

namespace {

using Seq = std::vector<GrayMap>;

Seq random_seq(int n, Index h, Index w, std::mt19937_64& e) {
  Seq s;
  for (int i = 0; i < n; ++i) s.push_back(test::random_raster<1>(h, w, e));
  return s;
}

std::vector<PairwiseFlow> random_pairs(int n, Index h, Index w, std::mt19937_64& e) {
  std::vector<PairwiseFlow> out;
  for (int i = 1; i < n; ++i) {
    PairwiseFlow p;
    p.flow = test::random_flow(h, w, 2.5, e);
    p.valid = validity_mask(p.flow);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PairwiseFlow> still_pairs(int n, Index h, Index w) {
  std::vector<PairwiseFlow> out;
  for (int i = 1; i < n; ++i) out.push_back({FlowField::Zero(h, w), ValidityMask::Ones(h, w)});
  return out;
}

// Scalar loops written straight from the loss definitions.
double ref_alpha(const Seq& p, const Seq& g) {
  double s = 0;
  const auto h = p[0].rows(), w = p[0].cols();
  for (std::size_t i = 0; i < p.size(); ++i)
    for (Index y = 0; y < h; ++y)
      for (Index x = 0; x < w; ++x) s += std::fabs(double(p[i][0](y, x)) - double(g[i][0](y, x)));
  return s / (double(p.size()) * double(h) * double(w));
}

double ref_temporal(const Seq& p, const std::vector<PairwiseFlow>& pairs, bool global) {
  double s = 0;
  const auto h = p[0].rows(), w = p[0].cols();
  for (std::size_t i = 1; i < p.size(); ++i) {
    const auto& src = global ? p[0] : p[i - 1];
    for (Index y = 0; y < h; ++y)
      for (Index x = 0; x < w; ++x)
        s += std::fabs(double(p[i][0](y, x)) - test::ref_warp_at(src[0], pairs[i - 1].flow, y, x)) *
             pairs[i - 1].valid(y, x);
  }
  return s / (double(p.size() - 1) * double(h) * double(w));
}

double ref_foreground(const std::vector<ImageRGB>& pf, const std::vector<ImageRGB>& gf, const Seq& pa) {
  double s = 0;
  const auto h = pf[0].rows(), w = pf[0].cols();
  for (std::size_t i = 0; i < pf.size(); ++i)
    for (Index y = 0; y < h; ++y)
      for (Index x = 0; x < w; ++x) {
        double d = 0;
        for (int c = 0; c < 3; ++c) d += std::fabs(double(pf[i][c](y, x)) - double(gf[i][c](y, x)));
        s += double(pa[i][0](y, x)) * d;
      }
  return s / (double(pf.size()) * double(h) * double(w) * 3.0);
}

struct RefMetrics {
  double ssda = 0, dtssd = 0, messddt = 0;
};

RefMetrics ref_metrics(const Seq& p, const Seq& g, const std::vector<FlowField>& flows) {
  RefMetrics r;
  const auto h = p[0].rows(), w = p[0].cols();
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0;
    for (Index y = 0; y < h; ++y)
      for (Index x = 0; x < w; ++x) {
        const double d = 255.0 * (double(p[i][0](y, x)) - double(g[i][0](y, x)));
        s += d * d;
      }
    r.ssda += std::sqrt(s);
  }
  r.ssda /= double(n);
  for (std::size_t i = 1; i < n; ++i) {
    double s = 0, m = 0;
    for (Index y = 0; y < h; ++y)
      for (Index x = 0; x < w; ++x) {
        const double d = 255.0 * ((double(p[i][0](y, x)) - double(p[i - 1][0](y, x))) -
                                  (double(g[i][0](y, x)) - double(g[i - 1][0](y, x))));
        s += d * d;
        const double now = 255.0 * (double(p[i][0](y, x)) - double(g[i][0](y, x)));
        const double prev = 255.0 * (test::ref_warp_at(p[i - 1][0], flows[i - 1], y, x) -
                                     test::ref_warp_at(g[i - 1][0], flows[i - 1], y, x));
        m += std::fabs(now * now - prev * prev);
      }
    r.dtssd += std::sqrt(s);
    r.messddt += m / double(h * w);
  }
  if (n > 1) {
    r.dtssd /= double(n - 1);
    r.messddt /= double(n - 1);
  }
  return r;
}

bool close_rel(double a, double b, double rel) { return std::fabs(a - b) <= rel * std::max({1e-300, std::fabs(a), std::fabs(b)}); }

}  // namespace

TEST_CASE("loss_alpha examples") {
  auto& e = test::test_engine();
  const Seq g = random_seq(3, 4, 5, e);
  CHECK(loss_alpha(g, g) == 0.0);
  Seq g09, p;
  for (const auto& m : g) {
    GrayMap a, b;
    a[0] = m[0] * 0.9f;
    b[0] = a[0] + 0.1f;
    g09.push_back(a);
    p.push_back(b);
  }
  CHECK(loss_alpha(p, g09) == doctest::Approx(0.1).epsilon(1e-6));
  CHECK_THROWS_AS(loss_alpha(p, Seq(g.begin(), g.begin() + 2)), std::invalid_argument);
}

TEST_CASE("losses agree with scalar reference loops on random 3x3x3 instances") {
  auto& e = test::test_engine();
  for (int trial = 0; trial < 50; ++trial) {
    const Seq p = random_seq(3, 3, 3, e), g = random_seq(3, 3, 3, e);
    const auto pairs = random_pairs(3, 3, 3, e);
    std::vector<ImageRGB> pf, gf;
    for (int i = 0; i < 3; ++i) {
      pf.push_back(test::random_raster<3>(3, 3, e));
      gf.push_back(test::random_raster<3>(3, 3, e));
    }
    CHECK(close_rel(loss_alpha(p, g), ref_alpha(p, g), 1e-9));
    CHECK(close_rel(loss_global(p, pairs), ref_temporal(p, pairs, true), 1e-9));
    CHECK(close_rel(loss_local(p, pairs), ref_temporal(p, pairs, false), 1e-9));
    CHECK(close_rel(loss_foreground(pf, gf, p), ref_foreground(pf, gf, p), 1e-9));
    CHECK(loss_alpha(p, g) == loss_alpha(g, p));
  }
}

TEST_CASE("loss_global and loss_local examples") {
  auto& e = test::test_engine();
  const GrayMap a = test::random_raster<1>(5, 6, e);
  const Seq still(4, a);
  CHECK(loss_global(still, still_pairs(4, 5, 6)) == 0.0);
  CHECK(loss_local(still, still_pairs(4, 5, 6)) == 0.0);

  auto masked = random_pairs(4, 5, 6, e);
  for (auto& p : masked) p.valid.setZero();
  const Seq noisy = random_seq(4, 5, 6, e);
  CHECK(loss_global(noisy, masked) == 0.0);

  // 1x2: a'_1 = [1, 0], flow +1 -> warped [0, 0]; a'_2 = [0.5, 0.7], V = [1, 0].
  GrayMap p1(1, 2), p2(1, 2);
  p1[0] << 1.0f, 0.0f;
  p2[0] << 0.5f, 0.7f;
  PairwiseFlow pf{constant_flow<Real>(1, 2, 1.0f, 0.0f), ValidityMask(1, 2)};
  pf.valid << 1, 0;
  CHECK(loss_global({p1, p2}, {pf}) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(loss_local({p1, p2}, {pf}) == loss_global({p1, p2}, {pf}));

  CHECK_THROWS_AS(loss_global({p1}, {}), std::invalid_argument);
  CHECK_THROWS_AS(loss_global({p1, p2}, {}), std::invalid_argument);
}

TEST_CASE("loss_foreground examples") {
  auto& e = test::test_engine();
  const std::vector<ImageRGB> f{test::random_raster<3>(3, 4, e), test::random_raster<3>(3, 4, e)};
  const std::vector<ImageRGB> g{test::random_raster<3>(3, 4, e), test::random_raster<3>(3, 4, e)};
  const Seq a = random_seq(2, 3, 4, e);
  CHECK(loss_foreground(f, f, a) == 0.0);
  CHECK(loss_foreground(f, g, Seq(2, GrayMap::Zero(3, 4))) == 0.0);
  CHECK(loss_foreground({ImageRGB(1, 1, 1.0f)}, {ImageRGB(1, 1, 0.0f)}, {GrayMap(1, 1, 0.5f)}) ==
        doctest::Approx(0.5));
}

TEST_CASE("total_loss weights") {
  CHECK(total_loss(0, 0, 0, 0) == 0.0);
  CHECK(total_loss(1, 1, 1, 4) == 4.0);
  CHECK(total_loss(0.2, 0.1, 0.1, 0.4) == doctest::Approx(0.5));
}

TEST_CASE("loss_alpha is invariant to tiling the content") {
  auto& e = test::test_engine();
  const Seq p = random_seq(2, 3, 4, e), g = random_seq(2, 3, 4, e);
  Seq pt, gt;
  for (int i = 0; i < 2; ++i) {
    GrayMap a, b;
    a[0] = p[static_cast<std::size_t>(i)][0].replicate(3, 2);
    b[0] = g[static_cast<std::size_t>(i)][0].replicate(3, 2);
    pt.push_back(a);
    gt.push_back(b);
  }
  CHECK(loss_alpha(pt, gt) == doctest::Approx(loss_alpha(p, g)).epsilon(1e-12));
}

TEST_CASE("temporal metrics examples") {
  auto& e = test::test_engine();
  const Index h = 4, w = 4;
  const Seq g = random_seq(5, h, w, e);
  std::vector<FlowField> flows(4, FlowField::Zero(h, w));
  const auto zero = temporal_metrics(g, g, flows);
  CHECK(zero.ssda == 0.0);
  CHECK(zero.dtssd == 0.0);
  CHECK(zero.messddt == 0.0);

  // Constant error on every frame with no motion.
  Seq gc, pc;
  for (int i = 0; i < 5; ++i) {
    gc.push_back(GrayMap(h, w, 0.25f + 0.125f * static_cast<Real>(i)));
    pc.push_back(GrayMap(h, w, 0.3125f + 0.125f * static_cast<Real>(i)));
  }
  const auto c = temporal_metrics(pc, gc, flows);
  CHECK(c.dtssd == 0.0);
  CHECK(c.messddt == 0.0);
  CHECK(c.ssda == doctest::Approx(0.0625 * 255.0 * 4.0).epsilon(1e-9));
}

TEST_CASE("alternating noise has larger dtSSD than constant noise of equal SSDA") {
  const Index h = 4, w = 4;
  const int n = 6;
  Seq gt(static_cast<std::size_t>(n), GrayMap(h, w, 0.5f));
  GrayMap noise(h, w);
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x) noise[0](y, x) = ((x + y) % 2 ? 0.1f : -0.1f);
  Seq constant, alternating;
  for (int i = 0; i < n; ++i) {
    GrayMap a, b;
    a[0] = gt[0][0] + noise[0];
    b[0] = gt[0][0] + (i % 2 ? -noise[0] : noise[0]);
    constant.push_back(a);
    alternating.push_back(b);
  }
  const std::vector<FlowField> flows(n - 1, FlowField::Zero(h, w));
  const auto mc = temporal_metrics(constant, gt, flows);
  const auto ma = temporal_metrics(alternating, gt, flows);
  const auto rc = ref_metrics(constant, gt, flows);
  const auto ra = ref_metrics(alternating, gt, flows);
  CHECK(mc.ssda == doctest::Approx(ma.ssda));
  CHECK(ma.dtssd > mc.dtssd);
  CHECK(ra.dtssd > rc.dtssd);
  CHECK(ma.dtssd == doctest::Approx(ra.dtssd).epsilon(1e-9));
}

TEST_CASE("temporal metrics agree with the reference loop and scale with the alpha range") {
  auto& e = test::test_engine();
  for (int trial = 0; trial < 20; ++trial) {
    const Seq p = random_seq(3, 3, 3, e), g = random_seq(3, 3, 3, e);
    std::vector<FlowField> flows{test::random_flow(3, 3, 2.0, e), test::random_flow(3, 3, 2.0, e)};
    const auto m = temporal_metrics(p, g, flows);
    const auto r = ref_metrics(p, g, flows);
    CHECK(close_rel(m.ssda, r.ssda, 1e-9));
    CHECK(close_rel(m.dtssd, r.dtssd, 1e-9));
    CHECK(close_rel(m.messddt, r.messddt, 1e-9));

    // Shrinking both sequences by 1/255 mimics feeding unscaled alphas.
    Seq ps, gs;
    for (int i = 0; i < 3; ++i) {
      GrayMap a, b;
      a[0] = p[static_cast<std::size_t>(i)][0] / 255.0f;
      b[0] = g[static_cast<std::size_t>(i)][0] / 255.0f;
      ps.push_back(a);
      gs.push_back(b);
    }
    const auto s = temporal_metrics(ps, gs, flows);
    CHECK(m.ssda == doctest::Approx(255.0 * s.ssda).epsilon(1e-5));
    CHECK(m.dtssd == doctest::Approx(255.0 * s.dtssd).epsilon(1e-5));
    CHECK(m.messddt == doctest::Approx(255.0 * 255.0 * s.messddt).epsilon(1e-4));
  }
}
