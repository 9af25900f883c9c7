#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "kteka/datagen.hpp"
#include "kteka/error.hpp"
#include "kteka/eval.hpp"

using namespace kteka;

namespace {

double energy(const std::vector<double>& v) {
  double e = 0.0;
  for (double x : v) e += x * x;
  return e;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST(Cbf, BalancedAndLabelled) {
  CbfSpec spec;
  spec.per_class = 17;
  auto ds = gen_cbf(spec);
  ASSERT_EQ(ds.size(), 51u);
  EXPECT_EQ(ds.num_classes(), 3);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(ds.of_class(c).size(), 17u);
  EXPECT_EQ(ds.class_names, (std::vector<std::string>{"1", "2", "3"}));
  for (const auto& s : ds.series) EXPECT_EQ(s.length(), 128u);
}

TEST(Cbf, SeededDeterminism) {
  CbfSpec spec;
  spec.per_class = 5;
  spec.seed = 42;
  auto a = gen_cbf(spec), b = gen_cbf(spec);
  EXPECT_EQ(a.series, b.series);
  spec.seed = 43;
  EXPECT_NE(gen_cbf(spec).series, a.series);
}

TEST(Cbf, PrefixStableAcrossPerClass) {
  // Instance i of class c depends only on (seed, c, i).
  CbfSpec small, big;
  small.per_class = 3;
  big.per_class = 8;
  auto a = gen_cbf(small), b = gen_cbf(big);
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 3; ++i) EXPECT_EQ(a.series[c * 3 + i], b.series[c * 8 + i]);
}

TEST(Cbf, NoiseFreeShapes) {
  CbfSpec spec;
  spec.per_class = 20;
  spec.noise_free = true;
  auto s = gen_cbf_detailed(spec);
  for (std::size_t k = 0; k < s.data.size(); ++k) {
    const auto& ev = s.events[k];
    EXPECT_EQ(ev.eta, 0.0);
    const auto& x = s.data.series[k];
    for (int t = 1; t <= 128; ++t) {
      const bool in = t >= ev.a && t <= ev.b;
      const double span = ev.b - ev.a;
      double expect = 0.0;
      if (in) expect = ev.label == 0 ? 6.0 : ev.label == 1 ? 6.0 * (t - ev.a) / span : 6.0 * (ev.b - t) / span;
      if (ev.label == 0)
        EXPECT_EQ(x(t - 1, 0), in ? 6.0 : 0.0);
      else
        EXPECT_NEAR(x(t - 1, 0), expect, 1e-14);
    }
  }
}

TEST(Cbf, DrawRanges) {
  CbfSpec spec;
  spec.per_class = 200;
  for (const auto& ev : gen_cbf_detailed(spec).events) {
    EXPECT_GE(ev.a, 16);
    EXPECT_LE(ev.a, 32);
    EXPECT_GE(ev.b - ev.a, 32);
    EXPECT_LE(ev.b - ev.a, 96);
    EXPECT_LE(ev.b, 128);
  }
}

TEST(Cbf, MeanSupportMatchesExpectedStartAndEnd) {
  CbfSpec spec;
  spec.per_class = 500;
  spec.seed = 3;
  spec.noise_free = true;
  auto s = gen_cbf_detailed(spec);
  double on = 0.0, off = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < s.data.size(); ++k) {
    if (s.events[k].label != 0) continue;
    const auto& x = s.data.series[k];
    int first = -1, last = -1;
    for (int t = 1; t <= 128; ++t)
      if (x(t - 1, 0) > 0.0) {
        if (first < 0) first = t;
        last = t;
      }
    on += first;
    off += last;
    ++count;
  }
  on /= static_cast<double>(count);
  off /= static_cast<double>(count);
  EXPECT_NEAR(on, 24.0, 0.7);
  EXPECT_NEAR(off, 88.0, 2.0);
}

TEST(Cbf, RejectsShortLength) {
  CbfSpec spec;
  spec.length = 96;
  EXPECT_THROW(gen_cbf(spec), ConfigError);
  spec.length = 128;
  spec.per_class = 0;
  EXPECT_THROW(gen_cbf(spec), ConfigError);
}

TEST(Rosette, ShapeAndDefaults) {
  RosetteSpec spec;
  EXPECT_EQ(spec.samples(), 100u);
  auto r = gen_rosette(spec);
  ASSERT_EQ(r.clean.size(), 8u);
  ASSERT_EQ(r.noisy.size(), 8u);
  for (const auto& s : r.clean) {
    EXPECT_EQ(s.length(), 100u);
    EXPECT_EQ(s.dim(), 2u);
  }
}

TEST(Rosette, SeededDeterminism) {
  RosetteSpec spec;
  spec.seed = 9;
  auto a = gen_rosette(spec), b = gen_rosette(spec);
  EXPECT_EQ(a.clean, b.clean);
  EXPECT_EQ(a.noisy, b.noisy);
  spec.seed = 10;
  EXPECT_NE(gen_rosette(spec).noisy, a.noisy);
}

TEST(Rosette, StandardizedChannels) {
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    RosetteSpec spec;
    spec.seed = seed;
    for (const auto& s : gen_rosette(spec).clean)
      for (std::size_t q = 0; q < 2; ++q) {
        auto c = s.channel(q);
        double mean = 0.0;
        for (double v : c) mean += v;
        mean /= static_cast<double>(c.size());
        double var = 0.0;
        for (double v : c) var += (v - mean) * (v - mean);
        var /= static_cast<double>(c.size());
        EXPECT_LE(std::abs(mean), 1e-9);
        EXPECT_NEAR(var, 1.0, 1e-9);
      }
  }
}

TEST(Rosette, InputSnrIsExact) {
  for (double snr : {0.0, 5.0, -3.0}) {
    RosetteSpec spec;
    spec.snr_db = snr;
    spec.seed = 4;
    auto r = gen_rosette(spec);
    for (std::size_t k = 0; k < r.clean.size(); ++k) {
      std::vector<double> sig, noise;
      for (std::size_t q = 0; q < r.clean[k].values().size(); ++q) {
        sig.push_back(r.clean[k].values()[q]);
        noise.push_back(r.noisy[k].values()[q] - r.clean[k].values()[q]);
      }
      EXPECT_NEAR(10.0 * std::log10(energy(sig) / energy(noise)), snr, 0.2);
      EXPECT_NEAR(10.0 * std::log10(energy(sig) / energy(noise)), snr, 1e-9);
    }
  }
}

TEST(Rosette, PureSinusoidIsACircle) {
  RosetteSpec spec;
  spec.no_perturbation = true;
  spec.no_comb = true;
  for (const auto& s : gen_rosette(spec).clean)
    for (std::size_t t = 0; t < s.length(); ++t) EXPECT_NEAR(s(t, 0) * s(t, 0) + s(t, 1) * s(t, 1), 2.0, 1e-9);
}

TEST(Rosette, SpectralLinesAtBaseAndCombSidebands) {
  RosetteSpec spec;
  spec.no_perturbation = true;
  spec.n_instances = 1;
  auto x = gen_rosette(spec).clean[0].channel(0);
  auto db = power_spectrum(x);
  const double bin_hz = spec.sample_rate / static_cast<double>(x.size());
  const double med = median(db);
  for (double hz : {spec.f0, 5.0 * spec.f0, 7.0 * spec.f0}) {
    const auto k = static_cast<std::size_t>(std::lround(hz / bin_hz));
    EXPECT_GT(db[k], db[k - 1]) << hz;
    EXPECT_GT(db[k], db[k + 1]) << hz;
    EXPECT_GT(db[k], med + 10.0) << hz;
  }
}

TEST(Rosette, RejectsLowSampleRate) {
  RosetteSpec spec;
  spec.sample_rate = 200.0;
  EXPECT_THROW(gen_rosette(spec), ConfigError);
  spec.sample_rate = 1000.0;
  spec.n_instances = 0;
  EXPECT_THROW(gen_rosette(spec), ConfigError);
}
