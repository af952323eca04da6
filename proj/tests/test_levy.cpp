#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sgf/errors.hpp"
#include "sgf/family.hpp"
#include "sgf/levy.hpp"
#include "sgf/quadrature.hpp"
#include "sgf/stable_density.hpp"
#include "sgf/stats.hpp"
#include "synthetic_specs.hpp"

using namespace sgf;

namespace {

// One-sample KS against a numeric CDF built from a density table; both sides
// are conditioned on [lo, hi] so heavy tails outside the window cancel.
// Returns the pair (statistic, kept sample count).
std::pair<double, std::size_t> ks_against_density(
    std::vector<double> xs, const std::function<double(double)>& pdf,
    double lo, double hi) {
  std::vector<double> kept;
  kept.reserve(xs.size());
  for (double x : xs)
    if (x >= lo && x <= hi) kept.push_back(x);
  std::sort(kept.begin(), kept.end());
  const int m = 4000;
  std::vector<double> grid(m + 1), cdf(m + 1, 0.0);
  for (int i = 0; i <= m; ++i) grid[i] = lo + (hi - lo) * i / m;
  for (int i = 1; i <= m; ++i)
    cdf[i] = cdf[i - 1] +
             0.5 * (pdf(grid[i - 1]) + pdf(grid[i])) * (grid[i] - grid[i - 1]);
  const double total = cdf[m];
  double d = 0.0;
  const double n = static_cast<double>(kept.size());
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const double x = kept[k];
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    std::size_t i = std::min<std::size_t>(it - grid.begin(), m);
    if (i == 0) i = 1;
    const double f =
        (cdf[i - 1] + (cdf[i] - cdf[i - 1]) * (x - grid[i - 1]) /
                          (grid[i] - grid[i - 1])) /
        total;
    d = std::max(d, std::abs(f - (k + 1) / n));
    d = std::max(d, std::abs(f - k / n));
  }
  return {d, kept.size()};
}

}  // namespace

TEST_CASE("laplace exponent basics") {
  LevySpec drift_only;
  drift_only.drift = 0.7;
  CHECK(laplace_exponent(drift_only, 1.0) == doctest::Approx(0.7));
  // psi(0) = 0 whenever killing_rate = 0
  LevySpec bump = testspec::gaussian_bump(0.5, 0.2, 0.3, -2, 2, -0.4, "b");
  CHECK(laplace_exponent(bump, 0.0) == doctest::Approx(0.0));
  const FamilyConstants fc = family_constants(0.75);
  CHECK(std::abs(laplace_exponent(loc_largest_spec(fc, false), 0.0)) < 1e-10);
  // strip violation names the strip
  LevySpec strict = bump;
  strict.strip = Interval{-1.0, 1.5};
  CHECK_THROWS_AS(laplace_exponent(strict, 2.0), DomainError);
}

TEST_CASE("laplace exponent against empirical cumulants") {
  LevySpec spec = testspec::gaussian_bump(1.2, -0.1, 0.4, -2.0, 1.5, 0.3, "c");
  spec.comp = Compensator::linear_unit;
  LevySimulator sim(spec);
  Rng rng(11);
  const double t = 0.5;
  const int n = 100000;
  for (double q : {-0.8, 0.5, 1.2}) {
    const double psi = laplace_exponent(spec, q);
    std::vector<double> ys(n);
    for (int i = 0; i < n; ++i) {
      PathSample p = sim.run(t, 4, rng);
      ys[i] = std::exp(q * p.values.back());
    }
    const MeanSe m = mean_se(ys);
    // delta method on log E
    const double se_log = m.se / m.mean;
    CHECK(std::abs(std::log(m.mean) - t * psi) < 3.0 * se_log);
  }
}

TEST_CASE("stable sampler: symmetry, positivity parameter, scaling") {
  Rng rng(5);
  // theta = 2 edge case: Gaussian increments
  StableParams gauss;
  gauss.theta = 2.0;
  gauss.c_plus = gauss.c_minus = 1.0;
  gauss.rho = 0.5;
  int neg = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i)
    if (stable_increment(gauss, 1.0, rng) < 0) ++neg;
  CHECK(std::abs(neg / double(n) - 0.5) < 3.0 * 0.5 / std::sqrt(double(n)));

  // family mode: P(eta_1 < 0) = 1 - 1/(2 theta) = 1/3 at theta = 3/4
  const StableParams fam = StableParams::family(0.75);
  neg = 0;
  for (int i = 0; i < n; ++i)
    if (stable_increment(fam, 1.0, rng) < 0) ++neg;
  const double p = 1.0 / 3.0;
  CHECK(std::abs(neg / double(n) - p) <
        3.0 * std::sqrt(p * (1 - p) / double(n)));

  // single step path
  PathSample one = sample_stable(fam, 1.0, 1, rng);
  CHECK(one.size() == 2);
  CHECK(one.duration == 1.0);

  // self-similarity: X(1) vs 2^{-1/theta} X(2)
  const int m = 10000;
  std::vector<double> a(m), b(m);
  for (int i = 0; i < m; ++i) {
    a[i] = sample_stable(fam, 1.0, 8, rng).values.back();
    b[i] = std::pow(2.0, -1.0 / fam.theta) *
           sample_stable(fam, 2.0, 8, rng).values.back();
  }
  const KsResult ks = ks_two_sample(a, b);
  CHECK(ks.pass_1pct());
}

TEST_CASE("stable params invariants") {
  const StableParams fam = StableParams::family(0.6);
  CHECK_NOTHROW(fam.validate());
  StableParams broken = fam;
  broken.c_plus *= 1.001;
  CHECK_THROWS_AS(broken.validate(), ConfigError);
  CHECK_THROWS_AS(StableParams::from_rho(1.0, 0.4), DomainError);
  // spectrally negative real part: c+ = 0 within roundoff
  const StableParams rp = real_part_params(0.75);
  CHECK(std::abs(rp.c_plus) < 1e-12);
  CHECK(rp.c_minus > 0.0);
}

TEST_CASE("CMS sampler matches the Fourier density (both-sided and spectrally negative)") {
  Rng rng(17);
  const int n = 20000;
  for (const StableParams& p :
       {StableParams::family(0.75), real_part_params(0.75)}) {
    StableDensity dens(p);
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = stable_increment(p, 1.0, rng);
    const double scale = std::pow(p.cms_scale(), 1.0 / p.theta);
    const auto [d, kept] = ks_against_density(
        xs, [&](double x) { return dens.pdf(x); }, -30.0 * scale,
        30.0 * scale);
    CHECK(d < 1.63 / std::sqrt(double(kept)));
  }
}

TEST_CASE("levy path sampler: degenerate and killed cases") {
  Rng rng(3);
  LevySpec line;
  line.drift = 1.0;
  PathSample p = sample_levy(line, 2.0, 16, rng);
  CHECK(p.values.back() == doctest::Approx(2.0));
  CHECK(p.alive);
  CHECK(p.jumps.empty());

  LevySpec killed = line;
  killed.killing_rate = 2.5;
  std::vector<double> durs;
  for (int i = 0; i < 20000; ++i)
    durs.push_back(sample_levy(killed, 50.0, 2, rng).duration);
  const MeanSe m = mean_se(durs);
  CHECK(std::abs(m.mean - 1.0 / 2.5) < 3.0 * m.se);
}

TEST_CASE("levy path sampler: family drift matches Psi'(0)") {
  const FamilyConstants fc = family_constants(0.75);
  LevySpec spec = loc_largest_spec(fc, false);
  spec.small_jump_cutoff = 1e-4;
  const double h = 1e-6;
  const double slope = (psi_loc_largest(fc, h) - psi_loc_largest(fc, -h)) /
                       (2.0 * h);
  LevySimulator sim(spec);
  Rng rng(23);
  const int n = 10000;
  std::vector<double> ends(n);
  for (int i = 0; i < n; ++i) ends[i] = sim.run(1.0, 4, rng).values.back();
  const MeanSe m = mean_se(ends);
  CHECK(std::abs(m.mean - slope) < 3.0 * m.se);
}

TEST_CASE("levy path: jump list is consistent with the grid values") {
  LevySpec spec = testspec::gaussian_bump(3.0, 0.1, 0.5, -2.0, 2.0, -0.7, "j");
  Rng rng(9);
  LevySimulator sim(spec);
  const PathSample p = sim.run(3.0, 64, rng);
  // value(t) minus drift and listed jumps must be zero on the grid
  for (std::size_t i = 0; i < p.times.size(); ++i) {
    double jumps = 0.0;
    for (const Jump& j : p.jumps)
      if (j.time <= p.times[i]) jumps += j.size;
    CHECK(std::abs(p.values[i] - sim.effective_drift() * p.times[i] - jumps) <
          1e-12);
  }
  // cadlag reconstruction between grid points
  for (const Jump& j : p.jumps) {
    const double before = p.value_at(j.time - 1e-12);
    const double after = p.value_at(j.time);
    CHECK(after - before == doctest::Approx(j.size).epsilon(1e-6));
  }
}

TEST_CASE("bessel bridge: endpoints, positivity, midpoint law") {
  Rng rng(31);
  PathSample b = sample_bessel3_bridge(1.0, 256, rng);
  CHECK(b.values.front() == 0.0);
  CHECK(b.values.back() == 0.0);
  for (std::size_t i = 1; i + 1 < b.values.size(); ++i)
    CHECK(b.values[i] > 0.0);

  // midpoint of a length-1 bridge: norm of three N(0, 1/4) -- Maxwell(1/2)
  const int n = 10000;
  std::vector<double> mid(n), maxwell(n);
  for (int i = 0; i < n; ++i) {
    PathSample s = sample_bessel3_bridge(1.0, 64, rng);
    mid[i] = s.value_at(0.5);
    const double x = 0.5 * rng.normal(), y = 0.5 * rng.normal(),
                 z = 0.5 * rng.normal();
    maxwell[i] = std::sqrt(x * x + y * y + z * z);
  }
  CHECK(ks_two_sample(mid, maxwell).pass_1pct());
}

TEST_CASE("stable bridge: one-step determinism and endpoint window") {
  Rng rng(7);
  const StableParams p = StableParams::from_rho(1.5, 0.5);
  PathSample one = sample_stable_bridge(p, 2.0, 0.8, 1, 0.02, rng);
  CHECK(one.values.back() == doctest::Approx(0.8));

  PathSample br = sample_stable_bridge(p, 1.0, 0.4, 32, 0.05, rng);
  const double width =
      0.05 * std::max(0.4, std::pow(p.cms_scale(), 1.0 / 1.5));
  CHECK(std::abs(br.values.back() - 0.4) <= width + 1e-12);
  // endpoint 0: window falls back to the body scale
  PathSample z = sample_stable_bridge(p, 1.0, 0.0, 16, 0.05, rng);
  CHECK(std::abs(z.values.back()) <=
        0.05 * std::pow(p.cms_scale(), 1.0 / 1.5) + 1e-12);
}

TEST_CASE("stable bridge: self-similar rescaling matches in law") {
  Rng rng(13);
  const StableParams p = StableParams::from_rho(1.5, 0.5);
  const double z = 0.5, r = 1.0, c = 2.0;
  const int n = 4000, steps = 32;
  std::vector<double> base(n), scaled(n);
  for (int i = 0; i < n; ++i) {
    base[i] = sample_stable_bridge(p, r, z, steps, 0.05, rng).value_at(0.5 * r);
    const double cz = std::pow(c, 1.0 / p.theta) * z;
    scaled[i] = sample_stable_bridge(p, c * r, cz, steps, 0.05, rng)
                    .value_at(0.5 * c * r) *
                std::pow(c, -1.0 / p.theta);
  }
  CHECK(ks_two_sample(base, scaled).pass_1pct());
}

TEST_CASE("dyadic stable bridge matches the conditional midpoint density") {
  Rng rng(41);
  const StableParams p = StableParams::family(0.75);
  StableDensity dens(p);
  const double len = 1.0, x1 = 0.6;
  const int n = 8000;
  std::vector<double> mids(n);
  for (int i = 0; i < n; ++i) {
    PathSample b = sample_stable_bridge_dyadic(dens, len, 0.0, x1, 16, rng);
    CHECK(b.values.back() == doctest::Approx(x1));
    mids[i] = b.value_at(0.5);
  }
  auto g = [&](double x) {
    return dens.pdf_t(0.5, x) * dens.pdf_t(0.5, x1 - x);
  };
  const auto [d, kept] = ks_against_density(mids, g, -20.0, 20.0);
  CHECK(d < 1.63 / std::sqrt(double(kept)));
}

TEST_CASE("levy spec validation") {
  LevySpec bad = testspec::gaussian_bump(1.0, 0.0, 0.5, -1, 1, 0, "bad");
  bad.killing_rate = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  LevySpec heavy;
  heavy.name = "too-heavy";
  heavy.density = [](double y) { return std::pow(std::abs(y), -3.2); };
  heavy.support = Interval{-1.0, 1.0};
  CHECK_THROWS_AS(heavy.validate(), ConfigError);
}

TEST_CASE("tabulated sampler reproduces its density") {
  auto dens = [](double x) { return std::exp(-2.0 * x); };
  TabulatedSampler tab(dens, 0.1, HUGE_VAL);
  CHECK(tab.total_mass() ==
        doctest::Approx(std::exp(-0.2) / 2.0).epsilon(1e-4));
  Rng rng(19);
  const int n = 20000;
  std::vector<double> xs(n), ref(n);
  int got = 0;
  while (got < n) {
    const double e = 0.1 + rng.exponential(2.0);
    ref[got] = e;  // exact sampler of the normalised law
    xs[got] = tab.sample(rng);
    ++got;
  }
  CHECK(ks_two_sample(xs, ref).pass_1pct());
}
