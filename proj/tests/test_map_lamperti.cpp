#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "sgf/errors.hpp"
#include "sgf/lamperti.hpp"
#include "sgf/map.hpp"
#include "sgf/stats.hpp"
#include "synthetic_specs.hpp"

using namespace sgf;

TEST_CASE("matrix exponent structure") {
  MapSpec cs = testspec::constant_sign_toy();
  const Matrix2 f = matrix_exponent(cs, 1.2);
  CHECK(f(0, 1) == 0.0);
  CHECK(f(1, 0) == 0.0);
  CHECK(f(0, 0) == doctest::Approx(laplace_exponent(cs.xi_plus, 1.2)));

  MapSpec sg = testspec::signed_toy();
  // q = 0 with killing-free components: the intensity matrix
  const Matrix2 q0 = matrix_exponent(sg, 0.0);
  CHECK(q0(0, 0) == doctest::Approx(-sg.q_plus).epsilon(1e-12));
  CHECK(q0(0, 1) == doctest::Approx(sg.q_plus).epsilon(1e-12));
  CHECK(q0(1, 0) == doctest::Approx(sg.q_minus).epsilon(1e-12));
  CHECK(q0(1, 1) == doctest::Approx(-sg.q_minus).epsilon(1e-12));
  // diagonal = psi_i - q_i exactly, off-diagonal nonnegative
  const Matrix2 f2 = matrix_exponent(sg, 0.8);
  CHECK(f2(0, 0) ==
        doctest::Approx(laplace_exponent(sg.xi_plus, 0.8) - sg.q_plus));
  CHECK(f2(0, 1) >= 0.0);
  CHECK(f2(1, 0) >= 0.0);

  // symmetric spec: row symmetry gives the (1,1) eigenvector
  MapSpec sym = sg;
  sym.xi_minus = sym.xi_plus;
  sym.q_minus = sym.q_plus;
  sym.u_minus = sym.u_plus;
  const Matrix2 fs = matrix_exponent(sym, 0.7);
  const double r1 = fs(0, 0) + fs(0, 1);
  const double r2 = fs(1, 0) + fs(1, 1);
  CHECK(r1 == doctest::Approx(r2).epsilon(1e-12));
}

TEST_CASE("matrix exponential") {
  Matrix2 d;
  d(0, 0) = 0.3;
  d(1, 1) = -0.7;
  const Matrix2 e = expm(d, 2.0);
  CHECK(e(0, 0) == doctest::Approx(std::exp(0.6)).epsilon(1e-12));
  CHECK(e(1, 1) == doctest::Approx(std::exp(-1.4)).epsilon(1e-12));
  CHECK(e(0, 1) == doctest::Approx(0.0));
  // against a brute-force series
  Matrix2 a;
  a(0, 0) = -0.4;
  a(0, 1) = 0.9;
  a(1, 0) = 0.2;
  a(1, 1) = -1.1;
  Matrix2 series = Matrix2::identity();
  Matrix2 term = Matrix2::identity();
  for (int k = 1; k < 40; ++k) {
    term = term * a * (1.0 / k);
    series = series + term;
  }
  const Matrix2 pade = expm(a, 1.0);
  for (int i = 0; i < 4; ++i)
    CHECK(pade.m[i] == doctest::Approx(series.m[i]).epsilon(1e-12));
}

TEST_CASE("map sampler: degenerate cases") {
  Rng rng(3);
  MapSpec cs = testspec::constant_sign_toy();
  const MapPath p = sample_map(cs, +1, 2.0, 32, rng);
  CHECK(p.switch_times.empty());
  for (int s : p.modulator) CHECK(s == 1);

  // pure telegraph: no Levy motion, zero switch jumps
  MapSpec tele;
  tele.name = "telegraph";
  tele.q_plus = 3.0;
  tele.q_minus = 3.0;
  tele.u_plus = JumpLaw::point_mass(0.0);
  tele.u_minus = JumpLaw::point_mass(0.0);
  int switches = 0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    const MapPath t = sample_map(tele, +1, 1.0, 8, rng);
    switches += static_cast<int>(t.switch_times.size());
    CHECK(std::abs(t.additive.values.back()) < 1e-12);
  }
  // mean switch count = q * horizon
  const double mean = switches / double(n);
  CHECK(std::abs(mean - 3.0) < 3.0 * std::sqrt(3.0 / n));
}

TEST_CASE("map moment identity against the matrix exponential") {
  MapSpec sg = testspec::signed_toy();
  MapSimulator sim(sg);
  Rng rng(7);
  const double t = 0.25, q = 0.9;
  const Matrix2 eft = expm(matrix_exponent(sg, q), t);
  const int n = 100000;
  for (int start : {+1, -1}) {
    std::vector<double> to_plus(n), to_minus(n);
    for (int i = 0; i < n; ++i) {
      const MapPath p = sim.run(start, t, 4, rng);
      const double w = std::exp(q * p.additive.values.back());
      const bool plus = p.modulator.back() == 1;
      to_plus[i] = plus ? w : 0.0;
      to_minus[i] = plus ? 0.0 : w;
    }
    const MeanSe mp = mean_se(to_plus);
    const MeanSe mm = mean_se(to_minus);
    const int row = start == 1 ? 0 : 1;
    CHECK(std::abs(mp.mean - eft(row, 0)) < 3.0 * mp.se);
    CHECK(std::abs(mm.mean - eft(row, 1)) < 3.0 * mm.se);
  }
}

TEST_CASE("map semigroup identity by Monte Carlo") {
  MapSpec sg = testspec::signed_toy();
  MapSimulator sim(sg);
  Rng rng(13);
  const double t = 0.2, s = 0.3, q = 0.7;
  const Matrix2 eft = expm(matrix_exponent(sg, q), t);
  const Matrix2 efs = expm(matrix_exponent(sg, q), s);
  const Matrix2 both = eft * efs;
  const int n = 100000;
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    const MapPath p = sim.run(+1, t + s, 8, rng);
    w[i] = p.modulator.back() == 1
               ? std::exp(q * p.additive.values.back())
               : 0.0;
  }
  const MeanSe m = mean_se(w);
  CHECK(std::abs(m.mean - both(0, 0)) < 3.0 * m.se);
}

TEST_CASE("modulator occupation converges to the stationary law") {
  MapSpec sg = testspec::signed_toy();
  sg.q_plus = 1.5;
  sg.q_minus = 0.5;
  MapSimulator sim(sg);
  Rng rng(23);
  // stationary probability of +: q- / (q+ + q-)
  const double target = 0.5 / 2.0;
  double occ = 0.0;
  const int n = 400;
  for (int i = 0; i < n; ++i) {
    const MapPath p = sim.run(+1, 50.0, 500, rng);
    // time-weighted occupation of the + state
    double t_plus = 0.0;
    double prev = 0.0;
    int state = +1;
    for (double st : p.switch_times) {
      if (state == 1) t_plus += st - prev;
      prev = st;
      state = -state;
    }
    if (state == 1) t_plus += p.additive.duration - prev;
    occ += t_plus / p.additive.duration;
  }
  CHECK(std::abs(occ / n - target) < 0.01);
}

TEST_CASE("lamperti: constants and homogeneous case") {
  // xi = 0, no switches: X = z forever
  MapPath still;
  still.start_state = +1;
  still.additive.times = {0.0, 5.0};
  still.additive.values = {0.0, 0.0};
  still.additive.duration = 5.0;
  still.modulator = {1, 1};
  const PathSample x = lamperti_kiu(still, 1.3, 2.0, 3.0, 16);
  for (double v : x.values) CHECK(v == doctest::Approx(2.0));
  CHECK(x.alive);

  // alpha = 0: X(t) = z e^{xi(t)} with no time change
  MapPath ramp;
  ramp.start_state = +1;
  ramp.additive.times = {0.0, 1.0, 2.0};
  ramp.additive.values = {0.0, 0.5, 1.0};
  ramp.additive.duration = 2.0;
  ramp.modulator = {1, 1, 1};
  const PathSample h = lamperti_kiu(ramp, 0.0, 1.5, 2.0, 8);
  for (std::size_t i = 0; i < h.times.size(); ++i)
    CHECK(h.values[i] ==
          doctest::Approx(1.5 * std::exp(0.5 * h.times[i])).epsilon(1e-10));
}

TEST_CASE("lamperti: drift-only closed form") {
  // xi drift b, z = 1: X(t) = (1 + alpha b t)^{1/alpha}
  const double b = 0.8, alpha = 1.4;
  MapPath ramp;
  ramp.start_state = +1;
  const int n = 2000;
  for (int i = 0; i <= n; ++i) {
    ramp.additive.times.push_back(10.0 * i / n);
    ramp.additive.values.push_back(b * 10.0 * i / n);
    ramp.modulator.push_back(1);
  }
  ramp.additive.duration = 10.0;
  const PathSample x = lamperti_kiu(ramp, alpha, 1.0, 1.0, 64);
  const double expect = std::pow(1.0 + alpha * b * 1.0, 1.0 / alpha);
  CHECK(x.value_at(1.0) == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("lamperti round trip recovers the MAP") {
  MapSpec sg = testspec::signed_toy();
  MapSimulator sim(sg);
  Rng rng(17);
  const double alpha = 0.9, z = 1.4;
  const MapPath mp = sim.run(+1, 3.0, 256, rng);
  const PathSample x = lamperti_kiu(mp, alpha, z, 1.0, 4096);
  const MapPath back = inverse_time_change(x, alpha, z);
  // compare xi on the recovered clock against the original path; near jumps
  // the reconstruction can shift by a clock cell, so allow a two-cell time
  // tolerance around each comparison point
  double worst = 0.0;
  for (std::size_t i = 16; i + 16 < back.additive.times.size(); i += 16) {
    const double s = back.additive.times[i];
    if (s >= mp.additive.duration) break;
    const double cell =
        back.additive.times[i + 1] - back.additive.times[i - 1];
    double best = HUGE_VAL;
    for (double ds : {-cell, -0.5 * cell, 0.0, 0.5 * cell, cell}) {
      const double sp = std::clamp(s + ds, 0.0, mp.additive.duration);
      best = std::min(best,
                      std::abs(mp.additive.value_at(sp) -
                               back.additive.values[i]));
    }
    worst = std::max(worst, best);
  }
  CHECK(worst < 0.02);

  // constant path: xi recovered identically zero
  PathSample flat;
  flat.times = {0.0, 0.5, 1.0};
  flat.values = {2.0, 2.0, 2.0};
  flat.duration = 1.0;
  const MapPath fz = inverse_time_change(flat, 1.1, 2.0);
  for (double v : fz.additive.values) CHECK(v == doctest::Approx(0.0));

  // alpha = 0: identity re-timing
  const MapPath hz = inverse_time_change(x, 0.0, z);
  CHECK(hz.additive.times.back() ==
        doctest::Approx(x.times.back()).epsilon(1e-9));
}

TEST_CASE("lamperti: sign flips at switch images and jump bookkeeping") {
  MapSpec sg = testspec::signed_toy();
  SsmpSpec spec;
  spec.map = sg;
  spec.alpha = 0.8;
  spec.start = 1.0;
  SsmpSimulator sim(spec);
  Rng rng(29);
  for (int rep = 0; rep < 50; ++rep) {
    const PathSample x = sim.run(1.0, 256, rng);
    int flips = 0;
    for (const Jump& j : x.jumps) {
      if (j.sign_flip) {
        ++flips;
        // value changes sign exactly at the flip
        CHECK(j.value_before * (j.value_before + j.size) < 0.0);
      } else {
        CHECK(j.value_before * (j.value_before + j.size) > 0.0);
      }
    }
    // sign changes of the sampled path only at flagged jumps (grid check)
    int grid_changes = 0;
    for (std::size_t i = 1; i < x.values.size(); ++i)
      if (x.values[i] * x.values[i - 1] < 0.0) ++grid_changes;
    CHECK(grid_changes <= flips);
  }
}

TEST_CASE("self-similarity of the simulated ssmp") {
  MapSpec sg = testspec::signed_toy();
  SsmpSpec spec;
  spec.map = sg;
  spec.alpha = 0.8;
  spec.start = 1.0;
  SsmpSpec spec2 = spec;
  const double c = 1.7;
  spec2.start = c * spec.start;
  SsmpSimulator sim1(spec), sim2(spec2);
  Rng rng(31);
  const double t = 0.4;
  const int n = 10000;
  std::vector<double> a(n), b(n);
  for (int i = 0; i < n; ++i) {
    a[i] = c * sim1.run(std::pow(c, -spec.alpha) * t, 32, rng).values.back();
    b[i] = sim2.run(t, 32, rng).values.back();
    // the compound-Poisson toy has atoms; identical-in-law jitter breaks
    // float-level ties without changing the comparison
    a[i] += 1e-9 * rng.u01();
    b[i] += 1e-9 * rng.u01();
  }
  CHECK(ks_two_sample(a, b).pass_1pct());
}

TEST_CASE("ssmp validation") {
  SsmpSpec bad;
  bad.map = testspec::constant_sign_toy();
  bad.start = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  MapPath empty;
  CHECK_THROWS_AS(lamperti_kiu(empty, 1.0, 0.0, 1.0, 8), DomainError);
}
