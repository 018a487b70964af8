#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wbcrlb/moments.hpp"
#include "wbcrlb/quadrature.hpp"
#include "wbcrlb/random.hpp"
#include "wbcrlb/scene.hpp"

using namespace wbcrlb;

namespace {

WaveformSpec ref_chirp() {
  WaveformSpec s;
  s.family = WaveformFamily::chirp;
  s.chirp_rate = 2.56e9;
  s.duration = 5e-5;
  return s;
}

SceneParams ref_scene(int p) {
  SceneParams s;
  s.tau = 2e-4;
  s.gamma = 1.0 / 1.06;
  s.delta = 6.25e-8;
  s.scatterers = p;
  return s;
}

}  // namespace

TEST_CASE("scatterer delays") {
  const Waveform wf{ref_chirp()};
  {
    const TargetScene scene = TargetScene::create(ref_scene(1), wf);
    const auto d = scatterer_delays(scene);
    REQUIRE(d.size() == 1);
    CHECK(d[0] == doctest::Approx(2e-4).epsilon(1e-15));
  }
  {
    const TargetScene scene = TargetScene::create(ref_scene(4), wf);
    const auto d = scatterer_delays(scene);
    REQUIRE(d.size() == 4);
    CHECK(d[0] == doctest::Approx(2e-4));
    CHECK(d[1] == doctest::Approx(2.0000625e-4));
    CHECK(d[2] == doctest::Approx(2.000125e-4));
    CHECK(d[3] == doctest::Approx(2.0001875e-4));
    for (std::size_t i = 1; i < d.size(); ++i)
      CHECK(d[i] - d[i - 1] == doctest::Approx(6.25e-8).epsilon(1e-12));
  }
}

TEST_CASE("tau rounds onto the sample grid") {
  const Waveform wf{ref_chirp()};
  SceneParams params = ref_scene(2);
  params.tau = 3200.4 * params.delta;
  const TargetScene scene = TargetScene::create(params, wf);
  CHECK(scene.tau() == doctest::Approx(3200 * params.delta).epsilon(1e-14));
  CHECK(scene.tau_adjustment() ==
        doctest::Approx(-0.4 * params.delta).epsilon(1e-9));
  // exact multiples are untouched
  const TargetScene exact = TargetScene::create(ref_scene(2), wf);
  CHECK(exact.tau_adjustment() == 0.0);
}

TEST_CASE("echo coverage drives the sample count") {
  const Waveform wf{ref_chirp()};
  const TargetScene scene = TargetScene::create(ref_scene(4), wf);
  const double tau_last = scene.tau() + 3 * scene.delta();
  CHECK(scene.gamma() * ((scene.sample_count() - 1) * scene.delta() - tau_last) >=
        wf.duration());
  CHECK_THROWS_AS(TargetScene::create(ref_scene(4), wf, 4000),
                  support_violation_error);
}

TEST_CASE("target size is derived") {
  const Waveform wf{ref_chirp()};
  const TargetScene scene = TargetScene::create(ref_scene(4), wf);
  CHECK(scene.target_size() ==
        doctest::Approx(0.5 * 3e8 * 3 * 6.25e-8).epsilon(1e-12));
}

TEST_CASE("measurement matrix structure") {
  const Waveform wf{ref_chirp()};
  {
    // gamma = 1, tau = 0, single scatterer: the sampled waveform itself.
    SceneParams params;
    params.tau = 0.0;
    params.gamma = 1.0;
    params.delta = 6.25e-8;
    params.scatterers = 1;
    const TargetScene scene = TargetScene::create(params, wf);
    const Eigen::MatrixXcd phi = measurement_matrix(scene, wf);
    for (int n = 0; n < 20; ++n)
      CHECK(phi(n, 0) == wf.evaluate(n * params.delta));
  }
  {
    // gamma = 1 and integral tau/delta: columns are exact row shifts.
    SceneParams params;
    params.tau = 10 * 6.25e-8;
    params.gamma = 1.0;
    params.delta = 6.25e-8;
    params.scatterers = 3;
    const TargetScene scene = TargetScene::create(params, wf);
    const Eigen::MatrixXcd phi = measurement_matrix(scene, wf);
    for (int j = 1; j < 3; ++j)
      for (int n = j; n < scene.sample_count(); ++n)
        CHECK(std::abs(phi(n, j) - phi(n - 1, j - 1)) <= 1e-9);
  }
}

TEST_CASE("column energy approximates the stretched-envelope integral") {
  const Waveform wf{ref_chirp()};
  const TargetScene scene = TargetScene::create(ref_scene(1), wf);
  const Eigen::MatrixXcd phi = measurement_matrix(scene, wf);
  const double riemann = phi.col(0).squaredNorm() * scene.delta();
  const MomentTable tab = moments(wf, 1);
  const double exact = tab.m(0, 0) / scene.gamma();
  CHECK(std::abs(riemann - exact) / exact <= 5e-3);
}

TEST_CASE("sample energy converges first order to the reference energy") {
  const Waveform wf{ref_chirp()};
  double err[2];
  int i = 0;
  for (double delta : {6.25e-8, 3.125e-8}) {
    SceneParams params = ref_scene(1);
    params.delta = delta;
    const TargetScene scene = TargetScene::create(params, wf);
    const Eigen::MatrixXcd phi = measurement_matrix(scene, wf);
    const double riemann =
        scene.delta() * (phi * scene.coefficients()).squaredNorm();
    const double exact = reference_energy(scene, wf) / scene.gamma();
    err[i++] = std::abs(riemann - exact) / exact;
  }
  CHECK(err[1] <= 0.75 * err[0]);  // roughly halves with the step
}

TEST_CASE("gram matrix") {
  const Waveform wf{ref_chirp()};
  {
    const TargetScene scene = TargetScene::create(ref_scene(1), wf);
    const Eigen::MatrixXcd gram = gram_matrix(scene, wf);
    const MomentTable tab = moments(wf, 1);
    CHECK(std::abs(gram(0, 0).real() - tab.m(0, 0)) <= 1e-10 * tab.m(0, 0));
  }
  {
    const TargetScene scene = TargetScene::create(ref_scene(3), wf);
    const Eigen::MatrixXcd gram = gram_matrix(scene, wf);
    CHECK((gram - gram.adjoint()).norm() == 0.0);  // symmetrized exactly
    for (int i = 0; i < 3; ++i)
      CHECK(gram(i, i).real() == doctest::Approx(gram(0, 0).real()));
  }
  {
    // one off-diagonal entry against a 4x finer quadrature
    const TargetScene scene = TargetScene::create(ref_scene(2), wf);
    const Eigen::MatrixXcd coarse = gram_matrix(scene, wf);
    QuadratureConfig fine;
    fine.intervals = 1 << 16;
    const Eigen::MatrixXcd refined = gram_matrix(scene, wf, fine);
    CHECK(std::abs(coarse(0, 1) - refined(0, 1)) <=
          1e-8 * std::abs(refined(0, 1)));
  }
}

TEST_CASE("echo synthesis: noiseless limit and determinism") {
  const Waveform wf{ref_chirp()};
  const TargetScene scene = TargetScene::create(ref_scene(4), wf);
  const Eigen::MatrixXcd phi = measurement_matrix(scene, wf);
  const Eigen::VectorXcd clean =
      synthesize_echo(scene, wf, NoiseModel{0.0, 7}, 0);
  CHECK((clean - phi * scene.coefficients()).norm() == 0.0);

  const NoiseModel noise{1e-7, 42};
  const Eigen::VectorXcd y1 = synthesize_echo(scene, wf, noise, 3);
  const Eigen::VectorXcd y2 = synthesize_echo(scene, wf, noise, 3);
  CHECK((y1 - y2).norm() == 0.0);
  const Eigen::VectorXcd y3 = synthesize_echo(scene, wf, noise, 4);
  CHECK((y1 - y3).norm() > 0.0);
}

TEST_CASE("noise statistics: variance and whiteness") {
  const int n = 100000;
  GaussianStream g(12345, 0);
  double power = 0.0;
  cplx lag1{}, lag3{};
  cplx prev1{}, prev3[3] = {};
  for (int i = 0; i < n; ++i) {
    const cplx w = g.at(static_cast<std::uint64_t>(i));
    power += std::norm(w);
    if (i >= 1) lag1 += std::conj(prev1) * w;
    if (i >= 3) lag3 += std::conj(prev3[i % 3]) * w;
    prev1 = w;
    prev3[i % 3] = w;
  }
  power /= n;
  CHECK(std::abs(power - 1.0) <= 0.02);  // unit complex variance
  // each lag estimate is approximately CN(0, 1/n): 3 sigma bound
  CHECK(std::abs(lag1) / n <= 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(lag3) / n <= 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("synthesized sample variance matches n0/delta") {
  const Waveform wf{ref_chirp()};
  SceneParams params = ref_scene(1);
  const TargetScene scene = TargetScene::create(params, wf);
  const double n0 = 3e-7;
  const Eigen::VectorXcd clean = synthesize_echo(scene, wf, NoiseModel{0.0, 9}, 0);
  double acc = 0.0;
  int count = 0;
  const int streams = 100000 / scene.sample_count() + 1;
  for (int s = 0; s < streams; ++s) {
    const Eigen::VectorXcd y =
        synthesize_echo(scene, wf, NoiseModel{n0, 9}, static_cast<std::uint64_t>(s));
    acc += (y - clean).squaredNorm();
    count += static_cast<int>(y.size());
  }
  const double sigma2 = n0 / scene.delta();
  CHECK(std::abs(acc / count - sigma2) <= 0.02 * sigma2);
}

TEST_CASE("snr definition and round trip") {
  const Waveform wf{ref_chirp()};
  {
    const TargetScene scene = TargetScene::create(ref_scene(1), wf);
    const double n0 = 1e-7;
    const MomentTable tab = moments(wf, 1);
    const double expected =
        10.0 * std::log10(tab.m(0, 0) / (scene.gamma() * n0));
    CHECK(snr_db(scene, wf, n0) == doctest::Approx(expected).epsilon(1e-9));
  }
  {
    const TargetScene scene = TargetScene::create(ref_scene(4), wf);
    const double n0 = 4.2e-6;
    const double back = n0_for_snr(scene, wf, snr_db(scene, wf, n0));
    CHECK(std::abs(back - n0) <= 1e-12 * n0);
  }
}
