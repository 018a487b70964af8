#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "wbcrlb/fisher.hpp"
#include "wbcrlb/moments.hpp"

using namespace wbcrlb;

namespace {

WaveformSpec ref_chirp() {
  WaveformSpec s;
  s.family = WaveformFamily::chirp;
  s.chirp_rate = 2.56e9;
  s.duration = 5e-5;
  return s;
}

WaveformSpec ref_gauss() {
  WaveformSpec s;
  s.family = WaveformFamily::gaussian_pulse;
  s.duration = 5e-5;
  s.width = 5e-5 / 12.0;
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

TEST_CASE("single-scatterer block values") {
  const Waveform wf{ref_chirp()};
  const TargetScene scene = TargetScene::create(ref_scene(1), wf);
  const double n0 = 2e-7;
  const FisherBlocks blocks = fisher_blocks(scene, wf, n0);
  const MomentTable tab = moments(wf, 1);
  CHECK(blocks.f11 == doctest::Approx(2.0 * scene.gamma() * tab.m(0, 1) / n0)
                          .epsilon(1e-10));
  CHECK(blocks.f33(0, 0).real() ==
        doctest::Approx(2.0 * tab.m(0, 0) / (scene.gamma() * n0))
            .epsilon(1e-10));
  CHECK(blocks.f33(0, 0).imag() == 0.0);
}

TEST_CASE("blocks match the finite-difference oracle") {
  const Waveform wf{ref_chirp()};
  const TargetScene scene = TargetScene::create(ref_scene(4), wf);
  const double n0 = n0_for_snr(scene, wf, 20.0);
  const FisherBlocks blocks = fisher_blocks(scene, wf, n0);
  FdOracleConfig cfg;
  cfg.verify_step = false;
  const Eigen::MatrixXd fim = fim_oracle_fd(scene, wf, n0, cfg);
  CHECK(std::abs(fim(0, 0) - blocks.f11) / blocks.f11 <= 1e-2);
  CHECK(std::abs(fim(0, 1) - blocks.f12) / std::abs(blocks.f12) <= 1e-2);
  CHECK(std::abs(fim(1, 1) - blocks.f22) / blocks.f22 <= 1e-2);
  const int p = scene.scatterers();
  for (int i = 0; i < p; ++i) {
    // rows 2..: Re/Im coefficient blocks carry the complex cross vectors
    CHECK(std::abs(fim(2 + i, 0) - blocks.f31[i].real()) <=
          1e-2 * blocks.f31.norm());
    CHECK(std::abs(fim(2 + p + i, 0) - blocks.f31[i].imag()) <=
          1e-2 * blocks.f31.norm());
    for (int j = 0; j < p; ++j)
      CHECK(std::abs(fim(2 + i, 2 + j) - blocks.f33(i, j).real()) <=
            1e-2 * std::abs(blocks.f33(0, 0)));
  }
}

TEST_CASE("schur reduction: no coupling leaves the scalars alone") {
  FisherBlocks blocks;
  blocks.f11 = 3.0;
  blocks.f12 = 0.5;
  blocks.f22 = 2.0;
  blocks.f31 = Eigen::VectorXcd::Zero(3);
  blocks.f32 = Eigen::VectorXcd::Zero(3);
  blocks.f33 = Eigen::MatrixXcd::Identity(3, 3);
  const SchurResult s = schur_reduce(blocks);
  CHECK(s.a11 == 3.0);
  CHECK(s.a12 == 0.5);
  CHECK(s.a22 == 2.0);
}

TEST_CASE("schur reduction against a dense inverse") {
  std::mt19937 rng(7);
  std::normal_distribution<double> normal;
  const int p = 6;
  Eigen::MatrixXcd a(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = cplx(normal(rng), normal(rng));
  FisherBlocks blocks;
  blocks.f33 = a.adjoint() * a + 0.5 * Eigen::MatrixXcd::Identity(p, p);
  blocks.f31 = Eigen::VectorXcd(p);
  blocks.f32 = Eigen::VectorXcd(p);
  for (int i = 0; i < p; ++i) {
    blocks.f31[i] = cplx(normal(rng), normal(rng));
    blocks.f32[i] = cplx(normal(rng), normal(rng));
  }
  blocks.f11 = 40.0;
  blocks.f12 = 3.0;
  blocks.f22 = 25.0;
  const SchurResult s = schur_reduce(blocks, ReductionPath::complex_full);
  const Eigen::MatrixXcd inv = blocks.f33.inverse();
  const double a11 =
      blocks.f11 - (blocks.f31.adjoint() * inv * blocks.f31)(0).real();
  const double a12 =
      blocks.f12 - (blocks.f31.adjoint() * inv * blocks.f32)(0).real();
  const double a22 =
      blocks.f22 - (blocks.f32.adjoint() * inv * blocks.f32)(0).real();
  CHECK(std::abs(s.a11 - a11) <= 1e-10 * std::abs(a11));
  CHECK(std::abs(s.a12 - a12) <= 1e-10 * std::abs(a12) + 1e-12);
  CHECK(std::abs(s.a22 - a22) <= 1e-10 * std::abs(a22));
}

TEST_CASE("schur reduction: smooth single scatterer reproduces the closed "
          "coefficients") {
  const Waveform wf{ref_gauss()};
  const TargetScene scene = TargetScene::create(ref_scene(1), wf);
  const double n0 = 1e-9;
  const FisherBlocks blocks = fisher_blocks(scene, wf, n0);
  const SchurResult s = schur_reduce(blocks);
  const MomentTable tab = moments(wf, 1);
  const double g = scene.gamma();
  CHECK(s.a11 ==
        doctest::Approx(2.0 * g * tab.m(0, 1) / n0).epsilon(1e-6));
  CHECK(s.a12 ==
        doctest::Approx(-2.0 * tab.m(1, 1) / (g * n0)).epsilon(1e-6));
  // the energy/4 subtraction from eliminating the complex amplitude
  CHECK(s.a22 == doctest::Approx(2.0 / (g * g * g * n0) *
                                 (tab.m(2, 1) - tab.m(0, 0) / 4.0))
                     .epsilon(1e-6));
}

TEST_CASE("singular nuisance block is reported") {
  FisherBlocks blocks;
  blocks.f11 = blocks.f22 = 1.0;
  blocks.f12 = 0.0;
  blocks.f31 = Eigen::VectorXcd::Zero(2);
  blocks.f32 = Eigen::VectorXcd::Zero(2);
  blocks.f33 = Eigen::MatrixXcd(2, 2);
  blocks.f33 << 1.0, 1.0, 1.0, 1.0 + 1e-14;
  CHECK_THROWS_AS(schur_reduce(blocks), singular_block_error);
}

TEST_CASE("crlb assembly") {
  FisherBlocks blocks;
  blocks.f11 = 4.0;
  blocks.f12 = 0.0;
  blocks.f22 = 9.0;
  blocks.f31 = Eigen::VectorXcd::Zero(1);
  blocks.f32 = Eigen::VectorXcd::Zero(1);
  blocks.f33 = Eigen::MatrixXcd::Identity(1, 1);
  const CrlbResult r = crlb(blocks);
  CHECK(r.crlb_tau == doctest::Approx(1.0 / 4.0));
  CHECK(r.crlb_gamma == doctest::Approx(1.0 / 9.0));
  CHECK(r.provenance.label() == "integral");
}

TEST_CASE("doubling the coefficients divides both bounds by four") {
  const Waveform wf{ref_chirp()};
  const double n0 = 5e-6;
  SceneParams params = ref_scene(4);
  const TargetScene base = TargetScene::create(params, wf);
  params.coefficients = Eigen::VectorXcd::Constant(4, cplx(2.0, 0.0));
  const TargetScene doubled = TargetScene::create(params, wf);
  const CrlbResult r1 = crlb(fisher_blocks(base, wf, n0));
  const CrlbResult r2 = crlb(fisher_blocks(doubled, wf, n0));
  CHECK(r2.crlb_tau == doctest::Approx(r1.crlb_tau / 4.0).epsilon(1e-10));
  CHECK(r2.crlb_gamma == doctest::Approx(r1.crlb_gamma / 4.0).epsilon(1e-10));
}

TEST_CASE("snr scaling is exact in n0") {
  const Waveform wf{ref_chirp()};
  const TargetScene scene = TargetScene::create(ref_scene(4), wf);
  const CrlbResult r1 = crlb(fisher_blocks(scene, wf, 1e-6));
  const CrlbResult r2 = crlb(fisher_blocks(scene, wf, 1e-5));
  CHECK(r2.crlb_tau == doctest::Approx(10.0 * r1.crlb_tau).epsilon(1e-9));
  CHECK(r2.crlb_gamma == doctest::Approx(10.0 * r1.crlb_gamma).epsilon(1e-9));
}

TEST_CASE("reference-scene regression values") {
  // Frozen after verifying against the finite-difference oracle; see the
  // oracle-equivalence test below for the live cross-check.
  const Waveform wf{ref_chirp()};
  const TargetScene scene = TargetScene::create(ref_scene(4), wf);
  const double n0 = n0_for_snr(scene, wf, 20.0);
  CHECK(n0 == doctest::Approx(4.485302e-06).epsilon(1e-5));
  const CrlbResult r = crlb(fisher_blocks(scene, wf, n0));
  CHECK(r.crlb_tau == doctest::Approx(1.262844e-13).epsilon(1e-4));
  CHECK(r.crlb_gamma == doctest::Approx(5.659447e-05).epsilon(1e-4));
}

TEST_CASE("single-scatterer closed form equals the general pipeline") {
  for (const WaveformSpec& spec : {ref_chirp(), ref_gauss()}) {
    const Waveform wf{spec};
    const TargetScene scene = TargetScene::create(ref_scene(1), wf);
    const double n0 = 3e-8;
    const CrlbResult general = crlb(fisher_blocks(scene, wf, n0));
    const CrlbResult closed = crlb_single(wf, 1.0, scene.gamma(), n0);
    CHECK(std::abs(closed.crlb_tau - general.crlb_tau) <=
          1e-10 * general.crlb_tau);
    CHECK(std::abs(closed.crlb_gamma - general.crlb_gamma) <=
          1e-10 * general.crlb_gamma);
  }
}

TEST_CASE("pure tone carries no delay information once amplitude is unknown") {
  WaveformSpec spec;
  spec.family = WaveformFamily::tone;
  spec.carrier = 1e5;
  spec.duration = 5e-5;
  const Waveform wf{spec};
  CHECK_THROWS_AS(crlb_single(wf, 1.0, 1.0 / 1.06, 1e-7), error);
}

TEST_CASE("closed form scales with amplitude squared") {
  const Waveform wf{ref_chirp()};
  const CrlbResult r1 = crlb_single(wf, 1.0, 1.0 / 1.06, 1e-7);
  const CrlbResult r2 = crlb_single(wf, 2.0, 1.0 / 1.06, 1e-7);
  CHECK(r2.crlb_tau == doctest::Approx(r1.crlb_tau / 4.0).epsilon(1e-12));
}

TEST_CASE("fd oracle: nuisance diagonal matches the envelope energy") {
  const Waveform wf{ref_chirp()};
  const TargetScene scene = TargetScene::create(ref_scene(2), wf);
  const double n0 = 1e-6;
  FdOracleConfig cfg;
  cfg.verify_step = false;
  const Eigen::MatrixXd fim = fim_oracle_fd(scene, wf, n0, cfg);
  const MomentTable tab = moments(wf, 1);
  const double expected = 2.0 * tab.m(0, 0) / (scene.gamma() * n0);
  CHECK(std::abs(fim(2, 2) - expected) <= 1e-4 * expected);
  // symmetric positive definite
  CHECK((fim - fim.transpose()).norm() <= 1e-12 * fim.norm());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fim);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("fd oracle: step preconditions") {
  const Waveform wf{ref_chirp()};
  const TargetScene scene = TargetScene::create(ref_scene(1), wf);
  FdOracleConfig cfg;
  cfg.rel_step = 1e-2;
  CHECK_THROWS_AS(fim_oracle_fd(scene, wf, 1e-7, cfg), error);
  cfg.rel_step = 1e-8;
  CHECK_THROWS_AS(fim_oracle_fd(scene, wf, 1e-7, cfg), error);
}

TEST_CASE("sampled envelope reproduces the analytic bounds") {
  const Waveform analytic{ref_chirp()};
  WaveformSpec spec;
  spec.family = WaveformFamily::sampled;
  spec.sample_step = 5e-5 / 4096;
  for (int n = 0; n <= 4096; ++n)
    spec.samples.push_back(analytic.evaluate(n * spec.sample_step));
  spec.duration = 5e-5;
  const Waveform sampled{spec};
  SceneParams params = ref_scene(2);
  const double n0 = 1e-6;
  const TargetScene sa = TargetScene::create(params, analytic);
  const CrlbResult ra = crlb(fisher_blocks(sa, analytic, n0));
  const TargetScene ss = TargetScene::create(params, sampled);
  const CrlbResult rs = crlb(fisher_blocks(ss, sampled, n0));
  CHECK(std::abs(rs.crlb_tau - ra.crlb_tau) / ra.crlb_tau <= 1e-2);
  CHECK(std::abs(rs.crlb_gamma - ra.crlb_gamma) / ra.crlb_gamma <= 1e-2);
}

TEST_CASE("oracle equivalence at unit-test scale") {
  const Waveform wf{ref_chirp()};
  for (int p : {1, 4}) {
    const TargetScene scene = TargetScene::create(ref_scene(p), wf);
    const double n0 = n0_for_snr(scene, wf, 20.0);
    const CrlbResult integral = crlb(fisher_blocks(scene, wf, n0));
    const CrlbResult fd = crlb_from_fim(fim_oracle_fd(scene, wf, n0));
    CHECK(std::abs(fd.crlb_tau - integral.crlb_tau) / integral.crlb_tau <=
          1e-2);
    CHECK(std::abs(fd.crlb_gamma - integral.crlb_gamma) / integral.crlb_gamma <=
          1e-2);
    CHECK(fd.provenance.label() == "finite-difference");
  }
}
