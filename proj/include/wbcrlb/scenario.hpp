#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wbcrlb/estimators.hpp"
#include "wbcrlb/scene.hpp"
#include "wbcrlb/types.hpp"
#include "wbcrlb/waveform.hpp"

namespace wbcrlb {

// What a scenario computes. Sweep kinds vary one generator parameter and
// report effective waveform parameters next to the bounds.
enum class ScenarioKind {
  mse,              // Monte Carlo MSEs of both estimators vs CRLBs
  crlb_snr,         // integral CRLBs over the SNR list
  k_sweep,          // truncated-series CRLBs and gaps per K
  p_sweep,          // integral CRLBs per scatterer count
  chirp_rate_sweep, // chirp rate varies, duration fixed
  duration_sweep,   // duration varies at fixed rate * T^2
  amplitude_sweep   // amplitude varies at fixed noise density
};

struct SweepSpec {
  int points = 9;
  double from = 0.0;
  double to = 0.0;
  double rate_times_t2 = 0.0;  // duration sweep: a*T^2 held at this value
};

struct ScenarioConfig {
  std::string name;
  std::string description;
  ScenarioKind kind = ScenarioKind::crlb_snr;
  WaveformSpec waveform;
  SceneParams scene;
  std::optional<int> sample_count;
  std::vector<double> snr_db;
  int trials = 100;
  std::uint64_t seed = 20250810;
  int threads = 1;
  std::vector<Method> methods = {Method::oracle_mf, Method::wbaf};
  std::vector<int> series_k;
  std::vector<int> p_list;
  SweepSpec sweep;
  bool dump_echo = false;
  EstimatorConfig estimator;
};

// Strict parse: unknown keys are errors carrying the offending key path.
ScenarioConfig parse_scenario(const std::string& json_text,
                              const std::string& source_name);
std::vector<ScenarioConfig> parse_config_file(const std::string& path);

// Built-in catalog reproducing the published curves; stable order.
const std::vector<ScenarioConfig>& scenario_catalog();
std::optional<ScenarioConfig> find_scenario(const std::string& name);

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<int> trials;
};

struct RunResult {
  std::vector<std::string> outputs;  // file names inside out_dir
  std::string manifest;              // manifest file name
};

// Executes scenarios sequentially, writing CSV artifacts plus a manifest
// into out_dir. Reruns with identical configuration and seed reproduce the
// files byte for byte.
RunResult run_scenarios(const std::vector<ScenarioConfig>& scenarios,
                        const std::string& out_dir,
                        const RunOverrides& overrides = {},
                        std::ostream* log = nullptr);

// Formats a double so the emitted CSVs are reproducible and lossless.
std::string format_number(double v);

std::string kind_name(ScenarioKind kind);

}  // namespace wbcrlb
