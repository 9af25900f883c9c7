#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "kteka/core.hpp"

namespace kteka {

/// Cylinder (label 0), Bell (1) and Funnel (2) generator on t = 1..length.
struct CbfSpec {
  std::size_t per_class = 100;
  std::size_t length = 128;
  std::uint64_t seed = 0;
  bool noise_free = false;  ///< force eta = 0 and epsilon = 0

  void validate() const;
};

/// Draws behind one generated instance; the support is [a, b] (1-based).
struct CbfEvent {
  int label;
  int a;
  int b;
  double eta;
};

struct CbfSample {
  LabeledDataset data;
  std::vector<CbfEvent> events;
};

/// Instances are laid out class by class; instance i of class c is drawn
/// from its own generator seeded by (seed, c, i).
CbfSample gen_cbf_detailed(const CbfSpec& spec);
LabeledDataset gen_cbf(const CbfSpec& spec);

/// Noisy 2-D periodic signal with a comb of amplitude spikes.
struct RosetteSpec {
  std::size_t n_instances = 8;
  double f0 = 20.0;            ///< Hz
  double amplitude = 1.0;      ///< A0
  double sample_rate = 1000.0; ///< Hz
  double duration = 0.0;       ///< seconds; 0 selects two periods, 2/f0
  double snr_db = 0.0;
  std::uint64_t seed = 0;
  bool no_perturbation = false;  ///< a_k = b_k = w_k = phi_k = 0
  bool no_comb = false;          ///< B_k = 0

  void validate() const;
  std::size_t samples() const;
};

struct RosetteSet {
  std::vector<TimeSeries> clean;
  std::vector<TimeSeries> noisy;
};

/// Clean instances are centered and scaled to unit variance per channel.
/// Independent white Gaussian noise is added per channel and scaled so each
/// channel's signal-to-noise energy ratio equals snr_db exactly.
RosetteSet gen_rosette(const RosetteSpec& spec);

}  // namespace kteka
