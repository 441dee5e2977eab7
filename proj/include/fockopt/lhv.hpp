#pragma once

// Local hidden variable model for single-mode-type states. Each run carries
// an ontic state (alpha, k): a unit amplitude vector and integer counts.
// Gates act only on their own modes; beam splitters rotate the amplitudes
// and redistribute the counts binomially, detectors read the counts.

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fockopt/circuit.hpp"
#include "fockopt/classifier.hpp"

namespace fockopt {

struct OnticState {
  Eigen::VectorXcd alpha;
  std::vector<int> counts;
};

/// Epistemic state of a single-mode-type input: uniform global phase on
/// alpha_psi, multinomial counts with p_i = |alpha_psi_i|^2.
struct EpistemicSpec {
  AlphaVector alpha;
  int n_particles;

  /// Throws InvalidParameter unless |alpha| = 1 within 1e-9 and N >= 0.
  void validate() const;
};

/// SplitMix64 sequence keyed by (seed, stream id). A stream reproduces the
/// same numbers whatever other streams were drawn before it.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  double uniform();  ///< in [0, 1)
  int binomial(int trials, double p);

 private:
  std::uint64_t state_;
};

inline constexpr std::uint64_t kDefaultSeed = 20240917;

/// FOCKOPT_SEED when set and parseable, otherwise kDefaultSeed.
std::uint64_t default_seed();

OnticState sample_epistemic(const EpistemicSpec& spec, RngStream& rng);

/// (alpha_s, alpha_t) -> (alpha_s, alpha_t) V, then k_s + k_t particles are
/// split binomially with p_s = |alpha_s'|^2 / (|alpha_s'|^2 + |alpha_t'|^2).
/// Throws DegenerateAmplitude when both weights vanish (< 1e-30) with
/// particles present.
void lhv_beam_splitter(OnticState& state, int s, int t, const Eigen::Matrix2cd& v,
                       RngStream& rng);
void lhv_phase_shifter(OnticState& state, int s, double phi);
void lhv_swap(OnticState& state, int s, int t);
int lhv_detect(const OnticState& state, int s);

struct ShotResult {
  OnticState final_state;
  std::vector<int> readings;  ///< per mode, -1 where no detector fired
  bool accepted;              ///< every herald matched
};

/// One trajectory through the circuit.
ShotResult simulate_shot(const EpistemicSpec& spec, const Circuit& circuit, RngStream& rng);

/// Readout detectors, or every non-heralded mode when there are none.
std::vector<int> observed_modes(const Circuit& circuit);

struct LhvRun {
  std::vector<int> observed;
  std::map<Occupation, std::int64_t> tallies;  ///< accepted shots by observed counts
  std::int64_t rejected = 0;                   ///< shots failing a herald
  std::int64_t shots = 0;
};

/// Shot i uses RngStream(seed, i).
LhvRun run_lhv_experiment(const EpistemicSpec& spec, const Circuit& circuit,
                          std::int64_t shots, std::uint64_t seed);

/// Exact quantum probabilities of the same buckets: outcomes on the
/// observed modes with every herald met, plus the herald-failure mass.
struct QuantumPrediction {
  std::vector<int> observed;
  std::map<Occupation, double> outcomes;
  double rejected = 0.0;
};
QuantumPrediction quantum_prediction(const EpistemicSpec& spec, const Circuit& circuit);

struct OutcomeRow {
  std::optional<Occupation> outcome;  ///< empty for the herald-failure bucket
  double quantum_prob;
  double lhv_freq;
  double stderr_freq;  ///< sqrt(f (1 - f) / shots)
  double z_score;      ///< (f - q) / sqrt(q (1 - q) / shots)
};

struct LhvReport {
  std::int64_t shots = 0;
  std::uint64_t seed = 0;
  std::vector<int> observed;
  std::vector<OutcomeRow> rows;
  double tv_distance = 0.0;
  double tv_bound = 0.0;  ///< 4 sqrt(K / shots)
  double chi_square = 0.0;
  int dof = 0;
  double chi_square_p = 1.0;
  bool pass = false;  ///< p > 0.001 and tv_distance < tv_bound
};

inline constexpr double kChiSquareAlpha = 1e-3;

/// Buckets with fewer than five expected counts are pooled before the
/// Pearson test; an observed count in a bucket of probability zero fails it.
LhvReport compare_lhv_quantum(const EpistemicSpec& spec, const Circuit& circuit,
                              std::int64_t shots, std::uint64_t seed);

}  // namespace fockopt
