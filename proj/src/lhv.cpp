#include "fockopt/lhv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

#include <boost/math/special_functions/gamma.hpp>

namespace fockopt {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace

void EpistemicSpec::validate() const {
  if (n_particles < 0) throw InvalidParameter("negative particle number");
  if (alpha.size() < 1 || std::abs(alpha.norm() - 1.0) > 1e-9) {
    throw InvalidParameter("epistemic alpha must be a unit vector");
  }
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : state_(mix64(seed + kGolden) ^ mix64(stream_id * kGolden + 0x632be59bd9b4e019ULL)) {}

RngStream::result_type RngStream::operator()() {
  state_ += kGolden;
  return mix64(state_);
}

double RngStream::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

int RngStream::binomial(int trials, double p) {
  if (trials <= 0) return 0;
  p = std::clamp(p, 0.0, 1.0);
  if (p == 0.0) return 0;
  if (p == 1.0) return trials;
  return std::binomial_distribution<int>(trials, p)(*this);
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("FOCKOPT_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 0);
    if (end != env && *end == '\0') return v;
  }
  return kDefaultSeed;
}

OnticState sample_epistemic(const EpistemicSpec& spec, RngStream& rng) {
  spec.validate();
  const double phase = 2.0 * std::numbers::pi * rng.uniform();
  OnticState s{std::polar(1.0, phase) * spec.alpha, std::vector<int>(spec.alpha.size(), 0)};
  int remaining = spec.n_particles;
  double mass = 1.0;
  for (Eigen::Index i = 0; i < spec.alpha.size() && remaining > 0; ++i) {
    const double p = std::norm(spec.alpha(i));
    const bool last = i + 1 == spec.alpha.size();
    const int k = last ? remaining : rng.binomial(remaining, mass > 0.0 ? p / mass : 0.0);
    s.counts[i] = k;
    remaining -= k;
    mass -= p;
  }
  return s;
}

void lhv_beam_splitter(OnticState& state, int s, int t, const Eigen::Matrix2cd& v,
                       RngStream& rng) {
  if (s == t) throw InvalidParameter("beam splitter needs two distinct modes");
  const Complex as = state.alpha(s);
  const Complex at = state.alpha(t);
  state.alpha(s) = as * v(0, 0) + at * v(1, 0);
  state.alpha(t) = as * v(0, 1) + at * v(1, 1);
  const int k = state.counts[s] + state.counts[t];
  const double ws = std::norm(state.alpha(s));
  const double w = ws + std::norm(state.alpha(t));
  if (k == 0) return;
  if (w < 1e-30) {
    throw DegenerateAmplitude("beam splitter on modes " + std::to_string(s + 1) + ", " +
                              std::to_string(t + 1) + " has particles but no amplitude");
  }
  state.counts[s] = rng.binomial(k, ws / w);
  state.counts[t] = k - state.counts[s];
}

void lhv_phase_shifter(OnticState& state, int s, double phi) {
  state.alpha(s) *= std::polar(1.0, phi);
}

void lhv_swap(OnticState& state, int s, int t) {
  std::swap(state.alpha(s), state.alpha(t));
  std::swap(state.counts[s], state.counts[t]);
}

int lhv_detect(const OnticState& state, int s) { return state.counts.at(s); }

ShotResult simulate_shot(const EpistemicSpec& spec, const Circuit& circuit, RngStream& rng) {
  if (spec.alpha.size() != circuit.n_modes()) {
    throw ShapeMismatch("epistemic alpha and circuit differ in mode count");
  }
  ShotResult r{sample_epistemic(spec, rng), std::vector<int>(circuit.n_modes(), -1), true};
  for (const auto& e : circuit.elements()) {
    if (const auto* bs = std::get_if<BeamSplitter>(&e)) {
      lhv_beam_splitter(r.final_state, bs->s, bs->t, bs->matrix, rng);
    } else if (const auto* ps = std::get_if<PhaseShifter>(&e)) {
      lhv_phase_shifter(r.final_state, ps->mode, ps->phi);
    } else if (const auto* sw = std::get_if<Swap>(&e)) {
      lhv_swap(r.final_state, sw->s, sw->t);
    } else {
      const auto& d = std::get<Detector>(e);
      const int k = lhv_detect(r.final_state, d.mode);
      r.readings[d.mode] = k;
      if (d.herald && *d.herald != k) r.accepted = false;
    }
  }
  return r;
}

std::vector<int> observed_modes(const Circuit& circuit) {
  auto modes = circuit.readout_modes();
  if (!modes.empty()) return modes;
  modes = circuit.outputs();
  std::sort(modes.begin(), modes.end());
  return modes;
}

LhvRun run_lhv_experiment(const EpistemicSpec& spec, const Circuit& circuit,
                          std::int64_t shots, std::uint64_t seed) {
  spec.validate();
  if (shots < 1) throw InvalidParameter("shots must be positive");
  LhvRun run;
  run.observed = observed_modes(circuit);
  run.shots = shots;
  Occupation outcome(run.observed.size());
  for (std::int64_t i = 0; i < shots; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    const ShotResult r = simulate_shot(spec, circuit, rng);
    if (!r.accepted) {
      ++run.rejected;
      continue;
    }
    for (std::size_t k = 0; k < run.observed.size(); ++k) {
      outcome[k] = r.final_state.counts[run.observed[k]];
    }
    ++run.tallies[outcome];
  }
  return run;
}

QuantumPrediction quantum_prediction(const EpistemicSpec& spec, const Circuit& circuit) {
  spec.validate();
  if (spec.alpha.size() != circuit.n_modes()) {
    throw ShapeMismatch("epistemic alpha and circuit differ in mode count");
  }
  const FockState evolved = apply_mode_unitary(single_mode_state(spec.alpha, spec.n_particles),
                                               deferred_unitary(circuit));
  QuantumPrediction q;
  q.observed = observed_modes(circuit);
  const auto heralds = circuit.heralds();
  Occupation outcome(q.observed.size());
  for (const auto& [occ, p] : detection_distribution(evolved)) {
    bool accepted = true;
    for (const auto& [mode, count] : heralds) accepted = accepted && occ[mode] == count;
    if (!accepted) {
      q.rejected += p;
      continue;
    }
    for (std::size_t k = 0; k < q.observed.size(); ++k) outcome[k] = occ[q.observed[k]];
    q.outcomes[outcome] += p;
  }
  return q;
}

LhvReport compare_lhv_quantum(const EpistemicSpec& spec, const Circuit& circuit,
                              std::int64_t shots, std::uint64_t seed) {
  const QuantumPrediction q = quantum_prediction(spec, circuit);
  const LhvRun run = run_lhv_experiment(spec, circuit, shots, seed);

  LhvReport rep;
  rep.shots = shots;
  rep.seed = seed;
  rep.observed = q.observed;

  struct Bucket {
    std::optional<Occupation> outcome;
    double prob;
    std::int64_t count;
  };
  std::vector<Bucket> buckets;
  for (const auto& [occ, p] : q.outcomes) buckets.push_back({occ, p, 0});
  for (const auto& [occ, c] : run.tallies) {
    if (!q.outcomes.contains(occ)) buckets.push_back({occ, 0.0, 0});
  }
  std::sort(buckets.begin(), buckets.end(),
            [](const Bucket& a, const Bucket& b) { return *a.outcome < *b.outcome; });
  for (auto& b : buckets) {
    auto it = run.tallies.find(*b.outcome);
    if (it != run.tallies.end()) b.count = it->second;
  }
  if (q.rejected > 0.0 || run.rejected > 0) {
    buckets.push_back({std::nullopt, q.rejected, run.rejected});
  }

  const double n = static_cast<double>(shots);
  int support = 0;
  bool impossible_seen = false;
  for (const auto& b : buckets) {
    const double f = b.count / n;
    // Probabilities within rounding of 0 or 1 are deterministic buckets.
    const double var = b.prob * (1.0 - b.prob);
    double z = 0.0;
    if (var > 1e-12) {
      z = (f - b.prob) / std::sqrt(var / n);
    } else if (std::abs(f - b.prob) > 1e-12) {
      z = std::numeric_limits<double>::infinity();
    }
    rep.rows.push_back({b.outcome, b.prob, f, std::sqrt(f * (1.0 - f) / n), z});
    rep.tv_distance += 0.5 * std::abs(f - b.prob);
    if (b.prob > 0.0) ++support;
    if (b.prob <= 0.0 && b.count > 0) impossible_seen = true;
  }
  rep.tv_bound = 4.0 * std::sqrt(std::max(support, 1) / n);

  // Pearson test with sparse buckets pooled.
  std::vector<std::pair<double, double>> cells;  // expected, observed
  double pooled_e = 0.0;
  double pooled_o = 0.0;
  for (const auto& b : buckets) {
    if (b.prob <= 0.0) continue;
    const double e = b.prob * n;
    if (e < 5.0) {
      pooled_e += e;
      pooled_o += static_cast<double>(b.count);
    } else {
      cells.emplace_back(e, static_cast<double>(b.count));
    }
  }
  if (pooled_e > 0.0) {
    if (pooled_e < 5.0 && !cells.empty()) {
      auto smallest = std::min_element(cells.begin(), cells.end());
      smallest->first += pooled_e;
      smallest->second += pooled_o;
    } else {
      cells.emplace_back(pooled_e, pooled_o);
    }
  }
  for (const auto& [e, o] : cells) rep.chi_square += (o - e) * (o - e) / e;
  rep.dof = std::max(static_cast<int>(cells.size()) - 1, 0);
  if (impossible_seen) {
    rep.chi_square_p = 0.0;
  } else if (rep.dof == 0) {
    rep.chi_square_p = 1.0;
  } else {
    rep.chi_square_p = boost::math::gamma_q(rep.dof / 2.0, rep.chi_square / 2.0);
  }
  rep.pass = rep.chi_square_p > kChiSquareAlpha && rep.tv_distance < rep.tv_bound;
  return rep;
}

}  // namespace fockopt
