#include "fockopt/fock_state.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fockopt {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

void prune_into(Amplitudes& out, const Occupation& occ, Complex value) {
  if (std::abs(value) < kPruneThreshold) return;
  out.emplace(occ, value);
}

Amplitudes pruned(Amplitudes amps) {
  Amplitudes out;
  for (auto& [occ, a] : amps) prune_into(out, occ, a);
  return out;
}

void check_same_shape(const FockState& a, const FockState& b) {
  if (a.statistics() != b.statistics() || a.n_modes() != b.n_modes() ||
      a.n_particles() != b.n_particles()) {
    throw ShapeMismatch("states differ in statistics, mode count or particle number");
  }
}

}  // namespace

const char* to_string(Statistics s) {
  return s == Statistics::Boson ? "boson" : "fermion";
}

void validate_occupation(const Occupation& occ, Statistics statistics,
                         int n_modes, int n_particles) {
  if (static_cast<int>(occ.size()) != n_modes) {
    throw ShapeMismatch("occupation vector has " + std::to_string(occ.size()) +
                        " entries, expected " + std::to_string(n_modes));
  }
  int total = 0;
  for (int n : occ) {
    if (n < 0) throw InvalidOccupation("negative occupation number");
    if (statistics == Statistics::Fermion && n > 1) {
      throw InvalidOccupation("fermion occupation numbers must be 0 or 1");
    }
    total += n;
  }
  if (total != n_particles) {
    throw ShapeMismatch("occupation sums to " + std::to_string(total) +
                        ", expected " + std::to_string(n_particles));
  }
}

FockState::FockState(Statistics statistics, int n_modes, int n_particles,
                     Amplitudes amplitudes)
    : statistics_(statistics),
      n_modes_(n_modes),
      n_particles_(n_particles),
      amplitudes_(pruned(std::move(amplitudes))) {
  if (n_modes < 1) throw ShapeMismatch("a state needs at least one mode");
  if (n_particles < 0) throw ShapeMismatch("negative particle number");
  for (const auto& [occ, a] : amplitudes_) {
    validate_occupation(occ, statistics, n_modes, n_particles);
  }
}

FockState FockState::vacuum(Statistics statistics, int n_modes) {
  return FockState(statistics, n_modes, 0, {{Occupation(n_modes, 0), 1.0}});
}

Complex FockState::amplitude(const Occupation& occ) const {
  auto it = amplitudes_.find(occ);
  return it == amplitudes_.end() ? Complex{} : it->second;
}

double FockState::norm() const {
  double s = 0.0;
  for (const auto& [occ, a] : amplitudes_) s += std::norm(a);
  return std::sqrt(s);
}

bool FockState::is_normalized(double tol) const {
  return std::abs(norm() - 1.0) <= tol;
}

FockState FockState::normalized() const {
  const double n = norm();
  if (n < 1e-12) throw ZeroState("state vector vanishes");
  Amplitudes out;
  for (const auto& [occ, a] : amplitudes_) out.emplace(occ, a / n);
  return FockState(statistics_, n_modes_, n_particles_, std::move(out));
}

double unitarity_defect(const Eigen::MatrixXcd& m) {
  const Eigen::MatrixXcd d =
      m.adjoint() * m - Eigen::MatrixXcd::Identity(m.cols(), m.cols());
  return d.cwiseAbs().maxCoeff();
}

ModeUnitary::ModeUnitary(Eigen::MatrixXcd matrix, double tol)
    : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 1) {
    throw ShapeMismatch("mode unitary must be a non-empty square matrix");
  }
  const double defect = unitarity_defect(matrix_);
  if (!(defect <= tol)) {
    throw NotUnitary("matrix deviates from unitarity by " + std::to_string(defect));
  }
}

ModeUnitary ModeUnitary::identity(int dim) {
  return ModeUnitary(Eigen::MatrixXcd::Identity(dim, dim));
}

ModeUnitary ModeUnitary::adjoint() const {
  return ModeUnitary(matrix_.adjoint());
}

ModeUnitary ModeUnitary::then(const ModeUnitary& next) const {
  if (next.dim() != dim()) throw ShapeMismatch("unitary dimensions differ");
  return ModeUnitary(matrix_ * next.matrix_);
}

double sqrt_factorial_product(const Occupation& occ) {
  double p = 1.0;
  for (int n : occ) p *= factorial(n);
  return std::sqrt(p);
}

std::vector<Occupation> enumerate_occupations(int n_particles, int n_modes,
                                              Statistics statistics) {
  std::vector<Occupation> out;
  Occupation current(n_modes, 0);
  const int cap = statistics == Statistics::Fermion ? 1 : n_particles;
  // Depth-first over modes, filling mode 0 with the largest count first and
  // reversing at the end to get ascending lexicographic order.
  auto rec = [&](auto&& self, int mode, int remaining) -> void {
    if (mode == n_modes - 1) {
      if (remaining <= cap) {
        current[mode] = remaining;
        out.push_back(current);
      }
      return;
    }
    for (int k = std::min(remaining, cap); k >= 0; --k) {
      current[mode] = k;
      self(self, mode + 1, remaining - k);
    }
    current[mode] = 0;
  };
  if (n_modes > 0) rec(rec, 0, n_particles);
  std::reverse(out.begin(), out.end());
  return out;
}

FockState make_number_state(const Occupation& counts, Statistics statistics) {
  const int n = std::accumulate(counts.begin(), counts.end(), 0);
  validate_occupation(counts, statistics, static_cast<int>(counts.size()), n);
  return FockState(statistics, static_cast<int>(counts.size()), n, {{counts, 1.0}});
}

FockState superpose(const std::vector<std::pair<Complex, FockState>>& terms) {
  if (terms.empty()) throw ZeroState("empty superposition");
  const FockState& first = terms.front().second;
  Amplitudes sum;
  for (const auto& [w, s] : terms) {
    check_same_shape(first, s);
    for (const auto& [occ, a] : s.amplitudes()) sum[occ] += w * a;
  }
  FockState raw(first.statistics(), first.n_modes(), first.n_particles(),
                std::move(sum));
  return raw.normalized();
}

FockState apply_mode_unitary(const FockState& state, const ModeUnitary& u) {
  const int m = state.n_modes();
  if (u.dim() != m) {
    throw ShapeMismatch("unitary of dimension " + std::to_string(u.dim()) +
                        " applied to a state on " + std::to_string(m) + " modes");
  }
  const bool fermion = state.statistics() == Statistics::Fermion;
  const Eigen::MatrixXcd& mat = u.matrix();

  // Nonzero entries per row; gates embedded in many modes are very sparse.
  std::vector<std::vector<std::pair<int, Complex>>> rows(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (mat(i, j) != Complex{}) rows[i].emplace_back(j, mat(i, j));
    }
  }

  Amplitudes out;
  for (const auto& [occ, amp] : state.amplitudes()) {
    // Partial products are kept as normal-ordered creation strings keyed by
    // their occupation. Multiplying a string on the right by a_j^dag and
    // moving it to its sorted place passes every occupied mode above j.
    Amplitudes partial{{Occupation(m, 0),
                        fermion ? amp : amp / sqrt_factorial_product(occ)}};
    for (int i = 0; i < m; ++i) {
      for (int rep = 0; rep < occ[i]; ++rep) {
        Amplitudes next;
        for (const auto& [p, c] : partial) {
          for (const auto& [j, uij] : rows[i]) {
            Occupation q = p;
            double sign = 1.0;
            if (fermion) {
              if (q[j] == 1) continue;
              int above = 0;
              for (int k = j + 1; k < m; ++k) above += q[k];
              if (above % 2 == 1) sign = -1.0;
            }
            ++q[j];
            next[q] += sign * c * uij;
          }
        }
        partial = std::move(next);
      }
    }
    for (const auto& [p, c] : partial) {
      out[p] += fermion ? c : c * sqrt_factorial_product(p);
    }
  }
  return FockState(state.statistics(), m, state.n_particles(), std::move(out));
}

std::map<Occupation, double> detection_distribution(const FockState& state) {
  std::map<Occupation, double> dist;
  for (const auto& [occ, a] : state.amplitudes()) dist.emplace(occ, std::norm(a));
  return dist;
}

HeraldResult herald(const FockState& state, const std::map<int, int>& required) {
  const int m = state.n_modes();
  int heralded_particles = 0;
  for (const auto& [mode, count] : required) {
    if (mode < 0 || mode >= m) {
      throw ShapeMismatch("herald mode " + std::to_string(mode) + " out of range");
    }
    if (count < 0) throw InvalidParameter("negative herald count");
    heralded_particles += count;
  }
  if (static_cast<int>(required.size()) >= m) {
    throw ShapeMismatch("herald must leave at least one mode unmeasured");
  }
  if (heralded_particles > state.n_particles()) {
    throw ZeroOutcome("herald requires more particles than the state holds");
  }

  const bool fermion = state.statistics() == Statistics::Fermion;
  Amplitudes projected;
  double probability = 0.0;
  for (const auto& [occ, a] : state.amplitudes()) {
    bool match = true;
    for (const auto& [mode, count] : required) {
      if (occ[mode] != count) {
        match = false;
        break;
      }
    }
    if (!match) continue;

    double sign = 1.0;
    if (fermion) {
      // Move each measured creation operator past the unmeasured occupied
      // modes to its right.
      int swaps = 0;
      for (const auto& [mode, count] : required) {
        if (count == 0) continue;
        for (int k = mode + 1; k < m; ++k) {
          if (!required.contains(k)) swaps += occ[k];
        }
      }
      if (swaps % 2 == 1) sign = -1.0;
    }

    Occupation rest;
    rest.reserve(m - required.size());
    for (int k = 0; k < m; ++k) {
      if (!required.contains(k)) rest.push_back(occ[k]);
    }
    projected[rest] += sign * a;
    probability += std::norm(a);
  }
  if (probability < kHeraldCutoff) {
    throw ZeroOutcome("herald success probability below cutoff");
  }
  FockState raw(state.statistics(), m - static_cast<int>(required.size()),
                state.n_particles() - heralded_particles, std::move(projected));
  return {raw.normalized(), probability};
}

FockState embed_modes(const FockState& state, int n_modes) {
  if (n_modes < state.n_modes()) {
    throw ShapeMismatch("cannot embed into fewer modes");
  }
  Amplitudes out;
  for (const auto& [occ, a] : state.amplitudes()) {
    Occupation wide = occ;
    wide.resize(n_modes, 0);
    out.emplace(std::move(wide), a);
  }
  return FockState(state.statistics(), n_modes, state.n_particles(), std::move(out));
}

Complex inner_product(const FockState& a, const FockState& b) {
  check_same_shape(a, b);
  Complex s{};
  for (const auto& [occ, x] : a.amplitudes()) s += std::conj(x) * b.amplitude(occ);
  return s;
}

double fidelity(const FockState& a, const FockState& b) {
  return std::abs(inner_product(a, b)) / (a.norm() * b.norm());
}

}  // namespace fockopt
