#pragma once

#include "qheat/bath.hpp"
#include "qheat/operators.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace qheat::heom {

struct HeomConfig {
  int n_matsubara = 6;  // retained Matsubara terms per bath (N_k)
  int depth = 4;        // hierarchy tier cap (N_C)
  bool terminator = true;
  double rtol = 1e-9;   // propagation tolerances
  double atol = 1e-12;
  double steady_tol = 1e-11;          // linear-solver residual target
  std::size_t direct_limit = 140000;  // unknowns handled by sparse LU
  std::size_t memory_budget_mb = 6144;
};

// Triangularly truncated multi-index lattice with per-slot neighbor tables
// and the scaled-HEOM coupling coefficients.
class Hierarchy {
 public:
  Hierarchy(Mat h_sys, std::vector<Mat> couplings,
            std::vector<bath::ExponentialSeries> series, const HeomConfig& cfg);

  int sys_dim() const { return d_; }
  int n_ado() const { return n_ado_; }
  int n_slots() const { return n_slots_; }
  int depth() const { return depth_; }
  int n_baths() const { return static_cast<int>(couplings_.size()); }
  const HeomConfig& config() const { return cfg_; }
  std::size_t state_size() const { return static_cast<std::size_t>(n_ado_) * dd_; }

  // out = L(in) over the full hierarchy state (ado-major, column-stacked blocks)
  void apply(const cplx* in, cplx* out) const;

  // dense block of the physical density operator
  Mat physical(const std::vector<cplx>& state) const;
  std::vector<cplx> initial_state(const Mat& rho0) const;

  // exact heat current from the tier-1 ADOs of bath j (plus the Markovian
  // terminator correction when enabled)
  double current(const std::vector<cplx>& state, int bath_index) const;

  // assembled sparse triplets of the generator (direct solver / tests)
  struct Triplet {
    int row, col;
    cplx value;
  };
  std::vector<Triplet> assemble() const;
  // streams the same triplets without materialising them
  void visit_triplets(const std::function<void(int, int, cplx)>& emit) const;

  const Mat& h_sys() const { return h_; }
  const Mat& coupling(int b) const { return couplings_[b]; }
  double markovian_tail(int b) const { return tail_[b]; }

 private:
  struct Nz {
    int row, col;
    cplx v;
  };

  void accum_left_(cplx* o, cplx coeff, const std::vector<Nz>& nz, const cplx* a) const;
  void accum_right_(cplx* o, cplx coeff, const cplx* a, const std::vector<Nz>& nz) const;

  HeomConfig cfg_;
  int d_, dd_;
  Mat h_;
  std::vector<Mat> couplings_;
  std::vector<double> tail_;  // per-bath residual Matsubara sum (terminator)
  int depth_;

  std::vector<Nz> h_nz_;
  std::vector<std::vector<Nz>> s_nz_, ss_nz_;  // S_b and S_b^2 nonzeros

  struct Slot {
    int bath;
    cplx c;
    double nu;
    double sqrt_abs_c;
  };
  std::vector<Slot> slots_;
  int n_slots_ = 0;

  int n_ado_ = 0;
  std::vector<std::uint8_t> multi_;  // n_ado x n_slots occupations
  std::vector<std::int32_t> up_, down_;
  std::vector<double> decay_;
};

std::size_t lattice_size(int n_slots, int depth);

struct SteadyResult {
  std::vector<cplx> state;
  Mat rho;             // physical block, hermitised, trace 1
  double residual;     // ||L state||_2 after normalisation
  std::string method;  // "sparse-lu" or "bicgstab"
  int iterations = 0;
};

SteadyResult steady_state(const Hierarchy& h);

struct DynamicsResult {
  std::vector<double> times;
  std::vector<Mat> states;  // physical block at each output time
  double max_trace_drift = 0.0;
  double max_herm_drift = 0.0;
  long steps = 0;
};

DynamicsResult propagate(const Hierarchy& h, const Mat& rho0,
                         const std::vector<double>& t_grid);

struct ConvergenceEntry {
  std::string which;  // "base", "n_matsubara+2", "depth+2"
  int n_matsubara;
  int depth;
  double value;
  double rel_change;  // vs base
};

struct ConvergenceReport {
  std::vector<ConvergenceEntry> entries;
  double max_rel_change = 0.0;
  bool converged = false;
};

// Runs `observable` at the base configuration and at (N_k+2, N_C),
// (N_k, N_C+2); converged when the largest relative change is below tol.
ConvergenceReport convergence_sweep(
    const std::function<double(const HeomConfig&)>& observable, HeomConfig base,
    double tol = 1e-3);

}  // namespace qheat::heom
