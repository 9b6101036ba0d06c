#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "qfc/core/dispersion.hpp"
#include "qfc/core/greens.hpp"
#include "qfc/sim/pump.hpp"

namespace qfc {

// Bragg-scattering conversion section in the two-band envelope model: the
// input band a and output band b couple through the undepleted pump product
// M(t) = P(t) conj(Q(t)):
//   da/dz = i k_a a + i kappa conj(M) b,   db/dz = i k_b b + i kappa M a.
// Walk-off and band dispersion are measured in the pump frame, and the time
// origin of each band is placed at the middle of the section.
struct BsfwmSpec {
  PumpEnvelope pump_p;
  PumpEnvelope pump_q;
  double shift = 0.0;            // rad/s, omega_out - omega_in carried by the pump product
  double coupling = 0.0;         // rad/m per unit pump product
  double active_length_m = 0.0;
  DispersionSpec band_dispersion_in;   // total over the section, spread uniformly along z
  DispersionSpec band_dispersion_out;
  double walkoff_in = 0.0;       // ps/m, input band relative to the pump frame
  double walkoff_out = 0.0;      // ps/m, output band relative to the pump frame
  std::vector<double> coupling_profile;  // relative kappa(z) at uniform nodes; empty = uniform
};

// Passive input section -> conversion -> passive output section.
struct ConverterChain {
  DispersionSpec pre;
  BsfwmSpec active;
  DispersionSpec post;
};

// Converted block (out <- in) plus, when requested, the unconverted block (in <- in).
struct ConverterGreens {
  GreensFunction converted;
  std::optional<GreensFunction> through;

  double unitarity_defect() const;
};

struct SimOptions {
  bool include_through = true;
  std::size_t threads = 0;
  std::size_t min_quadrature_nodes = 401;
};

enum class SimModel { kClosedForm, kBorn, kSplitStep };

// Relative kappa at z in [0, L] (linear interpolation over the profile nodes).
double coupling_at(const BsfwmSpec& spec, double z);
// integral of the relative kappa over the section, in metres.
double effective_length(const BsfwmSpec& spec);

// Closed-form first-order model for a dispersion-free, walk-off-free section:
//   G = i kappa L_eff (2 pi)^(-1/2) M~(omega_out - omega_in - shift).
ConverterGreens gaussian_pump_greens(const BsfwmSpec& spec, const FrequencyGrid& in_grid,
                                     const FrequencyGrid& out_grid, const SimOptions& opts = {});

// First-order interaction integral evaluated by composite Simpson quadrature
// over z, including walk-off and band dispersion.
ConverterGreens born_oracle_greens(const BsfwmSpec& spec, const FrequencyGrid& in_grid,
                                   const FrequencyGrid& out_grid, const SimOptions& opts = {});

// Symmetric split-step propagation of every input basis vector; exactly
// unitary per step. Grids must share spacing and count.
ConverterGreens split_step_greens(const BsfwmSpec& spec, const FrequencyGrid& in_grid,
                                  const FrequencyGrid& out_grid, double dz_m,
                                  const SimOptions& opts = {});

// Propagates one pair of band spectra (unitary normalisation: plain sample
// amplitudes) and optionally reports the state after every step.
struct BandState {
  Eigen::VectorXcd a;
  Eigen::VectorXcd b;
};
using StepObserver = std::function<void(std::size_t step, const BandState& state)>;
BandState split_step_propagate(const BsfwmSpec& spec, const FrequencyGrid& in_grid,
                               const FrequencyGrid& out_grid, double dz_m, BandState initial,
                               const StepObserver& observer = {});

// diag(exp(i phi_post)) * G_active * diag(exp(i phi_pre)).
ConverterGreens chain_greens(const ConverterChain& chain, const FrequencyGrid& in_grid,
                             const FrequencyGrid& out_grid, SimModel model, double dz_m = 0.0,
                             const SimOptions& opts = {});
// Same composition applied to an already computed active section.
ConverterGreens compose_chain(const ConverterChain& chain, ConverterGreens active);

}  // namespace qfc
