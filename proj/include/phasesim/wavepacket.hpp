#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "phasesim/geometry.hpp"
#include "phasesim/phases.hpp"

namespace phasesim {

struct Cluster;

using Complex = std::complex<double>;

/// Complex amplitude over the screen surface at the (frozen) arrival time,
/// carrying its absolute phase constant. The amplitude is normalized so that
/// the density integrates to 1 over norm_domain.
class WavepacketField {
 public:
  using Envelope = std::function<Complex(double x, double z)>;

  /// Wraps `envelope` and rescales it so the density integrates to 1 over
  /// norm_domain (composite midpoint quadrature, see kNormGrid*).
  WavepacketField(Envelope envelope, PhaseConstant phase, Rect norm_domain, Rect support_hint);

  /// Full amplitude including the phase factor exp(i*alpha).
  Complex amplitude(double x, double z) const;

  /// |amplitude|^2; independent of the phase constant.
  double density(double x, double z) const;

  PhaseConstant phase_constant() const { return phase_; }
  const Rect& norm_domain() const { return norm_domain_; }
  const Rect& support_hint() const { return support_hint_; }

  /// Same field with a different absolute phase constant.
  WavepacketField with_phase_constant(PhaseConstant phase) const;

  static constexpr int kNormGridX = 1536;
  static constexpr int kNormGridZ = 192;

 private:
  WavepacketField() = default;

  Envelope envelope_;   // normalized, phase factor excluded
  double scale_ = 1.0;  // normalization applied on top of envelope_
  PhaseConstant phase_;
  Rect norm_domain_;
  Rect support_hint_;
};

/// Superposition of spatially separated eigenpackets sharing one phase constant.
/// The terms' own phase constants are not applied; the shared constant multiplies
/// the whole sum.
class Superposition {
 public:
  struct Term {
    Complex coefficient;
    WavepacketField packet;
  };

  Complex amplitude(double x, double z) const;
  double density(double x, double z) const;

  PhaseConstant phase_constant() const { return phase_; }
  Superposition with_phase_constant(PhaseConstant phase) const;

  const std::vector<Term>& terms() const { return terms_; }
  const Rect& norm_domain() const { return norm_domain_; }

  /// View of this superposition as a single field (shares the phase constant).
  WavepacketField as_field() const;

 private:
  friend Superposition superpose(std::vector<Complex> coefficients,
                                 std::vector<WavepacketField> eigenpackets, PhaseConstant alpha,
                                 bool allow_overlap);
  std::vector<Term> terms_;
  PhaseConstant phase_;
  Rect norm_domain_;
};

/// Builds a normalized superposition sum_n c_n psi_n with shared phase constant.
/// Coefficients are rescaled to unit square-sum. Eigenpackets must be pairwise
/// spatially separated (overlap integral below 1e-3) unless allow_overlap is set.
/// Throws std::invalid_argument on length mismatch, zero coefficient norm, or
/// excessive overlap.
Superposition superpose(std::vector<Complex> coefficients,
                        std::vector<WavepacketField> eigenpackets, PhaseConstant alpha,
                        bool allow_overlap = false);

/// Coefficient recovery c_n = (psi_n, psi_s) by quadrature over the common domain.
Complex project_coefficient(const WavepacketField& eigenpacket, const Superposition& psi);

/// Contraction of the superposition at a cluster: the normalized piece of psi_s
/// cut out by the cluster envelope. The phase constant is conserved exactly.
/// Throws std::domain_error when the overlap with the cluster is zero.
WavepacketField contract(const Superposition& psi_s, const Cluster& cluster);

/// Normalized 2-D Gaussian envelope (density exp(-r^2/(2 sigma^2))) with a plane
/// wave carrier along x. Support hint and normalization domain are center +- 5 sigma.
WavepacketField gaussian_packet(double center_x, double center_z, double width,
                                double carrier_wavevector, PhaseConstant alpha = PhaseConstant());

/// Far-field two-slit amplitude on a screen window: cosine fringe factor times the
/// single-slit sinc envelope, uniform across z, normalized over the window.
/// Requires the Fraunhofer regime screen_distance >= 100 * slit_separation.
WavepacketField double_slit_amplitude(double slit_separation, double slit_width,
                                      double wavelength, double screen_distance, Rect window,
                                      PhaseConstant alpha = PhaseConstant());

/// 1-D angular amplitude f(theta) embedded on a ring strip: x plays the role of the
/// polar angle, the z extent is a dummy uniform direction. Normalized over the window.
WavepacketField ring_amplitude(std::function<Complex(double)> angular_amplitude, Rect window,
                               PhaseConstant alpha = PhaseConstant());

}  // namespace phasesim
