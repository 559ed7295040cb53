#include "phasesim/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "phasesim/quadrature.hpp"
#include "phasesim/screen.hpp"

namespace phasesim {

namespace {

constexpr double kPi = 3.14159265358979323846;

Rect intersect(const Rect& a, const Rect& b) {
  Rect r;
  r.x_min = std::max(a.x_min, b.x_min);
  r.x_max = std::min(a.x_max, b.x_max);
  r.z_min = std::max(a.z_min, b.z_min);
  r.z_max = std::min(a.z_max, b.z_max);
  return r;
}

}  // namespace

WavepacketField::WavepacketField(Envelope envelope, PhaseConstant phase, Rect norm_domain,
                                 Rect support_hint)
    : envelope_(std::move(envelope)),
      phase_(phase),
      norm_domain_(norm_domain),
      support_hint_(support_hint) {
  if (norm_domain_.area() <= 0.0) {
    throw std::invalid_argument("WavepacketField: degenerate normalization domain");
  }
  const double norm = integrate_2d(
      [this](double x, double z) { return std::norm(envelope_(x, z)); }, norm_domain_,
      kNormGridX, kNormGridZ);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw std::invalid_argument("WavepacketField: envelope has zero or non-finite norm");
  }
  scale_ = 1.0 / std::sqrt(norm);
}

Complex WavepacketField::amplitude(double x, double z) const {
  return std::polar(1.0, phase_.value()) * scale_ * envelope_(x, z);
}

double WavepacketField::density(double x, double z) const {
  return std::norm(envelope_(x, z)) * scale_ * scale_;
}

WavepacketField WavepacketField::with_phase_constant(PhaseConstant phase) const {
  WavepacketField copy = *this;
  copy.phase_ = phase;
  return copy;
}

Complex Superposition::amplitude(double x, double z) const {
  Complex sum = 0.0;
  for (const Term& term : terms_) {
    sum += term.coefficient * term.packet.amplitude(x, z);
  }
  // Term packets are built with zero phase constant; the shared factor is ours.
  return std::polar(1.0, phase_.value()) * sum;
}

double Superposition::density(double x, double z) const {
  Complex sum = 0.0;
  for (const Term& term : terms_) {
    sum += term.coefficient * term.packet.amplitude(x, z);
  }
  return std::norm(sum);
}

Superposition Superposition::with_phase_constant(PhaseConstant phase) const {
  Superposition copy = *this;
  copy.phase_ = phase;
  return copy;
}

WavepacketField Superposition::as_field() const {
  Superposition self = *this;
  Rect domain = norm_domain_;
  Rect support = norm_domain_;
  // The sum of normalized orthogonal terms with unit coefficient norm is already
  // normalized; the constructor's quadrature only compensates truncation residue.
  return WavepacketField(
      [self](double x, double z) {
        Complex sum = 0.0;
        for (const auto& term : self.terms()) {
          sum += term.coefficient * term.packet.amplitude(x, z);
        }
        return sum;
      },
      phase_, domain, support);
}

Superposition superpose(std::vector<Complex> coefficients,
                        std::vector<WavepacketField> eigenpackets, PhaseConstant alpha,
                        bool allow_overlap) {
  if (coefficients.size() != eigenpackets.size()) {
    throw std::invalid_argument("superpose: coefficient/eigenpacket length mismatch");
  }
  if (coefficients.empty()) {
    throw std::invalid_argument("superpose: empty superposition");
  }
  double norm2 = 0.0;
  for (const Complex& c : coefficients) norm2 += std::norm(c);
  if (norm2 <= 0.0) {
    throw std::invalid_argument("superpose: coefficient vector has zero norm");
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (Complex& c : coefficients) c *= inv;

  if (!allow_overlap) {
    for (std::size_t i = 0; i < eigenpackets.size(); ++i) {
      for (std::size_t j = i + 1; j < eigenpackets.size(); ++j) {
        const Rect& a = eigenpackets[i].support_hint();
        const Rect& b = eigenpackets[j].support_hint();
        if (!a.intersects(b)) continue;
        const Rect common = intersect(a, b);
        if (common.area() <= 0.0) continue;
        const Complex overlap = integrate_2d_complex(
            [&](double x, double z) {
              return std::conj(eigenpackets[i].amplitude(x, z)) * eigenpackets[j].amplitude(x, z);
            },
            common, 256, 64);
        if (std::abs(overlap) >= 1e-3) {
          throw std::invalid_argument(
              "superpose: eigenpackets overlap; flag allow_overlap to accept");
        }
      }
    }
  }

  Superposition result;
  result.phase_ = alpha;
  Rect bounds = eigenpackets.front().support_hint();
  for (std::size_t i = 0; i < eigenpackets.size(); ++i) {
    const Rect& s = eigenpackets[i].support_hint();
    bounds.x_min = std::min(bounds.x_min, s.x_min);
    bounds.x_max = std::max(bounds.x_max, s.x_max);
    bounds.z_min = std::min(bounds.z_min, s.z_min);
    bounds.z_max = std::max(bounds.z_max, s.z_max);
    // The shared constant multiplies the whole sum; terms keep none of their own.
    result.terms_.push_back({coefficients[i], eigenpackets[i].with_phase_constant(PhaseConstant())});
  }
  result.norm_domain_ = bounds;
  return result;
}

Complex project_coefficient(const WavepacketField& eigenpacket, const Superposition& psi) {
  const Rect& a = eigenpacket.norm_domain();
  const Rect& b = psi.norm_domain();
  Rect domain;
  domain.x_min = std::min(a.x_min, b.x_min);
  domain.x_max = std::max(a.x_max, b.x_max);
  domain.z_min = std::min(a.z_min, b.z_min);
  domain.z_max = std::max(a.z_max, b.z_max);
  if (domain.area() <= 0.0) {
    throw std::invalid_argument("project_coefficient: domain mismatch");
  }
  return integrate_2d_complex(
      [&](double x, double z) {
        return std::conj(eigenpacket.amplitude(x, z)) * psi.amplitude(x, z);
      },
      domain, 1024, 128);
}

WavepacketField contract(const Superposition& psi_s, const Cluster& cluster) {
  const double sigma_env = cluster_envelope_sigma(cluster);
  Rect box{cluster.x - 10.0 * sigma_env, cluster.x + 10.0 * sigma_env,
           cluster.z - 10.0 * sigma_env, cluster.z + 10.0 * sigma_env};
  Rect domain = intersect(box, psi_s.norm_domain());
  if (domain.width() <= 0.0 || domain.height() <= 0.0) {
    throw std::domain_error("contract: cluster does not overlap the superposition");
  }
  const double weight2_integral = integrate_2d(
      [&](double x, double z) {
        const double w = cluster_envelope(cluster, x, z);
        return psi_s.density(x, z) * w * w;
      },
      domain, 512, 512);
  if (!(weight2_integral > 1e-300)) {
    throw std::domain_error("contract: zero overlap between superposition and cluster");
  }
  const double inv_norm = 1.0 / std::sqrt(weight2_integral);

  Superposition source = psi_s;  // captured by value; fields are immutable
  const Cluster cl = cluster;
  Rect support{cluster.x - 5.0 * cluster.sigma_cl, cluster.x + 5.0 * cluster.sigma_cl,
               cluster.z - 5.0 * cluster.sigma_cl, cluster.z + 5.0 * cluster.sigma_cl};

  WavepacketField result(
      [source, cl, inv_norm](double x, double z) {
        Complex sum = 0.0;
        for (const auto& term : source.terms()) {
          sum += term.coefficient * term.packet.amplitude(x, z);
        }
        return sum * cluster_envelope(cl, x, z) * inv_norm;
      },
      psi_s.phase_constant(), domain, support);
  // Conservation is exact by construction; the constructor does not touch it.
  return result;
}

WavepacketField gaussian_packet(double center_x, double center_z, double width,
                                double carrier_wavevector, PhaseConstant alpha) {
  if (!(width > 0.0)) {
    throw std::invalid_argument("gaussian_packet: width must be positive");
  }
  const double cx = center_x;
  const double cz = center_z;
  const double k = carrier_wavevector;
  const double inv4s2 = 1.0 / (4.0 * width * width);
  const double prefactor = 1.0 / std::sqrt(kTwoPi * width * width);
  Rect box{cx - 5.0 * width, cx + 5.0 * width, cz - 5.0 * width, cz + 5.0 * width};
  return WavepacketField(
      [cx, cz, k, inv4s2, prefactor](double x, double z) {
        const double dx = x - cx;
        const double dz = z - cz;
        return prefactor * std::exp(-(dx * dx + dz * dz) * inv4s2) *
               std::polar(1.0, k * x);
      },
      alpha, box, box);
}

WavepacketField double_slit_amplitude(double slit_separation, double slit_width,
                                      double wavelength, double screen_distance, Rect window,
                                      PhaseConstant alpha) {
  if (!(slit_separation > 0.0) || !(slit_width > 0.0) || !(wavelength > 0.0) ||
      !(screen_distance > 0.0)) {
    throw std::invalid_argument("double_slit_amplitude: parameters must be positive");
  }
  if (screen_distance < 100.0 * slit_separation) {
    throw std::invalid_argument("double_slit_amplitude: outside the Fraunhofer regime");
  }
  const double fringe_k = kPi * slit_separation / (wavelength * screen_distance);
  const double sinc_k = kPi * slit_width / (wavelength * screen_distance);
  return WavepacketField(
      [fringe_k, sinc_k](double x, double /*z*/) {
        const double u = sinc_k * x;
        const double envelope = u == 0.0 ? 1.0 : std::sin(u) / u;
        return Complex(std::cos(fringe_k * x) * envelope, 0.0);
      },
      alpha, window, window);
}

WavepacketField ring_amplitude(std::function<Complex(double)> angular_amplitude, Rect window,
                               PhaseConstant alpha) {
  if (!angular_amplitude) {
    throw std::invalid_argument("ring_amplitude: missing amplitude function");
  }
  return WavepacketField(
      [f = std::move(angular_amplitude)](double theta, double /*z*/) { return f(theta); }, alpha,
      window, window);
}

}  // namespace phasesim
