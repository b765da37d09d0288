#ifndef FLOQ_WEIERSTRASS_HPP
#define FLOQ_WEIERSTRASS_HPP

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

namespace floq::elliptic {

using complex = std::complex<double>;

/// Rectangular period lattice P*Z + i*Q*Z, given by the two full periods.
struct Lattice {
    double real_period;            // P, in time units
    double imag_period_magnitude;  // Q = |imaginary period|

    Lattice(double p, double q) : real_period(p), imag_period_magnitude(q) {
        if (!(p > 0.0) || !(q > 0.0)) {
            throw std::invalid_argument("Lattice: both periods must be positive");
        }
    }
};

struct PoleError : std::runtime_error {
    double distance;  // |z - nearest lattice point|
    explicit PoleError(double dist)
        : std::runtime_error("argument within pole guard, distance to lattice point = " +
                             std::to_string(dist)),
          distance(dist) {}
};

/// Weierstrass functions on a rectangular lattice, evaluated through Jacobi
/// theta series in the nome q = exp(-pi Q / P) (DLMF 23.6 conventions,
/// half-periods w1 = P/2 and w3 = iQ/2).  Arguments are reduced into the
/// centered fundamental cell with the quasi-periodicity relations, so the
/// series is only ever summed for |Im(pi z / P)| <= pi Q / (2P), where it
/// converges geometrically.  Construction fails if the series for the
/// lattice constants do not reach the requested tolerance.
class WeierstrassCell {
  public:
    explicit WeierstrassCell(const Lattice& lat, double series_eps = 1e-15);

    const Lattice& lattice() const { return lat_; }
    double g2() const { return g2_; }
    double g3() const { return g3_; }
    double e1() const { return e1_; }
    double e2() const { return e2_; }
    double e3() const { return e3_; }
    double eta1() const { return eta1_; }       // zeta(P/2)
    complex eta3() const { return eta3_; }      // zeta(iQ/2), purely imaginary
    double nome() const { return q_; }

    complex wp(complex z) const;
    complex wp_prime(complex z) const;
    complex sigma(complex z) const;
    complex zeta(complex z) const;

    double wp_real(double x) const { return wp(complex(x, 0.0)).real(); }

    /// Distance from z to the nearest lattice point.
    double pole_distance(complex z) const;

  private:
    struct Reduced {
        complex z;     // representative in the centered cell
        long m, n;     // z_original = z + m*P + n*iQ
    };
    Reduced reduce(complex z) const;

    // theta_1, theta_1', theta_2, theta_2' at argument v, via one shared
    // sin/cos recurrence pass
    struct ThetaSet {
        complex t1, t1p, t2, t2p;
    };
    ThetaSet thetas(complex v) const;

    Lattice lat_;
    double eps_;
    double q_;
    double om1_;                   // P/2
    complex om3_;                  // iQ/2
    static constexpr int kMaxTerms = 48;
    std::array<double, kMaxTerms> c1_, c1p_, c2_, c2p_;  // series coefficients
    double t1p0_, t2z_, t3z_, t4z_;  // theta_1'(0), theta_{2,3,4}(0)
    double e1_, e2_, e3_, g2_, g3_;
    double eta1_;
    complex eta3_;
    double pfac_;                  // (pi t3 t4 / P)^2, prefactor of wp - e1
};

/// Lattice invariants (g2, g3) for the rectangular lattice with full periods
/// (P, iQ).  Series truncation: terms are added until the relative increment
/// falls below series_eps twice in a row (hard failure beyond 48 terms).
std::pair<double, double> lattice_invariants(double real_period, double imag_period_magnitude,
                                             double series_eps = 1e-15);

/// Parameters of the closed-form envelope for the elliptic frequency model
/// omega(t)^2 = omega0^2 - wp(t + shift)/2, with wp(d) = -4 omega0^2.
struct EllipticEnvelopeParams {
    double omega0;
    complex d;        // root of wp(d) + 4 omega0^2 = 0 on the cell-edge skeleton
    complex zeta_d;   // zeta(d)
    complex shift;    // iQ/2: puts t + shift on the line where wp is real and finite
    bool stable_branch;  // true iff d lies on the imaginary axis (|Floquet factor| = 1)
};

/// Locate d with wp(d) = -4 omega0^2.  wp restricted to the boundary of the
/// quarter cell [0,P/2] x [0,Q/2] is a monotone bijection onto the real line,
/// so the target value selects a unique edge: imaginary axis for values below
/// e3 (preferred branch: gives a stable envelope), then the Im = Q/2 edge,
/// the Re = P/2 edge, and the real axis.  omega(t)^2 stays real on the real
/// line for every branch; only the imaginary-axis branch gives |rho| = 1.
EllipticEnvelopeParams solve_d(double omega0, const WeierstrassCell& cell, double tol = 1e-12);

/// Raw envelope sigma(t+s+d)/sigma(t+s) * exp(-t zeta(d)); Wronskian
/// normalization is applied downstream.
complex epsilon_elliptic(double t, const EllipticEnvelopeParams& par, const WeierstrassCell& cell);

/// d/dt log of the raw envelope: zeta(t+s+d) - zeta(t+s) - zeta(d).
complex epsilon_elliptic_dlog(double t, const EllipticEnvelopeParams& par,
                              const WeierstrassCell& cell);

}  // namespace floq::elliptic

#endif
