#ifndef FLOQ_CLASSICAL_HPP
#define FLOQ_CLASSICAL_HPP

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <memory>
#include <variant>

#include "floq/weierstrass.hpp"

namespace floq::classical {

using complex = std::complex<double>;
using Monodromy = Eigen::Matrix2d;

enum class Stability { stable, unstable, mixed };

/// Periodic frequency model omega^2(t) for the envelope equation
/// eps'' + 4 omega^2(t) eps = 0.
class FrequencyModel {
  public:
    struct Constant {
        double omega0;
        double period;
    };
    struct Elliptic {
        elliptic::EllipticEnvelopeParams params;
        std::shared_ptr<const elliptic::WeierstrassCell> cell;
    };
    struct User {
        std::function<double(double)> omega_sq;
        double period;
    };

    static FrequencyModel constant(double omega0, double period);
    /// omega(t)^2 = omega0^2 - wp(t + iQ/2)/2 on the given lattice.
    static FrequencyModel elliptic_model(double omega0, const elliptic::Lattice& lat);
    static FrequencyModel user(std::function<double(double)> omega_sq, double period);

    double omega_sq(double t) const;
    double period() const;

    const Constant* as_constant() const { return std::get_if<Constant>(&v_); }
    const Elliptic* as_elliptic() const { return std::get_if<Elliptic>(&v_); }
    const User* as_user() const { return std::get_if<User>(&v_); }

  private:
    std::variant<Constant, Elliptic, User> v_;
};

/// Monodromy of the real fundamental system (y, y') over one period.
Monodromy integrate_classical(const FrequencyModel& model, double tol = 1e-12);

/// |tr| < 2 stable, |tr| > 2 unstable, within 1e-9 of 2: mixed (boundary).
Stability classify_stability(const Monodromy& m);

struct FloquetExponent {
    double delta;     // principal value in (0, pi/T]
    bool degenerate;  // monodromy is (numerically) the identity
};

/// Principal Floquet exponent from a stable monodromy: the eigenvalue pair is
/// e^{+-i delta T} and the representative with e^{i delta T} in the upper
/// half-plane is returned.  Throws std::domain_error if unstable.
FloquetExponent floquet_exponent(const Monodromy& m, double period);

/// Normalized classical envelope.  The Wronskian convention
/// eps' conj(eps) - eps conj(eps)' = i/2 fixes |eps| and the orientation; it
/// implies d/dt arg(eps) = 1/(4 gamma) > 0, so the winding rate
/// delta = (1/T) int_0^T dt/(4 gamma) is positive and satisfies
/// eps(t+T) = eps(t) e^{i delta T} exactly.  Note delta may exceed pi/T; the
/// principal monodromy representative is exposed separately.
class ClassicalSolution {
  public:
    complex eps(double t) const;
    complex eps_dot(double t) const;
    double gamma(double t) const;
    double gamma_dot(double t) const;
    /// gamma'' = 2|eps'|^2 - 8 omega^2 gamma (uses the envelope equation; no
    /// finite differencing).
    double gamma_ddot(double t) const;
    double omega_sq(double t) const;

    double period() const;
    double delta() const;            // winding representative, in (0, 2pi/T)
    double delta_principal() const;  // from the monodromy, in (0, pi/T]
    Stability stability() const;
    const Monodromy& monodromy() const;
    const FrequencyModel& model() const;

    struct Impl;
    explicit ClassicalSolution(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  private:
    std::shared_ptr<const Impl> impl_;
};

/// Scale/conjugation bringing a raw complex envelope to Wronskian i/2.
struct WronskianNorm {
    double scale;
    bool conjugated;
};

/// From raw values at one time; throws std::invalid_argument when the raw
/// Wronskian is not purely imaginary or vanishes (real-proportional pair).
WronskianNorm normalize_wronskian(complex eps_raw, complex eps_dot_raw);

/// Build the normalized solution for a model.  Constant and elliptic models
/// use closed forms; user models are integrated (adaptive RK, dense
/// checkpoint tables).  Throws std::domain_error for unstable/mixed models.
ClassicalSolution make_classical_solution(const FrequencyModel& model, double tol = 1e-12);

}  // namespace floq::classical

#endif
