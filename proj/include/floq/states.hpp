#ifndef FLOQ_STATES_HPP
#define FLOQ_STATES_HPP

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "floq/classical.hpp"
#include "floq/quadrature.hpp"

namespace floq::states {

using complex = std::complex<double>;
using classical::ClassicalSolution;

/// Continuous (unwrapped) argument of eps(t).  The Wronskian convention makes
/// d/dt arg eps = 1/(4 gamma), so the branch is tracked by integrating that
/// rate; fractional powers (conj(eps)/eps)^p = e^{-2ip arg_eps} never touch a
/// principal-branch power.
class PhaseTracker {
  public:
    explicit PhaseTracker(const ClassicalSolution& sol, int segments = 512);

    double arg_eps(double t) const { return arg0_ + cum_(t); }
    double winding_over_period() const { return cum_.over_period(); }  // = delta * T

  private:
    double arg0_;
    quad::Cumulative cum_;
};

/// Per-time bundle of envelope quantities shared by state evaluations.
struct StateFrame {
    double t;
    complex eps, eps_dot;
    double gamma, gamma_dot;
    double theta;  // arg_eps(t)
    double s8g;    // sqrt(8 gamma): z = x / s8g

    static StateFrame at(const ClassicalSolution& sol, const PhaseTracker& ph, double t);
};

/// H_0..H_nmax at z by the three-term recursion (out.size() >= nmax+1).
void hermite_ladder(int nmax, double z, std::span<double> out);

/// psi_0..psi_nmax at (x, t); one shared Hermite ladder pass.
std::vector<complex> psi_batch(const StateFrame& f, int nmax, double x);

complex psi(const StateFrame& f, int n, double x);

/// Analytic x-derivative via d_x = 2i(conj(eps') a + eps' a+):
/// psi_n' = i [ conj(eps') sqrt(n) psi_{n-1} + eps' sqrt(n+1) psi_{n+1} ].
complex dx_psi(const StateFrame& f, int n, double x);

/// Analytic second derivative via the squared ladder identity.
complex dxx_psi(const StateFrame& f, int n, double x);

double quasienergy(int n, double delta);                 // (n + 1/2) delta
double quasienergy_mod(double energy, double period);    // representative in [0, 2pi/T)
double g_eigenvalue(int n);                              // (2n + 1)/8

enum class Ladder { lower, raise };
struct LadderResult {
    double coeff;
    int n_out;
};
/// a psi_n = (sqrt(n)/2) psi_{n-1};  a+ psi_n = (sqrt(n+1)/2) psi_{n+1}.
LadderResult ladder_apply(Ladder dir, int n);

/// Differential ladder operators acting on an arbitrary (value, d/dx value)
/// pair: a = eps d_x - i eps' x/2,  a+ = -conj(eps) d_x + i conj(eps') x/2.
complex apply_lowering(const StateFrame& f, complex value, complex dvalue, double x);
complex apply_raising(const StateFrame& f, complex value, complex dvalue, double x);

/// Common interface for all wavefunction evaluators (quasienergy states,
/// transformed states, created states).  dt is a 4th-order finite difference
/// with step h = period * 1e-4 unless overridden.
class WaveFunction {
  public:
    virtual ~WaveFunction() = default;
    virtual complex value(double x, double t) const = 0;
    virtual complex dx(double x, double t) const = 0;
    virtual double quasienergy() const = 0;
    virtual double period() const = 0;

    /// Default: 4th-order finite difference of the analytic dx.
    virtual complex dxx(double x, double t) const {
        const double h = 1e-5;
        return (dx(x - 2 * h, t) - 8.0 * dx(x - h, t) + 8.0 * dx(x + h, t) -
                dx(x + 2 * h, t)) /
               (12.0 * h);
    }

    complex dt(double x, double t) const {
        const double h = period() * 1e-4;
        return (value(x, t - 2 * h) - 8.0 * value(x, t - h) + 8.0 * value(x, t + h) -
                value(x, t + 2 * h)) /
               (12.0 * h);
    }
};

/// Quasienergy eigenstate psi_n of h0 = -d_x^2 + omega^2(t) x^2.
class PsiState final : public WaveFunction {
  public:
    PsiState(ClassicalSolution sol, std::shared_ptr<const PhaseTracker> ph, int n);

    complex value(double x, double t) const override;
    complex dx(double x, double t) const override;
    complex dxx(double x, double t) const override;
    double quasienergy() const override;
    double period() const override { return sol_.period(); }

    int level() const { return n_; }
    const ClassicalSolution& solution() const { return sol_; }
    const PhaseTracker& tracker() const { return *ph_; }
    StateFrame frame(double t) const { return StateFrame::at(sol_, *ph_, t); }

  private:
    ClassicalSolution sol_;
    std::shared_ptr<const PhaseTracker> ph_;
    int n_;
};

/// L2 norm of f(., t) by composite Gauss-Legendre on [-xmax, xmax].
double norm_l2(const WaveFunction& f, double t, double xmax, int panels = 24);

/// <f|g>(t) by composite Gauss-Legendre.
complex inner_product(const WaveFunction& f, const WaveFunction& g, double t, double xmax,
                      int panels = 24);

/// Default quadrature half-width: z_max = sqrt(2 (nmax + 40)) in scaled units,
/// converted by the largest sqrt(8 gamma) over a period.
double default_xmax(const ClassicalSolution& sol, int nmax);

}  // namespace floq::states

#endif
