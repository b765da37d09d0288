#ifndef FLOQ_VERIFY_HPP
#define FLOQ_VERIFY_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "floq/states.hpp"

namespace floq::verify {

using complex = std::complex<double>;
using classical::ClassicalSolution;
using states::WaveFunction;
using Potential = std::function<double(double, double)>;
/// Whole-row evaluation V(xs, t): hoists per-time work out of the x loop.
using PotentialRows = std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)>;

PotentialRows rows_from_pointwise(Potential v);

/// Symmetric x-grid with Dirichlet truncation.  nx odd so x = 0 is a node.
struct Grid {
    double x_max;
    int nx;
    int t_steps;  // per period, for propagation

    Grid(double xmax, int n, int steps) : x_max(xmax), nx(n), t_steps(steps) {
        if (!(xmax > 0.0) || n < 5 || n % 2 == 0 || steps < 1) {
            throw std::invalid_argument("Grid: need x_max > 0, odd nx >= 5, t_steps >= 1");
        }
    }
    double x_min() const { return -x_max; }
    double dx() const { return 2.0 * x_max / (nx - 1); }
    double x(int i) const { return -x_max + i * dx(); }
    Eigen::VectorXd xs() const {
        Eigen::VectorXd v(nx);
        for (int i = 0; i < nx; ++i) v[i] = x(i);
        return v;
    }
};

/// x_max = 12 sqrt(8 gamma_max), nx = 2049, t_steps = 4096 unless overridden.
Grid default_grid(const ClassicalSolution& sol);

struct ResidualReport {
    double sup_residual = 0.0;  // sup |i psi_t + psi_xx - V psi| / sup |psi|
    double l2_residual = 0.0;
    double richardson_ratio = 0.0;  // sup residual at h over sup residual at h/2
    bool flagged = false;           // true when not in the 4th-order regime
    std::string state_id, potential_id;
};

/// Discrete Schrodinger residual of an analytic state on the grid, with
/// 4th-order central stencils in x and t (t-step = period * 1e-4).  The
/// states tested here satisfy the PDE exactly, so the measured residual is
/// discretization error and must drop ~16x under x-step halving; a ratio
/// below 8 is flagged.
ResidualReport schrodinger_residual(const WaveFunction& state, const Potential& V,
                                    const Grid& grid, double t, bool richardson = true,
                                    const std::string& state_id = "",
                                    const std::string& potential_id = "");

/// Crank-Nicolson propagation of samples over [t0, t0 + duration] in n_steps,
/// V evaluated at midpoint times.  The scheme is exactly unitary; norm drift
/// beyond 1e-8 aborts.
Eigen::VectorXcd propagate(const Eigen::VectorXcd& initial, const PotentialRows& V,
                           const Grid& grid, double t0, double duration, int n_steps);
inline Eigen::VectorXcd propagate(const Eigen::VectorXcd& initial, const Potential& V,
                                  const Grid& grid, double t0, double duration, int n_steps) {
    return propagate(initial, rows_from_pointwise(V), grid, t0, duration, n_steps);
}

Eigen::VectorXcd sample(const WaveFunction& state, const Grid& grid, double t);

/// l2 inner product sum conj(a_i) b_i dx.
complex grid_inner(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, const Grid& grid);

/// Quasienergy spectroscopy: record <probe(0)|probe(mT)> for m = 1..n_periods
/// and Fourier-analyze.  Peaks live at quasienergy classes mod 2pi/T; the
/// Blackman window keeps sidelobes below the -40 dB detection floor.
class Spectrum {
  public:
    Spectrum(std::vector<complex> overlaps, double period);

    /// Windowed DTFT amplitude at quasienergy class E (uses e^{+iE T m}).
    double amplitude(double energy) const;
    /// Local maxima of the amplitude over one modular period, sorted by
    /// amplitude, as (E_class in [0, 2pi/T), relative dB) pairs.
    std::vector<std::pair<double, double>> peaks(double floor_db = -60.0, int scan = 4096) const;
    double resolution() const;  // 2pi/(M T)
    double period() const { return T_; }
    const std::vector<complex>& overlaps() const { return s_; }

  private:
    std::vector<complex> s_;
    std::vector<double> win_;
    double T_;
};

/// Propagate the probe for n_periods full periods under V and return the
/// overlap spectrum.  Throws if n_periods is too small for the requested
/// class resolution (pass 0 to skip the check).
Spectrum spectroscopy(const PotentialRows& V, const Eigen::VectorXcd& probe, const Grid& grid,
                      double period, int n_periods, double requested_resolution = 0.0);
inline Spectrum spectroscopy(const Potential& V, const Eigen::VectorXcd& probe, const Grid& grid,
                             double period, int n_periods, double requested_resolution = 0.0) {
    return spectroscopy(rows_from_pointwise(V), probe, grid, period, n_periods,
                        requested_resolution);
}

}  // namespace floq::verify

#endif
