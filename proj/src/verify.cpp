#include "floq/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace floq::verify {

namespace {
constexpr double kPi = std::numbers::pi;
}

Grid default_grid(const ClassicalSolution& sol) {
    double gmax = 0.0;
    const double T = sol.period();
    for (int j = 0; j < 128; ++j) gmax = std::max(gmax, sol.gamma(j * T / 128.0));
    return Grid(12.0 * std::sqrt(8.0 * gmax), 2049, 4096);
}

namespace {

// residual on a fixed sampling (2-point margin for the x-stencil)
double sup_residual_on(const WaveFunction& state, const Potential& V, const std::vector<double>& xs,
                       double dx, double t, double ht, double* l2, double* sup_psi) {
    const int n = int(xs.size());
    // t-stencil samples
    std::array<std::vector<complex>, 4> tpsi;
    std::vector<complex> psi0(n);
    for (int i = 0; i < n; ++i) psi0[i] = state.value(xs[i], t);
    const double toff[4] = {-2 * ht, -ht, ht, 2 * ht};
    for (int j = 0; j < 4; ++j) {
        tpsi[j].resize(n);
        for (int i = 0; i < n; ++i) tpsi[j][i] = state.value(xs[i], t + toff[j]);
    }
    double sup_r = 0.0, acc = 0.0, supp = 0.0;
    for (int i = 2; i < n - 2; ++i) {
        const complex psixx =
            (-psi0[i - 2] + 16.0 * psi0[i - 1] - 30.0 * psi0[i] + 16.0 * psi0[i + 1] -
             psi0[i + 2]) /
            (12.0 * dx * dx);
        const complex psit =
            (tpsi[0][i] - 8.0 * tpsi[1][i] + 8.0 * tpsi[2][i] - tpsi[3][i]) / (12.0 * ht);
        const complex r = complex(0.0, 1.0) * psit + psixx - V(xs[i], t) * psi0[i];
        sup_r = std::max(sup_r, std::abs(r));
        acc += std::norm(r) * dx;
        supp = std::max(supp, std::abs(psi0[i]));
    }
    if (l2) *l2 = std::sqrt(acc);
    if (sup_psi) *sup_psi = supp;
    return sup_r;
}

}  // namespace

ResidualReport schrodinger_residual(const WaveFunction& state, const Potential& V,
                                    const Grid& grid, double t, bool richardson,
                                    const std::string& state_id,
                                    const std::string& potential_id) {
    const double ht = state.period() * 1e-4;
    std::vector<double> xs(grid.nx);
    for (int i = 0; i < grid.nx; ++i) xs[i] = grid.x(i);
    double l2 = 0.0, supp = 0.0;
    const double sup_r = sup_residual_on(state, V, xs, grid.dx(), t, ht, &l2, &supp);

    ResidualReport rep;
    rep.state_id = state_id;
    rep.potential_id = potential_id;
    rep.sup_residual = sup_r / supp;
    rep.l2_residual = l2 / supp;

    if (richardson) {
        std::vector<double> xs2(2 * grid.nx - 1);
        for (int i = 0; i < int(xs2.size()); ++i) xs2[i] = -grid.x_max + i * grid.dx() / 2.0;
        const double sup_r2 = sup_residual_on(state, V, xs2, grid.dx() / 2.0, t, ht, nullptr,
                                              nullptr);
        rep.richardson_ratio = sup_r / sup_r2;
        rep.flagged = rep.richardson_ratio < 8.0;
    }
    return rep;
}

Eigen::VectorXcd sample(const WaveFunction& state, const Grid& grid, double t) {
    Eigen::VectorXcd v(grid.nx);
    for (int i = 0; i < grid.nx; ++i) v[i] = state.value(grid.x(i), t);
    return v;
}

complex grid_inner(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, const Grid& grid) {
    return a.dot(b) * grid.dx();  // Eigen dot conjugates the first argument
}

PotentialRows rows_from_pointwise(Potential v) {
    return [v = std::move(v)](double t, const Eigen::VectorXd& xs, Eigen::VectorXd& out) {
        out.resize(xs.size());
        for (Eigen::Index i = 0; i < xs.size(); ++i) out[i] = v(xs[i], t);
    };
}

Eigen::VectorXcd propagate(const Eigen::VectorXcd& initial, const PotentialRows& V,
                           const Grid& grid, double t0, double duration, int n_steps) {
    const int n = grid.nx;
    const double dx = grid.dx();
    const double dt = duration / n_steps;
    const complex half_idt(0.0, 0.5 * dt);
    const complex off = half_idt * (-1.0 / (dx * dx));  // A off-diagonal

    Eigen::VectorXcd psi = initial;
    Eigen::VectorXcd diag(n), rhs(n), cp(n);
    Eigen::VectorXd vrow(n);
    const Eigen::VectorXd xs = grid.xs();
    const double norm0 = psi.norm();

    for (int s = 0; s < n_steps; ++s) {
        const double tm = t0 + (s + 0.5) * dt;
        // H = -D2 + V(t_mid); A psi^{new} = B psi, A = I + i dt/2 H, B = conj
        V(tm, xs, vrow);
        for (int i = 0; i < n; ++i) {
            const complex hdiag = 2.0 / (dx * dx) + vrow[i];
            diag[i] = 1.0 + half_idt * hdiag;
        }
        // rhs = B psi with B = I - i dt/2 H (Dirichlet ends)
        for (int i = 0; i < n; ++i) {
            complex acc = (2.0 - diag[i]) * psi[i];  // (1 - i dt/2 hdiag) psi_i
            if (i > 0) acc -= off * psi[i - 1];
            if (i < n - 1) acc -= off * psi[i + 1];
            rhs[i] = acc;
        }
        // Thomas solve (constant off-diagonals)
        cp[0] = off / diag[0];
        rhs[0] /= diag[0];
        for (int i = 1; i < n; ++i) {
            const complex m = diag[i] - off * cp[i - 1];
            cp[i] = off / m;
            rhs[i] = (rhs[i] - off * rhs[i - 1]) / m;
        }
        psi[n - 1] = rhs[n - 1];
        for (int i = n - 2; i >= 0; --i) psi[i] = rhs[i] - cp[i] * psi[i + 1];
    }
    const double drift = std::abs(psi.norm() - norm0) / norm0;
    if (drift > 1e-8) {
        throw std::runtime_error("propagate: norm drift " + std::to_string(drift) +
                                 " exceeds 1e-8 (instability)");
    }
    return psi;
}

Spectrum::Spectrum(std::vector<complex> overlaps, double period)
    : s_(std::move(overlaps)), T_(period) {
    const int m = int(s_.size());
    win_.resize(m);
    for (int j = 0; j < m; ++j) {
        const double u = 2.0 * kPi * j / (m - 1);
        win_[j] = 0.42 - 0.5 * std::cos(u) + 0.08 * std::cos(2.0 * u);  // Blackman
    }
}

double Spectrum::amplitude(double energy) const {
    complex acc(0.0, 0.0);
    for (std::size_t m = 0; m < s_.size(); ++m) {
        acc += win_[m] * s_[m] * std::polar(1.0, energy * T_ * double(m + 1));
    }
    return std::abs(acc);
}

double Spectrum::resolution() const { return 2.0 * kPi / (double(s_.size()) * T_); }

std::vector<std::pair<double, double>> Spectrum::peaks(double floor_db, int scan) const {
    const double unit = 2.0 * kPi / T_;
    std::vector<double> amp(scan);
    double amax = 0.0;
    for (int j = 0; j < scan; ++j) {
        amp[j] = amplitude(unit * j / scan);
        amax = std::max(amax, amp[j]);
    }
    std::vector<std::pair<double, double>> out;
    for (int j = 0; j < scan; ++j) {
        const double prev = amp[(j + scan - 1) % scan], next = amp[(j + 1) % scan];
        if (amp[j] > prev && amp[j] >= next) {
            const double db = 20.0 * std::log10(amp[j] / amax);
            if (db >= floor_db) out.emplace_back(unit * j / scan, db);
        }
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

Spectrum spectroscopy(const PotentialRows& V, const Eigen::VectorXcd& probe, const Grid& grid,
                      double period, int n_periods, double requested_resolution) {
    if (requested_resolution > 0.0) {
        const int needed = int(std::ceil(2.0 * kPi / (requested_resolution * period)));
        if (n_periods < needed) {
            throw std::invalid_argument("spectroscopy: need at least " + std::to_string(needed) +
                                        " periods for the requested resolution");
        }
    }
    Eigen::VectorXcd psi = probe;
    std::vector<complex> overlaps(n_periods);
    for (int m = 0; m < n_periods; ++m) {
        psi = propagate(psi, V, grid, m * period, period, grid.t_steps);
        overlaps[m] = grid_inner(probe, psi, grid);
    }
    return Spectrum(std::move(overlaps), period);
}

}  // namespace floq::verify
