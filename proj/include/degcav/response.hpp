// response.hpp — input-output observables of the static chains: transmission
// matrix T(omega), total transmission spectra tau(omega), and time-domain
// pulse dynamics of the classical mode amplitudes.
//
// Sign conventions: the Langevin equation
//   d beta_j/dt = -i (H beta)_j - (gamma_j/2) beta_j - sqrt(gamma_j) a_in_j(t)
// and the transmission element
//   T_jj' = -i <j| sqrt(G) [omega - H + i G/2]^{-1} sqrt(G) |j'>
// are taken as printed; the output field is a_out = (1 + T) a_in, which keeps
// a single lossy site all-pass (|1 + T| = 1).

#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <functional>
#include <vector>

#include "degcav/common.hpp"
#include "degcav/lattice.hpp"

namespace degcav::response {

struct SweepTag {
    double j0prime = 0.0;
    int hopping_step = 0;
    std::uint64_t model_hash = 0;
};

struct SpectrumResult {
    std::vector<double> omega;   // strictly increasing grid
    std::vector<double> values;  // nonnegative intensities
    SweepTag tag{};

    void validate() const {
        if (omega.size() != values.size() || omega.empty())
            throw ValidationError("SpectrumResult: grid/value mismatch");
        for (std::size_t i = 0; i + 1 < omega.size(); ++i)
            if (!(omega[i + 1] > omega[i])) throw ValidationError("SpectrumResult: grid must increase");
        for (double v : values)
            if (v < 0.0) throw ValidationError("SpectrumResult: intensities must be >= 0");
    }
};

struct PulseSpec {
    int target_site = 0;   // chain_index of the driven site
    double center = 3.0;   // t0
    double width = 2.0;    // envelope exp[-(t-t0)^2 / (2 width^2)]
    double amplitude = 0.3732054405512;  // 1/sqrt(2 sqrt(pi))

    void validate() const {
        if (!(width > 0.0)) throw ValidationError("PulseSpec: width must be > 0");
    }

    complexd envelope(double t) const {
        const double u = (t - center) / width;
        return complexd{amplitude * std::exp(-0.5 * u * u), 0.0};
    }
};

struct TransmissionDiagnostics {
    double rcond = 1.0;
    bool near_singular = false;
};

// --------------------------- frequency domain --------------------------------

// T(omega) = -i sqrt(G) (omega I - H + i G/2)^{-1} sqrt(G), computed by linear
// solves against the sqrt(G) port columns (never an explicit inverse for
// models beyond 64 sites).
inline Eigen::MatrixXcd transmission_matrix(const lattice::LatticeModel& model, double omega,
                                            TransmissionDiagnostics* diag = nullptr) {
    model.validate();
    const int n = model.size();
    std::vector<int> ports;
    for (int j = 0; j < n; ++j)
        if (model.decay[static_cast<std::size_t>(j)] > 0.0) ports.push_back(j);

    Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(n, n);
    if (ports.empty()) return t;  // sqrt(G) = 0

    Eigen::VectorXd sq(n);
    for (int j = 0; j < n; ++j) sq(j) = std::sqrt(model.decay[static_cast<std::size_t>(j)]);

    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(n, static_cast<int>(ports.size()));
    for (std::size_t c = 0; c < ports.size(); ++c) b(ports[c], static_cast<int>(c)) = sq(ports[c]);

    Eigen::MatrixXcd m = -lattice::dense_matrix(model);
    for (int j = 0; j < n; ++j) m(j, j) += complexd{omega, 0.5 * model.total_loss(j)};

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
    if (diag) {
        diag->rcond = lu.rcond();
        diag->near_singular = diag->rcond < 1e-12;
    }
    const Eigen::MatrixXcd x = lu.solve(b);

    for (std::size_t c = 0; c < ports.size(); ++c)
        t.col(ports[c]) = complexd{0.0, -1.0} * sq.cast<complexd>().cwiseProduct(x.col(static_cast<int>(c)));
    return t;
}

// tau(omega) = sum_{j j'} |T_jj'|^2 over the grid. Frequencies are
// independent work items; the sparse factorization is rebuilt per point.
inline SpectrumResult total_transmission(const lattice::LatticeModel& model, std::vector<double> omega_grid,
                                         unsigned threads = 0) {
    model.validate();
    if (omega_grid.empty()) throw ValidationError("total_transmission: empty grid");
    const int n = model.size();
    std::vector<int> ports;
    for (int j = 0; j < n; ++j)
        if (model.decay[static_cast<std::size_t>(j)] > 0.0) ports.push_back(j);

    SpectrumResult out;
    out.omega = std::move(omega_grid);
    out.values.assign(out.omega.size(), 0.0);
    out.tag.model_hash = lattice::model_hash(model);
    if (ports.empty()) {
        out.validate();
        return out;
    }

    Eigen::VectorXd sq(n);
    for (int j = 0; j < n; ++j) sq(j) = std::sqrt(model.decay[static_cast<std::size_t>(j)]);

    Eigen::SparseMatrix<complexd> h = lattice::sparse_matrix(model);
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(n, static_cast<int>(ports.size()));
    for (std::size_t c = 0; c < ports.size(); ++c) b(ports[c], static_cast<int>(c)) = sq(ports[c]);

    parallel_for(out.omega.size(), threads, [&](std::size_t i) {
        Eigen::SparseMatrix<complexd> m = -h;
        for (int j = 0; j < n; ++j)
            m.coeffRef(j, j) += complexd{out.omega[i], 0.5 * model.total_loss(j)};
        m.makeCompressed();
        Eigen::SparseLU<Eigen::SparseMatrix<complexd>> lu(m);
        if (lu.info() != Eigen::Success)
            throw NumericError("total_transmission: factorization failed at omega = " + std::to_string(out.omega[i]));
        const Eigen::MatrixXcd x = lu.solve(b);
        double tau = 0.0;
        for (int c = 0; c < x.cols(); ++c)
            for (int r = 0; r < n; ++r) tau += std::norm(sq(r) * x(r, c));
        out.values[i] = tau;
    });
    out.validate();
    return out;
}

// ----------------------------- time domain -----------------------------------

struct SiteDrive {
    int position = 0;  // matrix index
    std::function<complexd(double)> amplitude;
};

struct Traces {
    std::vector<double> t;
    Eigen::MatrixXd intensity;  // sites x samples, N_j(t) = |beta_j(t)|^2
};

// Classical amplitude integration of
//   d beta/dt = -i H beta - (G/2) beta - sqrt(G) a_in(t)
// with beta(0) = 0, fixed-step RK4 (substeps sized against ||H||_inf + decay),
// sampled on the caller's time grid.
inline Traces integrate_driven(const lattice::LatticeModel& model, std::span<const SiteDrive> drives,
                               std::span<const double> t_grid, double dt_max = 0.0) {
    model.validate();
    if (t_grid.size() < 2 || t_grid[0] != 0.0)
        throw ValidationError("integrate_driven: time grid must start at 0 with >= 2 samples");
    for (std::size_t i = 0; i + 1 < t_grid.size(); ++i)
        if (!(t_grid[i + 1] > t_grid[i])) throw ValidationError("integrate_driven: time grid must increase");

    const int n = model.size();
    const auto h = lattice::sparse_matrix(model);
    Eigen::VectorXd half_gamma(n), sq(n);
    for (int j = 0; j < n; ++j) {
        half_gamma(j) = 0.5 * model.total_loss(j);  // ports + internal loss both damp
        sq(j) = std::sqrt(model.decay[static_cast<std::size_t>(j)]);  // ports couple the input
    }

    // conservative step: local RK4 error ~ (s dt)^5 with s the dynamical rate
    double rate = half_gamma.maxCoeff();
    for (int k = 0; k < h.outerSize(); ++k) {
        double row = 0.0;
        for (Eigen::SparseMatrix<complexd>::InnerIterator it(h, k); it; ++it) row += std::abs(it.value());
        rate = std::max(rate, row);
    }
    double dt = 0.05 / std::max(rate, 1e-3);
    if (dt_max > 0.0) dt = std::min(dt, dt_max);

    Eigen::VectorXcd beta = Eigen::VectorXcd::Zero(n);
    Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), tmp(n);
    auto rhs = [&](double time, const Eigen::VectorXcd& y, Eigen::VectorXcd& out) {
        out.noalias() = h * y;
        out *= complexd{0.0, -1.0};
        out -= half_gamma.cast<complexd>().cwiseProduct(y);
        for (const auto& d : drives) out(d.position) -= sq(d.position) * d.amplitude(time);
    };

    Traces tr;
    tr.t.assign(t_grid.begin(), t_grid.end());
    tr.intensity.resize(n, static_cast<Eigen::Index>(t_grid.size()));
    tr.intensity.col(0).setZero();

    double t = 0.0;
    for (std::size_t s = 1; s < t_grid.size(); ++s) {
        const double t_target = t_grid[s];
        while (t < t_target - 1e-12) {
            const double step = std::min(dt, t_target - t);
            rhs(t, beta, k1);
            tmp = beta + 0.5 * step * k1;
            rhs(t + 0.5 * step, tmp, k2);
            tmp = beta + 0.5 * step * k2;
            rhs(t + 0.5 * step, tmp, k3);
            tmp = beta + step * k3;
            rhs(t + step, tmp, k4);
            beta += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += step;
        }
        if (!beta.allFinite())
            throw NumericError("integrate_driven: state diverged near t = " + std::to_string(t) +
                               " (reduce dt_max)");
        for (int j = 0; j < n; ++j) tr.intensity(j, static_cast<Eigen::Index>(s)) = std::norm(beta(j));
    }
    return tr;
}

// Gaussian input pulse on one chain site; returns per-site intensities N_j(t).
inline Traces pulse_response(const lattice::LatticeModel& model, const PulseSpec& pulse,
                             std::span<const double> t_grid, double dt_max = 0.0) {
    pulse.validate();
    const auto pos = model.position_of_chain_index(pulse.target_site);
    if (!pos) throw ValidationError("pulse_response: target site is not part of the model");
    SiteDrive drive{*pos, [pulse](double t) { return pulse.envelope(t); }};
    return integrate_driven(model, std::span<const SiteDrive>(&drive, 1), t_grid, dt_max);
}

// N_target(t_star) for each value of a model-family parameter (typically the
// intracell hopping J0'). Sweep points run in parallel.
struct SweepCurve {
    std::vector<double> parameter;
    std::vector<double> n0;
};

inline SweepCurve edge_persistence_sweep(const std::function<lattice::LatticeModel(double)>& factory,
                                         const PulseSpec& pulse, double t_star,
                                         std::span<const double> parameter_grid, unsigned threads = 0,
                                         double dt_max = 0.0) {
    if (parameter_grid.empty()) throw ValidationError("edge_persistence_sweep: empty parameter grid");
    if (!(t_star > 0.0)) throw ValidationError("edge_persistence_sweep: t_star must be > 0");
    SweepCurve curve;
    curve.parameter.assign(parameter_grid.begin(), parameter_grid.end());
    curve.n0.assign(parameter_grid.size(), 0.0);
    const std::vector<double> t_grid{0.0, t_star};
    parallel_for(parameter_grid.size(), threads, [&](std::size_t i) {
        const auto model = factory(curve.parameter[i]);
        const auto pos = model.position_of_chain_index(pulse.target_site);
        if (!pos) throw ValidationError("edge_persistence_sweep: target site missing from model");
        const auto tr = pulse_response(model, pulse, t_grid, dt_max);
        curve.n0[i] = tr.intensity(*pos, 1);
    });
    return curve;
}

}  // namespace degcav::response
