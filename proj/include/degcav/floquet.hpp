// floquet.hpp — replica-space treatment of the periodically driven chain:
// the time-independent Floquet Hamiltonian, quasienergy spectra with
// physical-state selection, driven output spectra (frequency- and
// time-domain), the two-band Bloch reduction, half-period propagators, and
// the chiral winding invariants v0 / v+.
//
// Replica conventions: index blocks by m = -M..M; the diagonal block carries
// H0 + m Omega I and block (m, m+1) carries H1 (the e^{+i Omega t} Fourier
// component), with H(t) = H0 + H1 e^{i Omega t} + H1^dag e^{-i Omega t}.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <boost/math/special_functions/bessel.hpp>

#include <algorithm>
#include <functional>
#include <vector>

#include "degcav/common.hpp"
#include "degcav/lattice.hpp"
#include "degcav/response.hpp"

namespace degcav::floquet {

using response::SpectrumResult;

// ------------------------------- drive spec ----------------------------------

struct DriveSpec {
    double j0 = 2.0;           // static intracell amplitude
    double j1 = 1.0;           // intercell amplitude
    double lam = 1.6;          // drive amplitude on the intracell bonds
    double omega_drive = 10.0; // Omega > 0
    double phi0 = 0.0;         // phase-modulation workpoint (bookkeeping)
    double alpha = 0.0;        // phase-modulation depth (bookkeeping)

    double period() const { return 2.0 * pi / omega_drive; }

    void validate() const {
        if (!(omega_drive > 0.0)) throw ValidationError("DriveSpec: omega_drive must be > 0");
        if (j1 < 0.0 || j0 < 0.0) throw ValidationError("DriveSpec: hopping amplitudes must be >= 0");
    }
};

// Effective bond drive J0 j_0(alpha) + 2 J0 j_2(alpha) cos(Omega t) obtained
// from phase modulation phi(t) of depth alpha at workpoint phi0 = 0. The
// neglected next harmonic is 2 J0 j_4(alpha) cos(2 Omega t); its amplitude is
// returned through `residual_bound`.
inline DriveSpec drive_from_phase(double j0_bare, double j1, double alpha, double omega_drive,
                                  double* residual_bound = nullptr) {
    if (!(omega_drive > 0.0)) throw ValidationError("drive_from_phase: omega_drive must be > 0");
    DriveSpec d;
    d.j0 = j0_bare * boost::math::cyl_bessel_j(0, alpha);
    d.j1 = j1;
    d.lam = 2.0 * j0_bare * boost::math::cyl_bessel_j(2, alpha);
    d.omega_drive = omega_drive;
    d.phi0 = 0.0;
    d.alpha = alpha;
    if (residual_bound) *residual_bound = std::abs(2.0 * j0_bare * boost::math::cyl_bessel_j(4, alpha));
    return d;
}

// ------------------------------ Fourier blocks --------------------------------

struct FourierBlocks {
    Eigen::SparseMatrix<complexd> h0;  // static chain (intracell J0, intercell J1 alpha_j)
    Eigen::SparseMatrix<complexd> h1;  // (lam/2) on the intracell bonds; h_{-1} = h1^dag
    int n_sites = 0;
};

// The drive modulates only the polarization (intracell) bonds; the chain
// topology and the pinhole corrections come from `chain`.
inline FourierBlocks drive_to_fourier(const DriveSpec& drive, const lattice::SSHParams& chain) {
    drive.validate();
    chain.validate();
    lattice::SSHParams stat = chain;
    stat.j0 = drive.j0;
    stat.phase = 0.0;
    stat.j1 = drive.j1;
    const auto model = lattice::build_ssh(stat);

    FourierBlocks fb;
    fb.n_sites = model.size();
    fb.h0 = lattice::sparse_matrix(model);

    std::vector<Eigen::Triplet<complexd>> trip;
    for (const auto& b : model.bonds) {
        const auto& sa = model.sites[static_cast<std::size_t>(b.a)];
        const auto& sb = model.sites[static_cast<std::size_t>(b.b)];
        if (sa.oam == sb.oam) {  // intracell bond
            trip.emplace_back(b.b, b.a, complexd{0.5 * drive.lam, 0.0});
            trip.emplace_back(b.a, b.b, complexd{0.5 * drive.lam, 0.0});
        }
    }
    fb.h1.resize(fb.n_sites, fb.n_sites);
    fb.h1.setFromTriplets(trip.begin(), trip.end());
    return fb;
}

// ----------------------------- Floquet operator -------------------------------

struct FloquetOperator {
    FourierBlocks blocks;
    double omega_drive = 1.0;
    int replica_cutoff = 6;  // M

    int n_sites() const { return blocks.n_sites; }
    int n_replicas() const { return 2 * replica_cutoff + 1; }
    int dim() const { return n_replicas() * blocks.n_sites; }

    Eigen::SparseMatrix<complexd> sparse() const {
        const int n = blocks.n_sites;
        std::vector<Eigen::Triplet<complexd>> trip;
        trip.reserve(static_cast<std::size_t>(n_replicas()) * (blocks.h0.nonZeros() + 2 * blocks.h1.nonZeros() + n));
        for (int m = -replica_cutoff; m <= replica_cutoff; ++m) {
            const int off = (m + replica_cutoff) * n;
            for (int k = 0; k < blocks.h0.outerSize(); ++k)
                for (Eigen::SparseMatrix<complexd>::InnerIterator it(blocks.h0, k); it; ++it)
                    trip.emplace_back(off + it.row(), off + it.col(), it.value());
            for (int j = 0; j < n; ++j) trip.emplace_back(off + j, off + j, complexd{m * omega_drive, 0.0});
            if (m < replica_cutoff) {
                // block (m, m+1) carries H1, block (m+1, m) its adjoint
                for (int k = 0; k < blocks.h1.outerSize(); ++k)
                    for (Eigen::SparseMatrix<complexd>::InnerIterator it(blocks.h1, k); it; ++it) {
                        trip.emplace_back(off + it.row(), off + n + it.col(), it.value());
                        trip.emplace_back(off + n + it.col(), off + it.row(), std::conj(it.value()));
                    }
            }
        }
        Eigen::SparseMatrix<complexd> h(dim(), dim());
        h.setFromTriplets(trip.begin(), trip.end());
        return h;
    }

    Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(sparse()); }
};

inline FloquetOperator build_floquet_hamiltonian(FourierBlocks blocks, double omega_drive, int replica_cutoff) {
    if (replica_cutoff < 1) throw ValidationError("build_floquet_hamiltonian: replica cutoff must be >= 1");
    if (!(omega_drive > 0.0)) throw ValidationError("build_floquet_hamiltonian: omega_drive must be > 0");
    FloquetOperator op{std::move(blocks), omega_drive, replica_cutoff};
    const auto h = op.sparse();
    const Eigen::SparseMatrix<complexd> hadj = h.adjoint();
    const Eigen::SparseMatrix<complexd> diff = h - hadj;
    double herm = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (Eigen::SparseMatrix<complexd>::InnerIterator it(diff, k); it; ++it)
            herm = std::max(herm, std::abs(it.value()));
    if (herm > 1e-12) throw NumericError("build_floquet_hamiltonian: assembled matrix not Hermitian");
    return op;
}

// fold a quasienergy into the first zone (-Omega/2, Omega/2]
inline double fold_quasienergy(double eps, double omega_drive) {
    double f = std::remainder(eps, omega_drive);
    if (f <= -0.5 * omega_drive) f += omega_drive;
    return f;
}

// ------------------------------ quasienergies ---------------------------------

struct QuasiSpectrum {
    std::vector<double> values;      // folded, ascending; one per physical state
    std::vector<double> m0_weights;  // replica-0 weight of the selected states
    bool ambiguous = false;          // selection margin below 1%: extra value reported
};

// Physical quasienergies of the truncated replica matrix: keep the N
// eigenvectors with dominant weight on the m = 0 replica and fold them.
inline QuasiSpectrum quasienergies(const FloquetOperator& op) {
    const int n = op.n_sites();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(op.dense());
    if (solver.info() != Eigen::Success) throw NumericError("quasienergies: eigensolver failed");
    const auto& ev = solver.eigenvalues();
    const auto& vec = solver.eigenvectors();

    const int m0_off = op.replica_cutoff * n;
    std::vector<std::pair<double, int>> weighted(static_cast<std::size_t>(op.dim()));
    for (int c = 0; c < op.dim(); ++c) {
        const double w = vec.col(c).segment(m0_off, n).squaredNorm();
        weighted[static_cast<std::size_t>(c)] = {w, c};
    }
    std::sort(weighted.begin(), weighted.end(), [](auto& a, auto& b) { return a.first > b.first; });

    QuasiSpectrum qs;
    std::size_t keep = static_cast<std::size_t>(n);
    if (weighted.size() > keep && weighted[keep - 1].first < 1.01 * weighted[keep].first) {
        qs.ambiguous = true;
        ++keep;  // report both borderline candidates
    }
    for (std::size_t i = 0; i < keep; ++i) {
        qs.values.push_back(fold_quasienergy(ev(weighted[i].second), op.omega_drive));
        qs.m0_weights.push_back(weighted[i].first);
    }
    std::sort(qs.values.begin(), qs.values.end());
    return qs;
}

// ---------------------------- driven output spectra ----------------------------

// T(omega) = (1/2pi) sum_kets || (omega + i Gamma^F/2 - H_F)^{-1} |m0, j> ||^2
// over the default initial set {|m = m0, j> : all sites j} with m0 drawn from
// `initial_replicas`.
inline SpectrumResult floquet_spectrum_response(const FloquetOperator& op, std::span<const double> decay,
                                                std::vector<double> omega_grid,
                                                std::span<const int> initial_replicas = {},
                                                unsigned threads = 0) {
    if (decay.size() != static_cast<std::size_t>(op.n_sites()))
        throw ValidationError("floquet_spectrum_response: decay size must match the chain");
    if (omega_grid.empty()) throw ValidationError("floquet_spectrum_response: empty grid");
    bool any = false;
    for (double g : decay) {
        if (g < 0.0) throw ValidationError("floquet_spectrum_response: decay must be >= 0");
        any = any || g > 0.0;
    }
    if (!any) throw ValidationError("floquet_spectrum_response: at least one site must decay");

    std::vector<int> replicas(initial_replicas.begin(), initial_replicas.end());
    if (replicas.empty()) replicas.push_back(0);
    for (int m : replicas)
        if (std::abs(m) > op.replica_cutoff)
            throw ValidationError("floquet_spectrum_response: initial replica outside the cutoff");

    const int n = op.n_sites();
    const auto h = op.sparse();

    SpectrumResult out;
    out.omega = std::move(omega_grid);
    out.values.assign(out.omega.size(), 0.0);

    parallel_for(out.omega.size(), threads, [&](std::size_t i) {
        Eigen::SparseMatrix<complexd> a = -h;
        for (int m = -op.replica_cutoff; m <= op.replica_cutoff; ++m)
            for (int j = 0; j < n; ++j) {
                const int idx = (m + op.replica_cutoff) * n + j;
                a.coeffRef(idx, idx) += complexd{out.omega[i], 0.5 * decay[static_cast<std::size_t>(j)]};
            }
        a.makeCompressed();
        Eigen::SparseLU<Eigen::SparseMatrix<complexd>> lu(a);
        if (lu.info() != Eigen::Success)
            throw NumericError("floquet_spectrum_response: factorization failed at omega = " +
                               std::to_string(out.omega[i]));
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(op.dim());
        double total = 0.0;
        for (int m0 : replicas) {
            for (int j = 0; j < n; ++j) {
                const int idx = (m0 + op.replica_cutoff) * n + j;
                rhs.setZero();
                rhs(idx) = 1.0;
                total += lu.solve(rhs).squaredNorm();
            }
        }
        out.values[i] = total / (2.0 * pi);
    });
    out.validate();
    return out;
}

// Time-domain route to the same spectrum: evolve |beta(0)> = |j> under
// H(t) = H0 + 2 H1 cos(Omega t) with per-site damping, Fourier transform each
// site trace, and fold |d_j(omega + m Omega)|^2 into the first zone.
inline SpectrumResult time_domain_spectrum(const FourierBlocks& blocks, double omega_drive,
                                           std::span<const double> decay, std::vector<double> omega_grid,
                                           double t_end = 0.0, int m_fold = 2, unsigned threads = 0,
                                           double dt_max = 0.0, std::vector<std::string>* warnings = nullptr) {
    if (decay.size() != static_cast<std::size_t>(blocks.n_sites))
        throw ValidationError("time_domain_spectrum: decay size mismatch");
    if (omega_grid.empty()) throw ValidationError("time_domain_spectrum: empty grid");
    double gmin = 1e300, gmax = 0.0;
    for (double g : decay) {
        if (g < 0.0) throw ValidationError("time_domain_spectrum: decay must be >= 0");
        gmin = std::min(gmin, g);
        gmax = std::max(gmax, g);
    }
    if (!(gmax > 0.0)) throw ValidationError("time_domain_spectrum: at least one site must decay");
    if (t_end <= 0.0) t_end = (gmin > 0.0) ? 12.0 / gmin : 12.0 / gmax;
    if (gmin > 0.0 && t_end < 10.0 / gmin && warnings)
        warnings->push_back("time_domain_spectrum: duration below 10/min(gamma); expect spectral leakage");

    const int n = blocks.n_sites;

    // target frequencies: every omega + m Omega appearing in the folded sum
    const std::size_t n_omega = omega_grid.size();
    std::vector<double> nu;
    nu.reserve(n_omega * static_cast<std::size_t>(2 * m_fold + 1));
    for (int m = -m_fold; m <= m_fold; ++m)
        for (double w : omega_grid) nu.push_back(w + m * omega_drive);

    // dynamics scale: ||H||_inf bound from the blocks
    double rate = 0.5 * gmax;
    const Eigen::SparseMatrix<complexd> h1adj = blocks.h1.adjoint();
    const Eigen::SparseMatrix<complexd> habs = blocks.h0 + blocks.h1 + h1adj;
    for (int k = 0; k < habs.outerSize(); ++k) {
        double row = 0.0;
        for (Eigen::SparseMatrix<complexd>::InnerIterator it(habs, k); it; ++it) row += std::abs(it.value());
        rate = std::max(rate, row);
    }
    rate = std::max(rate, omega_drive);
    double dt = 0.05 / rate;
    if (dt_max > 0.0) dt = std::min(dt, dt_max);
    const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / dt));
    dt = t_end / static_cast<double>(n_steps);

    // DFT sampling can be strided: it only needs the largest target frequency
    // resolved, not the integrator step
    double nu_max = 1e-12;
    for (double w : omega_grid) nu_max = std::max(nu_max, std::abs(w) + m_fold * omega_drive);
    const auto stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(0.4 / (nu_max * dt))));

    // accumulate d_j(nu) = (1/sqrt(2pi)) int dt e^{i nu t} beta_j(t) for every
    // initial site; |...|^2 summed into the folded zone bins
    std::vector<double> folded(n_omega, 0.0);
    std::mutex acc_mutex;

    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t j0) {
        Eigen::VectorXcd beta = Eigen::VectorXcd::Zero(n);
        beta(static_cast<Eigen::Index>(j0)) = 1.0;
        Eigen::MatrixXcd dft = Eigen::MatrixXcd::Zero(n, static_cast<Eigen::Index>(nu.size()));
        Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), tmp(n);
        Eigen::VectorXd half_gamma(n);
        for (int j = 0; j < n; ++j) half_gamma(j) = 0.5 * decay[static_cast<std::size_t>(j)];

        auto rhs = [&](double time, const Eigen::VectorXcd& y, Eigen::VectorXcd& out) {
            const double c = 2.0 * std::cos(omega_drive * time);
            out.noalias() = blocks.h0 * y;
            out.noalias() += c * (blocks.h1 * y);
            out *= complexd{0.0, -1.0};
            out -= half_gamma.cast<complexd>().cwiseProduct(y);
        };

        double t = 0.0;
        const double dt_s = stride * dt;
        for (std::size_t s = 0; s < n_steps; ++s) {
            if (s % stride == 0) {
                const double wgt = (s == 0) ? 0.5 : 1.0;
                for (std::size_t q = 0; q < nu.size(); ++q)
                    dft.col(static_cast<Eigen::Index>(q)) += (wgt * dt_s) * std::polar(1.0, nu[q] * t) * beta;
            }
            rhs(t, beta, k1);
            tmp = beta + 0.5 * dt * k1;
            rhs(t + 0.5 * dt, tmp, k2);
            tmp = beta + 0.5 * dt * k2;
            rhs(t + 0.5 * dt, tmp, k3);
            tmp = beta + dt * k3;
            rhs(t + dt, tmp, k4);
            beta += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += dt;
        }
        for (std::size_t q = 0; q < nu.size(); ++q)
            dft.col(static_cast<Eigen::Index>(q)) += (0.5 * dt_s) * std::polar(1.0, nu[q] * t) * beta;
        if (!beta.allFinite()) throw NumericError("time_domain_spectrum: state diverged");

        std::vector<double> local(n_omega, 0.0);
        for (std::size_t q = 0; q < nu.size(); ++q) {
            const std::size_t bin = q % n_omega;
            local[bin] += dft.col(static_cast<Eigen::Index>(q)).squaredNorm() / (2.0 * pi);
        }
        std::lock_guard<std::mutex> lock(acc_mutex);
        for (std::size_t q = 0; q < n_omega; ++q) folded[q] += local[q];
    });

    SpectrumResult out;
    out.omega = std::move(omega_grid);
    out.values = std::move(folded);
    out.validate();
    return out;
}

// ------------------------------ Bloch reduction --------------------------------

struct BlochDrive {
    std::function<double(double)> bx;  // B_x(k)
    std::function<double(double)> by;  // B_y(k)
    double lam = 0.0;
    double omega_drive = 1.0;

    double period() const { return 2.0 * pi / omega_drive; }

    // standard two-band reduction of the uniform chain with the intracell
    // amplitude driven
    static BlochDrive ssh(const DriveSpec& d) {
        d.validate();
        BlochDrive b;
        b.bx = [j0 = d.j0, j1 = d.j1](double k) { return j0 + j1 * std::cos(k); };
        b.by = [j1 = d.j1](double k) { return j1 * std::sin(k); };
        b.lam = d.lam;
        b.omega_drive = d.omega_drive;
        return b;
    }
};

// H(t, k) = [B_x(k) + lam cos(Omega t)] sigma_x + B_y(k) sigma_y
inline Eigen::Matrix2cd bloch_hamiltonian(double k, double t, const BlochDrive& drive) {
    const double bx = drive.bx(k) + drive.lam * std::cos(drive.omega_drive * t);
    const double by = drive.by(k);
    Eigen::Matrix2cd h;
    h << 0.0, complexd{bx, -by}, complexd{bx, by}, 0.0;
    return h;
}

namespace detail {

// exp(-i (bx sx + by sy) dt), closed form for a traceless 2x2 Hermitian block
inline Eigen::Matrix2cd expi_step(double bx, double by, double dt) {
    const double h = std::hypot(bx, by);
    Eigen::Matrix2cd u = std::cos(h * dt) * Eigen::Matrix2cd::Identity();
    if (h > 0.0) {
        const complexd off{bx / h, -by / h};
        Eigen::Matrix2cd ns;
        ns << 0.0, off, std::conj(off), 0.0;
        u -= complexd{0.0, std::sin(h * dt)} * ns;
    }
    return u;
}

}  // namespace detail

// F(k) = T-exp[-i int_0^{T/2} H(t,k) dt] by a fourth-order commutator-free
// product of exact 2x2 exponentials (two Gauss samples per slice). In this
// time frame the second half-period propagator is sigma_z F^dag sigma_z, so
// the one-period propagator reads U(T) = sigma_z F^dag sigma_z F.
inline Eigen::Matrix2cd half_period_propagator(double k, const BlochDrive& drive, int steps = 512) {
    if (steps < 64) throw ValidationError("half_period_propagator: need at least 64 steps");
    const double dt = 0.5 * drive.period() / steps;
    const double s3 = std::sqrt(3.0) / 6.0;
    const double c1 = 0.5 - s3, c2 = 0.5 + s3;    // Gauss-Legendre nodes
    const double u1 = 0.25 + s3, u2 = 0.25 - s3;  // CF4 weights
    const double by = drive.by(k);
    Eigen::Matrix2cd f = Eigen::Matrix2cd::Identity();
    for (int s = 0; s < steps; ++s) {
        const double t = s * dt;
        const double bx1 = drive.bx(k) + drive.lam * std::cos(drive.omega_drive * (t + c1 * dt));
        const double bx2 = drive.bx(k) + drive.lam * std::cos(drive.omega_drive * (t + c2 * dt));
        const auto inner = detail::expi_step(u1 * bx1 + u2 * bx2, (u1 + u2) * by, dt);
        const auto outer = detail::expi_step(u2 * bx1 + u1 * bx2, (u1 + u2) * by, dt);
        f = outer * inner * f;
    }
    const double drift = (f * f.adjoint() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
    if (drift > 1e-8)
        throw NumericError("half_period_propagator: unitarity drift " + std::to_string(drift) +
                           "; increase the step count");
    return f;
}

// Bulk quasienergy gaps at 0 and Omega/2 from the replica-space two-band
// model with physical-state selection.
inline std::pair<double, double> bloch_gaps(const BlochDrive& drive, int replica_cutoff = 8, int k_points = 161) {
    double g0 = 1e300, gp = 1e300;
    const int m_dim = 2 * (2 * replica_cutoff + 1);
    for (double k : linspace(-pi, pi, static_cast<std::size_t>(k_points))) {
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m_dim, m_dim);
        const double bx = drive.bx(k), by = drive.by(k);
        Eigen::Matrix2cd h0;
        h0 << 0.0, complexd{bx, -by}, complexd{bx, by}, 0.0;
        Eigen::Matrix2cd h1;
        h1 << 0.0, 0.5 * drive.lam, 0.5 * drive.lam, 0.0;
        for (int m = -replica_cutoff; m <= replica_cutoff; ++m) {
            const int off = 2 * (m + replica_cutoff);
            h.block<2, 2>(off, off) = h0 + m * drive.omega_drive * Eigen::Matrix2cd::Identity();
            if (m < replica_cutoff) {
                h.block<2, 2>(off, off + 2) = h1;
                h.block<2, 2>(off + 2, off) = h1.adjoint();
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
        const int m0_off = 2 * replica_cutoff;
        std::vector<std::pair<double, int>> w;
        for (int c = 0; c < m_dim; ++c)
            w.push_back({solver.eigenvectors().col(c).segment<2>(m0_off).squaredNorm(), c});
        std::sort(w.begin(), w.end(), [](auto& a, auto& b) { return a.first > b.first; });
        for (int i = 0; i < 2; ++i) {
            const double f = fold_quasienergy(solver.eigenvalues()(w[static_cast<std::size_t>(i)].second),
                                              drive.omega_drive);
            g0 = std::min(g0, std::abs(f));
            gp = std::min(gp, 0.5 * drive.omega_drive - std::abs(f));
        }
    }
    return {g0, gp};
}

// Doubling contract on the two-band reduction: smallest cutoff for which
// M -> 2M moves no selected quasienergy by more than tol.
inline int choose_replica_cutoff(const BlochDrive& drive, int m_start = 6, double tol = 1e-6) {
    auto sample = [&](int m_cut) {
        std::vector<double> vals;
        const int m_dim = 2 * (2 * m_cut + 1);
        for (double k : {0.0, 0.5 * pi, pi}) {
            Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m_dim, m_dim);
            const double bx = drive.bx(k), by = drive.by(k);
            Eigen::Matrix2cd h0;
            h0 << 0.0, complexd{bx, -by}, complexd{bx, by}, 0.0;
            Eigen::Matrix2cd h1;
            h1 << 0.0, 0.5 * drive.lam, 0.5 * drive.lam, 0.0;
            for (int m = -m_cut; m <= m_cut; ++m) {
                const int off = 2 * (m + m_cut);
                h.block<2, 2>(off, off) = h0 + m * drive.omega_drive * Eigen::Matrix2cd::Identity();
                if (m < m_cut) {
                    h.block<2, 2>(off, off + 2) = h1;
                    h.block<2, 2>(off + 2, off) = h1.adjoint();
                }
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
            std::vector<std::pair<double, int>> w;
            for (int c = 0; c < m_dim; ++c)
                w.push_back({solver.eigenvectors().col(c).segment<2>(2 * m_cut).squaredNorm(), c});
            std::sort(w.begin(), w.end(), [](auto& a, auto& b) { return a.first > b.first; });
            for (int i = 0; i < 2; ++i)
                vals.push_back(fold_quasienergy(solver.eigenvalues()(w[static_cast<std::size_t>(i)].second),
                                                drive.omega_drive));
        }
        std::sort(vals.begin(), vals.end());
        return vals;
    };
    for (int m_cut = m_start; m_cut <= 48; m_cut *= 2) {
        const auto a = sample(m_cut);
        const auto b = sample(2 * m_cut);
        double shift = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) shift = std::max(shift, std::abs(a[i] - b[i]));
        if (shift < tol) return m_cut;
    }
    throw NumericError("choose_replica_cutoff: no converged cutoff up to M = 48");
}

// ----------------------------- winding numbers ---------------------------------

struct WindingReport {
    int v0 = 0;
    int v_plus = 0;
    int k_points = 0;
    double residual0 = 0.0;      // distance of the raw winding from the integer
    double residual_plus = 0.0;
    bool reliable = false;
};

// Chiral invariants from the canonical blocks of F(k) = [[a, b], [c, d]] in
// the sigma_z eigenbasis: the winding of b counts edge modes at quasienergy 0
// and the winding of d counts them at Omega/2. Orientation is fixed so that
// the weak-intracell static chain (which hosts one zero mode per end) comes
// out at v0 = +1.
inline WindingReport winding_numbers(const BlochDrive& drive, int k_points = 257, int propagator_steps = 512) {
    if (k_points < 32) throw ValidationError("winding_numbers: need at least 32 k points");
    const auto ks = linspace(-pi, pi, static_cast<std::size_t>(k_points));
    std::vector<complexd> b(ks.size()), d(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const auto f = half_period_propagator(ks[i], drive, propagator_steps);
        b[i] = f(0, 1);
        d[i] = f(1, 1);
        if (std::abs(b[i]) < 1e-8 || std::abs(d[i]) < 1e-8)
            throw NumericError("winding_numbers: |b(k)| or |d(k)| vanishes (gap closing, invariant undefined)");
    }
    auto accumulate = [](const std::vector<complexd>& z) {
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < z.size(); ++i) total += std::arg(z[i + 1] / z[i]);
        return total / (2.0 * pi);
    };
    const double raw_b = -accumulate(b);  // orientation per the static oracle
    const double raw_d = accumulate(d);

    WindingReport rep;
    rep.k_points = k_points;
    rep.v0 = static_cast<int>(std::lround(raw_b));
    rep.v_plus = static_cast<int>(std::lround(raw_d));
    rep.residual0 = std::abs(raw_b - rep.v0);
    rep.residual_plus = std::abs(raw_d - rep.v_plus);
    rep.reliable = rep.residual0 < 0.05 && rep.residual_plus < 0.05;
    return rep;
}

// ----------------------------- edge-mode census --------------------------------

struct EdgeCensus {
    int at_zero = 0;
    int at_pi = 0;  // quasienergy Omega/2
};

// Brute-force oracle for the invariants: count edge-localized physical
// quasienergy states of the open chain near 0 and near Omega/2. A state is
// edge-localized when >= `weight_threshold` of its site weight lies on the
// outer `edge_fraction` of sites at either end.
inline EdgeCensus edge_mode_census(const FloquetOperator& op, double tolerance, double edge_fraction = 0.1,
                                   double weight_threshold = 0.6) {
    if (!(tolerance > 0.0)) throw ValidationError("edge_mode_census: tolerance must be > 0");
    const int n = op.n_sites();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(op.dense());
    if (solver.info() != Eigen::Success) throw NumericError("edge_mode_census: eigensolver failed");

    const int m0_off = op.replica_cutoff * n;
    std::vector<std::pair<double, int>> weighted;
    for (int c = 0; c < op.dim(); ++c)
        weighted.push_back({solver.eigenvectors().col(c).segment(m0_off, n).squaredNorm(), c});
    std::sort(weighted.begin(), weighted.end(), [](auto& a, auto& b) { return a.first > b.first; });

    const int edge_sites = std::max(1, static_cast<int>(std::ceil(edge_fraction * n)));
    EdgeCensus census;
    for (int i = 0; i < n; ++i) {
        const int c = weighted[static_cast<std::size_t>(i)].second;
        const double f = fold_quasienergy(solver.eigenvalues()(c), op.omega_drive);
        const bool near_zero = std::abs(f) < tolerance;
        const bool near_pi = (0.5 * op.omega_drive - std::abs(f)) < tolerance;
        if (!near_zero && !near_pi) continue;

        // site weights summed over replicas
        Eigen::VectorXd site_w = Eigen::VectorXd::Zero(n);
        for (int m = 0; m < op.n_replicas(); ++m)
            site_w += solver.eigenvectors().col(c).segment(m * n, n).cwiseAbs2();
        double edge_w = 0.0;
        for (int j = 0; j < edge_sites; ++j) edge_w += site_w(j) + site_w(n - 1 - j);
        if (edge_w / site_w.sum() >= weight_threshold) {
            if (near_zero) ++census.at_zero;
            if (near_pi) ++census.at_pi;
        }
    }
    return census;
}

}  // namespace degcav::floquet
