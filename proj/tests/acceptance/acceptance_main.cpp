// Acceptance suite: one integration check per criterion, each printed as a
// single [PASS]/[FAIL] line. Exit code is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include "degcav/floquet.hpp"
#include "degcav/io.hpp"
#include "degcav/lattice.hpp"
#include "degcav/optics.hpp"
#include "degcav/response.hpp"

using namespace degcav;

namespace {

unsigned g_threads = 0;

// ---------------------------------------------------------------------------
// harness
// ---------------------------------------------------------------------------

struct CheckFailure {
    std::string message;
};

void require(bool ok, const std::string& message) {
    if (!ok) throw CheckFailure{message};
}

template <typename T>
std::string str(T v) {
    std::ostringstream ss;
    ss << v;
    return ss.str();
}

int run_criterion(int number, const std::string& title, double budget_seconds,
                  const std::function<std::string()>& body) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    std::string detail;
    bool pass = true;
    try {
        detail = body();
    } catch (const CheckFailure& f) {
        pass = false;
        detail = f.message;
    } catch (const std::exception& e) {
        pass = false;
        detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    if (pass && budget_seconds > 0.0 && secs > budget_seconds) {
        pass = false;
        detail = "runtime " + str(secs) + " s exceeds the " + str(budget_seconds) + " s budget";
    }
    std::printf("[%s] criterion %2d: %s (%.1f s)%s%s\n", pass ? "PASS" : "FAIL", number, title.c_str(), secs,
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// shared fixtures
// ---------------------------------------------------------------------------

optics::OpticalSetup paper_setup(int n) {
    optics::OpticalSetup s;
    s.focal_length = 100.0;
    s.wavelength = 0.885e-3;
    s.waist = 0.2;
    s.hopping_step = n;
    s.max_oam = 49;
    return s;
}

std::map<int, optics::PinholeReport>& pinhole_tables() {
    static std::map<int, optics::PinholeReport> tables;
    return tables;
}

const optics::PinholeReport& table_for(int n) {
    auto& tables = pinhole_tables();
    auto it = tables.find(n);
    if (it != tables.end()) return it->second;
    optics::CollinsGrids grids;
    grids.threads = g_threads;
    return tables.emplace(n, optics::eta_table(paper_setup(n), 4, grids)).first->second;
}

lattice::LatticeModel fig4_chain(int n, double j0prime, int l_max = 49, int l_extra = 25) {
    lattice::SSHParams p;
    p.j0 = j0prime;
    p.phase = 0.0;
    p.j1 = 1.0;
    p.l_max = l_max;
    p.step = n;
    p.eta = table_for(n).eta;
    auto m = lattice::build_total_chain(p, l_extra);
    lattice::apply_center_decay(m, 0.05, 5.0);
    return m;
}

// mid-gap scan grid that skips omega = 0 exactly (the lossless side chains
// host needle-thin dark resonances pinned there)
std::vector<double> midgap_grid(double half_width, std::size_t points) {
    std::vector<double> g(points);
    const double step = 2.0 * half_width / static_cast<double>(points);
    for (std::size_t i = 0; i < points; ++i) g[i] = -half_width + (static_cast<double>(i) + 0.5) * step;
    return g;
}

struct Peak {
    double omega;
    double value;
};

// local maxima merged by prominence: a candidate only counts as resolved when
// the valley toward its taller neighbor drops below (1 - prominence) of the
// lower peak
std::vector<Peak> resolved_peaks(const std::vector<double>& w, const std::vector<double>& v,
                                 double prominence) {
    std::vector<std::size_t> maxima;
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
        if (v[i] > v[i - 1] && v[i] >= v[i + 1]) maxima.push_back(i);
    std::sort(maxima.begin(), maxima.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });

    std::vector<std::size_t> kept;
    for (std::size_t cand : maxima) {
        bool separate = true;
        for (std::size_t ref : kept) {
            const auto lo = std::min(cand, ref), hi = std::max(cand, ref);
            double valley = v[lo];
            for (std::size_t i = lo; i <= hi; ++i) valley = std::min(valley, v[i]);
            const double lower_peak = std::min(v[cand], v[ref]);
            if (valley > (1.0 - prominence) * lower_peak) {
                separate = false;  // merged into the taller feature
                break;
            }
        }
        if (separate) kept.push_back(cand);
    }
    std::sort(kept.begin(), kept.end());
    std::vector<Peak> out;
    for (std::size_t i : kept) out.push_back({w[i], v[i]});
    return out;
}

double max_in_band(const response::SpectrumResult& sp, double lo, double hi) {
    double best = 0.0;
    for (std::size_t i = 0; i < sp.omega.size(); ++i) {
        const double a = std::abs(sp.omega[i]);
        if (a >= lo && a <= hi) best = std::max(best, sp.values[i]);
    }
    return best;
}

struct LinFit {
    double slope;
    double r2;
};

LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double inter = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double mean = sy / n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        ss_res += std::pow(y[i] - (slope * x[i] + inter), 2);
        ss_tot += std::pow(y[i] - mean, 2);
    }
    return {slope, ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0};
}

// ---------------------------------------------------------------------------
// criteria 1-3: pinhole tables and containments
// ---------------------------------------------------------------------------

std::string criterion1() {
    const std::vector<double> rh_ref{0.123, 0.154, 0.180, 0.204, 0.224};
    const std::vector<double> eta1_ref{0.22, 0.095, 0.039, 0.017, 0.007};
    std::string detail = "r_h =";
    for (int n = 1; n <= 5; ++n) {
        const auto& rep = table_for(n);
        const double rh = rep.pinhole_radius;
        const double e1 = rep.eta[0];
        require(std::abs(rh - rh_ref[std::size_t(n - 1)]) <= 0.03 * rh_ref[std::size_t(n - 1)],
                "r_h(n=" + str(n) + ") = " + str(rh) + " outside 3% of " + str(rh_ref[std::size_t(n - 1)]));
        require(std::abs(e1 - eta1_ref[std::size_t(n - 1)]) <= 0.10 * eta1_ref[std::size_t(n - 1)],
                "eta_1(n=" + str(n) + ") = " + str(e1) + " outside 10% of " + str(eta1_ref[std::size_t(n - 1)]));
        if (n > 1)
            require(rh > table_for(n - 1).pinhole_radius,
                    "r_h must increase with the hopping step (n = " + str(n) + ")");
        detail += " " + io::fmt(rh);
    }
    return detail + " mm";
}

std::string criterion2() {
    const std::map<int, std::vector<double>> ref{{1, {0.22, 0.036, 0.004, 3.0e-4}},
                                                 {2, {0.095, 0.002, 2.2e-5, 1.2e-7}},
                                                 {3, {0.039, 1.3e-4, 1.2e-7}}};
    for (const auto& [n, expected] : ref) {
        const auto& rep = table_for(n);
        for (std::size_t j = 0; j < expected.size(); ++j) {
            const double got = rep.eta[j];
            const double want = expected[j];
            if (want >= 1e-4) {
                require(std::abs(got - want) <= 0.15 * want, "eta(n=" + str(n) + ", j=" + str(j + 1) + ") = " +
                                                                 str(got) + " outside 15% of " + str(want));
            } else {
                require(got > 0.1 * want && got < 10.0 * want,
                        "eta(n=" + str(n) + ", j=" + str(j + 1) + ") = " + str(got) +
                            " not within an order of magnitude of " + str(want));
            }
        }
        // log-linear decay in j
        std::vector<double> xs, ys;
        for (std::size_t j = 0; j < rep.eta.size(); ++j)
            if (rep.eta[j] > 1e-9) {
                xs.push_back(double(j + 1));
                ys.push_back(std::log(rep.eta[j]));
            }
        const auto fit = linear_fit(xs, ys);
        require(fit.slope < 0.0 && fit.r2 > 0.95,
                "eta(n=" + str(n) + ") decay fit R^2 = " + str(fit.r2) + " (need > 0.95, negative slope)");
    }
    // eta_1 itself decays exponentially in the hopping step
    std::vector<double> xs, ys;
    for (int n = 1; n <= 5; ++n) {
        xs.push_back(n);
        ys.push_back(std::log(table_for(n).eta[0]));
    }
    const auto fit = linear_fit(xs, ys);
    require(fit.slope < 0.0 && fit.r2 > 0.95, "eta_1(n) fit R^2 = " + str(fit.r2));
    return "eta tables within bands; log-linear fits R^2 > 0.95";
}

std::string criterion3() {
    const std::map<int, double> ref{{1, 0.78}, {3, 0.96}, {5, 0.99}};
    std::string detail = "containment_l0 =";
    for (const auto& [n, want] : ref) {
        const double got = table_for(n).containment_l0;
        require(std::abs(got - want) <= 0.02,
                "containment(n=" + str(n) + ") = " + str(got) + " outside 2 points of " + str(want));
        detail += " " + io::fmt(got);
    }
    return detail;
}

// ---------------------------------------------------------------------------
// criterion 4: scalar input-output oracle
// ---------------------------------------------------------------------------

std::string criterion4() {
    const double gamma = 0.37;
    lattice::LatticeModel m;
    m.sites.push_back(lattice::SiteLabel::of(0, lattice::Polarization::H));
    m.decay.assign(1, gamma);
    m.block.assign(1, lattice::Block::center);
    double worst = 0.0, worst_pass = 0.0;
    for (double omega : linspace(-5.0 * gamma, 5.0 * gamma, 201)) {
        const auto t = response::transmission_matrix(m, omega);
        const complexd expect = complexd{0.0, -gamma} / complexd{omega, 0.5 * gamma};
        worst = std::max(worst, std::abs(t(0, 0) - expect));
        worst_pass = std::max(worst_pass, std::abs(std::abs(1.0 + t(0, 0)) - 1.0));
    }
    require(worst <= 1e-10, "|T - analytic| = " + str(worst));
    require(worst_pass <= 1e-10, "|1+T| deviates from 1 by " + str(worst_pass));
    return "max|T - analytic| = " + str(worst) + ", all-pass defect = " + str(worst_pass);
}

// ---------------------------------------------------------------------------
// criteria 5-6: static edge spectroscopy
// ---------------------------------------------------------------------------

std::string criterion5() {
    std::string detail;

    {  // n = 4, topological: mid-gap peak over the in-gap background
        const auto model = fig4_chain(4, 0.5);
        const double half_gap = 0.5;  // J1 - J0'
        const auto sp = response::total_transmission(model, linspace(-3.0, 3.0, 801), g_threads);
        const double tau0 = response::total_transmission(model, {0.0}, 1).values[0];
        const double bg = max_in_band(sp, 0.3 * half_gap, 0.7 * half_gap);
        require(tau0 >= 5.0 * bg, "tau(0) = " + str(tau0) + " vs background " + str(bg));
        detail += "tau0/bg = " + io::fmt(tau0 / bg);
    }
    {  // n = 4, trivial: no mid-gap peak
        const auto model = fig4_chain(4, 1.5);
        const auto sp = response::total_transmission(model, linspace(-3.0, 3.0, 801), g_threads);
        const double tau0 = response::total_transmission(model, {0.0}, 1).values[0];
        const double band_max = max_in_band(sp, 0.5, 2.5);
        require(tau0 < 0.10 * band_max, "trivial tau(0) = " + str(tau0) + " vs band max " + str(band_max));
        detail += ", trivial tau0/band = " + io::fmt(tau0 / band_max);
    }
    // Mid-gap peak counting runs at the default spectrometer resolution
    // (801 points over [-3, 3] -> 0.0075 spacing) with half-power prominence:
    // two maxima count as resolved only when the valley between them falls
    // below half the lower peak. The sub-linewidth coherent notch pinned at
    // omega = 0 is narrower than one resolution element by construction.
    {  // n = 2: two resolved split peaks, symmetric about 0
        const auto model = fig4_chain(2, 0.5);
        const auto grid = midgap_grid(0.15, 40);
        const auto sp = response::total_transmission(model, grid, g_threads);
        const auto peaks = resolved_peaks(sp.omega, sp.values, 0.50);
        require(peaks.size() == 2,
                "n=2 mid-gap peak count = " + str(peaks.size()) + " (expected exactly 2)");
        require(std::abs(peaks[0].omega + peaks[1].omega) < 0.01,
                "n=2 peaks not symmetric: " + str(peaks[0].omega) + ", " + str(peaks[1].omega));
        detail += ", n=2 split at +/-" + io::fmt(peaks[1].omega);
    }
    {  // n = 4: the split is unresolved at the same resolution
        const auto model = fig4_chain(4, 0.5);
        const auto grid = midgap_grid(0.15, 40);
        const auto sp = response::total_transmission(model, grid, g_threads);
        const auto peaks = resolved_peaks(sp.omega, sp.values, 0.50);
        require(peaks.size() == 1, "n=4 mid-gap peak count = " + str(peaks.size()) + " (expected 1)");
    }
    return detail;
}

std::string criterion6() {
    lattice::SSHParams p;
    p.j0 = 0.5;
    p.phase = 0.0;
    p.j1 = 1.0;
    p.l_max = 49;
    auto model = lattice::soft_boundary_chain(p, std::sqrt(15.0), 25, 0.05, 1.0);
    const auto sp = response::total_transmission(model, linspace(-3.0, 3.0, 801), g_threads);
    const double tau0 = response::total_transmission(model, {0.0}, 1).values[0];
    const double band_max = max_in_band(sp, 0.5, 2.5);
    require(tau0 < 0.10 * band_max,
            "soft-boundary tau(0) = " + str(tau0) + " vs band max " + str(band_max));
    return "tau0/band = " + io::fmt(tau0 / band_max) + " (edge signature erased)";
}

// ---------------------------------------------------------------------------
// criterion 7: pulse dynamics across the transition
// ---------------------------------------------------------------------------

response::SweepCurve pulse_sweep(int n, const std::vector<double>& grid) {
    response::PulseSpec pulse;  // exp[-(t-3)^2/8] / sqrt(2 sqrt(pi)) on site 0
    auto factory = [n](double j0p) { return fig4_chain(n, j0p); };
    return response::edge_persistence_sweep(factory, pulse, 15.0, grid, g_threads);
}

// In the topological window N0(t*) decreases monotonically with J0' unless
// the split edge modes beat against each other; the interference shows up as
// grid-step rises of the sweep curve. A rise must clear 1% to count.
int oscillation_rises(const response::SweepCurve& curve, double window_hi) {
    int rises = 0;
    for (std::size_t i = 0; i + 1 < curve.parameter.size(); ++i) {
        if (curve.parameter[i + 1] > window_hi) break;
        if (curve.n0[i + 1] > 1.01 * curve.n0[i]) ++rises;
    }
    return rises;
}

std::string criterion7() {
    const auto grid = linspace(0.5, 1.5, 41);
    const auto sweep4 = pulse_sweep(4, grid);
    const auto sweep2 = pulse_sweep(2, grid);

    auto value_at = [&](const response::SweepCurve& c, double j0p) {
        for (std::size_t i = 0; i < c.parameter.size(); ++i)
            if (std::abs(c.parameter[i] - j0p) < 1e-9) return c.n0[i];
        throw CheckFailure{"sweep grid misses " + str(j0p)};
    };
    const double lo = value_at(sweep4, 0.8), hi = value_at(sweep4, 1.2);
    require(lo >= 10.0 * hi, "N0(0.8)/N0(1.2) = " + str(lo / hi) + " (need >= 10)");

    // transition: maximal log-derivative of the n=4 curve
    double best = 0.0, at = 0.0;
    for (std::size_t i = 0; i + 1 < sweep4.parameter.size(); ++i) {
        const double d = std::abs(std::log10(std::max(sweep4.n0[i + 1], 1e-300)) -
                                  std::log10(std::max(sweep4.n0[i], 1e-300)));
        if (d > best) {
            best = d;
            at = 0.5 * (sweep4.parameter[i] + sweep4.parameter[i + 1]);
        }
    }
    require(std::abs(at - 1.0) <= 0.05, "transition located at J0' = " + str(at));

    const int osc2 = oscillation_rises(sweep2, 0.9);
    const int osc4 = oscillation_rises(sweep4, 0.9);
    require(osc2 >= 2, "n=2 interference bump not detected (" + str(osc2) + " rises)");
    require(osc4 == 0, "n=4 curve is not monotone (" + str(osc4) + " rises)");
    return "ratio = " + io::fmt(lo / hi) + ", transition at " + io::fmt(at) + ", rises(n=2) = " +
           str(osc2) + ", rises(n=4) = " + str(osc4);
}

// ---------------------------------------------------------------------------
// criteria 8-9: Floquet spectra, staircases, invariants
// ---------------------------------------------------------------------------

floquet::DriveSpec fig5_drive(double omega) {
    floquet::DriveSpec d;
    d.j0 = 2.0;
    d.j1 = 1.0;
    d.lam = 1.6;
    d.omega_drive = omega;
    return d;
}

lattice::SSHParams fig5_chain() {
    lattice::SSHParams p;
    p.j1 = 1.0;
    p.l_max = 49;
    p.step = 4;
    p.eta = table_for(4).eta;
    return p;
}

// A gap closing sweeps bulk states through the probe frequency, so each
// staircase step is decorated by a resonant spike of T versus Omega. The
// spike is the robust locator: a local maximum at least twice the lowest
// value within +/- window on both sides.
std::vector<double> staircase_steps(const std::vector<double>& omegas, const std::vector<double>& values,
                                    double window, double lo, double hi) {
    std::vector<double> steps;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        if (omegas[i] <= lo || omegas[i] >= hi) continue;
        if (!(values[i] > values[i - 1] && values[i] >= values[i + 1])) continue;
        double left_min = values[i], right_min = values[i];
        for (std::size_t j = 0; j < values.size(); ++j) {
            if (omegas[j] < omegas[i] && omegas[j] >= omegas[i] - window)
                left_min = std::min(left_min, values[j]);
            if (omegas[j] > omegas[i] && omegas[j] <= omegas[i] + window)
                right_min = std::min(right_min, values[j]);
        }
        if (values[i] >= 2.0 * left_min && values[i] >= 2.0 * right_min) steps.push_back(omegas[i]);
    }
    return steps;
}

std::string criterion8() {
    const auto chain = fig5_chain();
    std::string detail;

    {  // lambda = 0 reduction at 1e-8
        lattice::SSHParams small = chain;
        small.l_max = 10;
        auto drive = fig5_drive(3.7);
        drive.lam = 0.0;
        const auto op = floquet::build_floquet_hamiltonian(floquet::drive_to_fourier(drive, small), 3.7, 6);
        const auto qs = floquet::quasienergies(op);
        lattice::SSHParams stat = small;
        stat.j0 = 2.0;
        const auto ev = lattice::spectrum(lattice::build_ssh(stat)).eigenvalues;
        std::vector<double> expect;
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            expect.push_back(floquet::fold_quasienergy(ev(i), 3.7));
        std::sort(expect.begin(), expect.end());
        require(qs.values.size() == expect.size(), "selection lost states in the lambda = 0 reduction");
        for (std::size_t i = 0; i < expect.size(); ++i)
            require(std::abs(qs.values[i] - expect[i]) < 1e-8,
                    "lambda=0 quasienergy off by " + str(std::abs(qs.values[i] - expect[i])));
    }

    {  // T vanishing inside both gaps at large Omega (trivial phase)
        const double om = 10.0;
        const auto drive = fig5_drive(om);
        const auto bloch = floquet::BlochDrive::ssh(drive);
        const auto [gap0, gap_pi] = floquet::bloch_gaps(bloch);
        const int m_cut = floquet::choose_replica_cutoff(bloch);
        const auto blocks = floquet::drive_to_fourier(drive, chain);
        const auto op = floquet::build_floquet_hamiltonian(blocks, om, m_cut);
        const auto decay = lattice::decay_profile(blocks.n_sites, 0.05, 5.0);

        std::vector<double> zone;
        for (int i = 0; i < 161; ++i) zone.push_back(-0.5 * om + (i + 0.5) * om / 161.0);
        const auto sp = floquet::floquet_spectrum_response(op, decay, zone, {}, g_threads);

        const double band_lo = gap0, band_hi = 0.5 * om - gap_pi;
        double band_max = 0.0, gap0_max = 0.0, gappi_max = 0.0;
        for (std::size_t i = 0; i < sp.omega.size(); ++i) {
            const double a = std::abs(sp.omega[i]);
            if (a > band_lo && a < band_hi) band_max = std::max(band_max, sp.values[i]);
            if (a < 0.8 * band_lo) gap0_max = std::max(gap0_max, sp.values[i]);
            if (a > band_hi + 0.2 * gap_pi) gappi_max = std::max(gappi_max, sp.values[i]);
        }
        require(gap0_max < 0.05 * band_max,
                "zero-gap response " + str(gap0_max) + " vs band " + str(band_max));
        require(gappi_max < 0.05 * band_max,
                "pi-gap response " + str(gappi_max) + " vs band " + str(band_max));
        detail += "gap/band at Omega=10: " + io::fmt(gap0_max / band_max) + ", " +
                  io::fmt(gappi_max / band_max);
    }

    {  // staircase jumps line up with the bulk gap closings
        const auto scan = linspace(3.0, 12.0, 91);
        std::vector<double> t_zero(scan.size()), t_half(scan.size());
        std::vector<double> gap0(scan.size()), gap_pi(scan.size());
        for (std::size_t i = 0; i < scan.size(); ++i) {
            const auto drive = fig5_drive(scan[i]);
            const auto bloch = floquet::BlochDrive::ssh(drive);
            const auto gaps = floquet::bloch_gaps(bloch, 8, 81);
            gap0[i] = gaps.first;
            gap_pi[i] = gaps.second;
            const int m_cut = floquet::choose_replica_cutoff(bloch);
            const auto blocks = floquet::drive_to_fourier(drive, chain);
            const auto op = floquet::build_floquet_hamiltonian(blocks, scan[i], m_cut);
            const auto decay = lattice::decay_profile(blocks.n_sites, 0.05, 5.0);
            const auto sp =
                floquet::floquet_spectrum_response(op, decay, {0.0, 0.5 * scan[i]}, {}, g_threads);
            t_zero[i] = sp.values[0];
            t_half[i] = sp.values[1];
        }
        // interior window keeps boundary artifacts out of both lists
        const double lo = 3.2, hi = 11.8;
        auto closings = [&](const std::vector<double>& gap) {
            std::vector<double> out;
            for (std::size_t i = 0; i < gap.size(); ++i) {
                if (gap[i] < 0.02 && scan[i] > lo && scan[i] < hi) {
                    if (out.empty() || scan[i] - out.back() > 0.3)
                        out.push_back(scan[i]);
                    else
                        out.back() = scan[i];
                }
            }
            return out;
        };
        const auto close0 = closings(gap0);
        const auto close_pi = closings(gap_pi);
        const auto steps0 = staircase_steps(scan, t_zero, 0.5, lo, hi);
        const auto steps_pi = staircase_steps(scan, t_half, 0.5, lo, hi);

        auto match = [](const std::vector<double>& a, const std::vector<double>& b, double tol) {
            for (double x : a) {
                double best = 1e300;
                for (double y : b) best = std::min(best, std::abs(x - y));
                if (best > tol) return false;
            }
            return true;
        };
        require(match(close_pi, steps_pi, 0.2) && match(steps_pi, close_pi, 0.2),
                "pi staircase steps " + str(steps_pi.size()) + " vs gap closings " + str(close_pi.size()) +
                    " mismatch");
        require(match(close0, steps0, 0.2) && match(steps0, close0, 0.2),
                "zero staircase steps " + str(steps0.size()) + " vs gap closings " + str(close0.size()) +
                    " mismatch");
        require(!close_pi.empty(), "expected at least one pi-gap closing in the scan window");

        // staircase contrast: the edge-mode plateau sits far above the
        // post-transition tail
        double plateau = 0.0, tail = 0.0;
        int n_plateau = 0, n_tail = 0;
        for (std::size_t i = 0; i < scan.size(); ++i) {
            if (scan[i] >= 4.0 && scan[i] <= 5.5) {
                plateau += t_half[i];
                ++n_plateau;
            }
            if (scan[i] >= 8.0) {
                tail += t_half[i];
                ++n_tail;
            }
        }
        plateau /= n_plateau;
        tail /= n_tail;
        require(plateau >= 10.0 * tail, "pi staircase contrast " + str(plateau / tail) + " below 10x");
        detail += "; pi transition at Omega = " + io::fmt(close_pi.front()) +
                  ", staircase contrast = " + io::fmt(plateau / tail);
    }
    return detail;
}

std::string criterion9() {
    {  // static limits
        auto topo = fig5_drive(20.0);
        topo.j0 = 0.5;
        topo.lam = 1e-9;
        const auto rep_t = floquet::winding_numbers(floquet::BlochDrive::ssh(topo));
        require(rep_t.v0 == 1 && rep_t.v_plus == 0, "static topological limit gave (" + str(rep_t.v0) +
                                                        ", " + str(rep_t.v_plus) + ")");
        auto triv = fig5_drive(20.0);
        triv.lam = 1e-9;
        const auto rep_0 = floquet::winding_numbers(floquet::BlochDrive::ssh(triv));
        require(rep_0.v0 == 0 && rep_0.v_plus == 0, "static trivial limit gave (" + str(rep_0.v0) + ", " +
                                                        str(rep_0.v_plus) + ")");
    }

    std::string detail = "(v0, v+) =";
    lattice::SSHParams census_chain;
    census_chain.j1 = 1.0;
    census_chain.l_max = 30;
    for (double om : {4.0, 5.0, 5.5, 6.5, 7.0}) {
        const auto drive = fig5_drive(om);
        const auto bloch = floquet::BlochDrive::ssh(drive);

        const auto rep = floquet::winding_numbers(bloch, 257);
        require(rep.reliable, "winding residual " + str(std::max(rep.residual0, rep.residual_plus)) +
                                  " at Omega = " + str(om));
        const auto fine = floquet::winding_numbers(bloch, 1025);
        require(fine.v0 == rep.v0 && fine.v_plus == rep.v_plus,
                "winding changed under k refinement at Omega = " + str(om));

        // bulk-edge correspondence on the open chain
        lattice::SSHParams p = census_chain;
        p.j0 = drive.j0;
        const int m_cut = floquet::choose_replica_cutoff(bloch);
        const auto op = floquet::build_floquet_hamiltonian(floquet::drive_to_fourier(drive, p),
                                                           om, m_cut);
        const auto gaps = floquet::bloch_gaps(bloch);
        const double tol = 0.4 * std::max(0.05, std::min(gaps.first, gaps.second));
        const auto census = floquet::edge_mode_census(op, tol);
        require(census.at_zero == 2 * rep.v0 && census.at_pi == 2 * rep.v_plus,
                "census (" + str(census.at_zero) + ", " + str(census.at_pi) + ") vs invariants (" +
                    str(2 * rep.v0) + ", " + str(2 * rep.v_plus) + ") at Omega = " + str(om));
        detail += " " + str(om) + ":(" + str(rep.v0) + "," + str(rep.v_plus) + ")";
    }
    return detail;
}

// ---------------------------------------------------------------------------
// criterion 10: randomized property suites
// ---------------------------------------------------------------------------

std::string criterion10() {
    std::mt19937 rng(20250809);
    std::uniform_real_distribution<double> jd(0.1, 2.0), gd(0.05, 0.6), ed(0.0, 0.3);

    auto random_model = [&](int max_cells, double gamma_min) {
        lattice::SSHParams p;
        p.j0 = jd(rng);
        p.j1 = jd(rng);
        p.l_max = 1 + int(rng() % unsigned(max_cells));
        p.eta = {ed(rng), ed(rng) * 0.1};
        auto m = lattice::build_ssh(p);
        for (auto& g : m.decay) g = std::max(gamma_min, gd(rng));
        return m;
    };

    // Hermiticity + chiral symmetry + tau symmetry on 200 random instances
    for (int trial = 0; trial < 200; ++trial) {
        auto m = random_model(5, 0.05);  // <= 12 sites
        const auto h = lattice::dense_matrix(m);
        require((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0, "hermiticity broken");
        const auto ev = lattice::spectrum(m).eigenvalues;
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            require(std::abs(ev(i) + ev(ev.size() - 1 - i)) < 1e-10, "chiral symmetry broken");
        const double w = -2.0 + 4.0 * (trial / 200.0);
        const auto plus = response::total_transmission(m, {std::abs(w) + 0.05}, 1).values[0];
        const auto minus = response::total_transmission(m, {-std::abs(w) - 0.05}, 1).values[0];
        require(std::abs(plus - minus) <= 1e-8 * std::max(1.0, plus), "tau(omega) asymmetry");
    }

    // passivity after the pulse on 20 instances
    for (int trial = 0; trial < 20; ++trial) {
        auto m = random_model(5, 0.05);
        response::PulseSpec pulse;
        pulse.target_site = 0;
        const auto t_grid = linspace(0.0, 24.0, 49);
        const auto tr = response::pulse_response(m, pulse, t_grid);
        double prev = -1.0;
        for (std::size_t s = 0; s < t_grid.size(); ++s) {
            if (t_grid[s] <= pulse.center + 6.0 * pulse.width) continue;
            const double total = tr.intensity.col(static_cast<Eigen::Index>(s)).sum();
            require(prev < 0.0 || total <= prev + 1e-6, "passivity violated");
            prev = total;
        }
    }

    // Parseval on confined LG inputs, l <= 10
    {
        optics::OpticalSetup setup = paper_setup(1);
        std::uniform_real_distribution<double> ad(0.4, 1.4), bd(60.0, 180.0), cd(-0.008, 0.008);
        for (int l : {0, 2, 5, 8, 10}) {
            const double a = ad(rng), b = bd(rng), c = cd(rng);
            const optics::RayMatrix ray(a, b, c, (1.0 + b * c) / a);
            const double w_in = setup.waist * (6.0 + 2.5 * std::sqrt(double(l)));
            auto in = optics::lg_field(l, setup.waist, setup.wavelength, linspace(0.0, w_in, 2049));
            const double wb = setup.wavelength * b / (pi * setup.waist);
            const double w_out = std::hypot(a * setup.waist, wb) * (6.0 + 2.5 * std::sqrt(double(l)));
            double ratio = 0.0;
            optics::propagate_collins(in, ray, setup, linspace(0.0, w_out, 2049), &ratio, g_threads);
            require(std::abs(ratio - 1.0) <= 1e-6, "parseval broke at l = " + str(l) + ": " + str(ratio));
        }
    }

    // frequency-domain vs time-domain steady state at 2%
    for (int trial = 0; trial < 6; ++trial) {
        auto m = random_model(3, 0.25);
        const int n = m.size();
        const double omega = -0.8 + 0.3 * trial;
        const double amp = 1e-3;
        const int src = int(rng() % unsigned(n));
        response::SiteDrive drive{src, [omega, amp](double t) {
                                      return amp * std::min(1.0, t / 10.0) * std::polar(1.0, -omega * t);
                                  }};
        const auto t_grid = linspace(0.0, 90.0, 2);
        const auto tr = response::integrate_driven(m, std::span<const response::SiteDrive>(&drive, 1), t_grid);
        const auto t_mat = response::transmission_matrix(m, omega);
        for (int j = 0; j < n; ++j) {
            const double lhs = std::sqrt(m.decay[std::size_t(j)] * tr.intensity(j, 1));
            const double rhs = std::abs(t_mat(j, src)) * amp;
            if (rhs > 1e-6)
                require(std::abs(lhs - rhs) <= 0.02 * rhs, "steady-state mismatch " + str(lhs / rhs));
        }
    }

    // time-domain vs resolvent Floquet spectrum (positions 5%, heights 15%)
    {
        lattice::SSHParams chain;
        chain.l_max = 2;
        auto drive = fig5_drive(6.0);
        const auto fb = floquet::drive_to_fourier(drive, chain);
        const auto op = floquet::build_floquet_hamiltonian(fb, 6.0, 8);
        const auto decay = lattice::decay_profile(fb.n_sites, 0.08, 5.0);
        const auto grid = linspace(-2.9, 2.9, 117);
        const auto res = floquet::floquet_spectrum_response(op, decay, grid, {}, g_threads);
        const auto td = floquet::time_domain_spectrum(fb, 6.0, decay, grid, 160.0, 3, g_threads);
        auto find_peaks = [&](const response::SpectrumResult& s) {
            std::vector<Peak> p;
            const double top = *std::max_element(s.values.begin(), s.values.end());
            for (std::size_t i = 1; i + 1 < s.values.size(); ++i)
                if (s.values[i] > s.values[i - 1] && s.values[i] >= s.values[i + 1] &&
                    s.values[i] > 0.05 * top)
                    p.push_back({s.omega[i], s.values[i]});
            return p;
        };
        const auto pr = find_peaks(res);
        const auto pt = find_peaks(td);
        require(!pr.empty() && pr.size() == pt.size(), "peak count mismatch between the two routes");
        for (std::size_t i = 0; i < pr.size(); ++i) {
            require(std::abs(pr[i].omega - pt[i].omega) <= 0.05 * 3.0, "peak position drift");
            require(std::abs(pr[i].value - pt[i].value) <= 0.15 * pr[i].value, "peak height drift");
        }
    }

    return "hermiticity/chirality/tau-symmetry on 200 instances; passivity, parseval, "
           "steady-state (2%), floquet cross-method (5%/15%)";
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_threads = static_cast<unsigned>(std::atoi(argv[1]));

    int failures = 0;
    failures += run_criterion(1, "pinhole radii and eta_1 vs the reference table", 30.0, criterion1);
    failures += run_criterion(2, "eta_j tables and exponential decay fits", 30.0, criterion2);
    failures += run_criterion(3, "l=0 containment fractions", 10.0, criterion3);
    failures += run_criterion(4, "single-site analytic transmission oracle", 10.0, criterion4);
    failures += run_criterion(5, "SSH edge spectroscopy (mid-gap peaks)", 120.0, criterion5);
    failures += run_criterion(6, "soft-boundary edge erasure", 60.0, criterion6);
    failures += run_criterion(7, "pulse persistence across the transition", 180.0, criterion7);
    failures += run_criterion(8, "floquet gaps, staircases, lambda=0 reduction", 300.0, criterion8);
    failures += run_criterion(9, "winding numbers and bulk-edge correspondence", 120.0, criterion9);
    failures += run_criterion(10, "randomized property suites", 180.0, criterion10);

    std::printf("%d of 10 criteria passed\n", 10 - failures);
    return failures;
}
