// optics.hpp — paraxial beam propagation through the Collins integral,
// hollow-beam-splitter pinhole geometry, and the resulting hopping-correction
// tables consumed by the lattice builders.
//
// Conventions used throughout:
//   * lengths in mm
//   * a radial field E(r) carries the azimuthal factor e^{i l theta}
//     implicitly; the 2*pi azimuthal measure is absorbed so that the
//     normalization reads  integral_0^inf dr r |E(r)|^2 = 1.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>

#include "degcav/common.hpp"

namespace degcav::optics {

// ------------------------------- domain types --------------------------------

struct OpticalSetup {
    double focal_length = 100.0;   // f, mm
    double wavelength = 0.885e-3;  // lambda, mm
    double waist = 0.2;            // w0 at the SLM plane, mm
    int hopping_step = 1;          // n >= 1
    int max_oam = 49;              // L_m >= 1
    std::optional<double> mirror_radius{};  // dimensionless sqrt(L/2) units

    void validate() const {
        if (!(focal_length > 0.0) || !(wavelength > 0.0) || !(waist > 0.0))
            throw ValidationError("OpticalSetup: lengths must be strictly positive");
        if (hopping_step < 1) throw ValidationError("OpticalSetup: hopping_step must be >= 1");
        if (max_oam < 1) throw ValidationError("OpticalSetup: max_oam must be >= 1");
        if (mirror_radius && !(*mirror_radius >= 0.0))
            throw ValidationError("OpticalSetup: mirror_radius must be >= 0");
    }
};

// 2x2 ABCD ray-transfer matrix of a lossless paraxial system (det = 1).
struct RayMatrix {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    RayMatrix() = default;
    RayMatrix(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {
        if (std::abs(a * d - b * c - 1.0) > 1e-12)
            throw ValidationError("RayMatrix: determinant must equal 1 (lossless system)");
    }

    // Fourier transforming path of a lens of focal length f: [[0, f], [-1/f, 0]].
    static RayMatrix fourier_lens(double f) { return RayMatrix(0.0, f, -1.0 / f, 0.0); }
};

// Sampled complex radial profile of an OAM-l beam on a transverse plane.
struct RadialField {
    int oam_order = 0;
    std::vector<double> radii;         // strictly increasing, starts at >= 0
    std::vector<complexd> amplitudes;  // same length as radii
    double wavelength = 0.885e-3;

    void validate() const {
        if (radii.size() < 8 || radii.size() != amplitudes.size())
            throw ValidationError("RadialField: grid and amplitudes must match and hold >= 8 samples");
        if (radii.front() < 0.0) throw ValidationError("RadialField: grid must start at r >= 0");
        for (std::size_t i = 0; i + 1 < radii.size(); ++i)
            if (!(radii[i + 1] > radii[i])) throw ValidationError("RadialField: grid must be strictly increasing");
        if (!(wavelength > 0.0)) throw ValidationError("RadialField: wavelength must be positive");
    }

    // integral dr r |E|^2 on the stored grid (trapezoid; monotone in extent)
    double energy() const {
        std::vector<double> y(radii.size());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = radii[i] * std::norm(amplitudes[i]);
        return integrate_trapezoid(radii, y);
    }

    void normalize() {
        const double e = energy();
        if (!(e > 0.0)) throw NumericError("RadialField: cannot normalize a zero field");
        const double s = 1.0 / std::sqrt(e);
        for (auto& a : amplitudes) a *= s;
    }
};

// Solved pinhole geometry with the hopping-reduction table.
struct PinholeReport {
    int hopping_step = 1;
    double pinhole_radius = 0.0;  // r_h, mm
    double containment_l0 = 0.0;  // fraction of l=0 intensity inside r_h
    std::vector<double> eta;      // eta_j for j = 1..j_max
    std::vector<double> alpha;    // alpha_j = 1 - eta_j, exactly
    std::vector<std::string> notes;

    void validate() const {
        if (eta.size() != alpha.size()) throw ValidationError("PinholeReport: eta/alpha size mismatch");
        for (std::size_t j = 0; j < eta.size(); ++j) {
            if (eta[j] < 0.0 || eta[j] > 1.0) throw ValidationError("PinholeReport: eta out of [0,1]");
            if (alpha[j] != 1.0 - eta[j]) throw ValidationError("PinholeReport: alpha must equal 1 - eta");
        }
        for (std::size_t j = 0; j + 1 < eta.size(); ++j)
            if (eta[j + 1] >= eta[j] && eta[j + 1] > 1e-12)
                throw ValidationError("PinholeReport: eta must decrease with j until numerically zero");
    }
};

// Grid controls for the Collins quadrature. The defaults resolve the
// f = 100 mm / w0 = 0.2 mm pinhole geometry; the Parseval check is the
// built-in convergence diagnostic for anything else.
struct CollinsGrids {
    double input_extent = 0.0;  // 0 -> auto: 8 * w0
    std::size_t input_samples = 2049;
    double output_extent = 0.0;  // 0 -> auto: max(4 mm, 25 * |lambda B| / (pi w0))
    std::size_t output_samples = 4097;
    unsigned threads = 0;  // 0 -> hardware concurrency
};

// ------------------------------ mode detuning --------------------------------

// Round-trip phase defect of transverse mode (p, l):
//   kL0 - (2p + l + 1) * arccos((A + D) / 2), reduced to (-pi, pi].
// Zero for every (p, l) iff A = D = 1 and kL0 = 2 n pi (degenerate cavity).
inline double mode_detuning(int p, int l, double path_length_phase, const RayMatrix& round_trip) {
    const double half_trace = 0.5 * (round_trip.a + round_trip.d);
    if (std::abs(half_trace) > 1.0 + 1e-12)
        throw NumericError("mode_detuning: |A+D|/2 > 1, cavity outside the stability range");
    const double gouy = std::acos(std::clamp(half_trace, -1.0, 1.0));
    return wrap_angle(path_length_phase - (2.0 * p + l + 1.0) * gouy);
}

// ------------------------------ field builders -------------------------------

// Field at the SLM plane for OAM order l: Gaussian amplitude with a vortex
// phase. The radial profile is l-independent; l only selects the transform
// order downstream.
inline RadialField waist_field(int l, const OpticalSetup& setup, std::vector<double> grid) {
    setup.validate();
    RadialField f;
    f.oam_order = l;
    f.wavelength = setup.wavelength;
    f.radii = std::move(grid);
    f.amplitudes.resize(f.radii.size());
    for (std::size_t i = 0; i < f.radii.size(); ++i) {
        const double r = f.radii[i];
        f.amplitudes[i] = std::exp(-r * r / (setup.waist * setup.waist));
    }
    f.validate();
    f.normalize();
    return f;
}

// Ideal Laguerre-Gauss p=0 amplitude (r/w)^|l| e^{-r^2/w^2}; used by the
// soft-boundary analysis and as a confined test family for the transform.
inline RadialField lg_field(int l, double waist, double wavelength, std::vector<double> grid) {
    RadialField f;
    f.oam_order = l;
    f.wavelength = wavelength;
    f.radii = std::move(grid);
    f.amplitudes.resize(f.radii.size());
    for (std::size_t i = 0; i < f.radii.size(); ++i) {
        const double r = f.radii[i];
        f.amplitudes[i] = std::pow(r / waist, std::abs(l)) * std::exp(-r * r / (waist * waist));
    }
    f.validate();
    f.normalize();
    return f;
}

namespace detail {

// J_l(x) for all l = 0..l_max at once. Upward recurrence from J0, J1 where it
// is stable (l_max < x), Miller's downward recurrence otherwise.
inline void bessel_j_ladder(int l_max, double x, std::span<double> out) {
    if (l_max < 0 || out.size() < static_cast<std::size_t>(l_max) + 1)
        throw ValidationError("bessel_j_ladder: bad output span");
    if (x < 0.0) throw ValidationError("bessel_j_ladder: x must be >= 0");
    if (x < 1e-14) {
        out[0] = 1.0;
        for (int l = 1; l <= l_max; ++l) out[l] = 0.0;
        return;
    }
    if (static_cast<double>(l_max) < x) {
        out[0] = boost::math::cyl_bessel_j(0, x);
        if (l_max >= 1) out[1] = boost::math::cyl_bessel_j(1, x);
        for (int l = 1; l < l_max; ++l) out[l + 1] = (2.0 * l / x) * out[l] - out[l - 1];
        return;
    }
    // Miller: start well above l_max (and hence above x), recur down,
    // normalize with J_0 + 2 sum_k J_{2k} = 1.
    const int start = l_max + static_cast<int>(std::ceil(std::sqrt(40.0 * (l_max + 1)))) + 16;
    std::vector<double> buf(static_cast<std::size_t>(start) + 1, 0.0);
    double jp = 0.0, j = 1e-30;
    buf[static_cast<std::size_t>(start)] = j;
    for (int l = start; l >= 1; --l) {
        double jm = (2.0 * l / x) * j - jp;
        jp = j;
        j = jm;
        if (std::abs(j) > 1e250) {
            for (int m = l - 1; m <= start; ++m) buf[static_cast<std::size_t>(m)] *= 1e-250;
            jp *= 1e-250;
            j *= 1e-250;
        }
        buf[static_cast<std::size_t>(l - 1)] = j;
    }
    double sum = buf[0];
    for (int l = 2; l <= start; l += 2) sum += 2.0 * buf[static_cast<std::size_t>(l)];
    const double scale = 1.0 / sum;
    for (int l = 0; l <= l_max; ++l) out[static_cast<std::size_t>(l)] = buf[static_cast<std::size_t>(l)] * scale;
}

inline double auto_input_extent(const OpticalSetup& setup) { return 8.0 * setup.waist; }

inline double auto_output_extent(const OpticalSetup& setup, const RayMatrix& ray) {
    const double w1 = std::abs(setup.wavelength * ray.b) / (pi * setup.waist);
    return std::max(4.0, 25.0 * w1);
}

inline void check_sampling(const RadialField& field, const RayMatrix& ray, double rho_max) {
    const double lamB = std::abs(field.wavelength * ray.b);
    const double dr = field.radii[1] - field.radii[0];
    const double r_max = field.radii.back();
    // phase advance per input step: chirp + Bessel argument at the grid corner
    const double phase_rate = 2.0 * pi * (std::abs(ray.a) * r_max + rho_max) / lamB;
    if (dr * phase_rate >= pi)
        throw NumericError("propagate_collins: input grid too coarse for the requested output extent "
                           "(Bessel/chirp oscillations unresolved)");
}

}  // namespace detail

// ---------------------------- Collins propagation ----------------------------

// Propagate a radial field of azimuthal order l through an ABCD system with
// B != 0. The 2D Collins integral reduces to a Hankel-type transform:
//
//   E1(r1) = (2 pi / (lambda B)) i^{|l|+1} e^{-i pi D r1^2/(lambda B)}
//            * integral dr0 r0 E0(r0) e^{-i pi A r0^2/(lambda B)} J_|l|(2 pi r0 r1/(lambda B))
//
// The returned field is normalized on its grid; `raw_energy_ratio`, when
// given, receives (output energy)/(input energy) before that renormalization
// (Simpson quadrature on both planes).
inline RadialField propagate_collins(const RadialField& field, const RayMatrix& ray, const OpticalSetup& setup,
                                     std::span<const double> output_radii = {}, double* raw_energy_ratio = nullptr,
                                     unsigned threads = 0) {
    field.validate();
    setup.validate();
    if (ray.b == 0.0) throw NumericError("propagate_collins: B = 0 (imaging configuration) is not supported");
    if (!is_uniform(field.radii)) throw ValidationError("propagate_collins: input grid must be uniform");

    const double lamB = field.wavelength * ray.b;
    const int l = std::abs(field.oam_order);

    std::vector<double> rho;
    if (output_radii.empty()) {
        rho = linspace(0.0, detail::auto_output_extent(setup, ray), CollinsGrids{}.output_samples);
    } else {
        rho.assign(output_radii.begin(), output_radii.end());
    }
    detail::check_sampling(field, ray, rho.back());

    const std::size_t n_in = field.radii.size();
    const std::size_t n_out = rho.size();
    const auto w_in = simpson_weights(n_in, field.radii[1] - field.radii[0]);

    std::vector<complexd> src(n_in);
    for (std::size_t i = 0; i < n_in; ++i) {
        const double r = field.radii[i];
        src[i] = w_in[i] * r * field.amplitudes[i] * std::polar(1.0, -pi * ray.a * r * r / lamB);
    }

    RadialField out;
    out.oam_order = field.oam_order;
    out.wavelength = field.wavelength;
    out.radii = rho;
    out.amplitudes.assign(n_out, complexd{0.0, 0.0});

    const double b_coef = std::abs(2.0 * pi / lamB);
    const complexd front = std::pow(complexd{0.0, 1.0}, l + 1) * (2.0 * pi / lamB);
    parallel_for(n_out, threads, [&](std::size_t k) {
        std::vector<double> ladder(static_cast<std::size_t>(l) + 1);
        complexd acc{0.0, 0.0};
        for (std::size_t i = 0; i < n_in; ++i) {
            detail::bessel_j_ladder(l, b_coef * field.radii[i] * rho[k], ladder);
            acc += src[i] * ladder[static_cast<std::size_t>(l)];
        }
        out.amplitudes[k] = acc * front * std::polar(1.0, -pi * ray.d * rho[k] * rho[k] / lamB);
    });

    if (raw_energy_ratio) {
        std::vector<double> yi(n_in), yo(n_out);
        for (std::size_t i = 0; i < n_in; ++i) yi[i] = field.radii[i] * std::norm(field.amplitudes[i]);
        for (std::size_t k = 0; k < n_out; ++k) yo[k] = rho[k] * std::norm(out.amplitudes[k]);
        *raw_energy_ratio = integrate_simpson(out.radii, yo) / integrate_simpson(field.radii, yi);
    }

    out.normalize();
    return out;
}

// --------------------------- containment / pinhole ---------------------------

// integral_0^radius dr r |E|^2 of a normalized field; cumulative trapezoid so
// the result is monotone nondecreasing in the radius.
inline double containment_fraction(const RadialField& field, double radius) {
    field.validate();
    if (radius < 0.0) throw ValidationError("containment_fraction: radius must be >= 0");
    if (radius > field.radii.back() * (1.0 + 1e-12))
        throw ValidationError("containment_fraction: radius beyond the sampled grid");
    std::vector<double> y(field.radii.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = field.radii[i] * std::norm(field.amplitudes[i]);
    const double c = cumulative_trapezoid_at(field.radii, y, std::min(radius, field.radii.back()));
    return std::clamp(c, 0.0, 1.0);
}

// Beam-splitter-plane fields for several OAM orders in one kernel sweep.
// Every order shares the same radial source profile and Bessel arguments, so
// the ladder J_0..J_max(x) is built once per (r, rho) pair and reused.
inline std::vector<RadialField> bs_plane_fields(std::span<const int> orders, const OpticalSetup& setup,
                                                const CollinsGrids& grids = {}) {
    setup.validate();
    if (orders.empty()) return {};
    int l_max = 0;
    for (int l : orders) {
        if (l < 0) throw ValidationError("bs_plane_fields: orders must be >= 0");
        l_max = std::max(l_max, l);
    }

    const RayMatrix ray = RayMatrix::fourier_lens(setup.focal_length);
    const double r_in = grids.input_extent > 0.0 ? grids.input_extent : detail::auto_input_extent(setup);
    const double r_out = grids.output_extent > 0.0 ? grids.output_extent : detail::auto_output_extent(setup, ray);
    const auto slm = waist_field(0, setup, linspace(0.0, r_in, grids.input_samples));
    const auto rho = linspace(0.0, r_out, grids.output_samples);
    detail::check_sampling(slm, ray, rho.back());

    const double lamB = setup.wavelength * ray.b;
    const std::size_t n_in = slm.radii.size();
    const std::size_t n_out = rho.size();
    const auto w_in = simpson_weights(n_in, slm.radii[1] - slm.radii[0]);

    std::vector<complexd> src(n_in);  // A = 0 on the Fourier path: no input chirp
    for (std::size_t i = 0; i < n_in; ++i) src[i] = w_in[i] * slm.radii[i] * slm.amplitudes[i];

    std::vector<RadialField> out(orders.size());
    for (std::size_t q = 0; q < orders.size(); ++q) {
        out[q].oam_order = orders[q];
        out[q].wavelength = setup.wavelength;
        out[q].radii = rho;
        out[q].amplitudes.assign(n_out, complexd{0.0, 0.0});
    }

    const double b_coef = std::abs(2.0 * pi / lamB);
    parallel_for(n_out, grids.threads, [&](std::size_t k) {
        std::vector<double> ladder(static_cast<std::size_t>(l_max) + 1);
        std::vector<complexd> acc(orders.size(), complexd{0.0, 0.0});
        for (std::size_t i = 0; i < n_in; ++i) {
            detail::bessel_j_ladder(l_max, b_coef * slm.radii[i] * rho[k], ladder);
            for (std::size_t q = 0; q < orders.size(); ++q)
                acc[q] += src[i] * ladder[static_cast<std::size_t>(orders[q])];
        }
        for (std::size_t q = 0; q < orders.size(); ++q)
            out[q].amplitudes[k] = acc[q] * std::pow(complexd{0.0, 1.0}, orders[q] + 1) * (2.0 * pi / lamB);
    });

    for (auto& f : out) f.normalize();
    return out;
}

inline RadialField bs_plane_field(int l, const OpticalSetup& setup, const CollinsGrids& grids = {}) {
    const int orders[1] = {l};
    return bs_plane_fields(orders, setup, grids)[0];
}

// Solve  integral_0^{r_h} dr r |E_0|^2 = integral_{r_h}^inf dr r |E_n|^2
// for the pinhole radius. The difference C_0(r) + C_n(r) - 1 is monotone, so
// bisection converges unconditionally once a sign change exists.
inline double solve_pinhole_radius(const RadialField& e0, const RadialField& en) {
    // both beam cores must fit the grid or the grid-normalized containments
    // are meaningless; vortex beams keep algebraic tails, so the bound is loose
    for (const RadialField* f : {&e0, &en}) {
        double peak = 0.0;
        for (std::size_t i = 0; i < f->radii.size(); ++i)
            peak = std::max(peak, f->radii[i] * std::norm(f->amplitudes[i]));
        const double edge = f->radii.back() * std::norm(f->amplitudes.back());
        if (edge > 5e-2 * peak)
            throw NumericError("pinhole_radius: output extent too small to contain the beams");
    }
    auto balance = [&](double r) { return containment_fraction(e0, r) + containment_fraction(en, r) - 1.0; };
    double lo = 0.0, hi = e0.radii.back();
    if (balance(lo) > 0.0 || balance(hi) < 0.0)
        throw NumericError("pinhole_radius: no sign change on the grid; output extent too small");
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        (balance(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

inline PinholeReport pinhole_radius(const OpticalSetup& setup, const CollinsGrids& grids = {}) {
    setup.validate();
    const int orders[2] = {0, setup.hopping_step};
    const auto fields = bs_plane_fields(orders, setup, grids);
    PinholeReport rep;
    rep.hopping_step = setup.hopping_step;
    rep.pinhole_radius = solve_pinhole_radius(fields[0], fields[1]);
    rep.containment_l0 = containment_fraction(fields[0], rep.pinhole_radius);
    return rep;
}

// Full pinhole report: solved radius, containment, and the eta/alpha table
// (eta_j = containment of the OAM j*n field inside r_h).
inline PinholeReport eta_table(const OpticalSetup& setup, int j_max, const CollinsGrids& grids = {}) {
    setup.validate();
    if (j_max < 1) throw ValidationError("eta_table: j_max must be >= 1");
    std::vector<int> orders = {0};
    for (int j = 1; j <= j_max; ++j) orders.push_back(j * setup.hopping_step);
    const auto fields = bs_plane_fields(orders, setup, grids);

    PinholeReport rep;
    rep.hopping_step = setup.hopping_step;
    rep.pinhole_radius = solve_pinhole_radius(fields[0], fields[1]);
    rep.containment_l0 = containment_fraction(fields[0], rep.pinhole_radius);
    rep.eta.resize(j_max);
    rep.alpha.resize(j_max);
    for (int j = 1; j <= j_max; ++j) {
        double eta = containment_fraction(fields[static_cast<std::size_t>(j)], rep.pinhole_radius);
        if (eta < 0.0) {
            rep.notes.push_back("eta_" + std::to_string(j) + " clipped to 0 (quadrature noise)");
            eta = 0.0;
        }
        rep.eta[j - 1] = std::min(eta, 1.0);
        rep.alpha[j - 1] = 1.0 - rep.eta[j - 1];
    }
    rep.validate();
    return rep;
}

// eta table against an explicitly given pinhole radius (r_h = 0 gives all
// zeros: the empty integral).
inline PinholeReport eta_table_at_radius(const OpticalSetup& setup, int j_max, double radius,
                                         const CollinsGrids& grids = {}) {
    setup.validate();
    if (j_max < 1) throw ValidationError("eta_table_at_radius: j_max must be >= 1");
    if (radius < 0.0) throw ValidationError("eta_table_at_radius: radius must be >= 0");
    std::vector<int> orders = {0};
    for (int j = 1; j <= j_max; ++j) orders.push_back(j * setup.hopping_step);
    const auto fields = bs_plane_fields(orders, setup, grids);

    PinholeReport rep;
    rep.hopping_step = setup.hopping_step;
    rep.pinhole_radius = radius;
    rep.containment_l0 = containment_fraction(fields[0], radius);
    rep.eta.resize(j_max);
    rep.alpha.resize(j_max);
    for (int j = 1; j <= j_max; ++j) {
        rep.eta[j - 1] = std::clamp(containment_fraction(fields[static_cast<std::size_t>(j)], radius), 0.0, 1.0);
        rep.alpha[j - 1] = 1.0 - rep.eta[j - 1];
    }
    return rep;
}

// ----------------------------- soft boundary ---------------------------------

// Fraction of the ideal LG p=0 mode (profile ~ r^l e^{-r^2} in dimensionless
// units) lying outside the mirror radius:
//   P(l) = integral_{R}^inf dr r |E_l|^2 / total = Q(l + 1, 2 R^2)
// with Q the regularized upper incomplete gamma. Strictly increasing in l.
inline double soft_boundary_loss(int l, double mirror_radius) {
    if (l < 0) throw ValidationError("soft_boundary_loss: l must be >= 0");
    if (!(mirror_radius >= 0.0)) throw ValidationError("soft_boundary_loss: mirror_radius must be >= 0");
    return gamma_q_int(l + 1, 2.0 * mirror_radius * mirror_radius);
}

}  // namespace degcav::optics
