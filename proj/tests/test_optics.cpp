#include <catch2/catch_amalgamated.hpp>

#include <boost/math/special_functions/bessel.hpp>

#include <random>

#include "degcav/optics.hpp"

using namespace degcav;
using namespace degcav::optics;

namespace {

OpticalSetup table_setup(int n) {
    OpticalSetup s;
    s.focal_length = 100.0;
    s.wavelength = 0.885e-3;
    s.waist = 0.2;
    s.hopping_step = n;
    s.max_oam = 49;
    return s;
}

// reduced grids keep the unit suite snappy; the acceptance run uses defaults
CollinsGrids fast_grids() {
    CollinsGrids g;
    g.input_samples = 1025;
    g.output_samples = 2049;
    return g;
}

}  // namespace

TEST_CASE("mode_detuning reproduces the degenerate-cavity condition") {
    const RayMatrix identity;
    CHECK(mode_detuning(0, 7, 2.0 * pi, identity) == Catch::Approx(0.0).margin(1e-12));
    CHECK(mode_detuning(0, 0, 0.0, identity) == Catch::Approx(0.0).margin(1e-12));

    // A = D = 0 (confocal-like): arccos(0) = pi/2, defect = -3 pi/2 mod 2 pi
    const RayMatrix confocal(0.0, 1.0, -1.0, 0.0);
    CHECK(mode_detuning(0, 2, 2.0 * pi, confocal) == Catch::Approx(0.5 * pi));

    const RayMatrix unstable(2.5, 1.5, 1.0, 1.0);  // |A+D|/2 = 1.75
    CHECK_THROWS_AS(mode_detuning(0, 0, 0.0, unstable), NumericError);
}

TEST_CASE("ray matrix must be unimodular") {
    CHECK_THROWS_AS(RayMatrix(1.0, 2.0, 3.0, 4.0), ValidationError);
    CHECK_NOTHROW(RayMatrix::fourier_lens(100.0));
}

TEST_CASE("waist_field is an l-independent normalized Gaussian profile") {
    const auto setup = table_setup(1);
    const auto grid = linspace(0.0, 1.6, 1025);
    const auto f0 = waist_field(0, setup, grid);
    const auto f5 = waist_field(5, setup, grid);

    CHECK(f0.energy() == Catch::Approx(1.0).epsilon(1e-10));
    CHECK(f5.oam_order == 5);
    for (std::size_t i = 0; i < grid.size(); i += 64)
        CHECK(std::abs(f0.amplitudes[i] - f5.amplitudes[i]) < 1e-14);

    // 1/e^2 intensity radius equals w0
    const double ratio = std::norm(f0.amplitudes[0]) / std::exp(2.0);
    double r_at = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (std::norm(f0.amplitudes[i + 1]) <= ratio && std::norm(f0.amplitudes[i]) > ratio) {
            r_at = grid[i];
            break;
        }
    }
    CHECK(r_at == Catch::Approx(setup.waist).epsilon(2e-3));
}

TEST_CASE("bessel ladder agrees with the reference implementation") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> xd(0.0, 300.0);
    std::uniform_int_distribution<int> ld(0, 25);
    std::vector<double> ladder(26);
    for (int trial = 0; trial < 200; ++trial) {
        const double x = xd(rng);
        const int l_max = ld(rng);
        optics::detail::bessel_j_ladder(l_max, x, ladder);
        for (int l = 0; l <= l_max; l += std::max(1, l_max / 3)) {
            CAPTURE(x, l);
            CHECK(ladder[static_cast<std::size_t>(l)] ==
                  Catch::Approx(boost::math::cyl_bessel_j(l, x)).margin(1e-11));
        }
    }
}

TEST_CASE("collins propagation of the l=0 Gaussian gives the analytic waist") {
    const auto setup = table_setup(1);
    const auto slm = waist_field(0, setup, linspace(0.0, 1.6, 2049));
    const auto ray = RayMatrix::fourier_lens(setup.focal_length);
    const double w1 = setup.wavelength * setup.focal_length / (pi * setup.waist);

    double ratio = 0.0;
    const auto out =
        propagate_collins(slm, ray, setup, linspace(0.0, 1.5, 2049), &ratio);

    // analytic oracle: Fourier transform of a Gaussian is a Gaussian of waist
    // w1 = lambda f / (pi w0); compare the normalized intensity profile
    const double peak = std::norm(out.amplitudes[0]);
    for (double rho : {0.05, 0.1, 0.15, 0.2}) {
        const std::size_t k = static_cast<std::size_t>(std::round(rho / (out.radii[1] - out.radii[0])));
        const double expect = peak * std::exp(-2.0 * out.radii[k] * out.radii[k] / (w1 * w1));
        CHECK(std::norm(out.amplitudes[k]) == Catch::Approx(expect).epsilon(1e-6));
    }
    CHECK(w1 == Catch::Approx(0.140845).epsilon(1e-4));
    CHECK(ratio == Catch::Approx(1.0).margin(2e-6));
}

TEST_CASE("collins propagation of an l=1 vortex field vanishes on axis") {
    const auto setup = table_setup(1);
    const auto slm = waist_field(1, setup, linspace(0.0, 1.6, 2049));
    const auto out = propagate_collins(slm, RayMatrix::fourier_lens(setup.focal_length), setup,
                                       linspace(0.0, 1.5, 1025));
    CHECK(std::abs(out.amplitudes[0]) == 0.0);          // J_1(0) = 0
    CHECK(std::abs(out.amplitudes[1]) > 0.0);
}

TEST_CASE("parseval holds to 1e-6 for confined profiles up to l = 10") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ad(-1.2, 1.2), bd(60.0, 180.0), cd(-0.008, 0.008);
    const auto setup = table_setup(1);
    for (int l : {0, 1, 3, 7, 10}) {
        double a = ad(rng), b = bd(rng), c = cd(rng);
        if (std::abs(a) < 0.2) a = 0.7;
        const double d = (1.0 + b * c) / a;
        const RayMatrix ray(a, b, c, d);
        const double w_in = setup.waist * (6.0 + 2.5 * std::sqrt(double(l)));
        auto in = lg_field(l, setup.waist, setup.wavelength, linspace(0.0, w_in, 2049));
        const double wb = setup.wavelength * b / (pi * setup.waist);
        const double w_out = std::hypot(a * setup.waist, wb) * (6.0 + 2.5 * std::sqrt(double(l)));
        double ratio = 0.0;
        propagate_collins(in, ray, setup, linspace(0.0, w_out, 2049), &ratio);
        CAPTURE(l, a, b);
        CHECK(ratio == Catch::Approx(1.0).margin(1e-6));
    }
}

TEST_CASE("collins rejects unsupported configurations") {
    const auto setup = table_setup(1);
    const auto slm = waist_field(0, setup, linspace(0.0, 1.6, 1025));
    CHECK_THROWS_AS(propagate_collins(slm, RayMatrix(1.0, 0.0, 0.0, 1.0), setup), NumericError);

    // coarse grid + huge output extent trips the sampling check
    const auto coarse = waist_field(0, setup, linspace(0.0, 1.6, 33));
    CHECK_THROWS_AS(
        propagate_collins(coarse, RayMatrix::fourier_lens(100.0), setup, linspace(0.0, 60.0, 257)),
        NumericError);
}

TEST_CASE("containment_fraction is monotone and normalized") {
    const auto setup = table_setup(1);
    const auto f = bs_plane_field(2, setup, fast_grids());

    CHECK(containment_fraction(f, 0.0) == 0.0);
    CHECK(containment_fraction(f, f.radii.back()) == Catch::Approx(1.0).margin(1e-9));
    CHECK_THROWS_AS(containment_fraction(f, f.radii.back() * 1.5), ValidationError);

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> rd(0.0, f.radii.back());
    for (int trial = 0; trial < 200; ++trial) {
        double r1 = rd(rng), r2 = rd(rng);
        if (r1 > r2) std::swap(r1, r2);
        CHECK(containment_fraction(f, r1) <= containment_fraction(f, r2) + 1e-15);
    }
}

TEST_CASE("pinhole radius solves the balance equation on the n=1 geometry") {
    const auto rep = pinhole_radius(table_setup(1), fast_grids());
    CHECK(rep.pinhole_radius == Catch::Approx(0.123).epsilon(0.05));
    CHECK(rep.containment_l0 == Catch::Approx(0.78).margin(0.03));

    // the defining equation makes containment_l0 = 1 - eta_1
    const auto full = eta_table(table_setup(1), 2, fast_grids());
    CHECK(full.containment_l0 == Catch::Approx(1.0 - full.eta[0]).margin(1e-6));
    CHECK(full.eta[1] < full.eta[0]);
    for (std::size_t j = 0; j < full.eta.size(); ++j)
        CHECK(full.alpha[j] == 1.0 - full.eta[j]);
}

TEST_CASE("eta table at zero radius is empty") {
    const auto rep = eta_table_at_radius(table_setup(2), 3, 0.0, fast_grids());
    for (double e : rep.eta) CHECK(e == 0.0);
    for (double a : rep.alpha) CHECK(a == 1.0);
}

TEST_CASE("pinhole geometry errors when the grid misses the crossover") {
    auto g = fast_grids();
    g.output_extent = 0.01;  // far below the beam size
    CHECK_THROWS_AS(pinhole_radius(table_setup(1), g), NumericError);
}

TEST_CASE("soft boundary loss: limits, monotonicity, and quadrature oracle") {
    CHECK(soft_boundary_loss(0, 50.0) == Catch::Approx(0.0).margin(1e-12));
    CHECK(soft_boundary_loss(0, 0.0) == 1.0);
    CHECK(soft_boundary_loss(17, 0.0) == 1.0);

    const double R = std::sqrt(15.0);  // mirror sqrt(30/2)
    for (int l = 0; l < 40; ++l) CHECK(soft_boundary_loss(l + 1, R) > soft_boundary_loss(l, R));

    // quadrature oracle: P(l) = int_R^inf r^{2l+1} e^{-2r^2} / int_0^inf ...
    auto oracle = [&](int l) {
        const auto r_hi = linspace(R, R + 12.0, 40001);
        const auto r_all = linspace(0.0, R + 12.0, 120001);
        auto integrand = [&](const std::vector<double>& r) {
            std::vector<double> y(r.size());
            for (std::size_t i = 0; i < r.size(); ++i)
                y[i] = std::exp((2.0 * l + 1.0) * std::log(std::max(r[i], 1e-300)) - 2.0 * r[i] * r[i]);
            return y;
        };
        return integrate_simpson(r_hi, integrand(r_hi)) / integrate_simpson(r_all, integrand(r_all));
    };
    for (int l : {0, 5, 15, 25, 30}) {
        CAPTURE(l);
        CHECK(soft_boundary_loss(l, R) == Catch::Approx(oracle(l)).epsilon(1e-7));
    }

    // log P(l) approximately linear approaching l = 30 at this mirror
    std::vector<double> xs, ys;
    for (int l = 20; l <= 30; ++l) {
        xs.push_back(double(l));
        ys.push_back(std::log(soft_boundary_loss(l, R)));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double nn = double(xs.size());
    const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    const double inter = (sy - slope * sx) / nn;
    double ss_res = 0, ss_tot = 0, mean = sy / nn;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        ss_res += std::pow(ys[i] - (slope * xs[i] + inter), 2);
        ss_tot += std::pow(ys[i] - mean, 2);
    }
    CHECK(slope > 0.0);  // loss grows toward the mirror-set cutoff
    CHECK(1.0 - ss_res / ss_tot > 0.95);
}

TEST_CASE("setup validation") {
    OpticalSetup s = table_setup(1);
    s.waist = -1.0;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s = table_setup(1);
    s.hopping_step = 0;
    CHECK_THROWS_AS(s.validate(), ValidationError);
}
