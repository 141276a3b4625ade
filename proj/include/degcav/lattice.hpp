// lattice.hpp — site-labeled Hermitian hopping models: the uniform OAM ring
// chain, the pinhole-corrected SSH center chain, the bilateral total chain,
// and soft-boundary variants, plus dense/sparse matrix assembly and spectra.
//
// Bond convention: a Bond{a, b, t} contributes H(b, a) = t and
// H(a, b) = conj(t), i.e. t is the amplitude for hopping a -> b.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include <complex>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "degcav/common.hpp"
#include "degcav/optics.hpp"

namespace degcav::lattice {

enum class Polarization { H, V };
enum class Block { left, center, right };

struct SiteLabel {
    int oam = 0;
    Polarization pol = Polarization::H;
    int chain_index = 0;  // 2*oam for H, 2*oam + 1 for V

    static SiteLabel of(int oam, Polarization pol) {
        return SiteLabel{oam, pol, 2 * oam + (pol == Polarization::V ? 1 : 0)};
    }
};

struct Bond {
    int a = 0;
    int b = 0;
    complexd amplitude{};
};

struct SSHParams {
    double j0 = 1.0;    // J0 >= 0
    double phase = 0.0; // phi, radians
    double j1 = 1.0;    // J1 >= 0
    int l_max = 49;     // L_m >= 1
    int step = 1;       // pinhole hopping step n
    std::vector<double> eta;  // eta_j, j = 1-based; absent entries mean 0 (ideal)

    // J0' is always recomputed from (j0, phase), never cached.
    double intracell() const { return j0 * std::cos(phase); }

    double eta_at(int j) const {
        if (j < 1) throw ValidationError("SSHParams: eta index must be >= 1");
        return static_cast<std::size_t>(j) <= eta.size() ? eta[static_cast<std::size_t>(j - 1)] : 0.0;
    }
    double alpha_at(int j) const { return 1.0 - eta_at(j); }

    void validate() const {
        if (j0 < 0.0 || j1 < 0.0) throw ValidationError("SSHParams: j0 and j1 must be >= 0");
        if (l_max < 1) throw ValidationError("SSHParams: l_max must be >= 1");
        if (step < 1) throw ValidationError("SSHParams: step must be >= 1");
        for (double e : eta)
            if (e < 0.0 || e > 1.0) throw ValidationError("SSHParams: eta entries must lie in [0,1]");
    }
};

struct LatticeModel {
    std::vector<SiteLabel> sites;   // matrix index = position in this vector
    std::vector<Bond> bonds;
    std::vector<double> decay;      // gamma_j >= 0 per site: measured ports
    std::vector<Block> block;       // partition tag per site
    // loss that damps the dynamics without acting as an input/output port
    // (e.g. mirror clipping); empty means none
    std::vector<double> internal_loss;

    int size() const { return static_cast<int>(sites.size()); }

    double total_loss(int j) const {
        double g = decay[static_cast<std::size_t>(j)];
        if (!internal_loss.empty()) g += internal_loss[static_cast<std::size_t>(j)];
        return g;
    }

    std::optional<int> position_of_chain_index(int chain_index) const {
        for (std::size_t i = 0; i < sites.size(); ++i)
            if (sites[i].chain_index == chain_index) return static_cast<int>(i);
        return std::nullopt;
    }

    void validate() const {
        const int n = size();
        if (n == 0) throw ValidationError("LatticeModel: empty model");
        if (decay.size() != sites.size() || block.size() != sites.size())
            throw ValidationError("LatticeModel: decay/block arrays must match the site count");
        if (!internal_loss.empty() && internal_loss.size() != sites.size())
            throw ValidationError("LatticeModel: internal_loss must be empty or match the site count");
        for (double g : decay)
            if (g < 0.0) throw ValidationError("LatticeModel: decay entries must be >= 0");
        for (double g : internal_loss)
            if (g < 0.0) throw ValidationError("LatticeModel: internal_loss entries must be >= 0");
        for (const auto& b : bonds)
            if (b.a < 0 || b.a >= n || b.b < 0 || b.b >= n || b.a == b.b)
                throw ValidationError("LatticeModel: bond endpoints out of range");
    }
};

// ------------------------------ matrix assembly ------------------------------

inline Eigen::MatrixXcd dense_matrix(const LatticeModel& model) {
    model.validate();
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(model.size(), model.size());
    for (const auto& b : model.bonds) {
        h(b.b, b.a) += b.amplitude;
        h(b.a, b.b) += std::conj(b.amplitude);
    }
    return h;
}

inline Eigen::SparseMatrix<complexd> sparse_matrix(const LatticeModel& model) {
    model.validate();
    std::vector<Eigen::Triplet<complexd>> trip;
    trip.reserve(2 * model.bonds.size());
    for (const auto& b : model.bonds) {
        trip.emplace_back(b.b, b.a, b.amplitude);
        trip.emplace_back(b.a, b.b, std::conj(b.amplitude));
    }
    Eigen::SparseMatrix<complexd> h(model.size(), model.size());
    h.setFromTriplets(trip.begin(), trip.end());
    return h;
}

struct Spectrum {
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXcd eigenvectors; // orthonormal columns
};

inline Spectrum spectrum(const LatticeModel& model) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense_matrix(model));
    if (solver.info() != Eigen::Success)
        throw NumericError("spectrum: eigensolver failed on a " + std::to_string(model.size()) + "-site model");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

// ------------------------------- ring chain ----------------------------------

enum class RingMode { single_cavity, interference };

// Nearest-neighbor OAM chain: bond l -> l+1 carries -kappa e^{i(phi0 + l theta0)}
// for a single auxiliary cavity, or -kappa cos(phi0 + l theta0) when two
// auxiliary paths interfere.
inline LatticeModel build_ring_chain(double kappa, double phi0, double theta0, int length,
                                     RingMode mode = RingMode::interference) {
    if (length < 2) throw ValidationError("build_ring_chain: length must be >= 2");
    LatticeModel m;
    m.sites.reserve(static_cast<std::size_t>(length));
    for (int l = 0; l < length; ++l) m.sites.push_back(SiteLabel::of(l, Polarization::H));
    for (int l = 0; l + 1 < length; ++l) {
        const double ph = phi0 + l * theta0;
        const complexd amp = mode == RingMode::single_cavity ? -kappa * std::polar(1.0, ph)
                                                             : complexd{-kappa * std::cos(ph), 0.0};
        m.bonds.push_back({l, l + 1, amp});
    }
    m.decay.assign(m.sites.size(), 0.0);
    m.block.assign(m.sites.size(), Block::center);
    return m;
}

// ------------------------------- SSH chains ----------------------------------

// Center SSH chain of 2(L_m + 1) sites. Intracell bonds carry J0 cos(phi);
// intercell bond l -> l+1 carries J1 alpha_{l+1} (the pinhole correction of
// the OAM-(l+1)n mode that that hop traverses).
inline LatticeModel build_ssh(const SSHParams& p) {
    p.validate();
    LatticeModel m;
    const double j0p = p.intracell();
    for (int l = 0; l <= p.l_max; ++l) {
        m.sites.push_back(SiteLabel::of(l, Polarization::H));
        m.sites.push_back(SiteLabel::of(l, Polarization::V));
    }
    for (int l = 0; l <= p.l_max; ++l)
        m.bonds.push_back({2 * l, 2 * l + 1, complexd{j0p, 0.0}});
    for (int l = 0; l + 1 <= p.l_max; ++l)
        m.bonds.push_back({2 * l + 1, 2 * l + 2, complexd{p.j1 * p.alpha_at(l + 1), 0.0}});
    m.decay.assign(m.sites.size(), 0.0);
    m.block.assign(m.sites.size(), Block::center);
    return m;
}

// Total chain H + H': center SSH block flanked by l_extra cells of residual
// chain on each side. The three blocks connect only through the boundary
// bonds of amplitude eta_1 J1; eta_1 = 0 disconnects them exactly. Intercell
// bonds inside the blocks carry the mirror-symmetric pinhole correction
// alpha_max(l+1, -l) (the larger-|OAM| mode of the hop sets the reduction).
inline LatticeModel build_total_chain(const SSHParams& p, int l_extra = 25) {
    p.validate();
    if (l_extra < 0) throw ValidationError("build_total_chain: l_extra must be >= 0");
    LatticeModel m;
    const double j0p = p.intracell();
    const int lo = -l_extra;
    const int hi = p.l_max + l_extra;
    auto block_of = [&](int l) {
        if (l < 0) return Block::left;
        if (l > p.l_max) return Block::right;
        return Block::center;
    };
    for (int l = lo; l <= hi; ++l) {
        m.sites.push_back(SiteLabel::of(l, Polarization::H));
        m.sites.push_back(SiteLabel::of(l, Polarization::V));
        m.block.push_back(block_of(l));
        m.block.push_back(block_of(l));
    }
    auto pos = [&](int chain_index) { return chain_index - 2 * lo; };
    for (int l = lo; l <= hi; ++l)
        m.bonds.push_back({pos(2 * l), pos(2 * l + 1), complexd{j0p, 0.0}});
    for (int l = lo; l < hi; ++l) {
        double amp;
        if (l == -1 || l == p.l_max) {
            amp = p.eta_at(1) * p.j1;  // boundary leakage bonds H_L0 / H_R0
        } else {
            amp = p.j1 * p.alpha_at(std::max(l + 1, -l));
        }
        m.bonds.push_back({pos(2 * l + 1), pos(2 * l + 2), complexd{amp, 0.0}});
    }
    m.decay.assign(m.sites.size(), 0.0);
    return m;
}

// ------------------------------ decay profiles -------------------------------

// gamma_j = gamma0 (1 + e^{-j/width} + e^{-(j_last - j)/width}), j = 0..n-1.
inline std::vector<double> decay_profile(int n_sites, double gamma0, double width) {
    if (n_sites < 1) throw ValidationError("decay_profile: need at least one site");
    if (gamma0 < 0.0) throw ValidationError("decay_profile: gamma0 must be >= 0");
    if (!(width > 0.0)) throw ValidationError("decay_profile: width must be > 0");
    std::vector<double> g(static_cast<std::size_t>(n_sites));
    const int j_last = n_sites - 1;
    for (int j = 0; j < n_sites; ++j)
        g[static_cast<std::size_t>(j)] =
            gamma0 * (1.0 + std::exp(-j / width) + std::exp(-(j_last - j) / width));
    return g;
}

// Applies the boundary-bump profile to the center block only; side blocks are
// dissipationless spectator chains (they carry no input/output ports).
inline void apply_center_decay(LatticeModel& model, double gamma0, double width) {
    int first = -1, count = 0;
    for (int i = 0; i < model.size(); ++i) {
        if (model.block[static_cast<std::size_t>(i)] == Block::center) {
            if (first < 0) first = i;
            ++count;
        }
    }
    if (count == 0) throw ValidationError("apply_center_decay: model has no center block");
    const auto g = decay_profile(count, gamma0, width);
    model.decay.assign(model.sites.size(), 0.0);
    for (int i = 0; i < count; ++i) model.decay[static_cast<std::size_t>(first + i)] = g[static_cast<std::size_t>(i)];
}

// ----------------------------- soft boundary chain ----------------------------

// Prolonged chain with uniform bonds (no pinhole corrections anywhere) and a
// loss that grows toward both far ends through the mirror-clipping fraction
// P(d) of the optics module; d is the distance (in cell index) from the chain
// center. The base decay stays a measured port on every site; the P(d) term
// is pure photon loss, so it damps the resolvent without flooding tau with
// saturated |T_jj| terms. With mirror_radius -> inf the loss vanishes and the
// model reduces to the uniform chain with flat base decay.
inline LatticeModel soft_boundary_chain(const SSHParams& p, double mirror_radius, int l_extra = 25,
                                        double base_decay = 0.05, double loss_scale = 1.0) {
    p.validate();
    if (base_decay < 0.0 || loss_scale < 0.0)
        throw ValidationError("soft_boundary_chain: decay parameters must be >= 0");
    SSHParams uniform = p;
    uniform.eta.clear();
    LatticeModel m = build_total_chain(uniform, l_extra);
    // no pinholes: every OAM-changing (intercell) link carries the full J1,
    // including the nominal boundary bonds
    for (auto& b : m.bonds)
        if (m.sites[static_cast<std::size_t>(b.a)].oam != m.sites[static_cast<std::size_t>(b.b)].oam)
            b.amplitude = complexd{p.j1, 0.0};
    const double center = 0.5 * p.l_max;
    m.internal_loss.assign(m.sites.size(), 0.0);
    for (int i = 0; i < m.size(); ++i) {
        const double d = std::abs(m.sites[static_cast<std::size_t>(i)].oam - center);
        const int d_int = static_cast<int>(std::lround(d));
        m.decay[static_cast<std::size_t>(i)] = base_decay;
        m.internal_loss[static_cast<std::size_t>(i)] =
            loss_scale * optics::soft_boundary_loss(d_int, mirror_radius);
    }
    return m;
}

// ------------------------------ serialization --------------------------------

inline std::uint64_t model_hash(const LatticeModel& model) {
    std::string s;
    s.reserve(model.sites.size() * 8 + model.bonds.size() * 32);
    for (const auto& site : model.sites) {
        s += std::to_string(site.chain_index);
        s += (site.pol == Polarization::H ? 'H' : 'V');
    }
    char buf[96];
    for (const auto& b : model.bonds) {
        std::snprintf(buf, sizeof buf, "|%d,%d,%.17g,%.17g", b.a, b.b, b.amplitude.real(), b.amplitude.imag());
        s += buf;
    }
    for (double g : model.decay) {
        std::snprintf(buf, sizeof buf, "|%.17g", g);
        s += buf;
    }
    for (double g : model.internal_loss) {
        std::snprintf(buf, sizeof buf, "|i%.17g", g);
        s += buf;
    }
    return fnv1a(s);
}

}  // namespace degcav::lattice
