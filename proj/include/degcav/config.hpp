// config.hpp — strict, typed run configurations for the experiment runner.
// Unknown keys are rejected by name; every experiment declares exactly the
// sections it consumes.

#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "degcav/common.hpp"
#include "degcav/floquet.hpp"
#include "degcav/lattice.hpp"
#include "degcav/optics.hpp"
#include "degcav/response.hpp"

namespace degcav::config {

using nlohmann::json;

enum class Experiment {
    optics_tables,
    static_spectrum,
    pulse,
    sweep,
    floquet_spectrum,
    floquet_bands,
    winding,
};

inline const char* experiment_name(Experiment e) {
    switch (e) {
        case Experiment::optics_tables: return "optics-tables";
        case Experiment::static_spectrum: return "static-spectrum";
        case Experiment::pulse: return "pulse";
        case Experiment::sweep: return "sweep";
        case Experiment::floquet_spectrum: return "floquet-spectrum";
        case Experiment::floquet_bands: return "floquet-bands";
        case Experiment::winding: return "winding";
    }
    return "?";
}

namespace detail {

// tracks which keys were consumed so leftovers can be named in the error
class Section {
  public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ValidationError("config: '" + path_ + "' must be an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    template <typename T>
    T require(const std::string& key) {
        if (!j_.contains(key))
            throw ValidationError("config: missing required key '" + path_ + "." + key + "'");
        return read<T>(key);
    }

    template <typename T>
    T get_or(const std::string& key, T fallback) {
        if (!j_.contains(key)) return fallback;
        return read<T>(key);
    }

    Section subsection(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key))
            throw ValidationError("config: missing required section '" + path_ + "." + key + "'");
        return Section(j_.at(key), path_ + "." + key);
    }

    std::optional<Section> maybe_subsection(const std::string& key) {
        if (!j_.contains(key)) return std::nullopt;
        seen_.insert(key);
        return Section(j_.at(key), path_ + "." + key);
    }

    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key))
                throw ValidationError("config: unknown key '" + path_ + "." + key + "'");
    }

  private:
    template <typename T>
    T read(const std::string& key) {
        seen_.insert(key);
        try {
            return j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ValidationError("config: key '" + path_ + "." + key + "' has the wrong type");
        }
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline std::vector<double> parse_grid(Section& s, const std::string& what) {
    auto g = s.subsection(what);
    if (g.has("values")) {
        auto v = g.require<std::vector<double>>("values");
        g.finish();
        if (v.empty()) throw ValidationError("config: '" + what + ".values' must not be empty");
        return v;
    }
    const double from = g.require<double>("from");
    const double to = g.require<double>("to");
    const auto count = g.require<std::size_t>("count");
    g.finish();
    if (count < 1) throw ValidationError("config: '" + what + ".count' must be >= 1");
    if (count > 1 && !(to > from)) throw ValidationError("config: '" + what + "' needs to > from");
    return linspace(from, to, count);
}

}  // namespace detail

// ------------------------------- config blocks -------------------------------

struct OpticsBlock {
    optics::OpticalSetup setup{};
    optics::CollinsGrids grids{};
    std::vector<int> steps{1, 2, 3, 4, 5};
    int j_max = 4;
};

struct SoftBoundaryBlock {
    double mirror_radius = 3.872983346207417;  // sqrt(30/2)
    double base_decay = 0.05;
    double loss_scale = 1.0;
};

struct ChainBlock {
    lattice::SSHParams params{};
    int l_extra = 25;
    bool total_chain = true;
    std::optional<optics::OpticalSetup> eta_from_optics;  // recompute eta when set
    std::optional<SoftBoundaryBlock> soft_boundary;       // mirror-loss variant
};

struct DecayBlock {
    double gamma0 = 0.05;
    double width = 5.0;
};

struct RunConfig {
    Experiment experiment{};
    json raw;  // full config for the manifest

    OpticsBlock optics_block{};
    ChainBlock chain{};
    DecayBlock decay{};
    response::PulseSpec pulse{};
    floquet::DriveSpec drive{};

    std::vector<double> j0prime_grid;  // static-spectrum / sweep
    std::vector<double> omega_grid;    // response frequency grid
    std::vector<double> omega_scan;    // drive-frequency scan (floquet)
    std::vector<double> time_grid;     // pulse sampling times
    double t_star = 15.0;
    int zone_points = 161;
    int k_points = 257;
    int replica_cutoff = 0;  // 0 -> automatic
    long long seed = 0;      // reserved; all computations are deterministic
};

namespace detail {

inline optics::OpticalSetup parse_optics_setup(Section& sec) {
    optics::OpticalSetup s;
    s.focal_length = sec.require<double>("focal_length_mm");
    s.wavelength = sec.require<double>("wavelength_mm");
    s.waist = sec.require<double>("waist_mm");
    s.hopping_step = sec.get_or<int>("hopping_step", 1);
    s.max_oam = sec.get_or<int>("max_oam", 49);
    if (sec.has("mirror_radius")) s.mirror_radius = sec.require<double>("mirror_radius");
    sec.finish();
    s.validate();
    return s;
}

inline optics::CollinsGrids parse_grids(Section& parent) {
    optics::CollinsGrids g;
    if (auto sec = parent.maybe_subsection("grids")) {
        g.input_extent = sec->get_or<double>("input_extent_mm", 0.0);
        g.input_samples = sec->get_or<std::size_t>("input_samples", g.input_samples);
        g.output_extent = sec->get_or<double>("output_extent_mm", 0.0);
        g.output_samples = sec->get_or<std::size_t>("output_samples", g.output_samples);
        sec->finish();
    }
    return g;
}

inline ChainBlock parse_chain(Section& parent, bool allow_j0 = false) {
    ChainBlock c;
    auto sec = parent.subsection("chain");
    c.params.j1 = sec.require<double>("j1");
    c.params.l_max = sec.require<int>("l_max");
    c.params.step = sec.get_or<int>("step", 1);
    if (allow_j0) {
        if (sec.has("j0prime")) {
            c.params.j0 = sec.require<double>("j0prime");
            c.params.phase = 0.0;
        } else {
            c.params.j0 = sec.require<double>("j0");
            c.params.phase = sec.get_or<double>("phase", 0.0);
        }
    }
    if (sec.has("eta")) c.params.eta = sec.require<std::vector<double>>("eta");
    c.l_extra = sec.get_or<int>("l_extra", 25);
    c.total_chain = sec.get_or<bool>("total_chain", true);
    if (auto opt = sec.maybe_subsection("eta_from_optics")) {
        auto setup = parse_optics_setup(*opt);
        setup.hopping_step = c.params.step;
        c.eta_from_optics = setup;
    }
    if (auto soft = sec.maybe_subsection("soft_boundary")) {
        SoftBoundaryBlock sb;
        sb.mirror_radius = soft->require<double>("mirror_radius");
        sb.base_decay = soft->get_or<double>("base_decay", 0.05);
        sb.loss_scale = soft->get_or<double>("loss_scale", 1.0);
        soft->finish();
        if (!(sb.mirror_radius >= 0.0) || sb.base_decay < 0.0 || sb.loss_scale < 0.0)
            throw ValidationError("config: chain.soft_boundary parameters must be >= 0");
        c.soft_boundary = sb;
    }
    sec.finish();
    c.params.validate();
    if (c.l_extra < 0) throw ValidationError("config: chain.l_extra must be >= 0");
    return c;
}

inline DecayBlock parse_decay(Section& parent) {
    DecayBlock d;
    auto sec = parent.subsection("decay");
    d.gamma0 = sec.require<double>("gamma0");
    d.width = sec.require<double>("width");
    sec.finish();
    if (d.gamma0 < 0.0 || !(d.width > 0.0))
        throw ValidationError("config: decay requires gamma0 >= 0 and width > 0");
    return d;
}

inline response::PulseSpec parse_pulse(Section& parent) {
    response::PulseSpec p;
    auto sec = parent.subsection("pulse");
    p.target_site = sec.get_or<int>("site", 0);
    p.center = sec.get_or<double>("center", 3.0);
    p.width = sec.get_or<double>("width", 2.0);
    p.amplitude = sec.get_or<double>("amplitude", p.amplitude);
    sec.finish();
    p.validate();
    return p;
}

inline floquet::DriveSpec parse_drive(Section& parent, bool needs_omega) {
    floquet::DriveSpec d;
    auto sec = parent.subsection("drive");
    d.j0 = sec.require<double>("j0");
    d.j1 = sec.require<double>("j1");
    d.lam = sec.require<double>("lam");
    d.omega_drive = needs_omega ? sec.require<double>("omega") : sec.get_or<double>("omega", 1.0);
    sec.finish();
    if (needs_omega) d.validate();
    return d;
}

}  // namespace detail

inline RunConfig parse(Experiment experiment, const json& j) {
    RunConfig cfg;
    cfg.experiment = experiment;
    cfg.raw = j;
    detail::Section root(j, "");

    if (root.has("experiment")) {
        const auto named = root.require<std::string>("experiment");
        if (named != experiment_name(experiment))
            throw ValidationError("config: experiment '" + named + "' does not match the subcommand '" +
                                  experiment_name(experiment) + "'");
    }
    cfg.seed = root.get_or<long long>("seed", 0);

    switch (experiment) {
        case Experiment::optics_tables: {
            auto sec = root.subsection("optics");
            cfg.optics_block.setup = detail::parse_optics_setup(sec);
            auto table = root.subsection("table");
            cfg.optics_block.steps = table.require<std::vector<int>>("steps");
            cfg.optics_block.j_max = table.get_or<int>("j_max", 4);
            table.finish();
            cfg.optics_block.grids = detail::parse_grids(root);
            for (int n : cfg.optics_block.steps)
                if (n < 1) throw ValidationError("config: table.steps entries must be >= 1");
            if (cfg.optics_block.j_max < 1) throw ValidationError("config: table.j_max must be >= 1");
            break;
        }
        case Experiment::static_spectrum: {
            cfg.chain = detail::parse_chain(root);
            cfg.decay = detail::parse_decay(root);
            cfg.j0prime_grid = detail::parse_grid(root, "sweep");
            cfg.omega_grid = detail::parse_grid(root, "omega_grid");
            break;
        }
        case Experiment::pulse: {
            cfg.chain = detail::parse_chain(root, /*allow_j0=*/true);
            cfg.decay = detail::parse_decay(root);
            cfg.pulse = detail::parse_pulse(root);
            cfg.time_grid = detail::parse_grid(root, "time_grid");
            if (cfg.time_grid.front() != 0.0)
                throw ValidationError("config: time_grid must start at 0");
            break;
        }
        case Experiment::sweep: {
            cfg.chain = detail::parse_chain(root);
            cfg.decay = detail::parse_decay(root);
            cfg.pulse = detail::parse_pulse(root);
            cfg.j0prime_grid = detail::parse_grid(root, "sweep");
            cfg.t_star = root.get_or<double>("t_star", 15.0);
            if (!(cfg.t_star > 0.0)) throw ValidationError("config: t_star must be > 0");
            break;
        }
        case Experiment::floquet_spectrum: {
            cfg.drive = detail::parse_drive(root, /*needs_omega=*/false);
            cfg.chain = detail::parse_chain(root);
            cfg.decay = detail::parse_decay(root);
            cfg.omega_scan = detail::parse_grid(root, "omega_scan");
            cfg.zone_points = root.get_or<int>("zone_points", 161);
            cfg.replica_cutoff = root.get_or<int>("replica_cutoff", 0);
            if (cfg.zone_points < 3) throw ValidationError("config: zone_points must be >= 3");
            for (double om : cfg.omega_scan)
                if (!(om > 0.0)) throw ValidationError("config: omega_scan must be positive");
            break;
        }
        case Experiment::floquet_bands: {
            cfg.drive = detail::parse_drive(root, /*needs_omega=*/true);
            cfg.k_points = root.get_or<int>("k_points", 257);
            cfg.replica_cutoff = root.get_or<int>("replica_cutoff", 0);
            if (cfg.k_points < 32) throw ValidationError("config: k_points must be >= 32");
            break;
        }
        case Experiment::winding: {
            cfg.drive = detail::parse_drive(root, /*needs_omega=*/false);
            cfg.chain = detail::parse_chain(root);
            cfg.decay = detail::parse_decay(root);
            cfg.omega_scan = detail::parse_grid(root, "omega_scan");
            cfg.k_points = root.get_or<int>("k_points", 257);
            cfg.replica_cutoff = root.get_or<int>("replica_cutoff", 0);
            if (cfg.k_points < 32) throw ValidationError("config: k_points must be >= 32");
            for (double om : cfg.omega_scan)
                if (!(om > 0.0)) throw ValidationError("config: omega_scan must be positive");
            break;
        }
    }
    root.finish();
    return cfg;
}

inline RunConfig parse_text(Experiment experiment, const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: invalid JSON: ") + e.what());
    }
    return parse(experiment, j);
}

}  // namespace degcav::config
