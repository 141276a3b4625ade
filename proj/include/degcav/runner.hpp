// runner.hpp — experiment pipelines: wiring configs into the optics, lattice,
// response, and floquet engines and emitting plot-ready CSVs plus a JSON run
// manifest. Reruns of one config produce byte-identical data files.

#pragma once

#include <array>
#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "degcav/config.hpp"
#include "degcav/io.hpp"

namespace degcav::runner {

namespace fs = std::filesystem;
inline constexpr const char* version = "0.1.0";

struct RunResult {
    std::vector<std::string> outputs;
    nlohmann::json manifest;
};

namespace detail {

inline lattice::SSHParams resolve_eta(const config::ChainBlock& chain, unsigned threads,
                                      nlohmann::json& manifest_notes) {
    lattice::SSHParams p = chain.params;
    if (chain.eta_from_optics) {
        optics::CollinsGrids grids;
        grids.threads = threads;
        const int j_max = std::min(p.l_max, 6);  // corrections die off exponentially in j
        const auto rep = optics::eta_table(*chain.eta_from_optics, j_max, grids);
        p.eta = rep.eta;
        manifest_notes.push_back({{"eta_from_optics", rep.eta}, {"pinhole_radius_mm", rep.pinhole_radius}});
    }
    return p;
}

inline lattice::LatticeModel build_chain_model(const lattice::SSHParams& p, const config::ChainBlock& chain,
                                               const config::DecayBlock& decay) {
    if (chain.soft_boundary) {
        const auto& sb = *chain.soft_boundary;
        return lattice::soft_boundary_chain(p, sb.mirror_radius, chain.l_extra, sb.base_decay,
                                            sb.loss_scale);
    }
    lattice::LatticeModel m =
        chain.total_chain ? lattice::build_total_chain(p, chain.l_extra) : lattice::build_ssh(p);
    lattice::apply_center_decay(m, decay.gamma0, decay.width);
    return m;
}

inline std::vector<double> zone_grid(double omega_drive, int points) {
    // interior sampling of (-Omega/2, Omega/2]: half-step offset avoids the
    // duplicated zone edge
    const double half = 0.5 * omega_drive;
    const double step = 2.0 * half / points;
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = -half + (i + 0.5) * step;
    return g;
}

}  // namespace detail

inline RunResult run(const config::RunConfig& cfg, const fs::path& output_dir, unsigned threads,
                     bool overwrite) {
    using clock = std::chrono::steady_clock;
    const auto t_start = clock::now();

    io::DirectoryLock lock(output_dir);
    RunResult result;
    nlohmann::json notes = nlohmann::json::array();

    auto emit_csv = [&](const std::string& name, const io::CsvTable& table) {
        const auto path = output_dir / name;
        io::write_csv(path, table, overwrite);
        result.outputs.push_back(path.string());
    };
    auto emit_json = [&](const std::string& name, const nlohmann::json& j) {
        const auto path = output_dir / name;
        io::write_text_atomic(path, j.dump(2) + "\n", overwrite);
        result.outputs.push_back(path.string());
    };

    switch (cfg.experiment) {
        case config::Experiment::optics_tables: {
            io::CsvTable table;
            table.header = {"n", "r_h_mm", "containment_l0", "j", "eta", "alpha"};
            nlohmann::json jrep = nlohmann::json::array();
            for (int n : cfg.optics_block.steps) {
                optics::OpticalSetup setup = cfg.optics_block.setup;
                setup.hopping_step = n;
                optics::CollinsGrids grids = cfg.optics_block.grids;
                grids.threads = threads;
                const auto rep = optics::eta_table(setup, cfg.optics_block.j_max, grids);
                for (std::size_t j = 0; j < rep.eta.size(); ++j)
                    table.add_row({std::to_string(n), io::fmt(rep.pinhole_radius), io::fmt(rep.containment_l0),
                                   std::to_string(j + 1), io::fmt(rep.eta[j]), io::fmt(rep.alpha[j])});
                jrep.push_back({{"n", n},
                                {"r_h_mm", rep.pinhole_radius},
                                {"containment_l0", rep.containment_l0},
                                {"eta", rep.eta},
                                {"alpha", rep.alpha},
                                {"notes", rep.notes}});
            }
            emit_csv("pinhole_report.csv", table);
            emit_json("pinhole_report.json", jrep);
            if (cfg.optics_block.setup.mirror_radius) {
                io::CsvTable loss;
                loss.header = {"l", "P"};
                for (int l = 0; l <= cfg.optics_block.setup.max_oam; ++l)
                    loss.add_row({std::to_string(l),
                                  io::fmt(optics::soft_boundary_loss(l, *cfg.optics_block.setup.mirror_radius))});
                emit_csv("soft_boundary_loss.csv", loss);
            }
            break;
        }

        case config::Experiment::static_spectrum: {
            const auto params = detail::resolve_eta(cfg.chain, threads, notes);
            for (double j0p : cfg.j0prime_grid) {
                lattice::SSHParams p = params;
                p.j0 = j0p;
                p.phase = 0.0;
                const auto model = detail::build_chain_model(p, cfg.chain, cfg.decay);
                auto sp = response::total_transmission(model, cfg.omega_grid, threads);
                sp.tag.j0prime = j0p;
                sp.tag.hopping_step = p.step;
                io::CsvTable table;
                table.header = {"omega", "tau"};
                for (std::size_t i = 0; i < sp.omega.size(); ++i)
                    table.add_row({io::fmt(sp.omega[i]), io::fmt(sp.values[i])});
                emit_csv("tau_j0p_" + io::fmt(j0p) + ".csv", table);
                emit_json("model_j0p_" + io::fmt(j0p) + ".json", io::to_json(model));
            }
            break;
        }

        case config::Experiment::pulse: {
            const auto params = detail::resolve_eta(cfg.chain, threads, notes);
            const auto model = detail::build_chain_model(params, cfg.chain, cfg.decay);
            const auto traces = response::pulse_response(model, cfg.pulse, cfg.time_grid);
            io::CsvTable table;
            table.header = {"t", "site", "N"};
            for (std::size_t s = 0; s < traces.t.size(); ++s)
                for (int j = 0; j < model.size(); ++j)
                    table.add_row({io::fmt(traces.t[s]), std::to_string(model.sites[std::size_t(j)].chain_index),
                                   io::fmt(traces.intensity(j, static_cast<Eigen::Index>(s)))});
            emit_csv("pulse_traces.csv", table);
            emit_json("model.json", io::to_json(model));
            break;
        }

        case config::Experiment::sweep: {
            const auto params = detail::resolve_eta(cfg.chain, threads, notes);
            auto factory = [&](double j0p) {
                lattice::SSHParams p = params;
                p.j0 = j0p;
                p.phase = 0.0;
                return detail::build_chain_model(p, cfg.chain, cfg.decay);
            };
            const auto curve =
                response::edge_persistence_sweep(factory, cfg.pulse, cfg.t_star, cfg.j0prime_grid, threads);
            io::CsvTable table;
            table.header = {"J0prime", "N0_at_tstar"};
            for (std::size_t i = 0; i < curve.parameter.size(); ++i)
                table.add_row({io::fmt(curve.parameter[i]), io::fmt(curve.n0[i])});
            emit_csv("edge_persistence.csv", table);
            break;
        }

        case config::Experiment::floquet_spectrum: {
            const auto params = detail::resolve_eta(cfg.chain, threads, notes);
            io::CsvTable map;
            map.header = {"Omega", "omega", "T"};
            nlohmann::json cutoffs = nlohmann::json::array();
            for (double om : cfg.omega_scan) {
                floquet::DriveSpec drive = cfg.drive;
                drive.omega_drive = om;
                const int m_cut = cfg.replica_cutoff > 0
                                      ? cfg.replica_cutoff
                                      : floquet::choose_replica_cutoff(floquet::BlochDrive::ssh(drive));
                const auto blocks = floquet::drive_to_fourier(drive, params);
                const auto op = floquet::build_floquet_hamiltonian(blocks, om, m_cut);
                const auto decay = lattice::decay_profile(blocks.n_sites, cfg.decay.gamma0, cfg.decay.width);
                const auto sp = floquet::floquet_spectrum_response(
                    op, decay, detail::zone_grid(om, cfg.zone_points), {}, threads);
                for (std::size_t i = 0; i < sp.omega.size(); ++i)
                    map.add_row({io::fmt(om), io::fmt(sp.omega[i]), io::fmt(sp.values[i])});
                cutoffs.push_back({{"Omega", om}, {"M", m_cut}});
            }
            emit_csv("floquet_spectrum_map.csv", map);
            notes.push_back({{"replica_cutoffs", cutoffs}});
            break;
        }

        case config::Experiment::floquet_bands: {
            const auto bloch = floquet::BlochDrive::ssh(cfg.drive);
            const int m_cut =
                cfg.replica_cutoff > 0 ? cfg.replica_cutoff : floquet::choose_replica_cutoff(bloch);
            io::CsvTable table;
            table.header = {"k", "quasienergy_band1", "quasienergy_band2"};
            const auto ks = linspace(-pi, pi, static_cast<std::size_t>(cfg.k_points));
            std::vector<std::array<double, 2>> bands(ks.size());
            parallel_for(ks.size(), threads, [&](std::size_t i) {
                Eigen::Matrix2cd h0;
                const double bx = bloch.bx(ks[i]), by = bloch.by(ks[i]);
                h0 << 0.0, complexd{bx, -by}, complexd{bx, by}, 0.0;
                Eigen::Matrix2cd h1;
                h1 << 0.0, 0.5 * bloch.lam, 0.5 * bloch.lam, 0.0;
                floquet::FourierBlocks fb;
                fb.n_sites = 2;
                fb.h0 = h0.sparseView();
                fb.h1 = h1.sparseView();
                const auto op = floquet::build_floquet_hamiltonian(fb, bloch.omega_drive, m_cut);
                const auto qs = floquet::quasienergies(op);
                bands[i] = {qs.values.front(), qs.values.back()};
            });
            for (std::size_t i = 0; i < ks.size(); ++i)
                table.add_row({io::fmt(ks[i]), io::fmt(bands[i][0]), io::fmt(bands[i][1])});
            emit_csv("floquet_bands.csv", table);
            notes.push_back({{"replica_cutoff", m_cut}});
            break;
        }

        case config::Experiment::winding: {
            const auto params = detail::resolve_eta(cfg.chain, threads, notes);
            io::CsvTable table;
            table.header = {"Omega", "v0", "vplus", "T_at_0", "T_at_half"};
            nlohmann::json cutoffs = nlohmann::json::array();
            for (double om : cfg.omega_scan) {
                floquet::DriveSpec drive = cfg.drive;
                drive.omega_drive = om;
                const auto bloch = floquet::BlochDrive::ssh(drive);
                floquet::WindingReport rep;
                try {
                    rep = floquet::winding_numbers(bloch, cfg.k_points);
                } catch (const NumericError& e) {
                    throw NumericError(std::string(e.what()) + " [at Omega = " + io::fmt(om) + "]");
                }
                if (!rep.reliable)
                    throw NumericError("winding residual above 0.05 at Omega = " + io::fmt(om) +
                                       "; raise k_points");
                const int m_cut = cfg.replica_cutoff > 0 ? cfg.replica_cutoff
                                                         : floquet::choose_replica_cutoff(bloch);
                const auto blocks = floquet::drive_to_fourier(drive, params);
                const auto op = floquet::build_floquet_hamiltonian(blocks, om, m_cut);
                const auto decay = lattice::decay_profile(blocks.n_sites, cfg.decay.gamma0, cfg.decay.width);
                const auto sp = floquet::floquet_spectrum_response(op, decay, {0.0, 0.5 * om}, {}, threads);
                table.add_row({io::fmt(om), std::to_string(rep.v0), std::to_string(rep.v_plus),
                               io::fmt(sp.values[0]), io::fmt(sp.values[1])});
                cutoffs.push_back({{"Omega", om}, {"M", m_cut}});
            }
            emit_csv("winding.csv", table);
            notes.push_back({{"replica_cutoffs", cutoffs}});
            break;
        }
    }

    const auto wall_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - t_start).count();
    nlohmann::json manifest;
    manifest["experiment"] = config::experiment_name(cfg.experiment);
    manifest["version"] = version;
    manifest["config"] = cfg.raw;
    manifest["config_hash"] = fnv1a(cfg.raw.dump());
    manifest["threads"] = threads;
    manifest["wall_time_ms"] = wall_ms;
    manifest["outputs"] = result.outputs;
    manifest["notes"] = notes;
    const auto manifest_path = output_dir / "run_manifest.json";
    io::write_text_atomic(manifest_path, manifest.dump(2) + "\n", /*overwrite=*/true);
    result.manifest = manifest;
    return result;
}

}  // namespace degcav::runner
