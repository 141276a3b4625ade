// degcav — configuration-driven runner for the degenerate-cavity synthetic
// lattice simulator. Each subcommand reads a strict JSON config and writes
// plot-ready CSVs plus a run manifest into the output directory.
//
// Exit codes: 0 success, 2 validation, 3 numeric failure, 4 I/O.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "degcav/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw degcav::IoError("cannot read config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_experiment(degcav::config::Experiment exp, const std::string& config_path,
                   const std::string& output_dir, unsigned threads, bool overwrite) {
    const auto cfg = degcav::config::parse_text(exp, read_file(config_path));
    const auto result = degcav::runner::run(cfg, output_dir, threads, overwrite);
    for (const auto& f : result.outputs) std::cout << "wrote " << f << "\n";
    std::cout << "wrote " << (std::filesystem::path(output_dir) / "run_manifest.json").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"degcav: single degenerate-cavity synthetic-lattice simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir = "out";
    unsigned threads = 0;
    bool overwrite = false;

    const std::vector<std::pair<std::string, degcav::config::Experiment>> experiments = {
        {"optics-tables", degcav::config::Experiment::optics_tables},
        {"static-spectrum", degcav::config::Experiment::static_spectrum},
        {"pulse", degcav::config::Experiment::pulse},
        {"sweep", degcav::config::Experiment::sweep},
        {"floquet-spectrum", degcav::config::Experiment::floquet_spectrum},
        {"floquet-bands", degcav::config::Experiment::floquet_bands},
        {"winding", degcav::config::Experiment::winding},
    };

    degcav::config::Experiment selected{};
    for (const auto& [name, exp] : experiments) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "path to the JSON run config")->required();
        sub->add_option("--output", output_dir, "output directory");
        sub->add_option("--threads", threads, "worker threads (0 = all cores)");
        sub->add_flag("--overwrite", overwrite, "allow clobbering existing output files");
        sub->callback([&selected, exp]() { selected = exp; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return run_experiment(selected, config_path, output_dir, threads, overwrite);
    } catch (const degcav::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const degcav::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const degcav::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
