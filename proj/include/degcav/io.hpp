// io.hpp — deterministic CSV/JSON emission with atomic writes, and the
// JSON serialization of lattice models for external cross-checks.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "degcav/common.hpp"
#include "degcav/lattice.hpp"

namespace degcav::io {

namespace fs = std::filesystem;

// fixed-format float text: deterministic across reruns, locale-free
inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

// Write-through-temp-then-rename; refuses to clobber unless allowed. No
// partial files become visible on error.
inline void write_text_atomic(const fs::path& path, const std::string& content, bool overwrite) {
    std::error_code ec;
    if (fs::exists(path, ec) && !overwrite)
        throw IoError("refusing to overwrite existing file: " + path.string() + " (pass --overwrite)");
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out << content;
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError("rename failed for " + path.string() + ": " + ec.message());
    }
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row) {
        if (row.size() != header.size()) throw ValidationError("CsvTable: row width mismatch");
        rows.push_back(std::move(row));
    }

    std::string text() const {
        std::string s;
        for (std::size_t i = 0; i < header.size(); ++i) {
            s += header[i];
            s += (i + 1 < header.size()) ? ',' : '\n';
        }
        for (const auto& row : rows)
            for (std::size_t i = 0; i < row.size(); ++i) {
                s += row[i];
                s += (i + 1 < row.size()) ? ',' : '\n';
            }
        return s;
    }
};

inline void write_csv(const fs::path& path, const CsvTable& table, bool overwrite) {
    write_text_atomic(path, table.text(), overwrite);
}

// sites, bonds as (a, b, re, im) triplet rows, and the decay vector
inline nlohmann::json to_json(const lattice::LatticeModel& model) {
    nlohmann::json j;
    j["sites"] = nlohmann::json::array();
    for (const auto& s : model.sites)
        j["sites"].push_back({{"oam", s.oam},
                              {"polarization", s.pol == lattice::Polarization::H ? "H" : "V"},
                              {"chain_index", s.chain_index}});
    j["bonds"] = nlohmann::json::array();
    for (const auto& b : model.bonds)
        j["bonds"].push_back({{"a", b.a}, {"b", b.b}, {"re", b.amplitude.real()}, {"im", b.amplitude.imag()}});
    j["decay"] = model.decay;
    j["internal_loss"] = model.internal_loss;
    j["blocks"] = nlohmann::json::array();
    for (auto blk : model.block)
        j["blocks"].push_back(blk == lattice::Block::left ? "left"
                              : blk == lattice::Block::center ? "center"
                                                              : "right");
    return j;
}

inline lattice::LatticeModel model_from_json(const nlohmann::json& j) {
    lattice::LatticeModel m;
    for (const auto& s : j.at("sites")) {
        lattice::SiteLabel lab;
        lab.oam = s.at("oam").get<int>();
        lab.pol = s.at("polarization").get<std::string>() == "H" ? lattice::Polarization::H
                                                                 : lattice::Polarization::V;
        lab.chain_index = s.at("chain_index").get<int>();
        m.sites.push_back(lab);
    }
    for (const auto& b : j.at("bonds"))
        m.bonds.push_back({b.at("a").get<int>(), b.at("b").get<int>(),
                           complexd{b.at("re").get<double>(), b.at("im").get<double>()}});
    m.decay = j.at("decay").get<std::vector<double>>();
    if (j.contains("internal_loss")) m.internal_loss = j.at("internal_loss").get<std::vector<double>>();
    for (const auto& blk : j.at("blocks")) {
        const auto s = blk.get<std::string>();
        m.block.push_back(s == "left" ? lattice::Block::left
                          : s == "center" ? lattice::Block::center
                                          : lattice::Block::right);
    }
    m.validate();
    return m;
}

// Exclusive per-directory lock; exists to serialize runs that share an
// output directory. Stale locks (crashes) must be removed by hand.
class DirectoryLock {
  public:
    explicit DirectoryLock(const fs::path& dir) : lock_path_(dir / ".degcav.lock") {
        std::error_code ec;
        fs::create_directories(dir, ec);
        std::ifstream probe(lock_path_);
        if (probe.good())
            throw IoError("output directory is locked by another run: " + lock_path_.string());
        std::ofstream out(lock_path_, std::ios::trunc);
        if (!out) throw IoError("cannot create lock file: " + lock_path_.string());
        out << "locked\n";
        held_ = true;
    }
    ~DirectoryLock() {
        if (held_) {
            std::error_code ec;
            fs::remove(lock_path_, ec);
        }
    }
    DirectoryLock(const DirectoryLock&) = delete;
    DirectoryLock& operator=(const DirectoryLock&) = delete;

  private:
    fs::path lock_path_;
    bool held_ = false;
};

}  // namespace degcav::io
