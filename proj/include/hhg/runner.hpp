#pragma once

// Executes scenarios: dipole tables through a content-addressed cache, the
// selected stages per case, CSV/binary outputs and a checksummed manifest.

#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "hhg/scenario.hpp"

namespace hhg {

inline constexpr const char* kOutDirEnv = "HHGSIM_OUT_DIR";
inline constexpr const char* kCodeVersion = "hhgsim 0.1.0";

/// $HHGSIM_OUT_DIR, or "hhg_out" when unset.
std::filesystem::path default_out_dir();

std::string sha256_hex(const std::string& bytes);
std::string file_sha256(const std::filesystem::path& path);

/// Hash of everything that determines a table's content.
std::string table_cache_key(const AtomModel& atom, double wavelength_nm, int order,
                            const GridSpec& grid, const SfaNumerics& numerics);

/// Directory-backed table cache; safe to share between threads.
class TableCache {
 public:
  explicit TableCache(std::filesystem::path dir) : dir_(std::move(dir)) {}
  const std::filesystem::path& dir() const { return dir_; }

  /// Loads or builds (and stores) the table. `hit` reports a cache hit.
  DipoleTable get(const AtomModel& atom, double wavelength_nm, int order, const GridSpec& grid,
                  const SfaNumerics& numerics, bool* hit = nullptr);

 private:
  std::filesystem::path dir_;
  std::mutex mutex_;
  std::map<std::string, DipoleTable> memory_;
};

struct ManifestFile {
  std::string path;  // relative to the run directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string scenario_id;
  std::string scenario_hash;  // SHA-256 of the canonical scenario text
  std::string code_version = kCodeVersion;
  double wall_time_s = 0.0;
  std::vector<ManifestFile> files;                  // sorted by path
  std::vector<std::pair<std::string, bool>> cache;  // table key -> hit
  std::map<std::string, std::string> errors;        // "case/stage" -> message

  bool ok() const { return errors.empty(); }
  std::string text() const;
  static RunManifest parse(const std::string& text);
  /// Every listed file exists below `run_dir` with the recorded checksum.
  bool verify(const std::filesystem::path& run_dir, std::string* problem = nullptr) const;
};

struct RunOptions {
  std::filesystem::path out_dir;    // empty: scenario run.out_dir, else default_out_dir()
  std::filesystem::path cache_dir;  // empty: <out_dir>/table_cache
  std::vector<std::string> stages;  // non-empty: replaces run.stages
  std::string only_case;            // non-empty: run just this case
  std::size_t workers = 1;          // concurrent cases
  std::function<void(const std::string&)> log;  // progress lines
};

/// Runs every case of the scenario into <out_dir>/<run.id>/[<case>/].
/// Stage errors are recorded and the remaining stages still run.
RunManifest run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// Canonical number formatting used in every CSV (shortest round-trip).
std::string fmt(double v);

}  // namespace hhg
