#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace varfrac {

/// Per-run manifest: config hash, code version, per-stage status and wall-times, and every
/// output file. It is rewritten to disk before each output file is opened, so no output
/// exists without a manifest that references it.
class RunManifest {
 public:
  RunManifest(std::filesystem::path path, std::string config_hash, std::string command);

  const std::string& config_hash() const { return hash_; }
  const std::filesystem::path& path() const { return path_; }

  /// Registers an output path and flushes the manifest.
  void declare_output(const std::filesystem::path& file);
  void begin_stage(const std::string& name);
  void end_stage(const std::string& status);
  void finish(int exit_code);

  void write() const;

 private:
  struct Stage {
    std::string name;
    std::string status = "running";
    double seconds = 0.0;
  };
  std::filesystem::path path_;
  std::string hash_;
  std::string command_;
  std::vector<std::string> outputs_;
  std::vector<Stage> stages_;
  std::chrono::steady_clock::time_point stage_start_;
  int exit_code_ = -1;
};

/// Opens a CSV output after declaring it in the manifest; writes the `#` comment lines with
/// the manifest hash, then the header row (skipped when empty, for writers that emit their
/// own header).
std::ofstream open_csv(RunManifest& manifest, const std::filesystem::path& file,
                       const std::string& header,
                       const std::vector<std::string>& comments = {});

/// Fixed-format number for reproducible text output (%.17g).
std::string fmt(double value);

std::string version_string();

/// 64-bit FNV-1a of a byte string, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace varfrac
