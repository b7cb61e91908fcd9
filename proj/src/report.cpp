#include "varfrac/report.hpp"

#include <cstdint>
#include <cstdio>
#include <json.hpp>

#include "varfrac/errors.hpp"

namespace varfrac {

RunManifest::RunManifest(std::filesystem::path path, std::string config_hash, std::string command)
    : path_(std::move(path)), hash_(std::move(config_hash)), command_(std::move(command)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  write();
}

void RunManifest::declare_output(const std::filesystem::path& file) {
  outputs_.push_back(file.string());
  write();
}

void RunManifest::begin_stage(const std::string& name) {
  stages_.push_back({name});
  stage_start_ = std::chrono::steady_clock::now();
  write();
}

void RunManifest::end_stage(const std::string& status) {
  if (stages_.empty()) return;
  stages_.back().status = status;
  stages_.back().seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - stage_start_).count();
  write();
}

void RunManifest::finish(int exit_code) {
  if (!stages_.empty() && stages_.back().status == "running") end_stage(exit_code == 0 ? "ok" : "failed");
  exit_code_ = exit_code;
  write();
}

void RunManifest::write() const {
  nlohmann::ordered_json j;
  j["config_hash"] = hash_;
  j["version"] = version_string();
  j["command"] = command_;
  j["stages"] = nlohmann::ordered_json::array();
  for (const auto& s : stages_)
    j["stages"].push_back({{"name", s.name}, {"status", s.status}, {"wall_seconds", s.seconds}});
  j["outputs"] = outputs_;
  if (exit_code_ >= 0) j["exit_code"] = exit_code_;
  std::ofstream out(path_);
  if (!out) throw ConfigError("cannot write manifest " + path_.string());
  out << j.dump(2) << '\n';
}

std::ofstream open_csv(RunManifest& manifest, const std::filesystem::path& file,
                       const std::string& header, const std::vector<std::string>& comments) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  manifest.declare_output(file);
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot write " + file.string());
  out << "# config_hash=" << manifest.config_hash() << " version=" << version_string() << '\n';
  for (const auto& c : comments) out << "# " << c << '\n';
  if (!header.empty()) out << header << '\n';
  return out;
}

std::string fmt(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string version_string() { return VARFRAC_VERSION; }

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace varfrac
