#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "edgegen/world.hpp"

namespace edgegen::testing {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("edgegen-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Scene cruise_scene(double gap, double ego_speed, double lead_speed, std::uint64_t noise_seed = 1) {
  Scene s;
  s.scene_id = "test-scene";
  s.initial_gap = gap;
  s.ego_speed0 = ego_speed;
  s.lead_speed0 = lead_speed;
  s.noise_seed = noise_seed;
  return s;
}

}  // namespace edgegen::testing
