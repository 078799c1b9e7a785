#pragma once

#include <filesystem>
#include <random>

namespace iesp::test {

// Seeded per test so failures reproduce.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

  private:
    std::mt19937_64 engine_;
};

inline std::filesystem::path data_dir() {
    return IESP_DATA_DIR;
}

inline std::filesystem::path scenario_path(const char* name) {
    return data_dir() / "scenarios" / name;
}

// Fresh, empty scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const char* name) {
    const auto dir = std::filesystem::path(IESP_SCRATCH_DIR) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace iesp::test
