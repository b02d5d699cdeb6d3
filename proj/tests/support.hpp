#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "erasure/dataset.hpp"
#include "erasure/error.hpp"

namespace test {

inline std::filesystem::path data_file(const std::string& name) {
  return std::filesystem::path(ERASURE_TEST_DATA_DIR) / name;
}

inline bool have_data(const std::string& name) { return std::filesystem::exists(data_file(name)); }

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("erasure_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

  std::filesystem::path write(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Collects warnings for the lifetime of the object.
struct WarningLog {
  std::vector<std::string> messages;
  erasure::ScopedWarningHandler handler{[this](std::string_view m) { messages.emplace_back(m); }};

  bool contains(const std::string& needle) const {
    for (const auto& m : messages) {
      if (m.find(needle) != std::string::npos) return true;
    }
    return false;
  }
};

inline std::vector<std::size_t> iota_ids(std::size_t n) {
  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  return ids;
}

/// Two numeric features, a categorical feature "group" and a target "label".
/// label is "pos" when x + y > 0 (with a few flips), which keeps classifiers honest.
inline erasure::Dataset synthetic(std::size_t n, std::uint64_t seed = 7, double flip = 0.05) {
  using namespace erasure;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(n), y(n), age(n);
  std::vector<std::string> group(n), label(n);
  const char* groups[] = {"a", "b", "c"};
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = normal(rng);
    y[i] = normal(rng);
    age[i] = 18 + static_cast<double>(rng() % 60);
    group[i] = groups[rng() % 3];
    bool pos = x[i] + y[i] > 0;
    if (unit(rng) < flip) pos = !pos;
    label[i] = pos ? "pos" : "neg";
  }
  Schema schema({{"x", ColumnKind::numeric},
                 {"y", ColumnKind::numeric},
                 {"age", ColumnKind::numeric},
                 {"group", ColumnKind::categorical},
                 {"label", ColumnKind::categorical}},
                "label", {"x", "y", "age", "group"});
  return Dataset(schema, {x, y, age, group, label}, iota_ids(n));
}

}  // namespace test
