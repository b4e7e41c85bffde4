#pragma once

// Shared fixtures for the test suite: analytic reference curves, random
// spanning-tree digraph generation, an independent reachability oracle,
// and scratch-directory management.

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "curveform/rng.hpp"
#include "curveform/scenario.hpp"
#include "curveform/topology.hpp"

namespace testutil {

using curveform::DirectedTopology;
using curveform::Rng;
using curveform::Vector2d;

constexpr double kPi = 3.14159265358979323846;

/// Closed test ring: an 8-radius loop with a two-lobe wobble, centred at
/// (4, 4). Lies exactly in the span of a 6-harmonic Fourier basis.
inline Vector2d wobble_ring(double s) {
  return {(8.0 + std::sin(4.0 * kPi * s)) * std::cos(2.0 * kPi * s) + 4.0,
          (8.0 + std::cos(4.0 * kPi * s)) * std::sin(2.0 * kPi * s) + 4.0};
}

inline curveform::SampleSet sample_curve(
    const std::function<Vector2d(double)>& f, int count) {
  curveform::SampleSet set;
  for (int k = 0; k < count; ++k) {
    const double s = static_cast<double>(k) / count;
    set.s.push_back(s);
    set.points.push_back(f(s));
  }
  return set;
}

/// Random digraph that always contains a spanning tree rooted at agent 1
/// and never feeds the leader.
inline DirectedTopology random_rooted_topology(Rng& rng, int n) {
  DirectedTopology topology = DirectedTopology::Empty(n);
  for (int i = 2; i <= n; ++i) {
    const int parent = 1 + static_cast<int>(rng.next_u64() %
                                            static_cast<std::uint64_t>(i - 1));
    topology.add_edge(i, parent, rng.uniform(0.5, 2.0));
  }
  for (int i = 2; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (j != i && topology.weights(i - 1, j - 1) == 0.0 &&
          rng.next_double() < 0.25) {
        topology.add_edge(i, j, rng.uniform(0.5, 2.0));
      }
    }
  }
  return topology;
}

/// Independent reachability check (Floyd-Warshall transitive closure).
inline bool all_reachable_from(const DirectedTopology& topology, int root) {
  const int n = topology.n;
  std::vector<std::vector<bool>> reach(
      static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      // Information flows j -> i when a_ij > 0.
      reach[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
          (i == j) || topology.weights(i, j) > 0.0;
    }
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] &&
            reach[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]) {
          reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
        }
      }
    }
  }
  for (int j = 0; j < n; ++j) {
    if (!reach[static_cast<std::size_t>(root - 1)][static_cast<std::size_t>(j)]) {
      return false;
    }
  }
  return true;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& label) {
    namespace fs = std::filesystem;
    path_ = fs::temp_directory_path() /
            ("curveform_test_" + label + "_" + std::to_string(counter()++));
    fs::create_directories(path_);
  }

  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }

  std::filesystem::path path() const { return path_; }

  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  static int& counter() {
    static int value = 0;
    return value;
  }

  std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace testutil
