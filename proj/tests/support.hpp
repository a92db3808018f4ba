#pragma once

// Shared test helpers and independent reference implementations. Nothing here
// calls into the library code it is used to check.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <unistd.h>

namespace testsupport {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(RAINGNN_TEST_FIXTURES) / name;
}

inline std::filesystem::path source_path(const std::string& rel) {
  return std::filesystem::path(RAINGNN_SOURCE_DIR) / rel;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("raingnn-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
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

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, std::string_view text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

inline double rel_err(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

// ---- oracles ----

inline unsigned xor_oracle(std::string_view bytes) {
  unsigned acc = 0;
  for (unsigned char c : bytes) acc ^= c;
  return acc;
}

inline std::string hex2(unsigned v) {
  static const char* digits = "0123456789ABCDEF";
  return {digits[(v >> 4) & 0xF], digits[v & 0xF]};
}

// H'_i = relu(sum_j A_ij * (H_j W)), one node and one output column at a time.
inline Eigen::MatrixXd neighbor_sum_oracle(const Eigen::MatrixXd& h, const Eigen::MatrixXd& a,
                                           const Eigen::MatrixXd& w) {
  const long n = h.rows();
  Eigen::MatrixXd out(n, w.cols());
  for (long i = 0; i < n; ++i) {
    for (long c = 0; c < w.cols(); ++c) {
      double s = 0.0;
      for (long j = 0; j < n; ++j) {
        double hw = 0.0;
        for (long k = 0; k < h.cols(); ++k) hw += h(j, k) * w(k, c);
        s += a(i, j) * hw;
      }
      out(i, c) = s > 0.0 ? s : 0.0;
    }
  }
  return out;
}

inline double naive_mse(const std::vector<double>& y, const std::vector<double>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - p[i]) * (y[i] - p[i]);
  return s / static_cast<double>(y.size());
}

inline double naive_mae(const std::vector<double>& y, const std::vector<double>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - p[i]);
  return s / static_cast<double>(y.size());
}

// Two-pass sample correlation.
inline double naive_pearson(const std::vector<double>& y, const std::vector<double>& p) {
  const double n = static_cast<double>(y.size());
  double my = 0.0, mp = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    my += y[i];
    mp += p[i];
  }
  my /= n;
  mp /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sxy += (y[i] - my) * (p[i] - mp);
    sxx += (y[i] - my) * (y[i] - my);
    syy += (p[i] - mp) * (p[i] - mp);
  }
  return (sxy / (n - 1)) / (std::sqrt(sxx / (n - 1)) * std::sqrt(syy / (n - 1)));
}

// Random symmetric non-negative adjacency with a positive diagonal.
inline Eigen::MatrixXd random_adjacency(std::mt19937_64& rng, int n, double density = 0.6) {
  std::uniform_real_distribution<double> w(0.01, 3.0);
  std::bernoulli_distribution keep(density);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = w(rng);
    for (int j = i + 1; j < n; ++j) {
      if (keep(rng)) a(i, j) = a(j, i) = w(rng);
    }
  }
  return a;
}

// D^{-1/2} A D^{-1/2}, elementwise.
inline Eigen::MatrixXd normalize_oracle(const Eigen::MatrixXd& a) {
  const long n = a.rows();
  std::vector<double> d(n, 0.0);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) d[i] += a(i, j);
  Eigen::MatrixXd out(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) out(i, j) = a(i, j) / std::sqrt(d[i] * d[j]);
  return out;
}

}  // namespace testsupport
