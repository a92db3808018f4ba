#include "cli/synth.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include <Eigen/Dense>

#include "raingnn/error.hpp"
#include "raingnn/graph.hpp"

namespace raingnn::cli {

SyntheticDataset make_synthetic_dataset(const SynthOptions& options, std::uint64_t seed) {
  if (options.stations == 0 || options.days < 2) {
    throw Error(ErrorCode::InvalidArgument, "synthetic data needs >= 1 station and >= 2 days");
  }
  if (!(options.missing_frac >= 0.0 && options.missing_frac < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "synth-missing-frac must lie in [0, 1)");
  }
  const auto start = parse_iso_date(options.start_date);
  if (!start) throw Error(ErrorCode::InvalidArgument, "bad synth-start date");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  SyntheticDataset out;
  for (std::size_t i = 0; i < options.stations; ++i) {
    char id[16];
    char name[32];
    std::snprintf(id, sizeof id, "ST%02zu", i + 1);
    std::snprintf(name, sizeof name, "Synthetic %02zu", i + 1);
    Station s;
    s.station_id = id;
    s.name = name;
    s.latitude_deg = -17.0 + 2.0 * (unit(rng) - 0.5);
    s.longitude_deg = -66.0 + 2.0 * (unit(rng) - 0.5);
    s.altitude_m = std::round(300.0 + 3700.0 * unit(rng));
    out.stations.push_back(std::move(s));
  }

  Eigen::MatrixXd mix = build_adjacency(out.stations, InverseDistanceScheme{});
  for (Eigen::Index r = 0; r < mix.rows(); ++r) mix.row(r) /= mix.row(r).sum();

  constexpr double kPhi1 = 1.81;
  constexpr double kPhi2 = -0.9025;
  constexpr double kMean = 6.0;
  const auto n = static_cast<Eigen::Index>(options.stations);
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd cur = Eigen::VectorXd::Zero(n);

  // Burn-in brings the process to its stationary regime before recording.
  const std::size_t burn_in = 200;
  for (std::size_t step = 0; step < burn_in + options.days; ++step) {
    const double shared = normal(rng);
    Eigen::VectorXd noise(n);
    for (Eigen::Index i = 0; i < n; ++i) noise[i] = 0.45 * shared + 0.35 * normal(rng);
    Eigen::VectorXd next = kPhi1 * (mix * cur) + kPhi2 * (mix * prev) + noise;
    prev = cur;
    cur = next;
    if (step < burn_in) continue;

    const auto day = static_cast<std::int64_t>(step - burn_in);
    for (Eigen::Index i = 0; i < n; ++i) {
      DailyRecord r;
      r.station_id = out.stations[static_cast<std::size_t>(i)].station_id;
      r.date = *start + std::chrono::days{day};
      if (unit(rng) >= options.missing_frac) {
        r.precip_mm = std::round(std::max(0.0, kMean + cur[i]) * 10.0) / 10.0;
      }
      out.records.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace raingnn::cli
