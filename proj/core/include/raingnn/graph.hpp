#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "raingnn/types.hpp"

namespace raingnn {

inline constexpr double kEarthRadiusKm = 6371.0;

struct GeoPoint {
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;
};

// Great-circle distance on a sphere of radius kEarthRadiusKm.
double haversine_km(GeoPoint a, GeoPoint b);

// A_ij = 1 / (d_ij + epsilon_km) for every pair.
struct InverseDistanceScheme {
  double epsilon_km = 1.0;
  double self_loop_weight = 1.0;
};

// Inverse-distance weights restricted to each node's k nearest neighbours,
// symmetrized by keeping an edge if either endpoint selected it.
struct KnnScheme {
  std::size_t k = 3;
  double epsilon_km = 1.0;
  double self_loop_weight = 1.0;
};

// A_ij = d_ij. Kept for comparison against the inverse weighting; distant
// stations dominate under this scheme.
struct RawDistanceScheme {
  double self_loop_weight = 1.0;
};

using AdjacencyScheme = std::variant<InverseDistanceScheme, KnnScheme, RawDistanceScheme>;

std::string scheme_name(const AdjacencyScheme& scheme);

Eigen::MatrixXd distance_matrix(std::span<const Station> stations);

// Throws DuplicateCoordinates when epsilon is 0 and two stations coincide.
Eigen::MatrixXd build_adjacency(const Eigen::MatrixXd& distances_km,
                                const AdjacencyScheme& scheme);
Eigen::MatrixXd build_adjacency(std::span<const Station> stations,
                                const AdjacencyScheme& scheme);

// D^{-1/2} A D^{-1/2} with D_ii the weighted degree. Requires a square,
// symmetric, non-negative matrix; throws IsolatedNode on a zero row sum.
Eigen::MatrixXd normalize_adjacency(const Eigen::MatrixXd& adjacency);

class StationGraph {
 public:
  static StationGraph build(std::span<const Station> stations, const AdjacencyScheme& scheme);

  std::size_t size() const { return node_order_.size(); }
  const std::vector<std::string>& node_order() const { return node_order_; }
  const Eigen::MatrixXd& distances_km() const { return distances_km_; }
  const Eigen::MatrixXd& adjacency() const { return adjacency_; }
  const Eigen::VectorXd& degrees() const { return degrees_; }
  const Eigen::MatrixXd& normalized_adjacency() const { return normalized_; }

 private:
  std::vector<std::string> node_order_;
  Eigen::MatrixXd distances_km_;
  Eigen::MatrixXd adjacency_;
  Eigen::VectorXd degrees_;
  Eigen::MatrixXd normalized_;
};

// `station_i,station_j,distance_km,weight` for every i <= j with a non-zero
// weight (self-loops included).
void write_edges_csv(std::ostream& out, const StationGraph& graph);

}  // namespace raingnn
