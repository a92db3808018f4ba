#include "raingnn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "raingnn/csv.hpp"
#include "raingnn/error.hpp"

namespace raingnn {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

void check_epsilon(double epsilon_km) {
  if (!(epsilon_km >= 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon_km must be >= 0");
}

void check_self_loop(double w) {
  if (!(w >= 0.0)) throw Error(ErrorCode::InvalidArgument, "self_loop_weight must be >= 0");
}

double inverse_weight(double d, double epsilon_km, Eigen::Index i, Eigen::Index j) {
  if (d + epsilon_km == 0.0) {
    throw Error(ErrorCode::DuplicateCoordinates,
                "nodes " + std::to_string(i) + " and " + std::to_string(j) +
                    " coincide and epsilon_km is 0");
  }
  return 1.0 / (d + epsilon_km);
}

}  // namespace

double haversine_km(GeoPoint a, GeoPoint b) {
  const double lat1 = a.latitude_deg * kDegToRad;
  const double lat2 = b.latitude_deg * kDegToRad;
  const double dlat = (b.latitude_deg - a.latitude_deg) * kDegToRad;
  const double dlon = (b.longitude_deg - a.longitude_deg) * kDegToRad;
  const double s_lat = std::sin(dlat / 2.0);
  const double s_lon = std::sin(dlon / 2.0);
  const double h =
      std::clamp(s_lat * s_lat + std::cos(lat1) * std::cos(lat2) * s_lon * s_lon, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

std::string scheme_name(const AdjacencyScheme& scheme) {
  struct Visitor {
    std::string operator()(const InverseDistanceScheme&) const { return "inverse_distance"; }
    std::string operator()(const KnnScheme&) const { return "knn"; }
    std::string operator()(const RawDistanceScheme&) const { return "raw_distance"; }
  };
  return std::visit(Visitor{}, scheme);
}

Eigen::MatrixXd distance_matrix(std::span<const Station> stations) {
  const auto n = static_cast<Eigen::Index>(stations.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Station& si = stations[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Station& sj = stations[static_cast<std::size_t>(j)];
      d(i, j) = d(j, i) = haversine_km({si.latitude_deg, si.longitude_deg},
                                       {sj.latitude_deg, sj.longitude_deg});
    }
  }
  return d;
}

Eigen::MatrixXd build_adjacency(const Eigen::MatrixXd& distances_km,
                                const AdjacencyScheme& scheme) {
  if (distances_km.rows() != distances_km.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "distance matrix must be square");
  }
  if (distances_km.rows() == 0) throw Error(ErrorCode::EmptyDataset, "graph needs a station");
  if (!distances_km.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "distances must be finite");
  }
  const Eigen::Index n = distances_km.rows();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);

  if (const auto* inv = std::get_if<InverseDistanceScheme>(&scheme)) {
    check_epsilon(inv->epsilon_km);
    check_self_loop(inv->self_loop_weight);
    for (Eigen::Index i = 0; i < n; ++i) {
      a(i, i) = inv->self_loop_weight;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        a(i, j) = a(j, i) = inverse_weight(distances_km(i, j), inv->epsilon_km, i, j);
      }
    }
  } else if (const auto* knn = std::get_if<KnnScheme>(&scheme)) {
    check_epsilon(knn->epsilon_km);
    check_self_loop(knn->self_loop_weight);
    if (knn->k == 0) throw Error(ErrorCode::InvalidArgument, "knn k must be >= 1");
    std::vector<Eigen::Index> order;
    for (Eigen::Index i = 0; i < n; ++i) {
      a(i, i) = knn->self_loop_weight;
      order.clear();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j != i) order.push_back(j);
      }
      std::stable_sort(order.begin(), order.end(), [&](Eigen::Index p, Eigen::Index q) {
        return distances_km(i, p) < distances_km(i, q);
      });
      const std::size_t keep = std::min(knn->k, order.size());
      for (std::size_t r = 0; r < keep; ++r) {
        const Eigen::Index j = order[r];
        a(i, j) = a(j, i) = inverse_weight(distances_km(i, j), knn->epsilon_km, i, j);
      }
    }
  } else {
    const auto& raw = std::get<RawDistanceScheme>(scheme);
    check_self_loop(raw.self_loop_weight);
    a = distances_km;
    a.diagonal().setConstant(raw.self_loop_weight);
  }
  return a;
}

Eigen::MatrixXd build_adjacency(std::span<const Station> stations,
                                const AdjacencyScheme& scheme) {
  return build_adjacency(distance_matrix(stations), scheme);
}

Eigen::MatrixXd normalize_adjacency(const Eigen::MatrixXd& adjacency) {
  const Eigen::Index n = adjacency.rows();
  if (n != adjacency.cols()) throw Error(ErrorCode::ShapeMismatch, "adjacency must be square");
  if ((adjacency.array() < 0.0).any() || !adjacency.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "adjacency weights must be finite and >= 0");
  }
  if (adjacency != adjacency.transpose()) {
    throw Error(ErrorCode::InvalidArgument, "adjacency must be symmetric");
  }
  const Eigen::VectorXd degree = adjacency.rowwise().sum();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(degree[i] > 0.0)) {
      throw Error(ErrorCode::IsolatedNode, "node " + std::to_string(i) + " has zero degree");
    }
  }
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out(i, j) = adjacency(i, j) / std::sqrt(degree[i] * degree[j]);
    }
  }
  return out;
}

StationGraph StationGraph::build(std::span<const Station> stations,
                                 const AdjacencyScheme& scheme) {
  StationGraph g;
  for (const Station& s : stations) g.node_order_.push_back(s.station_id);
  g.distances_km_ = distance_matrix(stations);
  g.adjacency_ = build_adjacency(g.distances_km_, scheme);
  g.degrees_ = g.adjacency_.rowwise().sum();
  g.normalized_ = normalize_adjacency(g.adjacency_);
  return g;
}

void write_edges_csv(std::ostream& out, const StationGraph& graph) {
  out << "station_i,station_j,distance_km,weight\n";
  const auto n = static_cast<Eigen::Index>(graph.size());
  char buf[96];
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double w = graph.adjacency()(i, j);
      if (w == 0.0) continue;
      std::snprintf(buf, sizeof buf, ",%.6f,%.9g", graph.distances_km()(i, j), w);
      out << csv::escape(graph.node_order()[static_cast<std::size_t>(i)]) << ','
          << csv::escape(graph.node_order()[static_cast<std::size_t>(j)]) << buf << '\n';
    }
  }
}

}  // namespace raingnn
