#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "raingnn/calendar.hpp"
#include "raingnn/csv.hpp"
#include "raingnn/dataio.hpp"
#include "raingnn/error.hpp"
#include "support.hpp"

using namespace raingnn;

namespace {

template <typename F>
ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::IoError;
}

CivilDate day(int offset) { return *parse_iso_date("2024-01-01") + std::chrono::days{offset}; }

DailyRecord rec(const std::string& id, int offset, std::optional<double> v) {
  return {id, day(offset), v};
}

Station station(const std::string& id, double lat = 0.0, double lon = 0.0, double alt = 0.0) {
  return {id, id, lat, lon, alt};
}

std::vector<double> values_of(const std::vector<DailyRecord>& rs, const std::string& id) {
  std::vector<double> out;
  for (const auto& r : rs)
    if (r.station_id == id) out.push_back(r.precip_mm.value());
  return out;
}

std::vector<DailyRecord> series(const std::string& id, const std::vector<std::optional<double>>& v) {
  std::vector<DailyRecord> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(rec(id, static_cast<int>(i), v[i]));
  return out;
}

}  // namespace

TEST(Csv, SplitLineQuoting) {
  EXPECT_EQ(*csv::split_line(R"(a,"b,c",d)"), (std::vector<std::string>{"a", "b,c", "d"}));
  EXPECT_EQ(*csv::split_line(R"("say ""hi""",)"), (std::vector<std::string>{"say \"hi\"", ""}));
  EXPECT_FALSE(csv::split_line(R"(a,"open)"));
  EXPECT_EQ(csv::escape("x,y"), "\"x,y\"");
  EXPECT_EQ(csv::escape("plain"), "plain");
}

TEST(LoadStations, FortyOneRows) {
  const auto stations = load_stations(testsupport::fixture("stations_41.csv"));
  EXPECT_EQ(stations.size(), 41u);
  EXPECT_EQ(stations.front().station_id, "BO001");
}

TEST(LoadStations, EmptyDataSection) {
  std::istringstream in("station_id,name,latitude_deg,longitude_deg,altitude_m\n");
  EXPECT_TRUE(read_stations(in).empty());
}

TEST(LoadStations, Errors) {
  const std::string h = "station_id,name,latitude_deg,longitude_deg,altitude_m\n";
  EXPECT_EQ(error_of([&] {
              std::istringstream in(h + "S1,a,91,0,10\n");
              read_stations(in);
            }),
            ErrorCode::RangeViolation);
  EXPECT_EQ(error_of([&] {
              std::istringstream in(h + "S1,a,0,-181,10\n");
              read_stations(in);
            }),
            ErrorCode::RangeViolation);
  EXPECT_EQ(error_of([&] {
              std::istringstream in(h + "S1,a,0,0,10\nS1,b,1,1,10\n");
              read_stations(in);
            }),
            ErrorCode::DuplicateStation);
  try {
    std::istringstream in(h + "S1,a,0,0,10\nS2,b,north,1,10\n");
    read_stations(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedRow);
    EXPECT_NE(e.detail().find("line 3"), std::string::npos);
  }
  EXPECT_EQ(error_of([&] {
              std::istringstream in("id,lat\nS1,0\n");
              read_stations(in);
            }),
            ErrorCode::MalformedRow);
}

TEST(LoadStations, QuotedNameAndWriteRoundtrip) {
  const std::string text =
      "station_id,name,latitude_deg,longitude_deg,altitude_m\n"
      "S1,\"La Paz, El Alto\",-16.5,-68.15,4061\n";
  std::istringstream in(text);
  const auto st = read_stations(in);
  ASSERT_EQ(st.size(), 1u);
  EXPECT_EQ(st[0].name, "La Paz, El Alto");
  std::ostringstream out;
  write_stations(out, st);
  std::istringstream back(out.str());
  const auto again = read_stations(back);
  EXPECT_EQ(again[0].name, st[0].name);
  EXPECT_EQ(again[0].latitude_deg, -16.5);
}

TEST(CleanPrecip, Examples) {
  EXPECT_DOUBLE_EQ(*clean_precip_value(" 12,5 mm"), 12.5);
  EXPECT_FALSE(clean_precip_value("").has_value());
  EXPECT_FALSE(clean_precip_value("   ").has_value());
  EXPECT_DOUBLE_EQ(*clean_precip_value("3.2"), 3.2);
  EXPECT_DOUBLE_EQ(*clean_precip_value("1,234.5"), 1234.5);
  EXPECT_DOUBLE_EQ(*clean_precip_value("1.234,5"), 1234.5);
  EXPECT_DOUBLE_EQ(*clean_precip_value("1 234,5 MM"), 1234.5);
  EXPECT_DOUBLE_EQ(*clean_precip_value("7mm"), 7.0);
  EXPECT_EQ(error_of([] { clean_precip_value("abc"); }), ErrorCode::MalformedRow);
}

TEST(LoadRecords, CleaningAndMissing) {
  std::istringstream in(
      "station_id,date,precip_mm\n"
      "S1,2024-01-01,\" 12,5 mm\"\n"
      "S1,2024-01-02,\n"
      "S1,2024-01-03,0\n");
  const auto rs = read_records(in);
  ASSERT_EQ(rs.size(), 3u);
  EXPECT_DOUBLE_EQ(*rs[0].precip_mm, 12.5);
  EXPECT_FALSE(rs[1].precip_mm.has_value());
  EXPECT_EQ(*rs[2].precip_mm, 0.0);
}

TEST(LoadRecords, Errors) {
  const std::string h = "station_id,date,precip_mm\n";
  EXPECT_EQ(error_of([&] {
              std::istringstream in(h + "S1,2024-01-01,-1\n");
              read_records(in);
            }),
            ErrorCode::NegativePrecip);
  EXPECT_EQ(error_of([&] {
              std::istringstream in(h + "S1,2024-01-01,1\nS1,2024-01-01,2\n");
              read_records(in);
            }),
            ErrorCode::DuplicateRecord);
  EXPECT_EQ(error_of([&] {
              std::istringstream in(h + "S1,01/02/2024,1\n");
              read_records(in);
            }),
            ErrorCode::MalformedRow);
  EXPECT_EQ(error_of([&] {
              std::istringstream in(h + "S1,2024-01-01\n");
              read_records(in);
            }),
            ErrorCode::MalformedRow);
}

TEST(LoadRecords, WriteRoundtrip) {
  const std::vector<DailyRecord> rs = {rec("S1", 0, 1.5), rec("S1", 1, std::nullopt),
                                       rec("S2", 0, 0.0)};
  std::ostringstream out;
  write_records(out, rs);
  EXPECT_EQ(out.str(),
            "station_id,date,precip_mm\nS1,2024-01-01,1.5\nS1,2024-01-02,\nS2,2024-01-01,0.0\n");
  std::istringstream in(out.str());
  const auto back = read_records(in);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[1].precip_mm, std::nullopt);
}

TEST(DeviceMap, Reads) {
  std::istringstream in("device_id,station_id\nG1,S1\nG2,S2\n");
  const auto map = read_device_map(in);
  EXPECT_EQ(map.at("G2"), "S2");
}

namespace {

// 10-day span. S1 complete; S2 3 missing (2 empty values + 1 absent day);
// S3 1 missing.
struct SparseFixture {
  std::vector<DailyRecord> records;
  std::vector<Station> stations = {station("S1"), station("S2"), station("S3")};
  SparseFixture() {
    for (int d = 0; d < 10; ++d) {
      records.push_back(rec("S1", d, 1.0));
      if (d != 9) records.push_back(rec("S2", d, (d == 2 || d == 5) ? std::nullopt
                                                                  : std::optional(1.0)));
      records.push_back(rec("S3", d, d == 4 ? std::nullopt : std::optional(1.0)));
    }
  }
};

std::vector<std::string> ids(const Dataset& ds) {
  std::vector<std::string> out;
  for (const auto& s : ds.stations) out.push_back(s.station_id);
  return out;
}

}  // namespace

TEST(DropSparse, ThirtyPercentDroppedAtTwenty) {
  SparseFixture f;
  const auto ds = drop_sparse_stations(f.records, f.stations, 0.20);
  EXPECT_EQ(ids(ds), (std::vector<std::string>{"S1", "S3"}));
  for (const auto& r : ds.records) EXPECT_NE(r.station_id, "S2");
}

TEST(DropSparse, ThresholdOneKeepsAll) {
  SparseFixture f;
  EXPECT_EQ(drop_sparse_stations(f.records, f.stations, 1.0).stations.size(), 3u);
}

TEST(DropSparse, ThresholdZeroKeepsOnlyComplete) {
  SparseFixture f;
  EXPECT_EQ(ids(drop_sparse_stations(f.records, f.stations, 0.0)),
            (std::vector<std::string>{"S1"}));
}

TEST(DropSparse, AllDroppedIsEmptyDataset) {
  std::vector<DailyRecord> rs = {rec("S1", 0, std::nullopt), rec("S1", 1, 1.0)};
  std::vector<Station> st = {station("S1")};
  EXPECT_EQ(error_of([&] { drop_sparse_stations(rs, st, 0.2); }), ErrorCode::EmptyDataset);
}

TEST(DropSparse, MonotoneInThreshold) {
  SparseFixture f;
  std::size_t prev = 0;
  for (double t = 0.0; t <= 1.0; t += 0.05) {
    const auto n = drop_sparse_stations(f.records, f.stations, t).stations.size();
    EXPECT_GE(n, prev);
    prev = n;
  }
}

TEST(Interpolate, Examples) {
  EXPECT_EQ(values_of(interpolate_missing(series("S", {1.0, std::nullopt, 3.0})), "S"),
            (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_EQ(values_of(interpolate_missing(series("S", {std::nullopt, 4.0})), "S"),
            (std::vector<double>{4.0, 4.0}));
  const auto gap = values_of(
      interpolate_missing(series("S", {1.0, std::nullopt, std::nullopt, 4.0})), "S");
  // linear oracle y = 1 + (4 - 1) * i / 3
  ASSERT_EQ(gap.size(), 4u);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(gap[i], 1.0 + 3.0 * i / 3.0, 1e-12);
}

TEST(Interpolate, FillsAbsentDaysAndTrailingGap) {
  std::vector<DailyRecord> rs = {rec("A", 0, 2.0), rec("A", 3, 8.0), rec("B", 0, 1.0),
                                 rec("B", 4, std::nullopt)};
  const auto out = interpolate_missing(rs);
  EXPECT_EQ(values_of(out, "A"), (std::vector<double>{2.0, 4.0, 6.0, 8.0, 8.0}));
  EXPECT_EQ(values_of(out, "B"), (std::vector<double>{1.0, 1.0, 1.0, 1.0, 1.0}));
}

TEST(Interpolate, IdentityOnCompleteSeries) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 30.0);
  std::vector<DailyRecord> rs;
  for (int d = 0; d < 30; ++d) rs.push_back(rec("S", d, u(rng)));
  const auto out = interpolate_missing(rs);
  ASSERT_EQ(out.size(), rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) EXPECT_EQ(out[i].precip_mm, rs[i].precip_mm);
}

TEST(Interpolate, AllMissingStation) {
  EXPECT_EQ(error_of([] { interpolate_missing(series("S", {std::nullopt, std::nullopt})); }),
            ErrorCode::AllMissingStation);
}

TEST(MakeSamples, TenDaysWindowSeven) {
  std::vector<DailyRecord> rs;
  for (int d = 0; d < 10; ++d) rs.push_back(rec("S1", d, d + 1.0));
  std::vector<Station> st = {station("S1", 0, 0, 100)};
  const auto s = make_samples(rs, st, 7);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.feature_dim(), 8u);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(s.dates[k], day(6 + k));
    EXPECT_EQ(s.targets[k](0), 8.0 + k);  // day 8, 9, 10 (1-based)
    for (int j = 0; j < 7; ++j) EXPECT_EQ(s.features[k](0, j), 1.0 + k + j);
  }
}

TEST(MakeSamples, ConstantRainWindowOne) {
  std::vector<DailyRecord> rs;
  for (int d = 0; d < 5; ++d) {
    rs.push_back(rec("A", d, 2.5));
    rs.push_back(rec("B", d, 2.5));
  }
  std::vector<Station> st = {station("A", 0, 0, 100), station("B", 0, 1, 300)};
  const auto s = make_samples(rs, st, 1);
  const double za = s.altitude.apply(100), zb = s.altitude.apply(300);
  EXPECT_NEAR(za, -1.0, 1e-12);
  EXPECT_NEAR(zb, 1.0, 1e-12);
  for (const auto& x : s.features) {
    EXPECT_EQ(x(0, 0), 2.5);
    EXPECT_EQ(x(0, 1), za);
    EXPECT_EQ(x(1, 1), zb);
  }
}

TEST(MakeSamples, SpanEqualToWindowIsTooShort) {
  std::vector<DailyRecord> rs;
  for (int d = 0; d < 7; ++d) rs.push_back(rec("S1", d, 1.0));
  std::vector<Station> st = {station("S1")};
  EXPECT_EQ(error_of([&] { make_samples(rs, st, 7); }), ErrorCode::SpanTooShort);
}

TEST(MakeSamples, TargetsNeverInsideOwnWindow) {
  std::vector<DailyRecord> rs;
  for (int d = 0; d < 20; ++d) rs.push_back(rec("S1", d, 100.0 + d));
  std::vector<Station> st = {station("S1")};
  const auto s = make_samples(rs, st, 4);
  for (std::size_t k = 0; k < s.size(); ++k) {
    for (int j = 0; j < 4; ++j) EXPECT_LT(s.features[k](0, j), s.targets[k](0));
    if (k > 0) EXPECT_LT(s.dates[k - 1], s.dates[k]);
  }
}

TEST(Split, SizesFromFractions) {
  auto check = [](std::size_t n, std::size_t a, std::size_t b, std::size_t c) {
    const auto s = split_sizes(n);
    EXPECT_EQ(s.train, a) << n;
    EXPECT_EQ(s.validation, b) << n;
    EXPECT_EQ(s.test, c) << n;
  };
  check(100, 70, 20, 10);
  check(10, 7, 2, 1);
  check(193, 136, 38, 19);
  EXPECT_EQ(error_of([] { split_sizes(2); }), ErrorCode::EmptySplit);
  EXPECT_EQ(error_of([] { split_sizes(10, {0.5, 0.6, -0.1}); }), ErrorCode::InvalidArgument);
}

TEST(Split, ChronologicalBlocks) {
  std::vector<DailyRecord> rs;
  for (int d = 0; d < 40; ++d) rs.push_back(rec("S1", d, d));
  std::vector<Station> st = {station("S1")};
  const auto s = make_samples(rs, st, 3);
  const auto sp = split_chronological(s);
  EXPECT_EQ(sp.train.size() + sp.validation.size() + sp.test.size(), s.size());
  EXPECT_LT(sp.train.dates.back(), sp.validation.dates.front());
  EXPECT_LT(sp.validation.dates.back(), sp.test.dates.front());
  EXPECT_EQ(sp.train.dates.front(), s.dates.front());
  EXPECT_EQ(sp.test.dates.back(), s.dates.back());
}

TEST(Standardize, ConstantColumnAndMoments) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(3.0, 2.0);
  std::vector<Eigen::MatrixXd> blocks;
  for (int b = 0; b < 6; ++b) {
    Eigen::MatrixXd x(4, 3);
    for (int i = 0; i < 4; ++i) {
      x(i, 0) = g(rng);
      x(i, 1) = 5.0;
      x(i, 2) = g(rng) * 10;
    }
    blocks.push_back(x);
  }
  const auto scaler = FeatureScaler::fit(blocks);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(3), sq = Eigen::VectorXd::Zero(3);
  for (const auto& x : blocks) {
    const Eigen::MatrixXd z = scaler.transform(x);
    for (int i = 0; i < 4; ++i) EXPECT_EQ(z(i, 1), 0.0);
    sum += z.colwise().sum().transpose();
    sq += z.array().square().matrix().colwise().sum().transpose();
    EXPECT_LT((scaler.inverse(z) - x).cwiseAbs().maxCoeff(), 1e-9);
  }
  const double n = 24.0;
  for (int c : {0, 2}) {
    EXPECT_NEAR(sum(c) / n, 0.0, 1e-9);
    EXPECT_NEAR(std::sqrt(sq(c) / n - (sum(c) / n) * (sum(c) / n)), 1.0, 1e-9);
  }
}

TEST(Standardize, TargetsUntouchedAndFitOnTrainOnly) {
  std::vector<DailyRecord> rs;
  for (int d = 0; d < 30; ++d) rs.push_back(rec("S1", d, d < 20 ? 1.0 * (d % 3) : 50.0));
  std::vector<Station> st = {station("S1")};
  const auto s = make_samples(rs, st, 2);
  const auto sp = split_chronological(s);
  const auto val = standardize(sp.validation, sp.train);
  const auto tr = standardize(sp.train, sp.train);
  EXPECT_EQ(val.scaler.mean(), tr.scaler.mean());
  EXPECT_EQ(val.targets[0], sp.validation.targets[0]);
  EXPECT_TRUE(tr.scaler.fitted());
}

TEST(LatestFeatures, SpanTooShortNamesStation) {
  std::vector<DailyRecord> rs;
  for (int d = 0; d < 10; ++d) {
    rs.push_back(rec("A", d, 1.0));
    if (d < 3) rs.push_back(rec("B", d, 1.0));
  }
  std::vector<Station> st = {station("A"), station("B")};
  try {
    latest_features(rs, st, 7, AltitudeScaling{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SpanTooShort);
    EXPECT_NE(e.detail().find("B"), std::string::npos);
  }
  std::vector<Station> only_a = {station("A")};
  const auto x = latest_features(rs, only_a, 7, AltitudeScaling{});
  EXPECT_EQ(x.rows(), 1);
  EXPECT_EQ(x.cols(), 8);
}

TEST(LatestFeatures, GapsFilledLikeTraining) {
  // window of 4 ending day 5: A has an interior gap, B a missing last day
  std::vector<DailyRecord> rs = {rec("A", 0, 1.0), rec("A", 1, 2.0), rec("A", 2, 3.0),
                                 rec("A", 3, std::nullopt), rec("A", 4, std::nullopt),
                                 rec("A", 5, 9.0), rec("B", 0, 0.0), rec("B", 1, 0.0),
                                 rec("B", 2, 4.0), rec("B", 3, 5.0), rec("B", 4, 6.0),
                                 rec("B", 5, std::nullopt)};
  std::vector<Station> st = {station("A", 0, 0, 10), station("B", 0, 0, 30)};
  const auto x = latest_features(rs, st, 4, AltitudeScaling{20.0, 10.0});
  const Eigen::RowVectorXd a = (Eigen::RowVectorXd(5) << 3.0, 5.0, 7.0, 9.0, -1.0).finished();
  const Eigen::RowVectorXd b = (Eigen::RowVectorXd(5) << 4.0, 5.0, 6.0, 6.0, 1.0).finished();
  EXPECT_EQ(x.row(0), a);
  EXPECT_EQ(x.row(1), b);
}
