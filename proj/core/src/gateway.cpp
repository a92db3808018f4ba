#include "raingnn/gateway.hpp"

#include <chrono>
#include <map>
#include <ostream>
#include <thread>

#include "json.hpp"
#include "raingnn/dataio.hpp"
#include "raingnn/error.hpp"

// After Eigen: <resolv.h>, pulled in by httplib, defines a `_res` macro.
#include "httplib.h"

namespace raingnn {
namespace {

using nlohmann::json;

constexpr const char* kJson = "application/json";

std::string error_body(std::string_view reason) {
  return json{{"status", "error"}, {"reason", reason}}.dump();
}

const std::string& ok_body() {
  static const std::string body = json{{"status", "ok"}}.dump();
  return body;
}

UnixSeconds system_now() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

InboundResponse handle_inbound(std::string_view form_body, ReadingStore& store,
                               UnixSeconds received_at) {
  httplib::Params fields;
  httplib::detail::parse_query_text(form_body.data(), form_body.size(), fields);
  const auto body = fields.find("Body");
  if (body == fields.end()) return {400, error_body(error_name(ErrorCode::BadFrame))};

  try {
    parse_telemetry(body->second);
  } catch (const Error& e) {
    return {400, error_body(e.name())};
  }
  try {
    store.append(received_at, body->second);
  } catch (const Error& e) {
    return {500, error_body(e.name())};
  }
  return {200, ok_body()};
}

std::optional<StoredReading> latest_reading(std::span<const StoredReading> readings,
                                            std::string_view device_id) {
  const StoredReading* best = nullptr;
  for (const StoredReading& r : readings) {
    if (r.message.device_id != device_id) continue;
    if (best == nullptr || r.message.timestamp >= best->message.timestamp) best = &r;
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

std::string reading_json(const StoredReading& r) {
  const TelemetryMessage& m = r.message;
  return json{{"received_at", format_iso_instant(r.received_at)},
              {"frame", r.raw_frame},
              {"device_id", m.device_id},
              {"timestamp", m.timestamp},
              {"tip_count", m.tip_count},
              {"rain_mm", tips_to_mm(m.tip_count)},
              {"temp_c", m.temp_c.value()},
              {"soil_pct", m.soil_pct.value()},
              {"hum_pct", m.hum_pct.value()},
              {"uv_mw_cm2", m.uv_mw_cm2.value()},
              {"batt_v", m.batt_v.value()}}
      .dump();
}

ExportSummary export_records(const std::filesystem::path& store_path,
                             const DeviceMap& station_of_device, std::ostream& out) {
  const std::vector<StoredReading> readings = read_store(store_path);
  std::vector<TelemetryMessage> messages;
  messages.reserve(readings.size());
  for (const StoredReading& r : readings) messages.push_back(r.message);

  const DailyAggregation agg = aggregate_daily(messages, station_of_device);
  write_records(out, agg.records);

  std::map<std::string, std::size_t> unknown;
  for (const auto& w : agg.unknown_devices) ++unknown[w.device_id];
  ExportSummary summary;
  summary.rows = agg.records.size();
  for (const auto& [device, count] : unknown) {
    summary.warnings.push_back("UnknownDevice: " + device + " (" + std::to_string(count) +
                               (count == 1 ? " message)" : " messages)"));
  }
  return summary;
}

struct Gateway::Impl {
  Options options;
  ReadingStore store;
  httplib::Server server;
  std::thread worker;
  int port = -1;

  explicit Impl(Options opts)
      : options(std::move(opts)), store(options.store_path) {
    if (!options.clock) options.clock = system_now;
    // SO_REUSEADDR only; httplib's default adds SO_REUSEPORT.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes),
                   sizeof(yes));
    });
    server.set_tcp_nodelay(true);

    server.Post("/webhook/sms", [this](const httplib::Request& req, httplib::Response& res) {
      const InboundResponse r = handle_inbound(req.body, store, options.clock());
      res.status = r.status;
      res.set_content(r.body, kJson);
    });
    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(ok_body(), kJson);
    });
    server.Get("/readings/latest", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string device = req.get_param_value("device");
      if (device.empty()) {
        res.status = 400;
        res.set_content(error_body("MissingDevice"), kJson);
        return;
      }
      try {
        const auto readings = read_store(store.path());
        if (const auto latest = latest_reading(readings, device)) {
          res.set_content(reading_json(*latest), kJson);
        } else {
          res.status = 404;
          res.set_content(error_body("NotFound"), kJson);
        }
      } catch (const Error& e) {
        res.status = 500;
        res.set_content(error_body(e.name()), kJson);
      }
    });
  }
};

Gateway::Gateway(Options options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Gateway::~Gateway() { stop(); }

int Gateway::bind() {
  const Options& o = impl_->options;
  if (o.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(o.host);
    if (impl_->port < 0) throw Error(ErrorCode::AddressInUse, o.host + ":0");
  } else {
    if (!impl_->server.bind_to_port(o.host, o.port)) {
      throw Error(ErrorCode::AddressInUse, o.host + ":" + std::to_string(o.port));
    }
    impl_->port = o.port;
  }
  return impl_->port;
}

void Gateway::serve() {
  impl_->server.listen_after_bind();
  impl_->store.flush();
}

int Gateway::start() {
  const int bound = bind();
  impl_->worker = std::thread([this] { serve(); });
  impl_->server.wait_until_ready();
  return bound;
}

void Gateway::stop() {
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
  impl_->store.flush();
}

int Gateway::port() const { return impl_->port; }

ReadingStore& Gateway::store() { return impl_->store; }

}  // namespace raingnn
