#pragma once

// HTTP ingest for gauge frames relayed from SMS.
//
//   POST /webhook/sms                 form fields From, Body (Body = one frame)
//   GET  /healthz                     200 {"status":"ok"}
//   GET  /readings/latest?device=ID   most recent stored reading, or 404
//
// Accepted frames are appended to a ReadingStore. There is no
// authentication; put the service behind a trusted relay.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "raingnn/reading_store.hpp"
#include "raingnn/telemetry.hpp"

namespace raingnn {

struct InboundResponse {
  int status = 200;
  std::string body;  // JSON
};

// Parses the form payload, validates the frame and appends it on success:
// 200 {"status":"ok"}, 400 {"status":"error","reason":<ErrorCode name>} for a
// rejected frame, 500 for a store failure.
InboundResponse handle_inbound(std::string_view form_body, ReadingStore& store,
                               UnixSeconds received_at);

// Latest reading of `device_id`, by message timestamp; ties go to the reading
// stored last.
std::optional<StoredReading> latest_reading(std::span<const StoredReading> readings,
                                            std::string_view device_id);

std::string reading_json(const StoredReading& reading);

struct ExportSummary {
  std::size_t rows = 0;
  // One line per unknown device: "UnknownDevice: <id> (<n> messages)".
  std::vector<std::string> warnings;
};

// Aggregates the whole store into daily records and writes the records CSV.
ExportSummary export_records(const std::filesystem::path& store_path,
                             const DeviceMap& station_of_device, std::ostream& out);

class Gateway {
 public:
  struct Options {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::filesystem::path store_path = "readings.log";
    std::function<UnixSeconds()> clock;  // defaults to the system clock
  };

  explicit Gateway(Options options);
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  // Binds the listening socket and returns the bound port. Throws AddressInUse.
  int bind();
  // Serves until stop(); bind() first.
  void serve();
  // bind() and serve() on a background thread; returns once accepting.
  int start();
  void stop();

  int port() const;
  ReadingStore& store();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace raingnn
