#pragma once

// Append-only log of accepted frames, one per line:
//
//   <received_at, YYYY-MM-DDTHH:MM:SSZ>|<raw frame>\n

#include <filesystem>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "raingnn/calendar.hpp"
#include "raingnn/telemetry.hpp"

namespace raingnn {

struct StoredReading {
  UnixSeconds received_at = 0;
  std::string raw_frame;
  TelemetryMessage message;

  bool operator==(const StoredReading&) const = default;
};

std::string format_store_line(UnixSeconds received_at, std::string_view raw_frame);
// Throws StoreCorrupt.
StoredReading parse_store_line(std::string_view line);

// Every complete line in order. A trailing line without '\n' is an append in
// progress and is ignored. Throws StoreCorrupt naming the first bad line; a
// missing file reads as empty.
std::vector<StoredReading> read_store(const std::filesystem::path& path);

class ReadingStore {
 public:
  // Creates the file if needed. Throws StoreUnwritable.
  explicit ReadingStore(std::filesystem::path path);
  ~ReadingStore();
  ReadingStore(const ReadingStore&) = delete;
  ReadingStore& operator=(const ReadingStore&) = delete;

  // Thread-safe. Either the whole line lands or the file is restored to its
  // previous length and StoreUnwritable is thrown.
  void append(UnixSeconds received_at, std::string_view raw_frame);
  void flush();

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
  int fd_ = -1;
};

}  // namespace raingnn
