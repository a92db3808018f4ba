#include "raingnn/reading_store.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>

#include "raingnn/error.hpp"

namespace raingnn {

std::string format_store_line(UnixSeconds received_at, std::string_view raw_frame) {
  std::string line = format_iso_instant(received_at);
  line += '|';
  line += raw_frame;
  return line;
}

StoredReading parse_store_line(std::string_view line) {
  const auto bar = line.find('|');
  if (bar == std::string_view::npos) {
    throw Error(ErrorCode::StoreCorrupt, "missing '|' separator");
  }
  const auto received = parse_iso_instant(line.substr(0, bar));
  if (!received) throw Error(ErrorCode::StoreCorrupt, "bad received_at timestamp");
  StoredReading r;
  r.received_at = *received;
  r.raw_frame = std::string(line.substr(bar + 1));
  try {
    r.message = parse_telemetry(r.raw_frame);
  } catch (const Error& e) {
    throw Error(ErrorCode::StoreCorrupt, std::string(e.name()) + ": " + e.detail());
  }
  return r;
}

std::vector<StoredReading> read_store(const std::filesystem::path& path) {
  std::vector<StoredReading> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t start = 0;
  std::size_t line_number = 0;
  while (true) {
    const auto nl = content.find('\n', start);
    if (nl == std::string::npos) break;
    ++line_number;
    try {
      out.push_back(parse_store_line(std::string_view(content).substr(start, nl - start)));
    } catch (const Error& e) {
      throw Error(ErrorCode::StoreCorrupt,
                  path.string() + " line " + std::to_string(line_number) + ": " + e.detail());
    }
    start = nl + 1;
  }
  return out;
}

ReadingStore::ReadingStore(std::filesystem::path path) : path_(std::move(path)) {
  fd_ = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) {
    throw Error(ErrorCode::StoreUnwritable, path_.string() + ": " + std::strerror(errno));
  }
}

ReadingStore::~ReadingStore() {
  if (fd_ >= 0) {
    ::fsync(fd_);
    ::close(fd_);
  }
}

void ReadingStore::append(UnixSeconds received_at, std::string_view raw_frame) {
  std::string line = format_store_line(received_at, raw_frame);
  line += '\n';

  std::lock_guard lock(mutex_);
  struct stat st {};
  if (::fstat(fd_, &st) != 0) {
    throw Error(ErrorCode::StoreUnwritable, path_.string() + ": " + std::strerror(errno));
  }
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = ::write(fd_, line.data() + written, line.size() - written);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      const int err = errno;
      // If truncation also fails, readers still skip the unterminated tail.
      [[maybe_unused]] const int rc = ::ftruncate(fd_, st.st_size);
      throw Error(ErrorCode::StoreUnwritable, path_.string() + ": " + std::strerror(err));
    }
    written += static_cast<std::size_t>(n);
  }
}

void ReadingStore::flush() {
  std::lock_guard lock(mutex_);
  ::fsync(fd_);
}

}  // namespace raingnn
