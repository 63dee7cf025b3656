#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "saarthi/domain.hpp"

namespace saarthi {

// One newline-delimited log record. Field order is stable:
// {seq, at_ms, kind, request_id?, version?, detail}
struct LogRecord {
  std::uint64_t seq = 0;
  SimTime at_us = 0;
  std::string kind;
  std::int64_t request_id = -1;  // -1 = absent
  std::string version;           // empty = absent
  nlohmann::ordered_json detail = nlohmann::ordered_json::object();

  std::string to_line() const;
  static LogRecord from_line(const std::string& line);
};

class EventLog {
 public:
  LogRecord& append(SimTime at_us, std::string kind);
  const std::vector<LogRecord>& records() const { return records_; }

  void write(std::ostream& out) const;
  void write_file(const std::string& path) const;
  // Throws on corruption, naming the last valid sequence number.
  static std::vector<LogRecord> read_file(const std::string& path);

 private:
  std::vector<LogRecord> records_;
};

}  // namespace saarthi
