#include "saarthi/eventlog.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace saarthi {

namespace {

// at_ms carries microsecond precision as a decimal string so logs are
// byte-stable and replay recovers exact times.
std::string format_at_ms(SimTime at_us) {
  SimTime ms = at_us / kUsPerMs;
  SimTime frac = at_us % kUsPerMs;
  std::ostringstream os;
  os << ms << '.';
  os << (frac / 100) << ((frac / 10) % 10) << (frac % 10);
  return os.str();
}

SimTime parse_at_ms(const nlohmann::ordered_json& v) {
  if (v.is_number_integer()) return v.get<SimTime>() * kUsPerMs;
  double ms = v.get<double>();
  return static_cast<SimTime>(std::llround(ms * 1000.0));
}

}  // namespace

std::string LogRecord::to_line() const {
  nlohmann::ordered_json j;
  j["seq"] = seq;
  j["at_ms"] = nlohmann::ordered_json::parse(format_at_ms(at_us));
  j["kind"] = kind;
  if (request_id >= 0) j["request_id"] = request_id;
  if (!version.empty()) j["version"] = version;
  j["detail"] = detail;
  return j.dump();
}

LogRecord LogRecord::from_line(const std::string& line) {
  auto j = nlohmann::ordered_json::parse(line);
  LogRecord r;
  r.seq = j.at("seq").get<std::uint64_t>();
  r.at_us = parse_at_ms(j.at("at_ms"));
  r.kind = j.at("kind").get<std::string>();
  if (j.contains("request_id")) r.request_id = j["request_id"].get<std::int64_t>();
  if (j.contains("version")) r.version = j["version"].get<std::string>();
  r.detail = j.at("detail");
  return r;
}

LogRecord& EventLog::append(SimTime at_us, std::string kind) {
  LogRecord r;
  r.seq = records_.size();
  r.at_us = at_us;
  r.kind = std::move(kind);
  records_.push_back(std::move(r));
  return records_.back();
}

void EventLog::write(std::ostream& out) const {
  for (const auto& r : records_) out << r.to_line() << '\n';
}

void EventLog::write_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open log for writing: " + path);
  write(out);
}

std::vector<LogRecord> EventLog::read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open log: " + path);
  std::vector<LogRecord> out;
  std::string line;
  std::uint64_t expect = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    LogRecord r;
    try {
      r = LogRecord::from_line(line);
    } catch (const std::exception& e) {
      throw std::runtime_error(
          "log integrity error after seq " +
          std::to_string(expect == 0 ? 0 : expect - 1) + ": " + e.what());
    }
    if (r.seq != expect) {
      throw std::runtime_error("log integrity error: expected seq " +
                               std::to_string(expect) + ", found " +
                               std::to_string(r.seq));
    }
    ++expect;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace saarthi
