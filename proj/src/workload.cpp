#include "saarthi/workload.hpp"

#include <charconv>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace saarthi {

std::vector<Request> generate(const SyntheticSpec& spec,
                              const FunctionProfile& profile) {
  if (spec.rate_lambda <= 0)
    throw std::invalid_argument("rate_lambda must be > 0");
  if (spec.payload_sigma < 0)
    throw std::invalid_argument("payload_sigma must be >= 0");

  std::mt19937_64 rng(spec.seed);
  std::exponential_distribution<double> gap(spec.rate_lambda);
  std::normal_distribution<double> log_payload(spec.payload_mu,
                                               spec.payload_sigma);

  std::vector<Request> out;
  double t = 0.0;
  std::uint64_t id = 0;
  for (;;) {
    t += gap(rng);
    if (t >= spec.duration_s) break;
    double raw = spec.payload_sigma == 0.0 ? std::exp(spec.payload_mu)
                                           : std::exp(log_payload(rng));
    auto payload = profile.clamp_payload(
        static_cast<std::int64_t>(std::llround(raw)));
    Request r;
    r.id = ++id;
    r.function = profile.name;
    r.payload = payload;
    r.arrival = seconds_to_us(t);
    r.deadline_slo_s = profile.slo_seconds;
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

std::int64_t parse_int_field(const std::string& field, int line,
                             const char* what) {
  std::int64_t v = 0;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw std::runtime_error("trace line " + std::to_string(line) +
                             ": malformed " + what + " '" + field + "'");
  }
  return v;
}

}  // namespace

std::vector<TraceRecord> parse_trace(std::istream& in) {
  std::vector<TraceRecord> out;
  std::string line;
  int lineno = 0;
  std::int64_t prev_ts = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != "timestamp_ms,function,payload")
        throw std::runtime_error(
            "trace line 1: expected header 'timestamp_ms,function,payload'");
      continue;
    }
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string ts_field, fn_field, payload_field, extra;
    if (!std::getline(ss, ts_field, ',') || !std::getline(ss, fn_field, ',') ||
        !std::getline(ss, payload_field, ',') ||
        std::getline(ss, extra, ',')) {
      throw std::runtime_error("trace line " + std::to_string(lineno) +
                               ": expected 3 columns");
    }
    TraceRecord rec;
    rec.timestamp_ms = parse_int_field(ts_field, lineno, "timestamp");
    rec.function = fn_field;
    rec.payload = parse_int_field(payload_field, lineno, "payload");
    if (rec.timestamp_ms < 0)
      throw std::runtime_error("trace line " + std::to_string(lineno) +
                               ": negative timestamp");
    if (rec.timestamp_ms < prev_ts)
      throw std::runtime_error("trace line " + std::to_string(lineno) +
                               ": timestamps must be non-decreasing");
    prev_ts = rec.timestamp_ms;
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<Request> trace_to_requests(
    const std::vector<TraceRecord>& records, double clock_scale,
    const std::vector<FunctionProfile>& profiles) {
  if (clock_scale <= 0) throw std::invalid_argument("clock_scale must be > 0");
  auto find_profile = [&](const std::string& fn) -> const FunctionProfile* {
    for (const auto& p : profiles)
      if (p.name == fn) return &p;
    return nullptr;
  };
  std::vector<Request> out;
  std::uint64_t id = 0;
  for (const auto& rec : records) {
    const auto* profile = find_profile(rec.function);
    if (!profile)
      throw std::runtime_error("trace references unknown function '" +
                               rec.function + "'");
    Request r;
    r.id = ++id;
    r.function = rec.function;
    r.payload = profile->clamp_payload(rec.payload);
    r.arrival = static_cast<SimTime>(std::llround(
        static_cast<double>(rec.timestamp_ms) * clock_scale * kUsPerMs));
    r.deadline_slo_s = profile->slo_seconds;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Request> load_trace(const std::string& path, double clock_scale,
                                const std::vector<FunctionProfile>& profiles) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  return trace_to_requests(parse_trace(in), clock_scale, profiles);
}

}  // namespace saarthi
