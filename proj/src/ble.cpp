#include "wbansim/ble.hpp"

#include <iomanip>
#include <sstream>

#include "wbansim/errors.hpp"

namespace wbansim {

BleLatencySample sample_latency(const BleConfig& ble, RngStream& rng) {
  BleLatencySample s;
  s.wait_us = rng.uniform(0.0, ble.connection_interval_us);
  s.transfer_us = ble.transfer_time_us;
  s.total_us = s.wait_us + s.transfer_us;
  return s;
}

std::vector<double> sample_ble_totals(const BleConfig& ble, std::size_t n, std::uint64_t seed) {
  validate(ble);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream rng(seed, {0, i, Purpose::Ble});
    out.push_back(sample_latency(ble, rng).total_us);
  }
  return out;
}

BleConfig ble_equivalent(const EsbConfig& esb, const LayoutTable& layout) {
  return BleConfig{kMinConnectionIntervalUs, on_air_time_us(esb, layout)};
}

ComparisonReport compare(const SummaryStats& esb, const SummaryStats& ble) {
  if (esb.n == 0 || ble.n == 0) throw MismatchError("comparison needs non-empty summaries");
  if (esb.n != ble.n)
    throw MismatchError("sample counts differ: ESB " + std::to_string(esb.n) + " vs BLE " + std::to_string(ble.n));
  if (!(esb.mean > 0.0)) throw MismatchError("ESB mean must be positive");
  return ComparisonReport{esb, ble, ble.mean / esb.mean};
}

std::string ComparisonReport::render() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "Latency comparison (n = " << esb.n << " each)\n";
  os << std::left << std::setw(10) << "" << std::right << std::setw(12) << "mean" << std::setw(12) << "median"
     << std::setw(12) << "sd" << std::setw(12) << "p99" << "\n";
  auto row = [&](const char* name, const SummaryStats& s) {
    os << std::left << std::setw(10) << name << std::right << std::setw(12) << s.mean << std::setw(12) << s.median
       << std::setw(12) << s.sd << std::setw(12) << s.p99 << "\n";
  };
  row("ESB", esb);
  row("BLE", ble);
  os << "BLE/ESB mean ratio: " << mean_ratio << "\n";
  return os.str();
}

}  // namespace wbansim
