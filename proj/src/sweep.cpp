#include "wbansim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "wbansim/errors.hpp"

namespace wbansim {

std::vector<std::size_t> shuffle_round_order(std::size_t count, std::uint32_t round, std::uint64_t seed) {
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (count < 2) return order;
  RngStream rng(seed, {round, 0, Purpose::Shuffle});
  for (std::size_t i = count - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  return order;
}

std::vector<TransmissionRecord> run_sweep(const SweepPlan& plan, unsigned workers) {
  return run_sweep(plan, plan.channel, plan.pipeline, workers);
}

std::vector<TransmissionRecord> run_sweep(const SweepPlan& plan, const ChannelModel& channel,
                                          const PipelineModel& pipeline, unsigned workers) {
  if (plan.configs.empty()) throw RangeError("configs", "plan has no configurations");
  if (plan.rounds < 1 || plan.attempts < 1) throw RangeError("rounds/attempts", "must be at least 1");
  validate(channel);
  validate(pipeline);

  struct Task {
    std::uint32_t round;
    std::size_t slot;
    std::size_t config;
  };
  std::vector<Task> tasks;
  for (std::uint32_t r = 0; r < plan.rounds; ++r) {
    std::vector<std::size_t> order(plan.configs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (plan.shuffle) order = shuffle_round_order(plan.configs.size(), r, plan.seed);
    for (std::size_t slot = 0; slot < order.size(); ++slot) tasks.push_back({r, slot, order[slot]});
  }

  // results[config][round] holds one series.
  std::vector<std::vector<std::vector<TransmissionRecord>>> results(
      plan.configs.size(), std::vector<std::vector<TransmissionRecord>>(plan.rounds));

  auto run_task = [&](const Task& t) {
    const NamedConfig& nc = plan.configs[t.config];
    const AttemptSetup setup{nc.config, channel, pipeline, plan.link, plan.layout};
    SeriesKey key{plan.seed, t.round, std::uint64_t{t.slot} * plan.attempts, nc.name};
    results[t.config][t.round] = run_attempt_series(setup, plan.attempts, key);
  };

  const unsigned n_workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(tasks.size())));
  if (n_workers == 1) {
    for (const auto& t : tasks) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n_workers);
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < n_workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < tasks.size(); i = next++) run_task(tasks[i]);
        } catch (...) {
          errors[w] = std::current_exception();
          next = tasks.size();
        }
      });
    }
    pool.clear();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::vector<TransmissionRecord> out;
  out.reserve(plan.configs.size() * plan.attempts_per_config());
  for (auto& per_round : results)
    for (auto& series : per_round)
      for (auto& r : series) out.push_back(std::move(r));
  return out;
}

Accounting account(std::span<const TransmissionRecord> records) {
  Accounting a;
  for (const auto& r : records) {
    ++a.sent;
    if (!r.delivered()) continue;
    ++a.unique;
    a.received += 1 + static_cast<std::uint64_t>(r.duplicates_delivered);
    if (r.outcome == Outcome::Delivered) ++a.valid;
  }
  return a;
}

std::vector<AccountingRow> crc_accounting_table(const std::map<CrcMode, std::vector<TransmissionRecord>>& by_crc) {
  std::vector<AccountingRow> rows;
  for (CrcMode m : {CrcMode::Crc16, CrcMode::Crc8, CrcMode::CrcOff})
    if (auto it = by_crc.find(m); it != by_crc.end()) rows.push_back({m, account(it->second)});
  return rows;
}

std::vector<TransmissionRecord> records_for(std::span<const TransmissionRecord> records, const std::string& name) {
  std::vector<TransmissionRecord> out;
  for (const auto& r : records)
    if (r.config_name == name) out.push_back(r);
  return out;
}

namespace {

constexpr const char* kCsvHeader =
    "config_name,round,attempt,seed,d0,d1,d2,d3,d4,d5,d6,d7,delivered_copy,outcome,duplicates_suppressed,"
    "duplicates_delivered";
constexpr std::size_t kCsvColumns = 16;

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

template <typename Int>
Int parse_int_cell(const std::string& s, std::size_t line, const char* column) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size() || v < 0) throw std::invalid_argument(s);
    return static_cast<Int>(v);
  } catch (const std::exception&) {
    throw SchemaError("line " + std::to_string(line) + ": bad " + column + " '" + s + "'");
  }
}

}  // namespace

void write_results_csv(std::ostream& out, std::span<const TransmissionRecord> records,
                       const std::vector<std::string>& provenance) {
  for (const auto& p : provenance) out << "# " << p << "\n";
  out << kCsvHeader << "\n";
  for (const auto& r : records) {
    if (r.config_name.find_first_of(",\n\"") != std::string::npos)
      throw SchemaError("config name '" + r.config_name + "' cannot be written to CSV");
    out << r.config_name << ',' << r.round << ',' << r.attempt << ',' << r.seed;
    for (const auto& p : r.probes) {
      out << ',';
      if (p) out << format_ticks(*p);
    }
    out << ',';
    if (r.delivered_copy) out << *r.delivered_copy;
    out << ',' << to_token(r.outcome) << ',' << r.duplicates_suppressed << ',' << r.duplicates_delivered << "\n";
  }
}

std::vector<TransmissionRecord> read_results_csv(std::istream& in) {
  std::vector<TransmissionRecord> out;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != kCsvHeader) throw SchemaError("line " + std::to_string(line_no) + ": unexpected CSV header");
      header = true;
      continue;
    }
    const auto cells = split_csv(line);
    if (cells.size() != kCsvColumns)
      throw SchemaError("line " + std::to_string(line_no) + ": expected 16 columns, got " +
                        std::to_string(cells.size()));
    TransmissionRecord r;
    r.config_name = cells[0];
    if (r.config_name.empty()) throw SchemaError("line " + std::to_string(line_no) + ": empty config_name");
    r.round = parse_int_cell<std::uint32_t>(cells[1], line_no, "round");
    r.attempt = parse_int_cell<std::uint32_t>(cells[2], line_no, "attempt");
    try {
      std::size_t used = 0;
      r.seed = std::stoull(cells[3], &used);
      if (used != cells[3].size()) throw std::invalid_argument(cells[3]);
    } catch (const std::exception&) {
      throw SchemaError("line " + std::to_string(line_no) + ": bad seed '" + cells[3] + "'");
    }
    for (int i = 0; i < kProbeCount; ++i) {
      const std::string& c = cells[4 + i];
      if (c.empty()) continue;
      Ticks t;
      if (!parse_ticks(c, t)) throw SchemaError("line " + std::to_string(line_no) + ": bad timestamp '" + c + "'");
      r.probes[i] = t;
    }
    if (!cells[12].empty()) r.delivered_copy = parse_int_cell<int>(cells[12], line_no, "delivered_copy");
    const auto outcome = parse_outcome(cells[13]);
    if (!outcome) throw SchemaError("line " + std::to_string(line_no) + ": bad outcome '" + cells[13] + "'");
    r.outcome = *outcome;
    r.duplicates_suppressed = parse_int_cell<int>(cells[14], line_no, "duplicates_suppressed");
    r.duplicates_delivered = parse_int_cell<int>(cells[15], line_no, "duplicates_delivered");
    if (!record_consistent(r)) throw SchemaError("line " + std::to_string(line_no) + ": inconsistent record");
    out.push_back(std::move(r));
  }
  if (!header) throw SchemaError("missing CSV header");
  return out;
}

void write_results(const std::string& path, std::span<const TransmissionRecord> records,
                   const std::vector<std::string>& provenance) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  write_results_csv(f, records, provenance);
  if (!f) throw IoError("write to '" + path + "' failed");
}

std::vector<TransmissionRecord> read_results(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  return read_results_csv(f);
}

std::vector<ConfigSummary> summarize_by_config(std::span<const TransmissionRecord> records, double mode_spacing_us) {
  std::vector<std::string> names;
  for (const auto& r : records)
    if (std::find(names.begin(), names.end(), r.config_name) == names.end()) names.push_back(r.config_name);

  std::vector<ConfigSummary> out;
  for (const auto& name : names) {
    const auto subset = records_for(records, name);
    ConfigSummary s{name, account(subset), {}};
    for (Interval iv : {kEndToEnd, kNetToNet, kRadio}) {
      try {
        s.intervals.emplace_back(iv, summarize(subset, iv, kDefaultBinWidthUs, mode_spacing_us));
      } catch (const EmptyInputError&) {
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

std::string interval_label(Interval iv) {
  return "D" + std::to_string(iv.from) + "-D" + std::to_string(iv.to);
}

}  // namespace

std::string render_report(std::span<const ConfigSummary> summaries, const std::vector<std::string>& provenance) {
  std::ostringstream os;
  for (const auto& p : provenance) os << "# " << p << "\n";
  if (!provenance.empty()) os << "\n";
  os << std::fixed << std::setprecision(2);

  os << "Packet accounting\n";
  os << std::left << std::setw(20) << "config" << std::right << std::setw(8) << "sent" << std::setw(10) << "received"
     << std::setw(8) << "unique" << std::setw(8) << "valid" << std::setw(10) << "success" << "\n";
  for (const auto& s : summaries) {
    os << std::left << std::setw(20) << s.name << std::right << std::setw(8) << s.counts.sent << std::setw(10)
       << s.counts.received << std::setw(8) << s.counts.unique << std::setw(8) << s.counts.valid << std::setw(9)
       << (s.counts.sent ? 100.0 * success_rate(s.counts) : 0.0) << "%\n";
  }

  os << "\nLatency summary (D0-D7)\n";
  os << std::left << std::setw(20) << "config" << std::right << std::setw(22) << "mean +- sd [us]" << std::setw(14)
     << "median [us]" << std::setw(12) << "p99 [us]" << std::setw(8) << "lost" << "\n";
  for (const auto& s : summaries) {
    for (const auto& [iv, st] : s.intervals) {
      if (!(iv == kEndToEnd)) continue;
      std::ostringstream ms;
      ms << std::fixed << std::setprecision(2) << st.mean << " +- " << st.sd;
      os << std::left << std::setw(20) << s.name << std::right << std::setw(22) << ms.str() << std::setw(14)
         << st.median << std::setw(12) << st.p99 << std::setw(8) << st.lost << "\n";
    }
  }

  for (const auto& s : summaries) {
    os << "\nIntervals for " << s.name << "\n";
    os << std::left << std::setw(10) << "interval" << std::right << std::setw(22) << "mean +- sd [us]"
       << std::setw(14) << "median [us]" << std::setw(12) << "p99 [us]" << "  modes [us]\n";
    for (const auto& [iv, st] : s.intervals) {
      std::ostringstream ms;
      ms << std::fixed << std::setprecision(2) << st.mean << " +- " << st.sd;
      os << std::left << std::setw(10) << interval_label(iv) << std::right << std::setw(22) << ms.str()
         << std::setw(14) << st.median << std::setw(12) << st.p99 << " ";
      for (const auto& m : st.modes) os << " " << std::setprecision(1) << m.position_us << "(" << std::setprecision(3)
                                        << m.mass << ")" << std::setprecision(2);
      os << "\n";
    }
  }
  return os.str();
}

std::string render_summary_json(std::span<const ConfigSummary> summaries, const std::vector<std::string>& provenance) {
  nlohmann::ordered_json root;
  root["provenance"] = provenance;
  auto& configs = root["configs"] = nlohmann::ordered_json::array();
  for (const auto& s : summaries) {
    nlohmann::ordered_json c;
    c["name"] = s.name;
    c["accounting"] = {{"sent", s.counts.sent},
                       {"received", s.counts.received},
                       {"unique", s.counts.unique},
                       {"valid", s.counts.valid},
                       {"success_rate", s.counts.sent ? success_rate(s.counts) : 0.0}};
    auto& ivs = c["intervals"] = nlohmann::ordered_json::object();
    for (const auto& [iv, st] : s.intervals) {
      nlohmann::ordered_json j;
      j["n"] = st.n;
      j["lost"] = st.lost;
      j["mean_us"] = st.mean;
      j["median_us"] = st.median;
      j["sd_us"] = st.sd;
      j["p99_us"] = st.p99;
      j["min_us"] = st.min;
      j["max_us"] = st.max;
      j["histogram"] = {{"origin_us", st.histogram.origin_us},
                        {"bin_width_us", st.histogram.bin_width_us},
                        {"counts", st.histogram.counts}};
      auto& modes = j["modes"] = nlohmann::ordered_json::array();
      for (const auto& m : st.modes) modes.push_back({{"position_us", m.position_us}, {"mass", m.mass}});
      ivs[to_token(iv)] = std::move(j);
    }
    configs.push_back(std::move(c));
  }
  return root.dump(2) + "\n";
}

}  // namespace wbansim
