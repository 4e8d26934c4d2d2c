#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wbansim/analytics.hpp"
#include "wbansim/esb_link.hpp"
#include "wbansim/experiment.hpp"
#include "wbansim/stats.hpp"

namespace wbansim {

// Fisher-Yates permutation of [0, count), keyed by (seed, round).
std::vector<std::size_t> shuffle_round_order(std::size_t count, std::uint32_t round, std::uint64_t seed);

// Runs rounds x attempts for every config. Within a round, configs run back to
// back in shuffled order; the slot a config lands in fixes its random streams
// and start times. Output order is (config in plan order, round, attempt)
// whatever the worker count.
std::vector<TransmissionRecord> run_sweep(const SweepPlan& plan, unsigned workers = 1);
std::vector<TransmissionRecord> run_sweep(const SweepPlan& plan, const ChannelModel& channel,
                                          const PipelineModel& pipeline, unsigned workers = 1);

Accounting account(std::span<const TransmissionRecord> records);

struct AccountingRow {
  CrcMode crc;
  Accounting counts;
};

std::vector<AccountingRow> crc_accounting_table(const std::map<CrcMode, std::vector<TransmissionRecord>>& by_crc);

// Records of one config, in input order.
std::vector<TransmissionRecord> records_for(std::span<const TransmissionRecord> records, const std::string& name);

// CSV columns: config_name,round,attempt,seed,d0..d7,delivered_copy,outcome,
// duplicates_suppressed,duplicates_delivered. Leading '#' lines carry
// provenance and are skipped by the reader.
void write_results_csv(std::ostream& out, std::span<const TransmissionRecord> records,
                       const std::vector<std::string>& provenance = {});
std::vector<TransmissionRecord> read_results_csv(std::istream& in);

// File variants; IoError when the file cannot be opened, SchemaError on
// malformed content.
void write_results(const std::string& path, std::span<const TransmissionRecord> records,
                   const std::vector<std::string>& provenance = {});
std::vector<TransmissionRecord> read_results(const std::string& path);

struct ConfigSummary {
  std::string name;
  Accounting counts;
  std::vector<std::pair<Interval, SummaryStats>> intervals;
};

// Per config (first-seen order) accounting plus the D0-D7, D2-D5 and D3-D4
// statistics. Intervals with no closed sample are omitted.
std::vector<ConfigSummary> summarize_by_config(std::span<const TransmissionRecord> records,
                                               double mode_spacing_us = 435.0);

// Text tables: accounting, D0-D7 per config, interval table per config.
std::string render_report(std::span<const ConfigSummary> summaries, const std::vector<std::string>& provenance = {});
std::string render_summary_json(std::span<const ConfigSummary> summaries, const std::vector<std::string>& provenance = {});

}  // namespace wbansim
