#include "wbansim/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "wbansim/analytics.hpp"
#include "wbansim/ble.hpp"
#include "wbansim/errors.hpp"
#include "wbansim/experiment.hpp"
#include "wbansim/kvtext.hpp"
#include "wbansim/sweep.hpp"
#include "wbansim/version.hpp"

namespace wbansim {
namespace {

struct Options {
  std::string file;
  std::string pipeline_file;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out = "wbansim-out";
  unsigned workers = 1;
  std::vector<std::string> overrides;
  std::string interval;
  std::string config;
  std::string targets;
  std::string csv;
  std::size_t samples = 10000;
  double ci_us = kMinConnectionIntervalUs;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) throw IoError("write to '" + path.string() + "' failed");
}

std::filesystem::path out_dir(const Options& o) {
  std::error_code ec;
  std::filesystem::create_directories(o.out, ec);
  if (ec) throw IoError("cannot create output directory '" + o.out + "': " + ec.message());
  return std::filesystem::path(o.out);
}

SweepPlan load_plan(const Options& o) {
  SweepPlan plan = o.file.empty() ? default_plan() : parse_experiment_file(read_file(o.file));
  if (!o.pipeline_file.empty()) plan = with_pipeline_text(plan, read_file(o.pipeline_file));
  for (const auto& s : o.overrides) apply_override(plan, s);
  if (o.seed_given) plan.seed = o.seed;
  return plan;
}

const NamedConfig& pick_config(const SweepPlan& plan, const std::string& name) {
  if (name.empty()) return plan.configs.front();
  if (const NamedConfig* nc = plan.find(name)) return *nc;
  throw RangeError("config", "no config named '" + name + "'");
}

std::vector<std::string> provenance(const SweepPlan& plan, const std::string& command) {
  std::ostringstream rng;
  rng << "rng=" << kRngAlgorithm << " seed=" << plan.seed;
  std::vector<std::string> lines{std::string("wbansim ") + kVersion, "command=" + command, rng.str(),
                                 "rounds=" + std::to_string(plan.rounds) +
                                     " attempts=" + std::to_string(plan.attempts) +
                                     " shuffle=" + (plan.shuffle ? "true" : "false")};
  for (const auto& nc : plan.configs) {
    std::ostringstream h;
    h << "config " << nc.name << " hash=" << std::hex << std::setw(16) << std::setfill('0') << config_hash(nc.config);
    lines.push_back(h.str());
  }
  return lines;
}

std::string render_interval_only(std::span<const ConfigSummary> summaries, Interval iv) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  for (const auto& s : summaries)
    for (const auto& [i, st] : s.intervals)
      if (i == iv)
        os << s.name << " " << to_token(iv) << " n=" << st.n << " lost=" << st.lost << " mean=" << st.mean
           << " median=" << st.median << " sd=" << st.sd << " p99=" << st.p99 << "\n";
  return os.str();
}

void emit_summaries(const Options& o, std::ostream& out, const std::filesystem::path& dir,
                    std::span<const TransmissionRecord> records, const std::vector<std::string>& prov) {
  const auto summaries = summarize_by_config(records);
  const std::string report = render_report(summaries, prov);
  write_file(dir / "summary.txt", report);
  write_file(dir / "summary.json", render_summary_json(summaries, prov));
  if (o.interval.empty()) out << report;
  else out << render_interval_only(summaries, *parse_interval(o.interval));
}

int cmd_simulate(const Options& o, std::ostream& out) {
  SweepPlan plan = load_plan(o);
  const NamedConfig chosen = pick_config(plan, o.config);
  plan.configs = {chosen};
  const auto dir = out_dir(o);
  const auto records = run_sweep(plan, o.workers);
  const auto prov = provenance(plan, "simulate");
  write_results((dir / "records.csv").string(), records, prov);
  emit_summaries(o, out, dir, records, prov);
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const SweepPlan plan = load_plan(o);
  const auto dir = out_dir(o);
  const auto records = run_sweep(plan, o.workers);
  const auto prov = provenance(plan, "sweep");
  std::string header;
  for (const auto& p : prov) header += p + "\n";
  write_file(dir / "plan.cfg", render_experiment_file(plan, header));
  write_results((dir / "results.csv").string(), records, prov);
  emit_summaries(o, out, dir, records, prov);
  return kExitOk;
}

CalibrationTargets parse_targets(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    KvEntry e{"targets", item, 0};
    v.push_back(kv_double(e));
  }
  if (v.size() != 3) throw ParseError(0, "--targets expects three comma-separated medians d0d7,d2d5,d3d4");
  return {v[0], v[1], v[2]};
}

int cmd_calibrate(const Options& o, std::ostream& out) {
  const SweepPlan plan = load_plan(o);
  const CalibrationTargets targets =
      o.targets.empty() ? plan.targets.value_or(olcfg_targets()) : parse_targets(o.targets);
  const ValidatedConfig config = o.config.empty() && o.file.empty() ? validate(olcfg_preset(), plan.layout)
                                                                    : pick_config(plan, o.config).config;
  const PipelineModel fitted = calibrate_pipeline(targets, config, plan.pipeline, plan.layout);
  const auto dir = out_dir(o);
  const std::string text = render_pipeline_sections(fitted, targets);
  write_file(dir / "pipeline.cfg", text);
  out << text;
  return kExitOk;
}

int cmd_compare_ble(const Options& o, std::ostream& out) {
  SweepPlan plan = load_plan(o);
  const NamedConfig chosen = pick_config(plan, o.config);
  if (o.samples < 1) throw RangeError("samples", "at least one sample");
  const AttemptSetup setup{chosen.config, plan.channel, plan.pipeline, plan.link, plan.layout};
  const auto records = run_attempt_series(setup, o.samples, {plan.seed, 0, 0, chosen.name});
  const SummaryStats esb = summarize(records, kEndToEnd);

  BleConfig ble = ble_equivalent(chosen.config, plan.layout);
  ble.connection_interval_us = o.ci_us;
  validate(ble);
  const auto totals = sample_ble_totals(ble, esb.n, plan.seed);
  const ComparisonReport report = compare(esb, summarize_samples(totals));
  const auto dir = out_dir(o);
  write_file(dir / "comparison.txt", report.render());
  out << report.render();
  return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out) {
  if (o.csv.empty()) throw ParseError(0, "report needs --csv <results.csv>");
  const std::string text = read_file(o.csv);
  std::vector<std::string> prov;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);)
    if (line.rfind("# ", 0) == 0) prov.push_back(line.substr(2));
  std::istringstream in(text);
  const auto records = read_results_csv(in);
  const auto summaries = summarize_by_config(records);
  if (o.interval.empty()) out << render_report(summaries, prov);
  else out << render_interval_only(summaries, *parse_interval(o.interval));
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discrete-event simulator for ESB command broadcast latency", "wbansim"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--file", o.file, "Experiment file");
    sub->add_option("--pipeline", o.pipeline_file, "Pipeline file written by calibrate");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&o](const std::uint64_t& v) { o.seed = v, o.seed_given = true; }, "Seed; overrides the file");
    sub->add_option("--out", o.out, "Output directory")->capture_default_str();
    sub->add_option("--workers", o.workers, "Parallel workers")->check(CLI::Range(1u, 256u))->capture_default_str();
    sub->add_option("--set", o.overrides, "Override section.key=value (repeatable)");
    sub->add_option("--interval", o.interval, "Print only this interval: d0d7|d2d5|d3d4")
        ->check([](const std::string& s) { return parse_interval(s) ? std::string{} : "expected dAdB, e.g. d0d7"; });
    sub->add_option("--config", o.config, "Config name (default: first in file)");
  };

  auto* simulate = app.add_subcommand("simulate", "Run rounds x attempts for one config");
  common(simulate);
  auto* sweep = app.add_subcommand("sweep", "Run the full experiment plan");
  common(sweep);
  auto* calibrate = app.add_subcommand("calibrate", "Fit pipeline stage bases to interval medians");
  common(calibrate);
  calibrate->add_option("--targets", o.targets, "Medians d0d7,d2d5,d3d4 in us");
  auto* compare_ble = app.add_subcommand("compare-ble", "Compare ESB latency against a BLE connection interval");
  common(compare_ble);
  compare_ble->add_option("--samples", o.samples, "Attempts / samples")->capture_default_str();
  compare_ble->add_option("--ci", o.ci_us, "BLE connection interval in us")->capture_default_str();
  auto* report = app.add_subcommand("report", "Summarize a results CSV");
  common(report);
  report->add_option("--csv", o.csv, "Results CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitValidation;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(o, out);
    if (sweep->parsed()) return cmd_sweep(o, out);
    if (calibrate->parsed()) return cmd_calibrate(o, out);
    if (compare_ble->parsed()) return cmd_compare_ble(o, out);
    if (report->parsed()) return cmd_report(o, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace wbansim
