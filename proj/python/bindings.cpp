#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "wbansim/analytics.hpp"
#include "wbansim/ble.hpp"
#include "wbansim/cli.hpp"
#include "wbansim/errors.hpp"
#include "wbansim/experiment.hpp"
#include "wbansim/stats.hpp"
#include "wbansim/sweep.hpp"
#include "wbansim/version.hpp"

namespace py = pybind11;
using namespace wbansim;

namespace {

py::dict stats_dict(const SummaryStats& s) {
  py::dict d;
  d["n"] = s.n;
  d["lost"] = s.lost;
  d["mean"] = s.mean;
  d["median"] = s.median;
  d["sd"] = s.sd;
  d["p99"] = s.p99;
  d["min"] = s.min;
  d["max"] = s.max;
  py::list modes;
  for (const auto& m : s.modes) modes.append(py::make_tuple(m.position_us, m.mass));
  d["modes"] = modes;
  return d;
}

std::optional<double> probe_us(const TransmissionRecord& r, int i) {
  if (const auto& p = r.probes[static_cast<std::size_t>(i)]) return p->us();
  return std::nullopt;
}

// Noise-free variant of the default pipeline when jitter is off.
PipelineModel pipeline_for(bool jitter) {
  PipelineModel p = default_pipeline();
  if (!jitter) p.jitter.family = JitterFamily::None;
  return p;
}

}  // namespace

PYBIND11_MODULE(wbansim, m) {
  m.doc() = "ESB command broadcast latency simulator";
  m.attr("__version__") = std::string(kVersion);

  auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<RangeError>(m, "RangeError", base.ptr());
  py::register_exception<ScheduleError>(m, "ScheduleError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<UnknownKey>(m, "UnknownKey", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<InfeasibleError>(m, "InfeasibleError", base.ptr());
  py::register_exception<EmptyInputError>(m, "EmptyInputError", base.ptr());
  py::register_exception<MismatchError>(m, "MismatchError", base.ptr());
  py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::enum_<CrcMode>(m, "CrcMode")
      .value("Crc16", CrcMode::Crc16)
      .value("Crc8", CrcMode::Crc8)
      .value("Off", CrcMode::CrcOff);
  py::enum_<ProtocolMode>(m, "ProtocolMode")
      .value("Dynamic", ProtocolMode::DynamicLength)
      .value("Static", ProtocolMode::StaticLength);
  py::enum_<BitrateMode>(m, "BitrateMode")
      .value("Mbps2Ble", BitrateMode::Mbps2Ble)
      .value("Mbps2", BitrateMode::Mbps2)
      .value("Mbps1", BitrateMode::Mbps1);
  py::enum_<TxMode>(m, "TxMode")
      .value("Auto", TxMode::Automatic)
      .value("Manual", TxMode::Manual)
      .value("ManualStart", TxMode::ManualStart);
  py::enum_<PayloadMode>(m, "PayloadMode")
      .value("Standard", PayloadMode::Standard)
      .value("Optimized", PayloadMode::Optimized);

  py::class_<EsbConfig>(m, "EsbConfig")
      .def(py::init<>())
      .def_readwrite("crc_mode", &EsbConfig::crc_mode)
      .def_readwrite("protocol_mode", &EsbConfig::protocol_mode)
      .def_readwrite("bitrate_mode", &EsbConfig::bitrate_mode)
      .def_readwrite("tx_mode", &EsbConfig::tx_mode)
      .def_readwrite("tx_power_dbm", &EsbConfig::tx_power_dbm)
      .def_readwrite("payload_mode", &EsbConfig::payload_mode)
      .def_readwrite("payload_len_bytes", &EsbConfig::payload_len_bytes)
      .def_readwrite("retransmit_count", &EsbConfig::retransmit_count)
      .def_readwrite("retransmit_delay_us", &EsbConfig::retransmit_delay_us)
      .def("copies", &EsbConfig::copies)
      .def("__eq__", [](const EsbConfig& a, const EsbConfig& b) { return a == b; });

  m.def("olcfg_preset", &olcfg_preset);
  m.def("baseline_preset", &baseline_preset);
  m.def("validate", [](const EsbConfig& c) { return validate(c).get(); }, py::arg("config"),
        "Returns the config unchanged or raises RangeError / ScheduleError.");
  m.def("config_hash", &config_hash);
  m.def("frame_bits", [](const EsbConfig& c) { return frame_bits(c); });
  m.def("on_air_time_us", [](const EsbConfig& c) { return on_air_time_us(c); });

  m.def("expected_additional_delay",
        [](double p, double delta, std::uint64_t n) { return expected_additional_delay({p, delta, n}); },
        py::arg("p_r"), py::arg("delta_r_us") = 435.0, py::arg("n") = 1);
  m.def("additional_delay_variance",
        [](double p, double delta, std::uint64_t n) { return additional_delay_variance({p, delta, n}); },
        py::arg("p_r"), py::arg("delta_r_us") = 435.0, py::arg("n") = 1);
  m.def("delivered_copy_distribution",
        [](double p, int copies) {
          const auto d = delivered_copy_distribution(p, copies);
          return py::make_tuple(d.first_copy, d.lost);
        },
        py::arg("p_loss"), py::arg("copies") = 3);
  m.def("estimate_loss_prob", &estimate_loss_prob, py::arg("sent"), py::arg("never_received"),
        py::arg("copies") = 3);
  m.def("success_rate",
        [](std::uint64_t sent, std::uint64_t received, std::uint64_t unique, std::uint64_t valid) {
          return success_rate({sent, received, unique, valid});
        },
        py::arg("sent"), py::arg("received"), py::arg("unique"), py::arg("valid"));
  m.def("calibrate",
        [](double d0d7, double d2d5, double d3d4, const EsbConfig& c) {
          const PipelineModel p = calibrate_pipeline({d0d7, d2d5, d3d4}, validate(c));
          py::dict out;
          for (Stage s : kAllStages) out[py::str(std::string(to_token(s)))] = p.base(s);
          return out;
        },
        py::arg("d0d7") = 486.30, py::arg("d2d5") = 293.07, py::arg("d3d4") = 185.86,
        py::arg("config") = olcfg_preset(), "Stage bases in us.");

  py::class_<TransmissionRecord>(m, "TransmissionRecord")
      .def_readonly("config_name", &TransmissionRecord::config_name)
      .def_readonly("round", &TransmissionRecord::round)
      .def_readonly("attempt", &TransmissionRecord::attempt)
      .def_readonly("delivered_copy", &TransmissionRecord::delivered_copy)
      .def_readonly("duplicates_suppressed", &TransmissionRecord::duplicates_suppressed)
      .def_readonly("duplicates_delivered", &TransmissionRecord::duplicates_delivered)
      .def_property_readonly("outcome", [](const TransmissionRecord& r) { return std::string(to_token(r.outcome)); })
      .def_property_readonly("probes",
                             [](const TransmissionRecord& r) {
                               std::vector<std::optional<double>> out;
                               for (int i = 0; i < kProbeCount; ++i) out.push_back(probe_us(r, i));
                               return out;
                             })
      .def("interval", [](const TransmissionRecord& r, int a, int b) -> std::optional<double> {
        if (auto d = r.interval(a, b)) return d->us();
        return std::nullopt;
      });

  m.def("simulate",
        [](const EsbConfig& c, std::size_t n, std::uint64_t seed, double p_loss, double p_corrupt, bool jitter) {
          const ValidatedConfig vc = validate(c);
          ChannelModel ch;
          ch.p_loss = p_loss;
          ch.p_corrupt = p_corrupt;
          validate(ch);
          const PipelineModel pipe = pipeline_for(jitter);
          const LinkOptions opt;
          py::gil_scoped_release release;
          return run_attempt_series({vc, ch, pipe, opt, default_layout()}, n, {.seed = seed});
        },
        py::arg("config"), py::arg("n"), py::arg("seed") = 1, py::arg("p_loss") = 0.043,
        py::arg("p_corrupt") = 15.0 / 735.0, py::arg("jitter") = true,
        "n attempts with the calibrated default pipeline.");

  m.def("summarize",
        [](const std::vector<TransmissionRecord>& recs, const std::string& interval, std::optional<double> spacing) {
          const auto iv = parse_interval(interval);
          if (!iv) throw DomainError("bad interval " + interval);
          return stats_dict(summarize(recs, *iv, kDefaultBinWidthUs, spacing));
        },
        py::arg("records"), py::arg("interval") = "d0d7", py::arg("mode_spacing_us") = 435.0);
  m.def("summarize_samples",
        [](const std::vector<double>& v, std::optional<double> spacing) {
          return stats_dict(summarize_samples(v, kDefaultBinWidthUs, spacing));
        },
        py::arg("values_us"), py::arg("mode_spacing_us") = py::none());
  m.def("detect_modes",
        [](const std::vector<double>& v, double spacing, double bin) {
          std::vector<std::pair<double, double>> out;
          for (const auto& md : detect_modes(make_histogram(v, bin), spacing)) out.emplace_back(md.position_us, md.mass);
          return out;
        },
        py::arg("values_us"), py::arg("spacing_us"), py::arg("bin_width_us") = kDefaultBinWidthUs);
  m.def("account",
        [](const std::vector<TransmissionRecord>& recs) {
          const Accounting a = account(recs);
          py::dict d;
          d["sent"] = a.sent;
          d["received"] = a.received;
          d["unique"] = a.unique;
          d["valid"] = a.valid;
          return d;
        });

  m.def("sample_ble_totals",
        [](std::size_t n, std::uint64_t seed, double ci, double transfer) {
          return sample_ble_totals({ci, transfer}, n, seed);
        },
        py::arg("n"), py::arg("seed") = 1, py::arg("connection_interval_us") = kMinConnectionIntervalUs,
        py::arg("transfer_time_us") = 0.0);
  m.def("compare_ble",
        [](const std::vector<double>& esb, const std::vector<double>& ble) {
          return compare(summarize_samples(esb), summarize_samples(ble)).mean_ratio;
        },
        py::arg("esb_us"), py::arg("ble_us"), "BLE mean over ESB mean.");

  py::class_<SweepPlan>(m, "SweepPlan")
      .def_readwrite("seed", &SweepPlan::seed)
      .def_readwrite("rounds", &SweepPlan::rounds)
      .def_readwrite("attempts", &SweepPlan::attempts)
      .def_readwrite("shuffle", &SweepPlan::shuffle)
      .def_property_readonly("config_names",
                             [](const SweepPlan& p) {
                               std::vector<std::string> out;
                               for (const auto& c : p.configs) out.push_back(c.name);
                               return out;
                             })
      .def("attempts_per_config", &SweepPlan::attempts_per_config)
      .def("override", [](SweepPlan& p, const std::string& a) { apply_override(p, a); })
      .def("render", [](const SweepPlan& p) { return render_experiment_file(p); })
      .def("run", [](const SweepPlan& p, unsigned workers) {
        py::gil_scoped_release release;
        return run_sweep(p, workers);
      }, py::arg("workers") = 1);
  m.def("parse_experiment_file", [](const std::string& text) { return parse_experiment_file(text); });
  m.def("default_plan", &default_plan);

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          const int code = run_cli(args, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
