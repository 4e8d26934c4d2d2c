#include "wbansim/experiment.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "wbansim/errors.hpp"
#include "wbansim/kvtext.hpp"

namespace wbansim {

const NamedConfig* SweepPlan::find(std::string_view name) const {
  for (const auto& c : configs)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

double probability(const KvEntry& e) {
  const double v = kv_double(e);
  if (v < 0.0 || v > 1.0) throw ParseError(e.line, "'" + e.key + "' must be a probability in [0, 1]");
  return v;
}

double non_negative(const KvEntry& e) {
  const double v = kv_double(e);
  if (v < 0.0) throw ParseError(e.line, "'" + e.key + "' must be >= 0");
  return v;
}

template <typename T>
T token(const KvEntry& e, std::optional<T> parsed) {
  if (!parsed) throw ParseError(e.line, "bad value '" + e.value + "' for '" + e.key + "'");
  return *parsed;
}

void apply_layout(LayoutTable& table, const KvSection& sec) {
  const auto mode = parse_bitrate_mode(sec.name);
  if (!mode) throw ParseError(sec.line, "unknown bitrate mode '" + sec.name + "'");
  BitrateLayout& l = table[*mode];
  for (const auto& e : sec.entries) {
    const long long v = kv_int(e);
    if (v < 0 || v > 4096) throw ParseError(e.line, "'" + e.key + "' out of range");
    if (e.key == "preamble_bits") l.preamble_bits = static_cast<int>(v);
    else if (e.key == "address_bits") l.address_bits = static_cast<int>(v);
    else if (e.key == "pcf_dynamic_bits") l.pcf_dynamic_bits = static_cast<int>(v);
    else if (e.key == "pcf_static_bits") l.pcf_static_bits = static_cast<int>(v);
    else throw UnknownKey(e.line, e.key);
  }
}

EsbConfig read_config(const KvSection& sec) {
  EsbConfig c = olcfg_preset();
  for (const auto& e : sec.entries) {
    if (e.key == "crc") c.crc_mode = token(e, parse_crc_mode(e.value));
    else if (e.key == "protocol") c.protocol_mode = token(e, parse_protocol_mode(e.value));
    else if (e.key == "bitrate") c.bitrate_mode = token(e, parse_bitrate_mode(e.value));
    else if (e.key == "txmode") c.tx_mode = token(e, parse_tx_mode(e.value));
    else if (e.key == "payload") c.payload_mode = token(e, parse_payload_mode(e.value));
    else if (e.key == "power") c.tx_power_dbm = static_cast<int>(std::clamp(kv_int(e), -1000LL, 1000LL));
    else if (e.key == "payload_len") c.payload_len_bytes = static_cast<int>(std::clamp(kv_int(e), -1LL, 100000LL));
    else if (e.key == "retransmits") c.retransmit_count = static_cast<int>(std::clamp(kv_int(e), -1LL, 1000LL));
    else if (e.key == "retransmit_delay_us") c.retransmit_delay_us = kv_double(e);
    else throw UnknownKey(e.line, e.key);
  }
  return c;
}

bool valid_label(Parameter p, const std::string& label) {
  switch (p) {
    case Parameter::Crc: return parse_crc_mode(label).has_value();
    case Parameter::Protocol: return parse_protocol_mode(label).has_value();
    case Parameter::Bitrate: return parse_bitrate_mode(label).has_value();
    case Parameter::TxMode: return parse_tx_mode(label).has_value();
    case Parameter::Payload: return parse_payload_mode(label).has_value();
    case Parameter::Power: {
      try {
        std::size_t used = 0;
        const int v = std::stoi(label, &used);
        return used == label.size() && v >= kMinTxPowerDbm && v <= kMaxTxPowerDbm;
      } catch (const std::exception&) {
        return false;
      }
    }
  }
  return false;
}

SweepPlan resolve(const std::vector<KvSection>& sections) {
  if (sections.empty()) throw ParseError(1, "empty experiment file");

  SweepPlan plan;
  plan.layout = default_layout();
  std::set<std::string> seen;
  for (const auto& sec : sections) {
    const std::string id = sec.kind + " " + sec.name;
    if (!seen.insert(id).second) throw ParseError(sec.line, "duplicate section [" + (sec.name.empty() ? sec.kind : id) + "]");
    const bool named = sec.kind == "config" || sec.kind == "modifier" || sec.kind == "layout";
    if (named && sec.name.empty()) throw ParseError(sec.line, "[" + sec.kind + "] needs a name");
    if (!named && !sec.name.empty()) throw ParseError(sec.line, "[" + sec.kind + "] takes no name");
    if (sec.kind == "layout") apply_layout(plan.layout, sec);
  }

  const KvSection* pipeline_sec = nullptr;
  const KvSection* jitter_sec = nullptr;
  const KvSection* targets_sec = nullptr;
  std::vector<const KvSection*> modifier_secs;

  for (const auto& sec : sections) {
    if (sec.kind == "sweep") {
      for (const auto& e : sec.entries) {
        if (e.key == "seed") plan.seed = kv_u64(e);
        else if (e.key == "rounds" || e.key == "attempts") {
          const unsigned long long v = kv_u64(e);
          if (v < 1 || v > 1'000'000) throw ParseError(e.line, "'" + e.key + "' must be in [1, 1000000]");
          (e.key == "rounds" ? plan.rounds : plan.attempts) = static_cast<std::uint32_t>(v);
        } else if (e.key == "shuffle") plan.shuffle = kv_bool(e);
        else throw UnknownKey(e.line, e.key);
      }
    } else if (sec.kind == "config") {
      plan.configs.push_back({sec.name, validate(read_config(sec), plan.layout)});
    } else if (sec.kind == "channel") {
      for (const auto& e : sec.entries) {
        if (e.key == "p_loss") plan.channel.p_loss = probability(e);
        else if (e.key == "p_corrupt") plan.channel.p_corrupt = probability(e);
        else if (e.key == "p_loss_retx") plan.channel.p_loss_retransmit = probability(e);
        else throw UnknownKey(e.line, e.key);
      }
    } else if (sec.kind == "link") {
      for (const auto& e : sec.entries) {
        if (e.key == "dup_escape") plan.link.dup_escape_prob = probability(e);
        else if (e.key == "spacing_us") {
          plan.link.attempt_spacing_us = kv_double(e);
          if (!(plan.link.attempt_spacing_us > 0.0)) throw ParseError(e.line, "'spacing_us' must be positive");
        } else if (e.key == "copy_spacing") {
          if (e.value == "start") plan.link.copy_spacing = CopySpacing::StartToStart;
          else if (e.value == "end") plan.link.copy_spacing = CopySpacing::EndToStart;
          else throw ParseError(e.line, "'copy_spacing' expects start|end");
        } else if (e.key == "fifo") {
          const auto v = kv_u64(e);
          if (v < 1 || v > 64) throw ParseError(e.line, "'fifo' must be in [1, 64]");
          plan.link.fifo_capacity = static_cast<std::size_t>(v);
        } else throw UnknownKey(e.line, e.key);
      }
    } else if (sec.kind == "pipeline") {
      pipeline_sec = &sec;
    } else if (sec.kind == "jitter") {
      jitter_sec = &sec;
    } else if (sec.kind == "targets") {
      targets_sec = &sec;
    } else if (sec.kind == "modifier") {
      modifier_secs.push_back(&sec);
    } else if (sec.kind != "layout") {
      throw ParseError(sec.line, "unknown section [" + sec.kind + "]");
    }
  }
  if (plan.configs.empty()) throw ParseError(sections.front().line, "no [config <name>] section");

  PipelineModel prior;
  if (jitter_sec) {
    for (const auto& e : jitter_sec->entries) {
      if (e.key == "family") prior.jitter.family = token(e, parse_jitter_family(e.value));
      else if (auto st = parse_stage(e.key)) prior.jitter.sd_us[static_cast<int>(*st)] = non_negative(e);
      else throw UnknownKey(e.line, e.key);
    }
  }

  std::string modifier_mode = "default";
  std::size_t bases_given = 0;
  if (pipeline_sec) {
    for (const auto& e : pipeline_sec->entries) {
      if (e.key == "modifiers") {
        if (e.value != "default" && e.value != "none" && e.value != "listed")
          throw ParseError(e.line, "'modifiers' expects default|none|listed");
        modifier_mode = e.value;
      } else if (auto st = parse_stage(e.key)) {
        prior.base(*st) = non_negative(e);
        ++bases_given;
      } else {
        throw UnknownKey(e.line, e.key);
      }
    }
    if (bases_given != 0 && bases_given != kStageCount)
      throw ParseError(pipeline_sec->line, "[pipeline] must list all seven stage bases or none");
  }
  if (!modifier_secs.empty() && modifier_mode == "none")
    throw ParseError(modifier_secs.front()->line, "[modifier] sections conflict with modifiers=none");
  if (modifier_mode == "default" && modifier_secs.empty()) prior.modifiers = default_modifier_table();
  if (modifier_mode == "listed" || !modifier_secs.empty()) {
    for (const KvSection* sec : modifier_secs) {
      const auto param = parse_parameter(sec->name);
      if (!param) throw ParseError(sec->line, "unknown parameter '" + sec->name + "'");
      ParameterModifiers mods;
      mods.stage = default_stage(*param);
      for (const auto& e : sec->entries) {
        if (e.key == "stage") mods.stage = token(e, parse_stage(e.value));
        else if (valid_label(*param, e.key)) mods.by_value[e.key] = kv_double(e);
        else throw UnknownKey(e.line, e.key);
      }
      prior.modifiers.entries[*param] = std::move(mods);
    }
  }

  std::optional<ValidatedConfig> calibration_config;
  if (targets_sec) {
    CalibrationTargets t;
    int have = 0;
    for (const auto& e : targets_sec->entries) {
      if (e.key == "d0d7") t.d0d7 = kv_double(e), ++have;
      else if (e.key == "d2d5") t.d2d5 = kv_double(e), ++have;
      else if (e.key == "d3d4") t.d3d4 = kv_double(e), ++have;
      else if (e.key == "config") {
        const NamedConfig* nc = plan.find(e.value);
        if (!nc) throw ParseError(e.line, "targets refer to unknown config '" + e.value + "'");
        calibration_config = nc->config;
      } else throw UnknownKey(e.line, e.key);
    }
    if (have != 3) throw ParseError(targets_sec->line, "[targets] needs d0d7, d2d5 and d3d4");
    plan.targets = t;
  }

  if (bases_given == kStageCount) {
    plan.pipeline = prior;
  } else {
    const ValidatedConfig cfg = calibration_config ? *calibration_config : validate(olcfg_preset(), plan.layout);
    plan.pipeline = calibrate_pipeline(plan.targets.value_or(olcfg_targets()), cfg, prior, plan.layout);
  }
  validate(plan.pipeline);
  validate(plan.channel);
  return plan;
}

}  // namespace

SweepPlan parse_experiment_file(std::string_view text) { return resolve(parse_kv_text(text)); }

std::string render_experiment_file(const SweepPlan& plan, std::string_view header_comment) {
  std::ostringstream os;
  if (!header_comment.empty()) {
    std::istringstream lines{std::string(header_comment)};
    std::string line;
    while (std::getline(lines, line)) os << "# " << line << "\n";
    os << "\n";
  }
  os << "[sweep]\nseed=" << plan.seed << " rounds=" << plan.rounds << " attempts=" << plan.attempts
     << " shuffle=" << (plan.shuffle ? "true" : "false") << "\n\n";
  for (const auto& nc : plan.configs) {
    const EsbConfig& c = nc.config.get();
    os << "[config " << nc.name << "]\n"
       << "crc=" << to_token(c.crc_mode) << " protocol=" << to_token(c.protocol_mode)
       << " bitrate=" << to_token(c.bitrate_mode) << " txmode=" << to_token(c.tx_mode) << "\n"
       << "power=" << c.tx_power_dbm << " payload=" << to_token(c.payload_mode)
       << " payload_len=" << c.payload_len_bytes << " retransmits=" << c.retransmit_count
       << " retransmit_delay_us=" << format_double(c.retransmit_delay_us) << "\n\n";
  }
  os << "[channel]\np_loss=" << format_double(plan.channel.p_loss)
     << " p_corrupt=" << format_double(plan.channel.p_corrupt);
  if (plan.channel.p_loss_retransmit) os << " p_loss_retx=" << format_double(*plan.channel.p_loss_retransmit);
  os << "\n\n[link]\ndup_escape=" << format_double(plan.link.dup_escape_prob)
     << " spacing_us=" << format_double(plan.link.attempt_spacing_us)
     << " copy_spacing=" << (plan.link.copy_spacing == CopySpacing::StartToStart ? "start" : "end")
     << " fifo=" << plan.link.fifo_capacity << "\n\n";

  os << render_pipeline_sections(plan.pipeline, plan.targets);
  if (plan.layout != default_layout()) os << render_layout_text(plan.layout);
  return os.str();
}

std::string render_pipeline_sections(const PipelineModel& p, const std::optional<CalibrationTargets>& targets) {
  std::ostringstream os;
  os << "[pipeline]\n";
  for (Stage s : kAllStages) os << to_token(s) << "=" << format_double(p.base(s)) << "\n";
  os << "modifiers=" << (p.modifiers.entries.empty() ? "none" : "listed") << "\n\n";
  os << "[jitter]\nfamily=" << to_token(p.jitter.family) << "\n";
  for (Stage s : kAllStages) os << to_token(s) << "=" << format_double(p.jitter.sd_us[static_cast<int>(s)]) << "\n";
  os << "\n";
  for (const auto& [param, mods] : p.modifiers.entries) {
    os << "[modifier " << to_token(param) << "]\nstage=" << to_token(mods.stage);
    for (const auto& [label, v] : mods.by_value) os << " " << label << "=" << format_double(v);
    os << "\n\n";
  }
  if (targets)
    os << "[targets]\nd0d7=" << format_double(targets->d0d7) << " d2d5=" << format_double(targets->d2d5)
       << " d3d4=" << format_double(targets->d3d4) << "\n\n";
  return os.str();
}

namespace {

bool pipeline_kind(const std::string& kind) {
  return kind == "pipeline" || kind == "jitter" || kind == "modifier" || kind == "targets";
}

}  // namespace

SweepPlan with_pipeline_text(const SweepPlan& plan, std::string_view pipeline_text) {
  auto extra = parse_kv_text(pipeline_text);
  for (const auto& sec : extra)
    if (!pipeline_kind(sec.kind)) throw ParseError(sec.line, "pipeline file cannot contain [" + sec.kind + "]");
  auto sections = parse_kv_text(render_experiment_file(plan));
  std::erase_if(sections, [](const KvSection& s) { return pipeline_kind(s.kind); });
  sections.insert(sections.end(), extra.begin(), extra.end());
  return resolve(sections);
}

void apply_override(SweepPlan& plan, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) throw ParseError(0, "override must be key=value");
  const std::string path(assignment.substr(0, eq));
  const std::string value(assignment.substr(eq + 1));
  if (value.empty()) throw ParseError(0, "override '" + path + "' has no value");

  std::string kind;
  std::string name;
  std::string key;
  const auto dot = path.find('.');
  if (dot == std::string::npos) throw ParseError(0, "override key must be section.key: '" + path + "'");
  kind = path.substr(0, dot);
  std::string rest = path.substr(dot + 1);
  if (kind == "config" || kind == "modifier" || kind == "layout") {
    const auto dot2 = rest.rfind('.');
    if (dot2 == std::string::npos) throw ParseError(0, "override key must be " + kind + ".<name>.key: '" + path + "'");
    name = rest.substr(0, dot2);
    key = rest.substr(dot2 + 1);
  } else {
    key = rest;
  }

  auto sections = parse_kv_text(render_experiment_file(plan));
  bool matched = false;
  for (auto& sec : sections) {
    if (sec.kind != kind) continue;
    if (!name.empty() && name != "*" && sec.name != name) continue;
    matched = true;
    auto it = std::find_if(sec.entries.begin(), sec.entries.end(), [&](const KvEntry& e) { return e.key == key; });
    if (it != sec.entries.end()) it->value = value;
    else sec.entries.push_back({key, value, 0});
  }
  if (!matched) {
    if (kind == "config" || (!name.empty() && name == "*")) throw ParseError(0, "override matches no section: '" + path + "'");
    sections.push_back({kind, name, 0, {{key, value, 0}}});
  }
  if (kind == "targets") {
    // New targets mean the bases must be re-fitted.
    for (auto& sec : sections)
      if (sec.kind == "pipeline")
        std::erase_if(sec.entries, [](const KvEntry& e) { return parse_stage(e.key).has_value(); });
  }
  plan = resolve(sections);
}

SweepPlan default_plan() {
  SweepPlan plan;
  plan.layout = default_layout();
  plan.configs.push_back({"olcfg", validate(olcfg_preset())});
  plan.pipeline = default_pipeline();
  return plan;
}

}  // namespace wbansim
