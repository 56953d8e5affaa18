#include "rfdaq/pipeline/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rfdaq::pipeline {

using nlohmann::json;

const char* mode_name(RunMode m) {
    switch (m) {
        case RunMode::acquire_us: return "acquire_us";
        case RunMode::acquire_oa: return "acquire_oa";
        case RunMode::stress: return "stress";
        case RunMode::characterize: return "characterize";
        case RunMode::budget: return "budget";
    }
    return "?";
}

RunMode parse_mode(const std::string& name) {
    for (RunMode m : {RunMode::acquire_us, RunMode::acquire_oa, RunMode::stress,
                      RunMode::characterize, RunMode::budget})
        if (name == mode_name(m)) return m;
    throw StageError(Stage::config, "unknown mode: " + name);
}

RunConfig default_config(RunMode mode) {
    RunConfig cfg;
    cfg.mode = mode;
    cfg.link = jesd::make_link_params(2, 16, 32, true, 80e6);  // 16 channels at 80 MSPS
    cfg.trigger.delay = 60;
    cfg.trigger.window = 3072;
    switch (mode) {
        case RunMode::acquire_us:
            cfg.trigger.source = acq::TriggerConfig::Source::internal_pulser;
            cfg.scenario = afe::default_us_scenario();
            break;
        case RunMode::acquire_oa:
            cfg.trigger.source = acq::TriggerConfig::Source::external;
            cfg.scenario = afe::default_oa_scenario();
            break;
        case RunMode::characterize:
            cfg.afe.sample_rate = 125e6;
            cfg.afe.noise_rms = 2.0;  // converter-referred floor so SNR is meaningful
            cfg.link = jesd::make_link_params(2, 16, 32, true, 125e6);
            cfg.scenario.shape = afe::SweptSine{};
            break;
        default:
            break;
    }
    return cfg;
}

namespace {

template <typename T>
void get_to(const json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) it->get_to(out);
}

afe::Scenario parse_scenario(const json& j) {
    afe::Scenario sc;
    std::string shape = "dc";
    get_to(j, "shape", shape);
    if (shape == "dc") {
        afe::Dc s;
        get_to(j, "level", s.level);
        sc.shape = s;
    } else if (shape == "swept_sine") {
        afe::SweptSine s;
        get_to(j, "amplitude", s.amplitude);
        get_to(j, "freq_hz", s.freq_hz);
        get_to(j, "phase", s.phase);
        sc.shape = s;
    } else if (shape == "pulse_echo") {
        afe::PulseEcho s;
        get_to(j, "f0", s.f0);
        get_to(j, "cycles", s.cycles);
        get_to(j, "amplitude", s.amplitude);
        get_to(j, "depths_m", s.depths_m);
        get_to(j, "reflectivity", s.reflectivity);
        get_to(j, "sound_speed", s.sound_speed);
        sc.shape = s;
    } else if (shape == "oa_pulse") {
        afe::OaPulse s;
        get_to(j, "delay_s", s.delay_s);
        get_to(j, "width_s", s.width_s);
        get_to(j, "amplitude", s.amplitude);
        sc.shape = s;
    } else if (shape == "prbs") {
        afe::Prbs s;
        get_to(j, "seed", s.seed);
        get_to(j, "amplitude", s.amplitude);
        sc.shape = s;
    } else {
        throw StageError(Stage::config, "unknown scenario shape: " + shape);
    }
    get_to(j, "active_channels", sc.active_channels);
    return sc;
}

void parse_channel(const json& j, rdma::ChannelModel& ch) {
    get_to(j, "mtu", ch.mtu);
    get_to(j, "loss_probability", ch.loss_probability);
    get_to(j, "duplicate_probability", ch.duplicate_probability);
    get_to(j, "one_way_delay", ch.one_way_delay);
    get_to(j, "bandwidth_bps", ch.bandwidth_bps);
    get_to(j, "reorder", ch.reorder);
    get_to(j, "seed", ch.seed);
}

void parse_bucket(const json& j, acq::LeakyBucketModel& m) {
    get_to(j, "r_in", m.r_in);
    get_to(j, "r_out", m.r_out);
    get_to(j, "capacity_bits", m.capacity_bits);
    get_to(j, "tau_s", m.tau_s);
    get_to(j, "channels", m.channels);
    get_to(j, "bits_per_sample", m.bits_per_sample);
}

}  // namespace

RunConfig parse_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text, nullptr, true, true);  // allow comments
    } catch (const json::exception& e) {
        throw StageError(Stage::config, std::string("config parse error: ") + e.what());
    }
    try {
        std::string mode = "acquire_us";
        get_to(j, "mode", mode);
        RunConfig cfg = default_config(parse_mode(mode));

        std::string out;
        get_to(j, "output_dir", out);
        if (!out.empty()) cfg.output_dir = out;
        get_to(j, "trigger_time_s", cfg.trigger_time_s);
        get_to(j, "frames", cfg.frames);
        get_to(j, "frame_period_s", cfg.frame_period_s);

        if (auto it = j.find("afe"); it != j.end()) {
            const json& a = *it;
            get_to(a, "channels", cfg.afe.channels);
            std::string m = cfg.afe.mode == afe::OutputMode::iq ? "iq" : "raw";
            get_to(a, "mode", m);
            if (m == "raw") cfg.afe.mode = afe::OutputMode::raw;
            else if (m == "iq") cfg.afe.mode = afe::OutputMode::iq;
            else throw StageError(Stage::config, "afe.mode must be raw or iq");
            get_to(a, "sample_rate", cfg.afe.sample_rate);
            get_to(a, "gain_db", cfg.afe.gain_db);
            get_to(a, "active_termination", cfg.afe.active_termination);
            get_to(a, "noise_rms", cfg.afe.noise_rms);
            get_to(a, "seed", cfg.afe.seed);
            get_to(a, "response_hp_hz", cfg.afe.response_hp_hz);
            get_to(a, "response_lp_hz", cfg.afe.response_lp_hz);
        }
        if (auto it = j.find("scenario"); it != j.end()) {
            cfg.scenario = parse_scenario(*it);
            cfg.scenario_overridden = true;
        }
        if (auto it = j.find("link"); it != j.end()) {
            const json& l = *it;
            int lanes = cfg.link.lanes_per_link;
            int f = cfg.link.octets_per_frame;
            int k = cfg.link.frames_per_multiframe;
            bool scr = cfg.link.scrambling_enabled;
            double fc = cfg.link.frame_clock;
            get_to(l, "lanes", lanes);
            get_to(l, "octets_per_frame", f);
            get_to(l, "frames_per_multiframe", k);
            get_to(l, "scrambling", scr);
            get_to(l, "frame_clock", fc);
            cfg.link = jesd::make_link_params(lanes, f, k, scr, fc);
            get_to(l, "elastic_depth_octets", cfg.link.elastic_depth_octets);
            get_to(l, "cgs_multiframes", cfg.link.cgs_multiframes);
            get_to(l, "device_id", cfg.link.device_id);
        }
        if (auto it = j.find("trigger"); it != j.end()) {
            const json& t = *it;
            std::string src = cfg.trigger.source == acq::TriggerConfig::Source::internal_pulser
                                  ? "internal_pulser"
                                  : "external";
            get_to(t, "source", src);
            if (src == "external") cfg.trigger.source = acq::TriggerConfig::Source::external;
            else if (src == "internal_pulser")
                cfg.trigger.source = acq::TriggerConfig::Source::internal_pulser;
            else throw StageError(Stage::config, "trigger.source must be external or internal_pulser");
            get_to(t, "delay", cfg.trigger.delay);
            get_to(t, "window", cfg.trigger.window);
        }
        if (auto it = j.find("ring"); it != j.end()) {
            get_to(*it, "capacity_bytes", cfg.ring_capacity_bytes);
            get_to(*it, "block_bytes", cfg.ring_block_bytes);
        }
        if (auto it = j.find("bucket"); it != j.end()) parse_bucket(*it, cfg.bucket);
        if (auto it = j.find("transport"); it != j.end()) {
            const json& t = *it;
            get_to(t, "batch", cfg.transport.batch);
            get_to(t, "pad_channels", cfg.transport.pad_channels);
            get_to(t, "window_segments", cfg.transport.window_segments);
            if (auto c = t.find("channel"); c != t.end())
                parse_channel(*c, cfg.transport.channel);
        }
        if (auto it = j.find("analysis"); it != j.end()) {
            get_to(*it, "band_lo_hz", cfg.analysis.band_lo_hz);
            get_to(*it, "band_hi_hz", cfg.analysis.band_hi_hz);
        }
        if (auto it = j.find("stress"); it != j.end()) {
            const json& s = *it;
            get_to(s, "payload_bytes", cfg.stress.payload_bytes);
            get_to(s, "batch_sizes", cfg.stress.batch_sizes);
            get_to(s, "repeats", cfg.stress.repeats);
            get_to(s, "poll_overhead_s", cfg.stress.poll_overhead_s);
            get_to(s, "bytes_per_run", cfg.stress.bytes_per_run);
            if (auto c = s.find("channel"); c != s.end()) parse_channel(*c, cfg.stress.channel);
        }
        if (auto it = j.find("characterize"); it != j.end()) {
            const json& c = *it;
            get_to(c, "grid_start_hz", cfg.characterize.grid_start_hz);
            get_to(c, "grid_step_hz", cfg.characterize.grid_step_hz);
            get_to(c, "record_samples", cfg.characterize.record_samples);
            get_to(c, "tones", cfg.characterize.tones);
            if (auto s = c.find("snr"); s != c.end()) {
                get_to(*s, "span_bins", cfg.characterize.snr.span_bins);
                get_to(*s, "span_fraction", cfg.characterize.snr.span_fraction);
                get_to(*s, "harmonic_guards", cfg.characterize.snr.harmonic_guards);
                get_to(*s, "guard_bins", cfg.characterize.snr.guard_bins);
                get_to(*s, "noise_floor_hz", cfg.characterize.snr.noise_floor_hz);
            }
        }
        if (auto it = j.find("budget"); it != j.end()) {
            const json& b = *it;
            get_to(b, "include_reference", cfg.budget.include_reference);
            if (auto rows = b.find("rows"); rows != b.end()) {
                for (const json& r : *rows) {
                    BudgetRow row;
                    get_to(r, "label", row.label);
                    parse_bucket(r, row.model);
                    if (auto fl = r.find("frame_length"); fl != r.end())
                        row.frame_length = fl->get<uint64_t>();
                    cfg.budget.rows.push_back(std::move(row));
                }
            }
        }
        cfg.validate();
        return cfg;
    } catch (const json::exception& e) {
        throw StageError(Stage::config, std::string("config field error: ") + e.what());
    }
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw StageError(Stage::config, "cannot open config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_json(buf.str());
}

void RunConfig::validate() const {
    afe.validate();
    link.validate();
    trigger.validate();
    bucket.validate();
    transport.channel.validate();
    if (afe.channels != link.channels())
        throw StageError(Stage::config,
                         "front-end channel count " + std::to_string(afe.channels) +
                             " does not match the link's " + std::to_string(link.channels()));
    if (transport.pad_channels < afe.channels)
        throw StageError(Stage::config, "pad_channels must not drop real channels");
    if (ring_block_bytes == 0 || ring_capacity_bytes % ring_block_bytes != 0)
        throw StageError(Stage::config, "ring capacity must be a multiple of the block size");
    if (transport.batch <= 0)
        throw StageError(Stage::config, "transport batch must be positive");
    if (frames <= 0) throw StageError(Stage::config, "frames must be positive");
    if (trigger_time_s < 0.0)
        throw StageError(Stage::config, "trigger time must be non-negative");
    if (mode == RunMode::characterize) {
        if (characterize.tones.empty() &&
            (characterize.grid_step_hz <= 0.0 || characterize.grid_start_hz <= 0.0))
            throw StageError(Stage::config, "characterize grid must be positive");
        if (characterize.record_samples < 64)
            throw StageError(Stage::config, "characterize records are too short");
    }
    if (mode == RunMode::stress) {
        if (stress.payload_bytes.empty() || stress.batch_sizes.empty() || stress.repeats <= 0)
            throw StageError(Stage::config, "stress grid must be non-empty");
        stress.channel.validate();
    }
    if (!(analysis.band_lo_hz > 0.0) || !(analysis.band_lo_hz < analysis.band_hi_hz) ||
        !(analysis.band_hi_hz < afe.sample_rate / 2.0))
        throw StageError(Stage::config, "analysis band must satisfy 0 < lo < hi < Nyquist");
}

}  // namespace rfdaq::pipeline
