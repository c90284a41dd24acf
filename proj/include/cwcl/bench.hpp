#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "cwcl/analytic.hpp"
#include "cwcl/cyclostat.hpp"
#include "cwcl/locator.hpp"
#include "cwcl/quadform.hpp"
#include "cwcl/random.hpp"
#include "cwcl/scenario.hpp"
#include "cwcl/waveform.hpp"

namespace cwcl {

enum class RunMode { kMonteCarlo, kAnalytic, kBoth };

inline RunMode parse_mode(const std::string& s) {
    if (s == "mc") return RunMode::kMonteCarlo;
    if (s == "analytic") return RunMode::kAnalytic;
    if (s == "both") return RunMode::kBoth;
    throw std::invalid_argument("mode must be one of mc, analytic, both");
}

inline const char* mode_name(RunMode m) {
    switch (m) {
        case RunMode::kMonteCarlo: return "mc";
        case RunMode::kAnalytic: return "analytic";
        default: return "both";
    }
}

/// Full experiment description: base scenario, the two waveforms, sweep
/// axes, trial count, mode, master seed and output path.
struct ExperimentConfig {
    Scenario base;
    WaveformParams target_waveform;
    WaveformParams interferer_waveform{4, 40.0e6, 0.35, 200.0e6, 5000, 0};
    std::vector<double> sweep_interferer_power_dbm;
    std::vector<Point> sweep_interferer_position;
    std::vector<int> sweep_interferer_modulation;
    std::vector<double> sweep_target_power_dbm;
    std::size_t trials = 1;
    RunMode mode = RunMode::kMonteCarlo;
    std::uint64_t master_seed = 1;
    std::string output_path = "results.csv";
    std::size_t fit_realizations = 2000;
    unsigned threads = 0;  // 0 -> hardware concurrency
};

/// Target cyclic frequency convention: the pulse-shaped QAM feature sits
/// at the symbol rate.
inline double target_alpha_hz(const ExperimentConfig& cfg) {
    return cfg.target_waveform.symbol_rate_hz;
}

struct SweepPoint {
    std::size_t sweep_id = 0;
    double p_t_dbm = 0.0;
    double p_i_dbm = 0.0;
    Point interferer;
    int mod_order_t = 4;
    int mod_order_i = 4;
};

struct ResultRow {
    std::size_t sweep_id = 0;
    double p_t_dbm = 0.0;
    double p_i_dbm = 0.0;
    Point interferer;
    int mod_order_t = 4;
    int mod_order_i = 4;
    std::size_t trials = 0;
    std::optional<double> rmse_cyclic_mc;
    std::optional<double> rmse_plain_mc;
    std::optional<double> rmse_cyclic_analytic;
    std::optional<double> mean_x;
    std::optional<double> mean_y;
    double nearest_cr_dist = 0.0;
    std::uint64_t seed = 0;
    std::string mc_error;        // marker text when the Monte Carlo leg failed
    std::string analytic_error;  // marker text when the analytic leg failed
};

// seed-stream tags under the master seed
inline constexpr std::uint64_t kSeedTagTrial = 1;
inline constexpr std::uint64_t kSeedTagFit = 2;

/// Counter-based split: one independent seed per (sweep point, trial).
inline std::uint64_t trial_seed(std::uint64_t master, std::size_t sweep_id,
                                std::size_t trial_index) {
    return mix_seed(mix_seed(mix_seed(master, kSeedTagTrial), sweep_id), trial_index);
}

/// Sweep grid in row order: interferer position (outer), interferer
/// modulation, target power, interferer power (inner).
inline std::vector<SweepPoint> enumerate_sweep(const ExperimentConfig& cfg) {
    const std::vector<Point> positions = cfg.sweep_interferer_position.empty()
                                             ? std::vector<Point>{cfg.base.interferer_position}
                                             : cfg.sweep_interferer_position;
    const std::vector<int> mods =
        cfg.sweep_interferer_modulation.empty()
            ? std::vector<int>{cfg.interferer_waveform.modulation_order}
            : cfg.sweep_interferer_modulation;
    const std::vector<double> pts = cfg.sweep_target_power_dbm.empty()
                                        ? std::vector<double>{cfg.base.p_t_dbm}
                                        : cfg.sweep_target_power_dbm;
    std::vector<SweepPoint> out;
    std::size_t id = 0;
    for (const Point& pos : positions)
        for (int mod : mods)
            for (double pt : pts)
                for (double pi : cfg.sweep_interferer_power_dbm)
                    out.push_back(SweepPoint{id++, pt, pi, pos,
                                             cfg.target_waveform.modulation_order, mod});
    return out;
}

inline Scenario scenario_for(const ExperimentConfig& cfg, const SweepPoint& pt) {
    Scenario s = cfg.base;
    s.p_t_dbm = pt.p_t_dbm;
    s.p_i_dbm = pt.p_i_dbm;
    s.interferer_position = pt.interferer;
    return s;
}

inline WaveformParams interferer_waveform_for(const ExperimentConfig& cfg,
                                              const SweepPoint& pt) {
    WaveformParams w = cfg.interferer_waveform;
    w.modulation_order = pt.mod_order_i;
    return w;
}

inline void validate_config(const ExperimentConfig& cfg) {
    validate_scenario(cfg.base);
    validate_waveform_params(cfg.target_waveform);
    validate_waveform_params(cfg.interferer_waveform);
    if (cfg.target_waveform.sample_rate_hz != cfg.interferer_waveform.sample_rate_hz ||
        cfg.target_waveform.num_samples != cfg.interferer_waveform.num_samples)
        throw std::invalid_argument("config: target and interferer waveforms must share "
                                    "sample rate and sample count");
    if (cfg.sweep_interferer_power_dbm.empty())
        throw std::invalid_argument("config: sweep.interferer_power_dbm must be nonempty");
    for (const Point& p : cfg.sweep_interferer_position) {
        Scenario s = cfg.base;
        s.interferer_position = p;
        validate_scenario(s);
    }
    for (int mod : cfg.sweep_interferer_modulation) {
        WaveformParams w = cfg.interferer_waveform;
        w.modulation_order = mod;
        validate_waveform_params(w);
    }
    for (double pt : cfg.sweep_target_power_dbm)
        if (std::isnan(pt)) throw std::invalid_argument("config: NaN target power");
    if (cfg.mode != RunMode::kAnalytic && cfg.trials < 1)
        throw std::invalid_argument("config: trials must be >= 1 in mc mode");
    if (cfg.mode != RunMode::kMonteCarlo && cfg.fit_realizations < 2)
        throw std::invalid_argument("config: fit_realizations must be >= 2 in analytic mode");
    if (cfg.output_path.empty())
        throw std::invalid_argument("config: output_path must be nonempty");
}

struct TrialEstimates {
    Point cyclic;
    Point plain;
};

/// One synthesis -> reception -> estimation pass, deterministic per seed.
/// Estimation happens in the target-centric frame; estimates are returned
/// in the original coordinates.
inline TrialEstimates run_trial(const ExperimentConfig& cfg, const SweepPoint& pt,
                                std::uint64_t seed) {
    const Scenario original = scenario_for(cfg, pt);
    const Scenario centered = translated_to_origin(original);

    WaveformParams wt = cfg.target_waveform;
    WaveformParams wi = interferer_waveform_for(cfg, pt);
    wt.seed = mix_seed(seed, 1);
    wi.seed = mix_seed(seed, 2);
    const SampleBlock st = generate_qam(wt);
    const SampleBlock si = generate_qam(wi);

    const double fs = wt.sample_rate_hz;
    const double sigma2 = noise_power(centered.noise_psd_dbm_hz, fs);
    const std::vector<PowerVector> pks = power_vectors(centered);

    std::vector<SampleBlock> received;
    received.reserve(pks.size());
    for (std::size_t k = 0; k < pks.size(); ++k) {
        const SampleBlock wk = awgn(wt.num_samples, sigma2, mix_seed(seed, 1000 + k));
        received.push_back(compose_received(st, si, pks[k], wk));
    }

    const LocationEstimate cyc =
        cyclic_wcl(received, centered.radio_positions, target_alpha_hz(cfg), fs);
    const LocationEstimate pln = plain_wcl(received, centered.radio_positions, fs);

    const double tx = original.target_position.x;
    const double ty = original.target_position.y;
    return TrialEstimates{Point{cyc.x + tx, cyc.y + ty}, Point{pln.x + tx, pln.y + ty}};
}

/// Distance from the target to the CR nearest the interferer (the RMSE
/// saturation reference); argmin ties broken by lowest radio index.
inline double nearest_cr_distance(const Scenario& s) {
    if (s.radio_positions.empty())
        throw std::invalid_argument("nearest_cr_distance: no radios");
    std::size_t best = 0;
    double best_d = distance(s.interferer_position, s.radio_positions[0]);
    for (std::size_t k = 1; k < s.radio_positions.size(); ++k) {
        const double d = distance(s.interferer_position, s.radio_positions[k]);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return distance(s.target_position, s.radio_positions[best]);
}

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string csv_cell(const std::optional<double>& v, const std::string& error) {
    if (!error.empty()) {
        std::string marker = "error:" + error;
        for (char& c : marker)
            if (c == ',' || c == '\n' || c == '\r') c = ';';
        return marker;
    }
    return v ? fmt_double(*v) : std::string{};
}

/// Runs trials in parallel workers; results land in trial-index order so
/// the reduction is deterministic regardless of scheduling.
inline std::vector<TrialEstimates> run_trials(const ExperimentConfig& cfg,
                                              const SweepPoint& pt, std::string& error_out) {
    std::vector<TrialEstimates> results(cfg.trials);
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::string first_error;

    unsigned workers = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(cfg.trials)));

    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cfg.trials) return;
            try {
                results[i] = run_trial(cfg, pt, trial_seed(cfg.master_seed, pt.sweep_id, i));
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error.empty()) first_error = e.what();
            }
        }
    };

    if (workers == 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
        for (std::thread& t : pool) t.join();
    }
    error_out = first_error;
    return results;
}

}  // namespace detail

inline const char* kCsvHeader =
    "sweep_id, p_t_dbm, p_i_dbm, interferer_x, interferer_y, mod_order_t, mod_order_i, "
    "trials, rmse_cyclic_mc, rmse_plain_mc, rmse_cyclic_analytic, mean_x, mean_y, "
    "nearest_cr_dist, seed";

inline std::string to_csv(const std::vector<ResultRow>& rows, const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "# cyclic WCL sweep results\n";
    out << "# mode=" << mode_name(cfg.mode) << " trials=" << cfg.trials
        << " master_seed=" << cfg.master_seed << "\n";
    out << "# per-trial seed = mix(mix(mix(master_seed, " << kSeedTagTrial
        << "), sweep_id), trial_index), mix(a,b) = splitmix64(a ^ (splitmix64(b) + "
           "0x9e3779b97f4a7c15))\n";
    out << kCsvHeader << "\n";
    for (const ResultRow& r : rows) {
        out << r.sweep_id << ',' << detail::fmt_double(r.p_t_dbm) << ','
            << detail::fmt_double(r.p_i_dbm) << ',' << detail::fmt_double(r.interferer.x)
            << ',' << detail::fmt_double(r.interferer.y) << ',' << r.mod_order_t << ','
            << r.mod_order_i << ',' << r.trials << ','
            << detail::csv_cell(r.rmse_cyclic_mc, r.mc_error) << ','
            << detail::csv_cell(r.rmse_plain_mc, r.mc_error) << ','
            << detail::csv_cell(r.rmse_cyclic_analytic, r.analytic_error) << ','
            << detail::csv_cell(r.mean_x, r.mc_error) << ','
            << detail::csv_cell(r.mean_y, r.mc_error) << ','
            << detail::fmt_double(r.nearest_cr_dist) << ',' << r.seed << "\n";
    }
    return out.str();
}

/// Runs the full sweep: Monte Carlo RMSE per sweep point (mode mc/both)
/// and/or analytic RMSE (mode analytic/both), writes the CSV, returns the
/// rows. A failed leg leaves an error marker in its row and the sweep
/// continues.
inline std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const std::vector<SweepPoint> points = enumerate_sweep(cfg);
    const bool want_mc = cfg.mode != RunMode::kAnalytic;
    const bool want_analytic = cfg.mode != RunMode::kMonteCarlo;

    // The theta model depends only on the waveform pair, not on powers or
    // geometry, so one fit per swept interferer modulation is reused across
    // sweep points. Fit seeds depend only on the modulation order.
    std::map<int, GaussianThetaModel> fit_cache;

    std::vector<ResultRow> rows;
    rows.reserve(points.size());
    for (const SweepPoint& pt : points) {
        ResultRow row;
        row.sweep_id = pt.sweep_id;
        row.p_t_dbm = pt.p_t_dbm;
        row.p_i_dbm = pt.p_i_dbm;
        row.interferer = pt.interferer;
        row.mod_order_t = pt.mod_order_t;
        row.mod_order_i = pt.mod_order_i;
        row.trials = want_mc ? cfg.trials : 0;
        row.seed = cfg.master_seed;

        const Scenario original = scenario_for(cfg, pt);
        row.nearest_cr_dist = nearest_cr_distance(original);

        if (want_mc) {
            std::string err;
            const std::vector<TrialEstimates> trials = detail::run_trials(cfg, pt, err);
            if (!err.empty()) {
                row.mc_error = err;
            } else {
                double se_c = 0.0, se_p = 0.0, mx = 0.0, my = 0.0;
                for (const TrialEstimates& t : trials) {
                    const double cex = t.cyclic.x - original.target_position.x;
                    const double cey = t.cyclic.y - original.target_position.y;
                    const double pex = t.plain.x - original.target_position.x;
                    const double pey = t.plain.y - original.target_position.y;
                    se_c += cex * cex + cey * cey;
                    se_p += pex * pex + pey * pey;
                    mx += t.cyclic.x;
                    my += t.cyclic.y;
                }
                const double n = static_cast<double>(trials.size());
                row.rmse_cyclic_mc = std::sqrt(se_c / n);
                row.rmse_plain_mc = std::sqrt(se_p / n);
                row.mean_x = mx / n;
                row.mean_y = my / n;
            }
        }

        if (want_analytic) {
            try {
                auto it = fit_cache.find(pt.mod_order_i);
                if (it == fit_cache.end()) {
                    WaveformParams wi = interferer_waveform_for(cfg, pt);
                    const std::uint64_t fit_seed =
                        mix_seed(mix_seed(cfg.master_seed, kSeedTagFit),
                                 static_cast<std::uint64_t>(pt.mod_order_i));
                    it = fit_cache
                             .emplace(pt.mod_order_i,
                                      fit_theta_model(cfg.target_waveform, wi,
                                                      target_alpha_hz(cfg),
                                                      cfg.fit_realizations, fit_seed))
                             .first;
                }
                const Scenario centered = translated_to_origin(original);
                const QuadFormSet qf =
                    build_quadforms(power_vectors(centered), centered.radio_positions);
                row.rmse_cyclic_analytic = analytic_rmse(it->second, qf);
            } catch (const std::exception& e) {
                row.analytic_error = e.what();
            }
        }

        rows.push_back(row);
    }

    std::ofstream out(cfg.output_path, std::ios::binary);
    if (!out) throw std::runtime_error("run_sweep: cannot open output file " + cfg.output_path);
    out << to_csv(rows, cfg);
    out.close();
    return rows;
}

// ---------------------------------------------------------------------------
// JSON config parsing (strict: unknown keys are rejected)

namespace detail {

inline void expect_keys(const nlohmann::json& obj, const char* context,
                        std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) ok = true;
        if (!ok)
            throw std::invalid_argument(std::string("config: unknown key '") + item.key() +
                                        "' in " + context);
    }
}

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key,
                                     const char* context) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw std::invalid_argument(std::string("config: missing key '") + key + "' in " +
                                    context);
    return *it;
}

/// Power fields accept a JSON number or the string "-inf" (source off).
inline double read_power_dbm(const nlohmann::json& v, const char* context) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string() && (v.get<std::string>() == "-inf" || v.get<std::string>() == "-Inf"))
        return -std::numeric_limits<double>::infinity();
    throw std::invalid_argument(std::string("config: ") + context +
                                " must be a number or \"-inf\"");
}

inline Point read_point(const nlohmann::json& v, const char* context) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw std::invalid_argument(std::string("config: ") + context +
                                    " must be a [x, y] number pair");
    return Point{v[0].get<double>(), v[1].get<double>()};
}

inline WaveformParams read_waveform(const nlohmann::json& obj, const char* context) {
    expect_keys(obj, context,
                {"modulation_order", "symbol_rate_hz", "rolloff", "sample_rate_hz",
                 "num_samples", "pulse_shape"});
    WaveformParams w;
    w.modulation_order = require(obj, "modulation_order", context).get<int>();
    w.symbol_rate_hz = require(obj, "symbol_rate_hz", context).get<double>();
    w.rolloff = require(obj, "rolloff", context).get<double>();
    w.sample_rate_hz = require(obj, "sample_rate_hz", context).get<double>();
    w.num_samples = require(obj, "num_samples", context).get<std::size_t>();
    if (obj.contains("pulse_shape")) {
        const std::string p = obj["pulse_shape"].get<std::string>();
        if (p == "root_raised_cosine")
            w.pulse = PulseShape::kRootRaisedCosine;
        else if (p == "raised_cosine")
            w.pulse = PulseShape::kRaisedCosine;
        else
            throw std::invalid_argument(std::string("config: ") + context +
                                        ".pulse_shape must be root_raised_cosine or "
                                        "raised_cosine");
    }
    return w;
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    using detail::expect_keys;
    using detail::require;
    if (!j.is_object()) throw std::invalid_argument("config: root must be an object");
    expect_keys(j, "config root",
                {"scenario", "target_waveform", "interferer_waveform", "sweep", "trials",
                 "mode", "master_seed", "output_path", "fit_realizations", "threads"});

    ExperimentConfig cfg;

    const nlohmann::json& sc = require(j, "scenario", "config root");
    expect_keys(sc, "scenario",
                {"radio_positions", "radio_layout", "target_position", "interferer_position",
                 "target_power_dbm", "interferer_power_dbm", "reference_distance_m",
                 "path_loss_exponent", "noise_psd_dbm_hz"});
    const bool has_positions = sc.contains("radio_positions");
    const bool has_layout = sc.contains("radio_layout");
    if (has_positions == has_layout)
        throw std::invalid_argument(
            "config: scenario needs exactly one of radio_positions, radio_layout");
    if (has_positions) {
        for (const auto& p : sc["radio_positions"])
            cfg.base.radio_positions.push_back(detail::read_point(p, "radio_positions entry"));
    } else {
        const nlohmann::json& lay = sc["radio_layout"];
        expect_keys(lay, "radio_layout", {"count", "extent_m", "seed"});
        cfg.base.radio_positions = place_radios(require(lay, "count", "radio_layout").get<std::size_t>(),
                                                require(lay, "extent_m", "radio_layout").get<double>(),
                                                require(lay, "seed", "radio_layout").get<std::uint64_t>());
    }
    if (sc.contains("target_position"))
        cfg.base.target_position = detail::read_point(sc["target_position"], "target_position");
    cfg.base.interferer_position =
        detail::read_point(require(sc, "interferer_position", "scenario"), "interferer_position");
    cfg.base.p_t_dbm = detail::read_power_dbm(require(sc, "target_power_dbm", "scenario"),
                                              "target_power_dbm");
    if (sc.contains("interferer_power_dbm"))
        cfg.base.p_i_dbm = detail::read_power_dbm(sc["interferer_power_dbm"],
                                                  "interferer_power_dbm");
    if (sc.contains("reference_distance_m")) cfg.base.d0 = sc["reference_distance_m"].get<double>();
    if (sc.contains("path_loss_exponent"))
        cfg.base.gamma = sc["path_loss_exponent"].get<double>();
    if (sc.contains("noise_psd_dbm_hz"))
        cfg.base.noise_psd_dbm_hz =
            detail::read_power_dbm(sc["noise_psd_dbm_hz"], "noise_psd_dbm_hz");

    cfg.target_waveform =
        detail::read_waveform(require(j, "target_waveform", "config root"), "target_waveform");
    cfg.interferer_waveform = detail::read_waveform(
        require(j, "interferer_waveform", "config root"), "interferer_waveform");

    const nlohmann::json& sw = require(j, "sweep", "config root");
    expect_keys(sw, "sweep",
                {"interferer_power_dbm", "interferer_position", "interferer_modulation_order",
                 "target_power_dbm"});
    for (const auto& v : require(sw, "interferer_power_dbm", "sweep"))
        cfg.sweep_interferer_power_dbm.push_back(
            detail::read_power_dbm(v, "sweep.interferer_power_dbm entry"));
    if (sw.contains("interferer_position")) {
        for (const auto& v : sw["interferer_position"])
            cfg.sweep_interferer_position.push_back(
                detail::read_point(v, "sweep.interferer_position entry"));
        if (cfg.sweep_interferer_position.empty())
            throw std::invalid_argument("config: sweep.interferer_position must be nonempty");
    }
    if (sw.contains("interferer_modulation_order")) {
        for (const auto& v : sw["interferer_modulation_order"])
            cfg.sweep_interferer_modulation.push_back(v.get<int>());
        if (cfg.sweep_interferer_modulation.empty())
            throw std::invalid_argument(
                "config: sweep.interferer_modulation_order must be nonempty");
    }
    if (sw.contains("target_power_dbm")) {
        for (const auto& v : sw["target_power_dbm"])
            cfg.sweep_target_power_dbm.push_back(
                detail::read_power_dbm(v, "sweep.target_power_dbm entry"));
        if (cfg.sweep_target_power_dbm.empty())
            throw std::invalid_argument("config: sweep.target_power_dbm must be nonempty");
    }

    if (j.contains("trials")) cfg.trials = j["trials"].get<std::size_t>();
    if (j.contains("mode")) cfg.mode = parse_mode(j["mode"].get<std::string>());
    if (j.contains("master_seed")) cfg.master_seed = j["master_seed"].get<std::uint64_t>();
    if (j.contains("output_path")) cfg.output_path = j["output_path"].get<std::string>();
    if (j.contains("fit_realizations"))
        cfg.fit_realizations = j["fit_realizations"].get<std::size_t>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<unsigned>();
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
    }
    return parse_config(j);
}

/// Seeded radio placement as a JSON document embeddable in a config.
inline std::string layout_json(std::size_t count, double extent, std::uint64_t seed) {
    const std::vector<Point> pts = place_radios(count, extent, seed);
    nlohmann::json arr = nlohmann::json::array();
    for (const Point& p : pts) arr.push_back({p.x, p.y});
    nlohmann::json doc;
    doc["radio_positions"] = arr;
    return doc.dump(2) + "\n";
}

}  // namespace cwcl
