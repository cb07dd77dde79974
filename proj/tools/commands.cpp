#include "commands.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "araim/error.hpp"
#include "araim/gmpfa.hpp"
#include "araim/integrity.hpp"
#include "araim/navsol.hpp"
#include "araim/parallel.hpp"
#include "araim/rng.hpp"
#include "araim/scenario.hpp"

#ifndef ARAIM_VERSION
#define ARAIM_VERSION "unknown"
#endif

namespace araim::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string num(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Json manifest(const std::string& command, const CommonOptions& common, Json parameters) {
    Json m;
    m["command"] = command;
    m["version"] = ARAIM_VERSION;
    m["parameters"] = std::move(parameters);
    // Thread count is deliberately absent: outputs do not depend on it.
    m["timestamp"] = common.timestamp ? Json(utc_now()) : Json(nullptr);
    return m;
}

std::filesystem::path with_suffix(const std::filesystem::path& prefix, const std::string& suffix) {
    return std::filesystem::path(prefix.string() + suffix);
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write " + path.string());
    }
    return out;
}

/// CSV with the manifest on a leading comment line.
std::ofstream open_csv(const std::filesystem::path& path, const Json& manifest, const std::string& header) {
    auto out = open_output(path);
    out << "# manifest: " << manifest.dump() << '\n' << header << '\n';
    return out;
}

void write_json(const std::filesystem::path& path, const Json& doc) {
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
}

void require_out(const CommonOptions& common) {
    if (common.out.empty()) {
        throw ConfigError("--out is required");
    }
}

int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const DepletionError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const SingularGeometryError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

BudgetConfig budget_from(const IntegrityOptions& opts) {
    return opts.budget ? load_budget(*opts.budget) : default_budget_config();
}

IntegrityConfig integrity_config(const IntegrityOptions& opts, PfaMode mode) {
    IntegrityConfig cfg;
    cfg.pfa_total_vertical = opts.pfa_total;
    cfg.window_seconds = opts.window;
    cfg.sample_dt = opts.dt;
    cfg.p_md = opts.p_md;
    cfg.pfa_mode = mode;
    cfg.c_corr = opts.c_corr;
    cfg.val = opts.val;
    cfg.validate();
    return cfg;
}

Json integrity_parameters(const IntegrityOptions& opts) {
    Json p;
    p["budget"] = opts.budget ? Json(opts.budget->string()) : Json("builtin-fixture");
    p["pfa_mode"] = opts.pfa_mode;
    p["c_corr"] = opts.c_corr ? Json(*opts.c_corr) : Json(nullptr);
    p["p_md"] = opts.p_md;
    p["pfa_total"] = opts.pfa_total;
    p["window_s"] = opts.window;
    p["dt_s"] = opts.dt;
    p["val_m"] = opts.val;
    return p;
}

// Pseudorange errors per epoch and satellite, from epoch_id,sat_id,delta_rho_m.
using MeasurementTable = std::map<std::string, std::map<std::string, double>>;

MeasurementTable load_measurements(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open " + path.string());
    }
    MeasurementTable table;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) {
            const auto a = f.find_first_not_of(" \t\r");
            const auto b = f.find_last_not_of(" \t\r");
            fields.push_back(a == std::string::npos ? "" : f.substr(a, b - a + 1));
        }
        if (!header) {
            header = true;
            if (fields.size() == 3 && fields[0] == "epoch_id") {
                continue;
            }
            throw ParseError("expected header epoch_id,sat_id,delta_rho_m", line_no);
        }
        if (fields.size() != 3) {
            throw ParseError("expected 3 fields", line_no);
        }
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(fields[2], &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != fields[2].size() || !std::isfinite(v)) {
            throw ParseError("invalid delta_rho '" + fields[2] + "'", line_no);
        }
        table[fields[0]][fields[1]] = v;
    }
    return table;
}

}  // namespace

std::uint64_t parse_count(const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("invalid count '" + text + "'");
    }
    if (used != text.size() || !(v >= 0.0) || v > 1.8e19 || v != std::floor(v)) {
        throw ConfigError("invalid count '" + text + "'");
    }
    return static_cast<std::uint64_t>(v);
}

int run_pfa(const PfaOptions& opts, std::ostream& err) {
    return guarded(err, [&] {
        require_out(opts.common);
        const GmParams gm = gm_params(opts.tau, opts.dt, opts.q_var);
        const PfaSeries series = mc_conditional_pout(gm, opts.pout0, opts.kend, opts.samples, opts.seed,
                                                     McOptions{opts.batch, opts.common.threads});
        Json params;
        params["tau_s"] = opts.tau;
        params["dt_s"] = opts.dt;
        params["q_var"] = opts.q_var;
        params["pout0"] = opts.pout0;
        params["kend"] = opts.kend;
        params["samples"] = opts.samples;
        params["batch"] = opts.batch;
        params["seed"] = opts.seed;
        const Json man = manifest("pfa", opts.common, params);

        auto csv = open_csv(with_suffix(opts.common.out, ".csv"), man,
                            "k,p_out,moving_avg,ratio,survivors,events,low_confidence");
        std::size_t low = 0;
        for (const auto& s : series.steps) {
            csv << s.k << ',' << num(s.p_out) << ',' << num(s.moving_avg) << ',' << num(s.ratio) << ','
                << s.survivors << ',' << s.events << ',' << (s.low_confidence ? 1 : 0) << '\n';
            low += s.low_confidence ? 1 : 0;
        }

        const PfaStep& last = series.step(series.k_end());
        Json summary;
        summary["manifest"] = man;
        summary["a"] = gm.a;
        summary["p_x"] = gm.p_x;
        summary["q"] = series.q;
        summary["p_out_0"] = series.p_out_0;
        summary["total_samples"] = series.total_samples;
        summary["initial_survivors"] = series.initial_survivors;
        summary["initial_exit_fraction"] = series.initial_exit_fraction();
        summary["k_end"] = series.k_end();
        summary["p_out_kend"] = last.p_out;
        summary["moving_avg_kend"] = last.moving_avg;
        summary["c_corr"] = correction_coefficient(series, series.k_end());
        summary["low_confidence_steps"] = low;
        write_json(with_suffix(opts.common.out, ".json"), summary);
        return kExitOk;
    });
}

int run_vpl(const VplOptions& opts, std::ostream& err) {
    return guarded(err, [&] {
        require_out(opts.common);
        const BudgetConfig budget_cfg = budget_from(opts.integrity);
        const IntegrityConfig cfg = integrity_config(opts.integrity, parse_pfa_mode(opts.integrity.pfa_mode));
        const auto records = load_geometry(opts.geometry, budget_cfg.mask_angle_deg);
        const auto measurements =
            opts.measurements ? std::optional(load_measurements(*opts.measurements)) : std::nullopt;

        Json params = integrity_parameters(opts.integrity);
        params["geometry"] = opts.geometry.string();
        params["measurements"] = opts.measurements ? Json(opts.measurements->string()) : Json(nullptr);
        const Json man = manifest("vpl", opts.common, params);

        auto epochs = open_csv(with_suffix(opts.common.out, ".csv"), man,
                               "epoch_id,usable,n_sats,pfa_sample,vpl_m,alert,status");
        auto subs = open_csv(with_suffix(opts.common.out, "_sub.csv"), man,
                             "epoch_id,excluded_sat,d_v_m,db_v_m,a_v_m,ab_v_m,vpl_n_m,d_vn_m");

        const double pfa_sample = pfa_per_sample(cfg);
        std::size_t usable = 0;
        std::size_t alerts = 0;
        Json unusable = Json::array();
        for (const auto& rec : records) {
            std::string status = rec.status;
            std::optional<SolutionSet> set;
            std::optional<ErrorBudget> budget;
            if (rec.usable()) {
                try {
                    budget = apply_budget(budget_cfg, *rec.geometry);
                    set = build_solution_set(*rec.geometry, *budget);
                } catch (const SingularGeometryError& e) {
                    status = e.what();
                }
            }
            if (!set) {
                epochs << rec.epoch_id << ",0," << rec.sky.size() << ',' << num(pfa_sample) << ",,," << status
                       << '\n';
                unusable.push_back(Json{{"epoch_id", rec.epoch_id}, {"status", status}});
                continue;
            }
            ++usable;
            IntegrityOutput out = evaluate_integrity(*set, *budget, cfg);

            std::optional<std::vector<double>> separations;
            if (measurements) {
                const auto it = measurements->find(rec.epoch_id);
                if (it != measurements->end()) {
                    Eigen::VectorXd rho(static_cast<Eigen::Index>(rec.geometry->size()));
                    for (std::size_t i = 0; i < rec.geometry->size(); ++i) {
                        const auto& sat = rec.geometry->sat_ids()[i];
                        const auto m = it->second.find(sat);
                        if (m == it->second.end()) {
                            throw ConfigError("epoch " + rec.epoch_id + " lacks a measurement for " + sat);
                        }
                        rho(static_cast<Eigen::Index>(i)) = m->second;
                    }
                    separations = vertical_separations(*set, rho);
                    std::vector<double> thresholds;
                    for (const auto& s : out.subs) {
                        thresholds.push_back(s.d_v);
                    }
                    out.alert = detect(*separations, thresholds);
                    alerts += out.alert ? 1 : 0;
                }
            }

            epochs << rec.epoch_id << ",1," << rec.geometry->size() << ',' << num(pfa_sample) << ','
                   << num(out.vpl) << ',' << (separations ? (out.alert ? "1" : "0") : "") << ",ok\n";
            for (std::size_t n = 0; n < out.subs.size(); ++n) {
                const auto& s = out.subs[n];
                subs << rec.epoch_id << ',' << rec.geometry->sat_ids()[s.excluded] << ',' << num(s.d_v) << ','
                     << num(s.db_v) << ',' << num(s.a_v) << ',' << num(s.ab_v) << ',' << num(s.vpl) << ','
                     << (separations ? num((*separations)[n]) : "") << '\n';
            }
        }

        Json summary;
        summary["manifest"] = man;
        summary["pfa_sample"] = pfa_sample;
        summary["epochs"] = records.size();
        summary["usable_epochs"] = usable;
        summary["alerts"] = measurements ? Json(alerts) : Json(nullptr);
        summary["unusable"] = unusable;
        write_json(with_suffix(opts.common.out, ".json"), summary);
        return kExitOk;
    });
}

int run_sweep(const SweepOptions& opts, std::ostream& err) {
    return guarded(err, [&] {
        require_out(opts.common);
        if (opts.epochs == 0) {
            throw ConfigError("--epochs must be positive");
        }
        const BudgetConfig budget_cfg = budget_from(opts.integrity);
        const double mask = opts.mask.value_or(budget_cfg.mask_angle_deg);

        std::vector<PfaMode> modes{PfaMode::CorrCommon};
        if (opts.integrity.c_corr) {
            modes.push_back(PfaMode::Cond);
        }
        modes.push_back(PfaMode::White);
        std::vector<IntegrityConfig> configs;
        for (auto m : modes) {
            configs.push_back(integrity_config(opts.integrity, m));
        }

        // vpl[e][m]; NaN marks a singular epoch.
        const auto n_epochs = static_cast<std::size_t>(opts.epochs);
        std::vector<std::vector<double>> vpl(n_epochs, std::vector<double>(modes.size(), 0.0));
        parallel_for_batches(n_epochs, opts.common.threads, [&](std::size_t e) {
            const auto seed = rng::stream_key(opts.seed, rng::StreamPurpose::Constellation, e);
            try {
                const GeometryEpoch geom = synth_constellation(seed, opts.sats, mask);
                const ErrorBudget budget = apply_budget(budget_cfg, geom);
                const SolutionSet set = build_solution_set(geom, budget);
                for (std::size_t m = 0; m < modes.size(); ++m) {
                    vpl[e][m] = evaluate_integrity(set, budget, configs[m]).vpl;
                }
            } catch (const SingularGeometryError&) {
                std::fill(vpl[e].begin(), vpl[e].end(), std::numeric_limits<double>::quiet_NaN());
            }
        });

        std::vector<std::vector<double>> per_mode(modes.size());
        std::size_t singular = 0;
        for (const auto& row : vpl) {
            if (std::isnan(row[0])) {
                ++singular;
                continue;
            }
            for (std::size_t m = 0; m < modes.size(); ++m) {
                per_mode[m].push_back(row[m]);
            }
        }
        if (per_mode[0].empty()) {
            throw NumericalError("every synthesized epoch was singular");
        }

        Json params = integrity_parameters(opts.integrity);
        params["epochs"] = opts.epochs;
        params["seed"] = opts.seed;
        params["sats"] = opts.sats;
        params["mask_deg"] = mask;
        const Json man = manifest("sweep", opts.common, params);

        // Reference point: the 99% VPL of the common-approach allocation.
        const double common_vpl99 = availability_stats(per_mode[0], opts.integrity.val).vpl_at_99pct;

        auto csv = open_csv(with_suffix(opts.common.out, ".csv"), man,
                            "mode,pfa_sample,min_vpl_m,max_vpl_m,mean_vpl_m,vpl99_m,availability_at_val,"
                            "availability_at_common_vpl99");
        Json rows = Json::array();
        for (std::size_t m = 0; m < modes.size(); ++m) {
            const auto& v = per_mode[m];
            const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
            double sum = 0.0;
            for (double x : v) {
                sum += x;
            }
            const double mean = sum / static_cast<double>(v.size());
            const AvailabilityStats at_val = availability_stats(v, opts.integrity.val);
            const AvailabilityStats at_ref = availability_stats(v, common_vpl99);
            const double pfa = pfa_per_sample(configs[m]);
            csv << to_string(modes[m]) << ',' << num(pfa) << ',' << num(*lo) << ',' << num(*hi) << ','
                << num(mean) << ',' << num(at_val.vpl_at_99pct) << ',' << num(at_val.availability) << ','
                << num(at_ref.availability) << '\n';
            rows.push_back(Json{{"mode", to_string(modes[m])},
                                {"pfa_sample", pfa},
                                {"min_vpl_m", *lo},
                                {"max_vpl_m", *hi},
                                {"mean_vpl_m", mean},
                                {"vpl99_m", at_val.vpl_at_99pct},
                                {"availability_at_val", at_val.availability},
                                {"availability_at_common_vpl99", at_ref.availability}});
        }

        auto per_epoch = open_csv(with_suffix(opts.common.out, "_epochs.csv"), man, [&] {
            std::string h = "epoch";
            for (auto m : modes) {
                h += ",vpl_" + std::string(to_string(m)) + "_m";
            }
            return h;
        }());
        for (std::size_t e = 0; e < n_epochs; ++e) {
            per_epoch << e;
            for (double x : vpl[e]) {
                per_epoch << ',' << num(x);
            }
            per_epoch << '\n';
        }

        Json summary;
        summary["manifest"] = man;
        summary["epochs"] = n_epochs;
        summary["singular_epochs"] = singular;
        summary["common_vpl99_m"] = common_vpl99;
        summary["modes"] = rows;
        write_json(with_suffix(opts.common.out, ".json"), summary);
        return kExitOk;
    });
}

int run_simulate(const SimulateOptions& opts, std::ostream& err) {
    if (opts.windows == 0) {
        err << "error: --windows must be positive\n";
        return kExitUsage;
    }
    return guarded(err, [&] {
        require_out(opts.common);
        const BudgetConfig budget_cfg = budget_from(opts.integrity);
        const IntegrityConfig cfg = integrity_config(opts.integrity, parse_pfa_mode(opts.integrity.pfa_mode));
        const auto records = load_geometry(opts.geometry, budget_cfg.mask_angle_deg);

        const EpochRecord* chosen = nullptr;
        for (const auto& rec : records) {
            if (opts.epoch ? rec.epoch_id == *opts.epoch : rec.usable()) {
                chosen = &rec;
                break;
            }
        }
        if (chosen == nullptr) {
            throw ConfigError(opts.epoch ? "epoch " + *opts.epoch + " not found" : "no usable epoch in geometry");
        }
        if (!chosen->usable()) {
            throw SingularGeometryError("epoch " + chosen->epoch_id + " unusable: " + chosen->status);
        }

        std::optional<GmParams> gm;
        if (opts.tau && *opts.tau > 0.0) {
            gm = gm_params(*opts.tau, opts.integrity.dt, 1.0);
        }
        const ErrorBudget budget = apply_budget(budget_cfg, *chosen->geometry);
        SimulationOptions sim;
        sim.windows_per_batch = opts.batch;
        sim.threads = opts.common.threads;
        sim.noise_scale = opts.noise_scale;
        sim.confidence = opts.confidence;
        const FalseAlertReport r =
            simulate_false_alerts(*chosen->geometry, budget, gm, cfg, opts.windows, opts.seed, sim);

        Json params = integrity_parameters(opts.integrity);
        params["geometry"] = opts.geometry.string();
        params["epoch"] = chosen->epoch_id;
        params["tau_s"] = gm ? Json(gm->tau) : Json(nullptr);
        params["windows"] = opts.windows;
        params["seed"] = opts.seed;
        params["batch"] = opts.batch;
        params["confidence"] = opts.confidence;
        params["noise_scale"] = opts.noise_scale;
        const Json man = manifest("simulate", opts.common, params);

        auto csv = open_csv(with_suffix(opts.common.out, ".csv"), man,
                            "windows,alert_windows,rate,ci_low,ci_high,half_width,confidence,pfa_total,pfa_sample");
        csv << r.windows << ',' << r.alert_windows << ',' << num(r.rate) << ',' << num(r.ci_low) << ','
            << num(r.ci_high) << ',' << num(r.half_width) << ',' << num(r.confidence) << ',' << num(r.pfa_total)
            << ',' << num(r.pfa_sample) << '\n';

        Json summary;
        summary["manifest"] = man;
        summary["noise"] = gm ? "gauss-markov" : "white";
        summary["a"] = gm ? gm->a : 0.0;
        summary["samples_per_window"] = r.samples_per_window;
        summary["windows"] = r.windows;
        summary["alert_windows"] = r.alert_windows;
        summary["rate"] = r.rate;
        summary["ci_low"] = r.ci_low;
        summary["ci_high"] = r.ci_high;
        summary["half_width"] = r.half_width;
        summary["confidence"] = r.confidence;
        summary["pfa_total"] = r.pfa_total;
        summary["pfa_sample"] = r.pfa_sample;
        summary["ci_covers_pfa_total"] = r.ci_low <= r.pfa_total && r.pfa_total <= r.ci_high;
        write_json(with_suffix(opts.common.out, ".json"), summary);
        return kExitOk;
    });
}

int run_validate(const ValidateOptions& opts, std::ostream& err) {
    return guarded(err, [&] {
        require_out(opts.common);
        const std::vector<double> coefficients{0.0, 0.5, 0.82, 0.99};
        const std::vector<double> pouts{0.1, 1e-2, 1e-3};

        Json params;
        params["samples"] = opts.samples;
        params["batch"] = opts.batch;
        params["seed"] = opts.seed;
        const Json man = manifest("validate", opts.common, params);
        auto csv = open_csv(with_suffix(opts.common.out, ".csv"), man,
                            "a,p_out_0,analytic,monte_carlo,std_error,z,pdf_mass_error,pass");

        bool all_pass = true;
        Json rows = Json::array();
        for (double a : coefficients) {
            // Unit stationary variance.
            const GmParams gm = gm_from_coefficient(a, 1.0 - a * a);
            for (double p0 : pouts) {
                const double q = quantile_bound(p0, gm.p_x);
                const double analytic = pout1_analytic(gm, q, p0);

                auto pdf = [&](double x) { return conditional_pdf_k1(x, gm, q, p0); };
                using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
                const double inf = std::numeric_limits<double>::infinity();
                const double mass = 2.0 * (Quad::integrate(pdf, 0.0, q, 20, 1e-13) +
                                           Quad::integrate(pdf, q, inf, 20, 1e-13));
                const double mass_error = std::abs(mass - 1.0);

                const PfaSeries series =
                    mc_conditional_pout(gm, p0, 1, opts.samples, opts.seed, McOptions{opts.batch, opts.common.threads});
                const double mc = series.step(1).p_out;
                const double se =
                    std::sqrt(analytic * (1.0 - analytic) / static_cast<double>(series.initial_survivors));
                const double z = (mc - analytic) / se;
                const bool pass = std::abs(z) <= 3.0 && mass_error <= 1e-8;
                all_pass = all_pass && pass;
                csv << num(a) << ',' << num(p0) << ',' << num(analytic) << ',' << num(mc) << ',' << num(se) << ','
                    << num(z) << ',' << num(mass_error) << ',' << (pass ? 1 : 0) << '\n';
                rows.push_back(Json{{"a", a}, {"p_out_0", p0}, {"analytic", analytic}, {"monte_carlo", mc},
                                    {"std_error", se}, {"z", z}, {"pdf_mass_error", mass_error}, {"pass", pass}});
            }
        }

        Json summary;
        summary["manifest"] = man;
        summary["all_pass"] = all_pass;
        summary["cases"] = rows;
        write_json(with_suffix(opts.common.out, ".json"), summary);
        if (!all_pass) {
            err << "validate: analytic and Monte-Carlo estimates disagree\n";
            return kExitNumerical;
        }
        return kExitOk;
    });
}

}  // namespace araim::cli
