#include "araim/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "araim/error.hpp"
#include "araim/rng.hpp"

namespace araim {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kElevationSlack = 1e-9;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) {
            return parts;
        }
        start = pos + 1;
    }
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

double require_double(std::string_view s, const char* field, std::size_t line) {
    double v = 0.0;
    if (!parse_double(s, v)) {
        throw ParseError(std::string("invalid ") + field + " '" + std::string(s) + "'", line);
    }
    return v;
}

bool is_skippable(std::string_view line) {
    line = trim(line);
    return line.empty() || line.front() == '#';
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open " + path.string());
    }
    return in;
}

ElevationTable parse_table(std::string_view value, std::size_t line) {
    std::vector<std::pair<double, double>> knots;
    for (auto entry : split(value, ',')) {
        const auto parts = split(entry, ':');
        if (parts.size() != 2) {
            throw ParseError("table entries must be elevation_deg:sigma_m", line);
        }
        knots.emplace_back(require_double(parts[0], "elevation", line), require_double(parts[1], "sigma", line));
    }
    try {
        return ElevationTable(std::move(knots));
    } catch (const ConfigError& e) {
        throw ParseError(e.what(), line);
    }
}

std::string format_table(const ElevationTable& table) {
    std::ostringstream os;
    os << std::setprecision(17);
    bool first = true;
    for (const auto& [el, sigma] : table.knots()) {
        os << (first ? "" : ", ") << el << ':' << sigma;
        first = false;
    }
    return os.str();
}

}  // namespace

Eigen::Vector3d los_from_sky(double elevation_deg, double azimuth_deg) {
    const double el = elevation_deg * kDegToRad;
    const double az = azimuth_deg * kDegToRad;
    return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), -std::sin(el)};
}

GeometryEpoch geometry_from_sky(const std::vector<SkyPoint>& sky) {
    std::vector<std::string> ids;
    std::vector<Eigen::Vector3d> los;
    ids.reserve(sky.size());
    los.reserve(sky.size());
    for (const auto& p : sky) {
        ids.push_back(p.sat_id);
        los.push_back(los_from_sky(p.elevation_deg, p.azimuth_deg));
    }
    return GeometryEpoch(std::move(ids), std::move(los));
}

std::vector<EpochRecord> parse_geometry(std::istream& in, double mask_angle_deg) {
    std::vector<EpochRecord> records;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::set<std::string>> seen;

    std::string raw;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, raw)) {
        ++line_no;
        if (is_skippable(raw)) {
            continue;
        }
        const auto fields = split(raw, ',');
        if (!header_seen) {
            header_seen = true;
            if (fields.size() == 4 && fields[0] == "epoch_id") {
                continue;
            }
            throw ParseError("expected header epoch_id,sat_id,elevation_deg,azimuth_deg", line_no);
        }
        if (fields.size() != 4) {
            throw ParseError("expected 4 fields, found " + std::to_string(fields.size()), line_no);
        }
        if (fields[0].empty() || fields[1].empty()) {
            throw ParseError("empty epoch or satellite id", line_no);
        }
        const double el = require_double(fields[2], "elevation", line_no);
        const double az = require_double(fields[3], "azimuth", line_no);
        if (el < -90.0 || el > 90.0) {
            throw ParseError("elevation outside [-90, 90]", line_no);
        }
        if (az < 0.0 || az >= 360.0) {
            throw ParseError("azimuth outside [0, 360)", line_no);
        }

        const std::string epoch(fields[0]);
        auto [it, inserted] = index.try_emplace(epoch, records.size());
        if (inserted) {
            records.push_back(EpochRecord{epoch, {}, std::nullopt, "ok"});
            seen.emplace_back();
        }
        const std::string sat(fields[1]);
        if (!seen[it->second].insert(sat).second) {
            throw ParseError("satellite " + sat + " repeated in epoch " + epoch, line_no);
        }
        if (el >= mask_angle_deg) {
            records[it->second].sky.push_back(SkyPoint{sat, el, az});
        }
    }

    for (auto& rec : records) {
        if (rec.sky.size() < 4) {
            rec.status = "fewer than 4 satellites above mask";
            continue;
        }
        try {
            rec.geometry = geometry_from_sky(rec.sky);
        } catch (const SingularGeometryError& e) {
            rec.status = e.what();
        }
    }
    return records;
}

std::vector<EpochRecord> load_geometry(const std::filesystem::path& path, double mask_angle_deg) {
    auto in = open_input(path);
    return parse_geometry(in, mask_angle_deg);
}

void write_geometry(std::ostream& out, const std::vector<EpochRecord>& records) {
    out << "epoch_id,sat_id,elevation_deg,azimuth_deg\n";
    out << std::fixed << std::setprecision(10);
    for (const auto& rec : records) {
        for (const auto& p : rec.sky) {
            out << rec.epoch_id << ',' << p.sat_id << ',' << p.elevation_deg << ',' << p.azimuth_deg << '\n';
        }
    }
}

std::vector<SkyPoint> synth_sky(std::uint64_t seed, std::size_t n_sats, double mask_angle_deg) {
    if (n_sats < 4) {
        throw DomainError("synth_sky: at least 4 satellites required");
    }
    if (!(mask_angle_deg >= 0.0 && mask_angle_deg < 90.0)) {
        throw DomainError("synth_sky: mask angle must lie in [0, 90)");
    }
    auto engine = rng::make_stream(seed, rng::StreamPurpose::Constellation, 0);
    const double sin_mask = std::sin(mask_angle_deg * kDegToRad);
    std::vector<SkyPoint> sky;
    sky.reserve(n_sats);
    for (std::size_t i = 0; i < n_sats; ++i) {
        const double az = 360.0 * rng::uniform01(engine);
        // Inverse CDF of a cos(el) density on [mask, 90].
        const double u = rng::uniform01(engine);
        double el = std::asin(sin_mask + u * (1.0 - sin_mask)) / kDegToRad;
        el = std::clamp(el, mask_angle_deg, 90.0);
        std::ostringstream id;
        id << 'S' << std::setw(2) << std::setfill('0') << (i + 1);
        sky.push_back(SkyPoint{id.str(), el, az});
    }
    return sky;
}

GeometryEpoch synth_constellation(std::uint64_t seed, std::size_t n_sats, double mask_angle_deg) {
    return geometry_from_sky(synth_sky(seed, n_sats, mask_angle_deg));
}

ElevationTable::ElevationTable(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots)) {
    if (knots_.empty()) {
        throw ConfigError("elevation table is empty");
    }
    std::sort(knots_.begin(), knots_.end());
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        if (!(knots_[i].second > 0.0)) {
            throw ConfigError("elevation table sigmas must be positive");
        }
        if (i > 0 && knots_[i].first == knots_[i - 1].first) {
            throw ConfigError("elevation table has duplicate elevations");
        }
    }
}

double ElevationTable::min_elevation() const {
    if (knots_.empty()) {
        throw ConfigError("elevation table is empty");
    }
    return knots_.front().first;
}

double ElevationTable::max_elevation() const {
    if (knots_.empty()) {
        throw ConfigError("elevation table is empty");
    }
    return knots_.back().first;
}

double ElevationTable::at(double elevation_deg) const {
    if (elevation_deg < min_elevation() - kElevationSlack || elevation_deg > max_elevation() + kElevationSlack) {
        throw ConfigError("elevation " + std::to_string(elevation_deg) + " deg outside budget table");
    }
    if (knots_.size() == 1 || elevation_deg <= knots_.front().first) {
        return knots_.front().second;
    }
    if (elevation_deg >= knots_.back().first) {
        return knots_.back().second;
    }
    const auto upper = std::upper_bound(knots_.begin(), knots_.end(), elevation_deg,
                                        [](double e, const auto& knot) { return e < knot.first; });
    const auto lower = upper - 1;
    const double t = (elevation_deg - lower->first) / (upper->first - lower->first);
    return lower->second + t * (upper->second - lower->second);
}

void BudgetConfig::validate() const {
    for (const ElevationTable* table : {&sigma_cont, &sigma_int}) {
        if (table->min_elevation() > mask_angle_deg + kElevationSlack || table->max_elevation() < 90.0 - kElevationSlack) {
            throw ConfigError("budget tables must cover [mask angle, 90] deg");
        }
    }
    if (!(b_nom >= 0.0) || !(b_max >= 0.0)) {
        throw ConfigError("budget biases must be non-negative");
    }
    if (!(mask_angle_deg >= -90.0 && mask_angle_deg < 90.0)) {
        throw ConfigError("mask angle must lie in [-90, 90)");
    }
}

BudgetConfig parse_budget(std::istream& in) {
    std::map<std::string, std::pair<std::string, std::size_t>> values;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        if (trim(line).empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("expected key = value", line_no);
        }
        const std::string key(trim(line.substr(0, eq)));
        static const std::set<std::string> known{"mask_angle_deg", "b_nom_m", "b_max_m", "sigma_cont_m",
                                                 "sigma_int_m"};
        if (!known.contains(key)) {
            throw ParseError("unknown key '" + key + "'", line_no);
        }
        if (!values.try_emplace(key, std::string(trim(line.substr(eq + 1))), line_no).second) {
            throw ParseError("duplicate key '" + key + "'", line_no);
        }
    }

    auto get = [&](const char* key) -> const std::pair<std::string, std::size_t>& {
        const auto it = values.find(key);
        if (it == values.end()) {
            throw ConfigError(std::string("budget file lacks '") + key + "'");
        }
        return it->second;
    };

    BudgetConfig cfg;
    const auto& mask = get("mask_angle_deg");
    cfg.mask_angle_deg = require_double(mask.first, "mask angle", mask.second);
    const auto& bn = get("b_nom_m");
    cfg.b_nom = require_double(bn.first, "b_nom", bn.second);
    const auto& bm = get("b_max_m");
    cfg.b_max = require_double(bm.first, "b_max", bm.second);
    const auto& sc = get("sigma_cont_m");
    cfg.sigma_cont = parse_table(sc.first, sc.second);
    const auto& si = get("sigma_int_m");
    cfg.sigma_int = parse_table(si.first, si.second);
    cfg.validate();
    return cfg;
}

BudgetConfig load_budget(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_budget(in);
}

void write_budget(std::ostream& out, const BudgetConfig& cfg) {
    out << std::setprecision(17);
    out << "mask_angle_deg = " << cfg.mask_angle_deg << '\n';
    out << "b_nom_m = " << cfg.b_nom << '\n';
    out << "b_max_m = " << cfg.b_max << '\n';
    out << "sigma_cont_m = " << format_table(cfg.sigma_cont) << '\n';
    out << "sigma_int_m = " << format_table(cfg.sigma_int) << '\n';
}

BudgetConfig default_budget_config() {
    BudgetConfig cfg;
    cfg.mask_angle_deg = 5.0;
    cfg.b_nom = 0.1;
    cfg.b_max = 0.75;
    cfg.sigma_cont = ElevationTable({{5.0, 2.40}, {10.0, 1.60}, {15.0, 1.25}, {20.0, 1.05}, {30.0, 0.90},
                                     {45.0, 0.80}, {60.0, 0.77}, {90.0, 0.75}});
    cfg.sigma_int = ElevationTable({{5.0, 4.20}, {10.0, 2.90}, {15.0, 2.25}, {20.0, 1.90}, {30.0, 1.65},
                                    {45.0, 1.50}, {60.0, 1.44}, {90.0, 1.40}});
    return cfg;
}

ErrorBudget apply_budget(const BudgetConfig& cfg, const GeometryEpoch& geom) {
    const auto n = static_cast<Eigen::Index>(geom.size());
    ErrorBudget budget{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd::Constant(n, cfg.b_nom),
                       Eigen::VectorXd::Constant(n, cfg.b_max)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const double el = geom.elevation_deg(static_cast<std::size_t>(i));
        budget.sigma_cont(i) = cfg.sigma_cont.at(el);
        budget.sigma_int(i) = cfg.sigma_int.at(el);
    }
    try {
        budget.validate(geom.size());
    } catch (const DomainError& e) {
        throw ConfigError(std::string("budget tables produce an invalid error budget: ") + e.what());
    }
    return budget;
}

}  // namespace araim
