#include "svx/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "svx/error.hpp"
#include "svx/video_io.hpp"

namespace svx {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::vector<MatchResult> match_records(std::span<const StoredRecord> records, const StudyDataset& dataset) {
    std::vector<MatchResult> out;
    out.reserve(records.size());
    for (const auto& stored : records) {
        const auto truth = lookup_truth(dataset, stored.record.video_id);
        if (!truth) {
            throw ValidationError("record " + std::to_string(stored.record_id) + " names unknown video '" +
                                  stored.record.video_id + "'");
        }
        MatchResult m;
        m.record_id = stored.record_id;
        m.truth = *truth;
        m.record = stored.record;
        m.actor_match = stored.record.actor_choice == truth->actor;
        m.action_match = stored.record.action_choice == truth->action;
        out.push_back(std::move(m));
    }
    return out;
}

namespace {

std::vector<std::string> class_names(Dimension dimension) {
    std::vector<std::string> names;
    if (dimension == Dimension::actor) {
        for (Actor a : kActors) names.emplace_back(to_string(a));
    } else {
        for (Action a : kActions) names.emplace_back(to_string(a));
    }
    return names;
}

bool is_match(const MatchResult& m, Dimension dimension) {
    return dimension == Dimension::actor ? m.actor_match : m.action_match;
}

std::string stratum_value(const MatchResult& m, Stratum by) {
    switch (by) {
        case Stratum::level: return std::string(to_string(m.truth.level));
        case Stratum::actor: return std::string(to_string(m.truth.actor));
        case Stratum::background: return std::string(to_string(m.truth.background));
        case Stratum::action: return std::string(to_string(m.truth.action));
    }
    return {};
}

std::vector<std::string> stratum_values(Stratum by) {
    std::vector<std::string> values;
    switch (by) {
        case Stratum::level:
            for (LevelPreset l : kStudyLevels) values.emplace_back(to_string(l));
            break;
        case Stratum::actor:
            for (Actor a : kActors) values.emplace_back(to_string(a));
            break;
        case Stratum::background:
            for (Background b : kBackgrounds) values.emplace_back(to_string(b));
            break;
        case Stratum::action:
            for (Action a : kActions) values.emplace_back(to_string(a));
            break;
    }
    return values;
}

}  // namespace

ConfusionMatrix confusion(std::span<const MatchResult> matches, Dimension dimension) {
    std::vector<std::string> rows = class_names(dimension);
    std::vector<std::string> columns = {"unknown"};
    columns.insert(columns.end(), rows.begin(), rows.end());
    ConfusionMatrix matrix(rows, columns);
    for (const auto& m : matches) {
        if (dimension == Dimension::actor) {
            const auto column = m.record.actor_choice ? static_cast<std::size_t>(*m.record.actor_choice) + 1 : 0;
            matrix.add(static_cast<std::size_t>(m.truth.actor), column);
        } else {
            const auto column = m.record.action_choice ? static_cast<std::size_t>(*m.record.action_choice) + 1 : 0;
            matrix.add(static_cast<std::size_t>(m.truth.action), column);
        }
    }
    return matrix;
}

Stratum parse_stratum(std::string_view name) {
    if (name == "level") return Stratum::level;
    if (name == "actor") return Stratum::actor;
    if (name == "background") return Stratum::background;
    if (name == "action") return Stratum::action;
    throw ParameterError("unknown stratum '" + std::string(name) + "'");
}

std::string_view to_string(Stratum stratum) {
    switch (stratum) {
        case Stratum::level: return "level";
        case Stratum::actor: return "actor";
        case Stratum::background: return "background";
        case Stratum::action: return "action";
    }
    return "level";
}

std::vector<StratumRow> stratified_accuracy(std::span<const MatchResult> matches, Stratum by) {
    std::vector<StratumRow> rows;
    for (const auto& value : stratum_values(by)) {
        StratumRow row;
        row.name = value;
        for (const auto& m : matches) {
            if (stratum_value(m, by) != value) continue;
            ++row.n;
            row.actor_matches += m.actor_match ? 1 : 0;
            row.action_matches += m.action_match ? 1 : 0;
        }
        if (row.n > 0) {
            row.actor_rate = static_cast<double>(row.actor_matches) / row.n;
            row.action_rate = static_cast<double>(row.action_matches) / row.n;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

AggregateRates aggregate_rates(std::span<const MatchResult> matches) {
    AggregateRates rates;
    rates.n = matches.size();
    if (matches.empty()) return rates;
    std::size_t actor = 0;
    std::size_t action = 0;
    for (const auto& m : matches) {
        actor += m.actor_match ? 1 : 0;
        action += m.action_match ? 1 : 0;
    }
    rates.actor_rate = static_cast<double>(actor) / rates.n;
    rates.action_rate = static_cast<double>(action) / rates.n;
    return rates;
}

// ---- response-time densities -----------------------------------------------

namespace {

double quantile(const std::vector<double>& sorted, double q) {
    const double pos = q * (sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
}

}  // namespace

double silverman_bandwidth(std::span<const double> samples) {
    if (samples.empty()) throw ValidationError("bandwidth of an empty sample");
    const double n = static_cast<double>(samples.size());
    double sd = 0.0;
    double iqr = 0.0;
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    if (*lo != *hi) {
        double mean = 0.0;
        for (double s : samples) mean += s;
        mean /= n;
        double ss = 0.0;
        for (double s : samples) ss += (s - mean) * (s - mean);
        sd = std::sqrt(ss / (n - 1.0));
        std::vector<double> sorted(samples.begin(), samples.end());
        std::sort(sorted.begin(), sorted.end());
        iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
    }
    double spread = 0.0;
    if (sd > 0.0 && iqr > 0.0) {
        spread = std::min(sd, iqr / 1.34);
    } else {
        spread = std::max(sd, iqr / 1.34);
    }
    if (spread <= 0.0) return kDensityBinSeconds / 2.0;
    return 0.9 * spread * std::pow(n, -0.2);
}

DensityEstimate density_estimate(std::vector<double> samples, double max_duration) {
    if (samples.empty()) throw ValidationError("density of an empty selection");
    DensityEstimate est;
    std::sort(samples.begin(), samples.end());
    est.samples = samples;
    const double top = std::max(max_duration, samples.back());
    const int bins = std::max(1, static_cast<int>(std::ceil(top / kDensityBinSeconds - 1e-9)));
    for (int i = 0; i <= bins; ++i) est.bin_edges.push_back(i * kDensityBinSeconds);
    est.counts.assign(bins, 0);
    for (double s : samples) {
        const int b = std::clamp(static_cast<int>(std::floor(s / kDensityBinSeconds)), 0, bins - 1);
        ++est.counts[b];
    }

    est.bandwidth = silverman_bandwidth(samples);
    const double h = est.bandwidth;
    const double lo = std::min(0.0, samples.front() - 4.0 * h);
    const double hi = std::max(est.bin_edges.back(), samples.back() + 4.0 * h);
    const double norm = 1.0 / (samples.size() * h * std::sqrt(2.0 * std::numbers::pi));
    for (int i = 0; i < kDensityGridPoints; ++i) {
        const double x = lo + (hi - lo) * i / (kDensityGridPoints - 1);
        double sum = 0.0;
        for (double s : samples) {
            const double z = (x - s) / h;
            sum += std::exp(-0.5 * z * z);
        }
        est.grid.push_back(x);
        est.values.push_back(sum * norm);
    }
    return est;
}

std::vector<MatchResult> filter_matches(std::span<const MatchResult> matches, const DensityFilter& filter) {
    std::vector<MatchResult> out;
    for (const auto& m : matches) {
        if (filter.correctness != Correctness::both) {
            const bool correct = is_match(m, filter.judged_on);
            if (correct != (filter.correctness == Correctness::correct)) continue;
        }
        if (filter.stratum && stratum_value(m, *filter.stratum) != filter.stratum_value) continue;
        out.push_back(m);
    }
    return out;
}

DensityEstimate response_time_density(std::span<const MatchResult> matches, const DensityFilter& filter,
                                      double max_duration) {
    const auto selected = filter_matches(matches, filter);
    if (selected.empty()) throw ValidationError("no records match the density filter");
    std::vector<double> seconds;
    for (const auto& m : selected) seconds.push_back(m.record.response_time_ms / 1000.0);
    return density_estimate(std::move(seconds), max_duration);
}

double integrate_density(const DensityEstimate& estimate) {
    double area = 0.0;
    for (std::size_t i = 1; i < estimate.grid.size(); ++i) {
        area += 0.5 * (estimate.values[i] + estimate.values[i - 1]) * (estimate.grid[i] - estimate.grid[i - 1]);
    }
    return area;
}

// ---- report output -------------------------------------------------------

std::string confusion_text(const ConfusionMatrix& matrix) {
    std::size_t width = 8;
    for (const auto& name : matrix.rows) width = std::max(width, name.size() + 2);
    for (const auto& name : matrix.columns) width = std::max(width, name.size() + 2);
    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(width)) << "truth";
    for (const auto& c : matrix.columns) out << std::right << std::setw(static_cast<int>(width)) << c;
    out << std::right << std::setw(static_cast<int>(width)) << "n" << '\n';
    const auto rates = matrix.rates();
    for (std::size_t r = 0; r < matrix.rows.size(); ++r) {
        out << std::left << std::setw(static_cast<int>(width)) << matrix.rows[r] << std::right << std::fixed
            << std::setprecision(2);
        for (double rate : rates[r]) out << std::setw(static_cast<int>(width)) << round_to(rate, 2);
        out << std::setw(static_cast<int>(width)) << matrix.row_total(r) << '\n';
    }
    return out.str();
}

std::string confusion_json(const ConfusionMatrix& matrix) {
    ordered_json j;
    j["rows"] = matrix.rows;
    j["columns"] = matrix.columns;
    j["counts"] = matrix.counts;
    const auto rates = matrix.rates();
    j["rates"] = rates;
    auto rounded = rates;
    for (auto& row : rounded)
        for (double& v : row) v = round_to(v, 2);
    j["rates_rounded"] = rounded;
    return j.dump(2);
}

std::string strata_text(std::span<const StratumRow> rows) {
    std::ostringstream out;
    out << std::left << std::setw(12) << "stratum" << std::right << std::setw(8) << "n" << std::setw(10) << "actor"
        << std::setw(10) << "action" << '\n';
    for (const auto& row : rows) {
        out << std::left << std::setw(12) << row.name << std::right << std::setw(8) << row.n << std::fixed
            << std::setprecision(2);
        if (row.actor_rate) {
            out << std::setw(10) << round_to(*row.actor_rate, 2) << std::setw(10) << round_to(*row.action_rate, 2);
        } else {
            out << std::setw(10) << "-" << std::setw(10) << "-";
        }
        out << '\n';
    }
    return out.str();
}

std::string strata_json(std::span<const StratumRow> rows) {
    ordered_json j = ordered_json::array();
    for (const auto& row : rows) {
        ordered_json r;
        r["stratum"] = row.name;
        r["n"] = row.n;
        r["actor_matches"] = row.actor_matches;
        r["action_matches"] = row.action_matches;
        r["actor_rate"] = row.actor_rate ? ordered_json(*row.actor_rate) : ordered_json(nullptr);
        r["action_rate"] = row.action_rate ? ordered_json(*row.action_rate) : ordered_json(nullptr);
        j.push_back(r);
    }
    return j.dump(2);
}

std::string density_csv(const DensityEstimate& estimate) {
    std::ostringstream out;
    out.precision(10);
    out << "# bandwidth " << estimate.bandwidth << " s, " << estimate.samples.size() << " samples\n";
    out << "kind,x,value\n";
    for (std::size_t i = 0; i < estimate.counts.size(); ++i) {
        out << "bin," << estimate.bin_edges[i] << ',' << estimate.counts[i] << '\n';
    }
    for (std::size_t i = 0; i < estimate.grid.size(); ++i) {
        out << "kde," << estimate.grid[i] << ',' << estimate.values[i] << '\n';
    }
    return out.str();
}

void render_density_plot(const DensityEstimate& estimate, const fs::path& path, int width, int height) {
    if (width < 8 || height < 8) throw ParameterError("plot too small");
    std::vector<Rgb> pixels(static_cast<std::size_t>(width) * height, Rgb{255, 255, 255});
    const double x_lo = estimate.grid.front();
    const double x_hi = estimate.grid.back();
    const double n = static_cast<double>(estimate.samples.size());
    double y_hi = *std::max_element(estimate.values.begin(), estimate.values.end());
    for (auto c : estimate.counts) y_hi = std::max(y_hi, c / (n * kDensityBinSeconds));
    y_hi *= 1.05;
    auto px = [&](double x) { return static_cast<int>(std::lround((x - x_lo) / (x_hi - x_lo) * (width - 1))); };
    auto py = [&](double y) { return height - 1 - static_cast<int>(std::lround(y / y_hi * (height - 1))); };
    auto put = [&](int x, int y, Rgb c) {
        if (x >= 0 && y >= 0 && x < width && y < height) pixels[static_cast<std::size_t>(y) * width + x] = c;
    };

    for (std::size_t b = 0; b < estimate.counts.size(); ++b) {
        const int x0 = px(estimate.bin_edges[b]);
        const int x1 = px(estimate.bin_edges[b + 1]);
        const int top = py(estimate.counts[b] / (n * kDensityBinSeconds));
        for (int x = x0; x < x1; ++x)
            for (int y = top; y < height; ++y) put(x, y, x == x0 ? Rgb{40, 60, 160} : Rgb{120, 150, 230});
    }
    for (int x = 0; x < width; ++x) put(x, height - 1, Rgb{0, 0, 0});
    for (std::size_t i = 1; i < estimate.grid.size(); ++i) {
        const int xa = px(estimate.grid[i - 1]), ya = py(estimate.values[i - 1]);
        const int xb = px(estimate.grid[i]), yb = py(estimate.values[i]);
        const int steps = std::max({std::abs(xb - xa), std::abs(yb - ya), 1});
        for (int s = 0; s <= steps; ++s) {
            const int x = xa + (xb - xa) * s / steps;
            const int y = ya + (yb - ya) * s / steps;
            put(x, y, Rgb{220, 30, 30});
            put(x, y + 1, Rgb{220, 30, 30});
        }
    }
    write_ppm(path, pixels, width, height);
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IngestError("cannot write " + path.string());
    out << text;
}

void write_density(const fs::path& dir, const std::string& name, std::span<const MatchResult> matches,
                   const DensityFilter& filter, double max_seconds) {
    if (filter_matches(matches, filter).empty()) return;
    const auto est = response_time_density(matches, filter, max_seconds);
    write_text(dir / (name + ".csv"), density_csv(est));
    render_density_plot(est, dir / (name + ".ppm"));
}

}  // namespace

void write_analysis(std::span<const StoredRecord> records, const StudyDataset& dataset, const fs::path& out_dir) {
    const auto matches = match_records(records, dataset);
    fs::create_directories(out_dir / "density");

    for (Dimension d : {Dimension::actor, Dimension::action}) {
        const std::string name = d == Dimension::actor ? "actor" : "action";
        const auto matrix = confusion(matches, d);
        write_text(out_dir / ("confusion_" + name + ".txt"), confusion_text(matrix));
        write_text(out_dir / ("confusion_" + name + ".json"), confusion_json(matrix) + "\n");
    }
    for (Stratum s : {Stratum::level, Stratum::actor, Stratum::background, Stratum::action}) {
        const auto rows = stratified_accuracy(matches, s);
        const std::string name(to_string(s));
        write_text(out_dir / ("strata_" + name + ".txt"), strata_text(rows));
        write_text(out_dir / ("strata_" + name + ".json"), strata_json(rows) + "\n");
    }
    const auto agg = aggregate_rates(matches);
    ordered_json summary;
    summary["records"] = agg.n;
    summary["actor_rate"] = agg.actor_rate;
    summary["action_rate"] = agg.action_rate;
    summary["actor_rate_rounded"] = round_to(agg.actor_rate, 2);
    summary["action_rate_rounded"] = round_to(agg.action_rate, 3);
    write_text(out_dir / "summary.json", summary.dump(2) + "\n");

    if (matches.empty()) return;
    double max_seconds = 0.0;
    for (const auto& v : dataset.videos) {
        max_seconds = std::max(max_seconds, StudyDataset::half_rate_duration_ms(v) / 1000.0);
    }
    const fs::path dir = out_dir / "density";
    write_density(dir, "all", matches, {}, max_seconds);
    for (Dimension d : {Dimension::actor, Dimension::action}) {
        const std::string name = d == Dimension::actor ? "actor" : "action";
        write_density(dir, name + "_correct", matches, {Correctness::correct, d, std::nullopt, {}}, max_seconds);
        write_density(dir, name + "_incorrect", matches, {Correctness::incorrect, d, std::nullopt, {}}, max_seconds);
    }
    for (Stratum s : {Stratum::level, Stratum::actor, Stratum::background, Stratum::action}) {
        for (const auto& value : stratum_values(s)) {
            write_density(dir, std::string(to_string(s)) + "_" + value, matches,
                          {Correctness::both, Dimension::action, s, value}, max_seconds);
        }
    }
}

}  // namespace svx
