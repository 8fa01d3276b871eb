#include "svx/recognition.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "svx/error.hpp"

namespace svx {
namespace fs = std::filesystem;

// ---- descriptor text -----------------------------------------------------

std::vector<LabeledDescriptor> read_descriptor_text(std::istream& in) {
    std::vector<LabeledDescriptor> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        LabeledDescriptor row;
        std::string actor, action, background;
        if (!(fields >> row.video_id) || row.video_id.front() == '#') continue;
        if (!(fields >> actor >> action >> background >> row.level)) {
            throw IngestError("descriptor line " + std::to_string(line_no) + ": missing label fields");
        }
        row.actor = parse_actor(actor);
        row.action = parse_action(action);
        row.background = parse_background(background);
        std::string token;
        while (fields >> token) {
            try {
                row.vector.push_back(std::stod(token));
            } catch (const std::exception&) {
                throw IngestError("descriptor line " + std::to_string(line_no) + ": bad value '" + token + "'");
            }
        }
        if (!rows.empty() && rows.front().vector.size() != row.vector.size()) {
            throw IngestError("descriptor line " + std::to_string(line_no) + ": dimension " +
                              std::to_string(row.vector.size()) + " differs from " +
                              std::to_string(rows.front().vector.size()));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<LabeledDescriptor> read_descriptor_text(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open " + path.string());
    return read_descriptor_text(in);
}

namespace {

void write_row(std::ostream& out, const LabeledDescriptor& row) {
    out << row.video_id << ' ' << to_string(row.actor) << ' ' << to_string(row.action) << ' '
        << to_string(row.background) << ' ' << row.level;
    out.precision(17);
    for (double v : row.vector) out << ' ' << v;
    out << '\n';
}

}  // namespace

void write_descriptor_text(std::ostream& out, std::span<const LabeledDescriptor> rows) {
    for (const auto& row : rows) write_row(out, row);
}

void append_descriptor_text(const fs::path& path, const LabeledDescriptor& row) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw IngestError("cannot append to " + path.string());
    write_row(out, row);
}

// ---- k-means / bag of words ----------------------------------------------

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

double unit_random(std::mt19937_64& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace

Codebook kmeans_codebook(std::span<const FeatureVector> samples, std::size_t k, std::uint64_t seed,
                         int max_iterations) {
    if (k == 0) throw ParameterError("codebook needs at least one word");
    if (samples.size() < k) {
        throw ParameterError("k-means needs at least k samples (" + std::to_string(samples.size()) +
                             " < " + std::to_string(k) + ")");
    }
    const std::size_t dim = samples.front().size();
    for (const auto& s : samples) {
        if (s.size() != dim) throw ParameterError("k-means samples differ in dimension");
    }

    // k-means++ seeding.
    std::mt19937_64 engine(seed);
    Codebook book;
    std::vector<char> chosen(samples.size(), 0);
    std::size_t first = std::min(samples.size() - 1,
                                 static_cast<std::size_t>(unit_random(engine) * samples.size()));
    book.centroids.push_back(samples[first]);
    chosen[first] = 1;
    std::vector<double> nearest(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) nearest[i] = squared_distance(samples[i], samples[first]);
    while (book.centroids.size() < k) {
        const double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
        std::size_t pick = 0;
        if (total > 0.0) {
            double target = unit_random(engine) * total;
            pick = samples.size() - 1;
            for (std::size_t i = 0; i < samples.size(); ++i) {
                if (nearest[i] <= 0.0) continue;
                if (target < nearest[i]) {
                    pick = i;
                    break;
                }
                target -= nearest[i];
            }
            while (nearest[pick] <= 0.0 && pick > 0) --pick;
        } else {
            while (chosen[pick]) ++pick;
        }
        chosen[pick] = 1;
        book.centroids.push_back(samples[pick]);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            nearest[i] = std::min(nearest[i], squared_distance(samples[i], samples[pick]));
        }
    }

    // Lloyd iterations.
    std::vector<std::size_t> assignment(samples.size(), std::numeric_limits<std::size_t>::max());
    for (int iter = 0; iter < max_iterations; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const std::size_t word = nearest_word(samples[i], book);
            if (word != assignment[i]) {
                assignment[i] = word;
                changed = true;
            }
        }
        book.iterations = iter + 1;
        if (!changed) break;
        std::vector<FeatureVector> sums(k, FeatureVector(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            for (std::size_t d = 0; d < dim; ++d) sums[assignment[i]][d] += samples[i][d];
            ++counts[assignment[i]];
        }
        for (std::size_t w = 0; w < k; ++w) {
            if (counts[w] == 0) continue;  // empty cluster keeps its centroid
            for (std::size_t d = 0; d < dim; ++d) book.centroids[w][d] = sums[w][d] / counts[w];
        }
    }
    return book;
}

std::size_t nearest_word(const FeatureVector& feature, const Codebook& codebook) {
    if (feature.size() != codebook.dimension()) throw ParameterError("feature dimension mismatch");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t w = 0; w < codebook.size(); ++w) {
        const double d = squared_distance(feature, codebook.centroids[w]);
        if (d < best_d) {
            best_d = d;
            best = w;
        }
    }
    return best;
}

BowHistogram bow_encode(std::span<const FeatureVector> local_features, const Codebook& codebook) {
    BowHistogram out;
    out.bins.assign(codebook.size(), 0.0);
    if (local_features.empty()) {
        out.empty_input = true;
        return out;
    }
    for (const auto& f : local_features) out.bins[nearest_word(f, codebook)] += 1.0;
    for (double& b : out.bins) b /= static_cast<double>(local_features.size());
    return out;
}

// ---- classifiers ---------------------------------------------------------

RecognitionTask parse_task(std::string_view name) {
    if (name == "actor") return RecognitionTask::actor;
    if (name == "action") return RecognitionTask::action;
    throw ParameterError("unknown task '" + std::string(name) + "'");
}

std::string_view to_string(RecognitionTask task) {
    return task == RecognitionTask::actor ? "actor" : "action";
}

ClassifierKind parse_classifier(std::string_view name) {
    if (name == "nc" || name == "nearest-centroid") return ClassifierKind::nearest_centroid;
    if (name == "knn") return ClassifierKind::knn;
    throw ParameterError("unknown classifier '" + std::string(name) + "'");
}

std::string_view to_string(ClassifierKind kind) {
    return kind == ClassifierKind::nearest_centroid ? "nearest-centroid" : "knn";
}

DistanceKind parse_distance(std::string_view name) {
    if (name == "euclidean") return DistanceKind::euclidean;
    if (name == "chi2") return DistanceKind::chi_squared;
    throw ParameterError("unknown distance '" + std::string(name) + "'");
}

std::string_view to_string(DistanceKind kind) {
    return kind == DistanceKind::euclidean ? "euclidean" : "chi2";
}

double distance(std::span<const double> lhs, std::span<const double> rhs, DistanceKind kind) {
    if (lhs.size() != rhs.size()) throw ParameterError("vector dimension mismatch");
    if (kind == DistanceKind::euclidean) return std::sqrt(squared_distance(lhs, rhs));
    double sum = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        const double s = lhs[i] + rhs[i];
        if (s > 0.0) {
            const double d = lhs[i] - rhs[i];
            sum += d * d / s;
        }
    }
    return 0.5 * sum;
}

ClassifierModel train_classifier(std::span<const Sample> training, const ClassifierConfig& config) {
    if (training.empty()) throw ParameterError("empty training set");
    if (config.kind == ClassifierKind::knn && config.k < 1) throw ParameterError("k-NN needs k >= 1");
    ClassifierModel model;
    model.config = config;
    std::map<int, std::vector<const Sample*>> by_class;
    for (const Sample& s : training) by_class[s.label].push_back(&s);
    for (auto& [label, members] : by_class) {
        model.classes.push_back(label);
        // Canonical summation order makes the centroid independent of the
        // order the training set arrives in.
        std::sort(members.begin(), members.end(),
                  [](const Sample* a, const Sample* b) { return a->x < b->x; });
        std::vector<double> mean(members.front()->x.size(), 0.0);
        for (const Sample* s : members)
            for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += s->x[d];
        for (double& m : mean) m /= static_cast<double>(members.size());
        model.centroids.push_back(std::move(mean));
    }
    if (config.kind == ClassifierKind::knn) model.samples.assign(training.begin(), training.end());
    return model;
}

int predict(const ClassifierModel& model, std::span<const double> x) {
    if (model.config.kind == ClassifierKind::nearest_centroid) {
        int best = model.classes.front();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < model.classes.size(); ++c) {
            const double d = distance(x, model.centroids[c], model.config.distance);
            if (d < best_d) {
                best_d = d;
                best = model.classes[c];
            }
        }
        return best;
    }
    // k-NN: majority vote among the k nearest (ties in distance broken by
    // sample value, ties in votes by the nearest voter).
    std::vector<std::pair<double, const Sample*>> ranked;
    for (const Sample& s : model.samples) ranked.emplace_back(distance(x, s.x, model.config.distance), &s);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        if (a.second->x != b.second->x) return a.second->x < b.second->x;
        return a.second->label < b.second->label;
    });
    const std::size_t k = std::min<std::size_t>(model.config.k, ranked.size());
    std::map<int, int> votes;
    for (std::size_t i = 0; i < k; ++i) ++votes[ranked[i].second->label];
    int best_votes = 0;
    for (const auto& [label, v] : votes) best_votes = std::max(best_votes, v);
    for (std::size_t i = 0; i < k; ++i) {
        if (votes[ranked[i].second->label] == best_votes) return ranked[i].second->label;
    }
    return ranked.front().second->label;
}

// ---- leave-one-out -----------------------------------------------------

double chance_level(RecognitionTask task) {
    return task == RecognitionTask::actor ? 1.0 / kActors.size() : 1.0 / kActions.size();
}

std::vector<Sample> make_samples(std::span<const LabeledDescriptor> data, RecognitionTask task,
                                 std::vector<std::string>* class_names) {
    std::vector<int> present;
    for (const auto& row : data) {
        present.push_back(task == RecognitionTask::actor ? static_cast<int>(row.actor)
                                                         : static_cast<int>(row.action));
    }
    std::vector<int> classes = present;
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    if (class_names) {
        class_names->clear();
        for (int c : classes) {
            class_names->emplace_back(task == RecognitionTask::actor ? to_string(static_cast<Actor>(c))
                                                                     : to_string(static_cast<Action>(c)));
        }
    }
    std::vector<Sample> samples;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const int index = static_cast<int>(std::lower_bound(classes.begin(), classes.end(), present[i]) - classes.begin());
        samples.push_back({data[i].vector, index});
    }
    return samples;
}

std::vector<Sample> fold_training_set(std::span<const Sample> samples, std::size_t held_out) {
    std::vector<Sample> training;
    training.reserve(samples.size() - 1);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i != held_out) training.push_back(samples[i]);
    }
    return training;
}

namespace {

std::vector<int> loo_predictions(std::span<const Sample> samples, const ClassifierConfig& config) {
    std::vector<int> predictions(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const ClassifierModel model = train_classifier(fold_training_set(samples, i), config);
        predictions[i] = predict(model, samples[i].x);
    }
    return predictions;
}

}  // namespace

LooReport loo_evaluate(std::span<const LabeledDescriptor> data, RecognitionTask task,
                       const ClassifierConfig& config) {
    LooReport report;
    report.task = task;
    report.config = config;
    const std::vector<Sample> samples = make_samples(data, task, &report.classes);
    std::vector<std::size_t> members(report.classes.size(), 0);
    for (const Sample& s : samples) ++members[s.label];
    for (std::size_t c = 0; c < members.size(); ++c) {
        if (members[c] < 2) {
            throw ValidationError("class '" + report.classes[c] + "' has " + std::to_string(members[c]) +
                                  " video(s); leave-one-out needs at least 2 per class");
        }
    }
    if (report.classes.size() < 2) throw ValidationError("leave-one-out needs at least two classes");

    report.predictions = loo_predictions(samples, config);
    report.confusion = ConfusionMatrix(report.classes, report.classes);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        report.confusion.add(samples[i].label, report.predictions[i]);
        if (samples[i].label == report.predictions[i]) ++correct;
    }
    report.accuracy = static_cast<double>(correct) / static_cast<double>(samples.size());

    if (task == RecognitionTask::action) {
        for (std::size_t c = 0; c < report.classes.size(); ++c) {
            std::vector<Sample> binary = samples;
            for (Sample& s : binary) s.label = s.label == static_cast<int>(c) ? 1 : 0;
            const std::vector<int> pred = loo_predictions(binary, config);
            std::size_t hits = 0;
            for (std::size_t i = 0; i < binary.size(); ++i) hits += pred[i] == binary[i].label ? 1 : 0;
            report.one_vs_all_accuracy.push_back(static_cast<double>(hits) / binary.size());
        }
    }
    return report;
}

std::string report_json(const LooReport& report) {
    nlohmann::ordered_json j;
    j["task"] = to_string(report.task);
    j["classifier"] = to_string(report.config.kind);
    if (report.config.kind == ClassifierKind::knn) j["k"] = report.config.k;
    j["distance"] = to_string(report.config.distance);
    j["videos"] = report.predictions.size();
    j["accuracy"] = report.accuracy;
    j["chance"] = chance_level(report.task);
    j["classes"] = report.classes;
    j["confusion_counts"] = report.confusion.counts;
    j["confusion_rates"] = report.confusion.rates();
    if (!report.one_vs_all_accuracy.empty()) {
        nlohmann::ordered_json ova;
        for (std::size_t c = 0; c < report.classes.size(); ++c) ova[report.classes[c]] = report.one_vs_all_accuracy[c];
        j["one_vs_all_accuracy"] = ova;
    }
    return j.dump(2);
}

}  // namespace svx
