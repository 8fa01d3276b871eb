#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "svx/confusion.hpp"
#include "svx/taxonomy.hpp"

namespace svx {

/// One per-video descriptor with its ground-truth annotations.
struct LabeledDescriptor {
    std::string video_id;
    Actor actor = Actor::human;
    Action action = Action::walking;
    Background background = Background::static_scene;
    std::string level = "n/a";  ///< fine|medium|coarse|n/a
    std::vector<double> vector;
};

/// Whitespace-separated text: `<id> <actor> <action> <background> <level> v1 ... vd`.
std::vector<LabeledDescriptor> read_descriptor_text(std::istream& in);
std::vector<LabeledDescriptor> read_descriptor_text(const std::filesystem::path& path);
void write_descriptor_text(std::ostream& out, std::span<const LabeledDescriptor> rows);
void append_descriptor_text(const std::filesystem::path& path, const LabeledDescriptor& row);

// ---- bag of words --------------------------------------------------------

using FeatureVector = std::vector<double>;

struct Codebook {
    std::vector<FeatureVector> centroids;
    int iterations = 0;

    std::size_t size() const { return centroids.size(); }
    std::size_t dimension() const { return centroids.empty() ? 0 : centroids.front().size(); }
};

/// Lloyd iterations from a seeded k-means++ start; stops when assignments are
/// stable or after `max_iterations`.
Codebook kmeans_codebook(std::span<const FeatureVector> samples, std::size_t k,
                         std::uint64_t seed, int max_iterations = 100);

/// Index of the nearest centroid; ties go to the lowest index.
std::size_t nearest_word(const FeatureVector& feature, const Codebook& codebook);

struct BowHistogram {
    std::vector<double> bins;  ///< L1-normalized
    bool empty_input = false;
};

BowHistogram bow_encode(std::span<const FeatureVector> local_features, const Codebook& codebook);

// ---- leave-one-out evaluation -------------------------------------------

enum class RecognitionTask { actor, action };
enum class ClassifierKind { nearest_centroid, knn };
enum class DistanceKind { euclidean, chi_squared };

struct ClassifierConfig {
    ClassifierKind kind = ClassifierKind::nearest_centroid;
    int k = 1;
    DistanceKind distance = DistanceKind::euclidean;
};

RecognitionTask parse_task(std::string_view name);
std::string_view to_string(RecognitionTask task);
ClassifierKind parse_classifier(std::string_view name);
std::string_view to_string(ClassifierKind kind);
DistanceKind parse_distance(std::string_view name);
std::string_view to_string(DistanceKind kind);

double distance(std::span<const double> lhs, std::span<const double> rhs, DistanceKind kind);

struct Sample {
    std::vector<double> x;
    int label = 0;
};

/// Trained classifier state. For nearest-centroid, one centroid per class
/// present in training; for k-NN, the training samples themselves.
struct ClassifierModel {
    ClassifierConfig config;
    std::vector<int> classes;
    std::vector<std::vector<double>> centroids;
    std::vector<Sample> samples;
};

ClassifierModel train_classifier(std::span<const Sample> training, const ClassifierConfig& config);
int predict(const ClassifierModel& model, std::span<const double> x);

struct LooReport {
    RecognitionTask task = RecognitionTask::actor;
    ClassifierConfig config;
    std::vector<std::string> classes;
    double accuracy = 0.0;
    ConfusionMatrix confusion;
    /// Action task: accuracy of the binary class-vs-rest LOO classifier per class.
    std::vector<double> one_vs_all_accuracy;
    std::vector<int> predictions;  ///< per input row, class index into `classes`
};

/// Chance accuracy over the full label set: 1/2 for actor, 1/8 for action.
double chance_level(RecognitionTask task);

/// Samples for one task; classes are those present, in canonical order.
std::vector<Sample> make_samples(std::span<const LabeledDescriptor> data, RecognitionTask task,
                                 std::vector<std::string>* class_names = nullptr);

/// Training set for fold `held_out`: every sample except that one.
std::vector<Sample> fold_training_set(std::span<const Sample> samples, std::size_t held_out);

/// Requires at least two samples per present class.
LooReport loo_evaluate(std::span<const LabeledDescriptor> data, RecognitionTask task,
                       const ClassifierConfig& config);

/// JSON report (task, classifier, accuracy, confusion, per-class rates).
std::string report_json(const LooReport& report);

}  // namespace svx
